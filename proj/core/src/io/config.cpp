#include "rkwf/io/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace rkwf::io {

namespace {

int line_of(const YAML::Node& n) { return n.Mark().line >= 0 ? n.Mark().line + 1 : 0; }

void check_keys(const YAML::Node& map, const std::string& where, const std::set<std::string>& allowed) {
  if (!map.IsMap()) throw ConfigError(where + " must be a mapping", line_of(map));
  for (const auto& kv : map) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where, line_of(kv.first));
  }
}

template <typename T>
T scalar(const YAML::Node& n, const std::string& key) {
  if (!n.IsScalar()) throw ConfigError("'" + key + "' must be a scalar", line_of(n));
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError("'" + key + "' has the wrong type", line_of(n));
  }
}

template <typename T>
void read(const YAML::Node& map, const std::string& key, T& out) {
  if (const auto n = map[key]) out = scalar<T>(n, key);
}

template <typename T>
void read_list(const YAML::Node& map, const std::string& key, std::vector<T>& out) {
  const auto n = map[key];
  if (!n) return;
  out.clear();
  if (n.IsScalar()) {
    out.push_back(scalar<T>(n, key));
    return;
  }
  if (!n.IsSequence()) throw ConfigError("'" + key + "' must be a scalar or a list", line_of(n));
  for (const auto& item : n) out.push_back(scalar<T>(item, key));
  if (out.empty()) throw ConfigError("'" + key + "' must not be empty", line_of(n));
}

// Runs `f`, turning std::invalid_argument into a ConfigError at `node`.
template <typename F>
auto at(const YAML::Node& node, F&& f) {
  try {
    return f();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what(), line_of(node));
  }
}

const std::set<std::string> kSolverKeys = {
    "name",     "preset",    "loss",      "lambda",  "epsilon",       "truncation",         "gamma_e",
    "gamma_ub", "gamma_h",   "step",      "mu",      "k0",            "mu_max",             "beta",
    "slope",    "mu0",       "max_iters", "stop_tol", "init",         "step_normalization", "scale_grad_by_m",
    "init_norm", "eig_max_iters", "eig_tol", "divergence_factor"};

SolverConfig parse_solver_entry(const YAML::Node& n) {
  if (n.IsScalar()) {
    const auto name = n.as<std::string>();
    return at(n, [&] { return preset(name); });
  }
  check_keys(n, "solver entry", kSolverKeys);
  std::string base = "rkld-wf-gaussian";
  read(n, "preset", base);
  SolverConfig c = at(n, [&] { return preset(base); });
  read(n, "name", c.name);

  if (const auto v = n["loss"]) {
    const auto type = at(v, [&] { return loss_type_from_string(scalar<std::string>(v, "loss")); });
    c.loss = LossKind{type, c.loss.lambda, c.loss.epsilon};
  }
  read(n, "lambda", c.loss.lambda);
  if (const auto v = n["epsilon"]) c.loss.epsilon = scalar<double>(v, "epsilon");

  if (const auto v = n["truncation"]) {
    c.truncation.type = at(v, [&] { return truncation_type_from_string(scalar<std::string>(v, "truncation")); });
  }
  read(n, "gamma_e", c.truncation.gamma_e);
  read(n, "gamma_ub", c.truncation.gamma_ub);
  read(n, "gamma_h", c.truncation.gamma_h);

  if (const auto v = n["step"]) {
    c.step.type = at(v, [&] { return step_type_from_string(scalar<std::string>(v, "step")); });
  }
  read(n, "mu", c.step.mu);
  read(n, "k0", c.step.k0);
  read(n, "mu_max", c.step.mu_max);
  read(n, "beta", c.step.beta);
  read(n, "slope", c.step.slope);
  read(n, "mu0", c.step.mu0);

  read(n, "max_iters", c.max_iters);
  read(n, "stop_tol", c.stop_tol);
  if (const auto v = n["init"]) {
    c.init = at(v, [&] { return init_kind_from_string(scalar<std::string>(v, "init")); });
    if (c.init == InitKind::Provided) throw ConfigError("init = provided cannot be set from a config file", line_of(v));
  }
  if (const auto v = n["step_normalization"]) {
    c.step_normalization =
        at(v, [&] { return step_normalization_from_string(scalar<std::string>(v, "step_normalization")); });
  }
  read(n, "scale_grad_by_m", c.scale_grad_by_m);
  if (const auto v = n["init_norm"]) c.init_norm_override = scalar<double>(v, "init_norm");
  read(n, "eig_max_iters", c.eig.max_iters);
  read(n, "eig_tol", c.eig.tol);
  read(n, "divergence_factor", c.divergence_factor);

  at(n, [&] {
    c.validate();
    return 0;
  });
  return c;
}

YAML::Node parse_document(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("syntax error: " + e.msg, e.mark.line + 1);
  }
  if (!root.IsMap()) throw ConfigError("config must be a mapping at top level");
  const auto version = root["schema_version"];
  if (!version) throw ConfigError("missing schema_version");
  if (scalar<int>(version, "schema_version") != kConfigSchemaVersion) {
    throw ConfigError("unsupported schema_version (expected " + std::to_string(kConfigSchemaVersion) + ")",
                      line_of(version));
  }
  return root;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

ExperimentSpec parse_experiment_config(const std::string& text) {
  const YAML::Node root = parse_document(text);
  check_keys(root, "top level", {"schema_version", "experiment", "model", "signal", "corruption", "algorithms"});
  ExperimentSpec spec;

  if (const auto e = root["experiment"]) {
    check_keys(e, "[experiment]", {"name", "trials", "base_seed", "max_iters", "success_threshold",
                                   "threshold_mode", "fresh_signal", "are_cap"});
    read(e, "name", spec.name);
    read(e, "trials", spec.trials);
    read(e, "base_seed", spec.base_seed);
    if (const auto v = e["max_iters"]) spec.max_iters = scalar<int>(v, "max_iters");
    read(e, "success_threshold", spec.success_threshold);
    if (const auto v = e["threshold_mode"]) {
      const auto mode = scalar<std::string>(v, "threshold_mode");
      if (mode == "absolute") spec.threshold_mode = ThresholdMode::Absolute;
      else if (mode == "relative") spec.threshold_mode = ThresholdMode::Relative;
      else throw ConfigError("threshold_mode must be absolute or relative", line_of(v));
    }
    read(e, "fresh_signal", spec.fresh_signal);
    read(e, "are_cap", spec.are_cap);
  }
  if (const auto m = root["model"]) {
    check_keys(m, "[model]", {"kind", "n", "alpha", "l_patterns"});
    if (const auto v = m["kind"]) spec.model = at(v, [&] { return model_kind_from_string(scalar<std::string>(v, "kind")); });
    read(m, "n", spec.n);
    read_list(m, "alpha", spec.alphas);
    read_list(m, "l_patterns", spec.l_patterns);
  }
  if (const auto s = root["signal"]) {
    check_keys(s, "[signal]", {"kind"});
    if (const auto v = s["kind"]) spec.signal = at(v, [&] { return signal_kind_from_string(scalar<std::string>(v, "kind")); });
  }
  if (const auto c = root["corruption"]) {
    check_keys(c, "[corruption]", {"sigma", "theta", "rho", "signed_outliers"});
    read_list(c, "sigma", spec.sigmas);
    read_list(c, "theta", spec.thetas);
    read_list(c, "rho", spec.rhos);
    read(c, "signed_outliers", spec.signed_outliers);
  }
  const auto algs = root["algorithms"];
  if (!algs) throw ConfigError("missing algorithms");
  if (!algs.IsSequence()) throw ConfigError("algorithms must be a list", line_of(algs));
  std::set<std::string> names;
  for (const auto& a : algs) {
    const SolverConfig cfg = parse_solver_entry(a);
    if (!names.insert(cfg.name).second) throw ConfigError("duplicate algorithm name '" + cfg.name + "'", line_of(a));
    spec.algorithms.push_back({cfg.name, cfg});
  }
  at(root, [&] {
    spec.validate();
    return 0;
  });
  return spec;
}

ExperimentSpec load_experiment_config(const std::filesystem::path& path) {
  return parse_experiment_config(slurp(path));
}

SolverConfig parse_solver_config(const std::string& text) {
  const YAML::Node root = parse_document(text);
  check_keys(root, "top level", {"schema_version", "solver"});
  const auto s = root["solver"];
  if (!s) throw ConfigError("missing solver");
  return parse_solver_entry(s);
}

SolverConfig load_solver_config(const std::filesystem::path& path) {
  return parse_solver_config(slurp(path));
}

}  // namespace rkwf::io
