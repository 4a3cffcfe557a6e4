#include "rkwf/io/results.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rkwf/io/array_file.hpp"

namespace rkwf::io {

using nlohmann::json;

const std::vector<std::string>& trial_csv_columns() {
  static const std::vector<std::string> cols = {"algorithm", "sweep_var", "sweep_value", "trial",
                                                "seed",      "dist",      "rel_err",     "iters",
                                                "success",   "wall_ms",   "acc",         "aborted"};
  return cols;
}

const std::vector<std::string>& aggregate_csv_columns() {
  static const std::vector<std::string> cols = {"algorithm", "sweep_var", "sweep_value",
                                                "trials",    "are",       "success_probability",
                                                "acc",       "mean_iters", "aborted"};
  return cols;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string header(const std::vector<std::string>& cols) {
  std::string out;
  for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i];
  return out + "\n";
}

// JSON has no inf/nan; those become null.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json meta_json(const ProblemInstance& p) {
  json j;
  j["schema_version"] = kResultsSchemaVersion;
  j["model"] = to_string(p.meta.model);
  j["n"] = p.op.cols();
  j["m"] = p.op.rows();
  if (p.op.is_cdp()) j["l_patterns"] = p.op.pattern_count();
  j["sigma"] = p.meta.corruption.sigma;
  j["theta"] = p.meta.corruption.theta;
  j["rho"] = p.meta.corruption.rho;
  j["signed_outliers"] = p.meta.corruption.signed_outliers;
  j["seed"] = p.meta.seed;
  j["has_x_true"] = p.x_true.has_value();
  return j;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ArrayFileError(ArrayFileError::Kind::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

std::string trials_csv(const std::vector<TrialRecord>& trials) {
  std::string out = header(trial_csv_columns());
  for (const auto& t : trials) {
    out += t.algorithm + "," + t.sweep_var + "," + format_double(t.sweep_value) + "," +
           std::to_string(t.trial) + "," + std::to_string(t.seed) + "," + format_double(t.dist) + "," +
           format_double(t.rel_err) + "," + std::to_string(t.iterations) + "," + (t.success ? "1" : "0") +
           "," + format_double(t.wall_ms) + "," + format_double(t.acc) + "," + (t.aborted ? "1" : "0") + "\n";
  }
  return out;
}

std::string aggregates_csv(const std::vector<AggregateRow>& rows) {
  std::string out = header(aggregate_csv_columns());
  for (const auto& r : rows) {
    out += r.algorithm + "," + r.sweep_var + "," + format_double(r.sweep_value) + "," +
           std::to_string(r.trials) + "," + format_double(r.are) + "," + format_double(r.success_probability) +
           "," + format_double(r.acc) + "," + format_double(r.mean_iters) + "," + std::to_string(r.aborted) +
           "\n";
  }
  return out;
}

std::string trace_csv(const std::vector<TraceRecord>& trace) {
  std::string out = "iter,loss,rel_err,kept_count,step\n";
  for (const auto& t : trace) {
    out += std::to_string(t.iter) + "," + format_double(t.loss) + "," +
           (std::isnan(t.rel_err) ? std::string() : format_double(t.rel_err)) + "," +
           std::to_string(t.kept_count) + "," + format_double(t.step) + "\n";
  }
  return out;
}

std::string solve_summary_json(const SolverConfig& config, const ProblemInstance& problem,
                               const SolverResult& result) {
  json j;
  j["schema_version"] = kResultsSchemaVersion;
  j["algorithm"] = config.name;
  j["loss"] = to_string(config.loss.type);
  j["truncation"] = to_string(config.truncation.type);
  j["step"] = to_string(config.step.type);
  j["n"] = problem.op.cols();
  j["m"] = problem.op.rows();
  j["status"] = to_string(result.status);
  j["converged"] = result.converged;
  j["iterations"] = result.iterations;
  j["final_loss"] = result.trace.empty() ? json(nullptr) : num(result.trace.back().loss);
  j["init"] = {{"kind", to_string(config.init)},
               {"eigenvalue", num(result.init.eigenvalue)},
               {"scale", num(result.init.scale)},
               {"power_iterations", result.init.iterations},
               {"converged", result.init.converged}};
  if (problem.x_true) {
    const double d = dist_up_to_phase(*problem.x_true, result.z);
    j["dist"] = num(d);
    j["rel_err"] = num(d / problem.x_true->norm());
  }
  if (result.aborted()) {
    if (result.failed_iteration) j["failed_iteration"] = *result.failed_iteration;
    if (result.failed_index) j["failed_index"] = *result.failed_index;
    j["diagnostic"] = result.diagnostic;
  }
  return j.dump(2) + "\n";
}

std::string experiment_meta_json(const ExperimentSpec& spec, int threads) {
  json j;
  j["schema_version"] = kResultsSchemaVersion;
  j["name"] = spec.name;
  j["model"] = to_string(spec.model);
  j["n"] = spec.n;
  j["signal"] = to_string(spec.signal);
  j["trials"] = spec.trials;
  j["base_seed"] = spec.base_seed;
  j["success_threshold"] = spec.success_threshold;
  j["threshold_mode"] = spec.threshold_mode == ThresholdMode::Absolute ? "absolute" : "relative";
  j["are_cap"] = spec.are_cap;
  j["fresh_signal"] = spec.fresh_signal;
  j["threads"] = threads;
  json algs = json::array();
  for (const auto& a : spec.algorithms) algs.push_back(a.name);
  j["algorithms"] = algs;
  return j.dump(2) + "\n";
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw ArrayFileError(ArrayFileError::Kind::Io, "cannot open " + path.string() + " for writing");
  f << content;
  if (!f) throw ArrayFileError(ArrayFileError::Kind::Io, "write failed: " + path.string());
}

void save_problem(const std::filesystem::path& dir, const ProblemInstance& problem) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ArrayFileError(ArrayFileError::Kind::Io, "cannot create " + dir.string() + ": " + ec.message());
  if (problem.op.is_dense()) {
    write_array(dir / "A.rkph", from_matrix(problem.op.dense_matrix()));
  } else {
    write_array(dir / "patterns.rkph", from_matrix(problem.op.cdp_patterns()));
  }
  write_array(dir / "y.rkph", from_real_vector(problem.y));
  if (problem.x_true) write_array(dir / "x_true.rkph", from_vector(*problem.x_true));
  write_text(dir / "meta.json", meta_json(problem).dump(2) + "\n");
}

ProblemInstance load_problem(const std::filesystem::path& dir) {
  const json meta = [&] {
    try {
      return json::parse(read_text(dir / "meta.json"));
    } catch (const json::exception& e) {
      throw std::invalid_argument((dir / "meta.json").string() + ": " + e.what());
    }
  }();
  ProblemMeta pm;
  try {
    pm.model = model_kind_from_string(meta.at("model").get<std::string>());
    pm.corruption = {meta.at("sigma").get<double>(), meta.at("theta").get<double>(), meta.at("rho").get<double>(),
                     meta.at("signed_outliers").get<bool>()};
    pm.seed = meta.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw std::invalid_argument((dir / "meta.json").string() + ": " + e.what());
  }

  const bool cdp = pm.model == ModelKind::Cdp;
  const auto op_file = dir / (cdp ? "patterns.rkph" : "A.rkph");
  MeasurementOperator op = [&] {
    try {
      const ComplexMatrix m = to_matrix(read_array(op_file));
      return cdp ? MeasurementOperator::cdp(m) : MeasurementOperator::dense(m);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(op_file.string() + ": " + e.what());
    }
  }();
  const auto y_file = dir / "y.rkph";
  RealVector y = [&] {
    try {
      return to_real_vector(read_array(y_file));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(y_file.string() + ": " + e.what());
    }
  }();
  if (y.size() != op.rows()) {
    throw std::invalid_argument(y_file.string() + ": length " + std::to_string(y.size()) + " does not match M = " +
                                std::to_string(op.rows()));
  }
  std::optional<ComplexVector> x;
  const auto x_file = dir / "x_true.rkph";
  if (std::filesystem::exists(x_file)) {
    x = to_vector(read_array(x_file));
    if (x->size() != op.cols()) {
      throw std::invalid_argument(x_file.string() + ": length " + std::to_string(x->size()) +
                                  " does not match N = " + std::to_string(op.cols()));
    }
  }
  return ProblemInstance{std::move(op), std::move(y), std::move(x), pm};
}

ProblemInstance load_external_problem(const std::filesystem::path& a_file, const std::filesystem::path& y_file) {
  ComplexMatrix a;
  try {
    a = to_matrix(read_array(a_file));
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(a_file.string() + ": " + e.what());
  }
  RealVector y;
  try {
    y = to_real_vector(read_array(y_file));
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(y_file.string() + ": " + e.what());
  }
  if (y.size() != a.rows()) {
    throw std::invalid_argument(y_file.string() + ": length " + std::to_string(y.size()) + " does not match " +
                                a_file.string() + " with " + std::to_string(a.rows()) + " rows");
  }
  for (Eigen::Index i = 0; i < y.size(); ++i)
    if (!(y[i] >= 0.0) || !std::isfinite(y[i])) {
      throw std::invalid_argument(y_file.string() + ": entry " + std::to_string(i) + " is negative or non-finite");
    }
  ProblemMeta meta;
  return ProblemInstance{MeasurementOperator::dense(std::move(a)), std::move(y), std::nullopt, meta};
}

}  // namespace rkwf::io
