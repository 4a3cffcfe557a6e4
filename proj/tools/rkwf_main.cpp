// rkwf: generate problems, solve them, run Monte-Carlo sweeps, export loss
// surfaces. Exit codes: 0 ok, 1 I/O failure, 2 usage or validation error.
// Errors go to stderr as one JSON object.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>

#if __has_include(<CLI/CLI.hpp>)
#include <CLI/CLI.hpp>
#else
#include <CLI11.hpp>
#endif
#include <nlohmann/json.hpp>

#include "rkwf/harness.hpp"
#include "rkwf/io/array_file.hpp"
#include "rkwf/io/config.hpp"
#include "rkwf/io/results.hpp"
#include "rkwf/landscape.hpp"

namespace fs = std::filesystem;
using namespace rkwf;

namespace {

constexpr int kExitIo = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int fail(int code, const std::string& kind, const std::string& message) {
  nlohmann::json j = {{"error", message}, {"kind", kind}, {"exit_code", code}};
  std::cerr << j.dump() << "\n";
  return code;
}

struct GenArgs {
  std::string model = "gaussian";
  long n = 64;
  double alpha = 6.0;
  long l_patterns = 8;
  std::string signal = "complex";
  double sigma = 0.0;
  double theta = 0.0;
  double rho = 0.0;
  bool signed_outliers = false;
  std::uint64_t seed = 1;
  std::string out;
};

struct SolveArgs {
  std::string in_dir;
  std::string a_file;
  std::string y_file;
  std::string preset_name;
  std::string config_file;
  std::string out;
  std::string trace;
  std::string z_out;
  int max_iters = 0;
};

struct BenchArgs {
  std::string config;
  std::string out;
  std::string aggregates;
  std::string meta;
  int threads = 1;
};

struct LandscapeArgs {
  std::string in_dir;
  std::string loss = "rkld";
  double lambda = 1e-8;
  double range = 2.0;
  long points = 101;
  std::string out;
};

int do_gen(const GenArgs& a) {
  ExperimentSpec spec;
  spec.model = model_kind_from_string(a.model);
  spec.n = a.n;
  spec.signal = signal_kind_from_string(a.signal);
  if (spec.n < 1) throw UsageError("--n must be >= 1");
  SweepPoint point;
  point.corruption = {a.sigma, a.theta, a.rho, a.signed_outliers};
  point.corruption.validate();
  if (spec.model == ModelKind::Gaussian) {
    if (!(a.alpha > 0.0) || std::lround(a.alpha * static_cast<double>(a.n)) < 1) {
      throw UsageError("--alpha must give at least one measurement");
    }
    point.alpha = a.alpha;
  } else {
    if (a.l_patterns < 1) throw UsageError("--l-patterns must be >= 1");
    point.l_patterns = static_cast<int>(a.l_patterns);
  }
  const ComplexVector x = signal_for_seed(spec.signal, spec.n, a.seed);
  const ProblemInstance p = make_trial_problem(spec, point, x, a.seed);
  io::save_problem(a.out, p);
  return 0;
}

int do_solve(const SolveArgs& a) {
  const bool from_dir = !a.in_dir.empty();
  const bool from_files = !a.a_file.empty() || !a.y_file.empty();
  if (from_dir == from_files) throw UsageError("give either --in or both --a and --y");
  if (from_files && (a.a_file.empty() || a.y_file.empty())) throw UsageError("--a and --y must be given together");
  if (!a.preset_name.empty() && !a.config_file.empty()) throw UsageError("give at most one of --preset or --config");

  SolverConfig cfg = !a.config_file.empty() ? io::load_solver_config(a.config_file)
                     : preset(a.preset_name.empty() ? "rkld-wf-gaussian" : a.preset_name);
  if (a.max_iters > 0) cfg.max_iters = a.max_iters;
  const ProblemInstance p = from_dir ? io::load_problem(a.in_dir) : io::load_external_problem(a.a_file, a.y_file);
  const SolverResult r = run(p, cfg);

  const std::string summary = io::solve_summary_json(cfg, p, r);
  if (a.out.empty()) std::cout << summary;
  else io::write_text(a.out, summary);
  if (!a.trace.empty()) io::write_text(a.trace, io::trace_csv(r.trace));
  if (!a.z_out.empty()) io::write_array(a.z_out, io::from_vector(r.z));
  return 0;
}

fs::path sibling(const fs::path& out, const std::string& suffix) {
  return out.parent_path() / (out.stem().string() + suffix);
}

int do_bench(const BenchArgs& a) {
  if (a.threads < 1) throw UsageError("--threads must be >= 1");
  const ExperimentSpec spec = io::load_experiment_config(a.config);
  const ResultTable table = run_experiment(spec, a.threads);
  const fs::path out = a.out;
  io::write_text(out, io::trials_csv(table.trials));
  io::write_text(a.aggregates.empty() ? sibling(out, "_aggregates.csv") : fs::path(a.aggregates),
                 io::aggregates_csv(table.aggregates));
  io::write_text(a.meta.empty() ? sibling(out, "_meta.json") : fs::path(a.meta),
                 io::experiment_meta_json(spec, a.threads));
  return 0;
}

int do_landscape(const LandscapeArgs& a) {
  if (!(a.range > 0.0)) throw UsageError("--range must be > 0");
  if (a.points < 1) throw UsageError("--points must be >= 1");
  const ProblemInstance p = io::load_problem(a.in_dir);
  LossKind loss{loss_type_from_string(a.loss), a.lambda, {}};
  GridSpec grid{-a.range, a.range, -a.range, a.range, a.points, a.points};
  const RealMatrix s = loss_surface_grid(p.op, p.y, loss, grid);
  std::string csv = "u,v,loss\n";
  for (Eigen::Index i = 0; i < s.rows(); ++i)
    for (Eigen::Index j = 0; j < s.cols(); ++j)
      csv += io::format_double(grid.u(i)) + "," + io::format_double(grid.v(j)) + "," + io::format_double(s(i, j)) + "\n";
  io::write_text(a.out, csv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust phase retrieval with reverse-KL Wirtinger flow"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Generate a problem instance");
  g->add_option("--model", gen.model, "gaussian|cdp")->check(CLI::IsMember({"gaussian", "cdp"}));
  g->add_option("--n", gen.n, "Signal length N");
  g->add_option("--alpha", gen.alpha, "Oversampling M/N (gaussian)");
  g->add_option("--l-patterns", gen.l_patterns, "Number of patterns L (cdp)");
  g->add_option("--signal", gen.signal, "complex|real")->check(CLI::IsMember({"complex", "real"}));
  g->add_option("--sigma", gen.sigma, "Noise bound in units of ||x||^2");
  g->add_option("--theta", gen.theta, "Outlier bound in units of ||x||^2");
  g->add_option("--rho", gen.rho, "Outlier fraction");
  g->add_flag("--signed-outliers", gen.signed_outliers, "Outliers take either sign");
  g->add_option("--seed", gen.seed, "Seed");
  g->add_option("--out", gen.out, "Output directory")->required();

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "Recover a signal from intensities");
  s->add_option("--in", solve.in_dir, "Problem directory written by gen");
  s->add_option("--a", solve.a_file, "Measurement matrix (.rkph, M x N)");
  s->add_option("--y", solve.y_file, "Intensities (.rkph, length M)");
  s->add_option("--preset", solve.preset_name, "Named parameter set (default rkld-wf-gaussian)");
  s->add_option("--config", solve.config_file, "Solver config file (YAML)");
  s->add_option("--out", solve.out, "Result summary JSON (stdout if omitted)");
  s->add_option("--trace", solve.trace, "Per-iteration trace CSV");
  s->add_option("--z", solve.z_out, "Write the estimate as .rkph");
  s->add_option("--max-iters", solve.max_iters, "Override the iteration count");

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "Run a Monte-Carlo experiment");
  b->add_option("--config", bench.config, "Experiment config file (YAML)")->required();
  b->add_option("--out", bench.out, "Trial table CSV")->required();
  b->add_option("--aggregates", bench.aggregates, "Aggregate CSV (default <out>_aggregates.csv)");
  b->add_option("--meta", bench.meta, "Run metadata JSON (default <out>_meta.json)");
  b->add_option("--threads", bench.threads, "Worker threads");

  LandscapeArgs land;
  auto* l = app.add_subcommand("landscape", "Export a loss surface for an N = 2 problem");
  l->add_option("--in", land.in_dir, "Problem directory with N = 2")->required();
  l->add_option("--loss", land.loss, "rkld|l2|poisson|reshaped");
  l->add_option("--lambda", land.lambda, "RKLD regularizer");
  l->add_option("--range", land.range, "Grid covers [-range, range]^2");
  l->add_option("--points", land.points, "Points per axis");
  l->add_option("--out", land.out, "Output CSV (u, v, loss)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(kExitUsage, "usage", e.what());
  }

  try {
    if (g->parsed()) return do_gen(gen);
    if (s->parsed()) return do_solve(solve);
    if (b->parsed()) return do_bench(bench);
    if (l->parsed()) return do_landscape(land);
  } catch (const io::ArrayFileError& e) {
    return fail(kExitIo, "io:" + io::to_string(e.kind()), e.what());
  } catch (const io::ConfigError& e) {
    return fail(kExitUsage, "config", e.what());
  } catch (const UsageError& e) {
    return fail(kExitUsage, "usage", e.what());
  } catch (const std::invalid_argument& e) {
    return fail(kExitUsage, "validation", e.what());
  } catch (const std::exception& e) {
    return fail(kExitIo, "io", e.what());
  }
  return kExitUsage;
}
