#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "rkwf/harness.hpp"
#include "rkwf/solver.hpp"

namespace rkwf::io {

inline constexpr int kResultsSchemaVersion = 1;

/// Column order of the trial table. wall_ms is the only timing column.
const std::vector<std::string>& trial_csv_columns();
const std::vector<std::string>& aggregate_csv_columns();

/// Round-trip formatting for doubles (%.17g; inf, -inf and nan spelled out).
std::string format_double(double v);

std::string trials_csv(const std::vector<TrialRecord>& trials);
std::string aggregates_csv(const std::vector<AggregateRow>& rows);
/// Columns: iter, loss, rel_err, kept_count, step. rel_err is empty without
/// ground truth.
std::string trace_csv(const std::vector<TraceRecord>& trace);

/// Result summary for one solve. rel_err and dist appear only when x_true is
/// known.
std::string solve_summary_json(const SolverConfig& config, const ProblemInstance& problem,
                               const SolverResult& result);

/// Metadata for a bench run: experiment echo, schema version, ARE cap.
std::string experiment_meta_json(const ExperimentSpec& spec, int threads);

/// Problem directory: A.rkph (dense) or patterns.rkph (CDP), y.rkph,
/// x_true.rkph when known, meta.json.
void save_problem(const std::filesystem::path& dir, const ProblemInstance& problem);
ProblemInstance load_problem(const std::filesystem::path& dir);

/// Dense problem from external files without ground truth. Throws
/// std::invalid_argument naming the offending file on shape mismatch.
ProblemInstance load_external_problem(const std::filesystem::path& a_file,
                                      const std::filesystem::path& y_file);

void write_text(const std::filesystem::path& path, const std::string& content);

}  // namespace rkwf::io
