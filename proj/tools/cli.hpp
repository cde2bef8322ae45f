#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pie/lime_baseline.hpp"
#include "pie/pie_core.hpp"

namespace pie::cli {

// Stable process exit codes.
enum ExitCode : int {
  kOk = 0,
  kInternal = 1,    // anything unclassified, including failed output writes
  kInput = 2,       // bad flags, unreadable or invalid inputs
  kDegenerate = 3,  // the math has no answer for these inputs
};

enum class Mode { kStandardized, kRaw };

struct RunConfig {
  std::string subcommand;
  std::string data_path;
  std::optional<std::string> importance_path;
  std::optional<std::string> target;
  bool row_ids = false;
  Mode mode = Mode::kStandardized;
  std::size_t top_k = 3;
  std::string method = "ols";
  std::size_t n_samples = 500;
  std::size_t k_features = 3;
  std::optional<double> kernel_width;
  std::size_t budget = 5;
  std::uint64_t seed = 42;
  std::vector<std::string> rows;
  std::string output;
  bool emit_plot_data = false;
  bool timestamp = false;
};

// Parses `args` (without the program name) and runs the subcommand.
// Human-readable summaries go to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

// Runs an already-parsed configuration; exceptions propagate.
void dispatch(const RunConfig& config, std::ostream& out);

// Rounds to 6 significant digits, the precision of every textual weight.
double round_weight(double value);

struct ScoreRun {
  ObservationTable table;
  FeatureImportance importance;  // aligned to the table
  PieReport report;
  std::optional<StandardizationStats> stats;      // standardized mode only
  std::optional<FeatureImportance> importance_std;
};

ScoreRun score(const RunConfig& config);

nlohmann::ordered_json score_report_json(const ScoreRun& run,
                                         const RunConfig& config);
nlohmann::ordered_json explanation_json(const ExplanationMatrix& expl,
                                        const ObservationTable& table,
                                        const RunConfig& config);
nlohmann::ordered_json pick_json(const PickResult& pick,
                                 const ExplanationMatrix& expl,
                                 const ObservationTable& table,
                                 const RunConfig& config);

// Writes `<dir>/<row id>.csv` for each requested row (all rows when empty)
// and `<dir>/normalized_importance.csv`.
void write_plot_data(const ScoreRun& run, const std::vector<std::string>& rows,
                     const std::string& dir);

}  // namespace pie::cli
