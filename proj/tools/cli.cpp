#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "pie/errors.hpp"
#include "pie/importance.hpp"

namespace pie::cli {
namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << content;
  out.flush();
  if (!out) throw std::runtime_error("failed writing output file: " + path);
}

std::string utc_timestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

const char* mode_name(Mode mode) {
  return mode == Mode::kRaw ? "raw" : "standardized";
}

std::string file_stem_for(const std::string& row_id) {
  std::string out;
  for (char c : row_id) {
    const bool safe = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
                      (c >= '0' && c <= '9') || c == '-' || c == '_' || c == '.';
    out += safe ? c : '_';
  }
  if (out.empty() || out == "." || out == "..") out = "_" + out;
  return out;
}

std::string weight_text(double w) { return format_real(round_weight(w)); }

std::unique_ptr<BlackBoxModel> make_model(const RunConfig& config,
                                          ObservationTable& table,
                                          StandardizationStats& stats) {
  if (config.importance_path) {
    const auto imp = align(load_importance_file(*config.importance_path), table);
    stats = standardize_columns(table).stats;
    return std::make_unique<LinearModel>(imp.beta);
  }
  if (config.target) {
    auto labeled = split_target(table, *config.target);
    table = std::move(labeled.features);
    stats = standardize_columns(table).stats;
    return std::make_unique<NearestRowModel>(table.values, std::move(labeled.target),
                                             stats);
  }
  throw InputError("a black box is required: pass --importance (linear weights) "
                   "or --target (scoring column)");
}

ExplainParams explain_params(const RunConfig& config) {
  ExplainParams p;
  p.n_samples = config.n_samples;
  p.k_features = config.k_features;
  p.kernel_width = config.kernel_width;
  p.seed = config.seed;
  return p;
}

ordered_json params_json(const RunConfig& config, std::size_t m) {
  ordered_json j;
  j["samples"] = config.n_samples;
  j["k_features"] = config.k_features;
  j["kernel_width"] = config.kernel_width.value_or(default_kernel_width(m));
  j["seed"] = config.seed;
  return j;
}

void cmd_score(const RunConfig& config, std::ostream& out) {
  const auto run = score(config);
  auto j = score_report_json(run, config);
  write_file(config.output, j.dump(2) + "\n");
  std::size_t degenerate = 0;
  for (const auto& row : run.report.rows) degenerate += row.degenerate ? 1 : 0;
  out << "scored " << run.report.rows.size() << " rows (" << degenerate
      << " degenerate) in " << mode_name(config.mode) << " mode -> "
      << config.output << "\n";
  if (config.emit_plot_data) {
    fs::path dir(config.output);
    dir.replace_extension();
    dir += "_plots";
    write_plot_data(run, {}, dir.string());
    out << "plot data -> " << dir.string() << "\n";
  }
}

void cmd_importance(const RunConfig& config, std::ostream& out) {
  if (!config.target) throw InputError("--target is required");
  const auto table = load_table_file(config.data_path, config.row_ids);
  const auto labeled = split_target(table, *config.target);
  FeatureImportance imp;
  if (config.method == "ols") {
    imp = ols_importance(labeled);
  } else {
    imp = correlation_importance(labeled);
  }
  std::ostringstream csv;
  write_importance(csv, imp);
  write_file(config.output, csv.str());
  out << config.method << " importance for " << imp.size() << " features -> "
      << config.output << "\n";
}

void cmd_explain(const RunConfig& config, std::ostream& out) {
  auto table = load_table_file(config.data_path, config.row_ids);
  StandardizationStats stats;
  const auto model = make_model(config, table, stats);
  const auto expl = explanation_matrix(*model, table, stats, explain_params(config));
  write_file(config.output, explanation_json(expl, table, config).dump(2) + "\n");
  out << "explained " << expl.explanations.size() << " rows -> " << config.output
      << "\n";
}

void cmd_pick(const RunConfig& config, std::ostream& out) {
  auto table = load_table_file(config.data_path, config.row_ids);
  StandardizationStats stats;
  const auto model = make_model(config, table, stats);
  const auto expl = explanation_matrix(*model, table, stats, explain_params(config));
  const auto pick = submodular_pick(expl.weights, config.budget);
  write_file(config.output, pick_json(pick, expl, table, config).dump(2) + "\n");
  out << "picked " << pick.selected_rows.size() << " of " << table.n_rows()
      << " rows, coverage " << round_weight(pick.coverage_score) << " -> "
      << config.output << "\n";
}

void cmd_plot_data(const RunConfig& config, std::ostream& out) {
  const auto run = score(config);
  write_plot_data(run, config.rows, config.output);
  out << "plot data for "
      << (config.rows.empty() ? run.report.rows.size() : config.rows.size())
      << " rows -> " << config.output << "\n";
}

void add_data_options(CLI::App* sub, RunConfig& c) {
  sub->add_option("--data", c.data_path, "Feature table (CSV with header)")->required();
  sub->add_flag("--row-ids", c.row_ids, "First data column holds row identifiers");
  sub->add_option("--output", c.output, "Output path")->required();
}

void add_score_options(CLI::App* sub, RunConfig& c) {
  sub->add_option("--importance", c.importance_path,
                  "Importance CSV (feature,importance)")->required();
  sub->add_option("--mode", c.mode, "standardized or raw")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, Mode>{{"standardized", Mode::kStandardized},
                                      {"raw", Mode::kRaw}}));
  sub->add_option("--top-k", c.top_k, "Drivers listed per row")
      ->check(CLI::PositiveNumber);
}

void add_explain_options(CLI::App* sub, RunConfig& c) {
  sub->add_option("--importance", c.importance_path,
                  "Linear black box weights (feature,importance)");
  sub->add_option("--target", c.target,
                  "Scoring column used as a nearest-row lookup black box");
  sub->add_option("--samples", c.n_samples, "Perturbations per row (N)");
  sub->add_option("--k-features", c.k_features, "Explanation length (K)");
  sub->add_option("--kernel-width", c.kernel_width,
                  "Kernel width (default 0.75*sqrt(m))");
  sub->add_option("--seed", c.seed, "Base random seed");
}

}  // namespace

double round_weight(double value) {
  if (value == 0.0 || !std::isfinite(value)) return value;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return std::strtod(buf, nullptr);
}

ScoreRun score(const RunConfig& config) {
  if (!config.importance_path) throw InputError("--importance is required");
  ScoreRun run;
  run.table = load_table_file(config.data_path, config.row_ids);
  run.importance = align(load_importance_file(*config.importance_path), run.table);
  if (config.mode == Mode::kStandardized) {
    auto result = pie_standardized(run.importance, run.table, config.top_k);
    run.report = std::move(result.report);
    run.stats = std::move(result.stats);
    run.importance_std = std::move(result.importance_std);
  } else {
    run.report = pie_raw(run.importance, run.table, config.top_k).report;
  }
  return run;
}

ordered_json score_report_json(const ScoreRun& run, const RunConfig& config) {
  ordered_json meta;
  meta["mode"] = mode_name(config.mode);
  meta["top_k"] = config.top_k;
  meta["n_rows"] = run.table.n_rows();
  meta["features"] = run.table.column_names;
  meta["importance"] = run.importance.beta;
  meta["importance_std"] = nullptr;
  if (run.importance_std) meta["importance_std"] = run.importance_std->beta;
  meta["stats"] = nullptr;
  if (run.stats) meta["stats"] = *run.stats;
  if (config.timestamp) meta["timestamp"] = utc_timestamp();

  ordered_json rows = ordered_json::array();
  for (const auto& row : run.report.rows) {
    ordered_json r;
    r["row_id"] = row.row_id;
    r["degenerate"] = row.degenerate;
    r["top_driver"] = nullptr;
    if (row.top_driver) r["top_driver"] = row.top_driver->feature;
    ordered_json drivers = ordered_json::array();
    for (const auto& d : row.ranked) {
      drivers.push_back({{"feature", d.feature}, {"weight", round_weight(d.weight)}});
    }
    r["drivers"] = std::move(drivers);
    rows.push_back(std::move(r));
  }
  ordered_json j;
  j["metadata"] = std::move(meta);
  j["rows"] = std::move(rows);
  return j;
}

ordered_json explanation_json(const ExplanationMatrix& expl,
                              const ObservationTable& table,
                              const RunConfig& config) {
  ordered_json j;
  j["params"] = params_json(config, table.n_cols());
  j["features"] = expl.column_names;
  ordered_json rows = ordered_json::array();
  for (const auto& e : expl.explanations) {
    ordered_json r;
    r["row_id"] = table.row_label(e.instance);
    r["selected"] = e.selected;
    ordered_json w = ordered_json::array();
    for (double v : e.weights) w.push_back(round_weight(v));
    r["weights"] = std::move(w);
    r["intercept"] = round_weight(e.intercept);
    r["samples_used"] = e.samples_used;
    rows.push_back(std::move(r));
  }
  j["explanations"] = std::move(rows);
  ordered_json matrix = ordered_json::array();
  for (std::size_t i = 0; i < expl.weights.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (double v : expl.weights.row(i)) row.push_back(round_weight(v));
    matrix.push_back(std::move(row));
  }
  j["matrix"] = std::move(matrix);
  return j;
}

ordered_json pick_json(const PickResult& pick, const ExplanationMatrix& expl,
                       const ObservationTable& table, const RunConfig& config) {
  ordered_json j;
  j["params"] = params_json(config, table.n_cols());
  j["budget"] = config.budget;
  ordered_json ids = ordered_json::array();
  for (std::size_t i : pick.selected_rows) ids.push_back(table.row_label(i));
  j["selected_rows"] = std::move(ids);
  j["selected_indices"] = pick.selected_rows;
  j["coverage"] = round_weight(pick.coverage_score);
  ordered_json imp = ordered_json::array();
  for (std::size_t k = 0; k < expl.column_names.size(); ++k) {
    imp.push_back({{"feature", expl.column_names[k]},
                   {"importance", round_weight(pick.feature_importance[k])}});
  }
  j["feature_importance"] = std::move(imp);
  return j;
}

void write_plot_data(const ScoreRun& run, const std::vector<std::string>& rows,
                     const std::string& dir) {
  std::vector<std::size_t> wanted;
  if (rows.empty()) {
    for (std::size_t i = 0; i < run.report.rows.size(); ++i) wanted.push_back(i);
  } else {
    for (const auto& id : rows) {
      const auto it = std::find_if(run.report.rows.begin(), run.report.rows.end(),
                                   [&](const RowAttribution& r) { return r.row_id == id; });
      if (it == run.report.rows.end()) throw InputError("unknown row id \"" + id + "\"");
      wanted.push_back(static_cast<std::size_t>(it - run.report.rows.begin()));
    }
  }
  fs::create_directories(dir);

  for (std::size_t i : wanted) {
    const auto& row = run.report.rows[i];
    std::string csv = "feature,weight\n";
    if (row.degenerate) {
      csv += "# degenerate: no feature has a positive contribution\n";
    }
    for (const auto& d : row.ranked) {
      csv += csv_escape(d.feature) + ',' + weight_text(d.weight) + '\n';
    }
    write_file((fs::path(dir) / (file_stem_for(row.row_id) + ".csv")).string(), csv);
  }

  const auto& imp = run.importance_std ? *run.importance_std : run.importance;
  std::vector<std::size_t> order(imp.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return imp.beta[a] > imp.beta[b]; });
  std::string csv = "feature,importance\n";
  for (std::size_t k : order) {
    csv += csv_escape(imp.column_names[k]) + ',' + weight_text(imp.beta[k]) + '\n';
  }
  write_file((fs::path(dir) / "normalized_importance.csv").string(), csv);
}

void dispatch(const RunConfig& config, std::ostream& out) {
  if (config.subcommand == "score") return cmd_score(config, out);
  if (config.subcommand == "importance") return cmd_importance(config, out);
  if (config.subcommand == "explain") return cmd_explain(config, out);
  if (config.subcommand == "pick") return cmd_pick(config, out);
  if (config.subcommand == "plot-data") return cmd_plot_data(config, out);
  throw InputError("unknown subcommand \"" + config.subcommand + "\"");
}

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  RunConfig config;
  CLI::App app{"Per-observation key-driver attribution (PIE)", "pie"};
  app.set_config("--config", "", "Read options from an INI/TOML file");
  app.require_subcommand(1);

  auto* score_cmd = app.add_subcommand("score", "Attribute each row to its key drivers");
  add_data_options(score_cmd, config);
  add_score_options(score_cmd, config);
  score_cmd->add_flag("--emit-plot-data", config.emit_plot_data,
                      "Also write per-row bar-chart CSVs next to the report");
  score_cmd->add_flag("--timestamp", config.timestamp,
                      "Record the run time in the report metadata");

  auto* imp_cmd = app.add_subcommand("importance", "Estimate global feature importance");
  add_data_options(imp_cmd, config);
  imp_cmd->add_option("--target", config.target, "Dependent column")->required();
  imp_cmd->add_option("--method", config.method, "ols or corr")
      ->check(CLI::IsMember({"ols", "corr"}));

  auto* explain_cmd = app.add_subcommand("explain", "Local surrogate explanation per row");
  add_data_options(explain_cmd, config);
  add_explain_options(explain_cmd, config);

  auto* pick_cmd = app.add_subcommand("pick", "Submodular pick over row explanations");
  add_data_options(pick_cmd, config);
  add_explain_options(pick_cmd, config);
  pick_cmd->add_option("--budget", config.budget, "Rows to pick (B)");

  auto* plot_cmd = app.add_subcommand("plot-data", "Per-row bar-chart CSVs");
  add_data_options(plot_cmd, config);
  add_score_options(plot_cmd, config);
  plot_cmd->add_option("--rows", config.rows, "Row ids (comma separated)")
      ->delimiter(',');

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInput;
  }
  config.subcommand = app.get_subcommands().front()->get_name();

  try {
    dispatch(config, out);
    return kOk;
  } catch (const DegenerateError& e) {
    err << "error: " << e.what() << "\n";
    return kDegenerate;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kInput;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternal;
  }
}

}  // namespace pie::cli
