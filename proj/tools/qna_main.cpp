// qna: density-matrix market structure indicators from price/volume panels.
//
//   qna synth --out panel.csv --n-assets 50 --n-days 500 --regime 0:0.2 --regime 250:0.9
//   qna compute --data panel.csv --out results/ --format csv,json,svg
//   qna event-study --data panel.csv --event-date 2025-02-18 --pre 20 --post 20 --out results/

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qna/qna.hpp"

namespace {

struct RunFlags {
  std::string config_file;
  std::string data;
  std::string out;
  std::optional<std::string> construction;
  std::optional<int> window;
  std::optional<int> qews_window;
  std::optional<std::string> qews_mode;
  std::optional<std::string> qews_source;
  std::optional<std::string> entropy_base;
  std::optional<int> risk_horizon;
  std::optional<int> max_ffill;
  std::optional<int> vol_window;
  std::optional<int> min_history;
  std::optional<std::string> formats;
  std::vector<std::string> partitions;
  std::optional<std::string> event_date;
  std::optional<int> event_pre;
  std::optional<int> event_post;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--config", f.config_file, "key = value config file; flags override it");
  cmd->add_option("--data", f.data, "input CSV (date,ticker,close,volume)");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--construction", f.construction,
                  "asset-ensemble | feature-ensemble | cross-sectional-pure | correlation-baseline");
  cmd->add_option("--window", f.window, "density window in trading days");
  cmd->add_option("--qews-window", f.qews_window, "QEWS standardization window");
  cmd->add_option("--qews-mode", f.qews_mode, "level-zscore | derivative-zscore");
  cmd->add_option("--qews-source", f.qews_source, "eri | entropy | purity");
  cmd->add_option("--entropy-base", f.entropy_base, "natural | base-2");
  cmd->add_option("--risk-horizon", f.risk_horizon, "forward volatility/drawdown horizon in days");
  cmd->add_option("--max-ffill", f.max_ffill, "forward-fill cap in consecutive days");
  cmd->add_option("--vol-window", f.vol_window, "rolling volatility window");
  cmd->add_option("--min-history", f.min_history, "minimum observed rows per ticker");
  cmd->add_option("--format", f.formats, "comma list of csv,json,svg");
  cmd->add_option("--partition", f.partitions, "asset groups 'A1,A2|B1,B2[@tensor|@mixture]' (repeatable)");
  cmd->add_option("--event-date", f.event_date, "event date YYYY-MM-DD");
  cmd->add_option("--pre", f.event_pre, "trading days before the event");
  cmd->add_option("--post", f.event_post, "trading days after the event");
}

qna::RunConfig resolve(const RunFlags& f) {
  qna::RunConfig cfg;
  if (!f.config_file.empty()) cfg.apply(qna::KeyValueConfig::load(f.config_file));
  if (!f.data.empty()) cfg.data_path = f.data;
  if (!f.out.empty()) cfg.output_dir = f.out;
  if (f.construction) cfg.construction.mode = qna::parse_construction(*f.construction);
  if (f.window) cfg.construction.window = *f.window;
  if (f.qews_window) cfg.qews_window = *f.qews_window;
  if (f.qews_mode) cfg.qews_mode = qna::parse_qews_mode(*f.qews_mode);
  if (f.qews_source) cfg.qews_source = qna::parse_qews_source(*f.qews_source);
  if (f.entropy_base) cfg.entropy_base = qna::parse_entropy_base(*f.entropy_base);
  if (f.risk_horizon) cfg.risk_horizon = *f.risk_horizon;
  if (f.max_ffill) cfg.ingest.max_ffill = *f.max_ffill;
  if (f.vol_window) cfg.ingest.vol_window = *f.vol_window;
  if (f.min_history) cfg.ingest.min_history = *f.min_history;
  if (f.formats) cfg.formats = qna::parse_formats(*f.formats);
  if (!f.partitions.empty()) {
    cfg.partitions.clear();
    for (const auto& p : f.partitions) cfg.partitions.push_back(qna::parse_partition(p));
  }
  if (f.event_date || f.event_pre || f.event_post) {
    if (!cfg.event) cfg.event = qna::EventWindow{};
    if (f.event_date) cfg.event->event_date = qna::Date::parse(*f.event_date);
    if (f.event_pre) cfg.event->pre_days = *f.event_pre;
    if (f.event_post) cfg.event->post_days = *f.event_post;
  }
  return cfg;
}

struct SynthFlags {
  std::string config_file;
  std::string out;
  std::optional<int> n_assets;
  std::optional<int> n_days;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> regimes;
  std::optional<std::string> event;
  std::optional<double> idio_vol;
  std::optional<double> factor_vol;
  std::optional<std::string> start_date;
};

qna::SynthConfig resolve(const SynthFlags& f) {
  qna::SynthConfig cfg;
  if (!f.config_file.empty()) qna::apply(cfg, qna::KeyValueConfig::load(f.config_file));
  if (f.n_assets) cfg.n_assets = *f.n_assets;
  if (f.n_days) cfg.n_days = *f.n_days;
  if (f.seed) cfg.seed = *f.seed;
  if (!f.regimes.empty()) {
    cfg.regimes.clear();
    for (const auto& r : f.regimes) cfg.regimes.push_back(qna::parse_regime(r));
  }
  if (f.event) cfg.event = qna::parse_synth_event(*f.event);
  if (f.idio_vol) cfg.idio_vol = *f.idio_vol;
  if (f.factor_vol) cfg.factor_vol = *f.factor_vol;
  if (f.start_date) cfg.start_date = qna::Date::parse(*f.start_date);
  return cfg;
}

/// One line, `key=value` pairs, message last and quoted.
void report_error(std::string_view kind, const std::string& message) {
  std::string escaped;
  for (char c : message) {
    if (c == '"' || c == '\\') escaped += '\\';
    escaped += (c == '\n') ? ' ' : c;
  }
  std::cerr << "error kind=" << kind << " message=\"" << escaped << "\"\n";
}

void print_written(const std::vector<std::filesystem::path>& files) {
  for (const auto& f : files) std::cout << f.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Density-matrix market structure indicators"};
  app.require_subcommand(1);

  RunFlags compute_flags, event_flags;
  auto* compute = app.add_subcommand("compute", "rolling indicators, QEWS and summary statistics");
  add_run_flags(compute, compute_flags);
  auto* event = app.add_subcommand("event-study", "QEWS event study around one date");
  add_run_flags(event, event_flags);

  SynthFlags synth_flags;
  auto* synth = app.add_subcommand("synth", "generate a synthetic one-factor market panel");
  synth->add_option("--config", synth_flags.config_file, "key = value config file; flags override it");
  synth->add_option("--out", synth_flags.out, "output CSV path")->required();
  synth->add_option("--n-assets", synth_flags.n_assets, "number of assets");
  synth->add_option("--n-days", synth_flags.n_days, "number of business days");
  synth->add_option("--seed", synth_flags.seed, "random seed");
  synth->add_option("--regime", synth_flags.regimes, "start_day:loading (repeatable)");
  synth->add_option("--event", synth_flags.event, "planted ramp 'ramp_start:shock_day[:peak]'");
  synth->add_option("--idio-vol", synth_flags.idio_vol, "daily idiosyncratic volatility");
  synth->add_option("--factor-vol", synth_flags.factor_vol, "daily factor volatility");
  synth->add_option("--start-date", synth_flags.start_date, "first calendar date");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report_error("usage", e.what());
    return 2;
  }

  try {
    if (*compute) print_written(qna::cmd_compute(resolve(compute_flags)));
    else if (*event) print_written(qna::cmd_event_study(resolve(event_flags)));
    else if (*synth) std::cout << qna::cmd_synth(resolve(synth_flags), synth_flags.out).string() << "\n";
  } catch (const qna::Error& e) {
    report_error(qna::to_string(e.kind()), e.what());
    return 1;
  } catch (const std::exception& e) {
    report_error("internal", e.what());
    return 1;
  }
  return 0;
}
