#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "qna/config.hpp"
#include "qna/error.hpp"
#include "qna/ingest.hpp"
#include "qna/io.hpp"
#include "qna/signals.hpp"
#include "qna/spectra.hpp"
#include "qna/states.hpp"
#include "qna/svg.hpp"
#include "qna/synth.hpp"

namespace qna {

struct ComputeResult {
  std::vector<IndicatorSeries> indicators;  ///< the five base indicators, then one per partition
  IndicatorSeries qews;
  IndicatorSeries index;  ///< equal-weight price index
  Json summary;
};

namespace detail {

inline const IndicatorSeries& find_series(const std::vector<IndicatorSeries>& all, std::string_view name) {
  for (const auto& s : all)
    if (s.name == name) return s;
  fail(ErrorKind::invalid_argument, "no series named '" + std::string(name) + "'");
}

/// Runs `f`; degenerate inputs (constant series, too little overlap) give
/// JSON null rather than aborting the report.
inline Json or_null(const std::function<Json()>& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::degenerate || e.kind() == ErrorKind::insufficient_data) return nullptr;
    throw;
  }
}

inline Json series_stats(const IndicatorSeries& s) {
  std::vector<double> v;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s.has_value(i)) v.push_back(s.values[i]);
  Json j;
  j["count"] = v.size();
  if (v.empty()) {
    j["mean"] = nullptr;
    j["std"] = nullptr;
  } else {
    const auto ms = sample_mean_std(v);
    j["mean"] = ms.mean;
    j["std"] = v.size() >= 2 ? Json(ms.stddev) : Json(nullptr);
  }
  j["acf1"] = or_null([&] { return Json(acf1(s)); });
  return j;
}

inline Json regime_json(const IndicatorSeries& entropy, const IndicatorSeries& companion) {
  return or_null([&] {
    const auto r = regime_classify(entropy, companion);
    Json j;
    j["entropy_median"] = number_or_null(r.entropy_median);
    j["low_entropy"] = to_json(r.low);
    j["high_entropy"] = to_json(r.high);
    return j;
  });
}

inline IndicatorSeries qews_input(const std::vector<IndicatorSeries>& all, QewsSource source) {
  switch (source) {
    case QewsSource::eri: return find_series(all, "eri");
    case QewsSource::entropy: return find_series(all, "quantum_entropy");
    case QewsSource::purity: return find_series(all, "purity");
  }
  return find_series(all, "eri");
}

inline IndicatorSeries mutual_information_series(const MarketPanel& panel, const RunConfig& config,
                                                 const Partition& partition, std::size_t k) {
  IndicatorSeries out;
  out.name = "mutual_information_" + std::to_string(k);
  const auto window = std::size_t(config.construction.window);
  for (std::size_t day = window - 1; day < panel.n_days(); ++day) {
    if (day < window) {
      out.push_missing(panel.dates[day]);
      continue;
    }
    try {
      const auto w = window_data(panel, day, window);
      out.push(panel.dates[day], mutual_information(partition, w, config.entropy_base));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::degenerate && e.kind() != ErrorKind::insufficient_data) throw;
      out.push_missing(panel.dates[day]);
    }
  }
  return out;
}

}  // namespace detail

/// The compute pipeline on an in-memory panel: indicator series, QEWS, and the
/// summary statistics (entropy levels, index stability and persistence,
/// entropy-median regimes, realized-risk associations).
inline ComputeResult run_compute(const MarketPanel& panel, const RunConfig& config) {
  config.construction.validate();
  ComputeResult r;
  r.indicators = compute_indicator_series(panel, config.construction, all_indicators(), config.entropy_base);
  for (std::size_t k = 0; k < config.partitions.size(); ++k)
    r.indicators.push_back(detail::mutual_information_series(panel, config, config.partitions[k], k));

  auto source = detail::qews_input(r.indicators, config.qews_source);
  r.qews = qews(source, config.qews_window, config.qews_mode);
  r.index = equal_weight_index(panel);

  const auto& sq = detail::find_series(r.indicators, "quantum_entropy");
  const auto& sc = detail::find_series(r.indicators, "classical_entropy");
  const auto& q = detail::find_series(r.indicators, "purity");
  const auto& ci = detail::find_series(r.indicators, "classical_index");
  const auto& e = detail::find_series(r.indicators, "eri");

  Json& s = r.summary;
  s["panel"] = {{"first_date", panel.dates.front().iso()},
                {"last_date", panel.dates.back().iso()},
                {"n_days", panel.n_days()},
                {"n_assets", panel.n_assets()}};
  s["config"] = {{"construction", std::string(to_string(config.construction.mode))},
                 {"window", config.construction.window},
                 {"qews_window", config.qews_window},
                 {"qews_mode", std::string(to_string(config.qews_mode))},
                 {"qews_source", std::string(to_string(config.qews_source))},
                 {"entropy_base", std::string(to_string(config.entropy_base))},
                 {"risk_horizon", config.risk_horizon}};
  s["entropy"] = {{"quantum", detail::series_stats(sq)}, {"classical", detail::series_stats(sc)}};
  s["stability"] = {{"quantum_index", detail::series_stats(q)},
                    {"classical_index", detail::series_stats(ci)},
                    {"eri", detail::series_stats(e)}};
  s["regimes"] = {{"split", "median"},
                  {"quantum_index", detail::regime_json(sq, q)},
                  {"classical_index", detail::regime_json(sc, ci)}};
  const auto risk = [&](const IndicatorSeries& ind) {
    return detail::or_null([&] { return to_json(realized_risk_association(ind, panel, config.risk_horizon)); });
  };
  s["risk_association"] = {{"quantum_index", risk(q)}, {"classical_index", risk(ci)}, {"eri", risk(e)}};

  Json qj;
  qj["count"] = r.qews.size();
  std::size_t floors = 0, best = r.qews.size();
  for (std::size_t i = 0; i < r.qews.size(); ++i) {
    if (r.qews.flags[i] == ValueFlag::sigma_floor) ++floors;
    if (r.qews.has_value(i) && (best == r.qews.size() || r.qews.values[i] > r.qews.values[best])) best = i;
  }
  qj["sigma_floor_count"] = floors;
  qj["max"] = best < r.qews.size() ? Json(r.qews.values[best]) : Json(nullptr);
  qj["max_date"] = best < r.qews.size() ? Json(r.qews.dates[best].iso()) : Json(nullptr);
  s["qews"] = qj;

  Json mi = Json::array();
  for (std::size_t k = 0; k < config.partitions.size(); ++k) {
    Json m;
    m["series"] = "mutual_information_" + std::to_string(k);
    m["partition"] = format_partition(config.partitions[k]);
    m["stats"] = detail::series_stats(detail::find_series(r.indicators, m["series"].get<std::string>()));
    mi.push_back(m);
  }
  s["mutual_information"] = mi;
  return r;
}

/// Loads the panel, runs the pipeline and writes indicators.csv, summary.json
/// and indicators.svg (per `config.formats`) all-or-nothing into output_dir.
inline std::vector<std::filesystem::path> cmd_compute(const RunConfig& config) {
  config.validate();
  const auto panel = load_panel(config.data_path, config.ingest);
  const auto r = run_compute(panel, config);

  OutputBatch batch(config.output_dir);
  if (config.formats.csv) {
    auto all = r.indicators;
    all.push_back(r.qews);
    batch.add("indicators.csv", indicator_csv(all));
  }
  if (config.formats.json) batch.add("summary.json", r.summary.dump(2) + "\n");
  if (config.formats.svg) {
    const auto& eri_series = detail::find_series(r.indicators, "eri");
    svg::ChartOptions opt;
    opt.title = "ERI vs equal-weight index";
    batch.add("indicators.svg", svg::dual_axis_chart(eri_series, r.index, opt));
    opt.title = "QEWS vs equal-weight index";
    batch.add("qews.svg", svg::dual_axis_chart(r.qews, r.index, opt));
  }
  return batch.commit();
}

struct EventStudyResult {
  IndicatorSeries qews;
  IndicatorSeries index;
  EventReport report;
};

inline EventStudyResult run_event_study(const MarketPanel& panel, const RunConfig& config) {
  require(config.event.has_value(), ErrorKind::config, "event-study needs an event date");
  config.construction.validate();
  const std::vector<Indicator> needed{Indicator::quantum_entropy, Indicator::purity, Indicator::eri};
  const auto series = compute_indicator_series(panel, config.construction, needed, config.entropy_base);
  EventStudyResult r;
  r.qews = qews(detail::qews_input(series, config.qews_source), config.qews_window, config.qews_mode);
  r.index = equal_weight_index(panel);
  r.report = event_study(r.qews, *config.event);
  return r;
}

inline std::vector<std::filesystem::path> cmd_event_study(const RunConfig& config) {
  config.validate();
  require(config.event.has_value(), ErrorKind::config, "event-study needs an event date");
  const auto panel = load_panel(config.data_path, config.ingest);
  const auto r = run_event_study(panel, config);

  OutputBatch batch(config.output_dir);
  batch.add("event_study.json", to_json(r.report).dump(2) + "\n");
  if (config.formats.svg) {
    svg::ChartOptions opt;
    opt.title = "QEWS around " + config.event->event_date.iso();
    opt.markers.push_back(config.event->event_date);
    batch.add("event_study.svg", svg::dual_axis_chart(r.qews, r.index, opt));
  }
  return batch.commit();
}

inline std::filesystem::path cmd_synth(const SynthConfig& config, const std::filesystem::path& out) {
  const auto bars = generate_factor_bars(config);
  write_text_file(out, panel_csv(bars));
  return out;
}

}  // namespace qna
