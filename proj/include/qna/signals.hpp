#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qna/calendar.hpp"
#include "qna/error.hpp"
#include "qna/ingest.hpp"
#include "qna/linalg.hpp"
#include "qna/spectra.hpp"
#include "qna/states.hpp"

namespace qna {

enum class ValueFlag { ok, missing, sigma_floor };

inline std::string_view to_string(ValueFlag f) {
  switch (f) {
    case ValueFlag::ok: return "ok";
    case ValueFlag::missing: return "missing";
    case ValueFlag::sigma_floor: return "sigma_floor";
  }
  return "ok";
}

inline ValueFlag parse_value_flag(std::string_view text) {
  if (text == "ok" || text.empty()) return ValueFlag::ok;
  if (text == "missing") return ValueFlag::missing;
  if (text == "sigma_floor") return ValueFlag::sigma_floor;
  fail(ErrorKind::parse, "unknown value flag '" + std::string(text) + "'");
}

/// Dated scalar series. Missing entries hold NaN and carry ValueFlag::missing.
struct IndicatorSeries {
  std::string name;
  std::vector<Date> dates;
  std::vector<double> values;
  std::vector<ValueFlag> flags;

  std::size_t size() const { return dates.size(); }
  bool has_value(std::size_t i) const { return flags[i] != ValueFlag::missing; }

  void push(const Date& d, double v, ValueFlag f = ValueFlag::ok) {
    if (f == ValueFlag::missing) v = kNaN;
    dates.push_back(d);
    values.push_back(v);
    flags.push_back(f);
  }
  void push_missing(const Date& d) { push(d, kNaN, ValueFlag::missing); }

  std::optional<std::size_t> index_of(const Date& d) const {
    const auto it = std::lower_bound(dates.begin(), dates.end(), d);
    if (it == dates.end() || *it != d) return std::nullopt;
    return std::size_t(it - dates.begin());
  }

  void validate() const {
    require(dates.size() == values.size() && dates.size() == flags.size(), ErrorKind::invalid_argument,
            "series '" + name + "' has inconsistent lengths");
    for (std::size_t i = 1; i < dates.size(); ++i)
      require(dates[i - 1] < dates[i], ErrorKind::invalid_argument,
              "series '" + name + "' dates not strictly increasing at " + dates[i].iso());
    for (std::size_t i = 0; i < values.size(); ++i)
      require(!has_value(i) || std::isfinite(values[i]), ErrorKind::invalid_argument,
              "series '" + name + "' has an unflagged non-finite value at " + dates[i].iso());
  }
};

// ---------------------------------------------------------------------------
// Rolling indicators

enum class Indicator { quantum_entropy, classical_entropy, purity, eri, classical_index };

inline std::string_view to_string(Indicator i) {
  switch (i) {
    case Indicator::quantum_entropy: return "quantum_entropy";
    case Indicator::classical_entropy: return "classical_entropy";
    case Indicator::purity: return "purity";
    case Indicator::eri: return "eri";
    case Indicator::classical_index: return "classical_index";
  }
  return "unknown";
}

inline Indicator parse_indicator(std::string_view text) {
  for (auto i : {Indicator::quantum_entropy, Indicator::classical_entropy, Indicator::purity, Indicator::eri,
                 Indicator::classical_index}) {
    if (to_string(i) == text) return i;
  }
  fail(ErrorKind::config, "unknown indicator '" + std::string(text) + "'");
}

inline const std::vector<Indicator>& all_indicators() {
  static const std::vector<Indicator> all{Indicator::quantum_entropy, Indicator::classical_entropy,
                                          Indicator::purity, Indicator::eri, Indicator::classical_index};
  return all;
}

/// Mean off-diagonal Pearson correlation of a window.
inline double mean_pairwise_correlation(const Matrix& corr) {
  const auto n = corr.rows();
  if (n < 2) return kNaN;
  return (corr.sum() - corr.trace()) / double(n * (n - 1));
}

/// One series per requested indicator, stamped at every date whose trailing
/// window can be formed (days - window + 1 stamps). Windows that cannot be
/// evaluated yield flagged-missing values.
///
/// quantum_entropy, purity and eri come from the requested construction;
/// classical_entropy and classical_index from the Pearson correlation of the
/// same window.
inline std::vector<IndicatorSeries> compute_indicator_series(const MarketPanel& panel,
                                                             const StateConstruction& construction,
                                                             const std::vector<Indicator>& indicators,
                                                             EntropyBase base = EntropyBase::natural) {
  construction.validate();
  const auto window = std::size_t(construction.window);
  require(panel.n_days() >= window + 1, ErrorKind::insufficient_data,
          "panel has " + std::to_string(panel.n_days()) + " days; window " + std::to_string(window) +
              " needs at least " + std::to_string(window + 1));

  std::vector<IndicatorSeries> out(indicators.size());
  for (std::size_t k = 0; k < indicators.size(); ++k) out[k].name = std::string(to_string(indicators[k]));

  bool need_quantum = false, need_classical = false;
  for (auto i : indicators) {
    if (i == Indicator::classical_entropy || i == Indicator::classical_index) need_classical = true;
    else need_quantum = true;
  }

  for (std::size_t day = window - 1; day < panel.n_days(); ++day) {
    const Date& d = panel.dates[day];
    std::optional<WindowData> w;
    if (day >= window) w = window_data(panel, day, window);

    std::optional<SpectralSummary> quantum;
    if (need_quantum && w && w->size() >= 2) {
      try {
        quantum = summarize(density_from_window(panel, *w, construction.mode), base);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::degenerate && e.kind() != ErrorKind::insufficient_data) throw;
      }
    }
    std::optional<double> classical_entropy, classical_index;
    if (need_classical && w && w->size() >= 2) {
      try {
        const Matrix c = pearson_correlation_matrix(w->returns);
        if (c.rows() >= 2) {
          classical_index = mean_pairwise_correlation(c);
          classical_entropy = von_neumann_entropy(DensityMatrix::from_construction(c / double(c.rows())), base);
        }
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::degenerate) throw;
      }
    }

    for (std::size_t k = 0; k < indicators.size(); ++k) {
      std::optional<double> v;
      switch (indicators[k]) {
        case Indicator::quantum_entropy: if (quantum) v = quantum->entropy; break;
        case Indicator::purity: if (quantum) v = quantum->purity; break;
        case Indicator::eri: if (quantum) v = quantum->eri; break;
        case Indicator::classical_entropy: v = classical_entropy; break;
        case Indicator::classical_index: v = classical_index; break;
      }
      if (v && std::isfinite(*v)) out[k].push(d, *v);
      else out[k].push_missing(d);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// QEWS

enum class QewsMode { level_zscore, derivative_zscore };

inline std::string_view to_string(QewsMode m) {
  return m == QewsMode::level_zscore ? "level-zscore" : "derivative-zscore";
}

inline QewsMode parse_qews_mode(std::string_view text) {
  if (text == "level-zscore" || text == "level") return QewsMode::level_zscore;
  if (text == "derivative-zscore" || text == "derivative") return QewsMode::derivative_zscore;
  fail(ErrorKind::config, "unknown QEWS mode '" + std::string(text) + "'");
}

inline constexpr double kQewsSigmaFloor = 1e-12;

/// Trailing z-score of the series (level mode) or of its first difference
/// (derivative mode) over `w` points, inclusive of the stamped date. Only
/// dates with a complete trailing window are emitted. When the local std is
/// below 1e-12 the value is 0 and flagged sigma_floor.
inline IndicatorSeries qews(const IndicatorSeries& series, int w, QewsMode mode = QewsMode::level_zscore) {
  require(w >= 3, ErrorKind::invalid_argument, "QEWS window must be >= 3, got " + std::to_string(w));
  const std::size_t need = std::size_t(w) + (mode == QewsMode::derivative_zscore ? 1 : 0);
  require(series.size() >= need, ErrorKind::insufficient_data,
          "series '" + series.name + "' has " + std::to_string(series.size()) + " points; QEWS needs " +
              std::to_string(need));

  // Input to standardize, aligned to series index.
  std::vector<double> x(series.size(), kNaN);
  std::vector<bool> valid(series.size(), false);
  std::size_t first = 0;
  if (mode == QewsMode::level_zscore) {
    for (std::size_t i = 0; i < series.size(); ++i) {
      valid[i] = series.has_value(i);
      x[i] = series.values[i];
    }
  } else {
    first = 1;
    for (std::size_t i = 1; i < series.size(); ++i) {
      valid[i] = series.has_value(i) && series.has_value(i - 1);
      if (valid[i]) x[i] = series.values[i] - series.values[i - 1];
    }
  }

  IndicatorSeries out;
  out.name = "qews";
  const auto wz = std::size_t(w);
  std::vector<double> buf(wz);
  for (std::size_t i = first + wz - 1; i < series.size(); ++i) {
    bool ok = true;
    for (std::size_t k = 0; k < wz && ok; ++k) {
      const std::size_t j = i + 1 - wz + k;
      ok = valid[j];
      buf[k] = x[j];
    }
    if (!ok) {
      out.push_missing(series.dates[i]);
      continue;
    }
    const auto ms = sample_mean_std(buf);
    if (!(ms.stddev >= kQewsSigmaFloor)) {
      out.push(series.dates[i], 0.0, ValueFlag::sigma_floor);
      continue;
    }
    out.push(series.dates[i], (x[i] - ms.mean) / ms.stddev);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Persistence and regimes

/// Lag-1 autocorrelation: Pearson correlation over consecutive valid pairs.
inline double acf1(const IndicatorSeries& series) {
  std::vector<double> lead, lag;
  for (std::size_t i = 0; i + 1 < series.size(); ++i) {
    if (series.has_value(i) && series.has_value(i + 1)) {
      lag.push_back(series.values[i]);
      lead.push_back(series.values[i + 1]);
    }
  }
  require(lag.size() >= 2, ErrorKind::insufficient_data, "acf1 needs at least 3 consecutive values");
  const double r = pearson(lag, lead);
  require(std::isfinite(r), ErrorKind::degenerate, "acf1 undefined for a constant series");
  return r;
}

struct RegimeStats {
  std::size_t count = 0;
  double mean = kNaN;
  double stddev = kNaN;
};

struct RegimeReport {
  double entropy_median = kNaN;
  RegimeStats low;   ///< entropy <= median
  RegimeStats high;  ///< entropy > median
};

/// Splits dates at the entropy median and summarizes the companion series per
/// regime. Dates where either series is missing are ignored.
inline RegimeReport regime_classify(const IndicatorSeries& entropy, const IndicatorSeries& companion) {
  require(entropy.dates == companion.dates, ErrorKind::invalid_argument,
          "regime_classify: '" + entropy.name + "' and '" + companion.name + "' have different date axes");
  std::vector<double> e, c;
  for (std::size_t i = 0; i < entropy.size(); ++i) {
    if (entropy.has_value(i) && companion.has_value(i)) {
      e.push_back(entropy.values[i]);
      c.push_back(companion.values[i]);
    }
  }
  require(e.size() >= 2, ErrorKind::insufficient_data, "regime_classify needs at least 2 shared values");

  std::vector<double> sorted = e;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  const double median = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);

  std::vector<double> low, high;
  for (std::size_t i = 0; i < e.size(); ++i) (e[i] <= median ? low : high).push_back(c[i]);

  const auto stats = [](const std::vector<double>& v) {
    RegimeStats s;
    s.count = v.size();
    if (v.empty()) return s;
    const auto ms = sample_mean_std(v);
    s.mean = ms.mean;
    s.stddev = v.size() >= 2 ? ms.stddev : kNaN;
    return s;
  };
  RegimeReport r;
  r.entropy_median = median;
  r.low = stats(low);
  r.high = stats(high);
  return r;
}

// ---------------------------------------------------------------------------
// Realized-risk association

/// Equal-weight index: daily log return is the mean over assets with a return
/// that day (0 when none); level starts at 100.
inline IndicatorSeries equal_weight_index(const MarketPanel& panel) {
  IndicatorSeries out;
  out.name = "equal_weight_index";
  double level = 100.0;
  for (std::size_t d = 0; d < panel.n_days(); ++d) {
    if (d > 0) {
      double sum = 0.0;
      int n = 0;
      for (std::size_t a = 0; a < panel.n_assets(); ++a) {
        const double r = panel.return_at(a, d);
        if (std::isfinite(r)) {
          sum += r;
          ++n;
        }
      }
      if (n > 0) level *= std::exp(sum / n);
    }
    out.push(panel.dates[d], level);
  }
  return out;
}

/// Sample std of the index log returns over days d+1 .. d+horizon.
inline IndicatorSeries forward_realized_volatility(const MarketPanel& panel, int horizon) {
  require(horizon >= 2, ErrorKind::invalid_argument, "volatility horizon must be >= 2");
  const auto index = equal_weight_index(panel);
  IndicatorSeries out;
  out.name = "forward_realized_volatility";
  const auto h = std::size_t(horizon);
  std::vector<double> buf(h);
  for (std::size_t d = 0; d < index.size(); ++d) {
    if (d + h >= index.size()) {
      out.push_missing(index.dates[d]);
      continue;
    }
    for (std::size_t k = 0; k < h; ++k) buf[k] = std::log(index.values[d + 1 + k] / index.values[d + k]);
    out.push(index.dates[d], sample_mean_std(buf).stddev);
  }
  return out;
}

/// Largest peak-to-trough loss (fraction of peak) of the index over days d .. d+horizon.
inline IndicatorSeries forward_max_drawdown(const MarketPanel& panel, int horizon) {
  require(horizon >= 1, ErrorKind::invalid_argument, "drawdown horizon must be >= 1");
  const auto index = equal_weight_index(panel);
  IndicatorSeries out;
  out.name = "forward_max_drawdown";
  const auto h = std::size_t(horizon);
  for (std::size_t d = 0; d < index.size(); ++d) {
    if (d + h >= index.size()) {
      out.push_missing(index.dates[d]);
      continue;
    }
    double peak = index.values[d], worst = 0.0;
    for (std::size_t k = d; k <= d + h; ++k) {
      peak = std::max(peak, index.values[k]);
      worst = std::max(worst, (peak - index.values[k]) / peak);
    }
    out.push(index.dates[d], worst);
  }
  return out;
}

struct RiskAssociation {
  int horizon = 30;
  std::size_t n = 0;
  double volatility_corr = kNaN;
  double drawdown_corr = kNaN;
};

inline RiskAssociation realized_risk_association(const IndicatorSeries& indicator, const MarketPanel& panel,
                                                 int horizon = 30) {
  std::size_t overlap = 0;
  for (const auto& d : indicator.dates)
    if (panel.day_index(d)) ++overlap;
  require(overlap >= std::size_t(horizon) + 2, ErrorKind::insufficient_data,
          "indicator '" + indicator.name + "' overlaps the panel on " + std::to_string(overlap) +
              " dates; need horizon + 2 = " + std::to_string(horizon + 2));

  const auto vol = forward_realized_volatility(panel, horizon);
  const auto dd = forward_max_drawdown(panel, horizon);
  std::vector<double> x, yv, yd;
  for (std::size_t i = 0; i < indicator.size(); ++i) {
    if (!indicator.has_value(i)) continue;
    const auto d = panel.day_index(indicator.dates[i]);
    if (!d || !vol.has_value(*d)) continue;
    x.push_back(indicator.values[i]);
    yv.push_back(vol.values[*d]);
    yd.push_back(dd.values[*d]);
  }
  require(x.size() >= 3, ErrorKind::insufficient_data,
          "fewer than 3 dates with both indicator and forward risk values");
  RiskAssociation r;
  r.horizon = horizon;
  r.n = x.size();
  r.volatility_corr = pearson(x, yv);
  r.drawdown_corr = pearson(x, yd);
  return r;
}

// ---------------------------------------------------------------------------
// Event study

struct EventWindow {
  Date event_date;
  int pre_days = 20;
  int post_days = 20;
};

struct EventReport {
  double pre_mean = kNaN;
  double pre_max = kNaN;
  Date pre_max_date;
  double pre_slope = kNaN;  ///< OLS slope per trading day over the pre-window
  double post_mean = kNaN;
  double post_min = kNaN;
  int post_change_sign = 0;  ///< sign(post_mean - pre_mean)
};

/// Pre-window: the `pre_days` dates before the event. Post-window: the
/// `post_days` dates after it. The event date itself belongs to neither.
inline EventReport event_study(const IndicatorSeries& series, const EventWindow& window) {
  require(window.pre_days >= 1 && window.post_days >= 1, ErrorKind::invalid_argument,
          "event window needs pre_days >= 1 and post_days >= 1");
  const auto e = series.index_of(window.event_date);
  require(e.has_value(), ErrorKind::insufficient_data,
          "event date " + window.event_date.iso() + " not in series '" + series.name + "'");
  const auto pre = std::size_t(window.pre_days), post = std::size_t(window.post_days);
  require(*e >= pre && *e + post < series.size(), ErrorKind::insufficient_data,
          "series '" + series.name + "' does not cover " + std::to_string(pre) + " days before and " +
              std::to_string(post) + " days after " + window.event_date.iso());
  for (std::size_t i = *e - pre; i <= *e + post; ++i) {
    require(i == *e || series.has_value(i), ErrorKind::insufficient_data,
            "series '" + series.name + "' is missing a value on " + series.dates[i].iso() + " inside the event window");
  }

  EventReport r;
  std::vector<double> pre_values(series.values.begin() + long(*e - pre), series.values.begin() + long(*e));
  std::vector<double> post_values(series.values.begin() + long(*e + 1), series.values.begin() + long(*e + 1 + post));

  // Means as offsets from the pre-window's first value: exact for flat series.
  const double anchor = pre_values.front();
  const auto offset_mean = [anchor](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x - anchor;
    return anchor + s / double(v.size());
  };
  r.pre_mean = offset_mean(pre_values);
  r.post_mean = offset_mean(post_values);
  const auto max_it = std::max_element(pre_values.begin(), pre_values.end());
  r.pre_max = *max_it;
  r.pre_max_date = series.dates[*e - pre + std::size_t(max_it - pre_values.begin())];
  r.post_min = *std::min_element(post_values.begin(), post_values.end());

  if (pre_values.size() < 2) {
    r.pre_slope = 0.0;
  } else {
    const double xbar = 0.5 * double(pre_values.size() - 1);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t k = 0; k < pre_values.size(); ++k) {
      const double dx = double(k) - xbar;
      sxy += dx * (pre_values[k] - r.pre_mean);
      sxx += dx * dx;
    }
    r.pre_slope = sxy / sxx;
  }
  const double change = r.post_mean - r.pre_mean;
  r.post_change_sign = (change > 0.0) - (change < 0.0);
  return r;
}

}  // namespace qna
