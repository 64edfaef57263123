#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qna/calendar.hpp"
#include "qna/error.hpp"
#include "qna/linalg.hpp"

namespace qna {

struct RawBar {
  Date date;
  std::string ticker;
  double close = 0.0;
  double volume = 0.0;
};

struct IngestConfig {
  int max_ffill = 3;     ///< longest run of consecutive missing days filled forward
  int vol_window = 20;   ///< trailing returns per volatility estimate (daily units)
  int min_history = 2;   ///< tickers with fewer observed rows are dropped
};

/// Assets x days panel on the union calendar of the input. Unavailable cells
/// (before a ticker's first row, or past the forward-fill cap) hold NaN.
struct MarketPanel {
  std::vector<Date> dates;
  std::vector<std::string> tickers;
  Matrix close;         ///< assets x days
  Matrix volume;        ///< assets x days
  Matrix returns;       ///< assets x (days-1); column j = ln(close[j+1] / close[j])
  Matrix volatility;    ///< assets x days; rolling sample std of trailing returns
  Matrix volume_accel;  ///< assets x days; v(t) - v(t-1), NaN on day 0
  int vol_window = 20;

  std::size_t n_assets() const { return tickers.size(); }
  std::size_t n_days() const { return dates.size(); }

  /// Log return stamped at `day` (the move from day-1 to day). NaN on day 0.
  double return_at(std::size_t asset, std::size_t day) const {
    return day == 0 ? kNaN : returns(Eigen::Index(asset), Eigen::Index(day - 1));
  }

  std::optional<std::size_t> day_index(const Date& d) const {
    const auto it = std::lower_bound(dates.begin(), dates.end(), d);
    if (it == dates.end() || *it != d) return std::nullopt;
    return std::size_t(it - dates.begin());
  }

  std::optional<std::size_t> asset_index(std::string_view ticker) const {
    for (std::size_t i = 0; i < tickers.size(); ++i)
      if (tickers[i] == ticker) return i;
    return std::nullopt;
  }

  /// True when the asset has a price on every day in [first, last].
  bool covers(std::size_t asset, std::size_t first, std::size_t last) const {
    for (std::size_t d = first; d <= last; ++d)
      if (!std::isfinite(close(Eigen::Index(asset), Eigen::Index(d)))) return false;
    return true;
  }

  /// An asset takes part in the window of `window` returns ending at `end_day`
  /// only if all `window + 1` prices behind those returns are present.
  bool in_window(std::size_t asset, std::size_t end_day, std::size_t window) const {
    return end_day >= window && end_day < n_days() && covers(asset, end_day - window, end_day);
  }
};

// ---------------------------------------------------------------------------
// Elementwise series transforms

inline std::vector<double> log_returns(std::span<const double> close) {
  require(close.size() >= 2, ErrorKind::insufficient_data,
          "log_returns needs at least 2 prices, got " + std::to_string(close.size()));
  for (double p : close) {
    require(std::isfinite(p) && p > 0.0, ErrorKind::invalid_argument,
            "log_returns requires strictly positive prices");
  }
  std::vector<double> out(close.size() - 1);
  for (std::size_t t = 0; t + 1 < close.size(); ++t) out[t] = std::log(close[t + 1] / close[t]);
  return out;
}

/// Trailing sample standard deviation (divisor n-1); element k covers
/// returns[k .. k+window-1].
inline std::vector<double> rolling_volatility(std::span<const double> returns, int window) {
  require(window >= 2, ErrorKind::invalid_argument,
          "volatility window must be >= 2, got " + std::to_string(window));
  require(returns.size() >= std::size_t(window), ErrorKind::insufficient_data,
          "volatility window " + std::to_string(window) + " exceeds series length " +
              std::to_string(returns.size()));
  std::vector<double> out(returns.size() - std::size_t(window) + 1);
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = sample_mean_std(returns.subspan(k, std::size_t(window))).stddev;
  }
  return out;
}

// ---------------------------------------------------------------------------
// CSV input

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      return out;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
}

inline std::optional<double> parse_double(std::string_view s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace detail

/// Parses the `date,ticker,close,volume` schema. Errors carry `path:line`.
inline std::vector<RawBar> read_bars_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io, "cannot open '" + path.string() + "'");

  const auto where = [&](std::size_t line) { return path.string() + ":" + std::to_string(line); };

  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::vector<RawBar> bars;
  std::map<std::pair<long, std::string>, std::size_t> first_line;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = detail::trim(line);
    if (text.empty()) continue;
    if (!have_header) {
      if (text != "date,ticker,close,volume")
        fail(ErrorKind::parse, where(line_no) + ": expected header 'date,ticker,close,volume'");
      have_header = true;
      continue;
    }
    const auto cols = detail::split(text, ',');
    if (cols.size() != 4)
      fail(ErrorKind::parse, where(line_no) + ": expected 4 columns, got " + std::to_string(cols.size()));

    RawBar bar;
    try {
      bar.date = Date::parse(cols[0]);
    } catch (const Error& e) {
      fail(ErrorKind::parse, where(line_no) + ": " + e.what());
    }
    if (cols[1].empty()) fail(ErrorKind::parse, where(line_no) + ": empty ticker");
    bar.ticker = std::string(cols[1]);

    const auto close = detail::parse_double(cols[2]);
    if (!close || !std::isfinite(*close))
      fail(ErrorKind::parse, where(line_no) + ": malformed close '" + std::string(cols[2]) + "'");
    if (*close <= 0.0)
      fail(ErrorKind::invalid_argument,
           where(line_no) + ": non-positive close " + std::string(cols[2]));
    bar.close = *close;

    const auto volume = detail::parse_double(cols[3]);
    if (!volume || !std::isfinite(*volume))
      fail(ErrorKind::parse, where(line_no) + ": malformed volume '" + std::string(cols[3]) + "'");
    if (*volume < 0.0)
      fail(ErrorKind::invalid_argument, where(line_no) + ": negative volume " + std::string(cols[3]));
    bar.volume = *volume;
    const auto [it, fresh] = first_line.emplace(std::make_pair(bar.date.serial(), bar.ticker), line_no);
    if (!fresh) {
      fail(ErrorKind::invalid_argument, where(line_no) + ": duplicate (date,ticker) (" + bar.date.iso() + "," +
                                            bar.ticker + "), first seen on line " + std::to_string(it->second));
    }
    bars.push_back(std::move(bar));
  }
  if (!have_header) fail(ErrorKind::parse, path.string() + ": empty file (missing header)");
  return bars;
}

/// Recomputes every derived matrix from close/volume. Needed after any edit
/// to the raw matrices.
inline void derive_panel_features(MarketPanel& panel) {
  const auto n = Eigen::Index(panel.n_assets());
  const auto days = Eigen::Index(panel.n_days());
  const auto w = Eigen::Index(panel.vol_window);

  panel.returns = Matrix::Constant(n, std::max<Eigen::Index>(days - 1, 0), kNaN);
  panel.volatility = Matrix::Constant(n, days, kNaN);
  panel.volume_accel = Matrix::Constant(n, days, kNaN);

  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index d = 1; d < days; ++d) {
      const double p0 = panel.close(a, d - 1), p1 = panel.close(a, d);
      if (std::isfinite(p0) && std::isfinite(p1)) panel.returns(a, d - 1) = std::log(p1 / p0);
      const double v0 = panel.volume(a, d - 1), v1 = panel.volume(a, d);
      if (std::isfinite(v0) && std::isfinite(v1)) panel.volume_accel(a, d) = v1 - v0;
    }
    // Volatility at day d uses the returns stamped at days d-w+1 .. d.
    std::vector<double> buf(static_cast<std::size_t>(w));
    for (Eigen::Index d = w; d < days; ++d) {
      bool ok = true;
      for (Eigen::Index k = 0; k < w && ok; ++k) {
        buf[std::size_t(k)] = panel.returns(a, d - w + k);
        ok = std::isfinite(buf[std::size_t(k)]);
      }
      if (ok) panel.volatility(a, d) = sample_mean_std(buf).stddev;
    }
  }
}

/// Aligns raw bars onto the union calendar and derives returns, volatility and
/// volume acceleration.
inline MarketPanel panel_from_bars(std::span<const RawBar> bars, const IngestConfig& config = {}) {
  require(config.max_ffill >= 0, ErrorKind::config, "max_ffill must be >= 0");
  require(config.vol_window >= 2, ErrorKind::config, "vol_window must be >= 2");
  require(config.min_history >= 1, ErrorKind::config, "min_history must be >= 1");

  std::set<Date> date_set;
  std::map<std::string, std::vector<const RawBar*>> by_ticker;
  for (const auto& bar : bars) {
    require(bar.close > 0.0 && std::isfinite(bar.close), ErrorKind::invalid_argument,
            "non-positive close for " + bar.ticker + " on " + bar.date.iso());
    require(bar.volume >= 0.0 && std::isfinite(bar.volume), ErrorKind::invalid_argument,
            "negative volume for " + bar.ticker + " on " + bar.date.iso());
    date_set.insert(bar.date);
    by_ticker[bar.ticker].push_back(&bar);
  }

  MarketPanel panel;
  panel.vol_window = config.vol_window;
  panel.dates.assign(date_set.begin(), date_set.end());
  for (auto& [ticker, rows] : by_ticker) {
    if (rows.size() >= std::size_t(config.min_history)) panel.tickers.push_back(ticker);
  }

  const auto n = Eigen::Index(panel.n_assets());
  const auto days = Eigen::Index(panel.n_days());
  panel.close = Matrix::Constant(n, days, kNaN);
  panel.volume = Matrix::Constant(n, days, kNaN);

  for (Eigen::Index a = 0; a < n; ++a) {
    auto& rows = by_ticker[panel.tickers[std::size_t(a)]];
    for (const RawBar* bar : rows) {
      const auto d = Eigen::Index(*panel.day_index(bar->date));
      if (std::isfinite(panel.close(a, d)))
        fail(ErrorKind::invalid_argument, "duplicate (date,ticker) (" + bar->date.iso() + "," +
                                              bar->ticker + ")");
      panel.close(a, d) = bar->close;
      panel.volume(a, d) = bar->volume;
    }
    // Forward fill: at most max_ffill consecutive missing days after an
    // observation. Decided causally, so prefixes of the data agree.
    int run = 0;
    bool started = false;
    for (Eigen::Index d = 0; d < days; ++d) {
      if (std::isfinite(panel.close(a, d))) {
        started = true;
        run = 0;
        continue;
      }
      if (!started) continue;
      ++run;
      if (run <= config.max_ffill && std::isfinite(panel.close(a, d - 1))) {
        panel.close(a, d) = panel.close(a, d - 1);
        panel.volume(a, d) = 0.0;
      }
    }
  }

  derive_panel_features(panel);
  return panel;
}

inline MarketPanel load_panel(const std::filesystem::path& path, const IngestConfig& config = {}) {
  const auto bars = read_bars_csv(path);
  return panel_from_bars(bars, config);
}

/// Back to long format (one bar per present cell, forward-filled cells included).
inline std::vector<RawBar> panel_to_bars(const MarketPanel& panel) {
  std::vector<RawBar> out;
  for (std::size_t d = 0; d < panel.n_days(); ++d) {
    for (std::size_t a = 0; a < panel.n_assets(); ++a) {
      const double c = panel.close(Eigen::Index(a), Eigen::Index(d));
      if (!std::isfinite(c)) continue;
      out.push_back({panel.dates[d], panel.tickers[a], c,
                     panel.volume(Eigen::Index(a), Eigen::Index(d))});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Feature vectors

/// (log return, rolling volatility, z-scored volume, z-scored volume change).
using FeatureVector = std::array<double, 4>;

namespace detail {

inline double trailing_zscore(const Matrix& m, Eigen::Index asset, Eigen::Index end_day,
                              Eigen::Index window) {
  std::vector<double> values(static_cast<std::size_t>(window));
  for (Eigen::Index k = 0; k < window; ++k) values[std::size_t(k)] = m(asset, end_day - window + 1 + k);
  const auto ms = sample_mean_std(values);
  if (!(ms.stddev > 1e-12)) return 0.0;
  return (values.back() - ms.mean) / ms.stddev;
}

}  // namespace detail

/// Feature vector at day index `day`, with volume terms z-scored over the
/// trailing `window` days. nullopt when the asset is excluded from that window.
inline std::optional<FeatureVector> try_feature_vector(const MarketPanel& panel, std::size_t asset,
                                                       std::size_t day, std::size_t window) {
  if (window < 2 || !panel.in_window(asset, day, window)) return std::nullopt;
  const auto a = Eigen::Index(asset), d = Eigen::Index(day), w = Eigen::Index(window);
  const double r = panel.return_at(asset, day);
  const double sigma = panel.volatility(a, d);
  if (!std::isfinite(r) || !std::isfinite(sigma)) return std::nullopt;
  FeatureVector x{r, sigma, detail::trailing_zscore(panel.volume, a, d, w),
                  detail::trailing_zscore(panel.volume_accel, a, d, w)};
  for (double v : x)
    if (!std::isfinite(v)) return std::nullopt;
  return x;
}

inline FeatureVector build_feature_vector(const MarketPanel& panel, std::string_view ticker,
                                          const Date& t, std::size_t window = 60) {
  const auto asset = panel.asset_index(ticker);
  require(asset.has_value(), ErrorKind::invalid_argument, "unknown ticker '" + std::string(ticker) + "'");
  const auto day = panel.day_index(t);
  require(day.has_value(), ErrorKind::invalid_argument, "date " + t.iso() + " not in panel");
  const auto x = try_feature_vector(panel, *asset, *day, window);
  if (!x) {
    fail(ErrorKind::degenerate, "asset '" + std::string(ticker) + "' excluded from the window ending " +
                                    t.iso() + " (incomplete history)");
  }
  return *x;
}

}  // namespace qna
