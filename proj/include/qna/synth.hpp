#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "qna/calendar.hpp"
#include "qna/error.hpp"
#include "qna/ingest.hpp"

namespace qna {

struct SynthRegime {
  int start_day = 0;
  double loading = 0.0;  ///< concentration multiplying the factor betas, in [0, 1]
};

/// Planted structural event: concentration ramps linearly from the prevailing
/// regime level at `ramp_start` to `peak_loading` just before `shock_day`,
/// then falls back to the level it started from.
struct SynthEvent {
  int ramp_start = 0;
  int shock_day = 0;
  double peak_loading = 0.95;
};

struct SynthConfig {
  int n_assets = 50;
  int n_days = 500;
  std::uint64_t seed = 1;
  std::vector<SynthRegime> regimes{{0, 0.3}};
  std::optional<SynthEvent> event;
  double idio_vol = 0.01;    ///< daily std of idiosyncratic noise
  double factor_vol = 0.02;  ///< daily std of the common factor
  double base_volume = 1.0e6;
  Date start_date{2024, 1, 2};

  void validate() const {
    require(n_assets >= 1, ErrorKind::config, "n_assets must be >= 1");
    require(n_days >= 2, ErrorKind::config, "n_days must be >= 2 to form returns, got " + std::to_string(n_days));
    require(!regimes.empty() && regimes.front().start_day == 0, ErrorKind::config,
            "regimes must start at day 0");
    for (std::size_t i = 0; i < regimes.size(); ++i) {
      require(regimes[i].loading >= 0.0 && regimes[i].loading <= 1.0, ErrorKind::config,
              "regime loading must lie in [0, 1]");
      if (i > 0)
        require(regimes[i].start_day > regimes[i - 1].start_day, ErrorKind::config,
                "regime start days must be strictly increasing");
    }
    if (event) {
      require(event->ramp_start >= 0 && event->shock_day > event->ramp_start && event->shock_day < n_days,
              ErrorKind::config, "event needs 0 <= ramp_start < shock_day < n_days");
      require(event->peak_loading >= 0.0 && event->peak_loading <= 1.0, ErrorKind::config,
              "event peak loading must lie in [0, 1]");
    }
    require(idio_vol >= 0.0 && factor_vol >= 0.0, ErrorKind::config, "volatilities must be >= 0");
    require(base_volume > 0.0, ErrorKind::config, "base_volume must be > 0");
  }

  double regime_loading(int day) const {
    double c = regimes.front().loading;
    for (const auto& r : regimes)
      if (r.start_day <= day) c = r.loading;
    return c;
  }

  /// Factor concentration in force on `day`, including the planted event.
  double loading(int day) const {
    if (!event || day < event->ramp_start || day >= event->shock_day) {
      if (event && day >= event->shock_day) return regime_loading(event->ramp_start);
      return regime_loading(day);
    }
    const double start = regime_loading(event->ramp_start);
    const double span = double(event->shock_day - 1 - event->ramp_start);
    const double progress = span > 0 ? double(day - event->ramp_start) / span : 1.0;
    return start + (event->peak_loading - start) * progress;
  }

  /// 0 outside the ramp, rising linearly to 1 on the day before the shock.
  double ramp_progress(int day) const {
    if (!event || day < event->ramp_start || day >= event->shock_day) return 0.0;
    const double span = double(event->shock_day - 1 - event->ramp_start);
    return span > 0 ? double(day - event->ramp_start) / span : 1.0;
  }
};

/// One-factor market: r_i(t) = c(t) * beta_i * f(t) + eps_i(t), Gaussian f and
/// eps, prices compounded from 100, lognormal volumes that swell during a
/// planted ramp. Deterministic in the seed.
inline std::vector<RawBar> generate_factor_bars(const SynthConfig& config) {
  config.validate();
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> beta_dist(0.5, 1.5);

  const auto n = std::size_t(config.n_assets);
  std::vector<std::string> tickers(n);
  std::vector<double> beta(n), price(n, 100.0), volume_scale(n);
  for (std::size_t i = 0; i < n; ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "A%03zu", i);
    tickers[i] = buf;
    beta[i] = beta_dist(rng);
    volume_scale[i] = config.base_volume * std::exp(0.5 * normal(rng));
  }

  Date date = config.start_date.is_weekend() ? config.start_date.next_business_day() : config.start_date;
  std::vector<RawBar> bars;
  bars.reserve(n * std::size_t(config.n_days));
  for (int day = 0; day < config.n_days; ++day) {
    const double c = config.loading(day);
    const double f = config.factor_vol * normal(rng);
    const double activity = 1.0 + config.ramp_progress(day);
    for (std::size_t i = 0; i < n; ++i) {
      const double eps = config.idio_vol * normal(rng);
      if (day > 0) price[i] *= std::exp(c * beta[i] * f + eps);
      const double v = std::round(volume_scale[i] * activity * std::exp(0.25 * normal(rng)));
      bars.push_back({date, tickers[i], price[i], v});
    }
    date = date.next_business_day();
  }
  return bars;
}

inline MarketPanel generate_factor_market(const SynthConfig& config, const IngestConfig& ingest = {}) {
  const auto bars = generate_factor_bars(config);
  return panel_from_bars(bars, ingest);
}

}  // namespace qna
