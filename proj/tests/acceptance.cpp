// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "test_util.hpp"

using namespace qna;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass;
  std::string detail;
};

std::vector<bool> results;

void report(int id, const std::string& name, const std::function<Outcome()>& body) {
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str());
  std::fflush(stdout);
  results.push_back(o.pass);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

DensityMatrix random_rho(std::mt19937_64& rng, std::size_t d, std::size_t k) {
  Matrix m = testutil::from_mat(oracle::random_density(rng, d, k));
  return DensityMatrix(0.5 * (m + m.transpose()));
}

/// Mean of the series over dates whose panel day index lies in [first, last].
double day_range_mean(const IndicatorSeries& s, const MarketPanel& p, std::size_t first, std::size_t last) {
  double sum = 0;
  int n = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto d = *p.day_index(s.dates[i]);
    if (s.has_value(i) && d >= first && d <= last) sum += s.values[i], ++n;
  }
  return sum / n;
}

/// ERI = 1 - sum_ij rho_ij^2 from raw closes, asset ensemble over one window.
double oracle_eri(const MarketPanel& p, std::size_t end_day, std::size_t window) {
  std::vector<std::vector<double>> psi;
  for (std::size_t a = 0; a < p.n_assets(); ++a) {
    std::vector<double> r;
    for (std::size_t d = end_day + 1 - window; d <= end_day; ++d)
      r.push_back(std::log(p.close(Eigen::Index(a), Eigen::Index(d)) / p.close(Eigen::Index(a), Eigen::Index(d - 1))));
    double m = 0;
    for (double x : r) m += x;
    m /= double(r.size());
    double s = 0;
    for (auto& x : r) x -= m, s += x * x;
    for (auto& x : r) x /= std::sqrt(s);
    psi.push_back(r);
  }
  double q = 0;
  for (std::size_t i = 0; i < window; ++i)
    for (std::size_t j = 0; j < window; ++j) {
      double rij = 0;
      for (const auto& v : psi) rij += v[i] * v[j];
      rij /= double(psi.size());
      q += rij * rij;
    }
  return 1.0 - q;
}

SynthConfig two_regime(std::uint64_t seed) { return testutil::synth(50, 500, seed, {{0, 0.2}, {250, 0.9}}); }

SynthConfig planted_event(std::uint64_t seed) {
  auto cfg = testutil::synth(50, 400, seed, {{0, 0.2}});
  cfg.event = SynthEvent{250, 310, 0.95};
  return cfg;
}

// Concentrated minus dispersed time-averaged ERI on two_regime(1), computed
// once with oracle_eri over days 60..249 and 310..499 and frozen here.
constexpr double kSeed1EriGap = -0.503504205653;
constexpr double kFixtureTol = 1e-9;

}  // namespace

int main() {
  std::mt19937_64 rng(20240917);

  report(1, "density validity over 1000 random windows", [&] {
    const auto t0 = Clock::now();
    const ConstructionMode modes[] = {ConstructionMode::cross_sectional_pure, ConstructionMode::asset_ensemble,
                                      ConstructionMode::feature_ensemble, ConstructionMode::correlation_baseline};
    std::vector<MarketPanel> panels;
    for (std::uint64_t s = 0; s < 5; ++s)
      panels.push_back(generate_factor_market(testutil::synth(20 + int(s) * 5, 220, 100 + s, {{0, 0.1 * double(s)}})));
    double worst_sym = 0, worst_trace = 0, worst_min = 1;
    int checked = 0, attempts = 0;
    while (checked < 1000 && attempts < 5000) {
      ++attempts;
      const auto& panel = panels[rng() % panels.size()];
      const auto mode = modes[checked % 4];
      const std::size_t window = 10 + rng() % 51;
      const std::size_t end_day = window + 25 + rng() % (panel.n_days() - window - 25);
      Matrix m;
      try {
        m = build_window_state(panel, end_day, {mode, int(window)}).matrix();
      } catch (const Error&) {
        continue;
      }
      worst_sym = std::max(worst_sym, (m - m.transpose()).cwiseAbs().maxCoeff());
      worst_trace = std::max(worst_trace, std::abs(m.trace() - 1.0));
      const auto ev = oracle::jacobi_eigenvalues(testutil::to_mat(m));
      worst_min = std::min(worst_min, ev.back());
      ++checked;
    }
    const double secs = seconds_since(t0);
    return Outcome{checked == 1000 && worst_sym <= 1e-12 && worst_trace <= 1e-12 && worst_min >= -1e-10 && secs < 30,
                   fmt("%d windows, max asym %.2e, max |tr-1| %.2e, min eig %.2e, %.1f s", checked, worst_sym,
                       worst_trace, worst_min, secs)};
  });

  report(2, "spectral bounds and orthogonal invariance", [&] {
    double worst_bound = 0, worst_inv = 0;
    for (std::size_t d = 1; d <= 16; ++d) {
      for (std::size_t k : {std::size_t(1), d / 2 + 1, 2 * d}) {
        const auto rho = random_rho(rng, d, k);
        const auto base = summarize(rho);
        const double dd = double(d);
        worst_bound = std::max({worst_bound, -base.entropy, base.entropy - std::log(dd), 1.0 / dd - base.purity,
                                base.purity - 1.0, std::abs(base.eri - (1.0 - base.purity))});
        for (int rep = 0; rep < 200; ++rep) {
          const Matrix u = testutil::random_orthogonal(rng, d);
          Matrix c = u * rho.matrix() * u.transpose();
          c = 0.5 * (c + c.transpose()).eval();
          const auto s = summarize(DensityMatrix(c));
          worst_inv = std::max({worst_inv, std::abs(s.entropy - base.entropy), std::abs(s.purity - base.purity),
                                std::abs(s.eri - base.eri)});
        }
      }
    }
    return Outcome{worst_bound <= 1e-8 && worst_inv <= 1e-8,
                   fmt("worst bound violation %.2e, worst conjugation drift %.2e", worst_bound, worst_inv)};
  });

  report(3, "orthogonal ensembles reduce to Shannon entropy", [&] {
    double worst = 0;
    for (std::size_t n : {2u, 4u, 8u}) {
      const Matrix u = testutil::random_orthogonal(rng, n);
      std::vector<AmplitudeState> states;
      for (std::size_t j = 0; j < n; ++j) states.push_back(normalize_amplitude(Vector(Matrix::Identity(Eigen::Index(n), Eigen::Index(n)).col(Eigen::Index(j)))));
      const auto rho = ensemble_density(states);
      Matrix off = rho.matrix();
      off.diagonal().setZero();
      const std::vector<double> w(n, 1.0 / double(n));
      worst = std::max({worst, off.cwiseAbs().maxCoeff(), std::abs(von_neumann_entropy(rho) - std::log(double(n))),
                        std::abs(von_neumann_entropy(rho) - shannon_entropy(w))});
      // A rotated orthonormal basis shares the spectrum.
      std::vector<AmplitudeState> rotated;
      for (std::size_t j = 0; j < n; ++j) rotated.push_back(normalize_amplitude(Vector(u.col(Eigen::Index(j)))));
      worst = std::max(worst, std::abs(von_neumann_entropy(ensemble_density(rotated)) - std::log(double(n))));
    }
    return Outcome{worst <= 1e-10, fmt("worst deviation %.2e for N in {2,4,8}", worst)};
  });

  report(4, "mutual information and partial trace oracles", [&] {
    double worst_product = 0, worst_pt = 0;
    for (int rep = 0; rep < 100; ++rep) {
      const auto a = random_rho(rng, 2 + rep % 3, 2), b = random_rho(rng, 2 + rep % 4, 3);
      worst_product = std::max(worst_product, std::abs(mutual_information(tensor_product(a, b), a.matrix().rows(),
                                                                          b.matrix().rows())));
    }
    Matrix bell = Matrix::Zero(4, 4);
    bell(0, 0) = bell(0, 3) = bell(3, 0) = bell(3, 3) = 0.5;
    const double bell_err = std::abs(mutual_information(DensityMatrix(bell), 2, 2) - 2 * std::log(2.0));
    for (int rep = 0; rep < 100; ++rep) {
      const auto m = oracle::random_density(rng, 6, 1 + rep % 6);
      const DensityMatrix rho(testutil::from_mat(m));
      for (bool keep_a : {true, false}) {
        const auto mine = partial_trace(rho, 2, 3, keep_a ? Subsystem::A : Subsystem::B).matrix();
        const auto ref = testutil::from_mat(oracle::partial_trace(m, 2, 3, keep_a));
        worst_pt = std::max(worst_pt, (mine - ref).cwiseAbs().maxCoeff());
      }
    }
    return Outcome{worst_product <= 1e-9 && bell_err <= 1e-8 && worst_pt <= 1e-10,
                   fmt("product max |I| %.2e, Bell error %.2e, partial trace max diff %.2e", worst_product, bell_err,
                       worst_pt)};
  });

  report(5, "depolarizing monotonicity at d = 4", [&] {
    const auto v = oracle::random_unit(rng, 4);
    const Matrix psi = pure_state_density(normalize_amplitude(std::span<const double>(v))).matrix();
    double prev_s = -1, prev_e = -1, min_step_s = 1, min_step_e = 1;
    for (int k = 0; k <= 20; ++k) {
      const double p = 0.05 * k;
      const DensityMatrix rho(p * Matrix::Identity(4, 4) / 4.0 + (1 - p) * psi);
      const double s = von_neumann_entropy(rho), e = eri(rho);
      if (k > 0) min_step_s = std::min(min_step_s, s - prev_s), min_step_e = std::min(min_step_e, e - prev_e);
      prev_s = s, prev_e = e;
    }
    return Outcome{min_step_s > 0 && min_step_e > 0,
                   fmt("smallest entropy step %.3e, smallest ERI step %.3e", min_step_s, min_step_e)};
  });

  report(6, "two-regime ERI: concentrated above dispersed", [&] {
    int above = 0;
    double seed1_gap = 0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
      const auto panel = generate_factor_market(two_regime(seed));
      const auto s = compute_indicator_series(panel, {}, {Indicator::eri})[0];
      const double gap = day_range_mean(s, panel, 310, 499) - day_range_mean(s, panel, 60, 249);
      if (seed == 1) seed1_gap = gap;
      above += gap > 0;
    }
    const auto panel = generate_factor_market(two_regime(1));
    double lo = 0, hi = 0;
    for (std::size_t d = 60; d <= 249; ++d) lo += oracle_eri(panel, d, 60);
    for (std::size_t d = 310; d <= 499; ++d) hi += oracle_eri(panel, d, 60);
    const double oracle_gap = hi / 190.0 - lo / 190.0;
    const bool fixture_ok = std::abs(seed1_gap - kSeed1EriGap) <= kFixtureTol &&
                            std::abs(oracle_gap - kSeed1EriGap) <= kFixtureTol;
    return Outcome{above >= 45 && fixture_ok,
                   fmt("%d/50 seeds with concentrated ERI higher (need 45); seed-1 gap %.12f, oracle %.12f, "
                       "fixture %.12f",
                       above, seed1_gap, oracle_gap, kSeed1EriGap)};
  });

  report(7, "QEWS peaks inside the planted ramp and drops after the shock", [&] {
    int in_ramp = 0, drops = 0, purity_in_ramp = 0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
      const auto panel = generate_factor_market(planted_event(seed));
      const auto ind = compute_indicator_series(panel, {}, {Indicator::eri, Indicator::purity});
      const auto peak_day = [&](const IndicatorSeries& q) {
        std::size_t best = 0;
        for (std::size_t i = 0; i < q.size(); ++i)
          if (q.has_value(i) && (!q.has_value(best) || q.values[i] > q.values[best])) best = i;
        return *panel.day_index(q.dates[best]);
      };
      const auto q = qews(ind[0], 60);
      const auto day = peak_day(q);
      in_ramp += day >= 250 && day < 310;
      const auto r = event_study(q, EventWindow{panel.dates[310], 10, 10});
      drops += r.post_mean < r.pre_mean;
      const auto pd = peak_day(qews(ind[1], 60));
      purity_in_ramp += pd >= 250 && pd < 310;
    }
    return Outcome{in_ramp >= 45 && drops >= 45,
                   fmt("ERI QEWS max in ramp %d/50, post<pre %d/50 (need 45 each); purity QEWS max in ramp %d/50",
                       in_ramp, drops, purity_in_ramp)};
  });

  report(8, "no look-ahead under truncation", [&] {
    auto cfg = testutil::synth(25, 260, 77, {{0, 0.2}, {120, 0.7}});
    cfg.event = SynthEvent{150, 200, 0.9};
    auto bars = generate_factor_bars(cfg);
    // Drop a few bars so forward fill and coverage are exercised.
    std::erase_if(bars, [&, i = 0](const RawBar&) mutable { return ++i % 97 == 0; });
    const auto full_panel = panel_from_bars(bars);
    const StateConstruction sc{ConstructionMode::asset_ensemble, 40};
    auto full = compute_indicator_series(full_panel, sc, all_indicators());
    full.push_back(qews(full[3], 20));
    full.push_back(qews(full[0], 20, QewsMode::derivative_zscore));
    int mismatches = 0, compared = 0;
    for (int rep = 0; rep < 20; ++rep) {
      const std::size_t cut = 70 + rng() % (full_panel.n_days() - 70);
      const Date last = full_panel.dates[cut];
      std::vector<RawBar> prefix;
      for (const auto& b : bars)
        if (!(last < b.date)) prefix.push_back(b);
      const auto panel = panel_from_bars(prefix);
      auto part = compute_indicator_series(panel, sc, all_indicators());
      part.push_back(qews(part[3], 20));
      part.push_back(qews(part[0], 20, QewsMode::derivative_zscore));
      for (std::size_t k = 0; k < full.size(); ++k) {
        for (std::size_t i = 0; i < part[k].size(); ++i) {
          const auto j = full[k].index_of(part[k].dates[i]);
          ++compared;
          const bool same = j && part[k].flags[i] == full[k].flags[*j] &&
                            (!part[k].has_value(i) || std::memcmp(&part[k].values[i], &full[k].values[*j], sizeof(double)) == 0);
          mismatches += !same;
        }
        if (part[k].dates.back() != full[k].dates[*full[k].index_of(last)]) ++mismatches;
      }
    }
    return Outcome{mismatches == 0, fmt("%d values compared across 20 cut points, %d differ", compared, mismatches)};
  });

  report(9, "statistic set emitted and criteria 1-8 hold", [&] {
    const auto panel = generate_factor_market(testutil::synth(30, 300, 9, {{0, 0.2}, {150, 0.8}}));
    RunConfig cfg;
    cfg.data_path = "synthetic";
    const auto r = run_compute(panel, cfg);
    const auto& s = r.summary;
    bool have = true;
    for (const char* k : {"quantum", "classical"}) have &= s["entropy"][k]["mean"].is_number();
    for (const char* k : {"quantum_index", "classical_index", "eri"}) {
      have &= s["stability"][k]["std"].is_number() && s["stability"][k]["acf1"].is_number();
      have &= s["risk_association"][k]["volatility_corr"].is_number() &&
              s["risk_association"][k]["drawdown_corr"].is_number();
    }
    for (const char* k : {"quantum_index", "classical_index"})
      have &= s["regimes"][k]["low_entropy"]["mean"].is_number() && s["regimes"][k]["high_entropy"]["mean"].is_number();
    have &= s["qews"]["max"].is_number();
    const bool prior = std::all_of(results.begin(), results.begin() + 8, [](bool b) { return b; });
    return Outcome{have && prior, fmt("statistic set %s; criteria 1-8 %s", have ? "complete" : "incomplete",
                                      prior ? "all pass" : "not all pass")};
  });

  report(10, "performance: 100 assets x 500 days end to end", [&] {
    const auto dir = testutil::temp_dir("accept-perf");
    auto scfg = testutil::synth(100, 500, 4, {{0, 0.3}});
    const auto t0 = Clock::now();
    RunConfig cfg;
    cfg.data_path = cmd_synth(scfg, dir / "panel.csv");
    cfg.output_dir = dir / "out";
    const auto files = cmd_compute(cfg);
    const double secs = seconds_since(t0);
    std::filesystem::remove_all(dir);
    return Outcome{secs < 10 && !files.empty(), fmt("%.2f s (limit 10 s)", secs)};
  });

  const auto failed = std::count(results.begin(), results.end(), false);
  std::printf("%zu/%zu criteria pass\n", results.size() - std::size_t(failed), results.size());
  return failed == 0 ? 0 : 1;
}
