#pragma once

#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qna/error.hpp"
#include "qna/ingest.hpp"
#include "qna/linalg.hpp"

namespace qna {

// ---------------------------------------------------------------------------
// Amplitude states

/// Unit-norm real vector.
class AmplitudeState {
 public:
  /// Normalizes `x`. Throws ErrorKind::degenerate on a zero (or non-finite) vector.
  explicit AmplitudeState(const Vector& x) {
    require(x.size() > 0, ErrorKind::invalid_argument, "amplitude vector is empty");
    require(x.allFinite(), ErrorKind::invalid_argument, "amplitude vector has non-finite components");
    const double norm = x.norm();
    require(norm > 0.0, ErrorKind::degenerate, "cannot normalize a zero vector");
    components_ = x / norm;
  }

  const Vector& components() const { return components_; }
  Eigen::Index dim() const { return components_.size(); }
  double operator[](Eigen::Index i) const { return components_[i]; }

 private:
  Vector components_;
};

inline AmplitudeState normalize_amplitude(const Vector& x) { return AmplitudeState(x); }

inline AmplitudeState normalize_amplitude(std::span<const double> x) {
  return AmplitudeState(Eigen::Map<const Vector>(x.data(), Eigen::Index(x.size())));
}

/// Cross-section of returns at one date, normalized over assets.
inline AmplitudeState cross_sectional_state(std::span<const double> returns_at_t) {
  try {
    return normalize_amplitude(returns_at_t);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::degenerate)
      fail(ErrorKind::degenerate, "all-zero return cross-section");
    throw;
  }
}

// ---------------------------------------------------------------------------
// Density matrices

struct DensityCheck {
  double asymmetry = 0.0;
  double trace_error = 0.0;
  double min_eigenvalue = 0.0;

  static constexpr double kSymmetryTol = 1e-12;
  static constexpr double kTraceTol = 1e-12;
  static constexpr double kPsdTol = 1e-10;

  bool ok() const {
    return asymmetry <= kSymmetryTol && trace_error <= kTraceTol && min_eigenvalue >= -kPsdTol;
  }
};

inline DensityCheck check_density(const Matrix& m) {
  DensityCheck c;
  c.asymmetry = max_asymmetry(m);
  c.trace_error = std::abs(m.trace() - 1.0);
  const Matrix sym = 0.5 * (m + m.transpose());
  c.min_eigenvalue = symmetric_eigenvalues_desc(sym).minCoeff();
  return c;
}

/// Real symmetric, positive semidefinite, unit-trace matrix.
class DensityMatrix {
 public:
  /// Validates all three invariants; throws ErrorKind::invalid_argument otherwise.
  explicit DensityMatrix(Matrix m) : m_(std::move(m)) {
    require(m_.rows() > 0 && m_.rows() == m_.cols(), ErrorKind::invalid_argument,
            "density matrix must be square and non-empty");
    require(m_.allFinite(), ErrorKind::invalid_argument, "density matrix has non-finite entries");
    const auto c = check_density(m_);
    if (!c.ok()) {
      fail(ErrorKind::invalid_argument,
           "not a density matrix (asymmetry " + std::to_string(c.asymmetry) + ", trace error " +
               std::to_string(c.trace_error) + ", min eigenvalue " + std::to_string(c.min_eigenvalue) + ")");
    }
  }

  /// For builders that are symmetric and PSD by construction. Skips the
  /// eigenvalue check.
  static DensityMatrix from_construction(Matrix m) { return DensityMatrix(std::move(m), Trusted{}); }

  static DensityMatrix maximally_mixed(Eigen::Index d) {
    return from_construction(Matrix::Identity(d, d) / double(d));
  }

  const Matrix& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

 private:
  struct Trusted {};
  DensityMatrix(Matrix m, Trusted) : m_(std::move(m)) {}
  Matrix m_;
};

/// |psi><psi|.
inline DensityMatrix pure_state_density(const AmplitudeState& psi) {
  const Vector& v = psi.components();
  return DensityMatrix::from_construction(v * v.transpose());
}

namespace detail {

/// (1/N) * columns * columns^T, accumulated on one triangle and mirrored so
/// the result is exactly symmetric.
inline Matrix gram_average(const Matrix& columns) {
  const auto d = columns.rows();
  Matrix rho = Matrix::Zero(d, d);
  rho.selfadjointView<Eigen::Lower>().rankUpdate(columns, 1.0 / double(columns.cols()));
  rho.triangularView<Eigen::StrictlyUpper>() = rho.transpose();
  return rho;
}

}  // namespace detail

/// Equal-weight mixture (1/N) sum |psi_i><psi_i|.
inline DensityMatrix ensemble_density(std::span<const AmplitudeState> states) {
  require(!states.empty(), ErrorKind::invalid_argument, "ensemble_density needs at least one state");
  const auto d = states.front().dim();
  Matrix columns(d, Eigen::Index(states.size()));
  for (std::size_t i = 0; i < states.size(); ++i) {
    require(states[i].dim() == d, ErrorKind::invalid_argument,
            "ensemble dimension mismatch: " + std::to_string(states[i].dim()) + " vs " + std::to_string(d));
    columns.col(Eigen::Index(i)) = states[i].components();
  }
  return DensityMatrix::from_construction(detail::gram_average(columns));
}

/// Rows of `block` demeaned and scaled to unit Euclidean norm. Rows with zero
/// variance are skipped and their indices appended to `dropped`.
inline std::vector<AmplitudeState> standardized_row_states(const Matrix& block,
                                                           std::vector<std::size_t>* dropped = nullptr) {
  std::vector<AmplitudeState> out;
  out.reserve(std::size_t(block.rows()));
  for (Eigen::Index i = 0; i < block.rows(); ++i) {
    const Vector centered = (block.row(i).array() - block.row(i).mean()).matrix().transpose();
    const double norm = centered.norm();
    // Demeaned constant rows leave rounding residue of order eps * |mean|.
    const double floor = 1e-14 * std::max(1.0, block.row(i).cwiseAbs().maxCoeff()) *
                         std::sqrt(double(block.cols()));
    if (!(norm > floor)) {
      if (dropped) dropped->push_back(std::size_t(i));
      continue;
    }
    out.emplace_back(centered);
  }
  return out;
}

/// Pearson correlation matrix of the rows of `block` (assets x T). Zero-variance
/// rows are excluded; their indices go to `excluded`.
inline Matrix pearson_correlation_matrix(const Matrix& block, std::vector<std::size_t>* excluded = nullptr) {
  require(block.cols() >= 2, ErrorKind::insufficient_data, "correlation needs T >= 2 observations");
  const auto states = standardized_row_states(block, excluded);
  require(!states.empty(), ErrorKind::degenerate, "every asset in the window has zero variance");
  Matrix z(Eigen::Index(states.size()), block.cols());
  for (std::size_t i = 0; i < states.size(); ++i) z.row(Eigen::Index(i)) = states[i].components().transpose();
  Matrix c = Matrix::Zero(z.rows(), z.rows());
  c.selfadjointView<Eigen::Lower>().rankUpdate(z);
  c.triangularView<Eigen::StrictlyUpper>() = c.transpose();
  c.diagonal().setOnes();
  return c;
}

/// Classical baseline: Pearson correlation normalized to unit trace, C / N.
inline DensityMatrix correlation_baseline_density(const Matrix& returns_window,
                                                  std::vector<std::size_t>* excluded = nullptr) {
  const Matrix c = pearson_correlation_matrix(returns_window, excluded);
  return DensityMatrix::from_construction(c / double(c.rows()));
}

// ---------------------------------------------------------------------------
// Window construction

enum class ConstructionMode {
  cross_sectional_pure,
  asset_ensemble,
  feature_ensemble,
  correlation_baseline,
};

inline std::string_view to_string(ConstructionMode mode) {
  switch (mode) {
    case ConstructionMode::cross_sectional_pure: return "cross-sectional-pure";
    case ConstructionMode::asset_ensemble: return "asset-ensemble";
    case ConstructionMode::feature_ensemble: return "feature-ensemble";
    case ConstructionMode::correlation_baseline: return "correlation-baseline";
  }
  return "unknown";
}

inline ConstructionMode parse_construction(std::string_view text) {
  for (auto m : {ConstructionMode::cross_sectional_pure, ConstructionMode::asset_ensemble,
                 ConstructionMode::feature_ensemble, ConstructionMode::correlation_baseline}) {
    if (to_string(m) == text) return m;
  }
  fail(ErrorKind::config, "unknown construction '" + std::string(text) + "'");
}

struct StateConstruction {
  ConstructionMode mode = ConstructionMode::asset_ensemble;
  int window = 60;

  void validate() const {
    require(window >= 2, ErrorKind::config, "window must be >= 2, got " + std::to_string(window));
  }
};

/// Returns of the assets fully covered by the window of `window` returns
/// ending at `end_day`.
struct WindowData {
  std::size_t end_day = 0;
  std::size_t window = 0;
  std::vector<std::size_t> assets;      ///< panel asset indices, in panel order
  std::vector<std::string> tickers;
  Matrix returns;                       ///< included assets x window

  std::size_t size() const { return assets.size(); }
};

inline WindowData window_data(const MarketPanel& panel, std::size_t end_day, std::size_t window) {
  require(window >= 2, ErrorKind::config, "window must be >= 2");
  require(end_day < panel.n_days(), ErrorKind::invalid_argument, "window end outside panel");
  require(end_day >= window, ErrorKind::insufficient_data,
          "window of " + std::to_string(window) + " returns ending " + panel.dates[end_day].iso() +
              " needs " + std::to_string(window + 1) + " prices");
  WindowData w;
  w.end_day = end_day;
  w.window = window;
  for (std::size_t a = 0; a < panel.n_assets(); ++a) {
    if (panel.in_window(a, end_day, window)) {
      w.assets.push_back(a);
      w.tickers.push_back(panel.tickers[a]);
    }
  }
  w.returns.resize(Eigen::Index(w.assets.size()), Eigen::Index(window));
  const auto first = Eigen::Index(end_day - window);  // returns column of day end_day-window+1
  for (std::size_t i = 0; i < w.assets.size(); ++i) {
    w.returns.row(Eigen::Index(i)) = panel.returns.block(Eigen::Index(w.assets[i]), first, 1, Eigen::Index(window));
  }
  return w;
}

/// Density matrix of an already extracted window. `panel` is only consulted
/// by the feature construction.
inline DensityMatrix density_from_window(const MarketPanel& panel, const WindowData& w, ConstructionMode mode) {
  const auto& when = panel.dates[w.end_day];
  require(w.size() >= 2, ErrorKind::insufficient_data,
          "fewer than 2 assets cover the window ending " + when.iso());

  switch (mode) {
    case ConstructionMode::cross_sectional_pure: {
      const Vector last = w.returns.col(w.returns.cols() - 1);
      return pure_state_density(cross_sectional_state(std::span<const double>(last.data(), std::size_t(last.size()))));
    }
    case ConstructionMode::asset_ensemble: {
      const auto states = standardized_row_states(w.returns);
      require(!states.empty(), ErrorKind::degenerate, "every asset has a flat return window ending " + when.iso());
      return ensemble_density(states);
    }
    case ConstructionMode::feature_ensemble: {
      std::vector<AmplitudeState> states;
      for (std::size_t a : w.assets) {
        const auto x = try_feature_vector(panel, a, w.end_day, w.window);
        if (!x) continue;
        const Vector v = Eigen::Map<const Vector>(x->data(), 4);
        if (v.norm() > 0.0) states.emplace_back(v);
      }
      require(!states.empty(), ErrorKind::degenerate, "no asset has a defined feature vector on " + when.iso());
      return ensemble_density(states);
    }
    case ConstructionMode::correlation_baseline:
      return correlation_baseline_density(w.returns);
  }
  fail(ErrorKind::invalid_argument, "unknown construction mode");
}

inline DensityMatrix build_window_state(const MarketPanel& panel, std::size_t end_day,
                                        const StateConstruction& construction) {
  construction.validate();
  return density_from_window(panel, window_data(panel, end_day, std::size_t(construction.window)),
                             construction.mode);
}

inline DensityMatrix build_window_state(const MarketPanel& panel, const Date& t,
                                        const StateConstruction& construction) {
  const auto day = panel.day_index(t);
  require(day.has_value(), ErrorKind::invalid_argument, "date " + t.iso() + " not in panel");
  return build_window_state(panel, *day, construction);
}

}  // namespace qna
