#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "qna/error.hpp"
#include "qna/linalg.hpp"
#include "qna/states.hpp"

namespace qna {

enum class EntropyBase { natural, base2 };

inline EntropyBase parse_entropy_base(std::string_view text) {
  if (text == "natural" || text == "e" || text == "nats") return EntropyBase::natural;
  if (text == "base-2" || text == "2" || text == "bits") return EntropyBase::base2;
  fail(ErrorKind::config, "unknown entropy base '" + std::string(text) + "'");
}

inline std::string_view to_string(EntropyBase base) {
  return base == EntropyBase::natural ? "natural" : "base-2";
}

inline constexpr double kEigenClipTol = 1e-10;

/// Descending eigenvalues of rho. Negatives down to -1e-10 are clipped to zero
/// and the spectrum renormalized to sum 1; anything more negative is an error.
inline Vector eigen_spectrum(const DensityMatrix& rho) {
  Vector lambda = symmetric_eigenvalues_desc(rho.matrix());
  for (Eigen::Index k = 0; k < lambda.size(); ++k) {
    if (lambda[k] < -kEigenClipTol) {
      fail(ErrorKind::numerical, "eigenvalue " + std::to_string(lambda[k]) + " below PSD tolerance");
    }
    if (lambda[k] < 0.0) lambda[k] = 0.0;
  }
  const double total = lambda.sum();
  require(total > 0.0, ErrorKind::numerical, "spectrum sums to zero");
  return lambda / total;
}

namespace detail {

inline double entropy_of(const Vector& p, EntropyBase base) {
  double s = 0.0;
  for (Eigen::Index k = 0; k < p.size(); ++k) {
    if (p[k] > 0.0) s -= p[k] * std::log(p[k]);
  }
  if (base == EntropyBase::base2) s /= std::numbers::ln2;
  return s;
}

}  // namespace detail

/// -sum w ln w with 0 ln 0 = 0.
inline double shannon_entropy(std::span<const double> weights, EntropyBase base = EntropyBase::natural) {
  require(!weights.empty(), ErrorKind::invalid_argument, "empty probability vector");
  double total = 0.0;
  for (double w : weights) {
    require(std::isfinite(w) && w >= 0.0, ErrorKind::invalid_argument,
            "negative or non-finite probability weight");
    total += w;
  }
  require(std::abs(total - 1.0) <= 1e-10, ErrorKind::invalid_argument,
          "probability weights sum to " + std::to_string(total) + ", not 1");
  return detail::entropy_of(Eigen::Map<const Vector>(weights.data(), Eigen::Index(weights.size())), base);
}

inline double von_neumann_entropy(const DensityMatrix& rho, EntropyBase base = EntropyBase::natural) {
  return detail::entropy_of(eigen_spectrum(rho), base);
}

/// Tr(rho^2), from the entries.
inline double purity(const DensityMatrix& rho) { return rho.matrix().squaredNorm(); }

inline double eri(const DensityMatrix& rho) { return 1.0 - purity(rho); }

struct SpectralSummary {
  Vector eigenvalues;  ///< descending, clipped, sum 1
  double entropy = 0.0;
  double purity = 0.0;
  double eri = 0.0;
};

inline SpectralSummary summarize(const DensityMatrix& rho, EntropyBase base = EntropyBase::natural) {
  SpectralSummary s;
  s.eigenvalues = eigen_spectrum(rho);
  s.entropy = detail::entropy_of(s.eigenvalues, base);
  s.purity = purity(rho);
  s.eri = 1.0 - s.purity;
  return s;
}

// ---------------------------------------------------------------------------
// Bipartite structure

enum class Subsystem { A, B };

/// Reduced state of one factor of a (dim_a * dim_b)-dimensional system. Joint
/// index = a * dim_b + b.
inline DensityMatrix partial_trace(const DensityMatrix& rho_ab, Eigen::Index dim_a, Eigen::Index dim_b,
                                   Subsystem keep) {
  require(dim_a > 0 && dim_b > 0 && rho_ab.dim() == dim_a * dim_b, ErrorKind::invalid_argument,
          "partial_trace: dimension " + std::to_string(rho_ab.dim()) + " != " + std::to_string(dim_a) +
              " x " + std::to_string(dim_b));
  const Matrix& m = rho_ab.matrix();
  if (keep == Subsystem::A) {
    Matrix out = Matrix::Zero(dim_a, dim_a);
    for (Eigen::Index i = 0; i < dim_a; ++i)
      for (Eigen::Index j = 0; j <= i; ++j) {
        double s = 0.0;
        for (Eigen::Index b = 0; b < dim_b; ++b) s += m(i * dim_b + b, j * dim_b + b);
        out(i, j) = out(j, i) = s;
      }
    return DensityMatrix::from_construction(std::move(out));
  }
  Matrix out = Matrix::Zero(dim_b, dim_b);
  for (Eigen::Index i = 0; i < dim_b; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) {
      double s = 0.0;
      for (Eigen::Index a = 0; a < dim_a; ++a) s += m(a * dim_b + i, a * dim_b + j);
      out(i, j) = out(j, i) = s;
    }
  return DensityMatrix::from_construction(std::move(out));
}

inline DensityMatrix tensor_product(const DensityMatrix& a, const DensityMatrix& b) {
  return DensityMatrix::from_construction(Eigen::kroneckerProduct(a.matrix(), b.matrix()).eval());
}

/// S(rho_A) + S(rho_B) - S(rho_AB) for an explicit joint state.
inline double mutual_information(const DensityMatrix& rho_ab, Eigen::Index dim_a, Eigen::Index dim_b,
                                 EntropyBase base = EntropyBase::natural) {
  const auto rho_a = partial_trace(rho_ab, dim_a, dim_b, Subsystem::A);
  const auto rho_b = partial_trace(rho_ab, dim_a, dim_b, Subsystem::B);
  return von_neumann_entropy(rho_a, base) + von_neumann_entropy(rho_b, base) - von_neumann_entropy(rho_ab, base);
}

enum class PartitionMode { tensor_bipartite, subgroup_mixture };

inline PartitionMode parse_partition_mode(std::string_view text) {
  if (text == "tensor-bipartite" || text == "tensor") return PartitionMode::tensor_bipartite;
  if (text == "subgroup-mixture" || text == "mixture") return PartitionMode::subgroup_mixture;
  fail(ErrorKind::config, "unknown partition mode '" + std::string(text) + "'");
}

inline std::string_view to_string(PartitionMode mode) {
  return mode == PartitionMode::tensor_bipartite ? "tensor-bipartite" : "subgroup-mixture";
}

struct Partition {
  std::vector<std::string> group_a;
  std::vector<std::string> group_b;
  PartitionMode mode = PartitionMode::tensor_bipartite;

  void validate() const {
    require(!group_a.empty() && !group_b.empty(), ErrorKind::invalid_argument, "partition groups must be non-empty");
    for (const auto& a : group_a)
      for (const auto& b : group_b)
        require(a != b, ErrorKind::invalid_argument, "partition groups overlap on '" + a + "'");
  }
};

namespace detail {

inline std::vector<Eigen::Index> resolve_group(const std::vector<std::string>& group, const WindowData& w,
                                               std::string_view label) {
  std::vector<Eigen::Index> rows;
  for (const auto& ticker : group) {
    for (std::size_t i = 0; i < w.tickers.size(); ++i) {
      if (w.tickers[i] == ticker) {
        rows.push_back(Eigen::Index(i));
        break;
      }
    }
  }
  require(!rows.empty(), ErrorKind::insufficient_data,
          "partition group " + std::string(label) + " has no assets left in the window");
  return rows;
}

/// Unit cross-sections of the selected rows, one column per window date whose
/// cross-section is not identically zero.
inline Matrix cross_section_columns(const Matrix& returns, const std::vector<Eigen::Index>& rows) {
  Matrix out(Eigen::Index(rows.size()), returns.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(Eigen::Index(i)) = returns.row(rows[i]);
  for (Eigen::Index t = 0; t < out.cols(); ++t) {
    const double n = out.col(t).norm();
    if (n > 0.0) out.col(t) /= n;
  }
  return out;
}

enum class TensorRoute { automatic, explicit_joint, gram };

/// Tensor-mode mutual information of the date mixture
///   rho_AB = (1/T) sum_t |a_t><a_t| (x) |b_t><b_t|,
/// with a_t, b_t the normalized cross-sections of the two groups at date t.
/// The explicit route forms rho_AB and reduces it with partial_trace; the Gram
/// route gets the same nonzero spectra from T x T overlap matrices.
inline double tensor_mixture_mi(const Matrix& a_cols, const Matrix& b_cols, EntropyBase base,
                                TensorRoute route = TensorRoute::automatic) {
  std::vector<Eigen::Index> keep;
  for (Eigen::Index t = 0; t < a_cols.cols(); ++t) {
    if (a_cols.col(t).squaredNorm() > 0.5 && b_cols.col(t).squaredNorm() > 0.5) keep.push_back(t);
  }
  require(!keep.empty(), ErrorKind::degenerate, "no window date with nonzero returns in both groups");
  const auto da = a_cols.rows(), db = b_cols.rows();
  const auto n = Eigen::Index(keep.size());

  if (route == TensorRoute::automatic) route = (da * db <= 256) ? TensorRoute::explicit_joint : TensorRoute::gram;

  if (route == TensorRoute::explicit_joint) {
    Matrix joint(da * db, n);
    for (Eigen::Index k = 0; k < n; ++k)
      joint.col(k) = Eigen::kroneckerProduct(a_cols.col(keep[std::size_t(k)]), b_cols.col(keep[std::size_t(k)]));
    const auto rho_ab = DensityMatrix::from_construction(gram_average(joint));
    return mutual_information(rho_ab, da, db, base);
  }

  Matrix a(da, n), b(db, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    a.col(k) = a_cols.col(keep[std::size_t(k)]);
    b.col(k) = b_cols.col(keep[std::size_t(k)]);
  }
  const Matrix ga = (a.transpose() * a) / double(n);
  const Matrix gb = (b.transpose() * b) / double(n);
  const Matrix gab = ga.cwiseProduct(b.transpose() * b);
  const auto spectral_entropy = [&](const Matrix& g) {
    return von_neumann_entropy(DensityMatrix::from_construction(0.5 * (g + g.transpose())), base);
  };
  return spectral_entropy(ga) + spectral_entropy(gb) - spectral_entropy(gab);
}

}  // namespace detail

/// Mutual information between two asset groups over one window.
///
/// tensor-bipartite: joint state on H_A (x) H_B (asset-index spaces of the two
/// groups) as a date mixture of product cross-sections; reductions by partial
/// trace. Nonnegative.
///
/// subgroup-mixture: rho_A, rho_B, rho_AB are asset ensembles over the shared
/// T-dimensional window space restricted to A, B and A u B. The plug-in value
/// can be negative and is returned as-is.
inline double mutual_information(const Partition& partition, const WindowData& window,
                                 EntropyBase base = EntropyBase::natural) {
  partition.validate();
  const auto rows_a = detail::resolve_group(partition.group_a, window, "A");
  const auto rows_b = detail::resolve_group(partition.group_b, window, "B");

  if (partition.mode == PartitionMode::tensor_bipartite) {
    return detail::tensor_mixture_mi(detail::cross_section_columns(window.returns, rows_a),
                                     detail::cross_section_columns(window.returns, rows_b), base);
  }

  const auto select = [&](const std::vector<Eigen::Index>& rows) {
    Matrix out(Eigen::Index(rows.size()), window.returns.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) out.row(Eigen::Index(i)) = window.returns.row(rows[i]);
    return out;
  };
  const auto entropy_of_rows = [&](const Matrix& block, std::string_view label) {
    const auto states = standardized_row_states(block);
    require(!states.empty(), ErrorKind::insufficient_data,
            "partition group " + std::string(label) + " has only flat return windows");
    return von_neumann_entropy(ensemble_density(states), base);
  };
  std::vector<Eigen::Index> rows_ab = rows_a;
  rows_ab.insert(rows_ab.end(), rows_b.begin(), rows_b.end());
  return entropy_of_rows(select(rows_a), "A") + entropy_of_rows(select(rows_b), "B") -
         entropy_of_rows(select(rows_ab), "A+B");
}

// ---------------------------------------------------------------------------
// Measurement update

/// rho -> M rho M^T / Tr(M rho M^T).
inline DensityMatrix apply_measurement(const DensityMatrix& rho, const Matrix& m) {
  require(m.rows() == rho.dim() && m.cols() == rho.dim(), ErrorKind::invalid_argument,
          "measurement operator must be " + std::to_string(rho.dim()) + "x" + std::to_string(rho.dim()));
  Matrix out = m * rho.matrix() * m.transpose();
  const double norm = out.trace();
  require(norm > 1e-14, ErrorKind::degenerate, "measurement annihilates the state (Tr = " + std::to_string(norm) + ")");
  out /= norm;
  out = 0.5 * (out + out.transpose()).eval();
  return DensityMatrix::from_construction(std::move(out));
}

}  // namespace qna
