#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "qna/error.hpp"

namespace qna {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Eigenvalues of a real symmetric matrix in descending order.
inline Vector symmetric_eigenvalues_desc(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    fail(ErrorKind::numerical, "symmetric eigensolver did not converge");
  }
  Vector ascending = solver.eigenvalues();
  return ascending.reverse();
}

inline double max_asymmetry(const Matrix& m) {
  return (m - m.transpose()).cwiseAbs().maxCoeff();
}

/// Sample mean and standard deviation (divisor n-1). n must be >= 2.
struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;
};

template <typename Range>
MeanStd sample_mean_std(const Range& values) {
  double sum = 0.0;
  std::size_t n = 0;
  for (double v : values) {
    sum += v;
    ++n;
  }
  MeanStd out;
  if (n == 0) return out;
  out.mean = sum / double(n);
  if (n < 2) return out;
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  out.stddev = std::sqrt(ss / double(n - 1));
  return out;
}

/// Pearson correlation of two equally sized ranges. NaN when either side has
/// zero variance.
template <typename RangeA, typename RangeB>
double pearson(const RangeA& a, const RangeB& b) {
  const auto n = std::size(a);
  if (n != std::size(b) || n < 2) return kNaN;
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= double(n);
  mb /= double(n);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double da = a[i] - ma, db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa <= 0.0 || sbb <= 0.0) return kNaN;
  return sab / std::sqrt(saa * sbb);
}

}  // namespace qna
