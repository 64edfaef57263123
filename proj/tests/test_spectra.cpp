#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "test_util.hpp"

using namespace qna;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected qna::Error";
  return ErrorKind::io;
}

DensityMatrix diag(std::initializer_list<double> v) {
  Vector d(Eigen::Index(v.size()));
  Eigen::Index i = 0;
  for (double x : v) d[i++] = x;
  return DensityMatrix(Matrix(d.asDiagonal()));
}

DensityMatrix random_rho(std::mt19937_64& rng, std::size_t d, std::size_t k) {
  return DensityMatrix(testutil::from_mat(oracle::random_density(rng, d, k)));
}

DensityMatrix bell() {
  Vector psi = Vector::Zero(4);
  psi[0] = psi[3] = 1.0 / std::sqrt(2.0);
  return pure_state_density(normalize_amplitude(psi));
}

/// Columns of unit vectors, one per date.
Matrix random_columns(std::mt19937_64& rng, std::size_t d, std::size_t t) {
  Matrix m(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(t));
  for (std::size_t k = 0; k < t; ++k) {
    const auto v = oracle::random_unit(rng, d);
    for (std::size_t i = 0; i < d; ++i) m(Eigen::Index(i), Eigen::Index(k)) = v[i];
  }
  return m;
}

/// Demeaned Walsh rows of length 8: mean zero and mutually orthogonal.
std::vector<std::vector<double>> walsh() {
  return {{1, -1, 1, -1, 1, -1, 1, -1},
          {1, 1, -1, -1, 1, 1, -1, -1},
          {1, 1, 1, 1, -1, -1, -1, -1},
          {1, -1, -1, 1, 1, -1, -1, 1}};
}

WindowData window_of(const std::vector<std::vector<double>>& rows) {
  WindowData w;
  w.window = rows[0].size();
  w.returns.resize(Eigen::Index(rows.size()), Eigen::Index(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    w.assets.push_back(i);
    w.tickers.push_back("S" + std::to_string(i));
    for (std::size_t t = 0; t < rows[i].size(); ++t) w.returns(Eigen::Index(i), Eigen::Index(t)) = 0.01 * rows[i][t];
  }
  return w;
}

/// Oracle entropy of the ensemble of standardized rows, assembled by hand.
double oracle_ensemble_entropy(const std::vector<std::vector<double>>& rows) {
  std::vector<std::vector<double>> psi;
  for (auto r : rows) {
    double m = 0;
    for (double x : r) m += x;
    m /= r.size();
    double s = 0;
    for (auto& x : r) x -= m, s += x * x;
    for (auto& x : r) x /= std::sqrt(s);
    psi.push_back(r);
  }
  const std::size_t d = psi[0].size();
  oracle::Mat rho = oracle::zeros(d, d);
  for (const auto& p : psi)
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) rho[i][j] += p[i] * p[j] / double(psi.size());
  auto ev = oracle::jacobi_eigenvalues(rho);
  for (auto& e : ev) e = std::max(e, 0.0);
  return oracle::entropy_of(ev);
}

}  // namespace

TEST(EigenSpectrum, DiagonalAndTwoByTwo) {
  const Vector a = eigen_spectrum(diag({0.2, 0.7, 0.1}));
  EXPECT_NEAR(a[0], 0.7, 1e-15);
  EXPECT_NEAR(a[1], 0.2, 1e-15);
  EXPECT_NEAR(a[2], 0.1, 1e-15);
  Matrix m(2, 2);
  m << 0.5, 0.3, 0.3, 0.5;
  const Vector b = eigen_spectrum(DensityMatrix(m));
  EXPECT_NEAR(b[0], 0.8, 1e-15);
  EXPECT_NEAR(b[1], 0.2, 1e-15);
}

TEST(EigenSpectrum, MatchesJacobiOracle) {
  std::mt19937_64 rng(101);
  for (int rep = 0; rep < 50; ++rep) {
    const auto o = oracle::random_density(rng, 6, 1 + std::size_t(rep % 8));
    const Vector got = eigen_spectrum(DensityMatrix(testutil::from_mat(o)));
    const auto want = oracle::jacobi_eigenvalues(o);
    for (std::size_t k = 0; k < 6; ++k) EXPECT_NEAR(got[Eigen::Index(k)], want[k], 1e-9);
  }
}

TEST(EigenSpectrum, RejectsGenuinelyNegativeEigenvalues) {
  Matrix m(2, 2);
  m << 0.5, 0.6, 0.6, 0.5;  // eigenvalues 1.1, -0.1
  EXPECT_EQ(kind_of([&] { eigen_spectrum(DensityMatrix::from_construction(m)); }), ErrorKind::numerical);
  Matrix tiny(2, 2);
  tiny << 1.0 + 5e-11, 0.0, 0.0, -5e-11;
  const Vector s = eigen_spectrum(DensityMatrix::from_construction(tiny));
  EXPECT_EQ(s[1], 0.0);
  EXPECT_NEAR(s.sum(), 1.0, 1e-15);
}

TEST(VonNeumann, ReferenceValues) {
  EXPECT_NEAR(von_neumann_entropy(bell()), 0.0, 1e-12);
  EXPECT_NEAR(von_neumann_entropy(DensityMatrix::maximally_mixed(4)), 1.3862944, 1e-7);
  const double hand = -(0.5 * std::log(0.5) + 2 * 0.25 * std::log(0.25));
  EXPECT_NEAR(von_neumann_entropy(diag({0.5, 0.25, 0.25})), 1.0397208, 1e-7);
  EXPECT_NEAR(von_neumann_entropy(diag({0.5, 0.25, 0.25})), hand, 1e-14);
  EXPECT_NEAR(von_neumann_entropy(DensityMatrix::maximally_mixed(4), EntropyBase::base2), 2.0, 1e-14);
}

TEST(Shannon, ReferenceValuesAndErrors) {
  EXPECT_EQ(shannon_entropy(std::vector<double>{1, 0, 0}), 0.0);
  EXPECT_NEAR(shannon_entropy(std::vector<double>(4, 0.25)), std::log(4.0), 1e-15);
  EXPECT_EQ(kind_of([] { shannon_entropy(std::vector<double>{1.2, -0.2}); }), ErrorKind::invalid_argument);
  EXPECT_EQ(kind_of([] { shannon_entropy(std::vector<double>{0.5, 0.4}); }), ErrorKind::invalid_argument);
  EXPECT_EQ(kind_of([] { shannon_entropy(std::vector<double>{}); }), ErrorKind::invalid_argument);
}

TEST(Shannon, SpectralEquivalence) {
  std::mt19937_64 rng(103);
  for (int rep = 0; rep < 200; ++rep) {
    const auto rho = random_rho(rng, 2 + std::size_t(rep % 12), 1 + std::size_t(rep % 7));
    const Vector ev = eigen_spectrum(rho);
    const std::vector<double> w(ev.data(), ev.data() + ev.size());
    EXPECT_NEAR(shannon_entropy(w), von_neumann_entropy(rho), 1e-10);
  }
}

TEST(Purity, ReferenceValues) {
  EXPECT_NEAR(purity(bell()), 1.0, 1e-15);
  EXPECT_NEAR(purity(DensityMatrix::maximally_mixed(4)), 0.25, 1e-15);
  EXPECT_NEAR(purity(diag({0.5, 0.5})), 0.5, 1e-15);
  std::mt19937_64 rng(107);
  for (int rep = 0; rep < 100; ++rep) {
    const auto rho = random_rho(rng, 7, 3);
    const auto ev = oracle::jacobi_eigenvalues(testutil::to_mat(rho.matrix()));
    double sq = 0;
    for (double e : ev) sq += e * e;
    EXPECT_NEAR(purity(rho), sq, 1e-10);
  }
}

TEST(Eri, ReferenceValues) {
  EXPECT_NEAR(eri(bell()), 0.0, 1e-15);
  EXPECT_NEAR(eri(DensityMatrix::maximally_mixed(4)), 0.75, 1e-15);
  // Depolarized p = 0.5, d = 4: eigenvalues {(1-p)+p/d, p/d, p/d, p/d}.
  const double p = 0.5, d = 4;
  const double l0 = (1 - p) + p / d, l1 = p / d;
  const double closed_form = 1.0 - (l0 * l0 + 3 * l1 * l1);
  std::mt19937_64 rng(109);
  const auto v = oracle::random_unit(rng, 4);
  const Matrix psi = pure_state_density(normalize_amplitude(std::span<const double>(v))).matrix();
  const DensityMatrix rho(p * Matrix::Identity(4, 4) / d + (1 - p) * psi);
  EXPECT_NEAR(eri(rho), closed_form, 1e-14);
  const auto s = summarize(rho);
  EXPECT_EQ(s.purity + s.eri, 1.0);
}

TEST(PartialTrace, ProductStateFactorizes) {
  std::mt19937_64 rng(113);
  const auto a = random_rho(rng, 2, 2), b = random_rho(rng, 3, 2);
  const auto ab = tensor_product(a, b);
  EXPECT_LE((partial_trace(ab, 2, 3, Subsystem::A).matrix() - a.matrix()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((partial_trace(ab, 2, 3, Subsystem::B).matrix() - b.matrix()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(PartialTrace, BellStateReducesToMaximallyMixed) {
  const auto r = partial_trace(bell(), 2, 2, Subsystem::A);
  EXPECT_LE((r.matrix() - Matrix::Identity(2, 2) / 2).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(PartialTrace, MatchesIndexSumOracle) {
  std::mt19937_64 rng(127);
  for (int rep = 0; rep < 50; ++rep) {
    const auto o = oracle::random_density(rng, 6, 1 + std::size_t(rep % 6));
    const DensityMatrix rho(testutil::from_mat(o));
    for (bool keep_a : {true, false}) {
      const auto want = oracle::partial_trace(o, 2, 3, keep_a);
      const auto got = partial_trace(rho, 2, 3, keep_a ? Subsystem::A : Subsystem::B);
      for (std::size_t i = 0; i < want.size(); ++i)
        for (std::size_t j = 0; j < want.size(); ++j)
          EXPECT_NEAR(got(Eigen::Index(i), Eigen::Index(j)), want[i][j], 1e-10);
      EXPECT_NEAR(got.matrix().trace(), 1.0, 1e-12);
    }
  }
  EXPECT_EQ(kind_of([] { partial_trace(DensityMatrix::maximally_mixed(6), 4, 2, Subsystem::A); }),
            ErrorKind::invalid_argument);
}

TEST(MutualInformation, ProductAndBell) {
  std::mt19937_64 rng(131);
  const auto product = tensor_product(random_rho(rng, 2, 2), random_rho(rng, 2, 1));
  EXPECT_NEAR(mutual_information(product, 2, 2), 0.0, 1e-9);
  EXPECT_NEAR(mutual_information(bell(), 2, 2), 2 * std::log(2.0), 1e-8);
  EXPECT_NEAR(mutual_information(bell(), 2, 2, EntropyBase::base2), 2.0, 1e-8);
}

TEST(MutualInformation, TensorModeOnMarketProductWindow) {
  // Group A always moves along one direction; its reduced state is pure and
  // the joint state is a product.
  std::mt19937_64 rng(137);
  std::normal_distribution<double> n(0, 1);
  std::vector<std::vector<double>> rows(5, std::vector<double>(30));
  for (std::size_t t = 0; t < 30; ++t) {
    const double s = n(rng);
    rows[0][t] = s;
    rows[1][t] = -2 * s;
    for (std::size_t i = 2; i < 5; ++i) rows[i][t] = n(rng);
  }
  const auto w = window_of(rows);
  const Partition p{{"S0", "S1"}, {"S2", "S3", "S4"}, PartitionMode::tensor_bipartite};
  EXPECT_NEAR(mutual_information(p, w), 0.0, 1e-9);
}

TEST(MutualInformation, TensorRoutesAgree) {
  std::mt19937_64 rng(139);
  for (int rep = 0; rep < 20; ++rep) {
    const auto a = random_columns(rng, 2 + std::size_t(rep % 4), 25), b = random_columns(rng, 3, 25);
    const double x = detail::tensor_mixture_mi(a, b, EntropyBase::natural, detail::TensorRoute::explicit_joint);
    const double g = detail::tensor_mixture_mi(a, b, EntropyBase::natural, detail::TensorRoute::gram);
    EXPECT_NEAR(x, g, 1e-10);
    EXPECT_GE(x, -1e-9);
  }
}

TEST(MutualInformation, SubgroupMixtureMatchesHandAssembly) {
  const auto wl = walsh();
  std::vector<double> b1(8), b2(8);
  for (std::size_t t = 0; t < 8; ++t) b1[t] = wl[0][t] + wl[2][t], b2[t] = wl[2][t] - wl[0][t] + 0.5 * wl[3][t];
  // b1 . b2 = -|w0|^2 + |w2|^2 = 0, so B is internally orthogonal too.
  const std::vector<std::vector<double>> rows{wl[0], wl[1], b1, b2};
  const auto w = window_of(rows);
  const Partition p{{"S0", "S1"}, {"S2", "S3"}, PartitionMode::subgroup_mixture};
  const double want = oracle_ensemble_entropy({wl[0], wl[1]}) + oracle_ensemble_entropy({b1, b2}) -
                      oracle_ensemble_entropy(rows);
  EXPECT_NEAR(mutual_information(p, w), want, 1e-10);

  // Disjoint orthogonal singletons: 0 + 0 - ln 2, returned as-is.
  const Partition single{{"S0"}, {"S1"}, PartitionMode::subgroup_mixture};
  EXPECT_NEAR(mutual_information(single, w), -std::log(2.0), 1e-12);
}

TEST(MutualInformation, PartitionErrors) {
  const auto w = window_of(walsh());
  EXPECT_EQ(kind_of([&] { mutual_information(Partition{{"S0"}, {"S0"}}, w); }), ErrorKind::invalid_argument);
  EXPECT_EQ(kind_of([&] { mutual_information(Partition{{}, {"S0"}}, w); }), ErrorKind::invalid_argument);
  EXPECT_EQ(kind_of([&] { mutual_information(Partition{{"ZZ"}, {"S0"}}, w); }), ErrorKind::insufficient_data);
}

TEST(Measurement, IdentityProjectorAndOracle) {
  std::mt19937_64 rng(149);
  const auto rho = random_rho(rng, 4, 3);
  EXPECT_LE((apply_measurement(rho, Matrix::Identity(4, 4)).matrix() - rho.matrix()).cwiseAbs().maxCoeff(), 1e-12);

  Matrix proj = Matrix::Zero(2, 2);
  proj(0, 0) = 1;
  EXPECT_EQ(apply_measurement(diag({0.5, 0.5}), proj).matrix(), Matrix(proj));

  std::normal_distribution<double> n(0, 1);
  oracle::Mat m = oracle::zeros(4, 4);
  for (auto& row : m)
    for (auto& x : row) x = n(rng);
  auto want = oracle::matmul(oracle::matmul(m, testutil::to_mat(rho.matrix())), oracle::transpose(m));
  double tr = 0;
  for (std::size_t i = 0; i < 4; ++i) tr += want[i][i];
  const auto got = apply_measurement(rho, testutil::from_mat(m));
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(got(Eigen::Index(i), Eigen::Index(j)), want[i][j] / tr, 1e-12);
  EXPECT_TRUE(check_density(got.matrix()).ok());

  Matrix kill = Matrix::Zero(2, 2);
  kill(1, 1) = 1;
  EXPECT_EQ(kind_of([&] { apply_measurement(diag({1.0, 0.0}), kill); }), ErrorKind::degenerate);
}

TEST(SpectralInvariants, OrthogonalConjugationInvariance) {
  std::mt19937_64 rng(151);
  for (std::size_t d = 2; d <= 16; d += 2) {
    const auto rho = random_rho(rng, d, 1 + d / 3);
    const auto base = summarize(rho);
    for (int rep = 0; rep < 200; ++rep) {
      const Matrix u = testutil::random_orthogonal(rng, d);
      Matrix c = u * rho.matrix() * u.transpose();
      c = 0.5 * (c + c.transpose()).eval();
      const auto s = summarize(DensityMatrix::from_construction(c));
      ASSERT_NEAR(s.entropy, base.entropy, 1e-8);
      ASSERT_NEAR(s.purity, base.purity, 1e-8);
      ASSERT_NEAR(s.eri, base.eri, 1e-8);
    }
  }
}

TEST(SpectralInvariants, Bounds) {
  std::mt19937_64 rng(157);
  for (int rep = 0; rep < 1000; ++rep) {
    const std::size_t d = 1 + std::size_t(rep % 16);
    const auto s = summarize(random_rho(rng, d, 1 + std::size_t(rep % 9)));
    ASSERT_GE(s.entropy, 0.0);
    ASSERT_LE(s.entropy, std::log(double(d)) + 1e-9);
    ASSERT_GE(s.purity, 1.0 / double(d) - 1e-12);
    ASSERT_LE(s.purity, 1.0 + 1e-12);
    ASSERT_GE(s.eri, -1e-12);
    ASSERT_LE(s.eri, 1.0 - 1.0 / double(d) + 1e-12);
    ASSERT_NEAR(s.eigenvalues.sum(), 1.0, 1e-10);
    for (Eigen::Index k = 1; k < s.eigenvalues.size(); ++k) ASSERT_GE(s.eigenvalues[k - 1], s.eigenvalues[k]);
  }
}

TEST(SpectralInvariants, DepolarizingMonotonicity) {
  std::mt19937_64 rng(163);
  const auto v = oracle::random_unit(rng, 4);
  const Matrix psi = pure_state_density(normalize_amplitude(std::span<const double>(v))).matrix();
  double prev_s = -1, prev_e = -1;
  for (int k = 0; k <= 20; ++k) {
    const double p = 0.05 * k;
    const DensityMatrix rho(p * Matrix::Identity(4, 4) / 4.0 + (1 - p) * psi);
    const double s = von_neumann_entropy(rho), e = eri(rho);
    EXPECT_GT(s, prev_s);
    EXPECT_GT(e, prev_e);
    prev_s = s, prev_e = e;
  }
}

TEST(SpectralInvariants, TensorSubadditivity) {
  std::mt19937_64 rng(167);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t da = 2 + std::size_t(rep % 3), db = 2 + std::size_t(rep % 4);
    const auto rho = random_rho(rng, da * db, 1 + std::size_t(rep % 10));
    const double sa = von_neumann_entropy(partial_trace(rho, Eigen::Index(da), Eigen::Index(db), Subsystem::A));
    const double sb = von_neumann_entropy(partial_trace(rho, Eigen::Index(da), Eigen::Index(db), Subsystem::B));
    EXPECT_LE(von_neumann_entropy(rho), sa + sb + 1e-9);
    const auto prod = tensor_product(random_rho(rng, da, 2), random_rho(rng, db, 3));
    EXPECT_NEAR(mutual_information(prod, Eigen::Index(da), Eigen::Index(db)), 0.0, 1e-9);
  }
}
