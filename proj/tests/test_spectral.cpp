#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "hbvwave/spectral.hpp"
#include "hbvwave/wave.hpp"
#include "oracles.hpp"

using namespace hbvwave;
using cd = std::complex<double>;

namespace {

SquareMatrix reference_submatrix() { return wave_submatrix(WaveParams{oracle::reference_params(), 20.0}); }

std::vector<cd> eigen_oracle(const SquareMatrix& a) {
  const std::size_t n = a.size();
  Eigen::MatrixXd m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = a(i, j);
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
  std::vector<cd> out;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) out.push_back(es.eigenvalues()(i));
  return out;
}

bool in_union(const std::vector<Disc>& discs, cd z, double tol) {
  return std::any_of(discs.begin(), discs.end(), [&](const Disc& d) { return d.contains(z, tol); });
}

}  // namespace

TEST(SquareMatrix, DimensionLimits) {
  EXPECT_THROW(SquareMatrix(1), InvalidArgument);
  EXPECT_THROW(SquareMatrix(17), InvalidArgument);
  EXPECT_NO_THROW(SquareMatrix(16));
  EXPECT_THROW(SquareMatrix::from_rows({{1, 2}, {3}}), InvalidArgument);
}

TEST(SquareMatrix, NonFiniteRejected) {
  SquareMatrix a = SquareMatrix::identity(2);
  a(0, 1) = std::nan("");
  EXPECT_THROW(eigenvalues(a), InvalidArgument);
  EXPECT_THROW(gershgorin_discs(a), InvalidArgument);
}

TEST(DeletedRowSums, Identity) {
  EXPECT_EQ(deleted_row_sums(SquareMatrix::identity(3)), (std::vector<double>{0, 0, 0}));
}

TEST(DeletedRowSums, AllOnes) {
  EXPECT_EQ(deleted_row_sums(SquareMatrix{{1, 1}, {1, 1}}), (std::vector<double>{1, 1}));
}

TEST(DeletedRowSums, ReferenceSubmatrix) {
  const auto r = deleted_row_sums(reference_submatrix());
  ASSERT_EQ(r.size(), 4u);
  EXPECT_NEAR(r[0], 1.0 / 20.0, 1e-15);
  EXPECT_NEAR(r[1], 30.0 / 20.0, 1e-15);
  EXPECT_NEAR(r[2], 1.0, 1e-15);
  EXPECT_NEAR(r[3], 195.0, 1e-12);
}

TEST(GershgorinDiscs, Diagonal) {
  const std::vector<double> d{-2, 5};
  const auto discs = gershgorin_discs(SquareMatrix::diagonal(d));
  EXPECT_EQ(discs, (std::vector<Disc>{{-2, 0}, {5, 0}}));
}

TEST(GershgorinDiscs, AbsoluteRowSum) {
  const auto discs = gershgorin_discs(SquareMatrix{{1, 0, 0}, {0, 0, 0}, {0, 2, -3}});
  EXPECT_EQ(discs[2], (Disc{-3, 2}));
  const auto row = gershgorin_discs(SquareMatrix{{0, 2, -3}, {0, 1, 0}, {0, 0, 1}});
  EXPECT_EQ(row[0], (Disc{0, 5}));
}

TEST(GershgorinDiscs, ReferenceSubmatrix) {
  const auto discs = gershgorin_discs(reference_submatrix());
  const double centers[] = {-1.075, -2.525, 0.0, 200.0};
  const double radii[] = {0.05, 1.5, 1.0, 195.0};
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_NEAR(discs[i].center, centers[i], 1e-12);
    EXPECT_NEAR(discs[i].radius, radii[i], 1e-12);
  }
}

TEST(ConnectedComponents, Intervals) {
  const std::vector<Disc> discs{{0, 1}, {3, 1}, {3.5, 0.2}};
  const auto part = connected_components(discs);
  EXPECT_EQ(part.groups, (std::vector<std::vector<std::size_t>>{{0}, {1, 2}}));
}

TEST(ConnectedComponents, ReferenceDiscs) {
  const auto discs = gershgorin_discs(reference_submatrix());
  const auto part = connected_components(discs);
  EXPECT_EQ(part.groups, (std::vector<std::vector<std::size_t>>{{0, 1}, {2}, {3}}));
}

TEST(ConnectedComponents, TangencyJoins) {
  const std::vector<Disc> discs{{0, 1}, {2, 1}, {10, 0}};
  const auto part = connected_components(discs);
  EXPECT_EQ(part.groups, (std::vector<std::vector<std::size_t>>{{0, 1}, {2}}));
  EXPECT_EQ(part.group_of(1), 0u);
}

TEST(ConnectedComponents, SortedByLeftmostExtent) {
  const std::vector<Disc> discs{{10, 1}, {-5, 0.5}, {0, 3}};
  const auto part = connected_components(discs);
  EXPECT_EQ(part.groups, (std::vector<std::vector<std::size_t>>{{1}, {2}, {0}}));
}

TEST(Eigenvalues, DiagonalExact) {
  const std::vector<double> d{3, 1, 2};
  const auto eig = eigenvalues(SquareMatrix::diagonal(d));
  EXPECT_EQ(eig, (std::vector<cd>{1, 2, 3}));
}

TEST(Eigenvalues, Rotation) {
  const auto eig = eigenvalues(SquareMatrix{{0, 1}, {-1, 0}});
  ASSERT_EQ(eig.size(), 2u);
  EXPECT_NEAR(eig[0].real(), 0.0, 1e-15);
  EXPECT_NEAR(eig[1].real(), 0.0, 1e-15);
  EXPECT_NEAR(eig[0].imag(), -1.0, 1e-15);
  EXPECT_NEAR(eig[1].imag(), 1.0, 1e-15);
}

TEST(Eigenvalues, ReferenceJacobianSpectrum) {
  const auto eig = eigenvalues(jacobian_disease_free(WaveParams{oracle::reference_params(), 20.0}));
  ASSERT_EQ(eig.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_NEAR(eig[i].real(), oracle::reference::kJacobianSpectrum[i],
                1e-10 * std::max(1.0, std::abs(oracle::reference::kJacobianSpectrum[i])));
    EXPECT_EQ(eig[i].imag(), 0.0);
  }
}

TEST(Eigenvalues, MinusInverseSpeedAlwaysPresent) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.1, 50.0);
  for (int k = 0; k < 200; ++k) {
    const WaveParams wp{{u(rng), u(rng), u(rng), u(rng), u(rng), u(rng) / 10}, u(rng)};
    const auto eig = eigenvalues(jacobian_disease_free(wp));
    const double target = -1.0 / wp.c;
    const auto best = std::min_element(eig.begin(), eig.end(), [&](cd a, cd b) {
      return std::abs(a - target) < std::abs(b - target);
    });
    EXPECT_LT(std::abs(*best - target), 1e-9 * std::max(1.0, jacobian_disease_free(wp).norm_inf()));
  }
}

TEST(Determinant, KnownValues) {
  EXPECT_DOUBLE_EQ(determinant(SquareMatrix{{1, 2}, {3, 4}}), -2.0);
  EXPECT_NEAR(determinant(reference_submatrix()), oracle::reference::kSubmatrixDet, 1e-12);
  EXPECT_EQ(determinant(SquareMatrix{{1, 2}, {2, 4}}), 0.0);
}

TEST(UnstableEigenvector, Diagonal) {
  const EigenPair p = unstable_eigenvector(SquareMatrix{{-1, 0}, {0, 2}});
  EXPECT_DOUBLE_EQ(p.value, 2.0);
  EXPECT_NEAR(std::abs(p.vector[0]), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(p.vector[1]), 1.0, 1e-15);
}

TEST(UnstableEigenvector, Errors) {
  try {
    unstable_eigenvector(SquareMatrix{{1, 0}, {0, 2}});
    FAIL();
  } catch (const MultipleUnstableDirections& e) {
    EXPECT_EQ(e.count(), 2u);
  }
  EXPECT_THROW(unstable_eigenvector(SquareMatrix{{-1, 0}, {0, -2}}), NoUnstableDirection);
  // A complex pair with positive real part counts as two directions.
  EXPECT_THROW(unstable_eigenvector(SquareMatrix{{1, 1}, {-1, 1}}), MultipleUnstableDirections);
}

TEST(UnstableEigenvector, SignAndResidual) {
  const SquareMatrix a{{-3, 1, 0}, {0, 0.5, -2}, {0, 0, -1}};
  const EigenPair p = unstable_eigenvector(a, 1);
  EXPECT_NEAR(p.value, 0.5, 1e-14);
  EXPECT_GT(p.vector[1], 0.0);
  EXPECT_LE(eigen_residual(a, p.value, p.vector), 1e-9 * a.norm_inf());
  double norm = 0;
  for (double v : p.vector) norm += v * v;
  EXPECT_NEAR(norm, 1.0, 1e-14);
}

// Two real positive eigenvalues whenever R0 > 1: one in G4, one in G3.
TEST(UnstableEigenvector, ReferenceJacobianHasTwoPositiveDirections) {
  const SquareMatrix jac = jacobian_disease_free(WaveParams{oracle::reference_params(), 20.0});
  const auto pairs = unstable_eigenpairs(jac, 3);
  ASSERT_EQ(pairs.size(), 2u);
  EXPECT_NEAR(pairs[0].value, oracle::reference::kJacobianSpectrum[3], 1e-12);
  EXPECT_NEAR(pairs[1].value, oracle::reference::kJacobianSpectrum[4], 1e-9);
  EXPECT_GE(pairs[1].value, 5.0);
  EXPECT_LE(pairs[1].value, 395.0);
  for (const auto& p : pairs) {
    EXPECT_GT(p.vector[3], 0.0);
    EXPECT_LE(eigen_residual(jac, p.value, p.vector), 1e-9 * jac.norm_inf());
  }
  EXPECT_THROW(unstable_eigenvector(jac, 3), MultipleUnstableDirections);
}

// ---------------------------------------------------------------- properties

TEST(SpectralProperty, MatchesEigenOracle) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::size_t> dim(2, 8);
  for (int k = 0; k < 2000; ++k) {
    const SquareMatrix a = oracle::random_matrix(rng, dim(rng), k % 2 == 1);
    const auto ours = eigenvalues(a);
    auto ref = eigen_oracle(a);
    ASSERT_EQ(ours.size(), ref.size());
    for (const auto& z : ours) {
      const auto it = std::min_element(ref.begin(), ref.end(), [&](cd x, cd y) { return std::abs(x - z) < std::abs(y - z); });
      EXPECT_LT(std::abs(*it - z), 1e-6 * std::max(1.0, a.norm_inf()));
      ref.erase(it);
    }
  }
}

TEST(SpectralProperty, GershgorinContainmentAndCounting) {
  std::mt19937_64 rng(20240618);
  std::uniform_int_distribution<std::size_t> dim(2, 8);
  std::size_t containment_violations = 0, counting_violations = 0, multi_group = 0;
  for (int k = 0; k < 10000; ++k) {
    const SquareMatrix a = oracle::random_matrix(rng, dim(rng), k % 3 == 0);
    const auto eig = eigenvalues(a);
    const auto discs = gershgorin_discs(a);
    for (const auto& z : eig) containment_violations += !in_union(discs, z, 1e-8);
    const auto part = connected_components(discs);
    if (part.groups.size() < 2) continue;
    ++multi_group;
    for (const auto& g : part.groups) {
      const auto inside = std::count_if(eig.begin(), eig.end(), [&](cd z) { return group_contains(discs, g, z, 1e-8); });
      counting_violations += static_cast<std::size_t>(inside) != g.size();
    }
  }
  EXPECT_EQ(containment_violations, 0u);
  EXPECT_EQ(counting_violations, 0u);
  EXPECT_GT(multi_group, 2000u);
}

TEST(SpectralProperty, ConjugateClosureAndOrdering) {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<std::size_t> dim(2, 8);
  for (int k = 0; k < 2000; ++k) {
    const auto eig = eigenvalues(oracle::random_matrix(rng, dim(rng), false));
    for (std::size_t i = 0; i + 1 < eig.size(); ++i) {
      EXPECT_TRUE(eig[i].real() < eig[i + 1].real() ||
                  (eig[i].real() == eig[i + 1].real() && eig[i].imag() <= eig[i + 1].imag()));
    }
    for (const auto& z : eig) {
      if (z.imag() == 0.0) continue;
      EXPECT_TRUE(std::any_of(eig.begin(), eig.end(), [&](cd w) { return w == std::conj(z); }));
    }
  }
}

TEST(SpectralProperty, CharacteristicPolynomialResidual) {
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<std::size_t> dim(2, 8);
  for (int k = 0; k < 2000; ++k) {
    const SquareMatrix a = oracle::random_matrix(rng, dim(rng), k % 2 == 0);
    const double norm = a.norm_inf();
    for (const auto& z : eigenvalues(a)) {
      const double scale = std::pow(norm + std::abs(z), static_cast<double>(a.size()));
      EXPECT_LE(oracle::char_poly_abs(a.rows(), z), 1e-10 * scale);
    }
  }
}

TEST(SpectralProperty, DiagonalEntriesExact) {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(-100, 100);
  for (int k = 0; k < 500; ++k) {
    std::vector<double> d(2 + k % 15);
    for (auto& v : d) v = u(rng);
    const auto eig = eigenvalues(SquareMatrix::diagonal(d));
    std::sort(d.begin(), d.end());
    for (std::size_t i = 0; i < d.size(); ++i) EXPECT_EQ(eig[i], cd(d[i], 0.0));
  }
}
