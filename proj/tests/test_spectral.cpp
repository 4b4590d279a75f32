#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mw/mw.hpp"
#include "support.hpp"

using namespace mw;

namespace {

TransitionMatrix two_state(double p, double q) {
  Matrix m(2, 2);
  m << 1.0 - p, p, q, 1.0 - q;
  return TransitionMatrix(m);
}

}  // namespace

// =============================================================================
// TransitionMatrix / Distribution invariants
// =============================================================================

TEST(TransitionMatrix, RejectsNonStochasticRows) {
  Matrix m(2, 2);
  m << 0.5, 0.6, 0.5, 0.5;
  EXPECT_THROW(TransitionMatrix{m}, Error);
  m << 1.5, -0.5, 0.5, 0.5;
  try {
    TransitionMatrix bad(m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotStochastic);
  }
}

TEST(TransitionMatrix, IrreducibilityBySupportGraph) {
  EXPECT_TRUE(zoo::cycle(5).is_irreducible());
  EXPECT_TRUE(zoo::bipartite_clique(6).is_irreducible());
  Matrix id = Matrix::Identity(3, 3);
  EXPECT_FALSE(TransitionMatrix(id).is_irreducible());
  // One-way edge into an absorbing state.
  Matrix m(2, 2);
  m << 0.5, 0.5, 0.0, 1.0;
  EXPECT_FALSE(TransitionMatrix(m).is_irreducible());
}

TEST(Distribution, Validation) {
  EXPECT_THROW((Distribution{0.5, 0.6}), Error);
  EXPECT_THROW((Distribution{1.5, -0.5}), Error);
  EXPECT_NO_THROW((Distribution{0.25, 0.75}));
}

// =============================================================================
// stationary_distribution
// =============================================================================

TEST(Stationary, CycleIsUniform) {
  const auto pi = stationary_distribution(zoo::cycle(4));
  for (std::size_t x = 0; x < 4; ++x) EXPECT_NEAR(pi[x], 0.25, 1e-14);
}

TEST(Stationary, TwoStateChain) {
  const auto pi = stationary_distribution(two_state(0.3, 0.1));
  EXPECT_NEAR(pi[0], 0.25, 1e-14);
  EXPECT_NEAR(pi[1], 0.75, 1e-14);
}

TEST(Stationary, PachinkoIsUniform) {
  const auto pi = stationary_distribution(zoo::pachinko(3, {0.4, 0.3, 0.2, 0.1}));
  for (std::size_t x = 0; x < 8; ++x) EXPECT_NEAR(pi[x], 1.0 / 8.0, 1e-14);
}

TEST(Stationary, ResidualOnRandomChains) {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    const auto p = test::random_reversible(rng, 3 + static_cast<std::size_t>(rep));
    const auto pi = stationary_distribution(p);
    const Vector residual = p.matrix().transpose() * pi.mass() - pi.mass();
    EXPECT_LE(residual.cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_GT(pi.mass().minCoeff(), 0.0);
  }
}

TEST(Stationary, NotIrreducible) {
  Matrix m(2, 2);
  m << 1.0, 0.0, 0.0, 1.0;
  try {
    stationary_distribution(TransitionMatrix(m));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotIrreducible);
  }
}

// =============================================================================
// check_reversible / symmetrize
// =============================================================================

TEST(Reversible, SymmetricChainUniformPi) {
  EXPECT_TRUE(check_reversible(zoo::cycle(6), Distribution::uniform(6)));
}

TEST(Reversible, TwoStateDetailedBalance) {
  // 0.25 * 0.3 == 0.75 * 0.1
  EXPECT_TRUE(check_reversible(two_state(0.3, 0.1), Distribution{0.25, 0.75}));
}

TEST(Reversible, DirectedCycleIsNot) {
  Matrix m(3, 3);
  m << 0, 1, 0, 0, 0, 1, 1, 0, 0;
  EXPECT_FALSE(check_reversible(TransitionMatrix(m), Distribution::uniform(3)));
}

TEST(Symmetrize, SymmetricChainIsUnchanged) {
  const auto p = zoo::cycle(5);
  EXPECT_LE((symmetrize(p, Distribution::uniform(5)) - p.matrix()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Symmetrize, TwoStateOffDiagonal) {
  const Matrix q = symmetrize(two_state(0.3, 0.1), Distribution{0.25, 0.75});
  // sqrt(pi_0 / pi_1) * p = sqrt(1/3) * 0.3 = sqrt(0.03)
  EXPECT_NEAR(q(0, 1), std::sqrt(0.03), 1e-15);
  EXPECT_NEAR(q(1, 0), std::sqrt(0.03), 1e-15);
}

TEST(Symmetrize, IdentityChain) {
  const Matrix q = symmetrize(TransitionMatrix(Matrix::Identity(3, 3)), Distribution::uniform(3));
  EXPECT_TRUE(q.isApprox(Matrix::Identity(3, 3)));
}

TEST(Symmetrize, RejectsNonReversible) {
  Matrix m(3, 3);
  m << 0, 1, 0, 0, 0, 1, 1, 0, 0;
  try {
    symmetrize(TransitionMatrix(m), Distribution::uniform(3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotReversible);
  }
}

// =============================================================================
// spectral_decomposition
// =============================================================================

TEST(Spectral, CycleFour) {
  const auto s = spectral_decomposition(zoo::cycle(4));
  EXPECT_LE(test::multiset_distance(test::sorted(s.eigenvalues), {-1, 0, 0, 1}), 1e-12);
}

TEST(Spectral, BipartiteCliqueSix) {
  const auto s = spectral_decomposition(zoo::bipartite_clique(6));
  EXPECT_LE(test::multiset_distance(test::sorted(s.eigenvalues), {-1, 0, 0, 0, 0, 1}), 1e-12);
}

TEST(Spectral, HypercubeTwo) {
  const auto s = spectral_decomposition(zoo::hypercube(2));
  EXPECT_LE(test::multiset_distance(test::sorted(s.eigenvalues), {-1, 0, 0, 1}), 1e-12);
}

TEST(Spectral, NonReversibleRejected) {
  Matrix m(3, 3);
  m << 0.1, 0.8, 0.1, 0.1, 0.1, 0.8, 0.8, 0.1, 0.1;
  try {
    spectral_decomposition(TransitionMatrix(m));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotReversible);
    EXPECT_STREQ(e.what(), "chain not reversible");
  }
}

TEST(Spectral, TypeInvariantsOnRandomChains) {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t d = 2 + static_cast<std::size_t>(rep) % 20;
    const auto p = test::random_reversible(rng, d);
    const auto s = spectral_decomposition(p);
    const Vector& pi = s.stationary.mass();

    EXPECT_DOUBLE_EQ(s.eigenvalue(0), 1.0);
    for (std::size_t i = 0; i < d; ++i) {
      const Vector ui = s.left_vector(i);
      // u_i P = lambda_i u_i
      EXPECT_LE((p.matrix().transpose() * ui - s.eigenvalue(i) * ui).cwiseAbs().maxCoeff(), 1e-8);
      // u_i = Pi v_i
      EXPECT_LE((ui - pi.cwiseProduct(s.right_vector(i))).cwiseAbs().maxCoeff(), 1e-12);
      if (i > 0) {
        EXPECT_NEAR(ui.sum(), 0.0, 1e-8);
      }
      for (std::size_t j = 0; j < d; ++j) {
        EXPECT_NEAR(pi_inner(ui, s.left_vector(j), s.stationary), i == j ? 1.0 : 0.0, 1e-8);
      }
      if (i > 0) {
        EXPECT_GE(s.eigenvalue(i - 1), s.eigenvalue(i));
      }
    }
    // abs_order is a permutation with non-increasing |lambda| and rank 0 = stationary mode.
    std::vector<std::size_t> seen(d, 0);
    for (auto i : s.abs_order) ++seen.at(i);
    for (auto c : seen) EXPECT_EQ(c, 1U);
    EXPECT_EQ(s.abs_order[0], 0U);
    for (std::size_t k = 1; k < d; ++k) {
      EXPECT_GE(std::abs(s.eigenvalue(s.abs_order[k - 1])) + kEigenTieTol, std::abs(s.eigenvalue(s.abs_order[k])));
    }
  }
}

TEST(Spectral, ReconstructionWithinTolerance) {
  std::mt19937_64 rng(8);
  for (std::size_t d : {2, 5, 16, 33, 64}) {
    const auto p = test::random_reversible(rng, d);
    const auto s = spectral_decomposition(p);
    EXPECT_LE((test::reconstruct(s) - p.matrix()).cwiseAbs().maxCoeff(), 1e-8) << "d=" << d;
  }
}

TEST(Spectral, AbsOrderTieBreaksTowardPositive) {
  // Bipartite clique: |1| == |-1|, so rank 1 must be the -1 eigenvalue after the stationary mode.
  const auto s = spectral_decomposition(zoo::bipartite_clique(6));
  EXPECT_NEAR(s.eigenvalue(s.second_index()), -1.0, 1e-12);
  // Lazy cycle d=4, q=1/2: eigenvalues {1, 1/2, 1/2, 0}.
  const auto l = spectral_decomposition(lazy(zoo::cycle(4), 0.5));
  EXPECT_NEAR(l.eigenvalue(l.second_index()), 0.5, 1e-12);
  EXPECT_NEAR(l.eigenvalue(l.last_index()), 0.0, 1e-12);
  // The two 1/2 eigenvalues are ranked by original index.
  EXPECT_LT(l.abs_order[1], l.abs_order[2]);
}

TEST(Spectral, SignConventionFirstNonzeroPositive) {
  const auto s = spectral_decomposition(zoo::line(7));
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Vector u = s.left_vector(i);
    const double scale = u.cwiseAbs().maxCoeff();
    for (Eigen::Index x = 0; x < u.size(); ++x) {
      if (std::abs(u[x]) > 1e-10 * scale) {
        EXPECT_GT(u[x], 0.0);
        break;
      }
    }
  }
}

// =============================================================================
// lazy / evolve
// =============================================================================

TEST(Lazy, ZeroIsIdentityMap) {
  const auto p = zoo::cycle(5);
  EXPECT_EQ(lazy(p, 0.0).matrix(), p.matrix());
}

TEST(Lazy, OneIsIdentityChain) {
  const auto l = lazy(zoo::cycle(5), 1.0);
  EXPECT_EQ(l.matrix(), Matrix::Identity(5, 5));
}

TEST(Lazy, CycleHalf) {
  const auto s = spectral_decomposition(lazy(zoo::cycle(4), 0.5));
  EXPECT_LE(test::multiset_distance(test::sorted(s.eigenvalues), {0.0, 0.5, 0.5, 1.0}), 1e-12);
}

TEST(Lazy, AffineSpectrumMap) {
  std::mt19937_64 rng(21);
  for (int rep = 0; rep < 10; ++rep) {
    const auto p = test::random_reversible(rng, 10);
    const double q = test::uniform(rng);
    const auto base = spectral_decomposition(p);
    const auto l = spectral_decomposition(lazy(p, q));
    std::vector<double> expected;
    for (auto v : base.eigenvalues) expected.push_back((1.0 - q) * v + q);
    EXPECT_LE(test::multiset_distance(test::sorted(l.eigenvalues), expected), 1e-8);
    EXPECT_LE((l.stationary.mass() - base.stationary.mass()).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Lazy, RejectsOutOfRange) {
  EXPECT_THROW(lazy(zoo::cycle(4), -0.1), Error);
  EXPECT_THROW(lazy(zoo::cycle(4), 1.1), Error);
}

TEST(Evolve, ZeroStepsUnchanged) {
  const Distribution mu{0.2, 0.3, 0.5};
  EXPECT_EQ(evolve(mu, zoo::cycle(3), 0).mass(), mu.mass());
}

TEST(Evolve, BipartiteCliquePointMassToUniformOnOtherSide) {
  const auto mu = evolve(Distribution::point_mass(6, 0), zoo::bipartite_clique(6), 1);
  for (std::size_t x = 0; x < 3; ++x) EXPECT_EQ(mu[x], 0.0);
  for (std::size_t x = 3; x < 6; ++x) EXPECT_NEAR(mu[x], 1.0 / 3.0, 1e-15);
}

TEST(Evolve, StationaryIsFixed) {
  const auto p = zoo::line(6);
  const auto pi = stationary_distribution(p);
  for (std::size_t t : {1, 7, 50}) {
    EXPECT_LE((evolve(pi, p, t).mass() - pi.mass()).cwiseAbs().maxCoeff(), 1e-13);
  }
}

TEST(Evolve, DimensionMismatch) {
  try {
    evolve(Distribution{0.5, 0.5}, zoo::cycle(3), 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DimensionMismatch);
  }
}

TEST(Evolve, CoefficientFormMatchesSpectrum) {
  std::mt19937_64 rng(5);
  const auto p = test::random_reversible(rng, 9);
  const auto s = spectral_decomposition(p);
  const auto mu = test::random_distribution(rng, 9);
  for (std::size_t t : {0, 1, 3, 10}) {
    const auto mut = evolve(mu, p, t);
    for (std::size_t i = 0; i < 9; ++i) {
      const double lhs = pi_inner(s.left_vector(i), mut.mass(), s.stationary);
      const double rhs = std::pow(s.eigenvalue(i), static_cast<double>(t)) *
                         pi_inner(s.left_vector(i), mu.mass(), s.stationary);
      EXPECT_NEAR(lhs, rhs, 1e-8);
    }
  }
}

TEST(Evolve, AperiodicTotalVariationDecreases) {
  for (const auto& p : {zoo::cycle(7), lazy(zoo::line(8), 0.3), zoo::pachinko(3, {0.4, 0.3, 0.2, 0.1}),
                        zoo::hypercube_product({2, {0.5, 0.5}, {0.3, 0.6}, {0.2, 0.5}})}) {
    const auto pi = stationary_distribution(p);
    auto mu = Distribution::point_mass(p.size(), 0);
    double prev = total_variation(mu, pi);
    for (int t = 1; t <= 200; ++t) {
      mu = evolve(mu, p, 1);
      const double tv = total_variation(mu, pi);
      EXPECT_LE(tv, prev + 1e-15) << "t=" << t;
      prev = tv;
    }
    EXPECT_LT(prev, 1e-6);
  }
}
