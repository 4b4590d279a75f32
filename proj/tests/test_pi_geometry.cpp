#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "mw/mw.hpp"
#include "support.hpp"

using namespace mw;

// =============================================================================
// pi_inner / pi_norm
// =============================================================================

TEST(PiInner, PiWithItselfIsOne) {
  const Distribution pi{0.1, 0.2, 0.3, 0.4};
  EXPECT_NEAR(pi_inner(pi.mass(), pi.mass(), pi), 1.0, 1e-15);
  EXPECT_NEAR(pi_norm(pi.mass(), pi), 1.0, 1e-15);
}

TEST(PiInner, PiAgainstAnyUnitSumVector) {
  std::mt19937_64 rng(1);
  const auto pi = test::random_distribution(rng, 6, 0.1);
  for (int rep = 0; rep < 10; ++rep) {
    Vector w = Vector::Random(6);
    w /= w.sum();
    EXPECT_NEAR(pi_inner(pi.mass(), w, pi), 1.0, 1e-12);
  }
}

TEST(PiInner, DisjointSupports) {
  Vector u(2), w(2);
  u << 1, 0;
  w << 0, 1;
  EXPECT_EQ(pi_inner(u, w, Distribution{0.5, 0.5}), 0.0);
}

TEST(PiInner, ZeroVectorHasZeroNorm) {
  EXPECT_EQ(pi_norm(Vector::Zero(3), Distribution::uniform(3)), 0.0);
}

TEST(PiInner, NormOfDifferenceIsChiSquare) {
  std::mt19937_64 rng(2);
  for (int rep = 0; rep < 20; ++rep) {
    const auto pi = test::random_distribution(rng, 7, 0.05);
    const auto mu = test::random_distribution(rng, 7);
    const double n = pi_norm(mu.mass() - pi.mass(), pi);
    EXPECT_NEAR(n * n, chi_square(mu, pi), 1e-12);
  }
}

TEST(PiInner, Errors) {
  try {
    pi_inner(Vector::Ones(2), Vector::Ones(2), Distribution{1.0, 0.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ZeroStationaryMass);
  }
  try {
    pi_inner(Vector::Ones(3), Vector::Ones(2), Distribution{0.5, 0.5});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DimensionMismatch);
  }
}

// =============================================================================
// spectral_coefficients
// =============================================================================

TEST(Coefficients, StationaryIsFirstBasisVector) {
  const auto s = spectral_decomposition(zoo::line(6));
  const auto c = spectral_coefficients(s.stationary, s);
  EXPECT_NEAR(c.alphas[0], 1.0, 1e-12);
  for (Eigen::Index i = 1; i < c.alphas.size(); ++i) EXPECT_NEAR(c.alphas[i], 0.0, 1e-12);
}

TEST(Coefficients, AlignedPerturbation) {
  const auto s = spectral_decomposition(zoo::line(6));
  const std::size_t i2 = s.second_index();
  const double alpha = 0.01;
  const Distribution mu(s.stationary.mass() + alpha * s.left_vector(i2));
  const auto c = spectral_coefficients(mu, s);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double expected = i == 0 ? 1.0 : (i == i2 ? alpha : 0.0);
    EXPECT_NEAR(c.alphas[static_cast<Eigen::Index>(i)], expected, 1e-12);
  }
}

TEST(Coefficients, CycleFourPointMassMatchesDirectInnerProducts) {
  const auto s = spectral_decomposition(zoo::cycle(4));
  const auto mu = Distribution::point_mass(4, 0);
  const auto c = spectral_coefficients(mu, s);
  for (std::size_t i = 0; i < 4; ++i) {
    const double direct = pi_inner(s.left_vector(i), mu.mass(), s.stationary);
    EXPECT_NEAR(c.alphas[static_cast<Eigen::Index>(i)], direct, 1e-14);
    // <u_i, delta_0>_pi = u_{i,0} / pi_0
    EXPECT_NEAR(c.alphas[static_cast<Eigen::Index>(i)], s.left(0, static_cast<Eigen::Index>(i)) / 0.25, 1e-14);
  }
}

TEST(Coefficients, InvariantsOnRandomChains) {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 25; ++rep) {
    const std::size_t d = 2 + static_cast<std::size_t>(rep);
    const auto p = test::random_reversible(rng, d);
    const auto s = spectral_decomposition(p);
    const auto mu = test::random_distribution(rng, d);
    const auto c = spectral_coefficients(mu, s);
    EXPECT_NEAR(c.alphas[0], 1.0, 1e-10);
    EXPECT_LE((c.reconstruct() - mu.mass()).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(Coefficients, DimensionMismatch) {
  const auto s = spectral_decomposition(zoo::cycle(4));
  EXPECT_THROW(spectral_coefficients(Distribution::uniform(3), s), Error);
}

// =============================================================================
// decay_distance_sq
// =============================================================================

TEST(Decay, IdenticalPairIsZero) {
  const auto s = spectral_decomposition(zoo::line(5));
  const Distribution mu{0.1, 0.2, 0.3, 0.2, 0.2};
  for (std::size_t t : {0, 1, 10}) EXPECT_EQ(decay_distance_sq(mu, mu, s, t), 0.0);
}

TEST(Decay, AlignedPairClosedForm) {
  const auto s = spectral_decomposition(zoo::line(7));
  for (std::size_t rank = 1; rank < s.size(); ++rank) {
    const std::size_t i = s.by_abs_rank(rank);
    const double alpha = 0.02;
    const Distribution mu(s.stationary.mass() + alpha * s.left_vector(i));
    const Distribution mp(s.stationary.mass() - alpha * s.left_vector(i));
    for (std::size_t t : {0, 1, 3, 8}) {
      const double expected = 4.0 * alpha * alpha * std::pow(s.eigenvalue(i), 2.0 * static_cast<double>(t));
      EXPECT_NEAR(decay_distance_sq(mu, mp, s, t), expected, 1e-14) << "rank " << rank << " t " << t;
    }
  }
}

TEST(Decay, InitialIsPiDistance) {
  std::mt19937_64 rng(4);
  const auto p = test::random_reversible(rng, 8);
  const auto s = spectral_decomposition(p);
  const auto mu = test::random_distribution(rng, 8);
  const auto mp = test::random_distribution(rng, 8);
  const double n = pi_norm(mu.mass() - mp.mass(), s.stationary);
  EXPECT_NEAR(decay_distance_sq(mu, mp, s, 0), n * n, 1e-12 * std::max(1.0, n * n));
}

TEST(Decay, RandomChainMatchesDirectEvolution) {
  std::mt19937_64 rng(5);
  const auto p = test::random_reversible(rng, 8);
  const auto s = spectral_decomposition(p);
  const auto mu = test::random_distribution(rng, 8);
  const auto mp = test::random_distribution(rng, 8);
  EXPECT_NEAR(decay_distance_sq(mu, mp, s, 7), test::direct_decay(mu, mp, p, s.stationary, 7), 1e-10);
}

TEST(Decay, OracleEquivalenceOnZooChains) {
  std::mt19937_64 rng(6);
  const std::vector<TransitionMatrix> chains = {
      zoo::cycle(8),
      zoo::cycle(13),
      zoo::line(10),
      zoo::bipartite_clique(8),
      zoo::hypercube(4),
      zoo::hypercube_product({3, {0.2, 0.3, 0.5}, {0.3, 0.6, 0.1}, {0.2, 0.5, 0.9}}),
      zoo::blockmodel2({16, 4, 2}),
      zoo::pachinko(4, test::random_betas(rng, 4)),
      zoo::random_chain({32, 9, zoo::WeightLaw::Exponential1}),
  };
  for (const auto& p : chains) {
    const auto s = spectral_decomposition(p);
    for (int rep = 0; rep < 5; ++rep) {
      const auto mu = test::random_distribution(rng, p.size());
      const auto mp = test::random_distribution(rng, p.size());
      const auto profile = decay_profile(mu, mp, s);
      const double scale = std::max(1.0, profile.initial());
      for (std::size_t t = 0; t <= 50; ++t) {
        EXPECT_LE(std::abs(profile.at(t) - test::direct_decay(mu, mp, p, s.stationary, t)), 1e-10 * scale)
            << "d=" << p.size() << " t=" << t;
      }
    }
  }
}

TEST(Decay, SpectralSandwich) {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 20; ++rep) {
    const auto p = test::random_reversible(rng, 10);
    const auto s = spectral_decomposition(p);
    const auto mu = test::random_distribution(rng, 10);
    const auto mp = test::random_distribution(rng, 10);
    const double d0 = decay_distance_sq(mu, mp, s, 0);
    const double l2 = std::abs(s.eigenvalue(s.second_index()));
    const double ld = std::abs(s.eigenvalue(s.last_index()));
    for (std::size_t t = 0; t <= 30; ++t) {
      const double dt = decay_distance_sq(mu, mp, s, t);
      const double e = 2.0 * static_cast<double>(t);
      EXPECT_LE(dt, std::pow(l2, e) * d0 * (1 + 1e-10) + 1e-300);
      EXPECT_GE(dt * (1 + 1e-10), std::pow(ld, e) * d0);
    }
  }
}

TEST(Decay, BasisInvarianceUnderEigenspaceRotation) {
  // Chains with repeated eigenvalues: cycle (pairs), hypercube (binomial), pachinko (dyadic).
  std::mt19937_64 rng(8);
  const std::vector<TransitionMatrix> chains = {zoo::cycle(9), zoo::hypercube(4),
                                                zoo::pachinko(3, test::random_betas(rng, 3))};
  for (const auto& p : chains) {
    const auto s = spectral_decomposition(p);
    auto rotated = s;
    const auto d = static_cast<Eigen::Index>(s.size());
    Eigen::Index start = 0;
    while (start < d) {
      Eigen::Index end = start + 1;
      while (end < d && std::abs(s.eigenvalues[end] - s.eigenvalues[start]) <= 1e-9) ++end;
      const Eigen::Index m = end - start;
      if (m > 1) {
        // Random orthogonal m x m from the QR of a Gaussian matrix.
        Matrix g(m, m);
        std::normal_distribution<double> nd;
        for (Eigen::Index i = 0; i < m; ++i)
          for (Eigen::Index j = 0; j < m; ++j) g(i, j) = nd(rng);
        const Matrix r = Eigen::HouseholderQR<Matrix>(g).householderQ();
        rotated.left.middleCols(start, m) = s.left.middleCols(start, m) * r;
        rotated.right.middleCols(start, m) = s.right.middleCols(start, m) * r;
      }
      start = end;
    }
    for (int rep = 0; rep < 5; ++rep) {
      const auto mu = test::random_distribution(rng, p.size());
      const auto mp = test::random_distribution(rng, p.size());
      for (std::size_t t : {0, 1, 2, 5, 11}) {
        EXPECT_NEAR(decay_distance_sq(mu, mp, rotated, t), decay_distance_sq(mu, mp, s, t), 1e-10);
      }
    }
  }
}

TEST(Decay, DeadModesVanishAfterOneStep) {
  // Bipartite clique: only the -1 mode survives t >= 1.
  const auto s = spectral_decomposition(zoo::bipartite_clique(6));
  const Distribution mu{0.3, 0.1, 0.1, 0.2, 0.2, 0.1};
  const Distribution mp{0.1, 0.2, 0.2, 0.1, 0.1, 0.3};
  // Same mass on the left side, so nothing is left after one step.
  EXPECT_GT(decay_distance_sq(mu, mp, s, 0), 0.0);
  EXPECT_EQ(decay_distance_sq(mu, mp, s, 1), 0.0);
  EXPECT_EQ(decay_distance_sq(mu, mp, s, 7), 0.0);
}

TEST(DecayProfile, ModeFactor) {
  EXPECT_EQ(DecayProfile::mode_factor(0.0, 0), 1.0);
  EXPECT_EQ(DecayProfile::mode_factor(0.0, 1), 0.0);
  EXPECT_EQ(DecayProfile::mode_factor(1e-14, 1), 0.0);
  EXPECT_EQ(DecayProfile::mode_factor(-1.0, 1000), 1.0);
  EXPECT_DOUBLE_EQ(DecayProfile::mode_factor(-0.5, 2), 1.0 / 16.0);
}

TEST(DecayProfile, PersistentMass) {
  const DecayProfile p({{-1.0, 0.3}, {0.5, 0.2}, {1.0 - 1e-15, 0.1}});
  EXPECT_NEAR(p.persistent(), 0.4, 1e-15);
  EXPECT_NEAR(p.initial(), 0.6, 1e-15);
}
