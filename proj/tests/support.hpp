#pragma once

// Shared generators and independent oracles for the test suites.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "mw/mw.hpp"

namespace mw::test {

inline double uniform(std::mt19937_64& rng, double lo = 0.0, double hi = 1.0) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Random distribution with all entries bounded away from zero.
inline Distribution random_distribution(std::mt19937_64& rng, std::size_t d, double floor = 0.0) {
  Vector v(static_cast<Eigen::Index>(d));
  for (auto& x : v) x = floor + uniform(rng);
  v /= v.sum();
  return Distribution(v);
}

/// Random reversible chain from symmetric conductances on the complete graph,
/// with a random sparsity pattern kept connected by a ring.
inline TransitionMatrix random_reversible(std::mt19937_64& rng, std::size_t d, double keep = 0.5) {
  const auto n = static_cast<Eigen::Index>(d);
  Matrix w = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const bool ring = j == (i + 1) % n || (i == 0 && j == n - 1);
      if (ring || uniform(rng) < keep) {
        const double c = 0.05 + uniform(rng);
        w(i, j) = c;
        w(j, i) = c;
      }
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) w.row(i) /= w.row(i).sum();
  return TransitionMatrix(w);
}

/// Sorted copy of a spectrum.
inline std::vector<double> sorted(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v;
}

inline std::vector<double> sorted(const Vector& v) { return sorted(std::vector<double>(v.data(), v.data() + v.size())); }

/// max_i |a_i - b_i| between two sorted multisets; +inf on size mismatch.
inline double multiset_distance(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return INFINITY;
  const auto sa = sorted(a);
  const auto sb = sorted(b);
  double worst = 0.0;
  for (std::size_t i = 0; i < sa.size(); ++i) worst = std::max(worst, std::abs(sa[i] - sb[i]));
  return worst;
}

/// ||mu P^t - mu' P^t||_pi^2 by direct evolution: the oracle for Delta(t).
/// The difference is propagated itself (linearity), so the result stays
/// accurate in relative terms long after mu P^t and mu' P^t agree to the last bit.
/// The exact difference has zero sum; the rounding drift along pi is removed each
/// step, since that mode never decays and would otherwise swamp a small Delta(t).
inline double direct_decay(const Distribution& mu, const Distribution& mu_prime, const TransitionMatrix& p,
                           const Distribution& pi, std::size_t t) {
  Vector diff = mu.mass() - mu_prime.mass();
  const Matrix pt = p.matrix().transpose();
  for (std::size_t s = 0; s < t; ++s) {
    diff = pt * diff;
    diff -= diff.sum() * pi.mass();
  }
  return pi_inner(diff, diff, pi);
}

/// Independent reconstruction of P from the spectral triple.
inline Matrix reconstruct(const SpectralDecomposition& s) {
  return s.right * s.eigenvalues.asDiagonal() * s.left.transpose();
}

/// Random strictly decreasing positive betas summing to 1.
inline std::vector<double> random_betas(std::mt19937_64& rng, std::size_t r) {
  std::vector<double> b(r + 1);
  for (auto& x : b) x = 0.05 + uniform(rng);
  std::sort(b.begin(), b.end(), std::greater<>());
  for (std::size_t i = 1; i < b.size(); ++i) {
    if (b[i] >= b[i - 1]) b[i] = b[i - 1] * 0.9;
  }
  double s = 0.0;
  for (double x : b) s += x;
  for (auto& x : b) x /= s;
  // Renormalize so the sum is 1 to roundoff.
  double t = 0.0;
  for (std::size_t i = 1; i < b.size(); ++i) t += b[i];
  b[0] = 1.0 - t;
  return b;
}

}  // namespace mw::test
