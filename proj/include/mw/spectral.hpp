#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mw/chain.hpp"
#include "mw/error.hpp"

namespace mw {

inline constexpr double kDefaultReversibleTol = 1e-8;
inline constexpr double kEigenResidualTol = 1e-10;
// Eigenvalues closer than this in absolute value are ties for the |lambda| ordering.
inline constexpr double kEigenTieTol = 1e-12;

/// Eigen-structure of a reversible chain.
///
/// Column i of `left` is u_i, column i of `right` is v_i, both indexed like
/// `eigenvalues` (descending by signed value, so index 0 holds lambda = 1).
/// The u_i are orthonormal in the pi-weighted inner product and u_i = pi .* v_i.
/// `abs_order[k]` is the index of the eigenvalue of rank k by |lambda|; rank 0
/// is always the stationary mode. Eigenvectors of repeated eigenvalues form an
/// arbitrary pi-orthonormal basis of the eigenspace.
struct SpectralDecomposition {
  Vector eigenvalues;
  Matrix left;
  Matrix right;
  std::vector<std::size_t> abs_order;
  Distribution stationary;

  std::size_t size() const noexcept { return static_cast<std::size_t>(eigenvalues.size()); }

  double eigenvalue(std::size_t i) const { return eigenvalues[static_cast<Eigen::Index>(i)]; }
  Vector left_vector(std::size_t i) const { return left.col(static_cast<Eigen::Index>(i)); }
  Vector right_vector(std::size_t i) const { return right.col(static_cast<Eigen::Index>(i)); }

  /// Index (into eigenvalues) of the eigenvalue with |lambda|-rank `rank` (0-based).
  std::size_t by_abs_rank(std::size_t rank) const { return abs_order.at(rank); }

  /// lambda_[2] and lambda_[d] in the usual 1-based notation.
  std::size_t second_index() const { return by_abs_rank(1); }
  std::size_t last_index() const { return by_abs_rank(size() - 1); }

  /// Number of eigenvalues within 1e-9 of eigenvalue i (signed).
  std::size_t multiplicity(std::size_t i) const {
    const double lam = eigenvalue(i);
    return static_cast<std::size_t>(
        ((eigenvalues.array() - lam).abs() <= 1e-9).count());
  }
};

/// Stationary distribution of an irreducible chain, from the linear system
/// pi (P - I) = 0 with sum(pi) = 1.
inline Distribution stationary_distribution(const TransitionMatrix& chain) {
  detail::require(chain.is_irreducible(), ErrorKind::NotIrreducible, "chain is not irreducible");
  const auto d = static_cast<Eigen::Index>(chain.size());
  // Transposed system: (P^T - I) pi = 0, with the last equation replaced by normalization.
  Matrix a = chain.matrix().transpose() - Matrix::Identity(d, d);
  a.row(d - 1).setOnes();
  Vector b = Vector::Zero(d);
  b[d - 1] = 1.0;
  Vector pi = a.colPivHouseholderQr().solve(b);
  for (Eigen::Index x = 0; x < d; ++x) {
    detail::require(pi[x] > 0.0, ErrorKind::NotIrreducible, "stationary mass is not strictly positive");
  }
  pi /= pi.sum();
  return Distribution(std::move(pi));
}

/// max_{i,j} |pi_i P_ij - pi_j P_ji| <= tol.
inline bool check_reversible(const TransitionMatrix& chain, const Distribution& pi,
                             double tol = kDefaultReversibleTol) {
  require_same_size(chain.size(), pi.size(), "check_reversible");
  const Matrix& p = chain.matrix();
  const Vector& w = pi.mass();
  const auto d = p.rows();
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = i + 1; j < d; ++j) {
      if (std::abs(w[i] * p(i, j) - w[j] * p(j, i)) > tol) return false;
    }
  }
  return true;
}

/// Q = Pi^{1/2} P Pi^{-1/2}, symmetric for a reversible chain.
inline Matrix symmetrize(const TransitionMatrix& chain, const Distribution& pi) {
  require_same_size(chain.size(), pi.size(), "symmetrize");
  const Vector& w = pi.mass();
  for (Eigen::Index x = 0; x < w.size(); ++x) {
    detail::require(w[x] > 0.0, ErrorKind::ZeroStationaryMass, "symmetrize needs strictly positive pi");
  }
  const Vector root = w.cwiseSqrt();
  Matrix q = root.asDiagonal() * chain.matrix() * root.cwiseInverse().asDiagonal();
  const double asym = (q - q.transpose()).cwiseAbs().maxCoeff();
  detail::require(asym <= kDefaultReversibleTol, ErrorKind::NotReversible, "chain not reversible");
  return 0.5 * (q + q.transpose());
}

namespace detail {

// |lambda| descending, then signed value descending, then index ascending,
// with values within kEigenTieTol treated as equal.
inline std::vector<std::size_t> abs_ordering(const Vector& eigenvalues) {
  const auto d = static_cast<std::size_t>(eigenvalues.size());
  std::vector<std::size_t> idx(d);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(eigenvalues[static_cast<Eigen::Index>(a)]) > std::abs(eigenvalues[static_cast<Eigen::Index>(b)]);
  });

  std::vector<std::size_t> out;
  out.reserve(d);
  std::size_t start = 0;
  while (start < d) {
    const double lead = std::abs(eigenvalues[static_cast<Eigen::Index>(idx[start])]);
    std::size_t end = start + 1;
    while (end < d && lead - std::abs(eigenvalues[static_cast<Eigen::Index>(idx[end])]) <= kEigenTieTol) ++end;

    std::vector<std::size_t> group(idx.begin() + static_cast<std::ptrdiff_t>(start),
                                   idx.begin() + static_cast<std::ptrdiff_t>(end));
    auto sign_class = [&](std::size_t i) {
      const double v = eigenvalues[static_cast<Eigen::Index>(i)];
      return lead <= kEigenTieTol ? 0 : (v > 0.0 ? 0 : 1);
    };
    std::sort(group.begin(), group.end(), [&](std::size_t a, std::size_t b) {
      const int ca = sign_class(a);
      const int cb = sign_class(b);
      return ca != cb ? ca < cb : a < b;
    });
    out.insert(out.end(), group.begin(), group.end());
    start = end;
  }
  return out;
}

inline void fix_sign(Eigen::Ref<Vector> u, Eigen::Ref<Vector> v) {
  const double scale = u.cwiseAbs().maxCoeff();
  for (Eigen::Index x = 0; x < u.size(); ++x) {
    if (std::abs(u[x]) > 1e-10 * scale) {
      if (u[x] < 0.0) {
        u = -u;
        v = -v;
      }
      return;
    }
  }
}

}  // namespace detail

/// Full spectral decomposition of an irreducible reversible chain through the
/// symmetrized matrix Q.
inline SpectralDecomposition spectral_decomposition(const TransitionMatrix& chain) {
  const Distribution pi0 = stationary_distribution(chain);
  detail::require(check_reversible(chain, pi0, kDefaultReversibleTol), ErrorKind::NotReversible,
                  "chain not reversible");
  const Matrix q = symmetrize(chain, pi0);
  const auto d = q.rows();

  Eigen::SelfAdjointEigenSolver<Matrix> solver(q);
  detail::require(solver.info() == Eigen::Success, ErrorKind::EigensolverFailure,
                  "symmetric eigensolver did not converge");

  // Eigen returns ascending order; flip to descending.
  Vector values = solver.eigenvalues().reverse();
  Matrix nu = solver.eigenvectors().rowwise().reverse();

  const double residual = (q * nu - nu * values.asDiagonal()).cwiseAbs().maxCoeff();
  detail::require(residual <= kEigenResidualTol * std::max(1.0, q.cwiseAbs().maxCoeff()),
                  ErrorKind::EigensolverFailure,
                  "eigensolver residual " + std::to_string(residual) + " exceeds tolerance");

  // The principal Q-eigenvector is sqrt(pi); squaring it gives the stationary
  // distribution consistent with the rest of the basis.
  Vector pi = nu.col(0).cwiseAbs2();
  pi /= pi.sum();
  const Vector root = pi.cwiseSqrt();

  SpectralDecomposition s;
  s.eigenvalues = values;
  s.eigenvalues[0] = 1.0;
  s.left = root.asDiagonal() * nu;
  s.right = root.cwiseInverse().asDiagonal() * nu;
  s.left.col(0) = pi;
  s.right.col(0).setOnes();
  for (Eigen::Index i = 1; i < d; ++i) {
    detail::fix_sign(s.left.col(i), s.right.col(i));
  }
  s.abs_order = detail::abs_ordering(s.eigenvalues);
  s.stationary = Distribution(pi);
  return s;
}

/// (1 - q) P + q I.
inline TransitionMatrix lazy(const TransitionMatrix& chain, double q) {
  detail::require(q >= 0.0 && q <= 1.0, ErrorKind::InvalidParameter, "laziness q must lie in [0, 1]");
  const auto d = static_cast<Eigen::Index>(chain.size());
  return TransitionMatrix((1.0 - q) * chain.matrix() + q * Matrix::Identity(d, d));
}

/// mu P^t by t successive vector-matrix products.
inline Distribution evolve(const Distribution& mu, const TransitionMatrix& chain, std::size_t t) {
  require_same_size(mu.size(), chain.size(), "evolve");
  Vector row = mu.mass();
  const Matrix pt = chain.matrix().transpose();
  for (std::size_t s = 0; s < t; ++s) {
    row = pt * row;
  }
  // Keeps the mass at 1 for long horizons; entries stay nonnegative.
  row /= row.sum();
  return Distribution(std::move(row));
}

}  // namespace mw
