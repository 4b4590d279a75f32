#pragma once

#include <cmath>
#include <cstddef>
#include <deque>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mw/error.hpp"

namespace mw {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kStochasticTol = 1e-12;

/// Probability vector on d states. Entries are nonnegative and sum to one
/// within kStochasticTol.
class Distribution {
 public:
  Distribution() = default;

  explicit Distribution(Vector mass) : mass_(std::move(mass)) {
    detail::require(mass_.size() >= 1, ErrorKind::InvalidParameter, "distribution must be non-empty");
    for (Eigen::Index x = 0; x < mass_.size(); ++x) {
      detail::require(std::isfinite(mass_[x]) && mass_[x] >= 0.0, ErrorKind::InvalidParameter,
                      "distribution entry " + std::to_string(x) + " is negative or not finite");
    }
    detail::require(std::abs(mass_.sum() - 1.0) <= kStochasticTol, ErrorKind::InvalidParameter,
                    "distribution does not sum to 1");
  }

  Distribution(std::initializer_list<double> values)
      : Distribution(Vector(Eigen::Map<const Vector>(values.begin(), static_cast<Eigen::Index>(values.size())))) {}

  static Distribution uniform(std::size_t d) {
    return Distribution(Vector::Constant(static_cast<Eigen::Index>(d), 1.0 / static_cast<double>(d)));
  }

  static Distribution point_mass(std::size_t d, std::size_t state) {
    detail::require(state < d, ErrorKind::InvalidParameter, "point mass state out of range");
    Vector v = Vector::Zero(static_cast<Eigen::Index>(d));
    v[static_cast<Eigen::Index>(state)] = 1.0;
    return Distribution(std::move(v));
  }

  std::size_t size() const noexcept { return static_cast<std::size_t>(mass_.size()); }
  const Vector& mass() const noexcept { return mass_; }
  double operator[](std::size_t x) const { return mass_[static_cast<Eigen::Index>(x)]; }

 private:
  Vector mass_;
};

/// Row-stochastic d x d matrix; entry (i, j) is the probability of moving from i to j.
/// Irreducibility is a property queried on demand rather than a construction
/// requirement, so degenerate chains such as the identity can still be built.
class TransitionMatrix {
 public:
  TransitionMatrix() = default;

  explicit TransitionMatrix(Matrix entries) : p_(std::move(entries)) {
    detail::require(p_.rows() == p_.cols(), ErrorKind::DimensionMismatch, "transition matrix must be square");
    detail::require(p_.rows() >= 2, ErrorKind::InvalidParameter, "transition matrix needs at least 2 states");
    for (Eigen::Index i = 0; i < p_.rows(); ++i) {
      for (Eigen::Index j = 0; j < p_.cols(); ++j) {
        detail::require(std::isfinite(p_(i, j)) && p_(i, j) >= 0.0, ErrorKind::NotStochastic,
                        "negative or non-finite transition probability at (" + std::to_string(i) + ", " +
                            std::to_string(j) + ")");
      }
      detail::require(std::abs(p_.row(i).sum() - 1.0) <= kStochasticTol, ErrorKind::NotStochastic,
                      "row " + std::to_string(i) + " does not sum to 1");
    }
  }

  std::size_t size() const noexcept { return static_cast<std::size_t>(p_.rows()); }
  const Matrix& matrix() const noexcept { return p_; }
  double operator()(std::size_t i, std::size_t j) const {
    return p_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }

  /// Breadth-first reachability from state 0 on the support graph and on its reverse.
  bool is_irreducible() const {
    const auto d = p_.rows();
    auto reaches_all = [&](bool reverse) {
      std::vector<char> seen(static_cast<std::size_t>(d), 0);
      std::deque<Eigen::Index> frontier{0};
      seen[0] = 1;
      Eigen::Index count = 1;
      while (!frontier.empty()) {
        const auto i = frontier.front();
        frontier.pop_front();
        for (Eigen::Index j = 0; j < d; ++j) {
          const double w = reverse ? p_(j, i) : p_(i, j);
          if (w > 0.0 && !seen[static_cast<std::size_t>(j)]) {
            seen[static_cast<std::size_t>(j)] = 1;
            ++count;
            frontier.push_back(j);
          }
        }
      }
      return count == d;
    };
    return reaches_all(false) && reaches_all(true);
  }

 private:
  Matrix p_;
};

inline void require_same_size(std::size_t a, std::size_t b, const char* what) {
  detail::require(a == b, ErrorKind::DimensionMismatch,
                  std::string(what) + ": dimension mismatch (" + std::to_string(a) + " vs " + std::to_string(b) + ")");
}

}  // namespace mw
