#pragma once

// Discrete divergences between probability vectors, and exact oracles over
// n-fold product distributions. All logarithms are natural.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "mw/chain.hpp"
#include "mw/error.hpp"

namespace mw {

inline constexpr std::uint64_t kEnumerationBudget = 10'000'000;

inline double total_variation(const Distribution& mu, const Distribution& nu) {
  require_same_size(mu.size(), nu.size(), "total_variation");
  return 0.5 * (mu.mass() - nu.mass()).cwiseAbs().sum();
}

/// KL(mu || nu); +inf when mu puts mass where nu has none.
inline double kl_divergence(const Distribution& mu, const Distribution& nu) {
  require_same_size(mu.size(), nu.size(), "kl_divergence");
  double acc = 0.0;
  for (std::size_t x = 0; x < mu.size(); ++x) {
    if (mu[x] == 0.0) continue;
    if (nu[x] == 0.0) return std::numeric_limits<double>::infinity();
    acc += mu[x] * std::log(mu[x] / nu[x]);
  }
  return acc;
}

/// sum_x nu_x (mu_x / nu_x - 1)^2.
inline double chi_square(const Distribution& mu, const Distribution& nu) {
  require_same_size(mu.size(), nu.size(), "chi_square");
  double acc = 0.0;
  for (std::size_t x = 0; x < mu.size(); ++x) {
    if (nu[x] == 0.0) {
      if (mu[x] > 0.0) return std::numeric_limits<double>::infinity();
      continue;
    }
    const double diff = mu[x] - nu[x];
    acc += diff * diff / nu[x];
  }
  return acc;
}

/// Squared Hellinger distance sum_x (sqrt(mu_x) - sqrt(nu_x))^2, in [0, 2].
inline double hellinger_sq(const Distribution& mu, const Distribution& nu) {
  require_same_size(mu.size(), nu.size(), "hellinger_sq");
  return (mu.mass().cwiseSqrt() - nu.mass().cwiseSqrt()).squaredNorm();
}

namespace detail {

// Neumaier compensated summation.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline std::uint64_t outcome_count(std::size_t d, std::size_t n, std::uint64_t budget) {
  std::uint64_t total = 1;
  for (std::size_t k = 0; k < n; ++k) {
    if (total > budget / d) {
      fail(ErrorKind::BudgetExceeded, "enumeration of " + std::to_string(d) + "^" + std::to_string(n) +
                                          " outcomes exceeds budget " + std::to_string(budget));
    }
    total *= d;
  }
  return total;
}

// Visits every outcome tuple in lexicographic order. The callback receives the
// tuple and its histogram.
template <typename F>
void for_each_outcome(std::size_t d, std::size_t n, F&& visit, std::uint64_t budget = kEnumerationBudget) {
  const std::uint64_t total = outcome_count(d, n, budget);
  std::vector<std::size_t> tuple(n, 0);
  std::vector<std::size_t> counts(d, 0);
  counts[0] = n;
  for (std::uint64_t k = 0; k < total; ++k) {
    visit(static_cast<const std::vector<std::size_t>&>(tuple), static_cast<const std::vector<std::size_t>&>(counts));
    // Odometer increment, last coordinate fastest.
    for (std::size_t pos = n; pos-- > 0;) {
      --counts[tuple[pos]];
      if (++tuple[pos] < d) {
        ++counts[tuple[pos]];
        break;
      }
      tuple[pos] = 0;
      ++counts[0];
    }
  }
}

inline double tuple_probability(const Vector& mass, const std::vector<std::size_t>& tuple) {
  double p = 1.0;
  for (auto x : tuple) p *= mass[static_cast<Eigen::Index>(x)];
  return p;
}

/// Per-state log-likelihood ratios log(mu_x / mu'_x); +-inf where exactly one
/// side vanishes, NaN where both do.
inline std::vector<double> log_ratios(const Distribution& mu, const Distribution& mu_prime) {
  std::vector<double> out(mu.size());
  for (std::size_t x = 0; x < mu.size(); ++x) {
    const double a = mu[x];
    const double b = mu_prime[x];
    if (a > 0.0 && b > 0.0) {
      out[x] = std::log(a / b);
    } else if (a > 0.0) {
      out[x] = std::numeric_limits<double>::infinity();
    } else if (b > 0.0) {
      out[x] = -std::numeric_limits<double>::infinity();
    } else {
      out[x] = std::numeric_limits<double>::quiet_NaN();
    }
  }
  return out;
}

/// L_n = sum_x (counts_x / n) * ell_x, skipping unobserved states.
template <typename Counts>
double lr_statistic_from_counts(const Counts& counts, std::size_t n, const std::vector<double>& ell) {
  double acc = 0.0;
  for (std::size_t x = 0; x < ell.size(); ++x) {
    if (counts[x] == 0) continue;
    acc += static_cast<double>(counts[x]) * ell[x];
  }
  return acc / static_cast<double>(n);
}

}  // namespace detail

/// All d^n probabilities of the n-fold product of mu, in lexicographic tuple order.
inline Vector product_distribution(const Distribution& mu, std::size_t n, std::uint64_t budget = kEnumerationBudget) {
  detail::require(n >= 1, ErrorKind::InvalidParameter, "product size n must be >= 1");
  const auto total = detail::outcome_count(mu.size(), n, budget);
  Vector out(static_cast<Eigen::Index>(total));
  Eigen::Index k = 0;
  detail::for_each_outcome(
      mu.size(), n,
      [&](const std::vector<std::size_t>& tuple, const std::vector<std::size_t>&) {
        out[k++] = detail::tuple_probability(mu.mass(), tuple);
      },
      budget);
  return out;
}

/// Exact d_TV between mu^{(x)n} and nu^{(x)n} by enumerating every outcome tuple.
inline double exact_product_tv(const Distribution& mu, const Distribution& nu, std::size_t n) {
  require_same_size(mu.size(), nu.size(), "exact_product_tv");
  detail::require(n >= 1, ErrorKind::InvalidParameter, "product size n must be >= 1");
  detail::CompensatedSum acc;
  detail::for_each_outcome(mu.size(), n, [&](const std::vector<std::size_t>& tuple, const std::vector<std::size_t>&) {
    acc.add(std::abs(detail::tuple_probability(mu.mass(), tuple) - detail::tuple_probability(nu.mass(), tuple)));
  });
  return 0.5 * acc.value();
}

/// The two error probabilities of the likelihood-ratio test on n draws.
struct LrErrors {
  double err_mu = 0.0;        // P_mu(test says mu')
  double err_mu_prime = 0.0;  // P_mu'(test says mu)
  double max() const { return err_mu > err_mu_prime ? err_mu : err_mu_prime; }
};

/// Exact error probabilities of the likelihood-ratio test (ties go to mu').
inline LrErrors exact_lr_errors(const Distribution& mu, const Distribution& mu_prime, std::size_t n) {
  require_same_size(mu.size(), mu_prime.size(), "exact_lr_errors");
  detail::require(n >= 1, ErrorKind::InvalidParameter, "sample size n must be >= 1");
  const auto ell = detail::log_ratios(mu, mu_prime);
  detail::CompensatedSum err_mu;
  detail::CompensatedSum err_mu_prime;
  detail::for_each_outcome(mu.size(), n,
                           [&](const std::vector<std::size_t>& tuple, const std::vector<std::size_t>& counts) {
                             const bool says_mu = detail::lr_statistic_from_counts(counts, n, ell) > 0.0;
                             if (says_mu) {
                               err_mu_prime.add(detail::tuple_probability(mu_prime.mass(), tuple));
                             } else {
                               err_mu.add(detail::tuple_probability(mu.mass(), tuple));
                             }
                           });
  return {err_mu.value(), err_mu_prime.value()};
}

/// Maximum of the two error probabilities of the likelihood-ratio test.
inline double exact_lr_error(const Distribution& mu, const Distribution& mu_prime, std::size_t n) {
  return exact_lr_errors(mu, mu_prime, n).max();
}

}  // namespace mw
