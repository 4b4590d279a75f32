#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "mw/chain.hpp"
#include "mw/complexity.hpp"
#include "mw/divergences.hpp"
#include "mw/error.hpp"
#include "mw/spectral.hpp"

namespace mw {

/// Histogram of n i.i.d. draws.
struct Sample {
  std::vector<std::uint64_t> counts;
  std::uint64_t n = 0;

  /// Empirical distribution counts / n.
  Vector empirical() const {
    Vector v(static_cast<Eigen::Index>(counts.size()));
    for (std::size_t x = 0; x < counts.size(); ++x) v[static_cast<Eigen::Index>(x)] = static_cast<double>(counts[x]) / static_cast<double>(n);
    return v;
  }
};

enum class Decision { Mu, MuPrime };

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of the substream for one (hypothesis, trial) pair.
inline std::uint64_t substream_seed(std::uint64_t seed, unsigned hypothesis, std::uint64_t trial) {
  return splitmix64(splitmix64(seed ^ (0xa0761d6478bd642fULL * (hypothesis + 1))) + trial);
}

/// Inverse-CDF sampler over a cumulative table.
class CdfSampler {
 public:
  explicit CdfSampler(const Distribution& mu) : cdf_(mu.size()) {
    double acc = 0.0;
    for (std::size_t x = 0; x < mu.size(); ++x) {
      acc += mu[x];
      cdf_[x] = acc;
    }
    last_ = mu.size() - 1;
    while (last_ > 0 && mu[last_] == 0.0) --last_;
  }

  template <typename Rng>
  std::size_t operator()(Rng& rng) const {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53 * cdf_.back();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    const auto x = static_cast<std::size_t>(it - cdf_.begin());
    return std::min(x, last_);
  }

 private:
  std::vector<double> cdf_;
  std::size_t last_ = 0;
};

template <typename Rng>
void fill_sample(const CdfSampler& sampler, std::uint64_t n, Rng& rng, std::vector<std::uint64_t>& counts) {
  std::fill(counts.begin(), counts.end(), 0);
  for (std::uint64_t k = 0; k < n; ++k) ++counts[sampler(rng)];
}

inline Decision decide(double statistic) { return statistic > 0.0 ? Decision::Mu : Decision::MuPrime; }

}  // namespace detail

/// Multinomial(n, mu) histogram, deterministic in (mu, n, seed).
inline Sample draw_sample(const Distribution& mu, std::uint64_t n, std::uint64_t seed) {
  detail::require(n >= 1, ErrorKind::InvalidParameter, "sample size n must be >= 1");
  const detail::CdfSampler sampler(mu);
  std::mt19937_64 rng(seed);
  Sample s{std::vector<std::uint64_t>(mu.size(), 0), n};
  detail::fill_sample(sampler, n, rng, s.counts);
  return s;
}

/// L_n = sum_x (counts_x / n) ln(mu_x / mu'_x). An observed state that one side
/// cannot produce makes the statistic +-inf; one that neither side can produce
/// makes it NaN, which the test resolves to mu'.
inline double lr_statistic(const Sample& s, const Distribution& mu, const Distribution& mu_prime) {
  require_same_size(s.counts.size(), mu.size(), "lr_statistic");
  require_same_size(s.counts.size(), mu_prime.size(), "lr_statistic");
  detail::require(s.n >= 1, ErrorKind::InvalidParameter, "empty sample");
  return detail::lr_statistic_from_counts(s.counts, static_cast<std::size_t>(s.n), detail::log_ratios(mu, mu_prime));
}

/// mu iff L_n > 0; ties (and undefined statistics) go to mu'.
inline Decision lr_test(const Sample& s, const Distribution& mu, const Distribution& mu_prime) {
  return detail::decide(lr_statistic(s, mu, mu_prime));
}

struct ErrorEstimate {
  double err_mu = 0.0;
  double err_mu_prime = 0.0;
  double err_max = 0.0;
  std::uint64_t trials = 0;
  double ci_halfwidth = 0.0;  // 95% normal-approximation half-width at err_max
};

/// Worker count from MW_THREADS (0 or unset: hardware concurrency).
inline unsigned thread_count_from_env() {
  unsigned n = 0;
  if (const char* env = std::getenv("MW_THREADS")) n = static_cast<unsigned>(std::strtoul(env, nullptr, 10));
  if (n == 0) n = std::max(1U, std::thread::hardware_concurrency());
  return n;
}

/// Monte Carlo estimate of both error probabilities of the likelihood-ratio test
/// on n draws from mu P^t and mu' P^t. Trial k under hypothesis h uses its own
/// RNG substream, so results do not depend on the worker count.
inline ErrorEstimate estimate_error(const TestingInstance& inst, std::uint64_t n, std::uint64_t trials,
                                    std::uint64_t seed, unsigned threads = 0) {
  detail::require(n >= 1, ErrorKind::InvalidParameter, "sample size n must be >= 1");
  detail::require(trials >= 100, ErrorKind::InvalidParameter, "need at least 100 trials");
  if (threads == 0) threads = thread_count_from_env();

  const Distribution mu_t = evolve(inst.mu, inst.chain, inst.t);
  const Distribution mu_prime_t = evolve(inst.mu_prime, inst.chain, inst.t);
  const auto ell = detail::log_ratios(mu_t, mu_prime_t);
  const detail::CdfSampler samplers[2] = {detail::CdfSampler(mu_t), detail::CdfSampler(mu_prime_t)};
  const std::size_t d = mu_t.size();

  auto count_errors = [&](unsigned hypothesis, std::uint64_t begin, std::uint64_t end) {
    std::vector<std::uint64_t> counts(d);
    std::uint64_t errors = 0;
    const Decision truth = hypothesis == 0 ? Decision::Mu : Decision::MuPrime;
    for (std::uint64_t k = begin; k < end; ++k) {
      std::mt19937_64 rng(detail::substream_seed(seed, hypothesis, k));
      detail::fill_sample(samplers[hypothesis], n, rng, counts);
      if (detail::decide(detail::lr_statistic_from_counts(counts, static_cast<std::size_t>(n), ell)) != truth) ++errors;
    }
    return errors;
  };

  std::uint64_t errors[2] = {0, 0};
  const auto workers = static_cast<std::uint64_t>(std::min<std::uint64_t>(threads, trials));
  for (unsigned h = 0; h < 2; ++h) {
    if (workers <= 1) {
      errors[h] = count_errors(h, 0, trials);
      continue;
    }
    std::vector<std::uint64_t> partial(workers, 0);
    {
      std::vector<std::jthread> pool;
      pool.reserve(workers);
      for (std::uint64_t w = 0; w < workers; ++w) {
        const std::uint64_t begin = trials * w / workers;
        const std::uint64_t end = trials * (w + 1) / workers;
        pool.emplace_back([&, h, w, begin, end] { partial[w] = count_errors(h, begin, end); });
      }
    }
    for (auto c : partial) errors[h] += c;
  }

  ErrorEstimate e;
  e.trials = trials;
  e.err_mu = static_cast<double>(errors[0]) / static_cast<double>(trials);
  e.err_mu_prime = static_cast<double>(errors[1]) / static_cast<double>(trials);
  e.err_max = std::max(e.err_mu, e.err_mu_prime);
  e.ci_halfwidth = 1.96 * std::sqrt(e.err_max * (1.0 - e.err_max) / static_cast<double>(trials));
  return e;
}

/// Exact check of the lower bound at n = floor(8 eps delta^2 / Delta(t)).
struct LowerBoundWitness {
  double epsilon = 0.0;
  double delta_t = 0.0;
  double n = 0.0;
  bool vacuous = false;          // n == 0 (or Delta(t) == 0: n infinite)
  bool enumerated = false;       // exact product oracles were computed
  bool budget_exceeded = false;  // fell back to the Pinsker bound
  double exact_tv = 0.0;
  double exact_lr_error = 0.0;
  double pinsker_tv_bound = 0.0;  // sqrt(n KL(mu_t, mu'_t) / 2)
  bool tv_bound_holds = false;    // (1 - TV) / 2 >= 1/2 - delta
  bool lr_bound_holds = false;    // exact LR max error >= 1/2 - delta
};

inline LowerBoundWitness lower_bound_witness(const TestingInstance& inst, double delta) {
  const auto s = spectral_decomposition(inst.chain);
  LowerBoundWitness w;
  w.epsilon = pairwise_epsilon(inst.mu, inst.mu_prime, s.stationary);
  detail::require(w.epsilon > 0.0, ErrorKind::InvalidParameter, "pair is not epsilon-bounded for any epsilon > 0");
  w.delta_t = decay_distance_sq(inst.mu, inst.mu_prime, s, inst.t);
  w.n = sample_lower_bound(w.delta_t, w.epsilon, delta);
  if (w.n < 1.0 || !std::isfinite(w.n)) {
    w.vacuous = true;
    return w;
  }
  const Distribution mu_t = evolve(inst.mu, inst.chain, inst.t);
  const Distribution mu_prime_t = evolve(inst.mu_prime, inst.chain, inst.t);
  const double target = 0.5 - delta;
  const auto n = static_cast<std::size_t>(w.n);
  w.pinsker_tv_bound = std::sqrt(w.n * kl_divergence(mu_t, mu_prime_t) / 2.0);
  try {
    w.exact_tv = exact_product_tv(mu_t, mu_prime_t, n);
    w.exact_lr_error = exact_lr_error(mu_t, mu_prime_t, n);
    w.enumerated = true;
    w.tv_bound_holds = (1.0 - w.exact_tv) / 2.0 >= target;
    w.lr_bound_holds = w.exact_lr_error >= target;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::BudgetExceeded) throw;
    w.budget_exceeded = true;
    w.tv_bound_holds = (1.0 - w.pinsker_tv_bound) / 2.0 >= target;
  }
  return w;
}

}  // namespace mw
