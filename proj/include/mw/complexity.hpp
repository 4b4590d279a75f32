#pragma once

// Instance-dependent sample complexity of testing mu P^t against mu' P^t.
//
// Sample sizes are returned as doubles holding an integer value, with
// +infinity meaning the two hypotheses are indistinguishable (Delta(t) = 0).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <utility>

#include "mw/chain.hpp"
#include "mw/divergences.hpp"
#include "mw/error.hpp"
#include "mw/pi_geometry.hpp"
#include "mw/spectral.hpp"

namespace mw {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();
inline constexpr double kDefaultEta = 0.75;

/// Hypothesis test between mu P^t and mu' P^t.
struct TestingInstance {
  TransitionMatrix chain;
  Distribution mu;
  Distribution mu_prime;
  std::size_t t = 0;

  TestingInstance(TransitionMatrix p, Distribution a, Distribution b, std::size_t steps)
      : chain(std::move(p)), mu(std::move(a)), mu_prime(std::move(b)), t(steps) {
    require_same_size(chain.size(), mu.size(), "TestingInstance");
    require_same_size(chain.size(), mu_prime.size(), "TestingInstance");
  }
};

/// Largest eps with eps <= mu_x / nu_x <= 1/eps for every x; 0 if the supports differ.
inline double bounded_lr_epsilon(const Distribution& mu, const Distribution& nu) {
  require_same_size(mu.size(), nu.size(), "bounded_lr_epsilon");
  double eps = 1.0;
  for (std::size_t x = 0; x < mu.size(); ++x) {
    const double a = mu[x];
    const double b = nu[x];
    if (a == 0.0 && b == 0.0) continue;
    if (a == 0.0 || b == 0.0) return 0.0;
    eps = std::min(eps, std::min(a / b, b / a));
  }
  return eps;
}

/// min of bounded_lr_epsilon over the pairs (mu, mu'), (mu, pi), (mu', pi).
inline double pairwise_epsilon(const Distribution& mu, const Distribution& mu_prime, const Distribution& pi) {
  return std::min({bounded_lr_epsilon(mu, mu_prime), bounded_lr_epsilon(mu, pi), bounded_lr_epsilon(mu_prime, pi)});
}

namespace detail {

inline void require_unit_open(double v, const char* name) {
  require(v > 0.0 && v < 1.0, ErrorKind::InvalidParameter, std::string(name) + " must lie in (0, 1)");
}

inline void require_epsilon(double eps) {
  require(eps > 0.0 && eps <= 1.0, ErrorKind::InvalidParameter, "epsilon must lie in (0, 1]");
}

inline double ceil_ratio(double c, double delta_t) { return delta_t > 0.0 ? std::ceil(c / delta_t) : kInfinity; }
inline double floor_ratio(double c, double delta_t) { return delta_t > 0.0 ? std::floor(c / delta_t) : kInfinity; }

}  // namespace detail

/// C(eps, delta) = 16 eps^{-5/2} ln(1/delta).
inline double upper_constant(double eps, double delta) {
  detail::require_epsilon(eps);
  detail::require_unit_open(delta, "delta");
  return 16.0 * std::pow(eps, -2.5) * std::log(1.0 / delta);
}

/// c(eps, delta) = 8 eps delta^2.
inline double lower_constant(double eps, double delta) {
  detail::require_epsilon(eps);
  detail::require_unit_open(delta, "delta");
  return 8.0 * eps * delta * delta;
}

/// 16 (eta/3)^{-5/2} / (1 - eta): the constant obtained by testing the centered pair.
inline double general_constant(double eta) {
  detail::require_unit_open(eta, "eta");
  return 16.0 * std::pow(eta / 3.0, -2.5) / (1.0 - eta);
}

/// Samples sufficient for the likelihood-ratio test to err with probability below delta.
inline double sample_upper_bound(double delta_t, double eps, double delta) {
  return detail::ceil_ratio(upper_constant(eps, delta), delta_t);
}

/// Sample sizes at or below which every test errs with probability >= 1/2 - delta.
inline double sample_lower_bound(double delta_t, double eps, double delta) {
  return detail::floor_ratio(lower_constant(eps, delta), delta_t);
}

/// Upper bound without any likelihood-ratio hypothesis on the pair.
inline double general_upper_bound(double delta_t, double delta, double eta = kDefaultEta) {
  detail::require_unit_open(delta, "delta");
  return detail::ceil_ratio(general_constant(eta) * std::log(1.0 / delta), delta_t);
}

inline double decay_at(const TestingInstance& inst) {
  const auto s = spectral_decomposition(inst.chain);
  return decay_distance_sq(inst.mu, inst.mu_prime, s, inst.t);
}

inline double sample_upper_bound(const TestingInstance& inst, double eps, double delta) {
  return sample_upper_bound(decay_at(inst), eps, delta);
}

inline double sample_lower_bound(const TestingInstance& inst, double eps, double delta) {
  return sample_lower_bound(decay_at(inst), eps, delta);
}

inline double general_upper_bound(const TestingInstance& inst, double delta, double eta = kDefaultEta) {
  return general_upper_bound(decay_at(inst), delta, eta);
}

/// Mixes both distributions with beta = (mu + mu' + pi) / 3 at weight eta. The
/// resulting pair and pi are pairwise (eta/3)-bounded.
inline std::pair<Distribution, Distribution> center_pair(const Distribution& mu, const Distribution& mu_prime,
                                                         const Distribution& pi, double eta) {
  require_same_size(mu.size(), mu_prime.size(), "center_pair");
  require_same_size(mu.size(), pi.size(), "center_pair");
  detail::require_unit_open(eta, "eta");
  const Vector beta = (mu.mass() + mu_prime.mass() + pi.mass()) / 3.0;
  return {Distribution((1.0 - eta) * mu.mass() + eta * beta), Distribution((1.0 - eta) * mu_prime.mass() + eta * beta)};
}

/// pi +- alpha u_[2] and pi +- alpha u_[d].
struct ExtremePairs {
  Distribution mu;
  Distribution mu_prime;
  Distribution gamma;
  Distribution gamma_prime;
  double alpha = 0.0;
  std::size_t second_index = 0;  // index of lambda_[2] in the decomposition
  std::size_t last_index = 0;    // index of lambda_[d]
  std::size_t second_multiplicity = 1;
  std::size_t last_multiplicity = 1;
};

namespace detail {

// Largest alpha keeping pi +- alpha u pairwise eps-bounded with pi and each
// other. With w = u / pi (the right eigenvector), the binding constraint is
// (1 - alpha |w_x|) / (1 + alpha |w_x|) >= eps.
inline double alpha_limit(const Vector& right, double eps) {
  const double wmax = right.cwiseAbs().maxCoeff();
  return (1.0 - eps) / (1.0 + eps) / wmax;
}

inline Distribution perturb(const Distribution& pi, const Vector& u, double alpha) {
  return Distribution(pi.mass() + alpha * u);
}

}  // namespace detail

inline constexpr double kAlphaSafety = 0.999;

/// Extreme pairs aligned with u_[2] and u_[d], sharing one alpha that keeps both
/// triples pairwise eps_target-bounded.
inline ExtremePairs extreme_pairs(const SpectralDecomposition& s, double eps_target) {
  detail::require(s.size() >= 3, ErrorKind::InvalidParameter, "extreme pairs need d >= 3");
  detail::require(eps_target < 1.0, ErrorKind::Infeasible, "no alpha > 0 achieves epsilon >= 1");
  detail::require(eps_target > 0.0, ErrorKind::InvalidParameter, "epsilon target must be positive");
  const std::size_t i2 = s.second_index();
  const std::size_t id = s.last_index();
  const double alpha = kAlphaSafety * std::min(detail::alpha_limit(s.right_vector(i2), eps_target),
                                               detail::alpha_limit(s.right_vector(id), eps_target));
  detail::require(alpha > 0.0 && std::isfinite(alpha), ErrorKind::Infeasible, "no feasible alpha");
  const Vector u2 = s.left_vector(i2);
  const Vector ud = s.left_vector(id);
  return ExtremePairs{detail::perturb(s.stationary, u2, alpha),
                      detail::perturb(s.stationary, u2, -alpha),
                      detail::perturb(s.stationary, ud, alpha),
                      detail::perturb(s.stationary, ud, -alpha),
                      alpha,
                      i2,
                      id,
                      s.multiplicity(i2),
                      s.multiplicity(id)};
}

inline ExtremePairs extreme_pairs(const TransitionMatrix& chain, double eps_target) {
  return extreme_pairs(spectral_decomposition(chain), eps_target);
}

/// Ratio of the time-t sample complexities of pair B over pair A, normalized by
/// the same ratio at t = 0: (Delta_A(t) / Delta_B(t)) * (Delta_B(0) / Delta_A(0)).
/// For extreme pairs this is (lambda_[2] / lambda_[d])^(2t).
inline double statistical_window(const DecayProfile& pair_a, const DecayProfile& pair_b, std::size_t t) {
  const double a0 = pair_a.initial();
  const double b0 = pair_b.initial();
  detail::require(a0 > 0.0 && b0 > 0.0, ErrorKind::Undefined, "window undefined: a pair is identical at t = 0");
  const double at = pair_a.at(t);
  const double bt = pair_b.at(t);
  detail::require(at > 0.0 || bt > 0.0, ErrorKind::Undefined, "window undefined: both pairs indistinguishable");
  if (t == 0) return 1.0;
  if (bt == 0.0) return kInfinity;
  return (at / bt) * (b0 / a0);
}

inline double statistical_window(const SpectralDecomposition& s, const std::pair<Distribution, Distribution>& pair_a,
                                 const std::pair<Distribution, Distribution>& pair_b, std::size_t t) {
  return statistical_window(decay_profile(pair_a.first, pair_a.second, s),
                            decay_profile(pair_b.first, pair_b.second, s), t);
}

inline double statistical_window(const TransitionMatrix& chain, const std::pair<Distribution, Distribution>& pair_a,
                                 const std::pair<Distribution, Distribution>& pair_b, std::size_t t) {
  return statistical_window(spectral_decomposition(chain), pair_a, pair_b, t);
}

/// Smallest t with n * Delta(t) <= threshold, or +inf if Delta never gets there.
/// Delta(t) is non-increasing, so the crossing is found by doubling then bisection.
inline double statistical_time(const DecayProfile& profile, double n, double threshold) {
  detail::require(n >= 1.0, ErrorKind::InvalidParameter, "sample size n must be >= 1");
  detail::require(threshold > 0.0, ErrorKind::InvalidParameter, "threshold must be positive");
  auto crossed = [&](std::size_t t) { return n * profile.at(t) <= threshold; };
  if (crossed(0)) return 0.0;
  if (n * profile.persistent() > threshold) return kInfinity;
  std::size_t hi = 1;
  while (!crossed(hi)) {
    if (hi > (std::size_t{1} << 52)) return kInfinity;
    hi *= 2;
  }
  std::size_t lo = hi / 2;  // !crossed(lo)
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    (crossed(mid) ? hi : lo) = mid;
  }
  return static_cast<double>(hi);
}

/// Default crossing threshold: the lower-bound constant 8 eps delta^2.
inline double default_time_threshold(double eps, double delta) { return lower_constant(eps, delta); }

inline double statistical_time(const SpectralDecomposition& s, const Distribution& mu, const Distribution& mu_prime,
                               double n, double threshold) {
  const auto profile = decay_profile(mu, mu_prime, s);
  detail::require(profile.initial() > 0.0, ErrorKind::InvalidParameter, "statistical time needs Delta(0) > 0");
  return statistical_time(profile, n, threshold);
}

/// Closed form for a pair aligned with one eigenvector with |lambda| in (0, 1):
/// ceil(ln(n Delta(0) / threshold) / (2 ln(1 / |lambda|))), and 0 below threshold.
inline double aligned_statistical_time(double abs_lambda, double n, double delta0, double threshold) {
  detail::require(abs_lambda > 0.0 && abs_lambda < 1.0, ErrorKind::InvalidParameter, "|lambda| must lie in (0, 1)");
  const double ratio = n * delta0 / threshold;
  if (ratio <= 1.0) return 0.0;
  return std::ceil(0.5 * std::log(ratio) / std::log(1.0 / abs_lambda));
}

/// Summary of the instance's testing difficulty at one time step.
struct ComplexityReport {
  std::size_t t = 0;
  double delta_t = 0.0;
  std::optional<double> epsilon;  // measured pairwise epsilon; empty when 0
  double n_upper = kInfinity;
  double n_lower = kInfinity;
  double n_star_scale = kInfinity;
  // Eigen summary.
  double lambda_2 = 0.0;
  double lambda_d = 0.0;
  std::size_t multiplicity_2 = 1;
  std::size_t multiplicity_d = 1;
  std::size_t d = 0;
};

/// With a positive measured epsilon, n_upper/n_lower use the bounded-ratio
/// constants. Otherwise n_upper falls back to the centered-pair bound and
/// n_lower is 0 (no lower bound available).
inline ComplexityReport complexity_report(const SpectralDecomposition& s, const DecayProfile& profile,
                                          double eps_measured, std::size_t t, double delta,
                                          double eta = kDefaultEta) {
  ComplexityReport r;
  r.t = t;
  r.delta_t = profile.at(t);
  r.d = s.size();
  r.lambda_2 = s.eigenvalue(s.second_index());
  r.lambda_d = s.eigenvalue(s.last_index());
  r.multiplicity_2 = s.multiplicity(s.second_index());
  r.multiplicity_d = s.multiplicity(s.last_index());
  if (eps_measured > 0.0) r.epsilon = eps_measured;
  if (r.delta_t <= 0.0) return r;
  r.n_star_scale = 1.0 / r.delta_t;
  if (r.epsilon) {
    r.n_upper = sample_upper_bound(r.delta_t, *r.epsilon, delta);
    r.n_lower = sample_lower_bound(r.delta_t, *r.epsilon, delta);
  } else {
    r.n_upper = general_upper_bound(r.delta_t, delta, eta);
    r.n_lower = 0.0;
  }
  return r;
}

inline ComplexityReport complexity_report(const TestingInstance& inst, double delta, double eta = kDefaultEta) {
  const auto s = spectral_decomposition(inst.chain);
  const auto profile = decay_profile(inst.mu, inst.mu_prime, s);
  const double eps = pairwise_epsilon(inst.mu, inst.mu_prime, s.stationary);
  return complexity_report(s, profile, eps, inst.t, delta, eta);
}

}  // namespace mw
