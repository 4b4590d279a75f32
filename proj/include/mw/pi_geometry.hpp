#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "mw/chain.hpp"
#include "mw/spectral.hpp"

namespace mw {

// |lambda| below this is a dead mode for t >= 1.
inline constexpr double kDeadEigenvalue = 1e-13;
// Coefficient differences below this fraction of ||mu - mu'||_pi are solver noise.
inline constexpr double kCoefficientNoise = 1e-12;

/// <u, w>_pi = sum_x u_x w_x / pi_x.
inline double pi_inner(const Vector& u, const Vector& w, const Distribution& pi) {
  require_same_size(static_cast<std::size_t>(u.size()), pi.size(), "pi_inner");
  require_same_size(static_cast<std::size_t>(w.size()), pi.size(), "pi_inner");
  const Vector& m = pi.mass();
  double acc = 0.0;
  for (Eigen::Index x = 0; x < m.size(); ++x) {
    detail::require(m[x] > 0.0, ErrorKind::ZeroStationaryMass, "pi has a zero entry");
    acc += u[x] * w[x] / m[x];
  }
  return acc;
}

inline double pi_norm(const Vector& u, const Distribution& pi) { return std::sqrt(pi_inner(u, u, pi)); }

/// Coordinates of a distribution in the left eigenbasis: alpha_i = <u_i, mu>_pi.
struct SpectralCoefficients {
  Vector alphas;
  const SpectralDecomposition* basis = nullptr;

  /// sum_i alpha_i u_i.
  Vector reconstruct() const { return basis->left * alphas; }
};

inline SpectralCoefficients spectral_coefficients(const Distribution& mu, const SpectralDecomposition& s) {
  require_same_size(mu.size(), s.size(), "spectral_coefficients");
  // <u_i, mu>_pi = sum_x v_{i,x} mu_x since u_i = pi .* v_i.
  Vector alphas = s.right.transpose() * mu.mass();
  return {std::move(alphas), &s};
}

/// One eigenmode's contribution to the squared pi-distance between two evolved
/// distributions: weight * |lambda|^(2t).
struct DecayMode {
  double eigenvalue = 0.0;
  double weight = 0.0;
};

/// Delta(t) = ||mu P^t - mu' P^t||_pi^2 = sum_{i>=2} lambda_i^{2t} (alpha_i - alpha'_i)^2
/// as a sum over modes, so it can be evaluated at any t without re-projecting.
class DecayProfile {
 public:
  DecayProfile() = default;
  explicit DecayProfile(std::vector<DecayMode> modes) : modes_(std::move(modes)) {}

  const std::vector<DecayMode>& modes() const noexcept { return modes_; }

  double at(std::size_t t) const {
    double acc = 0.0;
    for (const auto& m : modes_) acc += m.weight * mode_factor(m.eigenvalue, t);
    return acc;
  }

  double initial() const { return at(0); }

  /// lim_{t->inf} Delta(t) over even t: the mass carried by |lambda| = 1 modes.
  double persistent(double unit_tol = 1e-12) const {
    double acc = 0.0;
    for (const auto& m : modes_) {
      if (std::abs(std::abs(m.eigenvalue) - 1.0) <= unit_tol) acc += m.weight;
    }
    return acc;
  }

  /// |lambda|^(2t), with modes below kDeadEigenvalue killed after one step.
  static double mode_factor(double eigenvalue, std::size_t t) {
    if (t == 0) return 1.0;
    const double a = std::abs(eigenvalue);
    if (a < kDeadEigenvalue) return 0.0;
    return std::pow(a, 2.0 * static_cast<double>(t));
  }

 private:
  std::vector<DecayMode> modes_;
};

inline DecayProfile decay_profile(const Distribution& mu, const Distribution& mu_prime,
                                  const SpectralDecomposition& s) {
  require_same_size(mu.size(), s.size(), "decay_profile");
  require_same_size(mu_prime.size(), s.size(), "decay_profile");
  const Vector diff = s.right.transpose() * (mu.mass() - mu_prime.mass());
  const double total = diff.tail(diff.size() - 1).squaredNorm();
  const double floor = kCoefficientNoise * kCoefficientNoise * total;
  std::vector<DecayMode> modes;
  modes.reserve(static_cast<std::size_t>(diff.size()) - 1);
  for (Eigen::Index i = 1; i < diff.size(); ++i) {
    const double w = diff[i] * diff[i];
    if (w > floor) modes.push_back({s.eigenvalues[i], w});
  }
  return DecayProfile(std::move(modes));
}

/// Delta(t) = ||mu_t - mu'_t||_pi^2 evaluated in closed form from the spectrum.
inline double decay_distance_sq(const Distribution& mu, const Distribution& mu_prime,
                                const SpectralDecomposition& s, std::size_t t) {
  return decay_profile(mu, mu_prime, s).at(t);
}

}  // namespace mw
