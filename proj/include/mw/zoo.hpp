#pragma once

// Chain families with known spectra, used as exact oracles.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "mw/chain.hpp"
#include "mw/error.hpp"

namespace mw::zoo {

struct Cycle {
  std::size_t d = 3;
};
struct Line {
  std::size_t d = 3;
};
struct BipartiteClique {
  std::size_t d = 4;
};
struct Hypercube {
  std::size_t k = 1;
};
/// Coordinate i is refreshed with probability weights[i] by the two-state
/// chain P(-1 -> 1) = p[i], P(1 -> -1) = q[i].
struct HypercubeProduct {
  std::size_t k = 1;
  std::vector<double> weights;
  std::vector<double> p;
  std::vector<double> q;
};
/// Two equal blocks; every node has intra_degree neighbours in its own block
/// and inter_degree in the other.
struct Blockmodel2 {
  std::size_t d = 4;
  std::size_t intra_degree = 1;
  std::size_t inter_degree = 1;
};
struct Pachinko {
  std::size_t r = 1;
  std::vector<double> betas;
};
enum class WeightLaw { Uniform01, Exponential1 };
struct RandomChain {
  std::size_t d = 2;
  std::uint64_t seed = 0;
  WeightLaw weight_law = WeightLaw::Uniform01;
};

using ZooSpec = std::variant<Cycle, Line, BipartiteClique, Hypercube, HypercubeProduct, Blockmodel2, Pachinko, RandomChain>;

namespace detail {
using mw::detail::require;

inline Matrix adjacency_walk(const Matrix& adjacency) {
  Matrix p = adjacency;
  for (Eigen::Index i = 0; i < p.rows(); ++i) p.row(i) /= p.row(i).sum();
  return p;
}

inline double uniform_open01(std::mt19937_64& rng) {
  // 53 random bits, shifted off zero.
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}
}  // namespace detail

/// Simple random walk on the d-cycle: step to either neighbour with probability 1/2.
inline TransitionMatrix cycle(std::size_t d) {
  detail::require(d >= 3, ErrorKind::InvalidParameter, "cycle needs d >= 3");
  const auto n = static_cast<Eigen::Index>(d);
  Matrix p = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    p(i, (i + 1) % n) += 0.5;
    p(i, (i + n - 1) % n) += 0.5;
  }
  return TransitionMatrix(std::move(p));
}

/// Walk on the path 0 - 1 - ... - (d-1), reflecting deterministically at the ends.
inline TransitionMatrix line(std::size_t d) {
  detail::require(d >= 3, ErrorKind::InvalidParameter, "line needs d >= 3");
  const auto n = static_cast<Eigen::Index>(d);
  Matrix p = Matrix::Zero(n, n);
  p(0, 1) = 1.0;
  p(n - 1, n - 2) = 1.0;
  for (Eigen::Index i = 1; i + 1 < n; ++i) {
    p(i, i - 1) = 0.5;
    p(i, i + 1) = 0.5;
  }
  return TransitionMatrix(std::move(p));
}

/// Complete bipartite graph between L = {0..d/2-1} and R = {d/2..d-1}.
inline TransitionMatrix bipartite_clique(std::size_t d) {
  detail::require(d >= 4 && d % 2 == 0, ErrorKind::InvalidParameter, "bipartite clique needs even d >= 4");
  const auto n = static_cast<Eigen::Index>(d);
  const auto half = n / 2;
  Matrix p = Matrix::Zero(n, n);
  p.topRightCorner(half, half).setConstant(2.0 / static_cast<double>(d));
  p.bottomLeftCorner(half, half).setConstant(2.0 / static_cast<double>(d));
  return TransitionMatrix(std::move(p));
}

/// Product chain on {-1, 1}^k. State s encodes x_i = +1 iff bit i of s is set.
inline TransitionMatrix hypercube_product(const HypercubeProduct& spec) {
  const std::size_t k = spec.k;
  detail::require(k >= 1 && k <= 20, ErrorKind::InvalidParameter, "hypercube product needs 1 <= k <= 20");
  detail::require(spec.weights.size() == k && spec.p.size() == k && spec.q.size() == k, ErrorKind::InvalidParameter,
                  "hypercube product needs k weights, p and q values");
  double wsum = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    detail::require(spec.weights[i] > 0.0, ErrorKind::InvalidParameter, "product weights must be positive");
    detail::require(spec.p[i] > 0.0 && spec.p[i] <= 1.0 && spec.q[i] > 0.0 && spec.q[i] <= 1.0,
                    ErrorKind::InvalidParameter, "two-state parameters p, q must lie in (0, 1]");
    wsum += spec.weights[i];
  }
  detail::require(std::abs(wsum - 1.0) <= 1e-12, ErrorKind::InvalidParameter, "product weights must sum to 1");

  const auto n = static_cast<Eigen::Index>(std::size_t{1} << k);
  Matrix m = Matrix::Zero(n, n);
  for (Eigen::Index s = 0; s < n; ++s) {
    for (std::size_t i = 0; i < k; ++i) {
      const bool up = (static_cast<std::size_t>(s) >> i) & 1U;
      const double flip = up ? spec.q[i] : spec.p[i];
      m(s, s ^ static_cast<Eigen::Index>(std::size_t{1} << i)) += spec.weights[i] * flip;
      m(s, s) += spec.weights[i] * (1.0 - flip);
    }
  }
  return TransitionMatrix(std::move(m));
}

/// Standard walk on the k-cube: flip a uniformly chosen coordinate (probability 1/k each).
inline TransitionMatrix hypercube(std::size_t k) {
  detail::require(k >= 1 && k <= 20, ErrorKind::InvalidParameter, "hypercube needs 1 <= k <= 20");
  const auto n = static_cast<Eigen::Index>(std::size_t{1} << k);
  Matrix m = Matrix::Zero(n, n);
  const double w = 1.0 / static_cast<double>(k);
  for (Eigen::Index s = 0; s < n; ++s) {
    for (std::size_t i = 0; i < k; ++i) m(s, s ^ static_cast<Eigen::Index>(std::size_t{1} << i)) = w;
  }
  return TransitionMatrix(std::move(m));
}

/// Deterministic regular two-block graph. Within a block of size m = d/2,
/// node i links to i +- 1..floor(a/2) (mod m), plus i + m/2 when a is odd;
/// across blocks, i links to j when (j - i) mod m < b.
inline TransitionMatrix blockmodel2(const Blockmodel2& spec) {
  const std::size_t d = spec.d;
  const std::size_t a = spec.intra_degree;
  const std::size_t b = spec.inter_degree;
  detail::require(d >= 4 && d % 2 == 0, ErrorKind::InvalidParameter, "blockmodel needs even d >= 4");
  const std::size_t m = d / 2;
  detail::require(b >= 1 && b <= m, ErrorKind::InvalidParameter, "inter-block degree must lie in [1, d/2]");
  detail::require(a < m, ErrorKind::InvalidParameter, "intra-block degree must be below d/2");
  detail::require(a % 2 == 0 || m % 2 == 0, ErrorKind::InvalidParameter,
                  "odd intra-block degree needs an even block size");

  const auto n = static_cast<Eigen::Index>(d);
  Matrix adj = Matrix::Zero(n, n);
  auto link = [&](std::size_t u, std::size_t v) { adj(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v)) = 1.0; };
  for (std::size_t block = 0; block < 2; ++block) {
    const std::size_t base = block * m;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t off = 1; off <= a / 2; ++off) {
        link(base + i, base + (i + off) % m);
        link(base + i, base + (i + m - off) % m);
      }
      if (a % 2 == 1) link(base + i, base + (i + m / 2) % m);
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t off = 0; off < b; ++off) {
      link(i, m + (i + off) % m);
      link(m + (i + off) % m, i);
    }
  }
  const double degree = static_cast<double>(a + b);
  for (Eigen::Index i = 0; i < n; ++i) {
    detail::require(adj.row(i).sum() == degree, ErrorKind::InvalidParameter, "blockmodel construction is not regular");
  }
  return TransitionMatrix(detail::adjacency_walk(adj));
}

/// Walk on the 2^r leaves of a dyadic tree. Leaves whose first common ancestor
/// sits at height l >= 1 are joined with probability betas[l] / 2^(l-1); the
/// diagonal carries betas[0].
inline TransitionMatrix pachinko(std::size_t r, const std::vector<double>& betas) {
  detail::require(r >= 1 && r <= 16, ErrorKind::InvalidParameter, "pachinko needs 1 <= r <= 16");
  detail::require(betas.size() == r + 1, ErrorKind::InvalidParameter, "pachinko needs r + 1 betas");
  double sum = 0.0;
  for (std::size_t l = 0; l <= r; ++l) {
    detail::require(betas[l] > 0.0, ErrorKind::InvalidParameter, "pachinko betas must be positive");
    if (l > 0) detail::require(betas[l] < betas[l - 1], ErrorKind::InvalidParameter, "pachinko betas must decrease strictly");
    sum += betas[l];
  }
  detail::require(std::abs(sum - 1.0) <= 1e-12, ErrorKind::InvalidParameter, "pachinko betas must sum to 1");

  const std::size_t d = std::size_t{1} << r;
  const auto n = static_cast<Eigen::Index>(d);
  Matrix p(n, n);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const auto height = static_cast<std::size_t>(std::bit_width(i ^ j));
      p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          height == 0 ? betas[0] : betas[height] / static_cast<double>(std::size_t{1} << (height - 1));
    }
  }
  return TransitionMatrix(std::move(p));
}

/// Complete-graph random conductances (self-loops included) normalized per row.
inline TransitionMatrix random_chain(const RandomChain& spec) {
  detail::require(spec.d >= 2, ErrorKind::InvalidParameter, "random chain needs d >= 2");
  const auto n = static_cast<Eigen::Index>(spec.d);
  std::mt19937_64 rng(spec.seed);
  Matrix u(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const double x = detail::uniform_open01(rng);
      const double w = spec.weight_law == WeightLaw::Uniform01 ? x : -std::log(x);
      u(i, j) = w;
      u(j, i) = w;
    }
  }
  return TransitionMatrix(detail::adjacency_walk(u));
}

inline TransitionMatrix build(const ZooSpec& spec) {
  return std::visit(
      [](const auto& s) -> TransitionMatrix {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Cycle>) return cycle(s.d);
        else if constexpr (std::is_same_v<T, Line>) return line(s.d);
        else if constexpr (std::is_same_v<T, BipartiteClique>) return bipartite_clique(s.d);
        else if constexpr (std::is_same_v<T, Hypercube>) return hypercube(s.k);
        else if constexpr (std::is_same_v<T, HypercubeProduct>) return hypercube_product(s);
        else if constexpr (std::is_same_v<T, Blockmodel2>) return blockmodel2(s);
        else if constexpr (std::is_same_v<T, Pachinko>) return pachinko(s.r, s.betas);
        else return random_chain(s);
      },
      spec);
}

// Closed-form spectra, as unsorted multisets.

inline std::vector<double> cycle_spectrum(std::size_t d) {
  std::vector<double> out(d);
  for (std::size_t i = 0; i < d; ++i) out[i] = std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(d));
  return out;
}

inline std::vector<double> line_spectrum(std::size_t d) {
  std::vector<double> out(d);
  for (std::size_t i = 0; i < d; ++i) out[i] = std::cos(std::numbers::pi * static_cast<double>(i) / static_cast<double>(d - 1));
  return out;
}

inline std::vector<double> bipartite_clique_spectrum(std::size_t d) {
  std::vector<double> out(d, 0.0);
  out[0] = 1.0;
  out[1] = -1.0;
  return out;
}

/// 1 - sum_{i in S} w_i (p_i + q_i) over all subsets S.
inline std::vector<double> hypercube_product_spectrum(const HypercubeProduct& spec) {
  const std::size_t n = std::size_t{1} << spec.k;
  std::vector<double> out(n);
  for (std::size_t subset = 0; subset < n; ++subset) {
    double v = 1.0;
    for (std::size_t i = 0; i < spec.k; ++i) {
      if ((subset >> i) & 1U) v -= spec.weights[i] * (spec.p[i] + spec.q[i]);
    }
    out[subset] = v;
  }
  return out;
}

/// 1 - 2j/k with multiplicity C(k, j).
inline std::vector<double> hypercube_spectrum(std::size_t k) {
  const std::size_t n = std::size_t{1} << k;
  std::vector<double> out(n);
  for (std::size_t subset = 0; subset < n; ++subset) {
    out[subset] = 1.0 - 2.0 * static_cast<double>(std::popcount(subset)) / static_cast<double>(k);
  }
  return out;
}

/// gamma_1 = 1 and, for 2 <= k <= r+1, gamma_k = beta_0 + ... + beta_{r+1-k} - beta_{r+2-k}
/// with multiplicity 2^(k-2).
inline std::vector<double> pachinko_spectrum(std::size_t r, const std::vector<double>& betas) {
  std::vector<double> out{1.0};
  for (std::size_t k = 2; k <= r + 1; ++k) {
    double g = -betas[r + 2 - k];
    for (std::size_t l = 0; l <= r + 1 - k; ++l) g += betas[l];
    out.insert(out.end(), std::size_t{1} << (k - 2), g);
  }
  return out;
}

/// Eigenvalue of the block-sign vector: (a - b) / (a + b) in degree units.
inline double blockmodel2_block_eigenvalue(const Blockmodel2& spec) {
  const double a = static_cast<double>(spec.intra_degree);
  const double b = static_cast<double>(spec.inter_degree);
  return (a - b) / (a + b);
}

inline std::string family_name(const ZooSpec& spec) {
  static constexpr const char* names[] = {"cycle",        "line",      "bipartite_clique", "hypercube",
                                          "hypercube_product", "blockmodel2", "pachinko", "random_chain"};
  return names[spec.index()];
}

}  // namespace mw::zoo
