#pragma once

// JSON chain specs and textual distribution specs.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <variant>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mw/chain.hpp"
#include "mw/complexity.hpp"
#include "mw/error.hpp"
#include "mw/montecarlo.hpp"
#include "mw/spectral.hpp"
#include "mw/zoo.hpp"

namespace mw::io {

using json = nlohmann::json;

/// 17 significant digits, "inf" for infinities.
inline std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// JSON number, or the string "inf" when not finite.
inline json number_json(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

namespace detail {
using mw::detail::fail;
using mw::detail::require;

template <typename T>
T field(const json& j, const char* name) {
  require(j.contains(name), ErrorKind::Parse, std::string("chain spec is missing field '") + name + "'");
  try {
    return j.at(name).get<T>();
  } catch (const json::exception& e) {
    fail(ErrorKind::Parse, std::string("bad field '") + name + "': " + e.what());
  }
}

inline zoo::WeightLaw parse_weight_law(const std::string& s) {
  if (s == "uniform01") return zoo::WeightLaw::Uniform01;
  if (s == "exponential1") return zoo::WeightLaw::Exponential1;
  fail(ErrorKind::Parse, "unknown weight_law '" + s + "'");
}
}  // namespace detail

inline json to_json(const zoo::ZooSpec& spec) {
  return std::visit(
      [](const auto& s) -> json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, zoo::Cycle>) return {{"type", "cycle"}, {"d", s.d}};
        else if constexpr (std::is_same_v<T, zoo::Line>) return {{"type", "line"}, {"d", s.d}};
        else if constexpr (std::is_same_v<T, zoo::BipartiteClique>) return {{"type", "bipartite_clique"}, {"d", s.d}};
        else if constexpr (std::is_same_v<T, zoo::Hypercube>) return {{"type", "hypercube"}, {"k", s.k}};
        else if constexpr (std::is_same_v<T, zoo::HypercubeProduct>)
          return {{"type", "hypercube_product"}, {"k", s.k}, {"weights", s.weights}, {"p", s.p}, {"q", s.q}};
        else if constexpr (std::is_same_v<T, zoo::Blockmodel2>)
          return {{"type", "blockmodel2"}, {"d", s.d}, {"intra_degree", s.intra_degree}, {"inter_degree", s.inter_degree}};
        else if constexpr (std::is_same_v<T, zoo::Pachinko>) return {{"type", "pachinko"}, {"r", s.r}, {"betas", s.betas}};
        else
          return {{"type", "random_chain"},
                  {"d", s.d},
                  {"seed", s.seed},
                  {"weight_law", s.weight_law == zoo::WeightLaw::Uniform01 ? "uniform01" : "exponential1"}};
      },
      spec);
}

/// Parses a zoo reference; returns false (leaving `out` untouched) for other types.
inline bool parse_zoo(const json& j, zoo::ZooSpec& out) {
  const auto type = detail::field<std::string>(j, "type");
  using detail::field;
  if (type == "cycle") out = zoo::Cycle{field<std::size_t>(j, "d")};
  else if (type == "line") out = zoo::Line{field<std::size_t>(j, "d")};
  else if (type == "bipartite_clique") out = zoo::BipartiteClique{field<std::size_t>(j, "d")};
  else if (type == "hypercube") out = zoo::Hypercube{field<std::size_t>(j, "k")};
  else if (type == "hypercube_product")
    out = zoo::HypercubeProduct{field<std::size_t>(j, "k"), field<std::vector<double>>(j, "weights"),
                                field<std::vector<double>>(j, "p"), field<std::vector<double>>(j, "q")};
  else if (type == "blockmodel2")
    out = zoo::Blockmodel2{field<std::size_t>(j, "d"), field<std::size_t>(j, "intra_degree"),
                           field<std::size_t>(j, "inter_degree")};
  else if (type == "pachinko") out = zoo::Pachinko{field<std::size_t>(j, "r"), field<std::vector<double>>(j, "betas")};
  else if (type == "random_chain")
    out = zoo::RandomChain{field<std::size_t>(j, "d"), j.value("seed", std::uint64_t{0}),
                           detail::parse_weight_law(j.value("weight_law", std::string("uniform01")))};
  else return false;
  return true;
}

/// Chain from a JSON spec: {"type":"explicit","matrix":[[...]]}, any zoo
/// family, or {"type":"lazy","q":..,"base":{...}}.
inline TransitionMatrix parse_chain(const json& j) {
  detail::require(j.is_object(), ErrorKind::Parse, "chain spec must be a JSON object");
  const auto type = detail::field<std::string>(j, "type");
  if (type == "explicit") {
    const auto rows = detail::field<std::vector<std::vector<double>>>(j, "matrix");
    detail::require(!rows.empty(), ErrorKind::Parse, "explicit matrix is empty");
    const auto d = static_cast<Eigen::Index>(rows.size());
    Matrix m(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
      detail::require(static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) == d, ErrorKind::Parse,
                      "explicit matrix must be square");
      for (Eigen::Index k = 0; k < d; ++k) m(i, k) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
    }
    return TransitionMatrix(std::move(m));
  }
  if (type == "lazy") {
    detail::require(j.contains("base"), ErrorKind::Parse, "lazy chain spec needs a 'base'");
    return lazy(parse_chain(j.at("base")), detail::field<double>(j, "q"));
  }
  zoo::ZooSpec spec;
  detail::require(parse_zoo(j, spec), ErrorKind::Parse, "unknown chain type '" + type + "'");
  return zoo::build(spec);
}

/// Inline JSON (starting with '{') or a path to a JSON file.
inline TransitionMatrix parse_chain_arg(const std::string& arg) {
  std::string text = arg;
  const auto first = arg.find_first_not_of(" \t\r\n");
  if (first == std::string::npos || arg[first] != '{') {
    std::ifstream in(arg);
    detail::require(static_cast<bool>(in), ErrorKind::Parse, "cannot open chain file '" + arg + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    detail::fail(ErrorKind::Parse, std::string("invalid chain JSON: ") + e.what());
  }
  return parse_chain(j);
}

inline json matrix_json(const TransitionMatrix& p) {
  json rows = json::array();
  for (std::size_t i = 0; i < p.size(); ++i) {
    json row = json::array();
    for (std::size_t k = 0; k < p.size(); ++k) row.push_back(p(i, k));
    rows.push_back(std::move(row));
  }
  return {{"type", "explicit"}, {"matrix", std::move(rows)}};
}

/// Resolves textual distribution specs against a chain.
///
///   "0.2,0.3,0.5" or "[0.2,0.3,0.5]"   explicit vector
///   "stationary"                       pi
///   "point:<i>"                        point mass on state i
///   "extreme:[2]|[d]:<alpha|auto>:<+|->"  pi +- alpha u_[2] or u_[d]
///
/// "auto" takes alpha from extreme_pairs at the configured epsilon target.
class DistributionResolver {
 public:
  DistributionResolver(const TransitionMatrix& chain, double eps_target) : chain_(chain), eps_target_(eps_target) {}

  const SpectralDecomposition& spectrum() {
    if (!spectrum_) spectrum_ = spectral_decomposition(chain_);
    return *spectrum_;
  }

  /// alpha chosen by the last "auto" resolution, if any.
  std::optional<double> auto_alpha() const { return auto_alpha_; }

  Distribution resolve(std::string_view spec) {
    const std::string s(spec);
    if (s == "stationary") return spectrum().stationary;
    if (s.rfind("point:", 0) == 0) {
      return Distribution::point_mass(chain_.size(), parse_index(s.substr(6)));
    }
    if (s.rfind("extreme:", 0) == 0) return resolve_extreme(s.substr(8));
    return explicit_vector(s);
  }

 private:
  static std::size_t parse_index(const std::string& s) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(s, &used);
      detail::require(used == s.size(), ErrorKind::Parse, "bad state index '" + s + "'");
      return static_cast<std::size_t>(v);
    } catch (const std::logic_error&) {
      detail::fail(ErrorKind::Parse, "bad state index '" + s + "'");
    }
  }

  Distribution explicit_vector(std::string s) {
    if (!s.empty() && s.front() == '[') s = s.substr(1);
    if (!s.empty() && s.back() == ']') s.pop_back();
    std::vector<double> values;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(item, &used));
        const auto rest = item.find_first_not_of(" \t", used);
        detail::require(rest == std::string::npos, ErrorKind::Parse, "bad probability '" + item + "'");
      } catch (const std::logic_error&) {
        detail::fail(ErrorKind::Parse, "bad distribution spec '" + s + "'");
      }
    }
    require_same_size(values.size(), chain_.size(), "distribution spec");
    return Distribution(Vector(Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()))));
  }

  Distribution resolve_extreme(const std::string& rest) {
    // <which>:<alpha|auto>:<sign>
    const auto c1 = rest.find(':');
    const auto c2 = rest.find(':', c1 == std::string::npos ? c1 : c1 + 1);
    detail::require(c1 != std::string::npos && c2 != std::string::npos, ErrorKind::Parse,
                    "extreme spec must be extreme:[2]|[d]:<alpha|auto>:<+|->");
    const std::string which = rest.substr(0, c1);
    const std::string alpha_s = rest.substr(c1 + 1, c2 - c1 - 1);
    const std::string sign_s = rest.substr(c2 + 1);
    detail::require(which == "[2]" || which == "[d]", ErrorKind::Parse, "extreme eigenvector must be [2] or [d]");
    detail::require(sign_s == "+" || sign_s == "-", ErrorKind::Parse, "extreme sign must be + or -");

    const auto& s = spectrum();
    double alpha = 0.0;
    if (alpha_s == "auto") {
      alpha = extreme_pairs(s, eps_target_).alpha;
      auto_alpha_ = alpha;
    } else {
      try {
        alpha = std::stod(alpha_s);
      } catch (const std::logic_error&) {
        detail::fail(ErrorKind::Parse, "bad alpha '" + alpha_s + "'");
      }
    }
    const std::size_t idx = which == "[2]" ? s.second_index() : s.last_index();
    const double signed_alpha = sign_s == "+" ? alpha : -alpha;
    return Distribution(s.stationary.mass() + signed_alpha * s.left_vector(idx));
  }

  const TransitionMatrix& chain_;
  double eps_target_;
  std::optional<SpectralDecomposition> spectrum_;
  std::optional<double> auto_alpha_;
};

inline json to_json(const ComplexityReport& r) {
  json summary = {{"d", r.d},
                  {"lambda_2", r.lambda_2},
                  {"lambda_d", r.lambda_d},
                  {"multiplicity_2", r.multiplicity_2},
                  {"multiplicity_d", r.multiplicity_d}};
  return {{"t", r.t},
          {"delta_t", r.delta_t},
          {"epsilon", r.epsilon ? json(*r.epsilon) : json(nullptr)},
          {"n_upper", number_json(r.n_upper)},
          {"n_lower", number_json(r.n_lower)},
          {"n_star_scale", number_json(r.n_star_scale)},
          {"eigen_summary", std::move(summary)}};
}

inline json to_json(const ErrorEstimate& e, std::uint64_t n, std::size_t t, std::uint64_t seed) {
  return {{"err_mu", e.err_mu},
          {"err_mu_prime", e.err_mu_prime},
          {"err_max", e.err_max},
          {"trials", e.trials},
          {"ci_halfwidth", e.ci_halfwidth},
          {"n", n},
          {"t", t},
          {"seed", seed}};
}

}  // namespace mw::io
