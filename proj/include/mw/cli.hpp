#pragma once

// Subcommand implementations behind the mwin executable. Each command writes
// its report to an ostream so it can be exercised in-process.

#include <cstdint>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mw/chain.hpp"
#include "mw/complexity.hpp"
#include "mw/error.hpp"
#include "mw/io.hpp"
#include "mw/montecarlo.hpp"
#include "mw/pi_geometry.hpp"
#include "mw/spectral.hpp"

namespace mw::cli {

using json = nlohmann::json;

/// Bad or inconsistent command-line configuration (exit status 1).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Format { Csv, Json };

struct RunConfig {
  std::string command;
  std::string chain;
  std::optional<std::string> mu;
  std::optional<std::string> mu_prime;
  std::optional<std::string> gamma;
  std::optional<std::string> gamma_prime;
  std::string t = "0";
  std::string n;
  double epsilon = 0.5;
  double delta = 0.1;
  double eta = kDefaultEta;
  std::optional<double> threshold;
  std::uint64_t trials = 2000;
  std::uint64_t seed = 0;
  Format format = Format::Csv;
  std::string out;  // empty: stdout
};

namespace detail {

/// "5", "0:10", "0:20:5" (inclusive) or "0,2,5".
inline std::vector<std::uint64_t> parse_list(const std::string& spec, const char* what) {
  auto num = [&](const std::string& s) -> std::uint64_t {
    try {
      std::size_t used = 0;
      if (!s.empty() && s[0] == '-') throw std::invalid_argument(s);
      const auto v = std::stoull(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::logic_error&) {
      throw UsageError(std::string("bad ") + what + " value '" + s + "'");
    }
  };
  std::vector<std::uint64_t> out;
  if (spec.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    std::string p;
    while (std::getline(ss, p, ':')) parts.push_back(p);
    if (parts.size() < 2 || parts.size() > 3) throw UsageError(std::string("bad ") + what + " range '" + spec + "'");
    const auto lo = num(parts[0]);
    const auto hi = num(parts[1]);
    const auto step = parts.size() == 3 ? num(parts[2]) : 1;
    if (step == 0 || hi < lo) throw UsageError(std::string("bad ") + what + " range '" + spec + "'");
    for (auto v = lo; v <= hi; v += step) out.push_back(v);
    return out;
  }
  std::stringstream ss(spec);
  std::string p;
  while (std::getline(ss, p, ',')) out.push_back(num(p));
  if (out.empty()) throw UsageError(std::string("missing ") + what);
  return out;
}

inline const std::string& need(const std::optional<std::string>& v, const char* flag) {
  if (!v) throw UsageError(std::string("missing required option ") + flag);
  return *v;
}

inline std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

inline void validate(const RunConfig& cfg) {
  if (cfg.chain.empty()) throw UsageError("missing required option --chain");
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) throw UsageError("--delta must lie in (0, 1)");
  if (!(cfg.epsilon > 0.0 && cfg.epsilon < 1.0)) throw UsageError("--epsilon must lie in (0, 1)");
  if (!(cfg.eta > 0.0 && cfg.eta < 1.0)) throw UsageError("--eta must lie in (0, 1)");
  if (cfg.threshold && !(*cfg.threshold > 0.0)) throw UsageError("--threshold must be positive");
}

}  // namespace detail

/// index,eigenvalue,abs_rank (both 1-based); JSON adds pi and eigenvector previews.
inline void cmd_spectrum(const RunConfig& cfg, std::ostream& out) {
  detail::validate(cfg);
  const auto chain = io::parse_chain_arg(cfg.chain);
  const auto s = spectral_decomposition(chain);
  std::vector<std::size_t> rank(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) rank[s.abs_order[k]] = k + 1;

  if (cfg.format == Format::Csv) {
    out << "index,eigenvalue,abs_rank\n";
    for (std::size_t i = 0; i < s.size(); ++i) {
      out << i + 1 << ',' << io::format_number(s.eigenvalue(i)) << ',' << rank[i] << '\n';
    }
    return;
  }
  constexpr Eigen::Index kPreview = 8;
  json rows = json::array();
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Vector u = s.left_vector(i);
    const Eigen::Index len = std::min<Eigen::Index>(kPreview, u.size());
    rows.push_back({{"index", i + 1},
                    {"eigenvalue", s.eigenvalue(i)},
                    {"abs_rank", rank[i]},
                    {"left_preview", detail::to_std(u.head(len))}});
  }
  out << json{{"d", s.size()}, {"stationary", detail::to_std(s.stationary.mass())}, {"eigenvalues", rows}}.dump(2)
      << '\n';
}

/// mu P^t (and mu' P^t when given) for each requested t.
inline void cmd_evolve(const RunConfig& cfg, std::ostream& out) {
  detail::validate(cfg);
  const auto chain = io::parse_chain_arg(cfg.chain);
  io::DistributionResolver resolve(chain, cfg.epsilon);
  const auto mu = resolve.resolve(detail::need(cfg.mu, "--mu"));
  std::optional<Distribution> mu_prime;
  if (cfg.mu_prime) mu_prime = resolve.resolve(*cfg.mu_prime);
  const auto ts = detail::parse_list(cfg.t, "t");

  json rows = json::array();
  if (cfg.format == Format::Csv) out << (mu_prime ? "t,state,mu_t,mu_prime_t\n" : "t,state,mu_t\n");
  for (auto t : ts) {
    const auto a = evolve(mu, chain, t);
    std::optional<Distribution> b;
    if (mu_prime) b = evolve(*mu_prime, chain, t);
    if (cfg.format == Format::Csv) {
      for (std::size_t x = 0; x < a.size(); ++x) {
        out << t << ',' << x << ',' << io::format_number(a[x]);
        if (b) out << ',' << io::format_number((*b)[x]);
        out << '\n';
      }
    } else {
      json row = {{"t", t}, {"mu_t", detail::to_std(a.mass())}};
      if (b) row["mu_prime_t"] = detail::to_std(b->mass());
      rows.push_back(std::move(row));
    }
  }
  if (cfg.format == Format::Json) out << rows.dump(2) << '\n';
}

/// Per-t sample complexity report for (mu, mu').
inline void cmd_complexity(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  detail::validate(cfg);
  const auto chain = io::parse_chain_arg(cfg.chain);
  io::DistributionResolver resolve(chain, cfg.epsilon);
  const auto mu = resolve.resolve(detail::need(cfg.mu, "--mu"));
  const auto mu_prime = resolve.resolve(detail::need(cfg.mu_prime, "--mu-prime"));
  const auto& s = resolve.spectrum();
  const auto profile = decay_profile(mu, mu_prime, s);
  const double eps = pairwise_epsilon(mu, mu_prime, s.stationary);
  const auto ts = detail::parse_list(cfg.t, "t");

  if (cfg.format == Format::Csv) {
    if (resolve.auto_alpha()) log << "alpha=" << io::format_number(*resolve.auto_alpha()) << '\n';
    out << "t,delta_t,n_upper,n_lower,n_star_scale\n";
    for (auto t : ts) {
      const auto r = complexity_report(s, profile, eps, t, cfg.delta, cfg.eta);
      out << t << ',' << io::format_number(r.delta_t) << ',' << io::format_number(r.n_upper) << ','
          << io::format_number(r.n_lower) << ',' << io::format_number(r.n_star_scale) << '\n';
    }
    return;
  }
  json reports = json::array();
  for (auto t : ts) reports.push_back(io::to_json(complexity_report(s, profile, eps, t, cfg.delta, cfg.eta)));
  json doc = {{"delta", cfg.delta}, {"reports", std::move(reports)}};
  if (resolve.auto_alpha()) doc["alpha"] = *resolve.auto_alpha();
  out << doc.dump(2) << '\n';
}

/// Normalized complexity ratio between pair A (default: extreme u_[2] pair) and
/// pair B (default: extreme u_[d] pair).
inline void cmd_window(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  detail::validate(cfg);
  const auto chain = io::parse_chain_arg(cfg.chain);
  io::DistributionResolver resolve(chain, cfg.epsilon);
  const auto& s = resolve.spectrum();
  std::optional<ExtremePairs> extremes;
  auto pair_or_extreme = [&](const std::optional<std::string>& a, const std::optional<std::string>& b,
                             bool second) -> std::pair<Distribution, Distribution> {
    if (a || b) return {resolve.resolve(detail::need(a, "pair")), resolve.resolve(detail::need(b, "pair"))};
    if (!extremes) extremes = extreme_pairs(s, cfg.epsilon);
    return second ? std::pair{extremes->mu, extremes->mu_prime} : std::pair{extremes->gamma, extremes->gamma_prime};
  };
  const auto pair_a = pair_or_extreme(cfg.mu, cfg.mu_prime, true);
  const auto pair_b = pair_or_extreme(cfg.gamma, cfg.gamma_prime, false);
  const auto prof_a = decay_profile(pair_a.first, pair_a.second, s);
  const auto prof_b = decay_profile(pair_b.first, pair_b.second, s);
  const auto ts = detail::parse_list(cfg.t, "t");

  if (cfg.format == Format::Csv) {
    if (extremes) log << "alpha=" << io::format_number(extremes->alpha) << '\n';
    out << "t,delta_a,delta_b,window\n";
    for (auto t : ts) {
      out << t << ',' << io::format_number(prof_a.at(t)) << ',' << io::format_number(prof_b.at(t)) << ','
          << io::format_number(statistical_window(prof_a, prof_b, t)) << '\n';
    }
    return;
  }
  json rows = json::array();
  for (auto t : ts) {
    rows.push_back({{"t", t},
                    {"delta_a", prof_a.at(t)},
                    {"delta_b", prof_b.at(t)},
                    {"window", io::number_json(statistical_window(prof_a, prof_b, t))}});
  }
  json doc = {{"lambda_2", s.eigenvalue(s.second_index())}, {"lambda_d", s.eigenvalue(s.last_index())}, {"rows", rows}};
  if (extremes) doc["alpha"] = extremes->alpha;
  out << doc.dump(2) << '\n';
}

/// First t at which n * Delta(t) drops to the threshold, per pair and n.
inline void cmd_time(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  detail::validate(cfg);
  if (cfg.n.empty()) throw UsageError("missing required option --n");
  const auto chain = io::parse_chain_arg(cfg.chain);
  io::DistributionResolver resolve(chain, cfg.epsilon);
  const auto& s = resolve.spectrum();
  struct Pair {
    std::string name;
    Distribution a;
    Distribution b;
  };
  std::vector<Pair> pairs;
  if (cfg.mu || cfg.mu_prime) {
    pairs.push_back({"custom", resolve.resolve(detail::need(cfg.mu, "--mu")),
                     resolve.resolve(detail::need(cfg.mu_prime, "--mu-prime"))});
  } else {
    const auto e = extreme_pairs(s, cfg.epsilon);
    log << "alpha=" << io::format_number(e.alpha) << '\n';
    pairs.push_back({"extreme_2", e.mu, e.mu_prime});
    pairs.push_back({"extreme_d", e.gamma, e.gamma_prime});
  }
  const auto ns = detail::parse_list(cfg.n, "n");

  json rows = json::array();
  if (cfg.format == Format::Csv) out << "pair,n,delta_0,threshold,t_star\n";
  for (const auto& p : pairs) {
    const auto profile = decay_profile(p.a, p.b, s);
    const double eps = pairwise_epsilon(p.a, p.b, s.stationary);
    double threshold = 0.0;
    if (cfg.threshold) {
      threshold = *cfg.threshold;
    } else {
      if (!(eps > 0.0)) throw Error(ErrorKind::InvalidParameter, "pair is not epsilon-bounded; pass --threshold");
      threshold = default_time_threshold(eps, cfg.delta);
    }
    for (auto n : ns) {
      const double t_star = statistical_time(s, p.a, p.b, static_cast<double>(n), threshold);
      if (cfg.format == Format::Csv) {
        out << p.name << ',' << n << ',' << io::format_number(profile.initial()) << ','
            << io::format_number(threshold) << ',' << io::format_number(t_star) << '\n';
      } else {
        rows.push_back({{"pair", p.name},
                        {"n", n},
                        {"delta_0", profile.initial()},
                        {"threshold", threshold},
                        {"t_star", io::number_json(t_star)}});
      }
    }
  }
  if (cfg.format == Format::Json) out << rows.dump(2) << '\n';
}

/// Monte Carlo error of the likelihood-ratio test. --n accepts "auto" for the
/// sufficient sample size at the pair's measured epsilon.
inline void cmd_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  detail::validate(cfg);
  if (cfg.trials < 100) throw UsageError("--trials must be at least 100");
  const auto chain = io::parse_chain_arg(cfg.chain);
  io::DistributionResolver resolve(chain, cfg.epsilon);
  const auto mu = resolve.resolve(detail::need(cfg.mu, "--mu"));
  const auto mu_prime = resolve.resolve(detail::need(cfg.mu_prime, "--mu-prime"));
  if (resolve.auto_alpha()) log << "alpha=" << io::format_number(*resolve.auto_alpha()) << '\n';
  const auto ts = detail::parse_list(cfg.t, "t");
  const bool auto_n = cfg.n.empty() || cfg.n == "auto";
  std::vector<std::uint64_t> fixed_ns;
  if (!auto_n) fixed_ns = detail::parse_list(cfg.n, "n");

  json rows = json::array();
  if (cfg.format == Format::Csv) out << "err_mu,err_mu_prime,err_max,trials,ci_halfwidth,n,t,seed\n";
  for (auto t : ts) {
    std::vector<std::uint64_t> ns = fixed_ns;
    if (auto_n) {
      const auto& s = resolve.spectrum();
      const double eps = pairwise_epsilon(mu, mu_prime, s.stationary);
      if (!(eps > 0.0)) throw Error(ErrorKind::InvalidParameter, "pair is not epsilon-bounded; pass --n");
      const double n = sample_upper_bound(decay_distance_sq(mu, mu_prime, s, t), eps, cfg.delta);
      if (!std::isfinite(n)) throw Error(ErrorKind::Infeasible, "pair is indistinguishable at t = " + std::to_string(t));
      ns = {static_cast<std::uint64_t>(n)};
    }
    for (auto n : ns) {
      if (n == 0) throw UsageError("--n must be >= 1");
      const TestingInstance inst(chain, mu, mu_prime, t);
      const auto e = estimate_error(inst, n, cfg.trials, cfg.seed);
      if (cfg.format == Format::Csv) {
        out << io::format_number(e.err_mu) << ',' << io::format_number(e.err_mu_prime) << ','
            << io::format_number(e.err_max) << ',' << e.trials << ',' << io::format_number(e.ci_halfwidth) << ',' << n
            << ',' << t << ',' << cfg.seed << '\n';
      } else {
        rows.push_back(io::to_json(e, n, t, cfg.seed));
      }
    }
  }
  if (cfg.format == Format::Json) out << (rows.size() == 1 ? rows[0] : rows).dump(2) << '\n';
}

/// Chain families accepted by --chain.
inline void cmd_zoo_list(const RunConfig& cfg, std::ostream& out) {
  struct Entry {
    const char* family;
    const char* fields;
    const char* example;
  };
  static constexpr Entry entries[] = {
      {"explicit", "matrix", R"({"type":"explicit","matrix":[[0.7,0.3],[0.1,0.9]]})"},
      {"cycle", "d", R"({"type":"cycle","d":8})"},
      {"line", "d", R"({"type":"line","d":5})"},
      {"bipartite_clique", "d", R"({"type":"bipartite_clique","d":6})"},
      {"hypercube", "k", R"({"type":"hypercube","k":3})"},
      {"hypercube_product", "k weights p q",
       R"({"type":"hypercube_product","k":2,"weights":[0.5,0.5],"p":[0.3,0.5],"q":[0.1,0.5]})"},
      {"blockmodel2", "d intra_degree inter_degree", R"({"type":"blockmodel2","d":16,"intra_degree":7,"inter_degree":1})"},
      {"pachinko", "r betas", R"({"type":"pachinko","r":3,"betas":[0.4,0.3,0.2,0.1]})"},
      {"random_chain", "d seed weight_law", R"({"type":"random_chain","d":100,"seed":42,"weight_law":"uniform01"})"},
      {"lazy", "q base", R"({"type":"lazy","q":0.5,"base":{"type":"cycle","d":4}})"},
  };
  if (cfg.format == Format::Csv) {
    out << "family,fields,example\n";
    for (const auto& e : entries) {
      std::string quoted = e.example;
      std::string escaped;
      for (char c : quoted) escaped += c == '"' ? std::string("\"\"") : std::string(1, c);
      out << e.family << ',' << e.fields << ",\"" << escaped << "\"\n";
    }
    return;
  }
  json rows = json::array();
  for (const auto& e : entries) rows.push_back({{"family", e.family}, {"fields", e.fields}, {"example", json::parse(e.example)}});
  out << rows.dump(2) << '\n';
}

/// Exit status: 0 success, 1 usage error, 2 domain error, 3 budget exceeded.
inline int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse: return 1;
    case ErrorKind::BudgetExceeded: return 3;
    default: return 2;
  }
}

/// Dispatches cfg.command; report goes to `out`, diagnostics to `log`.
inline int run(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  try {
    if (cfg.command == "spectrum") cmd_spectrum(cfg, out);
    else if (cfg.command == "evolve") cmd_evolve(cfg, out);
    else if (cfg.command == "complexity") cmd_complexity(cfg, out, log);
    else if (cfg.command == "window") cmd_window(cfg, out, log);
    else if (cfg.command == "time") cmd_time(cfg, out, log);
    else if (cfg.command == "simulate") cmd_simulate(cfg, out, log);
    else if (cfg.command == "zoo-list") cmd_zoo_list(cfg, out);
    else throw UsageError("unknown command '" + cfg.command + "'");
  } catch (const UsageError& e) {
    log << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const Error& e) {
    log << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  }
  return 0;
}

}  // namespace mw::cli
