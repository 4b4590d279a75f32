#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "mw/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"mwin: sample complexity of testing initial distributions of reversible Markov chains"};
  app.require_subcommand(1);

  mw::cli::RunConfig cfg;
  std::string format = "csv";
  double threshold = 0.0;

  const std::map<std::string, std::string> commands = {
      {"spectrum", "eigenvalues and |lambda| ranks of the chain"},
      {"evolve", "distribution after t steps"},
      {"complexity", "sample complexity bounds per t"},
      {"window", "statistical window between two pairs"},
      {"time", "statistical time for given sample sizes"},
      {"simulate", "Monte Carlo error of the likelihood-ratio test"},
      {"zoo-list", "list chain families"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--out", cfg.out, "output file (default stdout)");
    if (name == "zoo-list") continue;
    sub->add_option("--chain", cfg.chain, "chain spec: inline JSON or file path")->required();
    sub->add_option("--epsilon", cfg.epsilon, "epsilon target for extreme:...:auto pairs");
    if (name == "spectrum") continue;
    sub->add_option("--mu", cfg.mu, "distribution spec: p0,p1,... | stationary | point:<i> | extreme:[2]|[d]:<alpha|auto>:<+|->");
    sub->add_option("--mu-prime", cfg.mu_prime, "second distribution spec");
    sub->add_option("--t", cfg.t, "time: 5 | 0:10 | 0:20:5 | 0,2,5");
    if (name == "window") {
      sub->add_option("--gamma", cfg.gamma, "first distribution of pair B");
      sub->add_option("--gamma-prime", cfg.gamma_prime, "second distribution of pair B");
    }
    if (name == "complexity" || name == "time" || name == "simulate") {
      sub->add_option("--delta", cfg.delta, "target error probability");
    }
    if (name == "complexity") sub->add_option("--eta", cfg.eta, "centering weight for unbounded pairs");
    if (name == "time" || name == "simulate") sub->add_option("--n", cfg.n, "sample size(s); simulate accepts auto");
    if (name == "time") sub->add_option("--threshold", threshold, "crossing threshold (default 8 eps delta^2)");
    if (name == "simulate") {
      sub->add_option("--trials", cfg.trials, "trials per hypothesis");
      sub->add_option("--seed", cfg.seed, "RNG seed");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  cfg.command = app.get_subcommands().front()->get_name();
  cfg.format = format == "json" ? mw::cli::Format::Json : mw::cli::Format::Csv;
  if (threshold > 0.0) cfg.threshold = threshold;

  if (cfg.out.empty()) return mw::cli::run(cfg, std::cout, std::cerr);
  std::ofstream file(cfg.out, std::ios::binary);
  if (!file) {
    std::cerr << "usage error: cannot open output file '" << cfg.out << "'\n";
    return 1;
  }
  return mw::cli::run(cfg, file, std::cerr);
}
