#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "arp/cli.hpp"

// arp: Metropolis-Hastings with stationary AR(1) proposals. Subcommands run
// closed-form predictions, seeded chains, tuning rules, and the
// prediction-vs-simulation verification gate (exit 0 iff every row passes).

int main(int argc, char** argv) {
  CLI::App app{"Metropolis-Hastings with stationary AR(1) proposals"};
  app.require_subcommand(1);

  std::string configPath;
  std::string outPath;
  std::string format = "json";
  std::optional<std::uint64_t> seedOverride;
  std::optional<int> chainsOverride;

  auto* predict =
      app.add_subcommand("predict", "closed-form acceptance and jump-size predictions");
  auto* sample = app.add_subcommand("sample", "run seeded MH chains and report statistics");
  auto* tune = app.add_subcommand("tune", "optimal-tuning constants and efficiency curves");
  auto* verify =
      app.add_subcommand("verify", "compare predictions against chain statistics, 3-sigma gate");
  for (auto* sub : {predict, sample, tune, verify}) {
    sub->add_option("--config", configPath, "experiment config file (flat key = value lines)")
        ->required();
    sub->add_option("--out", outPath, "output path (stdout when omitted)");
    sub->add_option("--format", format, "output format")
        ->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--seed", seedOverride, "override chain.seed");
    sub->add_option("--chains", chainsOverride, "override chain.n_chains");
  }

  CLI11_PARSE(app, argc, argv);

  try {
    arp::cli::Config cfg = arp::cli::parse_config_file(configPath);
    if (seedOverride) cfg.set("chain.seed", std::to_string(*seedOverride));
    if (chainsOverride) cfg.set("chain.n_chains", std::to_string(*chainsOverride));

    std::ofstream file;
    std::ostream* out = &std::cout;
    if (!outPath.empty()) {
      file.open(outPath, std::ios::binary);
      if (!file) {
        std::cerr << "error: cannot open output path: " << outPath << '\n';
        return 2;
      }
      out = &file;
    }

    if (app.got_subcommand(predict)) return arp::cli::cmd_predict(cfg, *out, format);
    if (app.got_subcommand(sample)) return arp::cli::cmd_sample(cfg, *out, format);
    if (app.got_subcommand(tune)) return arp::cli::cmd_tune(cfg, *out, format);
    return arp::cli::cmd_verify(cfg, *out, format);
  } catch (const arp::cli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
