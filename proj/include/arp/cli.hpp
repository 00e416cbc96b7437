#pragma once
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "arp/proposals.hpp"
#include "arp/targets.hpp"

// Config-driven experiment runner: flat key = value configs assembled into
// targets, proposals, and chain settings, driving the predict / sample /
// tune / verify subcommands. Output is JSON (schema 1) or CSV, byte-identical
// for identical config and seed.

namespace arp::cli {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flat key-value configuration. Lines are `key = value`; `#` starts a
// comment. Typed getters record every key they touch so a finished command
// can reject misspelled keys instead of silently defaulting.
struct Config {
  std::map<std::string, std::string> kv;
  mutable std::set<std::string> touched;

  bool has(const std::string& key) const;
  std::string get(const std::string& key, const std::string& fallback) const;
  std::string require(const std::string& key) const;
  double num(const std::string& key, double fallback) const;
  double require_num(const std::string& key) const;
  std::int64_t integer(const std::string& key, std::int64_t fallback) const;
  std::uint64_t uint(const std::string& key, std::uint64_t fallback) const;
  std::vector<double> list(const std::string& key) const;
  void set(const std::string& key, const std::string& value) { kv[key] = value; }
  // Keys present in the file but never read by the command that just ran.
  std::vector<std::string> unused() const;
};

Config parse_config_text(const std::string& text);
Config parse_config_file(const std::string& path);
std::string serialize_config(const Config& cfg);

// Everything a chain-running command needs, assembled and validated.
struct Experiment {
  SpectralTarget<double> target;
  std::optional<PerturbedTarget<double>> perturbed;  // set when target.phi != none
  Ar1Proposal<double> proposal;
  int composedSteps = 1;  // L of compose_steps already applied to `proposal`
  std::uint64_t steps = 0;
  unsigned chains = 1;
  std::uint64_t seed = 0;
  std::uint64_t burnIn = 0;
  bool startEquilibrium = true;
  std::vector<Eigen::Index> directionModes;
  Matrix<double> directions;  // columns, original coordinates
};

SpectralTarget<double> build_target(const Config& cfg);
Ar1Proposal<double> build_proposal(const Config& cfg, const SpectralTarget<double>& target,
                                   int* composedSteps = nullptr);
Experiment build_experiment(const Config& cfg);

// Subcommand drivers; each writes one JSON or CSV document to `out` and
// returns the process exit code (0 success, 1 failed verification).
// Invalid configs throw ConfigError naming the offending key.
int cmd_predict(const Config& cfg, std::ostream& out, const std::string& format);
int cmd_sample(const Config& cfg, std::ostream& out, const std::string& format);
int cmd_verify(const Config& cfg, std::ostream& out, const std::string& format);
int cmd_tune(const Config& cfg, std::ostream& out, const std::string& format);

}  // namespace arp::cli
