#include <json.hpp>

#include <cmath>
#include <iomanip>
#include <iostream>
#include <limits>
#include <ostream>
#include <sstream>

#include "arp/cli.hpp"
#include "arp/sampler.hpp"
#include "arp/theory.hpp"
#include "arp/tuning.hpp"

namespace arp::cli {

using json = nlohmann::json;

namespace {

std::string trim_copy(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<double> split_list(const std::string& raw, const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim_copy(item);
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      const double v = std::stod(item, &used);
      if (!trim_copy(item.substr(used)).empty()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw ConfigError("config key " + key + " has a non-numeric entry: '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError("config key " + key + " is an empty list");
  return out;
}

Vector<double> to_vec(const std::vector<double>& v) {
  Vector<double> out(Eigen::Index(v.size()));
  for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = v[std::size_t(i)];
  return out;
}

// Scalar value broadcasts to all d entries; a list must have exactly d.
Vector<double> broadcast(const Config& cfg, const std::string& key, Eigen::Index d,
                         double fallback) {
  if (!cfg.has(key)) return Vector<double>::Constant(d, fallback);
  const auto vals = cfg.list(key);
  if (vals.size() == 1) return Vector<double>::Constant(d, vals[0]);
  if (Eigen::Index(vals.size()) != d)
    throw ConfigError("config key " + key + " needs 1 or " + std::to_string(d) +
                      " entries, got " + std::to_string(vals.size()));
  return to_vec(vals);
}

Vector<double> parse_mass(const Config& cfg, const SpectralTarget<double>& target,
                          const std::string& fallback) {
  const std::string raw = cfg.get("proposal.mass", fallback);
  if (raw == "identity") return Vector<double>::Ones(target.d);
  if (raw == "inverse-precision") return target.lambda2.cwiseInverse();
  const auto vals = split_list(raw, "proposal.mass");
  if (Eigen::Index(vals.size()) != target.d)
    throw ConfigError("config key proposal.mass needs " + std::to_string(target.d) +
                      " entries, 'identity', or 'inverse-precision'");
  return to_vec(vals);
}

std::vector<Eigen::Index> parse_directions(const Config& cfg, Eigen::Index d) {
  const std::string raw = cfg.get("chain.directions", "none");
  if (raw == "none") return {};
  const std::string prefix = "modes:";
  if (raw.rfind(prefix, 0) != 0)
    throw ConfigError("config key chain.directions must be 'none' or 'modes:i,j,...'");
  std::vector<Eigen::Index> out;
  for (const double v : split_list(raw.substr(prefix.size()), "chain.directions")) {
    const auto i = Eigen::Index(v);
    if (double(i) != v || i < 0 || i >= d)
      throw ConfigError("config key chain.directions has an invalid mode index for d = " +
                        std::to_string(d));
    out.push_back(i);
  }
  return out;
}

double theta_of_family(const Config& cfg, const std::string& family) {
  if (family == "sla") return 0.0;
  if (family == "cn" || family == "pcn") return 0.5;
  if (family == "theta-sla") return cfg.require_num("proposal.theta");
  throw ConfigError("proposal.family '" + family + "' is not in the langevin family");
}

// Bounded perturbations available from config; each maps a name to phi.
PerturbedTarget<double> parse_phi(const Config& cfg, const SpectralTarget<double>& target,
                                  const std::string& kind) {
  const double M = cfg.num("target.phi_m", 0.2);
  if (M <= 0) throw ConfigError("config key target.phi_m must be > 0");
  PerturbedTarget<double> out;
  out.base = target;
  out.boundM = M;
  out.lowerm = -M;
  if (kind == "sin1")
    out.phi = [M](const Vector<double>& x) { return M * std::sin(x[0]); };
  else if (kind == "tanh1")
    out.phi = [M](const Vector<double>& x) { return M * std::tanh(x[0]); };
  else
    throw ConfigError("config key target.phi must be none, sin1, or tanh1");
  return out;
}

void warn_unused(const Config& cfg) {
  const auto leftover = cfg.unused();
  if (leftover.empty()) return;
  std::cerr << "warning: unrecognized config key(s):";
  for (const auto& k : leftover) std::cerr << ' ' << k;
  std::cerr << '\n';
}

json stats_json(const ChainStats<double>& s, const std::vector<Eigen::Index>& modes) {
  json j;
  j["steps"] = s.steps;
  j["accepts"] = s.accepts;
  j["accept_rate"] = s.acceptRate();
  j["mean_alpha"] = s.meanAlpha();
  json jumps = json::array();
  for (std::size_t k = 0; k < s.jumpSums.size(); ++k)
    jumps.push_back({{"mode", modes[k]}, {"mean", s.meanJump(k)}});
  j["jump"] = jumps;
  return j;
}

struct Empirical {
  double mean = 0;
  double stderrOfMean = 0;
};

// Between-chain standard error: sd of per-chain means / sqrt(#chains).
Empirical between_chains(const std::vector<double>& perChain) {
  Empirical e;
  const auto n = double(perChain.size());
  for (const double v : perChain) e.mean += v;
  e.mean /= n;
  if (perChain.size() > 1) {
    double ss = 0;
    for (const double v : perChain) ss += (v - e.mean) * (v - e.mean);
    e.stderrOfMean = std::sqrt(ss / (n - 1) / n);
  }
  return e;
}

// The scaling-limit prediction selected by predict.theorem (not "acceptance").
LimitPrediction<double> limit_for(const Config& cfg, const SpectralTarget<double>& target,
                                  const std::string& theorem,
                                  const std::vector<Eigen::Index>& modes) {
  const double kappa = cfg.num("predict.kappa", 0.0);
  const double l = cfg.require_num("predict.l");
  const std::string family = cfg.get("proposal.family", "sla");
  const Vector<double> mass =
      parse_mass(cfg, target, family == "pcn" ? "inverse-precision" : "identity");
  const Vector<double> spectrumB = (mass.array() * target.lambda2.array()).sqrt().matrix();
  if (theorem == "langevin")
    return langevin_limits(kappa, l, theta_of_family(cfg, cfg.require("proposal.family")),
                           spectrumB);
  if (theorem == "multistep")
    return multistep_sla_limits(kappa, l, int(cfg.integer("proposal.steps", 1)), spectrumB);
  if (theorem == "hmc")
    return hmc_limits(kappa, l, cfg.require_num("proposal.T"), spectrumB, modes);
  throw ConfigError("config key predict.theorem must be acceptance, langevin, multistep, or hmc");
}

struct PredictedRow {
  std::string name;
  std::string theorem;
  double value = 0;
};

// Acceptance row plus one row per probed direction, under the selected theorem.
std::vector<PredictedRow> predicted_rows(const Config& cfg, const SpectralTarget<double>& target,
                                         const Ar1Proposal<double>& proposal,
                                         const std::vector<Eigen::Index>& modes) {
  const std::string theorem = cfg.get("predict.theorem", "acceptance");
  std::vector<PredictedRow> rows;
  const auto jumpName = [](Eigen::Index i) { return "jump_mode_" + std::to_string(i); };

  if (theorem == "acceptance") {
    const auto pred = acceptance_prediction(target, proposal);
    rows.push_back({"acceptance", pred.theorem, pred.acceptance});
    for (const Eigen::Index i : modes)
      rows.push_back({jumpName(i), "jump-size-limit", jump_prediction(target, proposal, i).value});
    return rows;
  }

  const auto pred = limit_for(cfg, target, theorem, modes);
  rows.push_back({"acceptance", pred.theorem, pred.acceptance});
  for (std::size_t k = 0; k < modes.size(); ++k) {
    // hmc carries one jump per probed mode; the langevin family's limit jump
    // is direction-free, so every probed mode shares entry 0.
    const double v = pred.jump.size() == modes.size() ? pred.jump[k] : pred.jump[0];
    rows.push_back({jumpName(modes[k]), pred.theorem, v});
  }
  return rows;
}

void write_kv_csv(std::ostream& out, const std::vector<std::pair<std::string, double>>& rows) {
  out << std::setprecision(17) << "name,value\n";
  for (const auto& [name, value] : rows) out << name << ',' << value << '\n';
}

}  // namespace

SpectralTarget<double> build_target(const Config& cfg) {
  Vector<double> lambda2;
  if (cfg.has("target.eigenvalues")) {
    lambda2 = to_vec(cfg.list("target.eigenvalues"));
  } else {
    const auto d = cfg.integer("target.d", 0);
    if (d < 1) throw ConfigError("config needs target.d >= 1 or target.eigenvalues");
    const double kappa = cfg.num("target.kappa", 0.0);
    const double c = cfg.num("target.c", 1.0);
    const double C = cfg.num("target.C", c);
    std::optional<std::uint64_t> jitter;
    if (cfg.has("target.jitter_seed")) jitter = cfg.uint("target.jitter_seed", 0);
    lambda2 = make_power_spectrum<double>(d, kappa, c, C, jitter);
  }
  const Vector<double> mean = broadcast(cfg, "target.mean", lambda2.size(), 0.0);
  return make_spectral_target(lambda2, mean);
}

Ar1Proposal<double> build_proposal(const Config& cfg, const SpectralTarget<double>& target,
                                   int* composedSteps) {
  const std::string family = cfg.require("proposal.family");
  if (composedSteps) *composedSteps = 1;

  if (family == "sla" || family == "cn" || family == "pcn" || family == "theta-sla") {
    const double theta = theta_of_family(cfg, family);
    const double h = cfg.require_num("proposal.h");
    const Vector<double> mass =
        parse_mass(cfg, target, family == "pcn" ? "inverse-precision" : "identity");
    Ar1Proposal<double> p = langevin(theta, h, target, mass);
    const auto L = cfg.integer("proposal.steps", 1);
    if (L < 1 || L > 1000000) throw ConfigError("config key proposal.steps must be in [1, 1e6]");
    if (composedSteps) *composedSteps = int(L);
    return compose_steps(p, int(L));
  }
  if (family == "hmc") {
    const double h = cfg.require_num("proposal.h");
    const Vector<double> mass = parse_mass(cfg, target, "identity");
    std::int64_t L;
    if (cfg.has("proposal.L")) {
      L = cfg.integer("proposal.L", 0);
    } else if (cfg.has("proposal.T")) {
      L = std::int64_t(cfg.require_num("proposal.T") / h);
      if (L < 1) throw ConfigError("config key proposal.T is shorter than one leapfrog step");
    } else {
      throw ConfigError("hmc proposal needs proposal.L or proposal.T");
    }
    if (L < 1 || L > 1000000) throw ConfigError("config key proposal.L must be in [1, 1e6]");
    return hmc(make_hmc_schedule(h, int(L), mass), target);
  }
  if (family == "custom") {
    const Vector<double> g = to_vec(cfg.list("proposal.g_eig"));
    const Vector<double> s = to_vec(cfg.list("proposal.sigma_eig"));
    const Vector<double> offset = broadcast(cfg, "proposal.offset", target.d, 0.0);
    if (g.size() != target.d || s.size() != target.d)
      throw ConfigError("config keys proposal.g_eig / proposal.sigma_eig need " +
                        std::to_string(target.d) + " entries");
    return make_ar1(g, s, offset, target.basis);
  }
  throw ConfigError("config key proposal.family must be sla, cn, theta-sla, pcn, hmc, or custom");
}

Experiment build_experiment(const Config& cfg) {
  Experiment e;
  e.target = build_target(cfg);
  const std::string phi = cfg.get("target.phi", "none");
  if (phi != "none") e.perturbed = parse_phi(cfg, e.target, phi);
  e.proposal = build_proposal(cfg, e.target, &e.composedSteps);
  e.steps = cfg.uint("chain.n_steps", 0);
  const auto chains = cfg.integer("chain.n_chains", 1);
  if (chains < 1 || chains > 4096)
    throw ConfigError("config key chain.n_chains must be in [1, 4096]");
  e.chains = unsigned(chains);
  e.seed = cfg.uint("chain.seed", 20260816);
  e.burnIn = cfg.uint("chain.burn_in", 0);
  const std::string start = cfg.get("chain.start", "equilibrium");
  if (start != "equilibrium" && start != "zero")
    throw ConfigError("config key chain.start must be equilibrium or zero");
  e.startEquilibrium = (start == "equilibrium");
  e.directionModes = parse_directions(cfg, e.target.d);
  e.directions.resize(e.target.d, Eigen::Index(e.directionModes.size()));
  for (std::size_t k = 0; k < e.directionModes.size(); ++k)
    e.directions.col(Eigen::Index(k)) =
        e.target.hasBasis()
            ? Vector<double>(e.target.basis.col(e.directionModes[k]))
            : Vector<double>(Vector<double>::Unit(e.target.d, e.directionModes[k]));
  return e;
}

namespace {

std::vector<ChainStats<double>> run_experiment(const Experiment& e, const RunOptions& opts) {
  std::optional<Vector<double>> x0;
  if (!e.startEquilibrium) x0 = Vector<double>::Zero(e.target.d);
  if (e.perturbed)
    return run_chains(*e.perturbed, e.proposal, x0, e.steps, e.directions, e.seed, e.chains, opts);
  return run_chains(e.target, e.proposal, x0, e.steps, e.directions, e.seed, e.chains, opts);
}

}  // namespace

int cmd_predict(const Config& cfg, std::ostream& out, const std::string& format) {
  const SpectralTarget<double> target = build_target(cfg);
  const std::string theorem = cfg.get("predict.theorem", "acceptance");
  const auto modes = parse_directions(cfg, target.d);

  json j;
  j["schema"] = 1;
  j["command"] = "predict";
  std::vector<std::pair<std::string, double>> csvRows;
  json jumps = json::array();

  if (theorem == "acceptance") {
    int composed = 1;
    const Ar1Proposal<double> proposal = build_proposal(cfg, target, &composed);
    const auto pred = acceptance_prediction(target, proposal);
    j["theorem"] = pred.theorem;
    j["mu"] = pred.mu;
    j["sigma2"] = pred.sigma2;
    j["acceptance"] = pred.acceptance;
    j["lyapunov"] = pred.lyapunov;
    j["lyapunov_ok"] = pred.lyapunovOk;
    if (!pred.note.empty()) j["note"] = pred.note;
    for (const Eigen::Index i : modes) {
      const auto jp = jump_prediction(target, proposal, i);
      jumps.push_back({{"mode", i},
                       {"value", jp.value},
                       {"U1", jp.U1},
                       {"U2", jp.U2},
                       {"U3", jp.U3},
                       {"simplified", jp.simplified}});
      csvRows.emplace_back("jump_mode_" + std::to_string(i), jp.value);
    }
    csvRows.insert(csvRows.begin(),
                   {{"mu", pred.mu}, {"sigma2", pred.sigma2}, {"acceptance", pred.acceptance}});
  } else {
    const auto pred = limit_for(cfg, target, theorem, modes);
    j["theorem"] = pred.theorem;
    j["mu"] = pred.mu;
    j["sigma2"] = pred.sigma2;
    j["acceptance"] = pred.acceptance;
    if (pred.tau) j["tau"] = *pred.tau;
    if (!pred.note.empty()) j["note"] = pred.note;
    for (std::size_t k = 0; k < modes.size(); ++k) {
      const double v = pred.jump.size() == modes.size() ? pred.jump[k] : pred.jump[0];
      jumps.push_back({{"mode", modes[k]}, {"value", v}});
      csvRows.emplace_back("jump_mode_" + std::to_string(modes[k]), v);
    }
    if (modes.empty() && !pred.jump.empty()) {
      jumps.push_back({{"value", pred.jump[0]}});
      csvRows.emplace_back("jump", pred.jump[0]);
    }
    csvRows.insert(csvRows.begin(),
                   {{"mu", pred.mu}, {"sigma2", pred.sigma2}, {"acceptance", pred.acceptance}});
    if (pred.tau) csvRows.emplace_back("tau", *pred.tau);
  }
  j["jump"] = jumps;

  // Bounded perturbations sandwich every Gaussian-case expectation.
  const std::string phi = cfg.get("target.phi", "none");
  if (phi != "none") {
    const auto pt = parse_phi(cfg, target, phi);
    const auto [lo, hi] = nongaussian_bounds(*pt.boundM, j["acceptance"].get<double>());
    j["sandwich"] = {{"M", *pt.boundM}, {"acceptance_lo", lo}, {"acceptance_hi", hi}};
  }

  warn_unused(cfg);
  if (format == "csv") write_kv_csv(out, csvRows);
  else out << j.dump(2) << '\n';
  return 0;
}

int cmd_sample(const Config& cfg, std::ostream& out, const std::string& format) {
  const Experiment e = build_experiment(cfg);
  if (e.steps < 1) throw ConfigError("sample needs chain.n_steps >= 1");
  RunOptions opts;
  opts.burnIn = e.burnIn;
  opts.recordMoments = cfg.get("chain.record_moments", "false") == "true";

  const auto chains = run_experiment(e, opts);
  const auto merged = merge_stats(chains);

  json j;
  j["schema"] = 1;
  j["command"] = "sample";
  j["label"] = to_string(e.proposal.label);
  j["steps"] = e.steps;
  j["chains"] = e.chains;
  j["seed"] = e.seed;
  json total = stats_json(merged, e.directionModes);
  for (auto& [key, value] : total.items()) j[key] = value;
  json per = json::array();
  for (const auto& c : chains) per.push_back(stats_json(c, e.directionModes));
  j["per_chain"] = per;
  if (opts.recordMoments) {
    const auto m = estimate_moments(merged);
    j["moments"] = {{"kappa", std::vector<double>(m.kappas.begin(), m.kappas.end())},
                    {"gamma", std::vector<double>(m.gammas.begin(), m.gammas.end())}};
  }

  warn_unused(cfg);
  if (format == "csv") {
    std::vector<std::pair<std::string, double>> rows = {{"steps", double(merged.steps)},
                                                        {"accepts", double(merged.accepts)},
                                                        {"accept_rate", merged.acceptRate()},
                                                        {"mean_alpha", merged.meanAlpha()}};
    for (std::size_t k = 0; k < e.directionModes.size(); ++k)
      rows.emplace_back("jump_mode_" + std::to_string(e.directionModes[k]), merged.meanJump(k));
    write_kv_csv(out, rows);
  } else {
    out << j.dump(2) << '\n';
  }
  return 0;
}

int cmd_verify(const Config& cfg, std::ostream& out, const std::string& format) {
  Experiment e = build_experiment(cfg);
  if (e.steps < 1) throw ConfigError("verify needs chain.n_steps >= 1");
  if (!cfg.has("chain.n_chains")) e.chains = 4;
  if (e.chains < 2)
    throw ConfigError("verify needs chain.n_chains >= 2 for a between-chain standard error");

  const auto rows = predicted_rows(cfg, e.target, e.proposal, e.directionModes);
  const double inject = cfg.num("verify.inject", 1.0);  // fault injection for harness tests
  const double accTol = cfg.num("verify.acceptance_tol", 0.015);
  const double jumpRelTol = cfg.num("verify.jump_rel_tol", 0.10);
  const double M = e.perturbed ? *e.perturbed->boundM : 0.0;

  RunOptions opts;
  opts.burnIn = e.burnIn;
  const auto chains = run_experiment(e, opts);

  json jrows = json::array();
  bool allPass = true;
  std::ostringstream csv;
  csv << std::setprecision(17) << "name,predicted,empirical,stderr,z,pass\n";

  for (std::size_t r = 0; r < rows.size(); ++r) {
    const double predicted = rows[r].value * inject;
    std::vector<double> perChain;
    perChain.reserve(chains.size());
    for (const auto& c : chains)
      perChain.push_back(r == 0 ? c.meanAlpha() : c.meanJump(r - 1));
    const Empirical emp = between_chains(perChain);

    const double z = emp.stderrOfMean > 0
                         ? (emp.mean - predicted) / emp.stderrOfMean
                         : (emp.mean == predicted ? 0.0
                                                  : std::numeric_limits<double>::infinity());
    bool pass;
    json row;
    if (M > 0) {
      // Sandwich verification: the empirical value must sit inside
      // [e^{-3M}, e^{3M}] x the Gaussian prediction, three standard errors of slack.
      const auto [lo, hi] = nongaussian_bounds(M, predicted);
      pass = emp.mean >= lo - 3 * emp.stderrOfMean && emp.mean <= hi + 3 * emp.stderrOfMean;
      row["lo"] = lo;
      row["hi"] = hi;
    } else {
      const double absTol = r == 0 ? accTol : jumpRelTol * std::abs(predicted);
      pass = std::abs(z) <= 3.0 || std::abs(emp.mean - predicted) <= absTol;
    }
    allPass = allPass && pass;

    row["name"] = rows[r].name;
    row["theorem"] = rows[r].theorem;
    row["predicted"] = predicted;
    row["empirical"] = emp.mean;
    row["stderr"] = emp.stderrOfMean;
    if (std::isfinite(z)) row["z"] = z;
    else row["z"] = nullptr;
    row["samples"] = e.steps * e.chains;
    row["pass"] = pass;
    jrows.push_back(row);
    csv << rows[r].name << ',' << predicted << ',' << emp.mean << ',' << emp.stderrOfMean << ','
        << z << ',' << (pass ? "true" : "false") << '\n';
  }

  json j;
  j["schema"] = 1;
  j["command"] = "verify";
  j["rows"] = jrows;
  j["pass"] = allPass;

  warn_unused(cfg);
  if (format == "csv") out << csv.str();
  else out << j.dump(2) << '\n';
  return allPass ? 0 : 1;
}

int cmd_tune(const Config& cfg, std::ostream& out, const std::string& format) {
  const std::string mode = cfg.require("tune.mode");
  json j;
  j["schema"] = 1;
  j["command"] = "tune";
  j["mode"] = mode;
  std::vector<std::pair<std::string, double>> csvRows;
  std::string curveCsv;

  if (mode == "langevin") {
    const auto sc =
        optimal_scaling_langevin<double>(cfg.num("tune.tau", 1.0), cfg.num("tune.theta", 0.0));
    j["s0"] = sc.s0;
    j["target_acceptance"] = sc.acceptance;
    j["l"] = sc.l;
    csvRows = {{"s0", sc.s0}, {"target_acceptance", sc.acceptance}, {"l", sc.l}};
    if (cfg.has("target.d")) {
      const double d = double(cfg.integer("target.d", 1));
      const double kappa = cfg.num("target.kappa", 0.0);
      const double h = sc.l * sc.l * std::pow(d, -1.0 / 3 - 2 * kappa);
      j["recommended_h"] = h;
      csvRows.emplace_back("recommended_h", h);
    }
  } else if (mode == "hmc") {
    const auto sc = optimal_scaling_hmc<double>();
    j["s0"] = sc.s0;
    j["target_acceptance"] = sc.acceptance;
    j["l"] = sc.l;
    j["note"] = sc.note;
    csvRows = {{"s0", sc.s0}, {"target_acceptance", sc.acceptance}, {"l", sc.l}};
    if (cfg.has("target.d")) {
      const double d = double(cfg.integer("target.d", 1));
      const double kappa = cfg.num("target.kappa", 0.0);
      const double h = sc.l * std::pow(d, -0.25 - kappa);
      j["recommended_h"] = h;
      csvRows.emplace_back("recommended_h", h);
    }
  } else if (mode == "multistep") {
    const double t = cfg.num("tune.t", 0.0);
    const auto rep = optimal_multistep<double>(t);
    j["s0"] = rep.s0;
    j["target_acceptance"] = rep.targetAcceptance;
    j["recommended_L"] = *rep.recommendedL;
    j["continuous_L"] = *rep.continuousL;
    json curve = json::array();
    std::ostringstream cc;
    cc << std::setprecision(17) << "L,t,efficiency\n";
    for (const auto& [L, eff] : rep.efficiencyCurve) {
      curve.push_back({L, eff});
      cc << L << ',' << t << ',' << eff << '\n';
    }
    j["efficiency_curve"] = curve;
    curveCsv = cc.str();
  } else if (mode == "hmc-time") {
    const SpectralTarget<double> target = build_target(cfg);
    auto modes = parse_directions(cfg, target.d);
    if (modes.empty())
      for (Eigen::Index i = 0; i < target.d; ++i) modes.push_back(i);
    const std::string agg = cfg.get("tune.aggregate", "worst");
    if (agg != "worst" && agg != "mean")
      throw ConfigError("config key tune.aggregate must be worst or mean");
    const Vector<double> lambda = target.lambda2.array().sqrt().matrix();
    const double T = optimal_hmc_time(lambda, modes, agg == "mean");
    j["T"] = T;
    csvRows = {{"T", T}};
  } else {
    throw ConfigError("config key tune.mode must be langevin, hmc, multistep, or hmc-time");
  }

  warn_unused(cfg);
  if (format == "csv") {
    if (!curveCsv.empty()) out << curveCsv;
    else write_kv_csv(out, csvRows);
  } else {
    out << j.dump(2) << '\n';
  }
  return 0;
}

}  // namespace arp::cli
