#pragma once
#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <stdexcept>
#include <thread>
#include <type_traits>
#include <vector>

#include "arp/proposals.hpp"
#include "arp/rng.hpp"
#include "arp/targets.hpp"

// Metropolis-Hastings chains driven by AR(1) proposals. The loop runs in
// mode coordinates, where target and proposal are simultaneously diagonal, so
// one step costs O(d). The log acceptance ratio uses the closed form
//   Z = -1/2 (y-x)^T (A - Atilde) (y+x) + (b - beta)^T (y - x),
// valid whenever G Sigma is symmetric, which holds for every proposal built
// on the shared eigenbasis.

namespace arp {

template <class Scalar>
struct ChainStats {
  std::uint64_t steps = 0;
  std::uint64_t accepts = 0;
  Scalar sumAlpha = 0;                 // running sum of alpha(x,y)
  std::vector<Scalar> jumpSums;        // per direction, sum of (q^T(x'-x))^2
  std::vector<Scalar> logRatioTrace;   // Z values, when recording is on
  Vector<Scalar> momentSum1;           // per-mode running sum of xi_i
  Vector<Scalar> momentSum2;           // per-mode running sum of xi_i^2
  std::uint64_t momentSamples = 0;

  Scalar meanAlpha() const { return steps ? sumAlpha / Scalar(steps) : Scalar(0); }
  Scalar acceptRate() const { return steps ? Scalar(accepts) / Scalar(steps) : Scalar(0); }
  Scalar meanJump(std::size_t k) const {
    return steps ? jumpSums.at(k) / Scalar(steps) : Scalar(0);
  }

  ChainStats& merge(const ChainStats& o) {
    steps += o.steps;
    accepts += o.accepts;
    sumAlpha += o.sumAlpha;
    if (jumpSums.empty()) jumpSums = o.jumpSums;
    else
      for (std::size_t k = 0; k < jumpSums.size(); ++k) jumpSums[k] += o.jumpSums[k];
    logRatioTrace.insert(logRatioTrace.end(), o.logRatioTrace.begin(), o.logRatioTrace.end());
    if (momentSum1.size() == 0) {
      momentSum1 = o.momentSum1;
      momentSum2 = o.momentSum2;
    } else if (o.momentSum1.size() > 0) {
      momentSum1 += o.momentSum1;
      momentSum2 += o.momentSum2;
    }
    momentSamples += o.momentSamples;
    return *this;
  }
};

namespace detail {

// Per-mode pieces of Z precomputed once per (target, proposal) pair:
// Z = sum_i [ -1/2 dLam_i (zy_i^2 - zx_i^2) + dB_i (zy_i - zx_i) ].
template <class Scalar>
struct ZCoeffs {
  Vector<Scalar> dLam;  // lambda^2 - lambdaTilde^2
  Vector<Scalar> dB;    // b - beta, in mode coordinates
};

template <class Scalar>
ZCoeffs<Scalar> z_coeffs(const SpectralTarget<Scalar>& t, const Ar1Proposal<Scalar>& p) {
  if (t.d != p.d) throw std::invalid_argument("sampler: target/proposal dimension mismatch");
  const StationaryGaussian<Scalar> st = stationary(p);
  ZCoeffs<Scalar> c;
  c.dLam = t.lambda2 - st.lambdaTilde2;
  c.dB = t.lambda2.cwiseProduct(t.meanModes) - st.lambdaTilde2.cwiseProduct(st.meanModes);
  return c;
}

template <class Scalar>
Scalar z_value(const ZCoeffs<Scalar>& c, const Vector<Scalar>& zx, const Vector<Scalar>& zy) {
  return (-Scalar(0.5) * c.dLam.array() * (zy.array().square() - zx.array().square()) +
          c.dB.array() * (zy.array() - zx.array()))
      .sum();
}

}  // namespace detail

// Closed-form log acceptance ratio for a Gaussian target (original coordinates).
template <class Scalar>
Scalar log_accept_ratio(const SpectralTarget<Scalar>& t, const Ar1Proposal<Scalar>& p,
                        const Vector<Scalar>& x, const Vector<Scalar>& y) {
  if (x.size() != t.d || y.size() != t.d)
    throw std::invalid_argument("log_accept_ratio: dimension mismatch");
  const auto c = detail::z_coeffs(t, p);
  return detail::z_value(c, t.toModes(x), t.toModes(y));
}

// Perturbed targets add phi(x) - phi(y) on top of Z.
template <class Scalar>
Scalar log_accept_ratio(const PerturbedTarget<Scalar>& t, const Ar1Proposal<Scalar>& p,
                        const Vector<Scalar>& x, const Vector<Scalar>& y) {
  return log_accept_ratio(t.base, p, x, y) + t.phi(x) - t.phi(y);
}

// Surrogate-transition acceptance ratio for the L-fold composition of a base
// proposal: log [pi_d(y) pi*(x)] - log [pi_d(x) pi*(y)] with pi* the base
// proposal's stationary Gaussian. Independent of L, and equal to the
// closed-form Z of compose_steps(base, L) because the composition leaves the
// equilibrium unchanged.
template <class Scalar>
Scalar multistep_accept_ratio(const SpectralTarget<Scalar>& t, const Ar1Proposal<Scalar>& base,
                              int L, const Vector<Scalar>& x, const Vector<Scalar>& y) {
  if (L < 1) throw std::invalid_argument("multistep_accept_ratio: need L >= 1");
  return log_accept_ratio(t, base, x, y);
}

template <class Scalar>
Scalar multistep_accept_ratio(const PerturbedTarget<Scalar>& t, const Ar1Proposal<Scalar>& base,
                              int L, const Vector<Scalar>& x, const Vector<Scalar>& y) {
  if (L < 1) throw std::invalid_argument("multistep_accept_ratio: need L >= 1");
  return log_accept_ratio(t, base, x, y);
}

struct RunOptions {
  bool recordTrace = false;    // store every Z in logRatioTrace
  bool recordMoments = false;  // accumulate xi_i, xi_i^2 per mode
  std::uint64_t burnIn = 0;    // steps discarded before accumulation
};

namespace detail {

// Equilibrium start: exact draw for Gaussian targets.
template <class Scalar>
Vector<Scalar> equilibrium_modes(const SpectralTarget<Scalar>& t, Rng& rng) {
  Vector<Scalar> z(t.d);
  for (Eigen::Index i = 0; i < t.d; ++i)
    z[i] = t.meanModes[i] + Scalar(rng.normal()) / std::sqrt(t.lambda2[i]);
  return z;
}

template <class Scalar>
Scalar phi_value(const SpectralTarget<Scalar>&, const Vector<Scalar>&) {
  return Scalar(0);
}

template <class Scalar>
Scalar phi_value(const PerturbedTarget<Scalar>& t, const Vector<Scalar>& x) {
  return t.phi(x);
}

template <class Scalar>
const SpectralTarget<Scalar>& gaussian_part(const SpectralTarget<Scalar>& t) {
  return t;
}

template <class Scalar>
const SpectralTarget<Scalar>& gaussian_part(const PerturbedTarget<Scalar>& t) {
  return t.base;
}

}  // namespace detail

// Standard MH loop. Pass x0 = nullopt for an equilibrium start: an exact
// Gaussian draw, rejection sampling when the perturbation has a known lower
// bound, else a 10 d^{1/3}-step burn-in from a Gaussian draw. Directions are
// given as columns of `directions` (original coordinates); pass a 0-column
// matrix for none. Fully reproducible for a fixed seed.
template <class Scalar, class Target>
ChainStats<Scalar> run_chain(const Target& target, const Ar1Proposal<Scalar>& p,
                             std::type_identity_t<std::optional<Vector<Scalar>>> x0,
                             std::uint64_t n,
                             const Matrix<Scalar>& directions, std::uint64_t seed,
                             RunOptions opts = {}) {
  const SpectralTarget<Scalar>& base = detail::gaussian_part(target);
  const auto zc = detail::z_coeffs(base, p);
  constexpr bool perturbed = !std::is_same_v<Target, SpectralTarget<Scalar>>;
  Rng rng(seed);

  // Starting point in mode coordinates.
  Vector<Scalar> z;
  std::uint64_t burnIn = opts.burnIn;
  if (x0) {
    if (x0->size() != base.d) throw std::invalid_argument("run_chain: x0 has wrong length");
    z = base.toModes(*x0);
  } else if constexpr (perturbed) {
    if (target.lowerm) {
      z = base.toModes(sample_perturbed(target, 1, splitmix64(seed)).samples.col(0));
    } else {
      z = detail::equilibrium_modes(base, rng);
      burnIn += 10 * std::uint64_t(std::cbrt(double(base.d))) + 1;
    }
  } else {
    z = detail::equilibrium_modes(base, rng);
  }

  // Directions mapped to mode coordinates once.
  Matrix<Scalar> dirModes(base.d, directions.cols());
  for (Eigen::Index k = 0; k < directions.cols(); ++k)
    dirModes.col(k) = base.toModes(Vector<Scalar>(directions.col(k)));

  ChainStats<Scalar> stats;
  stats.jumpSums.assign(std::size_t(directions.cols()), Scalar(0));
  if (opts.recordMoments) {
    stats.momentSum1 = Vector<Scalar>::Zero(base.d);
    stats.momentSum2 = Vector<Scalar>::Zero(base.d);
  }
  if (opts.recordTrace) stats.logRatioTrace.reserve(n);

  const Vector<Scalar> sigSd = p.sigEig.array().sqrt().matrix();
  const Vector<Scalar> gComp = (Scalar(1) - p.gEig.array()).matrix();
  Vector<Scalar> zy(base.d);
  Vector<Scalar> x;  // original coordinates, maintained only for perturbed targets
  Scalar phiX = 0;
  if constexpr (perturbed) {
    x = base.fromModes(z);
    phiX = target.phi(x);
  }

  const Vector<Scalar> lam = base.lambda2.array().sqrt().matrix();
  for (std::uint64_t step = 0; step < n + burnIn; ++step) {
    for (Eigen::Index i = 0; i < base.d; ++i)
      zy[i] = p.gEig[i] * z[i] + gComp[i] * p.offsetModes[i] + sigSd[i] * Scalar(rng.normal());

    Scalar logRatio = detail::z_value(zc, z, zy);
    Scalar phiY = 0;
    Vector<Scalar> y;
    if constexpr (perturbed) {
      y = base.fromModes(zy);
      phiY = target.phi(y);
      logRatio += phiX - phiY;
    }

    const bool recording = step >= burnIn;
    const Scalar alpha = std::min(Scalar(1), std::exp(logRatio));
    const bool accept = Scalar(rng.uniform()) < alpha;

    if (recording) {
      ++stats.steps;
      stats.sumAlpha += alpha;
      if (opts.recordTrace) stats.logRatioTrace.push_back(logRatio);
      if (accept) {
        ++stats.accepts;
        for (Eigen::Index k = 0; k < dirModes.cols(); ++k) {
          const Scalar jump = dirModes.col(k).dot(zy - z);
          stats.jumpSums[std::size_t(k)] += jump * jump;
        }
      }
    }
    if (accept) {
      z.swap(zy);
      if constexpr (perturbed) {
        x.swap(y);
        phiX = phiY;
      }
    }
    if (recording && opts.recordMoments) {
      stats.momentSum1.array() += lam.array() * (z - base.meanModes).array();
      stats.momentSum2.array() += (lam.array() * (z - base.meanModes).array()).square();
      ++stats.momentSamples;
    }
  }
  return stats;
}

// Independent parallel chains with per-chain seeds derived from the master
// seed; results merge by summation in chain order, so the outcome does not
// depend on scheduling.
template <class Scalar, class Target>
std::vector<ChainStats<Scalar>> run_chains(const Target& target, const Ar1Proposal<Scalar>& p,
                                           std::type_identity_t<std::optional<Vector<Scalar>>> x0,
                                           std::uint64_t n,
                                           const Matrix<Scalar>& directions,
                                           std::uint64_t masterSeed, unsigned nChains,
                                           RunOptions opts = {}) {
  std::vector<ChainStats<Scalar>> out(nChains);
  std::vector<std::thread> workers;
  workers.reserve(nChains);
  for (unsigned c = 0; c < nChains; ++c)
    workers.emplace_back([&, c] {
      std::uint64_t state = masterSeed + 0x9e3779b97f4a7c15ULL * (c + 1);
      out[c] = run_chain(target, p, x0, n, directions, splitmix64(state), opts);
    });
  for (auto& w : workers) w.join();
  return out;
}

template <class Scalar>
ChainStats<Scalar> merge_stats(const std::vector<ChainStats<Scalar>>& chains) {
  ChainStats<Scalar> total;
  for (const auto& c : chains) total.merge(c);
  return total;
}

template <class Scalar>
struct ChainMoments {
  Vector<Scalar> kappas;  // per-mode mean of xi_i = lambda_i q_i^T (x - A^{-1}b)
  Vector<Scalar> gammas;  // per-mode mean of xi_i^2
};

template <class Scalar>
ChainMoments<Scalar> estimate_moments(const ChainStats<Scalar>& stats) {
  if (stats.momentSamples == 0)
    throw std::logic_error("estimate_moments: chain was run without moment recording");
  ChainMoments<Scalar> m;
  m.kappas = stats.momentSum1 / Scalar(stats.momentSamples);
  m.gammas = stats.momentSum2 / Scalar(stats.momentSamples);
  return m;
}

}  // namespace arp
