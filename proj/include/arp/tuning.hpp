#pragma once
#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <type_traits>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "arp/targets.hpp"
#include "arp/theory.hpp"

// Optimal-tuning rules: step-size scaling constants for the Langevin family
// and HMC, the optimal multi-step count for a given surrogate cost, the
// optimal HMC integration time for a spectrum, and preconditioner scores.

namespace arp {

namespace detail {

// Golden-section maximization of a unimodal objective on [a, b].
template <class Scalar, class F>
Scalar golden_max(F f, Scalar a, Scalar b, Scalar tol = Scalar(1e-8)) {
  const Scalar phi = (std::sqrt(Scalar(5)) - 1) / 2;
  Scalar c = b - phi * (b - a), d = a + phi * (b - a);
  Scalar fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = f(d);
    }
  }
  return (a + b) / 2;
}

}  // namespace detail

template <class Scalar>
struct ScalingConstants {
  Scalar s0 = 0;          // optimizer of the scalar efficiency objective
  Scalar acceptance = 0;  // tuned target acceptance probability
  Scalar l = 0;           // tuned step-size constant for the given (tau, theta)
  std::string note;
};

template <class Scalar>
struct TuningReport {
  Scalar s0 = 0;
  Scalar targetAcceptance = 0;
  std::optional<Scalar> recommendedH;
  std::optional<int> recommendedL;
  std::optional<Scalar> continuousL;
  std::vector<std::pair<Scalar, Scalar>> efficiencyCurve;  // (parameter, efficiency)
  std::optional<Scalar> tau;
  std::string note;
};

// Tuned Langevin step-size constant: maximize the limiting jump size
// l^2 * 2 Phi(-l^3 |theta - 1/2| sqrt(tau) / 4) over l > 0. In the variable
// s = l (|theta - 1/2| sqrt(tau) / 4)^{1/3} the objective is proportional to
// s^2 Phi(-s^3), so s0 and the acceptance 2 Phi(-s0^3) do not depend on
// (tau, theta); only the returned l does.
template <class Scalar = double>
ScalingConstants<Scalar> optimal_scaling_langevin(Scalar tau = 1, Scalar theta = 0) {
  const Scalar dev = std::abs(theta - Scalar(0.5));
  if (!(tau > 0) || dev * std::sqrt(tau) == Scalar(0))
    throw std::invalid_argument(
        "optimal_scaling_langevin: need tau > 0 and theta != 1/2, otherwise every step "
        "size is accepted and no finite optimum exists");
  const Scalar k = dev * std::sqrt(tau) / 4;  // s = l * k^{1/3}
  const Scalar scale = std::pow(k, Scalar(-1) / 3);
  const auto jump = [&](Scalar l) {
    return l * l * 2 * normal_cdf(-std::pow(l, 3) * k);
  };
  ScalingConstants<Scalar> out;
  out.l = detail::golden_max(jump, Scalar(1e-6) * scale, Scalar(6) * scale);
  out.s0 = out.l / scale;
  out.acceptance = 2 * normal_cdf(-std::pow(out.s0, 3));
  return out;
}

// Tuned HMC step-size constant: maximize sqrt(s) Phi(-s) over s > 0.
// The commonly quoted constant 0.4250 is inconsistent with its own
// acceptance value: 2 Phi(-0.4250) = 0.671, while this maximizer lands at
// s0 = 0.4523 whose 2 Phi(-s0) = 0.651 matches the quoted acceptance.
template <class Scalar = double>
ScalingConstants<Scalar> optimal_scaling_hmc() {
  const auto objective = [](Scalar s) { return std::sqrt(s) * normal_cdf(-s); };
  ScalingConstants<Scalar> out;
  out.s0 = detail::golden_max(objective, Scalar(1e-8), Scalar(5));
  out.acceptance = 2 * normal_cdf(-out.s0);
  out.l = std::sqrt(8 * out.s0);  // l^2 = 8 s0 recovers acceptance 2 Phi(-l^2/8)
  out.note = "quoted constant s0 = 0.4250 (acceptance 0.671) is inconsistent with the "
             "quoted acceptance 0.651; the maximizer of sqrt(s) Phi(-s) is s0 = 0.4523 "
             "with 2 Phi(-s0) = 0.651";
  return out;
}

// Optimal surrogate step count for cost t (cost of one surrogate step in
// A-multiply units): efficiency(L) = L^{2/3} / (1.426 + 0.426 t + L),
// maximized continuously at L = 2 (1.426 + 0.426 t).
template <class Scalar = double>
TuningReport<Scalar> optimal_multistep(Scalar t) {
  if (t < 0) throw std::invalid_argument("optimal_multistep: need t >= 0");
  const Scalar c = Scalar(1.426) + Scalar(0.426) * t;
  TuningReport<Scalar> out;
  const auto scaling = optimal_scaling_langevin<Scalar>();
  out.s0 = scaling.s0;
  out.targetAcceptance = scaling.acceptance;
  out.continuousL = 2 * c;
  const auto efficiency = [&](Scalar L) { return std::pow(L, Scalar(2) / 3) / (c + L); };
  const int lmax = std::max(20, int(std::ceil(6 * c)));
  Scalar best = -1;
  for (int L = 1; L <= lmax; ++L) {
    const Scalar e = efficiency(Scalar(L));
    out.efficiencyCurve.emplace_back(Scalar(L), e);
    if (e > best) {
      best = e;
      out.recommendedL = L;
    }
  }
  return out;
}

// Optimal HMC integration time for the spectrum lambda_i restricted to the
// selected modes: maximize over T in (0, 2 pi / lambda_min] the worst-case
// (default) or mean of the per-mode jump factors (1 - cos(lambda_i T)) / lambda_i^2.
// A constant selected spectrum gives exactly T = pi / lambda.
template <class Scalar>
Scalar optimal_hmc_time(const Vector<Scalar>& spectrum,
                        const std::vector<Eigen::Index>& importantModes,
                        bool meanAggregate = false) {
  if (importantModes.empty()) throw std::invalid_argument("optimal_hmc_time: empty mode set");
  Scalar lamMin = std::numeric_limits<Scalar>::infinity(), lamMax = 0;
  for (const Eigen::Index i : importantModes) {
    if (i < 0 || i >= spectrum.size())
      throw std::out_of_range("optimal_hmc_time: mode index out of range");
    if (!(spectrum[i] > 0)) throw std::invalid_argument("optimal_hmc_time: need lambda > 0");
    lamMin = std::min(lamMin, spectrum[i]);
    lamMax = std::max(lamMax, spectrum[i]);
  }
  if (lamMax - lamMin <= Scalar(1e-12) * lamMax) return Scalar(M_PI) / lamMax;

  const auto objective = [&](Scalar T) {
    Scalar worst = std::numeric_limits<Scalar>::infinity(), sum = 0;
    for (const Eigen::Index i : importantModes) {
      const Scalar lam = spectrum[i];
      const Scalar v = (1 - std::cos(lam * T)) / (lam * lam);
      worst = std::min(worst, v);
      sum += v;
    }
    return meanAggregate ? sum / Scalar(importantModes.size()) : worst;
  };
  const Scalar tMax = 2 * Scalar(M_PI) / lamMin;
  const int grid = 2048;
  int bestK = 1;
  Scalar best = -1;
  for (int k = 1; k <= grid; ++k) {
    const Scalar v = objective(tMax * Scalar(k) / grid);
    if (v > best) {
      best = v;
      bestK = k;
    }
  }
  const Scalar lo = tMax * Scalar(std::max(1, bestK - 1)) / grid;
  const Scalar hi = tMax * Scalar(std::min(grid, bestK + 1)) / grid;
  return detail::golden_max(objective, lo, hi);
}

template <class Scalar>
Scalar optimal_hmc_time(const Vector<Scalar>& spectrum, bool meanAggregate = false) {
  std::vector<Eigen::Index> all(std::size_t(spectrum.size()));
  for (Eigen::Index i = 0; i < spectrum.size(); ++i) all[std::size_t(i)] = i;
  return optimal_hmc_time(spectrum, all, meanAggregate);
}

// Preconditioner quality score for the spectrum lambda_i of the
// preconditioned precision: tau = d^{-(1 + norm kappa)} sum lambda_i^norm w_i,
// the scaled 6-norm for Langevin proposals or the sin^2-weighted 4-norm for
// HMC. Lower is better; lambda_i = 1 (the perfect preconditioner) minimizes it.
template <class Scalar>
Scalar preconditioner_score(const Vector<Scalar>& spectrumVA, Scalar kappa, int norm,
                            const std::type_identity_t<std::optional<Vector<Scalar>>>& weights =
                                std::nullopt) {
  if (norm != 4 && norm != 6)
    throw std::invalid_argument("preconditioner_score: norm must be 4 or 6");
  if (weights && norm != 4)
    throw std::invalid_argument("preconditioner_score: weights only valid with norm = 4");
  if (weights && weights->size() != spectrumVA.size())
    throw std::invalid_argument("preconditioner_score: weight length mismatch");
  const Scalar d = Scalar(spectrumVA.size());
  const auto powed = spectrumVA.array().pow(Scalar(norm));
  const Scalar sum = weights ? (powed * weights->array()).sum() : powed.sum();
  return std::pow(d, -(1 + Scalar(norm) * kappa)) * sum;
}

}  // namespace arp
