#pragma once
#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "arp/proposals.hpp"
#include "arp/targets.hpp"

// Closed-form predictions: per-mode gap terms, the normal limit of the log
// acceptance ratio Z ~ N(mu, sigma^2), the limiting expected acceptance
// probability and squared jump sizes, the Langevin / multi-step / HMC
// scaling limits, and non-Gaussian corrections and sandwich bounds.

namespace arp {

template <class Scalar>
Scalar normal_cdf(Scalar x) {
  return Scalar(0.5) * std::erfc(-x / std::sqrt(Scalar(2)));
}

namespace detail {

// log Phi(x), asymptotic expansion once erfc underflows (x < -37).
template <class Scalar>
Scalar log_normal_cdf(Scalar x) {
  if (x > Scalar(-37)) return std::log(normal_cdf(x));
  const Scalar x2 = x * x;
  return -x2 / Scalar(2) - std::log(-x) - Scalar(0.5) * std::log(Scalar(2) * Scalar(M_PI)) +
         std::log1p(-Scalar(1) / x2 + Scalar(3) / (x2 * x2));
}

}  // namespace detail

// Per-mode gap between the proposal equilibrium N(Atilde^{-1}beta, Atilde^{-1})
// and the target N(A^{-1}b, A^{-1}):
//   gTilde = 1 - G,  gHat = 1 - G^2,  r = (lambda^2 - lambdaTilde^2)/lambda^2,
//   rTilde = lambda^2/lambdaTilde^2,  rHat = mean gap in mode coordinates,
// and the T terms that assemble the per-mode moments of Z,
//   mu_i = T0 + T3 + T4,  sigma_i^2 = T1^2 + T2^2 + 2 T3^2 + 2 T4^2 + T5^2.
template <class Scalar>
struct GapTerms {
  Vector<Scalar> gTilde, gHat, r, rTilde, rHat;
  Vector<Scalar> T0, T1, T2, T3, T4, T5;
  Vector<Scalar> muModes, sigma2Modes;

  Scalar mu() const { return muModes.sum(); }
  Scalar sigma2() const { return sigma2Modes.sum(); }
};

template <class Scalar>
GapTerms<Scalar> gap_terms(const SpectralTarget<Scalar>& t, const Ar1Proposal<Scalar>& p) {
  if (t.d != p.d) throw std::invalid_argument("gap_terms: dimension mismatch");
  const bool tb = t.hasBasis(), pb = p.hasBasis();
  if (tb != pb ||
      (tb && (t.basis - p.basis).cwiseAbs().maxCoeff() > Scalar(1e-12)))
    throw std::invalid_argument("gap_terms: target and proposal bases differ");

  const StationaryGaussian<Scalar> st = stationary(p);
  GapTerms<Scalar> g;
  const auto& G = p.gEig.array();
  const auto lam2 = t.lambda2.array();
  const auto lt2 = st.lambdaTilde2.array();
  const auto lam = lam2.sqrt();
  g.gTilde = (1 - G).matrix();
  g.gHat = (1 - G.square()).matrix();
  g.r = ((lam2 - lt2) / lam2).matrix();
  g.rTilde = (lam2 / lt2).matrix();
  g.rHat = t.meanModes - st.meanModes;
  const auto rHat = g.rHat.array();
  const auto r = g.r.array();
  const auto gT = g.gTilde.array();
  const auto gH = g.gHat.array();
  const auto rT = g.rTilde.array();
  g.T0 = (rHat.square() * lam2 * (r * gH / 2 - gT)).matrix();
  g.T1 = (rHat * lam * (r * gH - gT)).matrix();
  g.T2 = (rHat * lam * (rT * gH).sqrt() * (1 - r * G)).matrix();
  g.T3 = (r * gH / 2).matrix();
  g.T4 = (-r * rT * gH / 2).matrix();
  g.T5 = (-r * G * (rT * gH).sqrt()).matrix();
  g.muModes = g.T0 + g.T3 + g.T4;
  g.sigma2Modes = (g.T1.array().square() + g.T2.array().square() +
                   2 * g.T3.array().square() + 2 * g.T4.array().square() +
                   g.T5.array().square())
                      .matrix();
  return g;
}

// E[1 ^ e^X] for X ~ N(mu, sigma^2):
//   Phi(mu/sigma) + e^{mu + sigma^2/2} Phi(-sigma - mu/sigma),
// with the sigma -> 0 pointwise limit (1 if mu >= 0, else e^mu). The second
// term is evaluated through logs so large sigma cannot overflow.
template <class Scalar>
Scalar limit_acceptance(Scalar mu, Scalar sigma) {
  if (std::isnan(mu) || std::isnan(sigma) || sigma < Scalar(0))
    throw std::invalid_argument("limit_acceptance: need finite mu and sigma >= 0");
  if (sigma == Scalar(0)) return mu >= Scalar(0) ? Scalar(1) : std::exp(mu);
  const Scalar first = normal_cdf(mu / sigma);
  const Scalar second =
      std::exp(mu + sigma * sigma / Scalar(2) + detail::log_normal_cdf(-sigma - mu / sigma));
  return first + second;
}

// Sum over j = 1..5 is not required to include j = 0; small ratios
// sum |T_ji|^{2+delta} / (sum |T_ji|^2)^{1+delta/2} certify the CLT.
template <class Scalar>
std::array<Scalar, 5> lyapunov_diagnostic(const GapTerms<Scalar>& g, Scalar delta = Scalar(1)) {
  if (!(delta > Scalar(0))) throw std::invalid_argument("lyapunov_diagnostic: delta must be > 0");
  std::array<Scalar, 5> out{};
  const Vector<Scalar>* cols[5] = {&g.T1, &g.T2, &g.T3, &g.T4, &g.T5};
  for (int j = 0; j < 5; ++j) {
    const auto a = cols[j]->array().abs();
    const Scalar den = a.square().sum();
    out[std::size_t(j)] =
        den > Scalar(0) ? Scalar(a.pow(Scalar(2) + delta).sum() / std::pow(den, 1 + delta / 2))
                        : Scalar(0);
  }
  return out;
}

template <class Scalar>
struct LimitPrediction {
  Scalar mu = 0;
  Scalar sigma2 = 0;
  Scalar acceptance = 0;
  std::optional<Scalar> tau;
  std::vector<Eigen::Index> jumpModes;  // empty when the jump is direction-free
  std::vector<Scalar> jump;             // per entry of jumpModes, or one shared value
  std::string theorem;                  // which closed form produced this
  bool lyapunovOk = true;
  std::vector<Scalar> lyapunov;  // per-j ratios when computed
  std::string note;
};

// Finite-d evaluation of the normal limit of Z: mu = sum mu_i,
// sigma^2 = sum sigma_i^2, acceptance from limit_acceptance, with the
// Lyapunov ratios (delta = 1) as a CLT diagnostic (flagged above 0.1).
template <class Scalar>
LimitPrediction<Scalar> acceptance_prediction(const SpectralTarget<Scalar>& t,
                                              const Ar1Proposal<Scalar>& p) {
  const GapTerms<Scalar> g = gap_terms(t, p);
  LimitPrediction<Scalar> out;
  out.mu = g.mu();
  out.sigma2 = g.sigma2();
  out.acceptance = limit_acceptance(out.mu, std::sqrt(out.sigma2));
  const auto ly = lyapunov_diagnostic(g);
  out.lyapunov.assign(ly.begin(), ly.end());
  out.lyapunovOk = true;
  for (const Scalar v : ly)
    if (v > Scalar(0.1)) out.lyapunovOk = false;
  if (!out.lyapunovOk) out.note = "lyapunov ratio above 0.1: normal limit may be inaccurate";
  out.theorem = "acceptance-normal-limit";
  return out;
}

// Expected squared jump size along eigenvector q_i:
//   E[(q_i^T(x'-x))^2] = U1 U2 + E3 + o(U1), |E3| <= U3,
// with U2 the acceptance formula under leave-one-out sums mu^-, sigma^-.
// `simplified` is the small-gap value
//   ((1+G)/lambdaTilde^2 + (1-G)/lambda^2 + rHat^2) (1-G) E[alpha].
template <class Scalar>
struct JumpPrediction {
  Scalar U1 = 0, U2 = 0, U3 = 0;
  Scalar value = 0;       // U1 * U2
  Scalar simplified = 0;  // small-gap closed form
  Scalar muMinus = 0, sigmaMinus = 0;
};

template <class Scalar>
JumpPrediction<Scalar> jump_prediction(const SpectralTarget<Scalar>& t,
                                       const Ar1Proposal<Scalar>& p, Eigen::Index i) {
  if (i < 0 || i >= t.d) throw std::out_of_range("jump_prediction: mode index out of range");
  const GapTerms<Scalar> g = gap_terms(t, p);
  const StationaryGaussian<Scalar> st = stationary(p);
  const Scalar lam2 = t.lambda2[i], lt2 = st.lambdaTilde2[i];
  const Scalar gT = g.gTilde[i], gH = g.gHat[i], rT = g.rTilde[i], rH = g.rHat[i];

  JumpPrediction<Scalar> out;
  out.U1 = gT * gT * rH * rH + gT * gT / lam2 + gH / lt2;
  out.muMinus = g.mu() - g.muModes[i];
  const Scalar s2 = g.sigma2() - g.sigma2Modes[i];
  out.sigmaMinus = std::sqrt(std::max(Scalar(0), s2));
  out.U2 = limit_acceptance(out.muMinus, out.sigmaMinus);
  const Scalar m2 = g.sigma2Modes[i] + g.muModes[i] * g.muModes[i];
  const Scalar bracket = std::pow(gT, 4) * std::pow(rH, 4) +
                         Scalar(3) / (lam2 * lam2) * std::pow(gT * gT + rT * gH, 2) +
                         Scalar(6) / lam2 * rH * rH * gT * gT * (gT * gT + rT * gH);
  out.U3 = std::sqrt(m2) * std::sqrt(bracket);
  out.value = out.U1 * out.U2;
  const Scalar G = p.gEig[i];
  const Scalar ealpha = limit_acceptance(g.mu(), std::sqrt(g.sigma2()));
  out.simplified = ((Scalar(1) + G) / lt2 + (Scalar(1) - G) / lam2 + rH * rH) *
                   (Scalar(1) - G) * ealpha;
  return out;
}

namespace detail {

// Mild power-law sanity check on lambda_i against c i^kappa <= lambda_i <= C i^kappa:
// at finite d only the spread of lambda_i / i^kappa is observable.
template <class Scalar>
bool spectrum_follows_power_law(const Vector<Scalar>& lambda, Scalar kappa) {
  Scalar lo = std::numeric_limits<Scalar>::infinity(), hi = 0;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    const Scalar ratio = lambda[i] / std::pow(Scalar(i + 1), kappa);
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  return hi / lo < Scalar(1e4);
}

}  // namespace detail

// Langevin scaling limit at h = l^2 d^{-1/3 - 2 kappa}:
//   tau = d^{-(6 kappa + 1)} sum lambda_i^6 (B-spectrum lambda_i, not squared),
//   sigma^2 = l^6 (theta - 1/2)^2 tau / 4, mu = -sigma^2/2,
//   acceptance = 2 Phi(-l^3 |theta - 1/2| sqrt(tau) / 4), jump = h * acceptance.
template <class Scalar>
LimitPrediction<Scalar> langevin_limits(Scalar kappa, Scalar l, Scalar theta,
                                        const Vector<Scalar>& spectrumB) {
  if (!(l > Scalar(0))) throw std::invalid_argument("langevin_limits: need l > 0");
  const Scalar d = Scalar(spectrumB.size());
  LimitPrediction<Scalar> out;
  out.theorem = "langevin-scaling-limit";
  out.tau = std::pow(d, -(6 * kappa + 1)) * spectrumB.array().pow(6).sum();
  const Scalar h = l * l * std::pow(d, Scalar(-1) / 3 - 2 * kappa);
  const Scalar dev = std::abs(theta - Scalar(0.5));
  out.sigma2 = std::pow(l, 6) * dev * dev * *out.tau / 4;
  out.mu = -out.sigma2 / 2;
  out.acceptance = 2 * normal_cdf(-std::pow(l, 3) * dev * std::sqrt(*out.tau) / 4);
  out.jump = {h * out.acceptance};
  if (theta == Scalar(0.5))
    out.note = "theta = 1/2: Z vanishes and this step-size scaling is suboptimal";
  else if (!detail::spectrum_follows_power_law(spectrumB, kappa))
    out.note = "spectrum spread exceeds 1e4 around i^kappa; power-law premise doubtful";
  return out;
}

// L-step SLA scaling limit: acceptance = 2 Phi(-l^3 sqrt(L tau) / 8),
// jump = 2 L h Phi(-l^3 sqrt(L tau)/8), sigma^2 = l^6 L tau / 16, mu = -sigma^2/2.
template <class Scalar>
LimitPrediction<Scalar> multistep_sla_limits(Scalar kappa, Scalar l, int L,
                                             const Vector<Scalar>& spectrum) {
  if (L < 1) throw std::invalid_argument("multistep_sla_limits: need L >= 1");
  if (!(l > Scalar(0))) throw std::invalid_argument("multistep_sla_limits: need l > 0");
  const Scalar d = Scalar(spectrum.size());
  LimitPrediction<Scalar> out;
  out.theorem = "multistep-sla-limit";
  out.tau = std::pow(d, -(6 * kappa + 1)) * spectrum.array().pow(6).sum();
  const Scalar h = l * l * std::pow(d, Scalar(-1) / 3 - 2 * kappa);
  out.sigma2 = std::pow(l, 6) * Scalar(L) * *out.tau / 16;
  out.mu = -out.sigma2 / 2;
  const Scalar half = normal_cdf(-std::pow(l, 3) * std::sqrt(Scalar(L) * *out.tau) / 8);
  out.acceptance = 2 * half;
  out.jump = {2 * Scalar(L) * h * half};
  if (!detail::spectrum_follows_power_law(spectrum, kappa))
    out.note = "spectrum spread exceeds 1e4 around i^kappa; power-law premise doubtful";
  return out;
}

// HMC scaling limit at h = l d^{-1/4 - kappa}, integration time snapped to
// T' = h floor(T/h):
//   tau = d^{-(1 + 4 kappa)} sum lambda_i^4 sin^2(lambda_i T'),
//   acceptance = 2 Phi(-l^2 sqrt(tau) / 8), sigma^2 = l^4 tau / 16,
//   jump_i = 2 (1 - cos(lambda_i T')) / lambda_i^2 * acceptance (per direction).
template <class Scalar>
LimitPrediction<Scalar> hmc_limits(Scalar kappa, Scalar l, Scalar T,
                                   const Vector<Scalar>& spectrumB,
                                   const std::vector<Eigen::Index>& directions = {}) {
  if (!(l > Scalar(0))) throw std::invalid_argument("hmc_limits: need l > 0");
  const Scalar d = Scalar(spectrumB.size());
  const Scalar h = l * std::pow(d, Scalar(-0.25) - kappa);
  const auto L = std::uint64_t(T / h);
  if (L < 1) throw std::invalid_argument("hmc_limits: integration time shorter than one step");
  const Scalar Tp = h * Scalar(L);
  LimitPrediction<Scalar> out;
  out.theorem = "hmc-scaling-limit";
  out.tau = std::pow(d, -(1 + 4 * kappa)) *
            (spectrumB.array().pow(4) * (spectrumB.array() * Tp).sin().square()).sum();
  out.sigma2 = std::pow(l, 4) * *out.tau / 16;
  out.mu = -out.sigma2 / 2;
  out.acceptance = 2 * normal_cdf(-l * l * std::sqrt(*out.tau) / 8);
  for (const Eigen::Index i : directions) {
    if (i < 0 || i >= spectrumB.size())
      throw std::out_of_range("hmc_limits: direction index out of range");
    const Scalar lam = spectrumB[i];
    out.jumpModes.push_back(i);
    out.jump.push_back(2 * (1 - std::cos(lam * Tp)) / (lam * lam) * out.acceptance);
  }
  if (!detail::spectrum_follows_power_law(spectrumB, kappa))
    out.note = "spectrum spread exceeds 1e4 around i^kappa; power-law premise doubtful";
  return out;
}

// Perturbations bounded by |phi| <= M sandwich any Gaussian-case expectation v
// (acceptance or squared jump) inside [e^{-3M} v, e^{3M} v].
template <class Scalar>
std::pair<Scalar, Scalar> nongaussian_bounds(Scalar M, Scalar gaussianValue) {
  if (M < Scalar(0)) throw std::invalid_argument("nongaussian_bounds: need M >= 0");
  if (gaussianValue < Scalar(0))
    throw std::invalid_argument("nongaussian_bounds: value must be >= 0");
  return {std::exp(-3 * M) * gaussianValue, std::exp(3 * M) * gaussianValue};
}

// First-moment corrections under a perturbed target with per-mode moments
// kappa_i = E[xi_i], gamma_i = E[xi_i^2]:
//   mu_ng = mu + sum (kappa_i T1_i + T3_i (gamma_i - 1)),
//   sigma_ng^2 = sigma^2 + sum (kappa_i T1_i + T3_i (gamma_i - 1))^2.
// collapseSum = sum T1_i^2 + T3_i^2; when it vanishes the corrections vanish
// for any bounded moments and the Gaussian limit is recovered.
template <class Scalar>
struct NonGaussianMoments {
  Scalar mu = 0, sigma2 = 0, acceptance = 0;
  Scalar collapseSum = 0;
  bool collapsed = false;
};

template <class Scalar>
NonGaussianMoments<Scalar> nongaussian_mu_sigma(const GapTerms<Scalar>& g,
                                                const Vector<Scalar>& kappas,
                                                const Vector<Scalar>& gammas) {
  if (kappas.size() != g.T1.size() || gammas.size() != g.T1.size())
    throw std::invalid_argument("nongaussian_mu_sigma: moment array length mismatch");
  NonGaussianMoments<Scalar> out;
  const auto corr =
      (kappas.array() * g.T1.array() + g.T3.array() * (gammas.array() - 1)).eval();
  out.mu = g.mu() + corr.sum();
  out.sigma2 = g.sigma2() + corr.square().sum();
  out.acceptance = limit_acceptance(out.mu, std::sqrt(out.sigma2));
  out.collapseSum = (g.T1.array().square() + g.T3.array().square()).sum();
  out.collapsed = out.collapseSum <= Scalar(1e-10);
  return out;
}

// Jump size along q_i under a perturbed target is only located inside an
// interval: with unknown u in [-1,1] and v in [0,1],
//   (gTilde^2 rHat^2 + gHat/lambdaTilde^2) E[alpha]
//     + 2 (rHat gTilde^2 sqrt(gamma)/lambda) u + (gTilde^2 gamma/lambda^2) v.
template <class Scalar>
std::pair<Scalar, Scalar> nongaussian_jump_prediction(const SpectralTarget<Scalar>& t,
                                                      const Ar1Proposal<Scalar>& p,
                                                      Eigen::Index i, Scalar gamma_i,
                                                      Scalar expectedAlpha) {
  if (i < 0 || i >= t.d)
    throw std::out_of_range("nongaussian_jump_prediction: mode index out of range");
  const GapTerms<Scalar> g = gap_terms(t, p);
  const StationaryGaussian<Scalar> st = stationary(p);
  const Scalar lam = std::sqrt(t.lambda2[i]);
  const Scalar gT = g.gTilde[i];
  const Scalar base =
      (gT * gT * g.rHat[i] * g.rHat[i] + g.gHat[i] / st.lambdaTilde2[i]) * expectedAlpha;
  const Scalar uSpan = 2 * std::abs(g.rHat[i]) * gT * gT * std::sqrt(gamma_i) / lam;
  const Scalar vSpan = gT * gT * gamma_i / (lam * lam);
  return {base - uSpan, base + uSpan + vSpan};
}

}  // namespace arp
