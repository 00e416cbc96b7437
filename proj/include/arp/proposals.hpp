#pragma once
#include <Eigen/Dense>

#include <cmath>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>

#include "arp/rng.hpp"
#include "arp/targets.hpp"

// Stationary stochastic AR(1) proposals y = G x + g + nu, nu ~ N(0, Sigma),
// with G and Sigma functions of A so that everything is diagonal on the
// target's eigenbasis. Each mode carries a transfer pair (G_i, Sigma_i); the
// offset g is recovered from the stored proposal-equilibrium mean as
// g = (I - G) mean, which every built-in constructor satisfies with
// mean = A^{-1} b.

namespace arp {

enum class ProposalLabel { sla, theta_sla, cn, pcn, hmc, multi_step, custom };

inline const char* to_string(ProposalLabel l) {
  switch (l) {
    case ProposalLabel::sla: return "sla";
    case ProposalLabel::theta_sla: return "theta-sla";
    case ProposalLabel::cn: return "cn";
    case ProposalLabel::pcn: return "pcn";
    case ProposalLabel::hmc: return "hmc";
    case ProposalLabel::multi_step: return "multi-step";
    case ProposalLabel::custom: return "custom";
  }
  return "custom";
}

template <class Scalar>
struct Ar1Proposal {
  using Vec = Vector<Scalar>;
  using Mat = Matrix<Scalar>;

  Eigen::Index d = 0;
  Vec gEig;          // eigenvalues of G on the target eigenbasis
  Vec sigEig;        // eigenvalues of Sigma, > 0
  Vec lambdaTilde2;  // stationary precision (1 - G_i^2)/Sigma_i; constructors with
                     // an exact closed form store it directly so identities like
                     // the theta = 1/2 equilibrium match hold bit-for-bit
  Vec offsetMean;    // proposal-equilibrium mean (original coordinates)
  Vec offsetModes;   // Q^T offsetMean
  Mat basis;         // shared with the target; empty means identity
  ProposalLabel label = ProposalLabel::custom;

  bool hasBasis() const { return basis.size() > 0; }
  Vec toModes(const Vec& x) const { return hasBasis() ? Vec(basis.transpose() * x) : x; }
  Vec fromModes(const Vec& z) const { return hasBasis() ? Vec(basis * z) : z; }
};

// Proposal-equilibrium Gaussian N(mean, precision Q diag(lambdaTilde2) Q^T).
template <class Scalar>
struct StationaryGaussian {
  Vector<Scalar> mean;
  Vector<Scalar> meanModes;
  Vector<Scalar> lambdaTilde2;
};

template <class Scalar>
Ar1Proposal<Scalar> make_ar1(const Vector<Scalar>& gEig, const Vector<Scalar>& sigEig,
                             const Vector<Scalar>& offsetMean,
                             const Matrix<Scalar>& basis = Matrix<Scalar>(),
                             ProposalLabel label = ProposalLabel::custom) {
  const Eigen::Index d = gEig.size();
  if (d < 1) throw std::invalid_argument("proposal: dimension must be >= 1");
  if (sigEig.size() != d || offsetMean.size() != d)
    throw std::invalid_argument("proposal: field lengths disagree");
  if (gEig.cwiseAbs().maxCoeff() >= Scalar(1))
    throw std::invalid_argument("proposal: divergent, spectral radius of G must be < 1");
  if ((sigEig.array() <= Scalar(0)).any())
    throw std::invalid_argument("proposal: noise eigenvalues must be strictly positive");
  Ar1Proposal<Scalar> p;
  p.d = d;
  p.gEig = gEig;
  p.sigEig = sigEig;
  p.lambdaTilde2 = ((Scalar(1) - gEig.array().square()) / sigEig.array()).matrix();
  p.offsetMean = offsetMean;
  p.basis = basis;
  p.offsetModes = p.toModes(offsetMean);
  p.label = label;
  return p;
}

// N(A^{-1}beta, A^{-1}) of the un-Metropolized proposal chain:
// lambdaTilde_i^2 = (1 - G_i^2) / Sigma_i.
template <class Scalar>
StationaryGaussian<Scalar> stationary(const Ar1Proposal<Scalar>& p) {
  if (p.gEig.cwiseAbs().maxCoeff() >= Scalar(1))
    throw std::invalid_argument("stationary: divergent proposal, |G_i| >= 1");
  StationaryGaussian<Scalar> s;
  s.mean = p.offsetMean;
  s.meanModes = p.offsetModes;
  s.lambdaTilde2 =
      p.lambdaTilde2.size() == p.d
          ? p.lambdaTilde2
          : Vector<Scalar>(((Scalar(1) - p.gEig.array().square()) / p.sigEig.array()).matrix());
  return s;
}

// Inverse of stationary(): Sigma_i = (1 - G_i^2) / lambdaTilde_i^2.
template <class Scalar>
Vector<Scalar> noise_from_stationary(const Vector<Scalar>& gEig,
                                     const Vector<Scalar>& lambdaTilde2) {
  if (lambdaTilde2.size() != gEig.size())
    throw std::invalid_argument("noise_from_stationary: length mismatch");
  if ((lambdaTilde2.array() <= Scalar(0)).any())
    throw std::invalid_argument("noise_from_stationary: stationary precision must be > 0");
  return ((Scalar(1) - gEig.array().square()) / lambdaTilde2.array()).matrix();
}

// Langevin family: y = (I + th/2 VA)^{-1} ((I - (1-t)h/2 VA) x + h V b + sqrt(h V) xi)
// in original coordinates, diagonal per mode with the B = V^{1/2} A V^{1/2}
// eigenvalue bl2_i = V_i lambda_i^2:
//   G_i     = (1 - (1-theta) h bl2/2) / (1 + theta h bl2/2)
//   Sigma_i = h V_i / (1 + theta h bl2/2)^2
// Special members: theta=0,V=I -> sla; theta=1/2,V=I -> cn; theta=1/2,V=A^{-1} -> pcn.
template <class Scalar>
Ar1Proposal<Scalar> langevin(Scalar theta, Scalar h, const SpectralTarget<Scalar>& target,
                             const Vector<Scalar>& massEig) {
  if (!(h > Scalar(0))) throw std::invalid_argument("langevin: step size h must be > 0");
  if (theta < Scalar(0) || theta > Scalar(1))
    throw std::invalid_argument("langevin: theta must lie in [0,1]");
  if (massEig.size() != target.d) throw std::invalid_argument("langevin: mass length mismatch");
  if ((massEig.array() <= Scalar(0)).any())
    throw std::invalid_argument("langevin: mass eigenvalues must be > 0");

  Vector<Scalar> gEig(target.d), sigEig(target.d), lt2(target.d);
  for (Eigen::Index i = 0; i < target.d; ++i) {
    const Scalar t = h * massEig[i] * target.lambda2[i];
    // rho(G) < 1 needs t (1 - 2 theta) < 4; violated only for theta < 1/2.
    if (t * (Scalar(1) - Scalar(2) * theta) >= Scalar(4))
      throw std::invalid_argument("langevin: divergent, h*V*lambda^2 too large at mode " +
                                  std::to_string(i));
    const Scalar den = Scalar(1) + theta * t / Scalar(2);
    gEig[i] = (Scalar(1) - (Scalar(1) - theta) * t / Scalar(2)) / den;
    sigEig[i] = h * massEig[i] / (den * den);
    // Stationary precision lambdaTilde^2 = lambda^2 (1 + (theta - 1/2) t / 2),
    // stored in closed form: at theta = 1/2 it is the target precision bit-for-bit.
    lt2[i] = target.lambda2[i] * (Scalar(1) + (theta - Scalar(0.5)) * t / Scalar(2));
  }

  const bool unitMass = ((massEig.array() - Scalar(1)).abs() < Scalar(1e-14)).all();
  const bool invMass =
      ((massEig.array() * target.lambda2.array() - Scalar(1)).abs() < Scalar(1e-12)).all();
  ProposalLabel label = ProposalLabel::theta_sla;
  if (unitMass && theta == Scalar(0)) label = ProposalLabel::sla;
  else if (unitMass && theta == Scalar(0.5)) label = ProposalLabel::cn;
  else if (invMass && theta == Scalar(0.5)) label = ProposalLabel::pcn;

  auto p = make_ar1(gEig, sigEig, target.mean, target.basis, label);
  p.lambdaTilde2 = lt2;
  p.offsetModes = target.meanModes;  // equal by construction; keep them bit-identical
  return p;
}

template <class Scalar>
Ar1Proposal<Scalar> langevin(Scalar theta, Scalar h, const SpectralTarget<Scalar>& target) {
  return langevin(theta, h, target, Vector<Scalar>(Vector<Scalar>::Ones(target.d)));
}

template <class Scalar>
struct HmcSchedule {
  Scalar h;                 // leapfrog step size
  int L;                    // leapfrog step count
  Vector<Scalar> massEig;   // eigenvalues of the preconditioner V
  Scalar Tprime() const { return h * Scalar(L); }
};

template <class Scalar>
HmcSchedule<Scalar> make_hmc_schedule(Scalar h, int L, const Vector<Scalar>& massEig) {
  if (!(h > Scalar(0))) throw std::invalid_argument("hmc: step size h must be > 0");
  if (L < 1) throw std::invalid_argument("hmc: need at least one leapfrog step");
  if ((massEig.array() <= Scalar(0)).any())
    throw std::invalid_argument("hmc: mass eigenvalues must be > 0");
  return HmcSchedule<Scalar>{h, L, massEig};
}

// Single-mode L-step leapfrog transfer eigenvalue: cos(L theta) with
// theta = -acos(1 - h^2 lambda^2 / 2). Stable iff h^2 lambda^2 < 4.
template <class Scalar>
Scalar hmc_eigen(Scalar lambda2, Scalar h, int L) {
  if (!(lambda2 > Scalar(0))) throw std::invalid_argument("hmc_eigen: lambda^2 must be > 0");
  if (L < 1) throw std::invalid_argument("hmc_eigen: need L >= 1");
  const Scalar t = h * h * lambda2;
  if (!(t < Scalar(4))) throw std::invalid_argument("hmc_eigen: unstable, h^2 lambda^2 >= 4");
  return std::cos(Scalar(L) * std::acos(Scalar(1) - t / Scalar(2)));
}

// L leapfrog steps with momentum ~ N(0, V^{-1}) make an AR(1) proposal. Per
// mode, with bl2 = V_i lambda_i^2, the 2x2 step matrix factorizes over a
// rotation by theta_i = -acos(1 - h^2 bl2/2) scaled by a_i = bl_i
// sqrt(1 - h^2 bl2/4), so the L-step position block is exactly
//   G_i = cos(L theta_i),  noise std (transformed) = sin(L theta_i)/a_i,
// and back in original coordinates Sigma_i = V_i sin^2(L theta_i)/a_i^2.
// The closed form avoids the cancellation of naive 2x2 matrix powers when
// L theta_i sits near a multiple of pi.
template <class Scalar>
Ar1Proposal<Scalar> hmc(const HmcSchedule<Scalar>& sched, const SpectralTarget<Scalar>& target) {
  if (sched.massEig.size() != target.d) throw std::invalid_argument("hmc: mass length mismatch");
  if (sched.L < 1) throw std::invalid_argument("hmc: need at least one leapfrog step");

  Vector<Scalar> gEig(target.d), sigEig(target.d), lt2(target.d);
  Eigen::Index floored = 0;
  for (Eigen::Index i = 0; i < target.d; ++i) {
    const Scalar bl2 = sched.massEig[i] * target.lambda2[i];
    const Scalar t = sched.h * sched.h * bl2;
    if (!(t < Scalar(4)))
      throw std::invalid_argument("hmc: unstable, h^2 V lambda^2 >= 4 at mode " +
                                  std::to_string(i));
    const Scalar theta = std::acos(Scalar(1) - t / Scalar(2));
    const Scalar a2 = bl2 * (Scalar(1) - t / Scalar(4));
    const Scalar s = std::sin(Scalar(sched.L) * theta);
    gEig[i] = std::cos(Scalar(sched.L) * theta);
    sigEig[i] = sched.massEig[i] * s * s / a2;
    lt2[i] = target.lambda2[i] * (Scalar(1) - t / Scalar(4));  // stationary precision
    // A mode returning (almost) exactly to its start has (almost) zero noise;
    // floor it so the proposal density stays well defined.
    if (sigEig[i] < Scalar(1e-24)) {
      sigEig[i] = Scalar(1e-24);
      ++floored;
    }
  }
  if (floored > 0)
    std::cerr << "hmc: " << floored
              << " near-resonant mode(s) with sin(L theta) ~ 0; noise floored at 1e-24\n";
  auto p = make_ar1(gEig, sigEig, target.mean, target.basis, ProposalLabel::hmc);
  p.lambdaTilde2 = lt2;
  p.offsetModes = target.meanModes;
  return p;
}

// L-fold composition in closed form: G_L = G^L and
// Sigma_L = Sigma (1 - G^{2L}) / (1 - G^2); the equilibrium is unchanged.
template <class Scalar>
Ar1Proposal<Scalar> compose_steps(const Ar1Proposal<Scalar>& p, int L) {
  if (L < 1) throw std::invalid_argument("compose_steps: need L >= 1");
  if (L == 1) return p;
  Ar1Proposal<Scalar> out = p;
  out.gEig = p.gEig.array().pow(Scalar(L)).matrix();
  out.sigEig = (p.sigEig.array() * (Scalar(1) - out.gEig.array().square()) /
                (Scalar(1) - p.gEig.array().square()))
                   .matrix();
  out.label = ProposalLabel::multi_step;
  return out;
}

// One proposal draw y = G x + (I - G) mean + Sigma^{1/2} xi, applied spectrally.
template <class Scalar>
Vector<Scalar> propose(const Ar1Proposal<Scalar>& p, const Vector<Scalar>& x, Rng& rng) {
  if (x.size() != p.d) throw std::invalid_argument("propose: dimension mismatch");
  const Vector<Scalar> z = p.toModes(x);
  Vector<Scalar> zy(p.d);
  for (Eigen::Index i = 0; i < p.d; ++i)
    zy[i] = p.gEig[i] * z[i] + (Scalar(1) - p.gEig[i]) * p.offsetModes[i] +
            std::sqrt(p.sigEig[i]) * Scalar(rng.normal());
  return p.fromModes(zy);
}

// Detailed-balance residual of the proposal w.r.t. its own stationary
// Gaussian: max over random pairs (x,y) drawn from the stationary law of
// | log pi*(x) + log q(x,y) - log pi*(y) - log q(y,x) |.
template <class Scalar>
Scalar check_reversibility(const Ar1Proposal<Scalar>& p, Eigen::Index trials, std::uint64_t seed) {
  const StationaryGaussian<Scalar> st = stationary(p);
  Rng rng(seed);
  const Vector<Scalar> sd = st.lambdaTilde2.array().rsqrt().matrix();
  auto logPiStar = [&](const Vector<Scalar>& z) {
    return -Scalar(0.5) *
           (st.lambdaTilde2.array() * (z - st.meanModes).array().square()).sum();
  };
  auto logQ = [&](const Vector<Scalar>& zFrom, const Vector<Scalar>& zTo) {
    Scalar acc = 0;
    for (Eigen::Index i = 0; i < p.d; ++i) {
      const Scalar resid =
          zTo[i] - p.gEig[i] * zFrom[i] - (Scalar(1) - p.gEig[i]) * p.offsetModes[i];
      acc -= resid * resid / (Scalar(2) * p.sigEig[i]);
    }
    return acc;
  };
  Scalar worst = 0;
  Vector<Scalar> zx(p.d), zy(p.d);
  for (Eigen::Index k = 0; k < trials; ++k) {
    for (Eigen::Index i = 0; i < p.d; ++i) {
      zx[i] = st.meanModes[i] + sd[i] * Scalar(rng.normal());
      zy[i] = st.meanModes[i] + sd[i] * Scalar(rng.normal());
    }
    const Scalar r = logPiStar(zx) + logQ(zx, zy) - logPiStar(zy) - logQ(zy, zx);
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

}  // namespace arp
