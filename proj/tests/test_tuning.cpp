#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "arp/tuning.hpp"

using namespace arp;

namespace {

double normal_pdf(double x) { return std::exp(-x * x / 2) / std::sqrt(2 * M_PI); }

}  // namespace

TEST_CASE("optimal_scaling_langevin: frozen constants and first-order condition") {
  const auto c = optimal_scaling_langevin<double>();
  // Frozen from 40-digit root finding on d/ds [s^2 Phi(-s^3)] = 0.
  CHECK(c.s0 == doctest::Approx(0.82515121541264373878).epsilon(1e-7));
  CHECK(c.acceptance == doctest::Approx(0.57423563561303187628).epsilon(1e-7));
  CHECK(c.l == doctest::Approx(1.6503024308252874776).epsilon(1e-7));

  // The published rounded values.
  CHECK(std::abs(c.s0 - 0.8252) < 1e-3);
  CHECK(std::abs(c.acceptance - 0.574) < 1e-3);

  // Stationarity: 2 s Phi(-s^3) = 3 s^4 phi(s^3) at the optimum.
  const double s = c.s0;
  const double foc = 2 * s * normal_cdf(-s * s * s) -
                     3 * std::pow(s, 4) * normal_pdf(s * s * s);
  CHECK(std::abs(foc) < 1e-6);

  // l is a local maximum of the jump objective l^2 * 2 Phi(-l^3/8).
  const auto jump = [](double l) { return l * l * 2 * normal_cdf(-l * l * l / 8); };
  CHECK(jump(c.l) > jump(c.l * 1.05));
  CHECK(jump(c.l) > jump(c.l * 0.95));
}

TEST_CASE("optimal_scaling_langevin: s0 and acceptance do not depend on (tau, theta)") {
  const auto ref = optimal_scaling_langevin<double>();
  const double taus[] = {0.135, 0.5, 1.0, 2.0, 7.39};
  const double thetas[] = {0.0, 0.2, 0.8, 1.0};
  for (const double tau : taus) {
    for (const double theta : thetas) {
      const auto c = optimal_scaling_langevin(tau, theta);
      CHECK(c.s0 == doctest::Approx(ref.s0).epsilon(1e-6));
      CHECK(c.acceptance == doctest::Approx(ref.acceptance).epsilon(1e-6));
      // l soaks up the scale: l = s0 (|theta-1/2| sqrt(tau)/4)^{-1/3}.
      const double scale = std::pow(std::abs(theta - 0.5) * std::sqrt(tau) / 4, -1.0 / 3);
      CHECK(c.l == doctest::Approx(ref.s0 * scale).epsilon(1e-6));
    }
  }
  CHECK_THROWS_AS(optimal_scaling_langevin(1.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(optimal_scaling_langevin(0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(optimal_scaling_langevin(-1.0, 0.0), std::invalid_argument);
}

TEST_CASE("optimal_scaling_hmc: frozen maximizer of sqrt(s) Phi(-s)") {
  const auto c = optimal_scaling_hmc<double>();
  CHECK(c.s0 == doctest::Approx(0.4520128143955444626).epsilon(1e-7));
  CHECK(c.acceptance == doctest::Approx(0.65125975092777870246).epsilon(1e-7));
  CHECK(std::abs(c.acceptance - 0.651) < 0.005);
  CHECK(c.l == doctest::Approx(std::sqrt(8 * 0.4520128143955444626)).epsilon(1e-7));

  // Stationarity: Phi(-s)/(2 sqrt(s)) = sqrt(s) phi(s) at the optimum.
  const double s = c.s0;
  const double foc = normal_cdf(-s) / (2 * std::sqrt(s)) - std::sqrt(s) * normal_pdf(s);
  CHECK(std::abs(foc) < 1e-6);

  // The note must flag the inconsistent pairing of 0.4250 with 0.651:
  // 2 Phi(-0.4250) = 0.67084, not 0.651.
  CHECK(!c.note.empty());
  CHECK(2 * normal_cdf(-0.4250) == doctest::Approx(0.67083667474033901833).epsilon(1e-13));
}

TEST_CASE("optimal_multistep: L = 3 at zero surrogate cost") {
  const auto r = optimal_multistep<double>(0.0);
  REQUIRE(r.recommendedL.has_value());
  CHECK(*r.recommendedL == 3);
  REQUIRE(r.continuousL.has_value());
  CHECK(std::abs(*r.continuousL - 2.852) <= 1e-6);

  // Frozen efficiency at the optimum: 3^{2/3} / (1.426 + 3).
  REQUIRE(r.efficiencyCurve.size() >= 20);
  CHECK(r.efficiencyCurve[0].first == 1.0);
  CHECK(r.efficiencyCurve[2].first == 3.0);
  CHECK(r.efficiencyCurve[2].second ==
        doctest::Approx(0.46996923250155989935).epsilon(1e-13));

  // The curve obeys its own formula, and the tuned-acceptance fields carry
  // the Langevin constants.
  for (const auto& [L, e] : r.efficiencyCurve)
    CHECK(e == doctest::Approx(std::pow(L, 2.0 / 3) / (1.426 + L)).epsilon(1e-13));
  CHECK(r.s0 == doctest::Approx(0.82515121541264373878).epsilon(1e-6));
  CHECK(r.targetAcceptance == doctest::Approx(0.57423563561303187628).epsilon(1e-6));
  CHECK_FALSE(r.recommendedH.has_value());

  CHECK_THROWS_AS(optimal_multistep<double>(-0.5), std::invalid_argument);
}

TEST_CASE("optimal_multistep: multi-stepping beats single steps even at high cost") {
  int lastL = 0;
  for (const double t : {0.0, 1.0, 5.0}) {
    const auto r = optimal_multistep(t);
    const double c = 1.426 + 0.426 * t;
    CHECK(*r.continuousL == doctest::Approx(2 * c).epsilon(1e-14));
    // efficiency(3) > efficiency(1) regardless of surrogate cost.
    CHECK(r.efficiencyCurve[2].second > r.efficiencyCurve[0].second);
    // Costlier surrogate steps push the optimal L up.
    CHECK(*r.recommendedL >= lastL);
    lastL = *r.recommendedL;
  }
}

TEST_CASE("optimal_hmc_time: constant spectra have the closed form pi/lambda") {
  Vector<double> lam(3);
  lam << 2.0, 2.0, 2.0;
  CHECK(optimal_hmc_time(lam) == M_PI / 2);

  Vector<double> mix(2);
  mix << 1.0, 3.0;
  // Restricting to one mode makes the spectrum constant again. (Braced lists
  // would prefer the bool overload, so spell the vector out.)
  CHECK(optimal_hmc_time(mix, std::vector<Eigen::Index>{0}) == M_PI);
  CHECK(optimal_hmc_time(mix, std::vector<Eigen::Index>{1}) == M_PI / 3);
}

TEST_CASE("optimal_hmc_time: worst-case aggregate on a two-mode spectrum") {
  Vector<double> lam(2);
  lam << 1.0, 3.0;
  const auto objective = [&](double T) {
    return std::min(1 - std::cos(T), (1 - std::cos(3 * T)) / 9);
  };
  const double T = optimal_hmc_time(lam);
  CHECK(T > 0.0);
  CHECK(T <= 2 * M_PI + 1e-12);
  // The global optimum value is 2/9 (the fast mode's ceiling), reached where
  // cos(3T) = -1 while the slow mode is still above it.
  CHECK(std::abs(objective(T) - 2.0 / 9) < 1e-9);
  CHECK(objective(T) >= objective(M_PI) - 1e-9);
  CHECK(objective(T) >= objective(M_PI / 3) - 1e-9);

  // Independent fine-grid oracle: nothing on a 20001-point grid beats it.
  double gridBest = 0;
  for (int k = 1; k <= 20001; ++k)
    gridBest = std::max(gridBest, objective(2 * M_PI * k / 20001.0));
  CHECK(objective(T) >= gridBest - 1e-6);
}

TEST_CASE("optimal_hmc_time: mean aggregate peaks where both cosines align") {
  Vector<double> lam(2);
  lam << 1.0, 3.0;
  // (1-cos T)/2 + (1-cos 3T)/18 is maximal exactly at T = pi.
  const double T = optimal_hmc_time(lam, true);
  CHECK(T == doctest::Approx(M_PI).epsilon(1e-6));
}

TEST_CASE("optimal_hmc_time: argument validation") {
  Vector<double> lam(2);
  lam << 1.0, 2.0;
  CHECK_THROWS_AS(optimal_hmc_time(lam, std::vector<Eigen::Index>{}), std::invalid_argument);
  CHECK_THROWS_AS(optimal_hmc_time(lam, std::vector<Eigen::Index>{2}), std::out_of_range);
  CHECK_THROWS_AS(optimal_hmc_time(lam, std::vector<Eigen::Index>{-1}), std::out_of_range);
  Vector<double> bad(2);
  bad << 0.0, 1.0;
  CHECK_THROWS_AS(optimal_hmc_time(bad), std::invalid_argument);
}

TEST_CASE("preconditioner_score: frozen power-law values approach 1/7") {
  Vector<double> lam100(100), lam1000(1000);
  for (Eigen::Index i = 0; i < 100; ++i) lam100[i] = double(i + 1);
  for (Eigen::Index i = 0; i < 1000; ++i) lam1000[i] = double(i + 1);

  const double s100 = preconditioner_score(lam100, 1.0, 6);
  const double s1000 = preconditioner_score(lam1000, 1.0, 6);
  // d^{-7} sum i^6, frozen from exact integer arithmetic.
  CHECK(s100 == doctest::Approx(0.1479071411905).epsilon(1e-11));
  CHECK(s1000 == doctest::Approx(0.1433576428569761905).epsilon(1e-11));
  // Riemann-sum limit 1/7: within 4% at d = 100, 1.5% at d = 1000, from above.
  CHECK(s100 * 7 > 1.0);
  CHECK(std::abs(s100 * 7 - 1) < 0.04);
  CHECK(s1000 * 7 > 1.0);
  CHECK(std::abs(s1000 * 7 - 1) < 0.015);
  CHECK(s1000 < s100);
}

TEST_CASE("preconditioner_score: perfect preconditioning scores 1, weights weigh") {
  Vector<double> ones = Vector<double>::Ones(64);
  CHECK(preconditioner_score(ones, 0.0, 6) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(preconditioner_score(ones, 0.0, 4) == doctest::Approx(1.0).epsilon(1e-14));

  Vector<double> lam(2), w(2);
  lam << 1.0, 1.0;
  w << 0.5, 0.5;
  CHECK(preconditioner_score(lam, 0.0, 4, w) == doctest::Approx(0.5).epsilon(1e-15));

  CHECK_THROWS_AS(preconditioner_score(lam, 0.0, 5), std::invalid_argument);
  CHECK_THROWS_AS(preconditioner_score(lam, 0.0, 6, w), std::invalid_argument);
  Vector<double> w3 = Vector<double>::Ones(3);
  CHECK_THROWS_AS(preconditioner_score(lam, 0.0, 4, w3), std::invalid_argument);
}
