#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "metasel/densities.hpp"
#include "metasel/equivalence.hpp"
#include "metasel/rng.hpp"
#include "metasel/samplers.hpp"
#include "metasel/special.hpp"

using namespace metasel;

namespace {
const CutoffGrid kGrid = CutoffGrid::standard();
}

TEST_CASE("rho to pi reference values") {
  const auto pi = rho_to_pi(SelectionProbs({1.0, 0.7, 0.1}), 0, 0, 1, kGrid);
  CHECK(pi.pi[0] == doctest::Approx(0.181818).epsilon(1e-4));
  CHECK(pi.pi[1] == doctest::Approx(0.127273).epsilon(1e-3));
  CHECK(pi.pi[2] == doctest::Approx(0.690909).epsilon(1e-4));

  const auto m = interval_masses(0, 1, 1, kGrid);
  const auto flat = rho_to_pi(SelectionProbs({1, 1, 1}), 0, 0, 1, kGrid);
  for (int j = 0; j < 3; ++j)
    CHECK(flat.pi[j] == doctest::Approx(m[j]).epsilon(1e-12));

  const auto hard = rho_to_pi(SelectionProbs({1, 0, 0}), 0, 0, 1, kGrid);
  CHECK(hard.pi[0] == doctest::Approx(1.0));
  CHECK(hard.pi[1] == 0.0);
}

TEST_CASE("pi to rho reference values and flags") {
  const auto m = interval_masses(0, 1, 1, kGrid);
  const auto flat = pi_to_rho(HackingProbs(m), 0, 0, 1, kGrid);
  for (int j = 0; j < 3; ++j)
    CHECK(flat.rho.rho[j] == doctest::Approx(1.0).epsilon(1e-12));

  const auto back =
      pi_to_rho(HackingProbs({0.181818, 0.127273, 0.690909}), 0, 0, 1, kGrid);
  CHECK(back.rho.rho[0] == 1.0);
  CHECK(back.rho.rho[1] == doctest::Approx(0.7).epsilon(1e-4));
  CHECK(back.rho.rho[2] == doctest::Approx(0.1).epsilon(1e-4));
  CHECK(back.satisfies_decreasing);

  // adversarial pi: returned unclamped with the validity flag cleared
  const auto adv = pi_to_rho(HackingProbs({0.01, 0.01, 0.98}), 0, 0, 1, kGrid);
  CHECK_FALSE(adv.satisfies_decreasing);
  CHECK(adv.rho.rho[2] > adv.rho.rho[1]);

  CHECK_THROWS((void)pi_to_rho(HackingProbs({0.0, 0.5, 0.5}), 0, 0, 1, kGrid));
}

TEST_CASE("round trips to machine precision") {
  Rng rng(107, 0);
  for (int rep = 0; rep < 300; ++rep) {
    const double t0 = sample_normal(rng);
    const double tau = 0.5 * rng.uniform();
    const double sigma = 0.1 + rng.uniform();
    const double r2 = rng.uniform(), r3 = r2 * rng.uniform();
    const SelectionProbs rho({1.0, r2, r3});
    const auto pi = rho_to_pi(rho, t0, tau, sigma, kGrid);
    const auto round = pi_to_rho(pi, t0, tau, sigma, kGrid);
    for (int j = 0; j < 3; ++j)
      CHECK(std::abs(round.rho.rho[j] - rho.rho[j]) <= 1e-12);

    const auto piv = sample_dirichlet(rng, std::vector<double>{1.0, 1.0, 1.0});
    const HackingProbs pistart(piv);
    const auto rho2 = pi_to_rho(pistart, t0, tau, sigma, kGrid);
    // the inverse can exceed the decreasing constraint; the forward map does
    // not require it, so the round trip must still close
    const auto pi2 = rho_to_pi(rho2.rho, t0, tau, sigma, kGrid);
    for (int j = 0; j < 3; ++j)
      CHECK(std::abs(pi2.pi[j] - pistart.pi[j]) <= 1e-12);
  }
}

TEST_CASE("matched densities agree pointwise at a common sigma") {
  Rng rng(109, 0);
  for (int rep = 0; rep < 50; ++rep) {
    const double t0 = 0.5 * sample_normal(rng);
    const double sigma = 0.2 + rng.uniform();
    const double r2 = 0.1 + 0.9 * rng.uniform(), r3 = r2 * rng.uniform();
    const SelectionProbs rho({1.0, r2, r3});

    // fixed effects: pubbias(rho) == phack(pi(rho)) as densities in x
    const auto pi = rho_to_pi(rho, t0, 0.0, sigma, kGrid);
    for (int k = 0; k < 10; ++k) {
      const double x = t0 + 3.0 * sample_normal(rng) * sigma;
      const double a = loglik_pubbias({x, sigma}, t0, 0.0, rho, kGrid);
      const double b = loglik_phack_fixed({x, sigma}, t0, pi, kGrid);
      if (a == kNegInf && b == kNegInf) continue;
      CHECK(std::abs(a - b) <= 1e-10 * std::max(1.0, std::abs(a)));
    }

    // random effects: Eq-(4) form vs the matched truncated mixture built at
    // the marginal scale sqrt(tau^2 + sigma^2)
    const double tau = 0.4 * rng.uniform();
    const auto pir = rho_to_pi(rho, t0, tau, sigma, kGrid);
    const auto c = cutoffs_in_effect_space(kGrid, sigma);
    for (int k = 0; k < 10; ++k) {
      const double x = t0 + 3.0 * sample_normal(rng);
      const double a = loglik_pubbias({x, sigma}, t0, tau, rho, kGrid);
      const double s = std::sqrt(tau * tau + sigma * sigma);
      double b = kNegInf;
      for (int j = 0; j < 3; ++j) {
        if (pir.pi[j] == 0.0) continue;
        const double lt = log_trunc_normal_pdf(x, t0, s, c[j + 1], c[j]);
        b = log_sum_exp(b, std::log(pir.pi[j]) + lt);
      }
      if (a == kNegInf && b == kNegInf) continue;
      CHECK(std::abs(a - b) <= 1e-10 * std::max(1.0, std::abs(a)));
    }
  }
}

TEST_CASE("no single pi matches two different sigmas") {
  // with theta0 = 0 and tau = 0 the p-value is uniform and the interval
  // masses equal the alpha gaps for every sigma, so the witness needs a
  // nonzero mean
  const SelectionProbs rho({1.0, 0.7, 0.1});
  const double t0 = 0.3, tau = 0.0;
  const double sig_a = 0.15, sig_b = 0.45;
  const auto pi_a = rho_to_pi(rho, t0, tau, sig_a, kGrid);
  const auto pi_b = rho_to_pi(rho, t0, tau, sig_b, kGrid);

  // the fixed-sigma matches themselves disagree
  double linf = 0.0;
  for (int j = 0; j < 3; ++j)
    linf = std::max(linf, std::abs(pi_a.pi[j] - pi_b.pi[j]));
  CHECK(linf > 1e-3);

  // and a pi matched to study a misses study b by a visible margin
  double max_disc = 0.0;
  for (double x = -1.5; x <= 1.5; x += 0.05) {
    const double pb = std::exp(loglik_pubbias({x, sig_b}, t0, tau, rho, kGrid));
    const double ph = std::exp(loglik_phack_fixed({x, sig_b}, t0, pi_a, kGrid));
    max_disc = std::max(max_disc, std::abs(pb - ph));
  }
  CHECK(max_disc > 1e-3);
}
