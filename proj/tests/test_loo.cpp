#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "metasel/loo.hpp"
#include "metasel/rng.hpp"
#include "metasel/samplers.hpp"
#include "metasel/simulate.hpp"
#include "metasel/special.hpp"

using namespace metasel;

TEST_CASE("generalized pareto fit recovers known parameters") {
  Rng rng(61, 0);
  for (double k : {0.2, 0.5}) {
    for (double sigma : {1.0, 3.0}) {
      std::vector<double> y(20000);
      for (auto& yi : y) {
        const double u = rng.uniform();
        yi = sigma / k * (std::pow(1.0 - u, -k) - 1.0);
      }
      const GpdFit fit = fit_gpd_pwm(y);
      CHECK(fit.k == doctest::Approx(k).epsilon(0.08));
      CHECK(fit.sigma == doctest::Approx(sigma).epsilon(0.08));
      // quantile function consistency: median of draws near gpd_quantile(0.5)
      auto sorted = y;
      std::sort(sorted.begin(), sorted.end());
      CHECK(gpd_quantile(0.5, fit) ==
            doctest::Approx(sorted[sorted.size() / 2]).epsilon(0.05));
    }
  }
}

TEST_CASE("constant pointwise matrix") {
  const double c = -1.234;
  std::vector<std::vector<double>> pw(400, std::vector<double>(6, c));
  const LooResult r = importance_loo(pw);
  CHECK(r.elpd_loo == doctest::Approx(6 * c).epsilon(1e-12));
  CHECK(r.looic == -2.0 * r.elpd_loo);
  CHECK(r.se_looic == doctest::Approx(0.0).epsilon(1e-12));
  REQUIRE(r.flags.size() == 6);
  for (const auto& f : r.flags) CHECK(f.find("degenerate") != std::string::npos);
}

TEST_CASE("column shift moves elpd by the shift") {
  Rng rng(67, 0);
  std::vector<std::vector<double>> pw(500, std::vector<double>(3));
  for (auto& row : pw)
    for (auto& v : row) v = -1.0 + 0.3 * sample_normal(rng);
  const LooResult base = importance_loo(pw);
  auto shifted = pw;
  for (auto& row : shifted) row[1] += 2.5;
  const LooResult moved = importance_loo(shifted);
  CHECK(moved.pointwise_elpd[1] ==
        doctest::Approx(base.pointwise_elpd[1] + 2.5).epsilon(1e-10));
  CHECK(moved.pointwise_elpd[0] ==
        doctest::Approx(base.pointwise_elpd[0]).epsilon(1e-12));
  CHECK(moved.pareto_k[1] == doctest::Approx(base.pareto_k[1]).epsilon(1e-10));
}

TEST_CASE("loo penalizes relative to in-sample lpd") {
  ScenarioConfig sc;
  sc.scenario = Scenario::none;
  sc.n = 12;
  sc.theta0 = 0.3;
  sc.tau = 0.2;
  sc.seed = 5;
  const Replication rep = simulate_replication(sc, 0);
  ModelSpec unc;
  unc.family = Family::uncorrected;
  PriorConfig prior;
  SamplerConfig cfg;
  cfg.chains = 4;
  cfg.warmup = 600;
  cfg.draws = 800;
  cfg.seed = 9;
  const auto draws = run_sampler(rep.dataset, unc, prior, cfg);
  const LooResult r = importance_loo(draws.pointwise_loglik);
  // in-sample lpd_i = log mean_s exp(ll_si)
  double lpd = 0.0;
  const std::size_t S = draws.pointwise_loglik.size();
  for (std::size_t i = 0; i < rep.dataset.size(); ++i) {
    std::vector<double> col(S);
    for (std::size_t s = 0; s < S; ++s) col[s] = draws.pointwise_loglik[s][i];
    lpd += log_sum_exp(col) - std::log(double(S));
  }
  CHECK(r.elpd_loo <= lpd);
  CHECK(r.looic == -2.0 * r.elpd_loo);
  CHECK(r.se_looic >= 0.0);
}

TEST_CASE("importance loo close to exact refit loo at n = 5") {
  ScenarioConfig sc;
  sc.scenario = Scenario::none;
  sc.n = 5;
  sc.theta0 = 0.4;
  sc.tau = 0.15;
  sc.seed = 21;
  const Replication rep = simulate_replication(sc, 0);
  ModelSpec unc;
  unc.family = Family::uncorrected;
  PriorConfig prior;
  SamplerConfig cfg;
  cfg.chains = 4;
  cfg.warmup = 800;
  cfg.draws = 1500;
  cfg.seed = 31;
  const auto draws = run_sampler(rep.dataset, unc, prior, cfg);
  const LooResult is = importance_loo(draws.pointwise_loglik);
  const LooResult exact = exact_loo(rep.dataset, unc, prior, cfg);
  CHECK(std::abs(is.elpd_loo - exact.elpd_loo) <= 0.3);
}

TEST_CASE("pointwise matrix reconstruction matches stored rows") {
  const Dataset data{{0.4, 0.2}, {0.9, 0.3}};
  ModelSpec pb;
  pb.family = Family::pubbias;
  PriorConfig prior;
  SamplerConfig cfg;
  cfg.chains = 2;
  cfg.warmup = 200;
  cfg.draws = 150;
  cfg.seed = 12;
  const auto draws = run_sampler(data, pb, prior, cfg);
  const auto rebuilt = pointwise_loglik(draws, data, pb);
  REQUIRE(rebuilt.size() == draws.pointwise_loglik.size());
  for (std::size_t s = 0; s < rebuilt.size(); ++s)
    for (std::size_t i = 0; i < data.size(); ++i)
      CHECK(rebuilt[s][i] ==
            doctest::Approx(draws.pointwise_loglik[s][i]).epsilon(1e-12));
}

TEST_CASE("tiny draw counts fall back to unsmoothed weights") {
  Rng rng(71, 0);
  std::vector<std::vector<double>> pw(20, std::vector<double>(2));
  for (auto& row : pw)
    for (auto& v : row) v = -1.0 + 0.2 * sample_normal(rng);
  const LooResult r = importance_loo(pw);
  bool any_unsmoothed = false;
  for (const auto& f : r.flags)
    if (f.find("unsmoothed") != std::string::npos) any_unsmoothed = true;
  CHECK(any_unsmoothed);
}
