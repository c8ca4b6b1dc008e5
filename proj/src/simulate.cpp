#include "metasel/simulate.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "metasel/densities.hpp"
#include "metasel/samplers.hpp"
#include "metasel/special.hpp"

namespace metasel {

namespace {
constexpr long kMaxAttempts = 10000000L;
}

Scenario scenario_from_string(const std::string& s) {
  if (s == "none") return Scenario::none;
  if (s == "pubbias") return Scenario::pubbias;
  if (s == "phack") return Scenario::phack;
  throw std::domain_error("unknown scenario: " + s);
}

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::none: return "none";
    case Scenario::pubbias: return "pubbias";
    case Scenario::phack: return "phack";
  }
  return "?";
}

SeRule SeRule::parse(const std::string& text) {
  SeRule rule;
  if (text == "infosize") {
    rule.kind = Kind::infosize;
  } else if (text == "literal") {
    rule.kind = Kind::literal;
  } else if (text.rfind("fixed:", 0) == 0) {
    rule.kind = Kind::fixed;
    rule.fixed_value = std::stod(text.substr(6));
    if (!(rule.fixed_value > 0.0))
      throw std::domain_error("se-rule fixed value must be > 0");
  } else {
    throw std::domain_error("unknown se-rule: " + text);
  }
  return rule;
}

double draw_se(Rng& rng, const SeRule& rule) {
  switch (rule.kind) {
    case SeRule::Kind::fixed:
      return rule.fixed_value;
    case SeRule::Kind::infosize:
    case SeRule::Kind::literal: {
      const std::uint64_t s = 20 + rng.next_u64() % 61;  // uniform {20,...,80}
      const double sv = static_cast<double>(s);
      return rule.kind == SeRule::Kind::infosize ? 1.0 / std::sqrt(sv)
                                                 : std::sqrt(sv);
    }
  }
  return rule.fixed_value;
}

std::pair<Study, long> sample_pubbias_study(Rng& rng, double theta0,
                                            double tau, double sigma,
                                            const SelectionProbs& rho,
                                            const CutoffGrid& cutoffs) {
  rho.validate();
  for (long attempt = 1; attempt <= kMaxAttempts; ++attempt) {
    const double theta = theta0 + tau * sample_normal(rng);
    const double x = theta + sigma * sample_normal(rng);
    const Study study(x, sigma);
    const double u = p_value_one_sided(study);
    const double w = rho.rho[cutoffs.interval_of(u) - 1];
    if (rng.uniform() < w) return {study, attempt};
  }
  throw std::runtime_error(
      "sample_pubbias_study: acceptance probability pathologically small");
}

Study sample_phack_study(Rng& rng, double theta0, double tau, double sigma,
                         const HackingProbs& pi, const CutoffGrid& cutoffs) {
  pi.validate();
  const double theta = theta0 + tau * sample_normal(rng);
  // Categorical draw over intervals.
  const double u = rng.uniform();
  double acc = 0.0;
  std::size_t j = pi.pi.size();
  for (std::size_t k = 0; k < pi.pi.size(); ++k) {
    acc += pi.pi[k];
    if (u <= acc) {
      j = k + 1;
      break;
    }
  }
  const auto c = cutoffs_in_effect_space(cutoffs, sigma);
  const double x = sample_truncated_normal(rng, theta, sigma, c[j], c[j - 1]);
  return Study(x, sigma);
}

Replication simulate_replication(const ScenarioConfig& config,
                                 std::uint64_t stream) {
  Rng rng(config.seed, stream);
  Replication rep;
  rep.theta0 = config.theta0;
  rep.tau = config.tau;
  rep.dataset.reserve(config.n);
  for (std::size_t i = 0; i < config.n; ++i) {
    const double sigma = draw_se(rng, config.se_rule);
    switch (config.scenario) {
      case Scenario::none: {
        const double theta = config.theta0 + config.tau * sample_normal(rng);
        rep.dataset.emplace_back(theta + sigma * sample_normal(rng), sigma);
        break;
      }
      case Scenario::pubbias: {
        auto [study, attempts] = sample_pubbias_study(
            rng, config.theta0, config.tau, sigma, config.rho, config.cutoffs);
        rep.dataset.push_back(study);
        rep.rejection_count += attempts - 1;
        break;
      }
      case Scenario::phack:
        rep.dataset.push_back(sample_phack_study(rng, config.theta0,
                                                 config.tau, sigma, config.pi,
                                                 config.cutoffs));
        break;
    }
  }
  return rep;
}

SelectionDraws selection_set_demo(Rng& rng, SelectionSet H,
                                  const std::function<double(double)>& weight,
                                  std::size_t n_draws) {
  SelectionDraws out;
  out.x.reserve(n_draws);
  out.theta.reserve(n_draws);
  for (std::size_t d = 0; d < n_draws; ++d) {
    double theta = sample_normal(rng);
    double x = theta + sample_normal(rng);
    long attempts = 1;
    for (;;) {
      const double u = normal_cdf(-x);
      const double w = weight(u);
      if (!(w >= 0.0 && w <= 1.0))
        throw std::domain_error("selection_set_demo: weight outside [0,1]");
      if (rng.uniform() < w) break;
      if (++attempts > kMaxAttempts)
        throw std::runtime_error("selection_set_demo: acceptance too small");
      switch (H) {
        case SelectionSet::both:
          theta = sample_normal(rng);
          x = theta + sample_normal(rng);
          break;
        case SelectionSet::x_only:
          x = theta + sample_normal(rng);
          break;
        case SelectionSet::none:
          break;  // nothing resampled, only the coin is re-flipped
      }
    }
    out.x.push_back(x);
    out.theta.push_back(theta);
  }
  return out;
}

std::vector<GridCell> run_scenario_grid(
    const std::vector<ScenarioConfig>& grid, int replications,
    const std::vector<ModelSpec>& fit_specs, const PriorConfig& prior,
    const SamplerConfig& sampler) {
  if (replications < 1)
    throw std::domain_error("run_scenario_grid: replications >= 1");
  std::vector<GridCell> cells;
  for (std::size_t ci = 0; ci < grid.size(); ++ci) {
    std::vector<std::vector<double>> theta_means(fit_specs.size());
    std::vector<std::vector<double>> tau_means(fit_specs.size());
    std::vector<int> failures(fit_specs.size(), 0);
    for (int r = 0; r < replications; ++r) {
      const std::uint64_t stream = 90000 + ci * 1000 + static_cast<std::uint64_t>(r);
      const Replication rep = simulate_replication(grid[ci], stream);
      for (std::size_t fi = 0; fi < fit_specs.size(); ++fi) {
        try {
          SamplerConfig cfg = sampler;
          cfg.seed = sampler.seed + stream * 31 + fi;
          cfg.compute_pointwise = false;
          const PosteriorDraws fit =
              run_sampler(rep.dataset, fit_specs[fi], prior, cfg);
          theta_means[fi].push_back(fit.mean("theta0"));
          if (fit_specs[fi].effects == Effects::random)
            tau_means[fi].push_back(fit.mean("tau"));
        } catch (const std::exception&) {
          ++failures[fi];
        }
      }
    }
    for (std::size_t fi = 0; fi < fit_specs.size(); ++fi) {
      GridCell cell;
      cell.scenario = grid[ci];
      cell.fit_spec = fit_specs[fi];
      cell.failures = failures[fi];
      auto summarize = [](const std::vector<double>& v, double& mean,
                          double& sd) {
        if (v.empty()) {
          mean = sd = std::numeric_limits<double>::quiet_NaN();
          return;
        }
        mean = 0.0;
        for (double x : v) mean += x;
        mean /= v.size();
        sd = 0.0;
        for (double x : v) sd += (x - mean) * (x - mean);
        sd = v.size() > 1 ? std::sqrt(sd / (v.size() - 1)) : 0.0;
      };
      summarize(theta_means[fi], cell.mean_theta0, cell.sd_theta0);
      summarize(tau_means[fi], cell.mean_tau, cell.sd_tau);
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

void write_grid_csv(std::ostream& os, const std::vector<GridCell>& cells) {
  os << "scenario,tau,theta0,n,model,mean_theta0,sd_theta0,mean_tau,sd_tau,"
        "failures\n";
  os.precision(6);
  for (const auto& c : cells) {
    os << to_string(c.scenario.scenario) << ',' << c.scenario.tau << ','
       << c.scenario.theta0 << ',' << c.scenario.n << ','
       << to_string(c.fit_spec.family) << ',' << c.mean_theta0 << ','
       << c.sd_theta0 << ',' << c.mean_tau << ',' << c.sd_tau << ','
       << c.failures << '\n';
  }
}

void write_dataset_csv(std::ostream& os, const Dataset& dataset) {
  os << "effect,se\n";
  os.precision(17);
  for (const auto& s : dataset) os << s.effect << ',' << s.se << '\n';
}

}  // namespace metasel
