#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <utility>
#include <string>
#include <vector>

#include "metasel/mcmc.hpp"
#include "metasel/rng.hpp"
#include "metasel/types.hpp"

namespace metasel {

enum class Scenario { none, pubbias, phack };

Scenario scenario_from_string(const std::string& s);
std::string to_string(Scenario s);

// Per-study standard error generator. The default "infosize" rule reads the
// uniform-{20..80} set as information sizes, sigma = 1/sqrt(s); "literal"
// takes them as variances; "fixed" returns a constant.
struct SeRule {
  enum class Kind { infosize, literal, fixed } kind = Kind::infosize;
  double fixed_value = 0.2;

  static SeRule parse(const std::string& text);
};

double draw_se(Rng& rng, const SeRule& rule);

struct ScenarioConfig {
  Scenario scenario = Scenario::none;
  std::size_t n = 30;
  double theta0 = 0.0;
  double tau = 0.1;
  SelectionProbs rho;   // pubbias scenario
  HackingProbs pi;      // phack scenario
  CutoffGrid cutoffs = CutoffGrid::standard();
  SeRule se_rule;
  std::uint64_t seed = 0;
};

struct Replication {
  Dataset dataset;
  double theta0 = 0.0;
  double tau = 0.0;
  long rejection_count = 0;  // pubbias only
};

// Rejection sampling with (theta, x) resampled together; returns the accepted
// effect and the attempt count.
std::pair<Study, long> sample_pubbias_study(Rng& rng, double theta0,
                                            double tau, double sigma,
                                            const SelectionProbs& rho,
                                            const CutoffGrid& cutoffs);

// theta kept, interval drawn from pi, x truncated into it.
Study sample_phack_study(Rng& rng, double theta0, double tau, double sigma,
                         const HackingProbs& pi, const CutoffGrid& cutoffs);

Replication simulate_replication(const ScenarioConfig& config,
                                 std::uint64_t stream);

// Generic two-variable selection-set demo: p(theta) = N(0,1),
// x | theta ~ N(theta, 1), acceptance probability = weight(u(x)).
enum class SelectionSet { both, x_only, none };

struct SelectionDraws {
  std::vector<double> x;
  std::vector<double> theta;
};

SelectionDraws selection_set_demo(Rng& rng, SelectionSet H,
                                  const std::function<double(double)>& weight,
                                  std::size_t n_draws);

struct GridCell {
  ScenarioConfig scenario;
  ModelSpec fit_spec;
  double mean_theta0 = 0.0;
  double sd_theta0 = 0.0;
  double mean_tau = 0.0;
  double sd_tau = 0.0;
  int failures = 0;
};

// Simulate/fit every (config, fit-spec) cell, `replications` times each, and
// summarize posterior means in a scenario-by-model table.
std::vector<GridCell> run_scenario_grid(
    const std::vector<ScenarioConfig>& grid, int replications,
    const std::vector<ModelSpec>& fit_specs, const PriorConfig& prior,
    const SamplerConfig& sampler);

void write_grid_csv(std::ostream& os, const std::vector<GridCell>& cells);
void write_dataset_csv(std::ostream& os, const Dataset& dataset);

}  // namespace metasel
