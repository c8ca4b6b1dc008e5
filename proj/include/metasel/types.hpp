#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace metasel {

// One meta-analytic observation: a standardized mean difference and its
// standard error.
struct Study {
  double effect = 0.0;
  double se = 1.0;

  Study() = default;
  Study(double effect_, double se_) : effect(effect_), se(se_) {
    validate();
  }
  void validate() const;
};

using Dataset = std::vector<Study>;

// One-sided p-value thresholds 0 = a0 < a1 < ... < aJ = 1.
class CutoffGrid {
 public:
  explicit CutoffGrid(std::vector<double> alphas);
  static CutoffGrid standard() { return CutoffGrid({0.025, 0.05, 1.0}); }

  const std::vector<double>& alphas() const { return alphas_; }
  std::size_t intervals() const { return alphas_.size(); }

  // Index j in 1..J with u in (a_{j-1}, a_j]; u = 0 goes to interval 1.
  std::size_t interval_of(double u) const;

 private:
  std::vector<double> alphas_;
};

// Step selection probabilities, rho_1 = 1 and decreasing.
struct SelectionProbs {
  std::vector<double> rho;

  SelectionProbs() = default;
  explicit SelectionProbs(std::vector<double> r) : rho(std::move(r)) {
    validate();
  }
  void validate() const;
  bool is_valid() const;
};

// Hacking propensities, a probability simplex over the cutoff intervals.
struct HackingProbs {
  std::vector<double> pi;

  HackingProbs() = default;
  explicit HackingProbs(std::vector<double> p) : pi(std::move(p)) {
    validate();
  }
  void validate() const;
};

enum class Family { uncorrected, pubbias, phack };
enum class Effects { fixed, random };

std::string to_string(Family f);
std::string to_string(Effects e);
Family family_from_string(const std::string& s);
Effects effects_from_string(const std::string& s);

struct ModelSpec {
  Family family = Family::uncorrected;
  Effects effects = Effects::random;
  CutoffGrid cutoffs = CutoffGrid::standard();
};

// Parameters in constrained space. For fixed effects theta0 plays theta and
// tau is 0. Latent per-study effects only appear for random-effects p-hacking.
struct ParamState {
  double theta0 = 0.0;
  double tau = 0.0;
  SelectionProbs rho;            // pubbias only
  HackingProbs pi;               // phack only
  std::vector<double> latent_thetas;
};

}  // namespace metasel
