#include "metasel/types.hpp"

#include <cmath>

namespace metasel {

void Study::validate() const {
  if (!std::isfinite(effect))
    throw std::domain_error("Study: effect must be finite");
  if (!(se > 0.0) || !std::isfinite(se))
    throw std::domain_error("Study: se must be positive and finite");
}

CutoffGrid::CutoffGrid(std::vector<double> alphas) : alphas_(std::move(alphas)) {
  if (alphas_.size() < 2)
    throw std::domain_error("CutoffGrid: need at least 2 intervals");
  if (!(alphas_.front() > 0.0))
    throw std::domain_error("CutoffGrid: alpha_1 must be > 0");
  for (std::size_t i = 1; i < alphas_.size(); ++i)
    if (!(alphas_[i] > alphas_[i - 1]))
      throw std::domain_error("CutoffGrid: alphas must strictly increase");
  if (alphas_.back() != 1.0)
    throw std::domain_error("CutoffGrid: last alpha must be exactly 1");
}

std::size_t CutoffGrid::interval_of(double u) const {
  if (!(u >= 0.0 && u <= 1.0))
    throw std::domain_error("CutoffGrid: u outside [0,1]");
  for (std::size_t j = 0; j < alphas_.size(); ++j)
    if (u <= alphas_[j]) return j + 1;
  return alphas_.size();
}

void SelectionProbs::validate() const {
  // densities only need normalization and nonnegativity; the decreasing
  // constraint is a modeling restriction checked by is_valid()
  if (rho.empty() || rho.front() != 1.0)
    throw std::domain_error("SelectionProbs: need rho_1 = 1");
  for (std::size_t i = 1; i < rho.size(); ++i)
    if (!(rho[i] >= 0.0))
      throw std::domain_error("SelectionProbs: need rho_j >= 0");
}

bool SelectionProbs::is_valid() const {
  if (rho.empty() || rho.front() != 1.0) return false;
  for (std::size_t i = 1; i < rho.size(); ++i)
    if (!(rho[i] >= 0.0) || rho[i] > rho[i - 1]) return false;
  return true;
}

void HackingProbs::validate() const {
  if (pi.empty()) throw std::domain_error("HackingProbs: empty simplex");
  double sum = 0.0;
  for (double p : pi) {
    if (!(p >= 0.0)) throw std::domain_error("HackingProbs: negative entry");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw std::domain_error("HackingProbs: entries must sum to 1");
}

std::string to_string(Family f) {
  switch (f) {
    case Family::uncorrected: return "uncorrected";
    case Family::pubbias: return "pubbias";
    case Family::phack: return "phack";
  }
  return "?";
}

std::string to_string(Effects e) {
  return e == Effects::fixed ? "fixed" : "random";
}

Family family_from_string(const std::string& s) {
  if (s == "uncorrected") return Family::uncorrected;
  if (s == "pubbias") return Family::pubbias;
  if (s == "phack") return Family::phack;
  throw std::domain_error("unknown model family: " + s);
}

Effects effects_from_string(const std::string& s) {
  if (s == "fixed") return Effects::fixed;
  if (s == "random") return Effects::random;
  throw std::domain_error("unknown effects type: " + s);
}

}  // namespace metasel
