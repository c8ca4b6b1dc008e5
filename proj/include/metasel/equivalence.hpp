#pragma once

#include "metasel/types.hpp"

namespace metasel {

// Fixed-sigma correspondence between the selection weights rho and the
// hacking propensities pi: pi_j = rho_j m_j / sum_k rho_k m_k, and its
// inverse. Valid study-by-study; the maps depend on (theta0, tau, sigma).
HackingProbs rho_to_pi(const SelectionProbs& rho, double theta0, double tau,
                       double sigma, const CutoffGrid& cutoffs);

struct PiToRhoResult {
  SelectionProbs rho;
  // The inverse can produce a non-decreasing rho for adversarial pi; it is
  // returned as-is with this flag rather than clamped.
  bool satisfies_decreasing = true;
};

PiToRhoResult pi_to_rho(const HackingProbs& pi, double theta0, double tau,
                        double sigma, const CutoffGrid& cutoffs);

}  // namespace metasel
