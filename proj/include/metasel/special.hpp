#pragma once

#include <limits>
#include <span>
#include <vector>

namespace metasel {

inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;
inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kPosInf = std::numeric_limits<double>::infinity();

// Standard normal CDF, absolute error below 1e-14.
double normal_cdf(double z);

// log Phi(z), stable in the far left tail (no underflow for any finite z).
double log_normal_cdf(double z);

// Inverse of normal_cdf on (0, 1).
double normal_quantile(double p);

double log_normal_pdf(double z);

// log(exp(la) - exp(lb)) for la >= lb.
double log_diff_exp(double la, double lb);

double log_sum_exp(std::span<const double> values);
double log_sum_exp(double a, double b);

// log P(lo <= Z*sd + mean < hi) for Z standard normal, tail-safe.
double log_normal_interval_mass(double mean, double sd, double lo, double hi);

// Log density of a normal(mean, sd) truncated to [lo, hi); -inf outside.
double log_trunc_normal_pdf(double x, double mean, double sd, double lo,
                            double hi);

// CDF of the truncated normal above, 0 below lo and 1 at/above hi.
double trunc_normal_cdf(double x, double mean, double sd, double lo, double hi);

// Gauss-Hermite rule for weight exp(-t^2). Nodes ascending.
struct GaussHermite {
  std::vector<double> nodes;
  std::vector<double> weights;
  explicit GaussHermite(int order);
};

// Cached lookup; safe for concurrent callers.
const GaussHermite& gauss_hermite(int order);

}  // namespace metasel
