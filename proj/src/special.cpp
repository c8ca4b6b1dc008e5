#include "metasel/special.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace metasel {

namespace {

constexpr double kSqrt1_2 = 0.70710678118654752440;

// Acklam's rational approximation for the probit, ~1e-9 before refinement.
double probit_approx(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
            c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - plow) {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
             c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
         q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double normal_cdf(double z) {
  if (!std::isfinite(z)) {
    if (std::isnan(z)) throw std::domain_error("normal_cdf: non-finite input");
    return z > 0 ? 1.0 : 0.0;
  }
  return 0.5 * std::erfc(-z * kSqrt1_2);
}

double log_normal_cdf(double z) {
  if (std::isnan(z)) throw std::domain_error("log_normal_cdf: NaN input");
  if (z == kPosInf) return 0.0;
  if (z == kNegInf) return kNegInf;
  if (z > -36.0) {
    const double p = 0.5 * std::erfc(-z * kSqrt1_2);
    if (p > 0.0) {
      // log1p path keeps accuracy for z large positive.
      if (z > 6.0) return std::log1p(-0.5 * std::erfc(z * kSqrt1_2));
      return std::log(p);
    }
  }
  // Asymptotic series Phi(z) ~ phi(z)/(-z) (1 - 1/z^2 + 3/z^4 - 15/z^6 + ...).
  const double zsq = z * z;
  double term = 1.0, sum = 1.0;
  for (int k = 1; k <= 6; ++k) {
    term *= -(2.0 * k - 1.0) / zsq;
    sum += term;
  }
  return -0.5 * zsq - kLogSqrt2Pi - std::log(-z) + std::log(sum);
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::domain_error("normal_quantile: p must be in (0,1)");
  double x = probit_approx(p);
  // One Halley step against the high-accuracy CDF.
  const double e = normal_cdf(x) - p;
  const double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
  x -= u / (1.0 + 0.5 * x * u);
  return x;
}

double log_normal_pdf(double z) { return -0.5 * z * z - kLogSqrt2Pi; }

double log_diff_exp(double la, double lb) {
  if (lb == kNegInf) return la;
  if (la < lb) throw std::domain_error("log_diff_exp: la < lb");
  if (la == lb) return kNegInf;
  return la + std::log(-std::expm1(lb - la));
}

double log_sum_exp(std::span<const double> values) {
  if (values.empty()) throw std::domain_error("log_sum_exp: empty input");
  double m = kNegInf;
  for (double v : values) m = std::max(m, v);
  if (m == kNegInf) return kNegInf;
  double s = 0.0;
  for (double v : values) s += std::exp(v - m);
  return m + std::log(s);
}

double log_sum_exp(double a, double b) {
  const double vals[] = {a, b};
  return log_sum_exp(std::span<const double>(vals, 2));
}

double log_normal_interval_mass(double mean, double sd, double lo, double hi) {
  if (!(sd > 0.0)) throw std::domain_error("interval mass: sd must be > 0");
  if (!(lo < hi)) throw std::domain_error("interval mass: lo >= hi");
  double a = (lo == kNegInf) ? kNegInf : (lo - mean) / sd;
  double b = (hi == kPosInf) ? kPosInf : (hi - mean) / sd;
  if (a == kNegInf && b == kPosInf) return 0.0;
  // Work in the lower tail, where log_normal_cdf keeps full precision.
  if (b == kPosInf || (a != kNegInf && a + b > 0.0)) {
    const double na = -b, nb = -a;
    a = na;
    b = nb;
  }
  return log_diff_exp(log_normal_cdf(b), log_normal_cdf(a));
}

double log_trunc_normal_pdf(double x, double mean, double sd, double lo,
                            double hi) {
  if (!(sd > 0.0)) throw std::domain_error("trunc normal: sd must be > 0");
  if (!(lo < hi)) throw std::domain_error("trunc normal: lo >= hi");
  if (x < lo || x >= hi) return kNegInf;
  const double log_mass = log_normal_interval_mass(mean, sd, lo, hi);
  if (log_mass == kNegInf)
    throw std::runtime_error("trunc normal: truncation mass underflows to 0");
  const double z = (x - mean) / sd;
  return log_normal_pdf(z) - std::log(sd) - log_mass;
}

double trunc_normal_cdf(double x, double mean, double sd, double lo,
                        double hi) {
  if (!(sd > 0.0)) throw std::domain_error("trunc normal: sd must be > 0");
  if (!(lo < hi)) throw std::domain_error("trunc normal: lo >= hi");
  if (x <= lo) return 0.0;
  if (x >= hi) return 1.0;
  const double log_mass = log_normal_interval_mass(mean, sd, lo, hi);
  const double log_part = log_normal_interval_mass(mean, sd, lo, x);
  return std::exp(log_part - log_mass);
}

GaussHermite::GaussHermite(int order) {
  if (order < 1) throw std::domain_error("gauss_hermite: order must be >= 1");
  const int n = order;
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  const double pim4 = 0.7511255444649425;  // pi^{-1/4}
  const int m = (n + 1) / 2;
  double z = 0.0;
  for (int i = 0; i < m; ++i) {
    if (i == 0) {
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
    } else if (i == 1) {
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * nodes[n - 1];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * nodes[n - 2];
    } else {
      z = 2.0 * z - nodes[n - i + 1];
    }
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = pim4, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1.0)) * p2 -
             std::sqrt(static_cast<double>(j) / (j + 1.0)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    nodes[n - 1 - i] = z;
    nodes[i] = -z;
    weights[n - 1 - i] = 2.0 / (pp * pp);
    weights[i] = weights[n - 1 - i];
  }
}

const GaussHermite& gauss_hermite(int order) {
  static std::mutex mu;
  static std::map<int, GaussHermite> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, GaussHermite(order)).first;
  return it->second;
}

}  // namespace metasel
