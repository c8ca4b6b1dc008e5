#include "metasel/loo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "metasel/special.hpp"
#include "metasel/transforms.hpp"

namespace metasel {

std::vector<std::vector<double>> pointwise_loglik(const PosteriorDraws& draws,
                                                  const Dataset& dataset,
                                                  const ModelSpec& spec,
                                                  int quad_order) {
  std::vector<std::vector<double>> out;
  out.reserve(draws.total_draws());
  for (const auto& chain : draws.draws)
    for (const auto& rowdraw : chain) {
      // Reconstruct a ParamState from the flattened constrained layout.
      ParamState st;
      std::size_t i = 0;
      st.theta0 = rowdraw[i++];
      if (spec.effects == Effects::random) st.tau = rowdraw[i++];
      const std::size_t J = spec.cutoffs.intervals();
      if (spec.family == Family::pubbias) {
        std::vector<double> rho{1.0};
        for (std::size_t j = 1; j < J; ++j) rho.push_back(rowdraw[i++]);
        st.rho.rho = std::move(rho);
      } else if (spec.family == Family::phack) {
        std::vector<double> pi;
        for (std::size_t j = 0; j < J; ++j) pi.push_back(rowdraw[i++]);
        st.pi.pi = std::move(pi);
      }
      std::vector<double> row(dataset.size());
      for (std::size_t s = 0; s < dataset.size(); ++s)
        row[s] = pointwise_loglik_one(dataset[s], st, spec, quad_order);
      out.push_back(std::move(row));
    }
  return out;
}

GpdFit fit_gpd_pwm(std::vector<double> y) {
  if (y.size() < 2) throw std::domain_error("fit_gpd_pwm: need >= 2 points");
  std::sort(y.begin(), y.end());
  const std::size_t n = y.size();
  double b0 = 0.0, b1 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    b0 += y[i];
    b1 += y[i] * static_cast<double>(n - 1 - i) / (n - 1);
  }
  b0 /= n;
  b1 /= n;
  const double denom = b0 - 2.0 * b1;
  GpdFit fit;
  if (std::abs(denom) < 1e-300) {
    fit.k = 0.0;
    fit.sigma = b0;
    return fit;
  }
  // Hosking-Wallis estimators; their shape has the opposite sign convention.
  const double k_hw = b0 / denom - 2.0;
  fit.k = -k_hw;
  fit.sigma = 2.0 * b0 * b1 / denom;
  if (!(fit.sigma > 0.0)) fit.sigma = b0;
  return fit;
}

double gpd_quantile(double p, const GpdFit& fit) {
  if (!(p >= 0.0 && p < 1.0)) throw std::domain_error("gpd_quantile: p");
  if (std::abs(fit.k) < 1e-12) return -fit.sigma * std::log1p(-p);
  return fit.sigma / fit.k * (std::pow(1.0 - p, -fit.k) - 1.0);
}

LooResult importance_loo(const std::vector<std::vector<double>>& pointwise) {
  const std::size_t s = pointwise.size();
  if (s < 2) throw std::domain_error("importance_loo: need >= 2 draws");
  const std::size_t n = pointwise[0].size();
  LooResult res;
  res.pointwise_elpd.resize(n);
  res.pareto_k.assign(n, 0.0);
  res.flags.assign(n, "");

  const std::size_t tail = static_cast<std::size_t>(0.2 * s);

  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> ll(s), lw(s);
    for (std::size_t d = 0; d < s; ++d) {
      ll[d] = pointwise[d][i];
      lw[d] = -ll[d];
    }
    const double lw_max = *std::max_element(lw.begin(), lw.end());
    for (double& w : lw) w -= lw_max;

    bool degenerate = true;
    for (double w : lw)
      if (w != lw[0]) {
        degenerate = false;
        break;
      }
    if (degenerate) {
      res.pareto_k[i] = std::numeric_limits<double>::quiet_NaN();
      res.flags[i] = "degenerate";
    } else if (tail < 5) {
      res.pareto_k[i] = std::numeric_limits<double>::quiet_NaN();
      res.flags[i] = "unsmoothed";
    } else {
      // Pareto-smooth the top 20% of the weights.
      std::vector<std::size_t> order(s);
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(),
                [&](std::size_t a, std::size_t b) { return lw[a] < lw[b]; });
      const double cut = std::exp(lw[order[s - tail - 1]]);
      std::vector<double> exceed(tail);
      for (std::size_t t = 0; t < tail; ++t)
        exceed[t] = std::exp(lw[order[s - tail + t]]) - cut;
      const GpdFit fit = fit_gpd_pwm(exceed);
      res.pareto_k[i] = fit.k;
      const double w_cap = 1.0;  // max raw weight after max-shift
      for (std::size_t t = 0; t < tail; ++t) {
        const double p = (t + 0.5) / tail;
        const double w_smooth =
            std::min(cut + gpd_quantile(p, fit), w_cap);
        lw[order[s - tail + t]] = std::log(w_smooth);
      }
      if (fit.k > 0.7) res.flags[i] = "high_k";
    }

    std::vector<double> num(s);
    for (std::size_t d = 0; d < s; ++d) num[d] = lw[d] + ll[d];
    res.pointwise_elpd[i] = log_sum_exp(num) - log_sum_exp(lw);
  }

  res.elpd_loo = std::accumulate(res.pointwise_elpd.begin(),
                                 res.pointwise_elpd.end(), 0.0);
  res.looic = -2.0 * res.elpd_loo;
  double mean_e = res.elpd_loo / n;
  double var_e = 0.0;
  for (double e : res.pointwise_elpd) var_e += (e - mean_e) * (e - mean_e);
  var_e /= (n > 1 ? n - 1 : 1);
  res.se_looic = 2.0 * std::sqrt(static_cast<double>(n) * var_e);
  return res;
}

LooResult exact_loo(const Dataset& dataset, const ModelSpec& spec,
                    const PriorConfig& prior, const SamplerConfig& config) {
  const std::size_t n = dataset.size();
  LooResult res;
  res.pointwise_elpd.resize(n);
  res.pareto_k.assign(n, std::numeric_limits<double>::quiet_NaN());
  res.flags.assign(n, "exact");
  for (std::size_t i = 0; i < n; ++i) {
    Dataset rest;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) rest.push_back(dataset[j]);
    SamplerConfig cfg = config;
    cfg.compute_pointwise = false;
    const PosteriorDraws fit = run_sampler(rest, spec, prior, cfg);
    const Dataset held{dataset[i]};
    const auto ll = pointwise_loglik(fit, held, spec, config.quad_order);
    std::vector<double> col(ll.size());
    for (std::size_t d = 0; d < ll.size(); ++d) col[d] = ll[d][0];
    res.pointwise_elpd[i] =
        log_sum_exp(col) - std::log(static_cast<double>(col.size()));
  }
  res.elpd_loo = std::accumulate(res.pointwise_elpd.begin(),
                                 res.pointwise_elpd.end(), 0.0);
  res.looic = -2.0 * res.elpd_loo;
  double mean_e = res.elpd_loo / n;
  double var_e = 0.0;
  for (double e : res.pointwise_elpd) var_e += (e - mean_e) * (e - mean_e);
  var_e /= (n > 1 ? n - 1 : 1);
  res.se_looic = 2.0 * std::sqrt(static_cast<double>(n) * var_e);
  return res;
}

void write_loo_json(std::ostream& os, const std::string& model,
                    const LooResult& loo) {
  os.precision(10);
  os << "{\"model\": \"" << model << "\", \"elpd_loo\": " << loo.elpd_loo
     << ", \"looic\": " << loo.looic << ", \"se\": " << loo.se_looic
     << ", \"pareto_k\": [";
  for (std::size_t i = 0; i < loo.pareto_k.size(); ++i) {
    if (std::isnan(loo.pareto_k[i]))
      os << "null";
    else
      os << loo.pareto_k[i];
    if (i + 1 < loo.pareto_k.size()) os << ", ";
  }
  os << "], \"flags\": [";
  for (std::size_t i = 0; i < loo.flags.size(); ++i) {
    os << '"' << loo.flags[i] << '"';
    if (i + 1 < loo.flags.size()) os << ", ";
  }
  os << "]}\n";
}

}  // namespace metasel
