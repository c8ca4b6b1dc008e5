#include "metasel/mcmc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "metasel/densities.hpp"
#include "metasel/rng.hpp"
#include "metasel/samplers.hpp"
#include "metasel/special.hpp"
#include "metasel/transforms.hpp"

namespace metasel {

void SamplerConfig::validate() const {
  if (chains < 1 || warmup < 1 || draws < 1)
    throw std::domain_error("SamplerConfig: chains, warmup, draws must be >= 1");
  if (!(target_accept > 0.0 && target_accept < 1.0))
    throw std::domain_error("SamplerConfig: target_accept in (0,1)");
}

std::size_t PosteriorDraws::total_draws() const {
  std::size_t n = 0;
  for (const auto& c : draws) n += c.size();
  return n;
}

std::vector<double> PosteriorDraws::column(std::size_t param) const {
  std::vector<double> out;
  out.reserve(total_draws());
  for (const auto& chain : draws)
    for (const auto& it : chain) out.push_back(it[param]);
  return out;
}

std::vector<double> PosteriorDraws::column(const std::string& name) const {
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end())
    throw std::domain_error("PosteriorDraws: unknown parameter " + name);
  return column(static_cast<std::size_t>(it - names.begin()));
}

double PosteriorDraws::mean(const std::string& name) const {
  const auto col = column(name);
  return std::accumulate(col.begin(), col.end(), 0.0) / col.size();
}

double PosteriorDraws::sd(const std::string& name) const {
  const auto col = column(name);
  const double m = std::accumulate(col.begin(), col.end(), 0.0) / col.size();
  double s = 0.0;
  for (double v : col) s += (v - m) * (v - m);
  return std::sqrt(s / (col.size() - 1));
}

double PosteriorDraws::quantile(const std::string& name, double p) const {
  auto col = column(name);
  std::sort(col.begin(), col.end());
  const double idx = p * (col.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(idx);
  const std::size_t hi = std::min(lo + 1, col.size() - 1);
  const double frac = idx - lo;
  return col[lo] * (1.0 - frac) + col[hi] * frac;
}

namespace {

bool has_latents(const ModelSpec& spec) {
  return spec.family == Family::phack && spec.effects == Effects::random;
}

double study_loglik_conditional(const Study& study, const ParamState& state,
                                const ModelSpec& spec, std::size_t i) {
  switch (spec.family) {
    case Family::uncorrected:
      return loglik_uncorrected(study, state.theta0, state.tau);
    case Family::pubbias:
      return loglik_pubbias(study, state.theta0, state.tau, state.rho,
                            spec.cutoffs);
    case Family::phack:
      if (spec.effects == Effects::random)
        return loglik_phack_fixed(study, state.latent_thetas[i], state.pi,
                                  spec.cutoffs);
      return loglik_phack_fixed(study, state.theta0, state.pi, spec.cutoffs);
  }
  return kNegInf;
}

}  // namespace

double pointwise_loglik_one(const Study& study, const ParamState& state,
                            const ModelSpec& spec, int quad_order) {
  switch (spec.family) {
    case Family::uncorrected:
      return loglik_uncorrected(study, state.theta0, state.tau);
    case Family::pubbias:
      return loglik_pubbias(study, state.theta0, state.tau, state.rho,
                            spec.cutoffs);
    case Family::phack:
      if (spec.effects == Effects::random)
        return loglik_phack_random_marginal(study, state.theta0, state.tau,
                                            state.pi, spec.cutoffs, quad_order);
      return loglik_phack_fixed(study, state.theta0, state.pi, spec.cutoffs);
  }
  return kNegInf;
}

double log_posterior(const std::vector<double>& v, const Dataset& dataset,
                     const ModelSpec& spec, const PriorConfig& prior) {
  for (double x : v)
    if (!std::isfinite(x)) return kNegInf;
  const ParamState state = from_unconstrained(v, spec, dataset.size());
  double lp = log_prior(state, prior, spec);
  if (lp == kNegInf) return kNegInf;
  lp += log_jacobian(v, spec, dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const double ll = study_loglik_conditional(dataset[i], state, spec, i);
    if (ll == kNegInf) return kNegInf;
    lp += ll;
  }
  return lp;
}

namespace {

// Lower Cholesky with diagonal jitter fallback.
std::vector<std::vector<double>> cholesky(std::vector<std::vector<double>> a) {
  const std::size_t n = a.size();
  for (int attempt = 0; attempt < 6; ++attempt) {
    std::vector<std::vector<double>> L(n, std::vector<double>(n, 0.0));
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        double s = a[i][j];
        for (std::size_t k = 0; k < j; ++k) s -= L[i][k] * L[j][k];
        if (i == j) {
          if (s <= 0.0) {
            ok = false;
            break;
          }
          L[i][i] = std::sqrt(s);
        } else {
          L[i][j] = s / L[j][j];
        }
      }
    }
    if (ok) return L;
    for (std::size_t i = 0; i < n; ++i) a[i][i] += 1e-8 * (1 << (2 * attempt));
  }
  // Fall back to the diagonal.
  std::vector<std::vector<double>> L(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    L[i][i] = std::sqrt(std::max(a[i][i], 1e-12));
  return L;
}

struct ChainResult {
  std::vector<std::vector<double>> constrained;  // [iter][param]
  std::vector<std::vector<double>> pointwise;    // [iter][study]
};

// Flatten a constrained state into the param_names layout.
std::vector<double> flatten_state(const ParamState& s, const ModelSpec& spec) {
  std::vector<double> out{s.theta0};
  if (spec.effects == Effects::random) out.push_back(s.tau);
  if (spec.family == Family::pubbias)
    out.insert(out.end(), s.rho.rho.begin() + 1, s.rho.rho.end());
  else if (spec.family == Family::phack)
    out.insert(out.end(), s.pi.pi.begin(), s.pi.pi.end());
  out.insert(out.end(), s.latent_thetas.begin(), s.latent_thetas.end());
  return out;
}

ChainResult run_chain(const Dataset& dataset, const ModelSpec& spec,
                      const PriorConfig& prior, const SamplerConfig& config,
                      int chain_index) {
  const std::size_t n = dataset.size();
  const std::size_t dim = unconstrained_dim(spec, n);
  const std::size_t n_latent = has_latents(spec) ? n : 0;
  const std::size_t base_dim = dim - n_latent;

  Rng rng(config.seed, 1000 + static_cast<std::uint64_t>(chain_index));

  // Initialize from the prior; retry on a zero-density start.
  std::vector<double> v;
  double lp = kNegInf;
  for (int tries = 0; tries < 100 && lp == kNegInf; ++tries) {
    ParamState init = sample_prior(rng, prior, spec, n);
    if (spec.effects == Effects::random)
      init.tau = std::max(init.tau, 1e-3);
    v = to_unconstrained(init, spec);
    lp = log_posterior(v, dataset, spec, prior);
  }
  if (lp == kNegInf)
    throw std::runtime_error("run_sampler: could not find a valid start");

  ParamState state = from_unconstrained(v, spec, n);

  double log_scale = std::log(2.38 / std::sqrt(static_cast<double>(base_dim)));
  std::vector<double> latent_log_scale(n_latent, std::log(0.5));
  double trans_log_scale = std::log(0.2);
  double scale_log_scale = std::log(0.3);
  std::vector<double> single_log_scale(base_dim, std::log(0.5));
  single_log_scale[0] = std::log(0.2);
  std::vector<std::vector<double>> chol_L;  // empty => identity

  std::vector<std::vector<double>> warmup_samples;
  warmup_samples.reserve(config.warmup);

  ChainResult result;
  result.constrained.reserve(config.draws);
  if (config.compute_pointwise) result.pointwise.reserve(config.draws);

  std::vector<double> prop(v);
  const int total_iters = config.warmup + config.draws;
  int window_accepts = 0, window_size = 0;
  constexpr int kWindow = 200;
  int adapt_t = 0;  // reset whenever the proposal covariance changes

  for (int iter = 0; iter < total_iters; ++iter) {
    const bool warm = iter < config.warmup;

    // Global block.
    {
      const double scale = std::exp(log_scale);
      std::vector<double> z(base_dim);
      for (auto& zi : z) zi = sample_normal(rng);
      prop = v;
      if (chol_L.empty()) {
        for (std::size_t i = 0; i < base_dim; ++i) prop[i] += scale * z[i];
      } else {
        for (std::size_t i = 0; i < base_dim; ++i) {
          double step = 0.0;
          for (std::size_t k = 0; k <= i; ++k) step += chol_L[i][k] * z[k];
          prop[i] += scale * step;
        }
      }
      const double lp_prop = log_posterior(prop, dataset, spec, prior);
      const bool accept =
          lp_prop > kNegInf && std::log(rng.uniform()) < lp_prop - lp;
      if (accept) {
        v = prop;
        lp = lp_prop;
        state = from_unconstrained(v, spec, n);
      }
      if (warm) {
        ++window_size;
        window_accepts += accept ? 1 : 0;
        const double gamma = std::pow(++adapt_t, -0.6);
        log_scale += gamma * ((accept ? 1.0 : 0.0) - config.target_accept);
        if (window_size == kWindow) {
          if (window_accepts == 0)
            throw std::runtime_error(
                "run_sampler: adaptation failure, zero acceptances in a "
                "warmup window (chain " +
                std::to_string(chain_index) +
                ", scale=" + std::to_string(std::exp(log_scale)) + ")");
          window_size = 0;
          window_accepts = 0;
        }
      }
    }

    // Without latents theta0 mixes only through the block move, which can
    // stall when the other coordinates are weakly identified; refresh it
    // with a dedicated univariate update. (With latents the Gibbs and
    // translation moves below cover theta0.)
    if (n_latent == 0) {
      for (std::size_t j = 0; j < base_dim; ++j) {
        std::vector<double> w = v;
        w[j] += std::exp(single_log_scale[j]) * sample_normal(rng);
        const double lp_w = log_posterior(w, dataset, spec, prior);
        const bool uaccept =
            lp_w > kNegInf && std::log(rng.uniform()) < lp_w - lp;
        if (uaccept) {
          v = w;
          lp = lp_w;
          state = from_unconstrained(v, spec, n);
        }
        if (warm) {
          const double gamma = std::pow(iter + 1.0, -0.6);
          single_log_scale[j] += gamma * ((uaccept ? 1.0 : 0.0) - 0.44);
        }
      }
    }

    // Latent block: single-site updates, conditionally independent given
    // the globals.
    for (std::size_t i = 0; i < n_latent; ++i) {
      const double cur = state.latent_thetas[i];
      const double cand = cur + std::exp(latent_log_scale[i]) * sample_normal(rng);
      const double ll_cur =
          loglik_phack_fixed(dataset[i], cur, state.pi, spec.cutoffs) +
          log_normal_pdf((cur - state.theta0) / state.tau);
      const double ll_cand =
          loglik_phack_fixed(dataset[i], cand, state.pi, spec.cutoffs) +
          log_normal_pdf((cand - state.theta0) / state.tau);
      const bool accept =
          ll_cand > kNegInf && std::log(rng.uniform()) < ll_cand - ll_cur;
      if (accept) {
        state.latent_thetas[i] = cand;
        v[base_dim + i] = cand;
        lp += ll_cand - ll_cur;
      }
      if (warm) {
        const double gamma = std::pow(iter + 1.0, -0.6);
        latent_log_scale[i] +=
            gamma * ((accept ? 1.0 : 0.0) - 0.44);  // scalar-update target
      }
    }

    // With latents present, theta0 | (latents, tau) is conjugate normal
    // (normal prior, latents iid N(theta0, tau^2)): exact Gibbs draw.
    if (n_latent > 0) {
      const double tau2 = state.tau * state.tau;
      const double prec =
          n_latent / tau2 + 1.0 / (prior.theta0_sd * prior.theta0_sd);
      double sum = 0.0;
      for (double t : state.latent_thetas) sum += t;
      const double draw =
          (sum / tau2) / prec + sample_normal(rng) / std::sqrt(prec);
      state.theta0 = draw;
      v[0] = draw;
      lp = log_posterior(v, dataset, spec, prior);

      // Joint translation of (theta0, latents): with small tau the latents
      // pin theta0 and neither block can move the common location, so shift
      // both together. The latent-prior terms are shift-invariant and the
      // ratio reduces to the data likelihood plus the theta0 prior.
      const double delta = std::exp(trans_log_scale) * sample_normal(rng);
      double dlp = log_normal_pdf((state.theta0 + delta) / prior.theta0_sd) -
                   log_normal_pdf(state.theta0 / prior.theta0_sd);
      for (std::size_t i = 0; i < n_latent; ++i) {
        const double cur = state.latent_thetas[i];
        dlp += loglik_phack_fixed(dataset[i], cur + delta, state.pi,
                                  spec.cutoffs) -
               loglik_phack_fixed(dataset[i], cur, state.pi, spec.cutoffs);
      }
      const bool taccept =
          dlp > kNegInf && std::log(rng.uniform()) < dlp;
      if (taccept) {
        state.theta0 += delta;
        v[0] = state.theta0;
        for (std::size_t i = 0; i < n_latent; ++i) {
          state.latent_thetas[i] += delta;
          v[base_dim + i] = state.latent_thetas[i];
        }
        lp = log_posterior(v, dataset, spec, prior);
      }
      if (warm) {
        const double gamma = std::pow(iter + 1.0, -0.6);
        trans_log_scale += gamma * ((taccept ? 1.0 : 0.0) - 0.44);
      }

      // Matching scale move for the other funnel axis: contract or expand
      // the latent deviations and tau together. The deterministic map in
      // (log tau, latents) coordinates has log-Jacobian n_latent * eps.
      const double eps = std::exp(scale_log_scale) * sample_normal(rng);
      const double c = std::exp(eps);
      std::vector<double> w = v;
      w[1] += eps;
      for (std::size_t i = 0; i < n_latent; ++i)
        w[base_dim + i] =
            state.theta0 + c * (state.latent_thetas[i] - state.theta0);
      const double lp_w = log_posterior(w, dataset, spec, prior);
      const bool saccept =
          lp_w > kNegInf &&
          std::log(rng.uniform()) < lp_w - lp + n_latent * eps;
      if (saccept) {
        v = w;
        lp = lp_w;
        state = from_unconstrained(v, spec, n);
      }
      if (warm) {
        const double gamma = std::pow(iter + 1.0, -0.6);
        scale_log_scale += gamma * ((saccept ? 1.0 : 0.0) - 0.44);
      }
    }

    if (warm) {
      warmup_samples.emplace_back(v.begin(), v.begin() + base_dim);
      // Re-estimate the proposal covariance from the trailing half of the
      // warmup history at the midpoint and again at three quarters.
      const bool refresh = (iter + 1 == config.warmup / 2 ||
                            iter + 1 == (3 * config.warmup) / 4);
      if (refresh && warmup_samples.size() >= 20 && base_dim > 1) {
        const std::size_t m0 = warmup_samples.size() / 2;
        const std::size_t m = warmup_samples.size() - m0;
        std::vector<double> mean(base_dim, 0.0);
        for (std::size_t s = m0; s < warmup_samples.size(); ++s)
          for (std::size_t i = 0; i < base_dim; ++i)
            mean[i] += warmup_samples[s][i];
        for (auto& mi : mean) mi /= m;
        std::vector<std::vector<double>> cov(base_dim,
                                             std::vector<double>(base_dim, 0.0));
        for (std::size_t s = m0; s < warmup_samples.size(); ++s) {
          const auto& w = warmup_samples[s];
          for (std::size_t i = 0; i < base_dim; ++i)
            for (std::size_t j = 0; j <= i; ++j)
              cov[i][j] += (w[i] - mean[i]) * (w[j] - mean[j]);
        }
        for (std::size_t i = 0; i < base_dim; ++i)
          for (std::size_t j = 0; j <= i; ++j) {
            cov[i][j] /= (m - 1);
            cov[j][i] = cov[i][j];
          }
        chol_L = cholesky(cov);
        log_scale = std::log(2.38 / std::sqrt(static_cast<double>(base_dim)));
        adapt_t = 0;
      }
    } else {
      result.constrained.push_back(flatten_state(state, spec));
      if (config.compute_pointwise) {
        std::vector<double> row(n);
        for (std::size_t i = 0; i < n; ++i)
          row[i] =
              pointwise_loglik_one(dataset[i], state, spec, config.quad_order);
        result.pointwise.push_back(std::move(row));
      }
    }
  }
  return result;
}

}  // namespace

std::vector<std::vector<std::vector<double>>> run_rwm(
    const std::function<double(const std::vector<double>&)>& log_density,
    std::size_t dim, const SamplerConfig& config) {
  config.validate();
  std::vector<std::vector<std::vector<double>>> out(config.chains);
  for (int chain = 0; chain < config.chains; ++chain) {
    Rng rng(config.seed, 1000 + static_cast<std::uint64_t>(chain));
    std::vector<double> v(dim);
    for (auto& vi : v) vi = 0.1 * sample_normal(rng);
    double lp = log_density(v);
    double log_scale = std::log(2.38 / std::sqrt(static_cast<double>(dim)));
    std::vector<std::vector<double>> chol_L;
    std::vector<std::vector<double>> history;
    int adapt_t = 0;
    auto& draws = out[chain];
    draws.reserve(config.draws);
    for (int iter = 0; iter < config.warmup + config.draws; ++iter) {
      const bool warm = iter < config.warmup;
      const double scale = std::exp(log_scale);
      std::vector<double> z(dim), prop(v);
      for (auto& zi : z) zi = sample_normal(rng);
      if (chol_L.empty()) {
        for (std::size_t i = 0; i < dim; ++i) prop[i] += scale * z[i];
      } else {
        for (std::size_t i = 0; i < dim; ++i) {
          double step = 0.0;
          for (std::size_t k = 0; k <= i; ++k) step += chol_L[i][k] * z[k];
          prop[i] += scale * step;
        }
      }
      const double lp_prop = log_density(prop);
      const bool accept =
          lp_prop > kNegInf && std::log(rng.uniform()) < lp_prop - lp;
      if (accept) {
        v = prop;
        lp = lp_prop;
      }
      if (warm) {
        const double gamma = std::pow(++adapt_t, -0.6);
        log_scale += gamma * ((accept ? 1.0 : 0.0) - config.target_accept);
        history.push_back(v);
        const bool refresh = (iter + 1 == config.warmup / 2 ||
                              iter + 1 == (3 * config.warmup) / 4);
        if (refresh && history.size() >= 20 && dim > 1) {
          const std::size_t m0 = history.size() / 2;
          const std::size_t m = history.size() - m0;
          std::vector<double> mean(dim, 0.0);
          for (std::size_t s = m0; s < history.size(); ++s)
            for (std::size_t i = 0; i < dim; ++i) mean[i] += history[s][i];
          for (auto& mi : mean) mi /= m;
          std::vector<std::vector<double>> cov(dim,
                                               std::vector<double>(dim, 0.0));
          for (std::size_t s = m0; s < history.size(); ++s)
            for (std::size_t i = 0; i < dim; ++i)
              for (std::size_t j = 0; j <= i; ++j)
                cov[i][j] +=
                    (history[s][i] - mean[i]) * (history[s][j] - mean[j]);
          for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t j = 0; j <= i; ++j) {
              cov[i][j] /= (m - 1);
              cov[j][i] = cov[i][j];
            }
          chol_L = cholesky(cov);
          log_scale = std::log(2.38 / std::sqrt(static_cast<double>(dim)));
          adapt_t = 0;
        }
      } else {
        draws.push_back(v);
      }
    }
  }
  return out;
}

PosteriorDraws run_sampler(const Dataset& dataset, const ModelSpec& spec,
                           const PriorConfig& prior,
                           const SamplerConfig& config) {
  config.validate();
  if (dataset.empty()) throw std::domain_error("run_sampler: empty dataset");
  for (const auto& s : dataset) s.validate();

  std::vector<ChainResult> results(config.chains);
  const int workers = std::max(1, config.threads);
  if (workers == 1) {
    for (int c = 0; c < config.chains; ++c)
      results[c] = run_chain(dataset, spec, prior, config, c);
  } else {
    std::vector<std::thread> pool;
    std::exception_ptr err;
    std::mutex err_mu;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (int c = w; c < config.chains; c += workers) {
          try {
            results[c] = run_chain(dataset, spec, prior, config, c);
          } catch (...) {
            std::lock_guard<std::mutex> lk(err_mu);
            if (!err) err = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
  }

  PosteriorDraws out;
  out.names = param_names(spec, dataset.size());
  for (auto& r : results) {
    out.draws.push_back(std::move(r.constrained));
    for (auto& row : r.pointwise) out.pointwise_loglik.push_back(std::move(row));
  }
  out.diags = compute_diagnostics(out.draws);
  return out;
}

namespace {

// Average ranks with ties, then normal scores.
std::vector<double> rank_normalize(const std::vector<double>& x) {
  const std::size_t s = x.size();
  std::vector<std::size_t> idx(s);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(s);
  std::size_t i = 0;
  while (i < s) {
    std::size_t j = i;
    while (j + 1 < s && x[idx[j + 1]] == x[idx[i]]) ++j;
    const double avg = 0.5 * (i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = avg;
    i = j + 1;
  }
  std::vector<double> z(s);
  for (std::size_t k = 0; k < s; ++k)
    z[k] = normal_quantile((ranks[k] - 0.375) / (s + 0.25));
  return z;
}

double ess_from_chains(const std::vector<std::vector<double>>& chains) {
  const std::size_t m = chains.size();
  const std::size_t nit = chains[0].size();
  std::vector<double> means(m), vars(m, 0.0);
  for (std::size_t c = 0; c < m; ++c) {
    means[c] = std::accumulate(chains[c].begin(), chains[c].end(), 0.0) / nit;
    for (double vv : chains[c]) vars[c] += (vv - means[c]) * (vv - means[c]);
    vars[c] /= (nit - 1);
  }
  const double w = std::accumulate(vars.begin(), vars.end(), 0.0) / m;
  double b = 0.0;
  const double gm = std::accumulate(means.begin(), means.end(), 0.0) / m;
  for (double mu : means) b += (mu - gm) * (mu - gm);
  b *= static_cast<double>(nit) / std::max<std::size_t>(m - 1, 1);
  const double var_plus = (nit - 1.0) / nit * w + b / nit;
  if (var_plus <= 0.0) return 0.0;

  // Per-chain autocovariances, combined per Vehtari et al.
  const std::size_t max_lag = nit - 1;
  std::vector<double> rho(max_lag, 0.0);
  for (std::size_t t = 1; t < max_lag; ++t) {
    double acov = 0.0;
    for (std::size_t c = 0; c < m; ++c) {
      double s = 0.0;
      for (std::size_t k = 0; k + t < nit; ++k)
        s += (chains[c][k] - means[c]) * (chains[c][k + t] - means[c]);
      acov += s / nit;
    }
    acov /= m;
    rho[t] = 1.0 - (w - acov) / var_plus;
  }
  rho[0] = 1.0;

  // Geyer initial monotone positive sequence on paired sums.
  double tau = 1.0;
  double prev_pair = kPosInf;
  for (std::size_t t = 1; t + 1 < max_lag; t += 2) {
    double pair = rho[t] + rho[t + 1];
    if (pair < 0.0) break;
    pair = std::min(pair, prev_pair);
    prev_pair = pair;
    tau += 2.0 * pair;
  }
  return static_cast<double>(m * nit) / tau;
}

}  // namespace

std::vector<Diagnostic> compute_diagnostics(
    const std::vector<std::vector<std::vector<double>>>& draws) {
  if (draws.empty() || draws[0].empty()) return {};
  const std::size_t n_params = draws[0][0].size();
  const std::size_t nit = draws[0].size();
  std::vector<Diagnostic> out(n_params);
  const bool splittable = nit >= 4;

  for (std::size_t p = 0; p < n_params; ++p) {
    // Split each chain in half.
    std::vector<std::vector<double>> chains;
    for (const auto& ch : draws) {
      if (splittable) {
        const std::size_t half = ch.size() / 2;
        std::vector<double> a, b;
        for (std::size_t k = 0; k < half; ++k) a.push_back(ch[k][p]);
        for (std::size_t k = half; k < 2 * half; ++k) b.push_back(ch[k][p]);
        chains.push_back(std::move(a));
        chains.push_back(std::move(b));
      } else {
        std::vector<double> a;
        for (const auto& it : ch) a.push_back(it[p]);
        chains.push_back(std::move(a));
      }
    }
    // Rank-normalize jointly.
    std::vector<double> pooled;
    for (const auto& c : chains) pooled.insert(pooled.end(), c.begin(), c.end());
    bool constant = true;
    for (double vv : pooled)
      if (vv != pooled.front()) {
        constant = false;
        break;
      }
    if (constant) {
      out[p] = {std::numeric_limits<double>::quiet_NaN(), 0.0};
      continue;
    }
    const auto z = rank_normalize(pooled);
    std::size_t off = 0;
    for (auto& c : chains) {
      for (std::size_t k = 0; k < c.size(); ++k) c[k] = z[off + k];
      off += c.size();
    }

    const std::size_t m = chains.size();
    const std::size_t half_n = chains[0].size();
    std::vector<double> means(m), vars(m, 0.0);
    for (std::size_t c = 0; c < m; ++c) {
      means[c] =
          std::accumulate(chains[c].begin(), chains[c].end(), 0.0) / half_n;
      for (double vv : chains[c])
        vars[c] += (vv - means[c]) * (vv - means[c]);
      vars[c] /= (half_n - 1);
    }
    const double w = std::accumulate(vars.begin(), vars.end(), 0.0) / m;
    double b = 0.0;
    const double gm = std::accumulate(means.begin(), means.end(), 0.0) / m;
    for (double mu : means) b += (mu - gm) * (mu - gm);
    if (m > 1) b *= static_cast<double>(half_n) / (m - 1);
    const double var_plus = (half_n - 1.0) / half_n * w + (m > 1 ? b / half_n : 0.0);
    out[p].rhat = (m > 1 && w > 0.0)
                      ? std::sqrt(var_plus / w)
                      : std::numeric_limits<double>::quiet_NaN();
    out[p].ess = ess_from_chains(chains);
  }
  return out;
}

void write_draws_csv(std::ostream& os, const PosteriorDraws& draws) {
  os << "chain,iteration";
  for (const auto& n : draws.names) os << ',' << n;
  os << '\n';
  os.precision(17);
  for (std::size_t c = 0; c < draws.draws.size(); ++c)
    for (std::size_t it = 0; it < draws.draws[c].size(); ++it) {
      os << c << ',' << it;
      for (double vv : draws.draws[c][it]) os << ',' << vv;
      os << '\n';
    }
}

void write_summary_json(std::ostream& os, const PosteriorDraws& draws) {
  os.precision(10);
  os << "{\n  \"parameters\": [\n";
  for (std::size_t p = 0; p < draws.names.size(); ++p) {
    const auto& nm = draws.names[p];
    os << "    {\"name\": \"" << nm << "\", \"mean\": " << draws.mean(nm)
       << ", \"sd\": " << draws.sd(nm)
       << ", \"q05\": " << draws.quantile(nm, 0.05)
       << ", \"q50\": " << draws.quantile(nm, 0.5)
       << ", \"q95\": " << draws.quantile(nm, 0.95);
    const auto& d = draws.diags[p];
    if (std::isnan(d.rhat))
      os << ", \"rhat\": null";
    else
      os << ", \"rhat\": " << d.rhat;
    os << ", \"ess\": " << d.ess << "}";
    os << (p + 1 < draws.names.size() ? ",\n" : "\n");
  }
  os << "  ]\n}\n";
}

}  // namespace metasel
