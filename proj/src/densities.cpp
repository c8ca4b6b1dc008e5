#include "metasel/densities.hpp"

#include <cmath>

#include "metasel/special.hpp"

namespace metasel {

double p_value_one_sided(const Study& study) {
  study.validate();
  return normal_cdf(-study.effect / study.se);
}

std::vector<double> cutoffs_in_effect_space(const CutoffGrid& cutoffs,
                                            double se) {
  if (!(se > 0.0))
    throw std::domain_error("cutoffs_in_effect_space: se must be > 0");
  const auto& alphas = cutoffs.alphas();
  std::vector<double> c(alphas.size() + 1);
  c.front() = kPosInf;
  c.back() = kNegInf;
  for (std::size_t j = 1; j < alphas.size(); ++j)
    c[j] = se * normal_quantile(1.0 - alphas[j - 1]);
  return c;
}

double log_step_weight(double u, const SelectionProbs& rho,
                       const CutoffGrid& cutoffs) {
  rho.validate();
  if (rho.rho.size() != cutoffs.intervals())
    throw std::domain_error("log_step_weight: rho length != interval count");
  const std::size_t j = cutoffs.interval_of(u);
  return std::log(rho.rho[j - 1]);
}

std::vector<double> log_interval_masses(double mean, double sd,
                                        double study_se,
                                        const CutoffGrid& cutoffs) {
  const auto c = cutoffs_in_effect_space(cutoffs, study_se);
  const std::size_t J = cutoffs.intervals();
  std::vector<double> lm(J);
  for (std::size_t j = 1; j <= J; ++j)
    lm[j - 1] = log_normal_interval_mass(mean, sd, c[j], c[j - 1]);
  return lm;
}

std::vector<double> interval_masses(double mean, double sd, double study_se,
                                    const CutoffGrid& cutoffs) {
  auto lm = log_interval_masses(mean, sd, study_se, cutoffs);
  for (double& v : lm) v = std::exp(v);
  return lm;
}

std::vector<double> mixture_weights_pistar(double mean, double sd,
                                           double study_se,
                                           const SelectionProbs& rho,
                                           const CutoffGrid& cutoffs) {
  rho.validate();
  if (rho.rho.size() != cutoffs.intervals())
    throw std::domain_error("mixture_weights_pistar: rho length mismatch");
  const auto lm = log_interval_masses(mean, sd, study_se, cutoffs);
  std::vector<double> lw(lm.size());
  for (std::size_t j = 0; j < lm.size(); ++j)
    lw[j] = rho.rho[j] > 0.0 ? std::log(rho.rho[j]) + lm[j] : kNegInf;
  const double lz = log_sum_exp(lw);
  if (lz == kNegInf)
    throw std::runtime_error("mixture_weights_pistar: zero weighted mass");
  std::vector<double> out(lw.size());
  for (std::size_t j = 0; j < lw.size(); ++j) out[j] = std::exp(lw[j] - lz);
  return out;
}

double loglik_uncorrected(const Study& study, double theta0, double tau) {
  study.validate();
  if (!(tau >= 0.0)) throw std::domain_error("loglik: tau must be >= 0");
  const double s = std::sqrt(tau * tau + study.se * study.se);
  return log_normal_pdf((study.effect - theta0) / s) - std::log(s);
}

namespace {

// log sum_j rho_j m_j, the selection normalizer.
double log_selection_normalizer(double mean, double marginal_sd,
                                double study_se, const SelectionProbs& rho,
                                const CutoffGrid& cutoffs) {
  const auto lm = log_interval_masses(mean, marginal_sd, study_se, cutoffs);
  std::vector<double> lw(lm.size());
  for (std::size_t j = 0; j < lm.size(); ++j)
    lw[j] = rho.rho[j] > 0.0 ? std::log(rho.rho[j]) + lm[j] : kNegInf;
  return log_sum_exp(lw);
}

// Index j (1-based) with x in [c_j, c_{j-1}).
std::size_t effect_interval_of(double x, const std::vector<double>& c) {
  for (std::size_t j = 1; j + 1 < c.size(); ++j)
    if (x >= c[j]) return j;
  return c.size() - 1;
}

}  // namespace

double loglik_pubbias(const Study& study, double theta0, double tau,
                      const SelectionProbs& rho, const CutoffGrid& cutoffs) {
  study.validate();
  rho.validate();
  if (!(tau >= 0.0)) throw std::domain_error("loglik: tau must be >= 0");
  const double s = std::sqrt(tau * tau + study.se * study.se);
  const double lz =
      log_selection_normalizer(theta0, s, study.se, rho, cutoffs);
  if (lz == kNegInf)
    throw std::runtime_error("loglik_pubbias: zero selection normalizer");
  const double u = p_value_one_sided(study);
  return log_normal_pdf((study.effect - theta0) / s) - std::log(s) +
         log_step_weight(u, rho, cutoffs) - lz;
}

double loglik_pubbias_mixture_form(const Study& study, double theta0,
                                   double tau, const SelectionProbs& rho,
                                   const CutoffGrid& cutoffs) {
  study.validate();
  if (!(tau >= 0.0)) throw std::domain_error("loglik: tau must be >= 0");
  const double s = std::sqrt(tau * tau + study.se * study.se);
  const auto pistar = mixture_weights_pistar(theta0, s, study.se, rho, cutoffs);
  const auto c = cutoffs_in_effect_space(cutoffs, study.se);
  const std::size_t j = effect_interval_of(study.effect, c);
  if (pistar[j - 1] <= 0.0) return kNegInf;
  return std::log(pistar[j - 1]) +
         log_trunc_normal_pdf(study.effect, theta0, s, c[j], c[j - 1]);
}

double loglik_phack_fixed(const Study& study, double theta,
                          const HackingProbs& pi, const CutoffGrid& cutoffs) {
  study.validate();
  pi.validate();
  if (pi.pi.size() != cutoffs.intervals())
    throw std::domain_error("loglik_phack_fixed: pi length mismatch");
  const auto c = cutoffs_in_effect_space(cutoffs, study.se);
  const std::size_t j = effect_interval_of(study.effect, c);
  if (pi.pi[j - 1] <= 0.0) return kNegInf;
  return std::log(pi.pi[j - 1]) +
         log_trunc_normal_pdf(study.effect, theta, study.se, c[j], c[j - 1]);
}

double loglik_phack_random_marginal(const Study& study, double theta0,
                                    double tau, const HackingProbs& pi,
                                    const CutoffGrid& cutoffs,
                                    int quad_order) {
  if (!(tau >= 0.0)) throw std::domain_error("loglik: tau must be >= 0");
  if (quad_order < 21)
    throw std::domain_error("loglik_phack_random_marginal: order must be >= 21");
  if (tau == 0.0) return loglik_phack_fixed(study, theta0, pi, cutoffs);
  const auto& gh = gauss_hermite(quad_order);
  const double scale = std::sqrt(2.0) * tau;
  std::vector<double> terms(gh.nodes.size());
  constexpr double log_sqrt_pi = 0.57236494292470008707;
  for (std::size_t k = 0; k < gh.nodes.size(); ++k) {
    const double theta = theta0 + scale * gh.nodes[k];
    terms[k] = std::log(gh.weights[k]) - log_sqrt_pi +
               loglik_phack_fixed(study, theta, pi, cutoffs);
  }
  return log_sum_exp(terms);
}

double cdf_uncorrected(double x, const Study& study, double theta0,
                       double tau) {
  const double s = std::sqrt(tau * tau + study.se * study.se);
  return normal_cdf((x - theta0) / s);
}

double cdf_pubbias(double x, const Study& study, double theta0, double tau,
                   const SelectionProbs& rho, const CutoffGrid& cutoffs) {
  const double s = std::sqrt(tau * tau + study.se * study.se);
  const auto pistar = mixture_weights_pistar(theta0, s, study.se, rho, cutoffs);
  const auto c = cutoffs_in_effect_space(cutoffs, study.se);
  double acc = 0.0;
  for (std::size_t j = 1; j < c.size(); ++j)
    if (pistar[j - 1] > 0.0)
      acc += pistar[j - 1] * trunc_normal_cdf(x, theta0, s, c[j], c[j - 1]);
  return acc;
}

double cdf_phack_fixed(double x, const Study& study, double theta,
                       const HackingProbs& pi, const CutoffGrid& cutoffs) {
  const auto c = cutoffs_in_effect_space(cutoffs, study.se);
  double acc = 0.0;
  for (std::size_t j = 1; j < c.size(); ++j)
    if (pi.pi[j - 1] > 0.0)
      acc += pi.pi[j - 1] * trunc_normal_cdf(x, theta, study.se, c[j], c[j - 1]);
  return acc;
}

PosteriorThetaSummary posterior_theta_given_x(const Study& study,
                                              double theta0, double tau,
                                              const ModelSpec& spec,
                                              [[maybe_unused]] const SelectionProbs& rho,
                                              const HackingProbs& pi) {
  if (spec.effects != Effects::random || !(tau > 0.0))
    throw std::domain_error(
        "posterior_theta_given_x: needs a random-effects spec with tau > 0");
  study.validate();
  PosteriorThetaSummary out;
  if (spec.family == Family::uncorrected || spec.family == Family::pubbias) {
    // The step weight does not depend on theta, so it cancels: the posterior
    // is the conjugate normal-normal one for both families.
    const double prec = 1.0 / (tau * tau) + 1.0 / (study.se * study.se);
    const double var = 1.0 / prec;
    const double mean =
        var * (study.effect / (study.se * study.se) + theta0 / (tau * tau));
    const double sd = std::sqrt(var);
    out.mean = mean;
    out.sd = sd;
    out.density = [mean, sd](double t) {
      return std::exp(log_normal_pdf((t - mean) / sd)) / sd;
    };
    return out;
  }
  // p-hacking: density proportional to f_fixed(x; theta) * phi(theta).
  const auto& gh = gauss_hermite(81);
  const CutoffGrid cutoffs = spec.cutoffs;
  const double scale = std::sqrt(2.0) * tau;
  double z = 0.0, m1 = 0.0, m2 = 0.0;
  std::vector<double> lf(gh.nodes.size());
  double lmax = kNegInf;
  std::vector<double> thetas(gh.nodes.size());
  for (std::size_t k = 0; k < gh.nodes.size(); ++k) {
    thetas[k] = theta0 + scale * gh.nodes[k];
    lf[k] = std::log(gh.weights[k]) +
            loglik_phack_fixed(study, thetas[k], pi, cutoffs);
    lmax = std::max(lmax, lf[k]);
  }
  if (lmax == kNegInf)
    throw std::runtime_error("posterior_theta_given_x: zero posterior mass");
  for (std::size_t k = 0; k < gh.nodes.size(); ++k) {
    const double w = std::exp(lf[k] - lmax);
    z += w;
    m1 += w * thetas[k];
    m2 += w * thetas[k] * thetas[k];
  }
  m1 /= z;
  m2 /= z;
  out.mean = m1;
  out.sd = std::sqrt(std::max(0.0, m2 - m1 * m1));
  const double log_z = std::log(z) + lmax;
  const double lw_prior_scale = std::log(std::sqrt(M_PI));
  const Study st = study;
  out.density = [st, theta0, tau, pi, cutoffs, log_z, scale,
                 lw_prior_scale](double t) {
    // f_fixed(x; t) phi(t; theta0, tau) / Z, with Z re-expressed from the
    // Gauss-Hermite sum: Z_gh = sqrt(pi) * integral / (sqrt(pi) tau ... )
    const double lp = loglik_phack_fixed(st, t, pi, cutoffs) +
                      log_normal_pdf((t - theta0) / tau) - std::log(tau);
    // log normalizer: integral f_fixed phi dtheta = Z_gh / sqrt(pi)
    const double log_norm = log_z - lw_prior_scale;
    return std::exp(lp - log_norm);
  };
  return out;
}

}  // namespace metasel
