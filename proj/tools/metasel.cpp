// Command-line front end: fit, simulate, replicate, compare, convert-weights,
// demo-selection-set.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "metasel/densities.hpp"
#include "metasel/equivalence.hpp"
#include "metasel/ingest.hpp"
#include "metasel/loo.hpp"
#include "metasel/mcmc.hpp"
#include "metasel/selection_lab.hpp"
#include "metasel/simulate.hpp"
#include "metasel/special.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace metasel;

namespace {

int default_threads() {
  if (const char* env = std::getenv("METASEL_THREADS")) {
    const int t = std::atoi(env);
    if (t >= 1) return t;
  }
  return 1;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(std::stod(item));
  return out;
}

CutoffGrid parse_cutoffs(const std::string& text) {
  auto alphas = parse_list(text);
  if (alphas.empty() || alphas.back() != 1.0) alphas.push_back(1.0);
  return CutoffGrid(alphas);
}

json config_json(const SamplerConfig& cfg, const ModelSpec& spec) {
  return json{{"model", to_string(spec.family)},
              {"effects", to_string(spec.effects)},
              {"cutoffs", spec.cutoffs.alphas()},
              {"chains", cfg.chains},
              {"warmup", cfg.warmup},
              {"draws", cfg.draws},
              {"seed", cfg.seed},
              {"quad_order", cfg.quad_order},
              {"threads", cfg.threads}};
}

json summary_json(const PosteriorDraws& draws) {
  json params = json::array();
  for (std::size_t p = 0; p < draws.names.size(); ++p) {
    const auto& nm = draws.names[p];
    json j{{"name", nm},
           {"mean", draws.mean(nm)},
           {"sd", draws.sd(nm)},
           {"q05", draws.quantile(nm, 0.05)},
           {"q50", draws.quantile(nm, 0.5)},
           {"q95", draws.quantile(nm, 0.95)},
           {"ess", draws.diags[p].ess}};
    if (std::isnan(draws.diags[p].rhat))
      j["rhat"] = nullptr;
    else
      j["rhat"] = draws.diags[p].rhat;
    params.push_back(std::move(j));
  }
  return json{{"parameters", std::move(params)}};
}

json loo_json(const std::string& model, const LooResult& loo) {
  json k = json::array();
  for (double v : loo.pareto_k)
    k.push_back(std::isnan(v) ? json(nullptr) : json(v));
  return json{{"model", model},
              {"elpd_loo", loo.elpd_loo},
              {"looic", loo.looic},
              {"se", loo.se_looic},
              {"pareto_k", std::move(k)},
              {"flags", loo.flags}};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << text;
}

// Gaussian KDE density curve over the draw column.
json kde_curve(const std::vector<double>& xs) {
  double m = 0.0;
  for (double v : xs) m += v;
  m /= xs.size();
  double sd = 0.0;
  for (double v : xs) sd += (v - m) * (v - m);
  sd = std::sqrt(sd / (xs.size() - 1));
  const double bw = 1.06 * sd * std::pow(double(xs.size()), -0.2) + 1e-12;
  json pts = json::array();
  for (int g = 0; g <= 200; ++g) {
    const double x = m - 4.0 * sd + 8.0 * sd * g / 200.0;
    double dens = 0.0;
    for (double v : xs) dens += std::exp(log_normal_pdf((x - v) / bw)) / bw;
    dens /= xs.size();
    pts.push_back(json{{"x", x}, {"density", dens}});
  }
  return pts;
}

struct FitOptions {
  std::string data_path, out_dir;
  std::string model = "uncorrected", effects = "random";
  std::string cutoffs = "0.025,0.05,1";
  SamplerConfig sampler;
  bool no_loo = false;
  bool emit_plotdata = false;
  double tau_flag = -1.0;  // only to detect contradictory usage
};

int run_fit(const FitOptions& opt) {
  ModelSpec spec;
  spec.family = family_from_string(opt.model);
  spec.effects = effects_from_string(opt.effects);
  spec.cutoffs = parse_cutoffs(opt.cutoffs);
  if (spec.effects == Effects::fixed && opt.tau_flag >= 0.0)
    throw CLI::ValidationError("--tau contradicts --effects fixed");

  const Dataset dataset = parse_dataset_file(opt.data_path);
  PriorConfig prior;
  SamplerConfig cfg = opt.sampler;
  cfg.compute_pointwise = !opt.no_loo;

  const PosteriorDraws draws = run_sampler(dataset, spec, prior, cfg);

  fs::create_directories(opt.out_dir);
  {
    std::ofstream os(fs::path(opt.out_dir) / "draws.csv");
    os << "# config: " << config_json(cfg, spec).dump() << '\n';
    write_draws_csv(os, draws);
  }
  json summary = summary_json(draws);
  summary["config"] = config_json(cfg, spec);
  write_text(fs::path(opt.out_dir) / "summary.json", summary.dump(2) + "\n");

  if (!opt.no_loo) {
    const LooResult loo = importance_loo(draws.pointwise_loglik);
    json j = loo_json(opt.model, loo);
    j["config"] = config_json(cfg, spec);
    write_text(fs::path(opt.out_dir) / "loo.json", j.dump(2) + "\n");
  }

  if (opt.emit_plotdata) {
    json plot{{"theta0_posterior", kde_curve(draws.column("theta0"))}};
    if (spec.effects == Effects::random && spec.family != Family::uncorrected) {
      // Study-level posterior theta densities at the posterior mean state.
      const double t0 = draws.mean("theta0");
      const double tau = std::max(draws.mean("tau"), 1e-6);
      SelectionProbs rho;
      HackingProbs pi;
      if (spec.family == Family::pubbias) {
        rho.rho = {1.0};
        for (std::size_t j = 2; j <= spec.cutoffs.intervals(); ++j)
          rho.rho.push_back(draws.mean("rho[" + std::to_string(j) + "]"));
      } else {
        for (std::size_t j = 1; j <= spec.cutoffs.intervals(); ++j)
          pi.pi.push_back(draws.mean("pi[" + std::to_string(j) + "]"));
        double s = 0.0;
        for (double v : pi.pi) s += v;
        for (double& v : pi.pi) v /= s;
      }
      json curves = json::array();
      for (std::size_t i = 0; i < dataset.size(); ++i) {
        const auto post =
            posterior_theta_given_x(dataset[i], t0, tau, spec, rho, pi);
        json pts = json::array();
        for (int g = 0; g <= 200; ++g) {
          const double x = post.mean - 4.0 * post.sd + 8.0 * post.sd * g / 200.0;
          pts.push_back(json{{"x", x}, {"density", post.density(x)}});
        }
        curves.push_back(json{{"study", i},
                              {"mean", post.mean},
                              {"sd", post.sd},
                              {"curve", std::move(pts)}});
      }
      plot["theta_i_posteriors"] = std::move(curves);
    }
    write_text(fs::path(opt.out_dir) / "plotdata.json", plot.dump(2) + "\n");
  }
  std::cout << "fit written to " << opt.out_dir << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian selection models for publication bias and p-hacking"};
  app.set_config("--config", "", "key=value config file; flags override");
  app.require_subcommand(1);

  // ---- fit ----
  FitOptions fit;
  fit.sampler.threads = default_threads();
  auto* cmd_fit = app.add_subcommand("fit", "fit a model to a dataset");
  cmd_fit->add_option("--data", fit.data_path, "dataset CSV")->required();
  cmd_fit->add_option("--model", fit.model, "uncorrected|pubbias|phack");
  cmd_fit->add_option("--effects", fit.effects, "fixed|random");
  cmd_fit->add_option("--cutoffs", fit.cutoffs, "comma-separated alphas");
  cmd_fit->add_option("--chains", fit.sampler.chains);
  cmd_fit->add_option("--warmup", fit.sampler.warmup);
  cmd_fit->add_option("--draws", fit.sampler.draws);
  cmd_fit->add_option("--seed", fit.sampler.seed);
  cmd_fit->add_option("--quad-order", fit.sampler.quad_order);
  cmd_fit->add_option("--threads", fit.sampler.threads);
  cmd_fit->add_option("--tau", fit.tau_flag,
                      "(invalid with --effects fixed; detection only)");
  cmd_fit->add_flag("--no-loo", fit.no_loo, "skip LOO computation");
  cmd_fit->add_flag("--emit-plotdata", fit.emit_plotdata,
                    "write posterior density curves");
  cmd_fit->add_option("--out", fit.out_dir, "output directory")->required();

  // ---- simulate ----
  std::string sim_scenario = "none", sim_weights, sim_serule = "infosize",
              sim_out, sim_cutoffs = "0.025,0.05,1";
  ScenarioConfig sim;
  auto* cmd_sim = app.add_subcommand("simulate", "simulate a dataset");
  cmd_sim->add_option("--scenario", sim_scenario, "none|pubbias|phack");
  cmd_sim->add_option("--n", sim.n)->required();
  cmd_sim->add_option("--theta0", sim.theta0);
  cmd_sim->add_option("--tau", sim.tau);
  cmd_sim->add_option("--weights", sim_weights, "rho or pi values");
  cmd_sim->add_option("--cutoffs", sim_cutoffs);
  cmd_sim->add_option("--se-rule", sim_serule, "infosize|literal|fixed:V");
  cmd_sim->add_option("--seed", sim.seed);
  cmd_sim->add_option("--out", sim_out, "output CSV")->required();

  // ---- replicate ----
  int rep_table = 2, rep_reps = 10;
  std::uint64_t rep_seed = 0;
  std::string rep_out, rep_ns = "5,30,100", rep_theta0s = "0,0.2,0.8",
              rep_taus = "0.1,0.5";
  int rep_threads = default_threads();
  SamplerConfig rep_sampler;
  auto* cmd_rep = app.add_subcommand("replicate", "scenario-grid tables");
  cmd_rep->add_option("--table", rep_table, "2|3|4")->required();
  cmd_rep->add_option("--reps", rep_reps);
  cmd_rep->add_option("--seed", rep_seed);
  cmd_rep->add_option("--n", rep_ns, "subset of study counts");
  cmd_rep->add_option("--theta0", rep_theta0s, "subset of theta0 values");
  cmd_rep->add_option("--tau", rep_taus, "subset of tau values");
  cmd_rep->add_option("--chains", rep_sampler.chains);
  cmd_rep->add_option("--warmup", rep_sampler.warmup);
  cmd_rep->add_option("--draws", rep_sampler.draws);
  cmd_rep->add_option("--threads", rep_threads);
  cmd_rep->add_option("--out", rep_out, "output directory")->required();

  // ---- compare ----
  std::string cmp_data, cmp_models = "uncorrected,pubbias,phack",
              cmp_effects = "random", cmp_out;
  SamplerConfig cmp_sampler;
  cmp_sampler.threads = default_threads();
  auto* cmd_cmp = app.add_subcommand("compare", "LOOIC model comparison");
  cmd_cmp->add_option("--data", cmp_data)->required();
  cmd_cmp->add_option("--models", cmp_models, "comma-separated families");
  cmd_cmp->add_option("--effects", cmp_effects);
  cmd_cmp->add_option("--chains", cmp_sampler.chains);
  cmd_cmp->add_option("--warmup", cmp_sampler.warmup);
  cmd_cmp->add_option("--draws", cmp_sampler.draws);
  cmd_cmp->add_option("--seed", cmp_sampler.seed);
  cmd_cmp->add_option("--threads", cmp_sampler.threads);
  cmd_cmp->add_option("--out", cmp_out, "output CSV (default stdout)");

  // ---- convert-weights ----
  std::string cw_dir = "rho2pi", cw_weights, cw_cutoffs = "0.025,0.05,1";
  double cw_theta0 = 0.0, cw_tau = 0.0, cw_sigma = 1.0;
  auto* cmd_cw = app.add_subcommand("convert-weights",
                                    "fixed-sigma rho/pi correspondence");
  cmd_cw->add_option("--direction", cw_dir, "rho2pi|pi2rho");
  cmd_cw->add_option("--weights", cw_weights)->required();
  cmd_cw->add_option("--theta0", cw_theta0);
  cmd_cw->add_option("--tau", cw_tau);
  cmd_cw->add_option("--sigma", cw_sigma);
  cmd_cw->add_option("--cutoffs", cw_cutoffs);

  // ---- demo-selection-set ----
  std::string ds_h = "both", ds_weight = "step:0.05:0.1";
  std::size_t ds_n = 100000;
  std::uint64_t ds_seed = 0;
  auto* cmd_ds = app.add_subcommand("demo-selection-set",
                                    "Algorithm-1 selection-set demo");
  cmd_ds->add_option("--H", ds_h, "both|x|none");
  cmd_ds->add_option("--weight", ds_weight, "step:ALPHA:RHO");
  cmd_ds->add_option("--n", ds_n);
  cmd_ds->add_option("--seed", ds_seed);

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_fit->parsed()) return run_fit(fit);

    if (cmd_sim->parsed()) {
      sim.scenario = scenario_from_string(sim_scenario);
      sim.cutoffs = parse_cutoffs(sim_cutoffs);
      sim.se_rule = SeRule::parse(sim_serule);
      if (sim.scenario == Scenario::pubbias)
        sim.rho = SelectionProbs(parse_list(sim_weights));
      else if (sim.scenario == Scenario::phack)
        sim.pi = HackingProbs(parse_list(sim_weights));
      const Replication rep = simulate_replication(sim, 1);
      std::ofstream os(sim_out);
      if (!os) throw std::runtime_error("cannot write " + sim_out);
      os << "# scenario=" << sim_scenario << " n=" << sim.n
         << " theta0=" << sim.theta0 << " tau=" << sim.tau
         << " weights=" << sim_weights << " se_rule=" << sim_serule
         << " seed=" << sim.seed << '\n';
      write_dataset_csv(os, rep.dataset);
      std::cout << "dataset written to " << sim_out << '\n';
      return 0;
    }

    if (cmd_rep->parsed()) {
      std::vector<ScenarioConfig> grid;
      for (double tau : parse_list(rep_taus))
        for (double t0 : parse_list(rep_theta0s))
          for (double nd : parse_list(rep_ns)) {
            ScenarioConfig c;
            c.n = static_cast<std::size_t>(nd);
            c.theta0 = t0;
            c.tau = tau;
            c.seed = rep_seed;
            if (rep_table == 2) {
              c.scenario = Scenario::none;
            } else if (rep_table == 3) {
              c.scenario = Scenario::pubbias;
              c.rho = SelectionProbs({1.0, 0.7, 0.1});
            } else if (rep_table == 4) {
              c.scenario = Scenario::phack;
              c.pi = HackingProbs({0.6, 0.3, 0.1});
            } else {
              throw CLI::ValidationError("--table must be 2, 3 or 4");
            }
            grid.push_back(std::move(c));
          }
      std::vector<ModelSpec> fits(2);
      fits[0].family = Family::phack;
      fits[1].family = Family::pubbias;
      rep_sampler.seed = rep_seed;
      rep_sampler.threads = rep_threads;
      PriorConfig prior;
      const auto cells =
          run_scenario_grid(grid, rep_reps, fits, prior, rep_sampler);
      fs::create_directories(rep_out);
      std::ofstream os(fs::path(rep_out) /
                       ("table" + std::to_string(rep_table) + ".csv"));
      os << "# table=" << rep_table << " reps=" << rep_reps
         << " seed=" << rep_seed << '\n';
      write_grid_csv(os, cells);
      std::cout << "grid written to " << rep_out << '\n';
      return 0;
    }

    if (cmd_cmp->parsed()) {
      const Dataset dataset = parse_dataset_file(cmp_data);
      PriorConfig prior;
      std::stringstream table;
      table << "model,elpd_loo,looic,se\n";
      std::stringstream sm(cmp_models);
      std::string model;
      while (std::getline(sm, model, ',')) {
        ModelSpec spec;
        spec.family = family_from_string(model);
        spec.effects = effects_from_string(cmp_effects);
        const PosteriorDraws draws =
            run_sampler(dataset, spec, prior, cmp_sampler);
        const LooResult loo = importance_loo(draws.pointwise_loglik);
        table << model << ',' << loo.elpd_loo << ',' << loo.looic << ','
              << loo.se_looic << '\n';
      }
      if (cmp_out.empty())
        std::cout << table.str();
      else
        write_text(cmp_out, table.str());
      return 0;
    }

    if (cmd_cw->parsed()) {
      const CutoffGrid cutoffs = parse_cutoffs(cw_cutoffs);
      const auto w = parse_list(cw_weights);
      json out;
      if (cw_dir == "rho2pi") {
        const auto pi = rho_to_pi(SelectionProbs(w), cw_theta0, cw_tau,
                                  cw_sigma, cutoffs);
        out = json{{"direction", "rho2pi"}, {"rho", w}, {"pi", pi.pi}};
      } else if (cw_dir == "pi2rho") {
        const auto res =
            pi_to_rho(HackingProbs(w), cw_theta0, cw_tau, cw_sigma, cutoffs);
        out = json{{"direction", "pi2rho"},
                   {"pi", w},
                   {"rho", res.rho.rho},
                   {"satisfies_decreasing", res.satisfies_decreasing}};
      } else {
        throw CLI::ValidationError("--direction must be rho2pi or pi2rho");
      }
      out["theta0"] = cw_theta0;
      out["tau"] = cw_tau;
      out["sigma"] = cw_sigma;
      std::cout << out.dump(2) << '\n';
      return 0;
    }

    if (cmd_ds->parsed()) {
      SelectionSet H;
      if (ds_h == "both")
        H = SelectionSet::both;
      else if (ds_h == "x")
        H = SelectionSet::x_only;
      else if (ds_h == "none")
        H = SelectionSet::none;
      else
        throw CLI::ValidationError("--H must be both, x or none");
      double alpha = 0.05, rho_rest = 0.1;
      if (ds_weight.rfind("step:", 0) == 0) {
        std::string rest = ds_weight.substr(5);
        const auto sep = rest.find(':');
        if (sep == std::string::npos)
          throw CLI::ValidationError("--weight must look like step:0.05:0.1");
        alpha = std::stod(rest.substr(0, sep));
        rho_rest = std::stod(rest.substr(sep + 1));
      } else {
        throw CLI::ValidationError("only step:ALPHA:RHO weights supported");
      }
      Rng rng(ds_seed, 7);
      const auto draws =
          selection_set_demo(rng, H, step_weight_rule(alpha, rho_rest), ds_n);
      auto moments = [](const std::vector<double>& v) {
        double m = 0.0;
        for (double x : v) m += x;
        m /= v.size();
        double s = 0.0;
        for (double x : v) s += (x - m) * (x - m);
        return std::pair<double, double>(m, std::sqrt(s / (v.size() - 1)));
      };
      const auto [mx, sx] = moments(draws.x);
      const auto [mt, st] = moments(draws.theta);
      json out{{"H", ds_h},
               {"weight", ds_weight},
               {"n", ds_n},
               {"seed", ds_seed},
               {"x_mean", mx},
               {"x_sd", sx},
               {"theta_mean", mt},
               {"theta_sd", st}};
      std::cout << out.dump(2) << '\n';
      return 0;
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
