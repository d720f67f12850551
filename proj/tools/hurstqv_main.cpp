// hurstqv: Hurst-index estimation for SDEs driven by fractional Brownian
// motion. Subcommands: gen-fbm, simulate, estimate, variance, experiment.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "hurstqv/estimators.hpp"
#include "hurstqv/fgn.hpp"
#include "hurstqv/io.hpp"
#include "hurstqv/mc.hpp"
#include "hurstqv/quad_var.hpp"
#include "hurstqv/sde.hpp"
#include "hurstqv/variance.hpp"

namespace {

struct GenFbmArgs {
  std::size_t m = 0;
  double horizon = 1.0;
  double hurst = 0.0;
  std::uint64_t seed = 0;
  std::string out;
};

struct SimulateArgs {
  std::string process;
  double f0 = 0.0, f1 = 0.0, g0 = 0.0, g1 = 0.0, x0 = 1.0;
  bool custom = false;
  std::size_t m = 0;
  double horizon = 1.0;
  double hurst = 0.0;
  std::uint64_t seed = 0;
  std::string out;
};

struct EstimateArgs {
  std::string in;
  std::string method;
  std::string g_name;
  double g0 = 0.0, g1 = 0.0;
  bool custom_g = false;
  std::size_t n = 0;
  double level = 0.95;
};

struct VarianceArgs {
  double hurst = 0.0;
  std::size_t truncation = 100000;
};

struct ExperimentArgs {
  std::string config_path;
  unsigned threads = 0;
};

std::ofstream open_output(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw hurstqv::IoError("cannot open output file '" + path + "'");
  return os;
}

void run_gen_fbm(const GenFbmArgs& a) {
  const hurstqv::SamplePath path = hurstqv::fbm_path(a.m, a.horizon, a.hurst, a.seed);
  auto os = open_output(a.out);
  hurstqv::write_path_csv(os, path);
}

hurstqv::ProcessSpec make_affine_spec(double f0, double f1, double g0, double g1, double x0) {
  return hurstqv::ProcessSpec{
      "custom", [f0, f1](double x) { return f0 + f1 * x; },
      [g0, g1](double x) { return g0 + g1 * x; }, [g1](double) { return g1; }, x0};
}

void run_simulate(const SimulateArgs& a) {
  const hurstqv::ProcessSpec spec = a.process.empty()
                                        ? make_affine_spec(a.f0, a.f1, a.g0, a.g1, a.x0)
                                        : hurstqv::process_registry(a.process);
  const hurstqv::SdeResult result = hurstqv::simulate(spec, a.m, a.horizon, a.hurst, a.seed);
  auto os = open_output(a.out);
  hurstqv::write_path_csv(os, result.path, &result.driver);
}

nlohmann::json estimate_to_json(const hurstqv::HurstEstimate& est) {
  nlohmann::json j{{"h_hat", est.h_hat},
                   {"estimator_id", hurstqv::to_string(est.estimator_id)},
                   {"effective_n", est.effective_n}};
  if (est.std_error) j["std_error"] = *est.std_error;
  if (est.ci) {
    j["ci_lo"] = est.ci->lo;
    j["ci_hi"] = est.ci->hi;
    j["ci_level"] = est.ci->level;
  }
  if (est.selected_k) j["selected_k"] = *est.selected_k;
  return j;
}

void run_estimate(const EstimateArgs& a) {
  std::ifstream is(a.in);
  if (!is) throw hurstqv::IoError("cannot open input file '" + a.in + "'");
  const hurstqv::SamplePath path = hurstqv::read_path_csv(is);

  const hurstqv::EstimatorId id = hurstqv::estimator_from_string(a.method);
  hurstqv::HurstEstimate est;
  if (id == hurstqv::EstimatorId::known_g) {
    if (a.g_name.empty() && !a.custom_g)
      throw hurstqv::DomainError("estimate: method known_g needs --g I|II or --g0/--g1");
    std::function<double(double)> g;
    if (!a.g_name.empty())
      g = hurstqv::process_registry(a.g_name).diffusion;
    else
      g = [g0 = a.g0, g1 = a.g1](double x) { return g0 + g1 * x; };
    est = hurstqv::estimate_known_g(path, g, a.level);
  } else {
    const std::size_t m = path.steps();
    std::size_t n = a.n;
    if (n == 0) {
      n = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(m))));
      if (n < 2 || n * n != m)
        throw hurstqv::DomainError(
            "estimate: path length " + std::to_string(m + 1) +
            " is not n^2+1; pass --n to factor the grid as m = n * k_n");
    }
    if (n < 2 || m % n != 0)
      throw hurstqv::DomainError("estimate: --n must divide the number of steps " +
                                 std::to_string(m));
    const hurstqv::GridDesign design = hurstqv::GridDesign::from_counts(n, m / n);
    const int method = id == hurstqv::EstimatorId::h1   ? 1
                       : id == hurstqv::EstimatorId::h2 ? 2
                       : id == hurstqv::EstimatorId::h3 ? 3
                                                        : 4;
    est = hurstqv::estimate_localized(path, design, method, a.level);
  }
  std::cout << estimate_to_json(est).dump(2) << '\n';
}

void run_variance(const VarianceArgs& a) {
  const hurstqv::VarianceConstants vc = hurstqv::variance_constants(a.hurst, a.truncation);
  const nlohmann::json j{{"hurst", vc.hurst},
                         {"sigma2", vc.sigma2},
                         {"sigma1_2", vc.sigma1_2},
                         {"sigma2_2", vc.sigma2_2},
                         {"sigma_star2", vc.sigma_star2},
                         {"sigma_H2", vc.sigma_H2},
                         {"truncation_L", vc.truncation_L},
                         {"tail_bound", vc.tail_bound}};
  std::cout << j.dump(2) << '\n';
}

void run_experiment_cmd(const ExperimentArgs& a) {
  std::ifstream is(a.config_path);
  if (!is) throw hurstqv::IoError("cannot open config file '" + a.config_path + "'");
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw hurstqv::ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  const hurstqv::ExperimentConfig config = hurstqv::config_from_json(j);
  if (config.output_dir.empty())
    throw hurstqv::ConfigError("config: output_dir is required for the experiment subcommand");
  const hurstqv::ExperimentReport report = hurstqv::run_experiment(config, a.threads);
  hurstqv::write_report(report, config.output_dir);
  std::cout << "wrote " << config.output_dir << "/summary.csv, summary.json, raw.csv\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hurst index estimation for SDEs driven by fractional Brownian motion"};
  app.require_subcommand(1);
  app.footer("Diagnostics: set HURSTQV_LOG=info|debug for progress messages on standard error.");

  GenFbmArgs gen;
  CLI::App* cmd_gen = app.add_subcommand("gen-fbm", "Generate a fractional Brownian motion path");
  cmd_gen->add_option("--m", gen.m, "Number of grid steps (path has m+1 points)")->required();
  cmd_gen->add_option("--T", gen.horizon, "Time horizon")->capture_default_str();
  cmd_gen->add_option("--H", gen.hurst, "Hurst index in (0,1)")->required();
  cmd_gen->add_option("--seed", gen.seed, "RNG seed")->capture_default_str();
  cmd_gen->add_option("--out", gen.out, "Output CSV file (header j,t,x)")->required();
  cmd_gen->callback([&gen] { run_gen_fbm(gen); });

  SimulateArgs sim;
  CLI::App* cmd_sim = app.add_subcommand("simulate", "Simulate the SDE via the Milstein scheme");
  auto* proc_opt = cmd_sim->add_option("--process", sim.process, "Registered process (I or II)")
                       ->check(CLI::IsMember({"I", "II"}));
  auto* f0o = cmd_sim->add_option("--f0", sim.f0, "Custom affine drift: constant term");
  auto* f1o = cmd_sim->add_option("--f1", sim.f1, "Custom affine drift: linear term");
  auto* g0o = cmd_sim->add_option("--g0", sim.g0, "Custom affine diffusion: constant term");
  auto* g1o = cmd_sim->add_option("--g1", sim.g1, "Custom affine diffusion: linear term");
  auto* x0o = cmd_sim->add_option("--x0", sim.x0, "Custom initial value")->capture_default_str();
  for (auto* o : {f0o, f1o, g0o, g1o, x0o}) proc_opt->excludes(o);
  cmd_sim->add_option("--m", sim.m, "Number of grid steps")->required();
  cmd_sim->add_option("--T", sim.horizon, "Time horizon")->capture_default_str();
  cmd_sim->add_option("--H", sim.hurst, "Hurst index in (1/2,1)")->required();
  cmd_sim->add_option("--seed", sim.seed, "RNG seed")->capture_default_str();
  cmd_sim->add_option("--out", sim.out, "Output CSV file (header j,t,x,b)")->required();
  cmd_sim->callback([&sim] { run_simulate(sim); });

  EstimateArgs est;
  CLI::App* cmd_est = app.add_subcommand("estimate", "Estimate H from an observed path CSV");
  cmd_est->add_option("--in", est.in, "Input CSV with header j,t,x")->required();
  cmd_est->add_option("--method", est.method, "Estimator: known_g or h1..h4")
      ->required()
      ->check(CLI::IsMember({"known_g", "h1", "h2", "h3", "h4"}));
  cmd_est->add_option("--g", est.g_name, "Known diffusion by registry name (I or II)")
      ->check(CLI::IsMember({"I", "II"}));
  auto* eg0 = cmd_est->add_option("--g0", est.g0, "Known affine diffusion: constant term");
  auto* eg1 = cmd_est->add_option("--g1", est.g1, "Known affine diffusion: linear term");
  cmd_est->add_option("--n", est.n, "Outer grid count (defaults to sqrt of the step count)");
  cmd_est->add_option("--level", est.level, "Confidence level")->capture_default_str();
  cmd_est->callback([&est, eg0, eg1] {
    est.custom_g = eg0->count() > 0 || eg1->count() > 0;
    run_estimate(est);
  });

  VarianceArgs var;
  CLI::App* cmd_var = app.add_subcommand("variance", "Print asymptotic variance constants");
  cmd_var->add_option("--H", var.hurst, "Hurst index in (1/2,1)")->required();
  cmd_var->add_option("--L", var.truncation, "Series truncation length")->capture_default_str();
  cmd_var->callback([&var] { run_variance(var); });

  ExperimentArgs exp;
  CLI::App* cmd_exp = app.add_subcommand("experiment", "Run a replicated simulation study");
  cmd_exp->add_option("--config", exp.config_path, "JSON experiment config")->required();
  cmd_exp->add_option("--threads", exp.threads,
                      "Worker threads (0 = available parallelism)")
      ->capture_default_str();
  cmd_exp->callback([&exp] { run_experiment_cmd(exp); });

  try {
    app.parse(argc, argv);
    return 0;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: usage: " << e.what() << '\n';
    return 2;
  } catch (const hurstqv::Error& e) {
    std::cerr << "error: " << e.code() << ": " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << '\n';
    return 1;
  }
}
