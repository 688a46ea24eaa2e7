// cpgarma command-line tool: fit / predict / simulate / pmf / diagnose.
//
// Exit codes: 0 success, 1 usage or config error, 2 data error,
// 3 numerical failure (truncated-Z non-convergence, sampler defect).

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cpgarma/io.hpp"

namespace {

using namespace cpgarma;

struct CliOptions {
  std::string config_path;
  std::string data_path;
  std::string samples_path;
  std::string out_dir;
  std::string out_file;
  // Flag overrides; negative sentinel means "not given".
  int p = -1;
  int q = -1;
  double c = -1.0;
  long iterations = -1;
  long burn_in = -1;
  long thin = -1;
  long L = -1;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string kernel;
  // simulate
  long sim_n = -1;
  std::vector<double> phi, theta, delta;
  // pmf
  double mu = 0.0, nu = 0.0;
};

RunConfig effective_config(CliOptions& opt) {
  RunConfig cfg;
  if (!opt.config_path.empty()) cfg = load_config(opt.config_path);
  if (opt.p >= 0) cfg.p = opt.p;
  if (opt.q >= 0) cfg.q = opt.q;
  if (opt.c > 0.0) cfg.c = opt.c;
  if (opt.iterations >= 0) cfg.mcmc.iterations = opt.iterations;
  if (opt.burn_in >= 0) cfg.mcmc.burn_in = opt.burn_in;
  if (opt.thin >= 0) cfg.mcmc.thin = opt.thin;
  if (opt.L >= 0) cfg.prediction_L = opt.L;
  if (!opt.kernel.empty()) {
    if (opt.kernel == "exchange") {
      cfg.kernel = Kernel::Exchange;
    } else if (opt.kernel == "direct") {
      cfg.kernel = Kernel::Direct;
    } else {
      throw ConfigError("invalid --kernel (want exchange or direct)");
    }
  }
  if (opt.seed_given) {
    cfg.mcmc.seed = opt.seed;
    cfg.seed_set = true;
  }
  if (!cfg.seed_set) {
    // No explicit seed: generate one and record it in the outputs.
    cfg.mcmc.seed = std::random_device{}();
    cfg.seed_set = true;
  }
  if (!opt.out_dir.empty()) cfg.output_dir = opt.out_dir;
  return cfg;
}

std::string join(const std::string& dir, const std::string& file) {
  return (std::filesystem::path(dir) / file).string();
}

int cmd_fit(CliOptions& opt) {
  RunConfig cfg = effective_config(opt);
  const CountSeries data = load_csv(opt.data_path);
  std::cout << "loaded " << opt.data_path << ": n=" << data.size()
            << " mean=" << sample_mean(data.values)
            << " variance=" << sample_variance(data.values) << "\n";
  const ModelOrder order = cfg.order();
  const ChainResult chain = run_chain(data.values, order, cfg.prior, cfg.mcmc,
                                      cfg.kernel, cfg.policy);
  const ChainSummary summary = summarize(chain, order);
  std::filesystem::create_directories(cfg.output_dir);
  const std::uint64_t h = config_hash(cfg);
  write_samples_csv(join(cfg.output_dir, "samples.csv"), chain, order,
                    cfg.mcmc.seed, h);
  write_summary_json(join(cfg.output_dir, "summary.json"), summary, cfg);
  std::cout << "retained " << chain.samples.size()
            << " samples, acceptance rate " << chain.accept_rate << "\n";
  if (chain.clamp_hits > 0) {
    std::cout << "log-link clamp hit " << chain.clamp_hits << " times\n";
  }
  return 0;
}

int cmd_predict(CliOptions& opt) {
  RunConfig cfg = effective_config(opt);
  const CountSeries data = load_csv(opt.data_path);
  const ModelOrder order = cfg.order();
  const std::vector<PosteriorSample> samples =
      load_samples_csv(opt.samples_path, order);
  Rng rng(cfg.mcmc.seed);
  const PredictivePmf pmf =
      predictive_pmf(data.values, samples, order, cfg.prediction_L, rng);
  const std::vector<MuPathPoint> mu_path =
      fitted_mu_path(data.values, samples, order);
  std::filesystem::create_directories(cfg.output_dir);
  const std::uint64_t h = config_hash(cfg);
  write_predictive_csv(join(cfg.output_dir, "predictive.csv"), pmf,
                       cfg.mcmc.seed, h);
  write_mu_path_csv(join(cfg.output_dir, "mu_path.csv"), mu_path, data.values,
                    cfg.mcmc.seed, h);
  return 0;
}

int cmd_simulate(CliOptions& opt) {
  RunConfig cfg = effective_config(opt);
  const ModelOrder order = cfg.order();
  GarmaCoefficients coeffs = GarmaCoefficients::zeros(order);
  if (!opt.phi.empty()) coeffs.phi = opt.phi;
  if (!opt.theta.empty()) coeffs.theta_ma = opt.theta;
  if (!opt.delta.empty()) coeffs.delta = opt.delta;
  if (static_cast<int>(coeffs.phi.size()) != order.p ||
      static_cast<int>(coeffs.theta_ma.size()) != order.q ||
      static_cast<int>(coeffs.delta.size()) != order.p) {
    throw ConfigError("simulate: coefficient lengths must match (p, q, p)");
  }
  Rng rng(cfg.mcmc.seed);
  std::vector<long> presample(order.r(), 1);
  const CountSeries series = simulate_series(
      coeffs, order, static_cast<std::size_t>(opt.sim_n), presample, rng);
  write_series_csv(opt.out_file, series, cfg.mcmc.seed, config_hash(cfg));
  std::cout << "wrote " << opt.out_file << ": n=" << series.size()
            << " mean=" << sample_mean(series.values)
            << " variance=" << sample_variance(series.values) << "\n";
  return 0;
}

int cmd_pmf(CliOptions& opt) {
  const ComPoissonParams params(opt.mu, opt.nu);
  const TruncationPolicy policy;
  const double lz = log_Z(params, policy);
  std::printf("# COM-Poisson pmf mu=%g nu=%g log_Z=%.17g\n", opt.mu, opt.nu, lz);
  std::printf("y,p\n");
  double cum = 0.0;
  for (long y = 0;; ++y) {
    const double p = std::exp(log_q(y, params) - lz);
    cum += p;
    std::printf("%ld,%.17g\n", y, p);
    if (y > static_cast<long>(params.mu) && cum > 1.0 - policy.rel_tol * 10) {
      break;
    }
    if (y >= policy.max_terms) break;
  }
  return 0;
}

int cmd_diagnose(CliOptions& opt) {
  RunConfig cfg = effective_config(opt);
  const ModelOrder order = cfg.order();
  const std::vector<PosteriorSample> samples =
      load_samples_csv(opt.samples_path, order);
  ChainResult chain;
  chain.samples = samples;
  chain.accept_rate = 0.0;
  chain.clamp_hits = 0;
  const ChainSummary summary =
      summarize(chain, order,
                std::min(40, static_cast<int>(samples.size()) - 1));
  std::filesystem::create_directories(cfg.output_dir);
  const std::uint64_t h = config_hash(cfg);
  write_acf_csv(join(cfg.output_dir, "acf.csv"), summary, cfg.mcmc.seed, h);
  write_trace_csv(join(cfg.output_dir, "trace.csv"), chain, order,
                  cfg.mcmc.seed, h);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian COM-Poisson GARMA estimation for count time series"};
  app.require_subcommand(1);
  CliOptions opt;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "JSON config file");
    sub->add_option("--p", opt.p, "AR order");
    sub->add_option("--q", opt.q, "MA order");
    sub->add_option("--c", opt.c, "zero-replacement constant in (0,1)");
    sub->add_option("--seed", opt.seed, "RNG seed")
        ->each([&](const std::string&) { opt.seed_given = true; });
    sub->add_option("--out", opt.out_dir, "output directory");
  };

  CLI::App* fit = app.add_subcommand("fit", "run an MCMC chain on a count series");
  add_common(fit);
  fit->add_option("--data", opt.data_path, "counts CSV")->required();
  fit->add_option("--iterations", opt.iterations, "MCMC iterations");
  fit->add_option("--burn-in", opt.burn_in, "burn-in iterations");
  fit->add_option("--thin", opt.thin, "thinning interval");
  fit->add_option("--kernel", opt.kernel, "exchange or direct");

  CLI::App* predict =
      app.add_subcommand("predict", "one-step-ahead predictive pmf and mu path");
  add_common(predict);
  predict->add_option("--data", opt.data_path, "counts CSV")->required();
  predict->add_option("--samples", opt.samples_path, "samples.csv from fit")
      ->required();
  predict->add_option("--L", opt.L, "draws per posterior sample");

  CLI::App* simulate =
      app.add_subcommand("simulate", "generate a synthetic count series");
  add_common(simulate);
  simulate->add_option("--n", opt.sim_n, "series length")->required();
  simulate->add_option("--phi", opt.phi, "AR coefficients");
  simulate->add_option("--theta", opt.theta, "MA coefficients");
  simulate->add_option("--delta", opt.delta, "dispersion coefficients");
  simulate->add_option("--out-file", opt.out_file, "output CSV")->required();

  CLI::App* pmf = app.add_subcommand("pmf", "print the exact truncated pmf table");
  pmf->add_option("--mu", opt.mu, "location parameter")->required();
  pmf->add_option("--nu", opt.nu, "dispersion parameter")->required();

  CLI::App* diagnose =
      app.add_subcommand("diagnose", "write ACF and trace CSVs for a chain");
  add_common(diagnose);
  diagnose->add_option("--samples", opt.samples_path, "samples.csv from fit")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (fit->parsed()) return cmd_fit(opt);
    if (predict->parsed()) return cmd_predict(opt);
    if (simulate->parsed()) return cmd_simulate(opt);
    if (pmf->parsed()) return cmd_pmf(opt);
    if (diagnose->parsed()) return cmd_diagnose(opt);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const ZNonConvergence& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const SamplerDefect& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
