#ifndef CPGARMA_PREDICTION_HPP
#define CPGARMA_PREDICTION_HPP

// One-step-ahead posterior predictive pmf: for each posterior draw the link
// recursion is extended one step past the observed series, L values are
// drawn from COM-Poisson(mu_{n+1}, nu_{n+1}), and probabilities are the
// pooled sample proportions.

#include <cmath>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <vector>

#include "cpgarma/diagnostics.hpp"
#include "cpgarma/garma.hpp"
#include "cpgarma/mcmc.hpp"

namespace cpgarma {

struct PredictivePmf {
  std::map<long, double> probs;
  long draws_per_sample;     // L
  std::size_t n_posterior;   // N
};

// (mu_{n+1}, nu_{n+1}) given the observed series and one coefficient vector.
inline ComPoissonParams link_one_step_ahead(const std::vector<long>& y,
                                            const GarmaCoefficients& coeffs,
                                            const ModelOrder& order) {
  const std::size_t n = y.size();
  const LinkState state = link_forward(y, coeffs, order);
  double lm = 0.0, ln = 0.0;
  for (int j = 0; j < order.p; ++j) {
    const long yl = y[n - 1 - j];
    const double log_ystar = std::log(yl > 0 ? static_cast<double>(yl) : order.c);
    lm += coeffs.phi[j] * log_ystar;
    ln += coeffs.delta[j] * log_ystar;
  }
  for (int j = 0; j < order.q; ++j) {
    const long yl = y[n - 1 - j];
    const double log_ystar = std::log(yl > 0 ? static_cast<double>(yl) : order.c);
    lm += coeffs.theta_ma[j] * (log_ystar - std::log(state.mu[n - 1 - j]));
  }
  return ComPoissonParams(std::exp(clamp_log_link(lm, nullptr)),
                          std::exp(clamp_log_link(ln, nullptr)));
}

inline PredictivePmf predictive_pmf(const std::vector<long>& y,
                                    const std::vector<PosteriorSample>& samples,
                                    const ModelOrder& order, long L, Rng& rng) {
  if (samples.empty() || L < 1) {
    throw std::invalid_argument("predictive_pmf: need samples and L >= 1");
  }
  std::map<long, long> counts;
  for (const PosteriorSample& s : samples) {
    const ComPoissonParams params = link_one_step_ahead(y, s.coeffs, order);
    const Envelope env = build_envelope(params);
    for (long l = 0; l < L; ++l) {
      ++counts[draw(params, env, rng).value];
    }
  }
  PredictivePmf pmf;
  pmf.draws_per_sample = L;
  pmf.n_posterior = samples.size();
  const double total = static_cast<double>(samples.size()) * static_cast<double>(L);
  for (const auto& [k, c] : counts) {
    pmf.probs[k] = static_cast<double>(c) / total;
  }
  return pmf;
}

struct MuPathPoint {
  std::size_t t;  // 1-based time index
  double mean;
  double lower;   // 2.5% quantile
  double upper;   // 97.5% quantile
};

// Posterior mean and central 95% band of mu_t for t = r+1..n.
inline std::vector<MuPathPoint> fitted_mu_path(
    const std::vector<long>& y, const std::vector<PosteriorSample>& samples,
    const ModelOrder& order) {
  if (samples.empty()) {
    throw std::invalid_argument("fitted_mu_path: empty sample set");
  }
  const std::size_t n = y.size();
  const std::size_t r = static_cast<std::size_t>(order.r());
  std::vector<std::vector<double>> mu_by_t(n - r);
  for (auto& v : mu_by_t) v.reserve(samples.size());
  for (const PosteriorSample& s : samples) {
    const LinkState state = link_forward(y, s.coeffs, order);
    for (std::size_t t = r; t < n; ++t) {
      mu_by_t[t - r].push_back(state.mu[t]);
    }
  }
  std::vector<MuPathPoint> path;
  path.reserve(n - r);
  for (std::size_t t = r; t < n; ++t) {
    const std::vector<double>& v = mu_by_t[t - r];
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    path.push_back(MuPathPoint{t + 1, mean, quantile(v, 0.025), quantile(v, 0.975)});
  }
  return path;
}

}  // namespace cpgarma

#endif  // CPGARMA_PREDICTION_HPP
