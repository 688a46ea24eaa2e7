#ifndef CPGARMA_DIAGNOSTICS_HPP
#define CPGARMA_DIAGNOSTICS_HPP

// Chain summaries: sample autocorrelations, initial-positive-sequence
// effective sample size, and per-coefficient posterior quantiles.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "cpgarma/mcmc.hpp"

namespace cpgarma {

struct ConstantSeriesError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Sample autocorrelation, lags 0..max_lag, denominator n at every lag.
inline std::vector<double> acf(const std::vector<double>& series, int max_lag) {
  const std::size_t n = series.size();
  if (n <= static_cast<std::size_t>(max_lag)) {
    throw std::invalid_argument("acf: series length must exceed max_lag");
  }
  double mean = 0.0;
  for (double x : series) mean += x;
  mean /= static_cast<double>(n);
  double c0 = 0.0;
  for (double x : series) c0 += (x - mean) * (x - mean);
  c0 /= static_cast<double>(n);
  if (c0 == 0.0) {
    throw ConstantSeriesError("acf: series has zero variance");
  }
  std::vector<double> rho(max_lag + 1);
  rho[0] = 1.0;
  for (int k = 1; k <= max_lag; ++k) {
    double ck = 0.0;
    for (std::size_t t = 0; t + k < n; ++t) {
      ck += (series[t] - mean) * (series[t + k] - mean);
    }
    ck /= static_cast<double>(n);
    rho[k] = ck / c0;
  }
  return rho;
}

// n / (1 + 2 sum rho_k), with the sum truncated at the first consecutive
// lag pair whose autocorrelations sum to a non-positive value; clamped to
// [1, n].
inline double ess(const std::vector<double>& series) {
  const std::size_t n = series.size();
  const int max_lag = static_cast<int>(n) - 1;
  const std::vector<double> rho = acf(series, max_lag);
  double tau = 1.0;
  for (int k = 1; k + 1 <= max_lag; k += 2) {
    const double pair = rho[k] + rho[k + 1];
    if (pair <= 0.0) break;
    tau += 2.0 * pair;
  }
  const double e = static_cast<double>(n) / tau;
  return std::clamp(e, 1.0, static_cast<double>(n));
}

// Linear interpolation between order statistics; q in [0, 1].
inline double quantile(std::vector<double> values, double q) {
  if (values.empty()) {
    throw std::invalid_argument("quantile: empty input");
  }
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * q;
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= values.size()) return values.back();
  const double w = h - static_cast<double>(lo);
  return values[lo] * (1.0 - w) + values[lo + 1] * w;
}

struct CoefficientSummary {
  std::string name;
  double mean;
  double sd;
  double q2_5;
  double q50;
  double q97_5;
  double ess;
  std::vector<double> acf;  // lags 0..max_lag
};

struct ChainSummary {
  std::vector<CoefficientSummary> coefficients;
  double accept_rate;
  long clamp_hits;
};

inline std::vector<std::string> coefficient_names(const ModelOrder& order) {
  std::vector<std::string> names;
  for (int j = 1; j <= order.p; ++j) names.push_back("phi" + std::to_string(j));
  for (int j = 1; j <= order.q; ++j) names.push_back("theta" + std::to_string(j));
  for (int j = 1; j <= order.p; ++j) names.push_back("delta" + std::to_string(j));
  return names;
}

inline std::vector<std::vector<double>> coefficient_traces(
    const ChainResult& chain) {
  if (chain.samples.empty()) {
    throw std::invalid_argument("coefficient_traces: empty chain");
  }
  const std::vector<double> first = chain.samples.front().coeffs.to_flat();
  std::vector<std::vector<double>> traces(first.size());
  for (auto& t : traces) t.reserve(chain.samples.size());
  for (const PosteriorSample& s : chain.samples) {
    const std::vector<double> flat = s.coeffs.to_flat();
    for (std::size_t i = 0; i < flat.size(); ++i) traces[i].push_back(flat[i]);
  }
  return traces;
}

inline ChainSummary summarize(const ChainResult& chain, const ModelOrder& order,
                              int max_lag = 40) {
  const auto traces = coefficient_traces(chain);
  const auto names = coefficient_names(order);
  ChainSummary summary;
  summary.accept_rate = chain.accept_rate;
  summary.clamp_hits = chain.clamp_hits;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    const std::vector<double>& x = traces[i];
    CoefficientSummary cs;
    cs.name = names[i];
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    const bool degenerate =
        std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; });
    double var = 0.0;
    if (!degenerate) {
      for (double v : x) var += (v - mean) * (v - mean);
      var = x.size() > 1 ? var / static_cast<double>(x.size() - 1) : 0.0;
    } else {
      mean = x[0];
    }
    cs.mean = mean;
    cs.sd = std::sqrt(var);
    cs.q2_5 = quantile(x, 0.025);
    cs.q50 = quantile(x, 0.5);
    cs.q97_5 = quantile(x, 0.975);
    if (var == 0.0) {
      // Pinned or fully degenerate coefficient.
      cs.ess = static_cast<double>(x.size());
      cs.acf.assign(static_cast<std::size_t>(max_lag) + 1, 0.0);
      cs.acf[0] = 1.0;
    } else {
      cs.ess = ess(x);
      cs.acf = acf(x, std::min<int>(max_lag, static_cast<int>(x.size()) - 1));
    }
    summary.coefficients.push_back(std::move(cs));
  }
  return summary;
}

}  // namespace cpgarma

#endif  // CPGARMA_DIAGNOSTICS_HPP
