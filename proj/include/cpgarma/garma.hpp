#ifndef CPGARMA_GARMA_HPP
#define CPGARMA_GARMA_HPP

// GARMA(p, q) link recursions for the COM-Poisson conditional model:
//   log(mu_t) = sum_j phi_j log(y*_{t-j}) + sum_j theta_j (log y*_{t-j} - log mu_{t-j})
//   log(nu_t) = sum_j delta_j log(y*_{t-j})
// with y* = max(y, c).  Presample values (t <= r = max(p, q)) use mu_t = y*_t
// and nu_t = 1; the partial likelihood runs over t = r+1..n.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "cpgarma/compois.hpp"
#include "cpgarma/sampler.hpp"
#include "cpgarma/series.hpp"

namespace cpgarma {

struct ModelOrder {
  int p;
  int q;
  double c = 0.1;  // zero-replacement constant

  ModelOrder(int p_, int q_, double c_ = 0.1) : p(p_), q(q_), c(c_) {
    if (p < 0 || q < 0 || p + q < 1) {
      throw std::invalid_argument("ModelOrder: need p, q >= 0 and p + q >= 1");
    }
    if (!(c > 0.0 && c < 1.0)) {
      throw std::invalid_argument("ModelOrder: c must lie in (0, 1)");
    }
  }

  int r() const { return p > q ? p : q; }
  // theta = (phi_1..phi_p, theta_1..theta_q, delta_1..delta_p)
  int dim() const { return 2 * p + q; }
};

struct GarmaCoefficients {
  std::vector<double> phi;       // AR-type, length p
  std::vector<double> theta_ma;  // MA-type, length q
  std::vector<double> delta;     // dispersion, length p

  static GarmaCoefficients zeros(const ModelOrder& order) {
    return GarmaCoefficients{std::vector<double>(order.p, 0.0),
                             std::vector<double>(order.q, 0.0),
                             std::vector<double>(order.p, 0.0)};
  }

  static GarmaCoefficients from_flat(const std::vector<double>& v,
                                     const ModelOrder& order) {
    if (static_cast<int>(v.size()) != order.dim()) {
      throw std::invalid_argument("GarmaCoefficients: flat vector length mismatch");
    }
    GarmaCoefficients c;
    c.phi.assign(v.begin(), v.begin() + order.p);
    c.theta_ma.assign(v.begin() + order.p, v.begin() + order.p + order.q);
    c.delta.assign(v.begin() + order.p + order.q, v.end());
    return c;
  }

  std::vector<double> to_flat() const {
    std::vector<double> v;
    v.reserve(phi.size() + theta_ma.size() + delta.size());
    v.insert(v.end(), phi.begin(), phi.end());
    v.insert(v.end(), theta_ma.begin(), theta_ma.end());
    v.insert(v.end(), delta.begin(), delta.end());
    return v;
  }
};

struct LinkState {
  std::vector<double> mu;
  std::vector<double> nu;
};

// Unconstrained coefficients can make the log-link recursions explode during
// MCMC exploration; both log predictors are clamped to +-30 so the state
// stays finite while such proposals keep negligible likelihood.
inline constexpr double kLogLinkClamp = 30.0;

inline double clamp_log_link(double x, long* clamp_hits) {
  if (x > kLogLinkClamp) {
    if (clamp_hits) ++*clamp_hits;
    return kLogLinkClamp;
  }
  if (x < -kLogLinkClamp) {
    if (clamp_hits) ++*clamp_hits;
    return -kLogLinkClamp;
  }
  return x;
}

namespace detail {

// One step of the link recursion at index t (0-based), given histories of
// log y* and log mu.  Valid for t >= r.
inline void link_step(std::size_t t, const std::vector<double>& log_ystar,
                      const std::vector<double>& log_mu,
                      const GarmaCoefficients& coeffs, const ModelOrder& order,
                      long* clamp_hits, double& mu_t, double& nu_t,
                      double& log_mu_t) {
  double lm = 0.0;
  for (int j = 0; j < order.p; ++j) {
    lm += coeffs.phi[j] * log_ystar[t - 1 - j];
  }
  for (int j = 0; j < order.q; ++j) {
    lm += coeffs.theta_ma[j] * (log_ystar[t - 1 - j] - log_mu[t - 1 - j]);
  }
  double ln = 0.0;
  for (int j = 0; j < order.p; ++j) {
    ln += coeffs.delta[j] * log_ystar[t - 1 - j];
  }
  log_mu_t = clamp_log_link(lm, clamp_hits);
  mu_t = std::exp(log_mu_t);
  nu_t = std::exp(clamp_log_link(ln, clamp_hits));
}

}  // namespace detail

inline LinkState link_forward(const std::vector<long>& y,
                              const GarmaCoefficients& coeffs,
                              const ModelOrder& order,
                              long* clamp_hits = nullptr) {
  const std::size_t n = y.size();
  const std::size_t r = static_cast<std::size_t>(order.r());
  if (n < r + 1) {
    throw std::invalid_argument("link_forward: series shorter than r + 1");
  }
  std::vector<double> log_ystar(n), log_mu(n);
  LinkState state{std::vector<double>(n), std::vector<double>(n)};
  for (std::size_t t = 0; t < n; ++t) {
    const double ystar = y[t] > 0 ? static_cast<double>(y[t]) : order.c;
    log_ystar[t] = std::log(ystar);
    if (t < r) {
      state.mu[t] = ystar;
      state.nu[t] = 1.0;
      log_mu[t] = log_ystar[t];
    }
  }
  for (std::size_t t = r; t < n; ++t) {
    detail::link_step(t, log_ystar, log_mu, coeffs, order, clamp_hits,
                      state.mu[t], state.nu[t], log_mu[t]);
  }
  return state;
}

// sum_{t=r+1}^n nu_t (y_t log mu_t - log y_t!); the tractable part of the
// conditional log-likelihood, missing only -sum log Z(mu_t, nu_t).
inline double log_partial_likelihood_unnorm(const std::vector<long>& y,
                                            const LinkState& state,
                                            const ModelOrder& order) {
  double s = 0.0;
  for (std::size_t t = static_cast<std::size_t>(order.r()); t < y.size(); ++t) {
    s += log_q(y[t], ComPoissonParams(state.mu[t], state.nu[t]));
  }
  return s;
}

// Exact (truncated-Z) partial log-likelihood.  Used by the direct-MH
// comparator and tests only.
inline double log_partial_likelihood_exact(const std::vector<long>& y,
                                           const LinkState& state,
                                           const ModelOrder& order,
                                           const TruncationPolicy& policy = {}) {
  double s = log_partial_likelihood_unnorm(y, state, order);
  for (std::size_t t = static_cast<std::size_t>(order.r()); t < y.size(); ++t) {
    s -= log_Z(ComPoissonParams(state.mu[t], state.nu[t]), policy);
  }
  return s;
}

// Generates a series of length n by alternating one link step with one exact
// COM-Poisson draw.  The first r values are copied from the tail of
// presample; the link state of the generated path is returned alongside.
inline CountSeries simulate_series(const GarmaCoefficients& coeffs,
                                   const ModelOrder& order, std::size_t n,
                                   const std::vector<long>& presample, Rng& rng,
                                   LinkState* state_out = nullptr,
                                   long* clamp_hits = nullptr) {
  const std::size_t r = static_cast<std::size_t>(order.r());
  if (presample.size() < r) {
    throw std::invalid_argument("simulate_series: presample shorter than r");
  }
  if (n < r + 1) {
    throw std::invalid_argument("simulate_series: n must exceed r");
  }
  CountSeries out;
  out.values.resize(n);
  std::vector<double> log_ystar(n), log_mu(n);
  LinkState state{std::vector<double>(n), std::vector<double>(n)};
  for (std::size_t t = 0; t < r; ++t) {
    const long yt = presample[presample.size() - r + t];
    out.values[t] = yt;
    const double ystar = yt > 0 ? static_cast<double>(yt) : order.c;
    log_ystar[t] = std::log(ystar);
    state.mu[t] = ystar;
    state.nu[t] = 1.0;
    log_mu[t] = log_ystar[t];
  }
  for (std::size_t t = r; t < n; ++t) {
    detail::link_step(t, log_ystar, log_mu, coeffs, order, clamp_hits,
                      state.mu[t], state.nu[t], log_mu[t]);
    const long yt = draw(ComPoissonParams(state.mu[t], state.nu[t]), rng).value;
    out.values[t] = yt;
    log_ystar[t] = std::log(yt > 0 ? static_cast<double>(yt) : order.c);
  }
  if (state_out) *state_out = std::move(state);
  return out;
}

}  // namespace cpgarma

#endif  // CPGARMA_GARMA_HPP
