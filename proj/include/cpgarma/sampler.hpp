#ifndef CPGARMA_SAMPLER_HPP
#define CPGARMA_SAMPLER_HPP

// Exact rejection sampling from COM-Poisson(mu, nu) without evaluating Z.
// A Poisson(mu) envelope dominates when nu >= 1 and a Geometric(p) envelope
// when nu < 1; both bounding constants are available in closed form.

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

#include "cpgarma/compois.hpp"

namespace cpgarma {

using Rng = std::mt19937_64;

enum class EnvelopeKind { Poisson, Geometric };

struct Envelope {
  EnvelopeKind kind;
  double p_geom = 0.0;  // Geometric only
  long lambda = 0;      // Geometric only: argmax of q/q_g
  double log_B;         // log bounding constant
};

struct SampleReport {
  long value;
  long attempts;
};

struct SamplerDefect : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr long kMaxRejectionAttempts = 10'000'000;

// nu == 1 routes to the Poisson branch, where B = 1 and acceptance is certain.
inline Envelope build_envelope(const ComPoissonParams& params) {
  const double logmu = std::log(params.mu);
  if (params.nu >= 1.0) {
    const double m = std::floor(params.mu);
    const double log_B = (params.nu - 1.0) * (m * logmu - std::lgamma(m + 1.0));
    return Envelope{EnvelopeKind::Poisson, 0.0, 0, log_B};
  }
  const double p = 2.0 * params.nu / (2.0 * params.mu * params.nu + 1.0 + params.nu);
  const long lambda = static_cast<long>(
      std::floor(params.mu / std::pow(1.0 - p, 1.0 / params.nu)));
  const double log_B = params.nu * (lambda * logmu - std::lgamma(lambda + 1.0)) -
                       lambda * std::log1p(-p) - std::log(p);
  return Envelope{EnvelopeKind::Geometric, p, lambda, log_B};
}

// Unnormalized envelope log-mass: mu^y/y! (Poisson) or (1-p)^y p (Geometric).
inline double log_envelope_mass(long y, const ComPoissonParams& params,
                                const Envelope& env) {
  if (env.kind == EnvelopeKind::Poisson) {
    return y * std::log(params.mu) - std::lgamma(y + 1.0);
  }
  return y * std::log1p(-env.p_geom) + std::log(env.p_geom);
}

// log alpha(y*) = log_q(y*) - log_B - log q_g(y*), clamped at 0 against
// floating-point excess; the bound is tight at floor(mu) (resp. lambda).
inline double log_accept_prob(long y_star, const ComPoissonParams& params,
                              const Envelope& env) {
  const double v =
      log_q(y_star, params) - env.log_B - log_envelope_mass(y_star, params, env);
  return v > 0.0 ? 0.0 : v;
}

inline long poisson_draw(double mu, Rng& rng) {
  std::poisson_distribution<long> d(mu);
  return d(rng);
}

// Geometric on {0,1,2,...} with mass (1-p)^y p.
inline long geometric_draw(double p, Rng& rng) {
  std::geometric_distribution<long> d(p);
  return d(rng);
}

inline SampleReport draw(const ComPoissonParams& params, const Envelope& env,
                         Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (long attempt = 1; attempt <= kMaxRejectionAttempts; ++attempt) {
    const long y_star = env.kind == EnvelopeKind::Poisson
                            ? poisson_draw(params.mu, rng)
                            : geometric_draw(env.p_geom, rng);
    double u = unif(rng);
    while (u == 0.0) u = unif(rng);
    if (std::log(u) <= log_accept_prob(y_star, params, env)) {
      return SampleReport{y_star, attempt};
    }
  }
  throw SamplerDefect("rejection sampler exceeded attempt cap (mu=" +
                      std::to_string(params.mu) +
                      ", nu=" + std::to_string(params.nu) + ")");
}

inline SampleReport draw(const ComPoissonParams& params, Rng& rng) {
  return draw(params, build_envelope(params), rng);
}

}  // namespace cpgarma

#endif  // CPGARMA_SAMPLER_HPP
