#include <catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <vector>

#include "cpgarma/compois.hpp"
#include "cpgarma/sampler.hpp"

using namespace cpgarma;

namespace {

// Total-variation distance between the empirical pmf of n_draws samples and
// the truncated oracle pmf.
double tv_distance(const ComPoissonParams& params, long n_draws, Rng& rng) {
  const Envelope env = build_envelope(params);
  std::map<long, long> counts;
  for (long i = 0; i < n_draws; ++i) {
    ++counts[draw(params, env, rng).value];
  }
  double tv = 0.0;
  const long y_max = counts.rbegin()->first;
  for (long y = 0; y <= y_max + 10; ++y) {
    const double emp = counts.count(y)
                           ? static_cast<double>(counts[y]) / n_draws
                           : 0.0;
    tv += std::abs(emp - pmf_exact(y, params));
  }
  return 0.5 * tv;
}

}  // namespace

TEST_CASE("build_envelope picks the branch by nu") {
  SECTION("Poisson branch with frozen bounding constant") {
    const Envelope env = build_envelope(ComPoissonParams(2.5, 2.0));
    CHECK(env.kind == EnvelopeKind::Poisson);
    CHECK_THAT(env.log_B,
               Catch::Matchers::WithinAbs(std::log(3.125), 1e-12));
  }
  SECTION("nu = 1 gives B = 1") {
    for (double mu : {0.4, 1.0, 2.0, 17.3}) {
      const Envelope env = build_envelope(ComPoissonParams(mu, 1.0));
      CHECK(env.kind == EnvelopeKind::Poisson);
      CHECK(env.log_B == 0.0);
    }
  }
  SECTION("Geometric branch with moment-matched p") {
    const Envelope env = build_envelope(ComPoissonParams(10.0, 0.5));
    CHECK(env.kind == EnvelopeKind::Geometric);
    CHECK_THAT(env.p_geom,
               Catch::Matchers::WithinAbs(0.08695652173913043, 1e-12));
    CHECK(env.lambda == 11);
  }
  SECTION("mu < 1 with nu >= 1: floor(mu) = 0 and B = 1") {
    const Envelope env = build_envelope(ComPoissonParams(0.5, 2.0));
    CHECK(env.kind == EnvelopeKind::Poisson);
    CHECK(env.log_B == 0.0);
  }
}

TEST_CASE("log_accept_prob is in (-inf, 0] and tight where expected") {
  SECTION("identity envelope at nu = 1") {
    const ComPoissonParams params(3.7, 1.0);
    const Envelope env = build_envelope(params);
    for (long y = 0; y <= 100; ++y) {
      CHECK(log_accept_prob(y, params, env) == 0.0);
    }
  }
  SECTION("tight at floor(mu) for nu >= 1") {
    for (double mu : {1.5, 2.5, 10.9}) {
      const ComPoissonParams params(mu, 2.5);
      const Envelope env = build_envelope(params);
      const long mode = static_cast<long>(std::floor(mu));
      CHECK_THAT(log_accept_prob(mode, params, env),
                 Catch::Matchers::WithinAbs(0.0, 1e-12));
    }
  }
  SECTION("tight at lambda for nu < 1") {
    const ComPoissonParams params(10.0, 0.5);
    const Envelope env = build_envelope(params);
    CHECK_THAT(log_accept_prob(env.lambda, params, env),
               Catch::Matchers::WithinAbs(0.0, 1e-12));
  }
}

TEST_CASE("envelope dominates the target mass everywhere") {
  for (double mu : {0.5, 1.33, 2.0, 5.0, 10.0, 30.0}) {
    for (double nu : {0.3, 0.5, 1.0, 1.5, 2.0, 5.0}) {
      const ComPoissonParams params(mu, nu);
      const Envelope env = build_envelope(params);
      for (long y = 0; y <= 1000; ++y) {
        CHECK(log_q(y, params) <=
              env.log_B + log_envelope_mass(y, params, env) + 1e-9);
      }
    }
  }
}

TEST_CASE("draw is deterministic given the seed") {
  const ComPoissonParams params(4.2, 0.7);
  Rng a(123), b(123);
  for (int i = 0; i < 200; ++i) {
    const SampleReport ra = draw(params, a);
    const SampleReport rb = draw(params, b);
    CHECK(ra.value == rb.value);
    CHECK(ra.attempts == rb.attempts);
  }
}

TEST_CASE("draw matches the oracle pmf in total variation") {
  Rng rng(2024);
  CHECK(tv_distance(ComPoissonParams(2.0, 2.0), 100000, rng) < 0.01);
  CHECK(tv_distance(ComPoissonParams(10.0, 0.5), 100000, rng) < 0.01);
  // nu = 1: exact Poisson(5) through the identity envelope.
  CHECK(tv_distance(ComPoissonParams(5.0, 1.0), 100000, rng) < 0.01);
}

TEST_CASE("mean attempts per accepted draw stays small") {
  Rng rng(7);
  for (double mu : {0.5, 2.0, 10.0, 30.0}) {
    for (double nu : {0.3, 1.0, 5.0}) {
      const ComPoissonParams params(mu, nu);
      const Envelope env = build_envelope(params);
      long total_attempts = 0;
      const int n = 2000;
      for (int i = 0; i < n; ++i) {
        total_attempts += draw(params, env, rng).attempts;
      }
      CHECK(static_cast<double>(total_attempts) / n <= 5.0);
    }
  }
}

TEST_CASE("envelope primitive generators") {
  Rng rng(99);
  SECTION("poisson_draw sample mean") {
    const long n = 100000;
    double s = 0.0;
    for (long i = 0; i < n; ++i) s += poisson_draw(5.0, rng);
    const double sd_of_mean = std::sqrt(5.0 / n);
    CHECK(std::abs(s / n - 5.0) < 3.0 * sd_of_mean);
  }
  SECTION("geometric_draw sample mean at p = 0.5") {
    const long n = 100000;
    double s = 0.0;
    for (long i = 0; i < n; ++i) s += geometric_draw(0.5, rng);
    const double sd_of_mean = std::sqrt((0.5 / 0.25) / n);
    CHECK(std::abs(s / n - 1.0) < 3.0 * sd_of_mean);
  }
  SECTION("geometric_draw concentrates at zero as p -> 1") {
    const long n = 100000;
    long zeros = 0;
    for (long i = 0; i < n; ++i) {
      if (geometric_draw(0.999999, rng) == 0) ++zeros;
    }
    CHECK(static_cast<double>(zeros) / n >= 0.999);
  }
}
