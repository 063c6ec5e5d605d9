#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "cno/errors.hpp"
#include "cno/model.hpp"
#include "cno/rng.hpp"
#include "cno/sampler.hpp"

using namespace cno;

namespace {

GaussianMixture single_gaussian(std::vector<double> mu, double scale) {
  GaussianMixture m;
  m.dim = static_cast<int>(mu.size());
  m.means = {std::move(mu)};
  m.scales = {scale};
  m.weights = {1.0};
  m.conditions["only"] = {0};
  m.validate();
  return m;
}

}  // namespace

TEST_CASE("near point mass pins the denoised estimate to the mean") {
  const auto sched = build_schedule(100, 1e-3, 0.05, ScheduleKind::linear);
  const auto m = single_gaussian({0.0, 0.0, 0.0}, 1e-9);
  Rng rng(5);
  std::vector<double> z(3), eps(3), zhat(3);
  for (int t : {1, 17, 60, 100}) {
    rng.fill_gaussian(z);
    epsilon(m, z, t, sched, std::nullopt, eps);
    tweedie(z, t, sched, eps, zhat);
    for (double v : zhat) CHECK(std::abs(v) < 1e-6);
  }
}

TEST_CASE("single gaussian matches the closed-form posterior mean") {
  // Independent oracle: for data N(mu, s0^2 I) the posterior mean of z0 given
  // z_t is mu + sqrt(abar) s0^2 / (abar s0^2 + 1 - abar) * (z_t - sqrt(abar) mu).
  const auto sched = build_schedule(1000, 1e-4, 0.02, ScheduleKind::linear);
  const double s0 = 0.8;
  const std::vector<double> mu = {1.5, -0.5, 0.3};
  const auto m = single_gaussian(mu, s0);
  Rng rng(7);
  std::vector<double> z(3), eps(3), zhat(3);
  for (int probe = 0; probe < 10; ++probe) {
    const int t = 1 + static_cast<int>(rng.next_u64() % 1000);
    rng.fill_gaussian(z);
    for (double& v : z) v *= 2.0;
    epsilon(m, z, t, sched, std::nullopt, eps);
    tweedie(z, t, sched, eps, zhat);
    const double abar = sched.alpha_bar(t);
    const double gain = std::sqrt(abar) * s0 * s0 / (abar * s0 * s0 + 1.0 - abar);
    for (int i = 0; i < 3; ++i) {
      const double expected =
          mu[static_cast<std::size_t>(i)] +
          gain * (z[static_cast<std::size_t>(i)] -
                  std::sqrt(abar) * mu[static_cast<std::size_t>(i)]);
      CHECK(zhat[static_cast<std::size_t>(i)] == doctest::Approx(expected).epsilon(1e-9));
    }
  }
}

TEST_CASE("noise prediction equals minus scaled score") {
  // Finite differences of log_density as the independent route to the score.
  const auto sched = build_schedule(200, 1e-3, 0.03, ScheduleKind::linear);
  auto m = circle_mixture(4, 2.0, 0.5, 2, 0.0);
  Rng rng(11);
  std::vector<double> z(2), eps(2);
  const double h = 1e-6;
  for (int probe = 0; probe < 8; ++probe) {
    const int t = 1 + static_cast<int>(rng.next_u64() % 200);
    rng.fill_gaussian(z);
    epsilon(m, z, t, sched, std::nullopt, eps);
    const double c = -std::sqrt(1.0 - sched.alpha_bar(t));
    for (int i = 0; i < 2; ++i) {
      auto zp = z, zm = z;
      zp[static_cast<std::size_t>(i)] += h;
      zm[static_cast<std::size_t>(i)] -= h;
      const double fd = (log_density(m, zp, t, sched, {}) -
                         log_density(m, zm, t, sched, {})) / (2.0 * h);
      CHECK(eps[static_cast<std::size_t>(i)] == doctest::Approx(c * fd).epsilon(1e-4));
    }
  }
}

TEST_CASE("guidance blending") {
  const auto sched = build_schedule(100, 1e-3, 0.05, ScheduleKind::linear);
  auto m = circle_mixture(8, 5.0, 0.1, 2, 0.0);
  std::vector<double> z = {0.3, -0.9}, uncond(2), blended(2), cond_only(2);

  SUBCASE("zero scale ignores the condition") {
    m.guidance_scale = 0.0;
    epsilon(m, z, 50, sched, std::nullopt, uncond);
    epsilon(m, z, 50, sched, std::string("half"), blended);
    for (int i = 0; i < 2; ++i)
      CHECK(blended[static_cast<std::size_t>(i)] ==
            doctest::Approx(uncond[static_cast<std::size_t>(i)]).epsilon(1e-15));
  }

  SUBCASE("scale one returns the conditional prediction") {
    m.guidance_scale = 1.0;
    epsilon(m, z, 50, sched, std::string("half"), blended);
    GaussianMixture half = m;
    half.means.resize(4);
    half.scales.resize(4);
    half.weights.assign(4, 0.25);
    half.conditions = {{"all", {0, 1, 2, 3}}};
    half.validate();
    epsilon(half, z, 50, sched, std::nullopt, cond_only);
    for (int i = 0; i < 2; ++i)
      CHECK(blended[static_cast<std::size_t>(i)] ==
            doctest::Approx(cond_only[static_cast<std::size_t>(i)]).epsilon(1e-12));
  }

  SUBCASE("unknown condition") {
    CHECK_THROWS_AS(epsilon(m, z, 50, sched, std::string("nope"), blended),
                    LookupError);
  }
}

TEST_CASE("non-finite input is refused") {
  const auto sched = build_schedule(100, 1e-3, 0.05, ScheduleKind::linear);
  const auto m = single_gaussian({0.0, 0.0}, 0.5);
  std::vector<double> z = {std::numeric_limits<double>::infinity(), 0.0}, eps(2);
  CHECK_THROWS_AS(epsilon(m, z, 50, sched, std::nullopt, eps), NumericError);
}

TEST_CASE("mixture validation") {
  GaussianMixture m;
  m.dim = 2;
  m.means = {{0.0, 0.0}, {1.0, 1.0}};
  m.scales = {1.0, 1.0};
  m.weights = {0.6, 0.3};  // does not sum to 1
  CHECK_THROWS_AS(m.validate(), ParamError);
  m.weights = {0.6, 0.4};
  m.conditions["bad"] = {};
  CHECK_THROWS_AS(m.validate(), ParamError);
  m.conditions["bad"] = {5};
  CHECK_THROWS_AS(m.validate(), ParamError);
  m.conditions["bad"] = {1};
  m.validate();
}

TEST_CASE("embedded circle keeps the planar geometry") {
  const auto flat = circle_mixture(8, 5.0, 0.1, 2, 6.0);
  const auto embedded = circle_mixture(8, 5.0, 0.1, 64, 6.0);
  for (int a = 0; a < 8; ++a) {
    double na = 0.0;
    for (double v : embedded.means[static_cast<std::size_t>(a)]) na += v * v;
    CHECK(std::sqrt(na) == doctest::Approx(5.0).epsilon(1e-12));
    for (int b = 0; b < 8; ++b) {
      double d2f = 0.0, d2e = 0.0;
      for (int i = 0; i < 2; ++i) {
        const double d = flat.means[static_cast<std::size_t>(a)][static_cast<std::size_t>(i)] -
                         flat.means[static_cast<std::size_t>(b)][static_cast<std::size_t>(i)];
        d2f += d * d;
      }
      for (int i = 0; i < 64; ++i) {
        const double d = embedded.means[static_cast<std::size_t>(a)][static_cast<std::size_t>(i)] -
                         embedded.means[static_cast<std::size_t>(b)][static_cast<std::size_t>(i)];
        d2e += d * d;
      }
      CHECK(d2e == doctest::Approx(d2f).epsilon(1e-10));
    }
  }
  CHECK(embedded.conditions.at("half").size() == 4);
}
