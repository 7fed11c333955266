#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "llb/error.hpp"
#include "llb/mesh.hpp"
#include "llb/model.hpp"

using namespace llb;

TEST_CASE("initial data presets") {
  const InitialDataSpec bubble{InitialDataSpec::Preset::bubble, {}};
  CHECK(eval_initial(bubble, {0.0, 0.0}) == Vec3{0.0, 0.0, 1.0});
  const Vec3 edge = eval_initial(bubble, {0.5, 0.0});
  CHECK(edge == Vec3{0.0, 0.0, -1.0});
  const Vec3 rim = eval_initial(bubble, {0.0, -0.5});
  CHECK(rim == Vec3{0.0, 0.0, -1.0});

  const InitialDataSpec vortex{InitialDataSpec::Preset::vortex, {}};
  CHECK(eval_initial(vortex, {0.5, 0.0}) == Vec3{0.0, 0.5, 0.0});
  const InitialDataSpec lifted{InitialDataSpec::Preset::vortex_lifted, {}};
  CHECK(eval_initial(lifted, {0.5, 0.0}) == Vec3{0.0, 0.5, 0.01});
  const InitialDataSpec constant{InitialDataSpec::Preset::custom_constant, {1.0, -2.0, 0.5}};
  CHECK(eval_initial(constant, {0.1, 0.2}) == Vec3{1.0, -2.0, 0.5});
}

TEST_CASE("bubble is finite, continuous and unit at the centre") {
  const InitialDataSpec bubble{InitialDataSpec::Preset::bubble, {}};
  CHECK(norm(eval_initial(bubble, {0.0, 0.0})) == 1.0);
  const int n = 256;
  double max_jump = 0.0;
  Vec3 prev{};
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      const Vec2 x{-0.5 + static_cast<double>(i) / n, -0.5 + static_cast<double>(j) / n};
      const Vec3 v = eval_initial(bubble, x);
      for (double c : v) REQUIRE(std::isfinite(c));
      if (i > 0) max_jump = std::max(max_jump, norm(v - prev));
      prev = v;
    }
  }
  // Neighbouring samples 1/256 apart differ by a bounded multiple of the spacing.
  CHECK(max_jump < 0.2);
}

TEST_CASE("bubble Jacobian matches finite differences") {
  const InitialDataSpec bubble{InitialDataSpec::Preset::bubble, {}};
  const double h = 1e-6;
  for (const Vec2 x : {Vec2{0.1, 0.05}, Vec2{-0.2, 0.3}, Vec2{0.35, -0.1}}) {
    const auto j = eval_initial_jacobian(bubble, x);
    for (int d = 0; d < 2; ++d) {
      Vec2 xp = x;
      Vec2 xm = x;
      xp[d] += h;
      xm[d] -= h;
      const Vec3 fd = (1.0 / (2.0 * h)) * (eval_initial(bubble, xp) - eval_initial(bubble, xm));
      for (int c = 0; c < 3; ++c) CHECK(j[c][d] == doctest::Approx(fd[c]).epsilon(1e-6));
    }
  }
}

TEST_CASE("current densities") {
  CHECK(eval_current(CurrentField::constant({1e4, 0.0}), {0.3, -0.1}) == Vec2{1e4, 0.0});
  CHECK(eval_current(CurrentField::zero(), {0.3, -0.1}) == Vec2{0.0, 0.0});
  CHECK(eval_current(CurrentField::bump(1.0), {0.0, 0.0}) == Vec2{0.0625, 0.0});
  CHECK(CurrentField::bump(2.0).sup_norm() == 0.125);
  CHECK(CurrentField::zero().is_zero());
  CHECK_FALSE(CurrentField::bump(1.0).is_zero());
}

TEST_CASE("boundary compatibility") {
  const Mesh mesh = build_structured(8);
  CHECK(check_boundary_compat(CurrentField::zero(), mesh).compatible);
  const auto constant = check_boundary_compat(CurrentField::constant({1e4, 0.0}), mesh);
  CHECK_FALSE(constant.compatible);
  CHECK(constant.max_normal_component == 1e4);
  CHECK(constant.message.find("current density violates nu·n=0 on boundary") != std::string::npos);
  CHECK(check_boundary_compat(CurrentField::bump(3.0), mesh).compatible);
  CHECK_FALSE(check_boundary_compat(CurrentField::constant({0.0, 1e4}), mesh).compatible);
}

TEST_CASE("decay envelopes") {
  LlbParams p;
  const auto e0 = decay_envelopes(p, 0.0, 0.7, 3.0);
  CHECK(e0.linf_bound == 0.7);
  CHECK(e0.energy_bound == 3.0);
  const auto e1 = decay_envelopes(p, 1.0, 2.0, 1.0);
  CHECK(e1.linf_bound == doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-15));
  p.alpha = 0.5;
  const auto e2 = decay_envelopes(p, 2.0, 1.0, 4.0);
  CHECK(e2.energy_bound == doctest::Approx(4.0 * std::exp(-2.0)).epsilon(1e-15));
}

TEST_CASE("L-infinity growth bound") {
  LlbParams p;
  p.beta1 = 0.0;
  CHECK(linf_growth_bound(p, 1e4, 1.3) == 1.3);
  p.beta1 = 0.1;
  p.alpha = 1e5;
  CHECK(linf_growth_bound(p, 1e4, 1.0) == doctest::Approx(4.1623).epsilon(1e-4));
  double prev = linf_growth_bound(p, 1e4, 1.0);
  for (double a : {1e6, 1e8, 1e12, 1e20}) {
    p.alpha = a;
    const double b = linf_growth_bound(p, 1e4, 1.0);
    CHECK(b < prev);
    CHECK(b > 1.0);
    prev = b;
  }
  CHECK(prev - 1.0 < 1e-5);
}

TEST_CASE("parameter validation") {
  LlbParams p;
  CHECK_NOTHROW(validated(p));
  for (double LlbParams::*field : {&LlbParams::alpha, &LlbParams::sigma, &LlbParams::kappa, &LlbParams::mu}) {
    LlbParams q = p;
    q.*field = 0.0;
    CHECK_THROWS_AS(validated(q), ConfigError);
  }
  LlbParams neg = p;
  neg.lambda = -1e-3;
  CHECK_THROWS_AS(validated(neg), ConfigError);

  LlbParams bad_axis = p;
  bad_axis.e = {0.0, 0.0, 1.1};
  CHECK_THROWS_AS(validated(bad_axis), ConfigError);

  LlbParams near_axis = p;
  near_axis.e = {0.0, 0.0, 1.0 + 5e-9};
  std::vector<std::string> warnings;
  const LlbParams fixed = validated(near_axis, &warnings);
  CHECK(warnings.size() == 1);
  CHECK(std::abs(norm(fixed.e) - 1.0) <= 1e-15);
}

TEST_CASE("experiment presets") {
  const auto s1 = experiment_preset("sim1");
  REQUIRE(s1);
  CHECK(s1->params == LlbParams{2.2e5, 1.0e5, 0.1, -0.01, 1.3e-6, 1.0, 1.0e-6, 1.0e-3, {0.0, 1.0, 0.0}});
  CHECK(s1->current == CurrentField::constant({1e4, 0.0}));
  CHECK(s1->initial.preset == InitialDataSpec::Preset::bubble);
  CHECK(s1->k == 1e-6);
  CHECK(s1->final_time == 2e-3);

  const auto s2 = experiment_preset("sim2");
  REQUIRE(s2);
  CHECK(s2->params == s1->params);
  CHECK(s2->current == CurrentField::constant({2e6, 0.0}));
  CHECK(s2->final_time == 5e-5);

  const auto s3 = experiment_preset("sim3");
  REQUIRE(s3);
  CHECK(s3->params == LlbParams{2.3e5, 2.0e5, 0.2, 0.0, 1.0e-6, 2.0, 2.0e-6, 0.01, {0.0, 0.0, 1.0}});
  CHECK(s3->current == CurrentField::constant({0.0, 1e4}));
  CHECK(s3->initial.preset == InitialDataSpec::Preset::vortex);
  CHECK(s3->final_time == 5e-3);

  const auto s4 = experiment_preset("sim4");
  REQUIRE(s4);
  CHECK(s4->params.gamma == 2.5e12);
  CHECK(s4->params.alpha == 0.2);
  CHECK(s4->params.sigma == 1.0e-10);
  CHECK(s4->params.kappa == 0.1);
  CHECK(s4->params.mu == 1.0e-7);
  CHECK(s4->params.lambda == 0.0);
  CHECK(s4->current.is_zero());
  CHECK(s4->initial.preset == InitialDataSpec::Preset::vortex_lifted);
  CHECK(s4->k == 1e-5);

  CHECK_FALSE(experiment_preset("sim5"));
}
