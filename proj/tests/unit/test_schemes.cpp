#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "llb/error.hpp"
#include "llb/schemes.hpp"
#include "text_oracles.hpp"

using namespace llb;

namespace {

SimulationConfig unit_config(Scheme scheme, std::size_t m, double k, double t_final) {
  SimulationConfig c;
  c.scheme = scheme;
  c.mesh_divisions = m;
  c.params = LlbParams{};
  c.current = CurrentField::zero();
  c.initial = {InitialDataSpec::Preset::vortex, {}};
  c.k = k;
  c.final_time = t_final;
  return c;
}

StepperState state_of(const NodalField& u) {
  StepperState s;
  s.u = u;
  return s;
}

}  // namespace

TEST_CASE("linear step keeps the zero state") {
  const FeSpace space(build_structured(4));
  const auto sim1 = *experiment_preset("sim1");
  for (const CurrentField& cf : {CurrentField::constant({2e6, -1e5}), CurrentField::bump(3.0)}) {
    const NodalField u = linear_step(state_of(NodalField(space.mesh())), space, sim1.params, cf, 1e-6);
    for (double v : u.raw()) CHECK(v == 0.0);
  }
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(0.1, 3.0);
  for (int trial = 0; trial < 5; ++trial) {
    LlbParams p{d(rng), d(rng), d(rng), d(rng), d(rng), d(rng), d(rng), d(rng), {0.0, 0.6, 0.8}};
    const NodalField u = linear_step(state_of(NodalField(space.mesh())), space, p, CurrentField::bump(d(rng)), d(rng));
    for (double v : u.raw()) CHECK(v == 0.0);
  }
}

TEST_CASE("linear step on a constant field") {
  const FeSpace space(build_structured(4));
  LlbParams p;
  p.gamma = 3.7;
  p.lambda = 1.0;
  p.e = {0.0, 1.0, 0.0};
  const NodalField u0(space.mesh(), Vec3{1.0, 0.0, 0.0});
  StepOptions opt;
  opt.linear.tol = 1e-14;
  const NodalField u1 = linear_step(state_of(u0), space, p, CurrentField::zero(), 0.1, opt);
  for (std::size_t i = 0; i < space.num_nodes(); ++i) CHECK(norm(u1.at(i) - Vec3{1.0 / 1.2, 0.0, 0.0}) <= 1e-10);
}

TEST_CASE("one linear step of the first preset is L2 stable") {
  const auto sim1 = *experiment_preset("sim1");
  const FeSpace space(build_structured(8));
  const NodalField u0 = l2_project(space, initial_function(sim1.initial));
  const NodalField u1 = linear_step(state_of(u0), space, sim1.params, sim1.current, sim1.k);
  CHECK(norms(space, u1).l2 <= 1.001 * norms(space, u0).l2);
}

TEST_CASE("iterate field") {
  const FeSpace space(build_structured(6));
  LlbParams p;
  p.sigma = 2.5;
  p.kappa = 0.7;
  p.mu = 1.5;
  p.lambda = 0.4;
  p.e = {1.0, 0.0, 0.0};
  const NodalField h0 = compute_iterate_field(space, p, NodalField(space.mesh()));
  for (double v : h0.raw()) CHECK(v == 0.0);

  const Vec3 c{0.5, 0.2, -0.4};
  const NodalField uc(space.mesh(), c);
  const NodalField with = compute_iterate_field(space, p, uc, true);
  const NodalField without = compute_iterate_field(space, p, uc, false);
  const Vec3 base = (-p.kappa * p.mu - p.kappa * dot(c, c)) * c;
  const Vec3 aniso = (p.lambda * dot(p.e, c)) * p.e;
  for (std::size_t i = 0; i < space.num_nodes(); ++i) {
    CHECK(norm(without.at(i) - base) <= 1e-10);
    CHECK(norm(with.at(i) - (base - aniso)) <= 1e-10);
    CHECK(norm((without - with).at(i) - aniso) <= 1e-12);
  }
}

TEST_CASE("nonlinear step from zero") {
  const FeSpace space(build_structured(4));
  const auto r = nonlinear_step(state_of(NodalField(space.mesh())), space, LlbParams{}, CurrentField::zero(), 0.01);
  CHECK(r.report.converged);
  CHECK(r.report.iterations == 1);
  for (double v : r.u.raw()) CHECK(v == 0.0);
}

TEST_CASE("nonlinear step on a constant field solves the scalar cubic") {
  const FeSpace space(build_structured(4));
  // gamma |c| / alpha < 1 keeps the iteration contractive for every spatial mode.
  LlbParams p;
  p.gamma = 0.5;
  p.alpha = 1.1;
  p.kappa = 1.3;
  p.mu = 0.4;
  const double k = 0.05;
  const Vec3 c = 1.3 * Vec3{0.6, 0.0, 0.8};
  const auto r = nonlinear_step(state_of(NodalField(space.mesh(), c)), space, p, CurrentField::zero(), k);
  CHECK(r.report.converged);
  const double s = llbtest::cubic_root(k, p.alpha * p.kappa * p.mu, p.alpha * p.kappa, norm(c));
  const Vec3 want = (s / norm(c)) * c;
  for (std::size_t i = 0; i < space.num_nodes(); ++i) CHECK(norm(r.u.at(i) - want) <= 1e-9);
}

TEST_CASE("literal and consistent iterate fields reach different fixed points") {
  const FeSpace space(build_structured(6));
  LlbParams p;
  p.lambda = 2.0;
  p.e = {0.0, 0.0, 1.0};
  const NodalField u0 = ritz_project(space, initial_function({InitialDataSpec::Preset::vortex_lifted, {}}));
  StepOptions consistent;
  StepOptions literal;
  literal.include_anisotropy = false;
  const auto a = nonlinear_step(state_of(u0), space, p, CurrentField::zero(), 0.01, consistent);
  const auto b = nonlinear_step(state_of(u0), space, p, CurrentField::zero(), 0.01, literal);
  CHECK(a.report.converged);
  CHECK(b.report.converged);
  CHECK(a.report.scheme_residual_l2 <= 10.0 * consistent.fp_tol / 0.01);
  CHECK(norms(space, a.u - b.u).l2 > 1e-6);
  // Only the consistent variant solves the scheme.
  CHECK(b.report.scheme_residual_l2 > 100.0 * a.report.scheme_residual_l2);
}

TEST_CASE("fixed-point cap") {
  const FeSpace space(build_structured(4));
  const NodalField u0 = ritz_project(space, initial_function({InitialDataSpec::Preset::vortex, {}}));
  StepOptions opt;
  opt.fp_max_iter = 1;
  const auto r = try_nonlinear_step(state_of(u0), space, LlbParams{}, CurrentField::zero(), 0.1, opt);
  CHECK_FALSE(r.report.converged);
  CHECK(r.report.iterations == 1);
  CHECK_THROWS_AS(nonlinear_step(state_of(u0), space, LlbParams{}, CurrentField::zero(), 0.1, opt), FixedPointError);

  SimulationConfig c = unit_config(Scheme::nonlinear, 4, 0.1, 0.5);
  c.fp_max_iter = 1;
  const SimulationResult run = run_simulation(c);
  CHECK(run.status == RunStatus::aborted);
  CHECK(run.failure == FailureKind::fixed_point);
  CHECK(run.aborted_step == 1);
  CHECK(run.trace.size() == 1);
}

TEST_CASE("energy trace times must increase") {
  EnergyTrace trace;
  TraceRow row;
  row.time = 0.0;
  trace.append(row);
  row.step = 1;
  row.time = 0.1;
  trace.append(row);
  CHECK_THROWS_AS(trace.append(row), StructuralError);
  row.time = 0.05;
  CHECK_THROWS_AS(trace.append(row), StructuralError);
  CHECK(trace.size() == 2);
}

TEST_CASE("snapshot step selection") {
  CHECK(snapshot_step(0.0, 0.1, 10) == 0);
  CHECK(snapshot_step(0.25, 0.1, 10) == 2);
  CHECK(snapshot_step(0.26, 0.1, 10) == 3);
  CHECK(snapshot_step(0.3, 0.1, 10) == 3);
  CHECK(snapshot_step(5.0, 0.1, 10) == 10);
  CHECK(snapshot_step(-1.0, 0.1, 10) == 0);
}

TEST_CASE("run shorter than one step records only the initial row") {
  SimulationConfig c = unit_config(Scheme::linear, 4, 0.1, 0.05);
  const SimulationResult run = run_simulation(c);
  CHECK(run.status == RunStatus::completed);
  REQUIRE(run.trace.size() == 1);
  CHECK(run.trace[0].step == 0);
  CHECK(run.trace[0].time == 0.0);
}

TEST_CASE("initial projections depend on the scheme") {
  const VectorFunction u0 = initial_function({InitialDataSpec::Preset::bubble, {}});
  RunOptions opts;
  opts.store_fields = true;
  SimulationConfig lin = unit_config(Scheme::linear, 6, 0.1, 0.0);
  lin.initial = {InitialDataSpec::Preset::bubble, {}};
  const SimulationResult a = run_simulation(lin, opts);
  const FeSpace space(build_structured(6));
  CHECK(a.fields.at(0).raw() == l2_project(space, u0).raw());
  SimulationConfig nl = lin;
  nl.scheme = Scheme::nonlinear;
  const SimulationResult b = run_simulation(nl, opts);
  CHECK(b.fields.at(0).raw() == ritz_project(space, u0).raw());
}

TEST_CASE("short linear run of the first preset stays bounded") {
  SimulationConfig c;
  const auto sim1 = *experiment_preset("sim1");
  c.preset = "sim1";
  c.params = sim1.params;
  c.current = sim1.current;
  c.initial = sim1.initial;
  c.k = sim1.k;
  c.mesh_divisions = 8;
  c.final_time = 10 * sim1.k;
  c.snapshot_times = {0.0, 5e-6, 10e-6};
  const SimulationResult run = run_simulation(c);
  CHECK(run.status == RunStatus::completed);
  REQUIRE(run.trace.size() == 11);
  for (const auto& row : run.trace.rows()) CHECK(row.l2_norm <= 2.0 * run.trace[0].l2_norm);
  REQUIRE(run.snapshots.size() == 3);
  CHECK(run.snapshots[1].step == 5);
  CHECK(run.snapshots[2].step == 10);
  CHECK(run.snapshots[2].field == run.final_field);
  bool warned = false;
  for (const auto& w : run.warnings) warned = warned || w.find("nu·n=0") != std::string::npos;
  CHECK(warned);
}

TEST_CASE("runs are deterministic") {
  SimulationConfig c = unit_config(Scheme::nonlinear, 6, 0.01, 0.05);
  c.params.lambda = 0.3;
  const SimulationResult a = run_simulation(c);
  const SimulationResult b = run_simulation(c);
  CHECK(a.final_field.raw() == b.final_field.raw());
  CHECK(a.trace.rows() == b.trace.rows());
}

TEST_CASE("nonlinear scheme dissipates energy for every step size") {
  for (double k : {1e-3, 1e-2, 1e-1}) {
    CAPTURE(k);
    SimulationConfig c = unit_config(Scheme::nonlinear, 8, k, 10 * k);
    c.params.lambda = 0.5;
    c.params.e = {0.0, 1.0, 0.0};
    c.initial = {InitialDataSpec::Preset::vortex_lifted, {}};
    const SimulationResult run = run_simulation(c);
    REQUIRE(run.status == RunStatus::completed);
    REQUIRE(run.trace.size() == 11);
    const double slack = 1e-12 * std::max(1.0, run.trace[0].energy.total);
    const FeSpace& space = *run.space;
    (void)space;
    for (std::size_t n = 1; n < run.trace.size(); ++n) {
      CHECK(run.trace[n].energy.total <= run.trace[n - 1].energy.total + slack);
      CHECK(run.trace[n].l2_norm <= run.trace[n - 1].l2_norm + slack);
    }
    for (const auto& rep : run.fp_reports) {
      CHECK(rep.converged);
      CHECK(rep.scheme_residual_l2 <= 10.0 * c.fp_tol / k);
    }
  }
}

TEST_CASE("L4 norm does not increase along the nonlinear scheme") {
  SimulationConfig c = unit_config(Scheme::nonlinear, 8, 1e-2, 0.1);
  RunOptions opts;
  opts.store_fields = true;
  const SimulationResult run = run_simulation(c, opts);
  REQUIRE(run.status == RunStatus::completed);
  double prev = norms(*run.space, run.fields[0]).l4;
  for (std::size_t n = 1; n < run.fields.size(); ++n) {
    const double l4 = norms(*run.space, run.fields[n]).l4;
    CHECK(l4 <= prev * (1.0 + 1e-12));
    prev = l4;
  }
}

TEST_CASE("halving the step does not increase fixed-point iterations") {
  // k sigma / h^2 well below one, where the contraction factor scales with k.
  SimulationConfig c = unit_config(Scheme::nonlinear, 8, 2e-4, 1e-3);
  RunOptions opts;
  opts.store_fields = true;
  const SimulationResult run = run_simulation(c, opts);
  REQUIRE(run.status == RunStatus::completed);
  const FeSpace& space = *run.space;
  const StepOptions so = step_options(c);
  std::size_t total_full = 0;
  std::size_t total_half = 0;
  for (std::size_t n = 0; n < 5; ++n) {
    StepperState s;
    s.n = n;
    s.t = static_cast<double>(n) * c.k;
    s.u = run.fields[n];
    const auto full = try_nonlinear_step(s, space, c.params, c.current, c.k, so);
    const auto half = try_nonlinear_step(s, space, c.params, c.current, 0.5 * c.k, so);
    CHECK(full.report.converged);
    CHECK(half.report.converged);
    CHECK(half.report.iterations <= full.report.iterations);
    total_full += full.report.iterations;
    total_half += half.report.iterations;
  }
  CHECK(total_half < total_full);
}
