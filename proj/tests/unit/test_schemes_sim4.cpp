// Reference cases for the sim4 preset. The fixed-point iteration does not
// contract for this preset, so these cases are expected to fail; they sit
// in their own executable to keep the other scheme tests meaningful.
#include <string>

#include "doctest.h"
#include "llb/harness.hpp"
#include "llb/schemes.hpp"

using namespace llb;

namespace {

SimulationConfig sim4(std::size_t m, std::size_t steps) {
  SimulationConfig c = parse_config(R"({"preset":"sim4","scheme":"nonlinear"})");
  c.mesh_divisions = m;
  c.final_time = static_cast<double>(steps) * c.k;
  // Direct inner solves, so any failure is the fixed-point iteration itself.
  c.step_solver = StepSolver::banded_lu;
  return c;
}

}  // namespace

TEST_CASE("one step converges quickly with a small scheme residual") {
  const SimulationConfig c = sim4(16, 1);
  const FeSpace space(build_structured(16));
  StepperState s;
  s.u = ritz_project(space, initial_function(c.initial));
  const auto r = try_nonlinear_step(s, space, c.params, c.current, c.k, step_options(c));
  MESSAGE("iterations " << r.report.iterations << ", increment " << r.report.final_increment_l2 << ", residual "
                        << r.report.scheme_residual_l2);
  CHECK(r.report.converged);
  CHECK(r.report.iterations <= 20);
  CHECK(r.report.scheme_residual_l2 <= 1e-8);
}

TEST_CASE("fifty steps give a strictly decreasing energy trace") {
  const SimulationResult run = run_simulation(sim4(16, 50));
  if (run.status == RunStatus::aborted) MESSAGE(run.reason);
  REQUIRE(run.trace.size() == 51);
  for (std::size_t n = 1; n < run.trace.size(); ++n) {
    CHECK(run.trace[n].energy.total < run.trace[n - 1].energy.total);
  }
}

TEST_CASE("one hundred steps show no dissipation violations") {
  const SimulationResult run = run_simulation(sim4(16, 100));
  if (run.status == RunStatus::aborted) MESSAGE(run.reason);
  CHECK(run.status == RunStatus::completed);
  CHECK(run.trace.size() == 101);
  CHECK(dissipation_check(run.trace, dissipation_tolerance(run.trace)).violations == 0);
}
