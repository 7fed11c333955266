#include "llb/schemes.hpp"

#include <cmath>
#include <sstream>

#include "llb/error.hpp"

namespace llb {
namespace {

std::vector<double> solve_step_system(const CsrMatrix& a, const std::vector<double>& rhs, const NodalField& guess,
                                      const StepOptions& options, const std::string& context) {
  if (options.solver == StepSolver::banded_lu) return solve_banded_lu(a, rhs);
  SolveResult res = solve_bicgstab(a, rhs, options.linear, guess.raw());
  if (!res.stats.converged) {
    std::ostringstream os;
    os << context << ": BiCGStab did not converge after " << res.stats.iterations << " iterations (relative residual "
       << res.stats.final_relative_residual << ")";
    throw SolverError(os.str());
  }
  return std::move(res.x);
}

}  // namespace

void EnergyTrace::append(const TraceRow& row) {
  if (!rows_.empty() && !(row.time > rows_.back().time)) {
    throw StructuralError("energy trace times must be strictly increasing");
  }
  rows_.push_back(row);
}

TraceRow make_trace_row(const FeSpace& space, const LlbParams& params, const NodalField& u, std::size_t step,
                        double time, std::size_t fp_iterations) {
  const FieldNorms n = norms(space, u);
  return {step, time, energy(space, params, u), n.l2, n.linf, fp_iterations};
}

NodalField linear_step(const StepperState& state, const FeSpace& space, const LlbParams& params,
                       const CurrentField& current, double k, const StepOptions& options) {
  if (!(k > 0.0)) throw ConfigError("linear_step: time step must be positive");
  require_on_mesh(state.u, space.mesh());
  const double t_n = state.t + k;
  const CsrMatrix a = assemble_linear_scheme_matrix(space, params, state.u, current, t_n, k);
  std::vector<double> rhs = space.apply_mass(state.u);
  const std::vector<double> d = assemble_d_rhs(space, params, state.u, current, t_n);
  for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = rhs[i] / k + d[i];

  NodalField out(space.mesh().id(),
                 solve_step_system(a, rhs, state.u, options, "linear scheme step " + std::to_string(state.n + 1)));
  if (!out.all_finite()) throw SolverError("linear scheme step produced non-finite values");
  return out;
}

NodalField compute_iterate_field(const FeSpace& space, const LlbParams& params, const NodalField& u_iter,
                                 bool include_anisotropy) {
  return compute_discrete_field_H(space, params, u_iter, include_anisotropy);
}

std::vector<double> nonlinear_scheme_residual(const FeSpace& space, const LlbParams& params,
                                              const CurrentField& current, const NodalField& u_prev,
                                              const NodalField& u, double t, double k) {
  const NodalField h = compute_discrete_field_H(space, params, u, true);
  const std::vector<double> mu = space.apply_mass(u - u_prev);
  const std::vector<double> mh = space.apply_mass(h);
  const std::vector<double> d = assemble_d_rhs(space, params, u_prev, current, t);

  const Mesh& mesh = space.mesh();
  const QuadratureRule& rule = space.rule();
  std::vector<double> r(mu.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = mu[i] / k - params.alpha * mh[i] - d[i];
  for (std::size_t tri = 0; tri < mesh.num_triangles(); ++tri) {
    const auto& ids = mesh.triangles()[tri];
    const double area = space.geometry()[tri].area;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Vec3 f = cross(space.eval(u, tri, rule.points[q]), space.eval(h, tri, rule.points[q]));
      for (int i = 0; i < 3; ++i) {
        const double w = params.gamma * area * rule.weights[q] * rule.points[q][i];
        for (int c = 0; c < 3; ++c) r[3 * ids[i] + c] += w * f[c];
      }
    }
  }
  return r;
}

NonlinearStepResult try_nonlinear_step(const StepperState& state, const FeSpace& space, const LlbParams& params,
                                       const CurrentField& current, double k, const StepOptions& options) {
  if (!(k > 0.0)) throw ConfigError("nonlinear_step: time step must be positive");
  if (params.beta2 != 0.0) throw ConfigError("nonlinear_step: the nonlinear scheme requires beta2 = 0");
  require_on_mesh(state.u, space.mesh());
  const double t_n = state.t + k;

  std::vector<double> rhs = space.apply_mass(state.u);
  const std::vector<double> d = assemble_d_rhs(space, params, state.u, current, t_n);
  for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = rhs[i] / k + d[i];

  NonlinearStepResult out{state.u, {}};
  for (std::size_t j = 1; j <= options.fp_max_iter; ++j) {
    const NodalField h = compute_iterate_field(space, params, out.u, options.include_anisotropy);
    const CsrMatrix a = assemble_nonlinear_iterate_matrix(space, params, out.u, h, k);
    NodalField next(space.mesh().id(),
                    solve_step_system(a, rhs, out.u, options,
                                      "nonlinear scheme step " + std::to_string(state.n + 1) +
                                          ", fixed-point iteration " + std::to_string(j)));
    if (!next.all_finite()) throw SolverError("nonlinear scheme step produced non-finite values");
    out.report.iterations = j;
    out.report.final_increment_l2 = norms(space, next - out.u).l2;
    out.u = std::move(next);
    if (out.report.final_increment_l2 < options.fp_tol) {
      out.report.converged = true;
      break;
    }
  }
  out.report.scheme_residual_l2 =
      dual_l2_norm(space, nonlinear_scheme_residual(space, params, current, state.u, out.u, t_n, k));
  return out;
}

NonlinearStepResult nonlinear_step(const StepperState& state, const FeSpace& space, const LlbParams& params,
                                   const CurrentField& current, double k, const StepOptions& options) {
  NonlinearStepResult out = try_nonlinear_step(state, space, params, current, k, options);
  if (!out.report.converged) {
    std::ostringstream os;
    os << "nonlinear scheme step " << state.n + 1 << ": fixed-point iteration did not converge in "
       << out.report.iterations << " iterations (last increment " << out.report.final_increment_l2 << ")";
    throw FixedPointError(os.str());
  }
  return out;
}

StepOptions step_options(const SimulationConfig& c) {
  StepOptions o;
  o.solver = c.step_solver;
  o.linear = {c.step_tol, c.step_max_iter, c.step_precond};
  o.fp_tol = c.fp_tol;
  o.fp_max_iter = c.fp_max_iter;
  o.include_anisotropy = c.include_anisotropy_in_iterate;
  return o;
}

std::size_t snapshot_step(double t, double k, std::size_t num_steps) {
  if (!(t > 0.0)) return 0;
  const double x = t / k;
  const double lo = std::floor(x);
  // Ties (x - lo == 0.5) go to the earlier step.
  std::size_t n = static_cast<std::size_t>(lo) + ((x - lo > 0.5) ? 1 : 0);
  return n > num_steps ? num_steps : n;
}

SimulationResult run_simulation(const SimulationConfig& raw_config, const RunOptions& options) {
  SimulationResult result;
  const SimulationConfig config = validate(raw_config, &result.warnings);
  const auto& p = config.params;
  const double k = config.k;
  const std::size_t steps = config.num_steps();

  auto space = std::make_shared<FeSpace>(build_structured(config.mesh_divisions, config.bounds),
                                         MassSolveOptions{config.mass_tol, 20000, config.lumped_mass});
  result.space = space;
  if (config.validate_current_boundary && !config.current.is_zero()) {
    const BoundaryCompatReport compat = check_boundary_compat(config.current, space->mesh());
    if (!compat.compatible) result.warnings.push_back(compat.message);
  }

  const VectorFunction u0 = initial_function(config.initial);
  StepperState state;
  state.u = config.scheme == Scheme::linear ? l2_project(*space, u0) : ritz_project(*space, u0);

  std::vector<std::vector<double>> snapshot_requests(steps + 1);
  for (double t : config.snapshot_times) snapshot_requests[snapshot_step(t, k, steps)].push_back(t);

  const StepOptions step_opts = step_options(config);
  auto record = [&](const NodalField& u_prev, const FixedPointReport* report) {
    result.trace.append(make_trace_row(*space, p, state.u, state.n, state.t, report ? report->iterations : 0));
    for (double t : snapshot_requests[state.n]) result.snapshots.push_back({t, state.t, state.n, state.u});
    if (options.store_fields) result.fields.push_back(state.u);
    if (options.observer) options.observer({state.n, state.t, &u_prev, &state.u, report});
  };
  record(state.u, nullptr);

  for (std::size_t n = 1; n <= steps; ++n) {
    try {
      NodalField next;
      FixedPointReport report;
      if (config.scheme == Scheme::linear) {
        next = linear_step(state, *space, p, config.current, k, step_opts);
      } else {
        NonlinearStepResult r = try_nonlinear_step(state, *space, p, config.current, k, step_opts);
        result.fp_reports.push_back(r.report);
        if (!r.report.converged) {
          std::ostringstream os;
          os << "nonlinear scheme step " << n << ": fixed-point iteration did not converge in "
             << r.report.iterations << " iterations (last increment " << r.report.final_increment_l2 << ")";
          throw FixedPointError(os.str());
        }
        next = std::move(r.u);
        report = r.report;
      }
      NodalField prev = std::move(state.u);
      state.u = std::move(next);
      state.n = n;
      state.t = static_cast<double>(n) * k;
      record(prev, config.scheme == Scheme::nonlinear ? &report : nullptr);
    } catch (const FixedPointError& e) {
      result.status = RunStatus::aborted;
      result.failure = FailureKind::fixed_point;
      result.aborted_step = n;
      result.reason = e.what();
      break;
    } catch (const SolverError& e) {
      result.status = RunStatus::aborted;
      result.failure = FailureKind::linear_solver;
      result.aborted_step = n;
      result.reason = e.what();
      break;
    }
  }
  result.final_field = state.u;
  return result;
}

}  // namespace llb
