#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "llb/config.hpp"
#include "llb/fem.hpp"

namespace llb {

/// One recorded time level.
struct TraceRow {
  std::size_t step = 0;
  double time = 0.0;
  EnergyBreakdown energy{};
  double l2_norm = 0.0;
  double linf_norm = 0.0;
  std::size_t fp_iterations = 0;

  bool operator==(const TraceRow&) const = default;
};

/// Energy and norm history. Times are strictly increasing.
class EnergyTrace {
 public:
  /// Throws StructuralError if row.time does not exceed the last time.
  void append(const TraceRow& row);
  const std::vector<TraceRow>& rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }
  const TraceRow& operator[](std::size_t i) const { return rows_[i]; }

 private:
  std::vector<TraceRow> rows_;
};

/// Energy, norms and iteration count of u at (step, time).
TraceRow make_trace_row(const FeSpace& space, const LlbParams& params, const NodalField& u, std::size_t step,
                        double time, std::size_t fp_iterations = 0);

struct StepperState {
  std::size_t n = 0;
  double t = 0.0;
  NodalField u;
  EnergyTrace trace;
};

struct FixedPointReport {
  std::size_t iterations = 0;
  double final_increment_l2 = 0.0;
  bool converged = false;
  /// L2 norm (Riesz representative) of the nonlinear-scheme residual at the returned field.
  double scheme_residual_l2 = 0.0;
};

/// Solver settings shared by both steppers.
struct StepOptions {
  StepSolver solver = StepSolver::bicgstab;
  SolveOptions linear{1e-10, 20000, Preconditioner::jacobi};
  double fp_tol = 1e-10;
  std::size_t fp_max_iter = 100;
  bool include_anisotropy = true;
};

/// One step of the linear implicit scheme from state.u = u^{n-1}; the
/// current is evaluated at t_n = state.t + k. Throws SolverError when the
/// linear solve does not converge.
NodalField linear_step(const StepperState& state, const FeSpace& space, const LlbParams& params,
                       const CurrentField& current, double k, const StepOptions& options = {});

/// Field used inside the fixed-point iteration. With include_anisotropy the
/// -lambda e (e.u) term is kept so that the fixed point solves the
/// nonlinear scheme exactly.
NodalField compute_iterate_field(const FeSpace& space, const LlbParams& params, const NodalField& u_iter,
                                 bool include_anisotropy = true);

/// Dual residual vector of the nonlinear scheme at u given u_prev:
///   (1/k)<u - u_prev, chi> + gamma <u x H, chi> - alpha <H, chi> - beta1 <(nu.grad) u_prev, chi>,
/// with H the full discrete field including anisotropy.
std::vector<double> nonlinear_scheme_residual(const FeSpace& space, const LlbParams& params,
                                              const CurrentField& current, const NodalField& u_prev,
                                              const NodalField& u, double t, double k);

struct NonlinearStepResult {
  NodalField u;
  FixedPointReport report;
};

/// One step of the nonlinear scheme via the fixed-point iteration. Does not
/// throw when the iteration cap is reached; report.converged is false and
/// u holds the last iterate. Linear-solve failures throw SolverError.
NonlinearStepResult try_nonlinear_step(const StepperState& state, const FeSpace& space, const LlbParams& params,
                                       const CurrentField& current, double k, const StepOptions& options = {});

/// As try_nonlinear_step but throws FixedPointError on non-convergence.
NonlinearStepResult nonlinear_step(const StepperState& state, const FeSpace& space, const LlbParams& params,
                                   const CurrentField& current, double k, const StepOptions& options = {});

struct Snapshot {
  double requested_time = 0.0;
  double time = 0.0;
  std::size_t step = 0;
  NodalField field;
};

enum class RunStatus { completed, aborted };

/// Reason for an aborted run; mirrors the CLI exit paths.
enum class FailureKind { none, linear_solver, fixed_point };

struct SimulationResult {
  std::shared_ptr<const FeSpace> space;
  EnergyTrace trace;
  std::vector<Snapshot> snapshots;
  RunStatus status = RunStatus::completed;
  FailureKind failure = FailureKind::none;
  std::size_t aborted_step = 0;
  std::string reason;
  /// Fixed-point reports per step (nonlinear scheme only).
  std::vector<FixedPointReport> fp_reports;
  /// u^0 .. u^N when RunOptions::store_fields is set.
  std::vector<NodalField> fields;
  NodalField final_field;
  std::vector<std::string> warnings;
};

/// Passed to the observer after every accepted step (and once for u^0 with
/// step = 0 and u_prev = u).
struct StepEvent {
  std::size_t step = 0;
  double time = 0.0;
  const NodalField* u_prev = nullptr;
  const NodalField* u = nullptr;
  const FixedPointReport* report = nullptr;
};

struct RunOptions {
  bool store_fields = false;
  std::function<void(const StepEvent&)> observer;
};

StepOptions step_options(const SimulationConfig& config);

/// Index of the step nearest to time t (ties go to the earlier step),
/// clamped to [0, num_steps].
std::size_t snapshot_step(double t, double k, std::size_t num_steps);

/// Builds the mesh and operators, projects the initial data (L2 projection
/// for the linear scheme, Ritz projection for the nonlinear one) and runs
/// num_steps() steps. Step failures end the run with status aborted and
/// the partial trace kept.
SimulationResult run_simulation(const SimulationConfig& config, const RunOptions& options = {});

}  // namespace llb
