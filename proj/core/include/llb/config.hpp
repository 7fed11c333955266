#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "llb/linalg.hpp"
#include "llb/mesh.hpp"
#include "llb/model.hpp"

namespace llb {

enum class Scheme { linear, nonlinear };

/// Solver for the per-step linear systems: preconditioned BiCGStab, or a
/// direct banded LU for systems the iterative solver cannot handle.
enum class StepSolver { bicgstab, banded_lu };

std::string_view to_string(Scheme scheme);
std::string_view to_string(Preconditioner precond);
std::string_view to_string(StepSolver solver);

/// Everything needed to run one simulation. Produced by parse_config or
/// built directly in code; call validate() before use.
struct SimulationConfig {
  /// Name of the preset the config was expanded from, empty if none.
  std::string preset;
  Scheme scheme = Scheme::linear;
  std::size_t mesh_divisions = 16;
  Rect bounds{};
  LlbParams params{};
  CurrentField current{};
  InitialDataSpec initial{};
  double k = 1e-3;
  double final_time = 0.0;
  std::vector<double> snapshot_times;

  /// Relative tolerance of the mass solves inside Lap_h and P_h.
  double mass_tol = 1e-12;
  /// Relative tolerance of the per-step linear solves.
  double step_tol = 1e-10;
  std::size_t step_max_iter = 20000;
  Preconditioner step_precond = Preconditioner::jacobi;
  StepSolver step_solver = StepSolver::bicgstab;
  /// Absolute L2 tolerance on the fixed-point increment.
  double fp_tol = 1e-10;
  std::size_t fp_max_iter = 100;

  bool include_anisotropy_in_iterate = true;
  bool lumped_mass = false;
  bool validate_current_boundary = true;

  std::string out_dir;

  /// Number of time steps, floor(T / k) with a relative guard of 1e-12 so
  /// that T = N k represented inexactly still yields N steps.
  std::size_t num_steps() const;

  bool operator==(const SimulationConfig&) const = default;
};

/// Checks the config invariants (k > 0, T >= 0, m >= 1, positive
/// tolerances, beta2 = 0 for the nonlinear scheme) and the parameter
/// invariants. Normalises e. Throws ConfigError naming the offending key.
SimulationConfig validate(SimulationConfig config, std::vector<std::string>* warnings = nullptr);

/// Parses a JSON document into a validated config. Either "preset" or a
/// full "params" block is required; other keys override preset values.
/// Unknown keys are rejected.
SimulationConfig parse_config(std::string_view json_text, std::vector<std::string>* warnings = nullptr);

/// Fully resolved config as JSON; parse_config(to_json(c)) == c.
std::string to_json(const SimulationConfig& config);

/// Reads and parses a config file. Throws IoError if it cannot be read.
SimulationConfig load_config(const std::string& path, std::vector<std::string>* warnings = nullptr);

}  // namespace llb
