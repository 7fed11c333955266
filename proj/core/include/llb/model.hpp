#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "llb/vec3.hpp"

namespace llb {

class Mesh;

/// Coefficients of the LLB equation above the Curie temperature:
///   du/dt = -gamma u x H + alpha H + beta1 (nu.grad) u + beta2 u x (nu.grad) u,
///   H = sigma Lap u - kappa mu u - kappa |u|^2 u - lambda e (e.u).
struct LlbParams {
  double gamma = 1.0;
  double alpha = 1.0;
  double beta1 = 0.0;
  double beta2 = 0.0;
  double sigma = 1.0;
  double kappa = 1.0;
  double mu = 1.0;
  double lambda = 0.0;
  Vec3 e{0.0, 0.0, 1.0};

  bool operator==(const LlbParams&) const = default;
};

/// Checks the above-Curie invariants (alpha, sigma, kappa, mu > 0, lambda >= 0)
/// and normalises e. Deviations of |e| from one up to 1e-8 are normalised
/// with a warning appended to `warnings`; larger ones throw ConfigError.
LlbParams validated(LlbParams params, std::vector<std::string>* warnings = nullptr);

/// Static current density nu(x, y) in R^2.
struct CurrentField {
  enum class Kind { zero, constant, bump };

  Kind kind = Kind::zero;
  Vec2 vector{0.0, 0.0};
  /// Amplitude A of nu = A ((1/4 - x^2)(1/4 - y^2), 0).
  double amplitude = 0.0;

  static CurrentField zero() { return {}; }
  static CurrentField constant(const Vec2& v) { return {Kind::constant, v, 0.0}; }
  static CurrentField bump(double amplitude) { return {Kind::bump, {0.0, 0.0}, amplitude}; }

  /// The time argument is accepted for forward compatibility; all kinds are static.
  Vec2 eval(const Vec2& point, double t = 0.0) const;
  /// Divergence of nu at a point.
  double divergence(const Vec2& point, double t = 0.0) const;
  /// Upper bound of |nu| over the square [-1/2, 1/2]^2.
  double sup_norm() const;
  bool is_zero() const;

  bool operator==(const CurrentField&) const = default;
};

std::string_view to_string(CurrentField::Kind kind);

struct BoundaryCompatReport {
  bool compatible = true;
  /// max |nu . n| sampled at boundary-edge midpoints.
  double max_normal_component = 0.0;
  std::string message;
};

/// Samples nu . n at every boundary-edge midpoint of the mesh; compatible
/// iff max |nu . n| <= 1e-10 * sup |nu|.
BoundaryCompatReport check_boundary_compat(const CurrentField& current, const Mesh& mesh);

/// Vector-valued function on the plane with an optional Jacobian
/// (row c holds the gradient of component c).
struct VectorFunction {
  std::function<Vec3(const Vec2&)> value;
  std::function<std::array<Vec2, 3>(const Vec2&)> jacobian;
};

struct InitialDataSpec {
  enum class Preset { bubble, vortex, vortex_lifted, custom_constant };

  Preset preset = Preset::bubble;
  /// Used by custom_constant only.
  Vec3 constant{0.0, 0.0, 0.0};

  bool operator==(const InitialDataSpec&) const = default;
};

std::string_view to_string(InitialDataSpec::Preset preset);
std::optional<InitialDataSpec::Preset> parse_initial_preset(std::string_view name);

Vec3 eval_initial(const InitialDataSpec& spec, const Vec2& point);
std::array<Vec2, 3> eval_initial_jacobian(const InitialDataSpec& spec, const Vec2& point);
VectorFunction initial_function(const InitialDataSpec& spec);

Vec2 eval_current(const CurrentField& current, const Vec2& point, double t = 0.0);

struct DecayEnvelopes {
  double linf_bound = 0.0;
  double energy_bound = 0.0;
};

/// Continuous-theory decay for nu = 0: ||u(t)||_inf <= exp(-alpha kappa mu t) ||u0||_inf
/// and E(u(t)) <= exp(-2 alpha kappa mu t) E(u0).
DecayEnvelopes decay_envelopes(const LlbParams& params, double t, double u0_linf, double energy0);

/// Uniform-in-time L-infinity bound ||u0||_inf + beta1 nu_inf / sqrt(alpha).
double linf_growth_bound(const LlbParams& params, double nu_inf, double u0_linf);

/// One of the four named experiment setups.
struct ExperimentPreset {
  std::string name;
  LlbParams params;
  CurrentField current;
  InitialDataSpec initial;
  double k = 0.0;
  double final_time = 0.0;
};

/// "sim1" .. "sim4"; returns nullopt for unknown names.
std::optional<ExperimentPreset> experiment_preset(std::string_view name);

}  // namespace llb

namespace llb {

/// Micromagnetic energy split into its contributions.
struct EnergyBreakdown {
  double exchange = 0.0;
  double internal = 0.0;
  double anisotropy = 0.0;
  double total = 0.0;
  bool operator==(const EnergyBreakdown&) const = default;
};

}  // namespace llb
