#include "llb/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "llb/error.hpp"
#include "llb/mesh.hpp"

namespace llb {

LlbParams validated(LlbParams params, std::vector<std::string>* warnings) {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string("params: ") + what);
  };
  const double values[] = {params.gamma, params.alpha, params.beta1, params.beta2,
                           params.sigma, params.kappa, params.mu,    params.lambda};
  require(std::all_of(std::begin(values), std::end(values), [](double v) { return std::isfinite(v); }),
          "all coefficients must be finite");
  require(params.alpha > 0.0, "alpha must be positive");
  require(params.sigma > 0.0, "sigma must be positive");
  require(params.kappa > 0.0, "kappa must be positive");
  require(params.mu > 0.0, "mu must be positive (above the Curie temperature)");
  require(params.lambda >= 0.0, "lambda must be non-negative");

  const double len = norm(params.e);
  require(std::isfinite(len), "anisotropy axis e must be finite");
  const double deviation = std::abs(len - 1.0);
  if (deviation > 1e-8) {
    std::ostringstream os;
    os << "params.e: anisotropy axis must be a unit vector (|e| = " << len << ")";
    throw ConfigError(os.str());
  }
  if (deviation > 0.0) {
    if (warnings != nullptr) {
      std::ostringstream os;
      os << "anisotropy axis |e| = " << len << " normalised to 1";
      warnings->push_back(os.str());
    }
    params.e = (1.0 / len) * params.e;
  }
  return params;
}

Vec2 CurrentField::eval(const Vec2& p, double /*t*/) const {
  switch (kind) {
    case Kind::zero:
      return {0.0, 0.0};
    case Kind::constant:
      return vector;
    case Kind::bump:
      return {amplitude * (0.25 - p[0] * p[0]) * (0.25 - p[1] * p[1]), 0.0};
  }
  return {0.0, 0.0};
}

double CurrentField::divergence(const Vec2& p, double /*t*/) const {
  if (kind == Kind::bump) return amplitude * (-2.0 * p[0]) * (0.25 - p[1] * p[1]);
  return 0.0;
}

double CurrentField::sup_norm() const {
  switch (kind) {
    case Kind::zero:
      return 0.0;
    case Kind::constant:
      return std::hypot(vector[0], vector[1]);
    case Kind::bump:
      return std::abs(amplitude) / 16.0;
  }
  return 0.0;
}

bool CurrentField::is_zero() const { return sup_norm() == 0.0; }

std::string_view to_string(CurrentField::Kind kind) {
  switch (kind) {
    case CurrentField::Kind::zero:
      return "zero";
    case CurrentField::Kind::constant:
      return "constant";
    case CurrentField::Kind::bump:
      return "bump";
  }
  return "zero";
}

Vec2 eval_current(const CurrentField& current, const Vec2& point, double t) { return current.eval(point, t); }

BoundaryCompatReport check_boundary_compat(const CurrentField& current, const Mesh& mesh) {
  BoundaryCompatReport report;
  const auto& v = mesh.vertices();
  const auto& on_boundary = mesh.boundary_vertex();
  const Rect& box = mesh.bounds();
  double sup = 0.0;
  for (const auto& tri : mesh.triangles()) {
    for (int e = 0; e < 3; ++e) {
      const std::size_t a = tri[e];
      const std::size_t b = tri[(e + 1) % 3];
      if (!on_boundary[a] || !on_boundary[b]) continue;
      const Vec2 mid{0.5 * (v[a][0] + v[b][0]), 0.5 * (v[a][1] + v[b][1])};
      // A boundary edge runs along one side of the rectangle.
      Vec2 normal{0.0, 0.0};
      if (v[a][0] == v[b][0] && (v[a][0] == box.x_min || v[a][0] == box.x_max)) {
        normal = {v[a][0] == box.x_min ? -1.0 : 1.0, 0.0};
      } else if (v[a][1] == v[b][1] && (v[a][1] == box.y_min || v[a][1] == box.y_max)) {
        normal = {0.0, v[a][1] == box.y_min ? -1.0 : 1.0};
      } else {
        continue;  // diagonal edge touching two boundary vertices at a corner cell
      }
      const Vec2 nu = current.eval(mid);
      sup = std::max(sup, std::hypot(nu[0], nu[1]));
      report.max_normal_component = std::max(report.max_normal_component, std::abs(nu[0] * normal[0] + nu[1] * normal[1]));
    }
  }
  const double scale = std::max(sup, current.sup_norm());
  report.compatible = report.max_normal_component <= 1e-10 * scale;
  if (!report.compatible) {
    std::ostringstream os;
    os << "current density violates nu·n=0 on boundary (max |nu·n| = " << report.max_normal_component << ")";
    report.message = os.str();
  }
  return report;
}

std::string_view to_string(InitialDataSpec::Preset preset) {
  switch (preset) {
    case InitialDataSpec::Preset::bubble:
      return "bubble";
    case InitialDataSpec::Preset::vortex:
      return "vortex";
    case InitialDataSpec::Preset::vortex_lifted:
      return "vortex_lifted";
    case InitialDataSpec::Preset::custom_constant:
      return "custom_constant";
  }
  return "bubble";
}

std::optional<InitialDataSpec::Preset> parse_initial_preset(std::string_view name) {
  using P = InitialDataSpec::Preset;
  if (name == "bubble") return P::bubble;
  if (name == "vortex") return P::vortex;
  if (name == "vortex_lifted") return P::vortex_lifted;
  if (name == "custom_constant" || name == "custom-constant") return P::custom_constant;
  return std::nullopt;
}

Vec3 eval_initial(const InitialDataSpec& spec, const Vec2& p) {
  using P = InitialDataSpec::Preset;
  switch (spec.preset) {
    case P::bubble: {
      const double r2 = p[0] * p[0] + p[1] * p[1];
      const double s = 1.0 - 2.0 * std::sqrt(r2);
      const double s4 = s * s * s * s;
      const double s8 = s4 * s4;
      return {2.0 * p[0] * s4, 2.0 * p[1] * s4, (s8 - r2) / (s8 + r2)};
    }
    case P::vortex:
      return {-p[1], p[0], 0.0};
    case P::vortex_lifted:
      return {-p[1], p[0], 0.01};
    case P::custom_constant:
      return spec.constant;
  }
  return {0.0, 0.0, 0.0};
}

std::array<Vec2, 3> eval_initial_jacobian(const InitialDataSpec& spec, const Vec2& p) {
  using P = InitialDataSpec::Preset;
  switch (spec.preset) {
    case P::bubble: {
      const double x = p[0];
      const double y = p[1];
      const double r2 = x * x + y * y;
      const double r = std::sqrt(r2);
      const double s = 1.0 - 2.0 * r;
      const double s3 = s * s * s;
      const double s4 = s3 * s;
      const double s7 = s4 * s3;
      const double s8 = s4 * s4;
      if (r == 0.0) return {{{2.0, 0.0}, {0.0, 2.0}, {0.0, 0.0}}};
      // d/dx of 2x s^4 with ds/dx = -2x/r.
      const double c = -16.0 * s3 / r;
      const double num = s8 - r2;
      const double den = s8 + r2;
      const double dnum = -16.0 * s7 - 2.0 * r;
      const double dden = -16.0 * s7 + 2.0 * r;
      const double du3_dr = (dnum * den - num * dden) / (den * den);
      return {{{2.0 * s4 + c * x * x, c * x * y}, {c * x * y, 2.0 * s4 + c * y * y}, {du3_dr * x / r, du3_dr * y / r}}};
    }
    case P::vortex:
    case P::vortex_lifted:
      return {{{0.0, -1.0}, {1.0, 0.0}, {0.0, 0.0}}};
    case P::custom_constant:
      return {{{0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}}};
  }
  return {};
}

VectorFunction initial_function(const InitialDataSpec& spec) {
  return {[spec](const Vec2& p) { return eval_initial(spec, p); },
          [spec](const Vec2& p) { return eval_initial_jacobian(spec, p); }};
}

DecayEnvelopes decay_envelopes(const LlbParams& params, double t, double u0_linf, double energy0) {
  const double rate = params.alpha * params.kappa * params.mu;
  return {std::exp(-rate * t) * u0_linf, std::exp(-2.0 * rate * t) * energy0};
}

double linf_growth_bound(const LlbParams& params, double nu_inf, double u0_linf) {
  if (!(params.alpha > 0.0)) throw ConfigError("linf_growth_bound: alpha must be positive");
  return u0_linf + std::abs(params.beta1) * nu_inf / std::sqrt(params.alpha);
}

std::optional<ExperimentPreset> experiment_preset(std::string_view name) {
  using P = InitialDataSpec::Preset;
  ExperimentPreset p;
  p.name = std::string(name);
  if (name == "sim1" || name == "sim2") {
    p.params = {2.2e5, 1.0e5, 0.1, -0.01, 1.3e-6, 1.0, 1.0e-6, 1.0e-3, {0.0, 1.0, 0.0}};
    p.current = CurrentField::constant({name == "sim1" ? 1e4 : 2e6, 0.0});
    p.initial = {P::bubble, {}};
    p.k = 1e-6;
    p.final_time = name == "sim1" ? 2e-3 : 5e-5;
    return p;
  }
  if (name == "sim3") {
    p.params = {2.3e5, 2.0e5, 0.2, 0.0, 1.0e-6, 2.0, 2.0e-6, 0.01, {0.0, 0.0, 1.0}};
    p.current = CurrentField::constant({0.0, 1e4});
    p.initial = {P::vortex, {}};
    p.k = 1e-6;
    p.final_time = 5e-3;
    return p;
  }
  if (name == "sim4") {
    // No current, so the torque coefficients are irrelevant and set to zero.
    p.params = {2.5e12, 0.2, 0.0, 0.0, 1.0e-10, 0.1, 1.0e-7, 0.0, {0.0, 0.0, 1.0}};
    p.current = CurrentField::zero();
    p.initial = {P::vortex_lifted, {}};
    p.k = 1e-5;
    p.final_time = 2e-3;
    return p;
  }
  return std::nullopt;
}

}  // namespace llb
