#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "llb/field.hpp"
#include "llb/linalg.hpp"
#include "llb/mesh.hpp"
#include "llb/model.hpp"
#include "llb/quadrature.hpp"

namespace llb {

/// Scalar P1 operators: consistent mass M, stiffness K and the row-sum lumped mass.
struct AssembledOperators {
  CsrMatrix mass;
  CsrMatrix stiffness;
  std::vector<double> lumped_mass;
};

AssembledOperators assemble_core(const Mesh& mesh);

/// Per-triangle geometry: area and the (constant) gradients of the three hat functions.
struct ElementGeometry {
  double area = 0.0;
  std::array<Vec2, 3> grad{};
};

struct MassSolveOptions {
  double tol = 1e-12;
  std::size_t max_iter = 20000;
  /// Replace M by its lumped diagonal inside Lap_h and P_h.
  bool lumped = false;
};

/// A mesh together with its P1 operators and mass-solve settings. Owns a
/// copy of the mesh so it can outlive the caller's instance.
class FeSpace {
 public:
  explicit FeSpace(Mesh mesh, MassSolveOptions mass_options = {});

  const Mesh& mesh() const { return mesh_; }
  const AssembledOperators& ops() const { return ops_; }
  const std::vector<ElementGeometry>& geometry() const { return geometry_; }
  const QuadratureRule& rule() const { return degree4_rule(); }
  const MassSolveOptions& mass_options() const { return mass_options_; }
  std::size_t num_nodes() const { return mesh_.num_vertices(); }

  /// Solves M x = rhs for one scalar component.
  std::vector<double> mass_solve(std::span<const double> rhs) const;
  /// Solves (M (x) I3) x = rhs componentwise; rhs has length 3N.
  NodalField mass_solve_field(std::span<const double> rhs) const;
  /// (M (x) I3) v as a 3N vector.
  std::vector<double> apply_mass(const NodalField& v) const;
  /// (K (x) I3) v as a 3N vector.
  std::vector<double> apply_stiffness(const NodalField& v) const;

  /// Value of the P1 field v at barycentric point `bary` of triangle t.
  Vec3 eval(const NodalField& v, std::size_t t, const std::array<double, 3>& bary) const;
  /// Gradient of v on triangle t: row c holds grad of component c.
  std::array<Vec2, 3> gradient(const NodalField& v, std::size_t t) const;
  /// Cartesian position of barycentric point `bary` in triangle t.
  Vec2 position(std::size_t t, const std::array<double, 3>& bary) const;

 private:
  Mesh mesh_;
  AssembledOperators ops_;
  std::vector<ElementGeometry> geometry_;
  MassSolveOptions mass_options_;
};

/// <Lap_h v, chi> = -<grad v, grad chi>: componentwise solve of M z = -K v.
NodalField discrete_laplacian(const FeSpace& space, const NodalField& v);

/// L2 projection P_h of a pointwise function (load vector by degree-4 quadrature).
NodalField l2_project(const FeSpace& space, const VectorFunction& f);
/// L2 projection of a field already in V_h (returns it up to the solver tolerance).
NodalField l2_project(const FeSpace& space, const NodalField& v);

/// Ritz projection: <grad(R_h u0 - u0), grad chi> = 0 for all chi and
/// <R_h u0 - u0, 1> = 0. Requires f.jacobian.
NodalField ritz_project(const FeSpace& space, const VectorFunction& u0);

/// Nodal interpolant.
NodalField interpolate(const FeSpace& space, const VectorFunction& f);

/// Selects summands of the linear-scheme operator (1/k) M + A1 + B + C.
enum class LinearFormPart : unsigned { time = 1U, a1 = 2U, b = 4U, c = 8U, all = 15U };
/// Selects summands of the fixed-point iterate operator.
enum class IterateFormPart : unsigned { time = 1U, a1 = 2U, cubic = 4U, precession = 8U, all = 15U };

constexpr unsigned operator|(LinearFormPart a, LinearFormPart b) {
  return static_cast<unsigned>(a) | static_cast<unsigned>(b);
}
constexpr unsigned operator|(IterateFormPart a, IterateFormPart b) {
  return static_cast<unsigned>(a) | static_cast<unsigned>(b);
}
constexpr unsigned operator|(unsigned a, LinearFormPart b) { return a | static_cast<unsigned>(b); }
constexpr unsigned operator|(unsigned a, IterateFormPart b) { return a | static_cast<unsigned>(b); }

/// 3N x 3N matrix of (1/k)<v, w> + A(phi; v, w) with
///   A1(v,w)     = alpha sigma <grad v, grad w> + alpha kappa mu <v,w> + alpha lambda <e(e.v), w>
///   B(phi;v,w)  = alpha kappa <|phi|^2 v, w>
///   C(phi;v,w)  = -gamma sigma <phi x grad v, grad w> - gamma lambda <v x e(e.phi), w>
///                 - beta2 <v x (nu.grad) phi, w>.
/// Row 3i+a tests with psi_i e_a, column 3j+b is the trial psi_j e_b.
CsrMatrix assemble_linear_scheme_matrix(const FeSpace& space, const LlbParams& params, const NodalField& phi,
                                        const CurrentField& current, double t, double k,
                                        unsigned parts = static_cast<unsigned>(LinearFormPart::all));

/// Load vector of beta1 <(nu.grad) u_prev, chi> in convective form.
std::vector<double> assemble_d_rhs(const FeSpace& space, const LlbParams& params, const NodalField& u_prev,
                                   const CurrentField& current, double t);

/// 3N x 3N matrix of the fixed-point iterate:
///   (1/k)<v,w> + gamma <v x H, w> + alpha sigma <grad v, grad w> + alpha kappa <|u|^2 v, w>
///   + alpha kappa mu <v, w> + alpha lambda <e(e.v), w>.
CsrMatrix assemble_nonlinear_iterate_matrix(const FeSpace& space, const LlbParams& params, const NodalField& u_iter,
                                            const NodalField& h_iter, double k,
                                            unsigned parts = static_cast<unsigned>(IterateFormPart::all));

/// Load vector of <f(u), chi> with f evaluated pointwise from u.
std::vector<double> cubic_load(const FeSpace& space, const NodalField& u);

/// H_h = sigma Lap_h u - kappa mu u - kappa P_h(|u|^2 u) [- lambda e(e.u)].
NodalField compute_discrete_field_H(const FeSpace& space, const LlbParams& params, const NodalField& u,
                                    bool include_anisotropy = true);

struct FieldNorms {
  double l2 = 0.0;
  double h1_semi = 0.0;
  double h1 = 0.0;
  double linf = 0.0;
  double l4 = 0.0;
};

FieldNorms norms(const FeSpace& space, const NodalField& v);

/// (u, v)_{L2} of two P1 fields.
double l2_inner(const FeSpace& space, const NodalField& u, const NodalField& v);

/// L2 norm of the Riesz representative in V_h of a dual (load) vector r: sqrt(r^T M^{-1} r).
double dual_l2_norm(const FeSpace& space, std::span<const double> r);

/// Integral of a scalar function over the domain (degree-4 quadrature).
double integrate(const FeSpace& space, const std::function<double(const Vec2&)>& f);

EnergyBreakdown energy(const FeSpace& space, const LlbParams& params, const NodalField& u);

}  // namespace llb
