#include "llb/fem.hpp"

#include <algorithm>
#include <cmath>

#include "llb/error.hpp"

namespace llb {
namespace {

ElementGeometry element_geometry(const Mesh& mesh, std::size_t t) {
  const auto& tri = mesh.triangles()[t];
  const auto& v = mesh.vertices();
  const Vec2& p0 = v[tri[0]];
  const Vec2& p1 = v[tri[1]];
  const Vec2& p2 = v[tri[2]];
  const double det = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
  ElementGeometry g;
  g.area = 0.5 * std::abs(det);
  // grad psi_i = rot90(opposite edge) / det.
  g.grad[0] = {(p1[1] - p2[1]) / det, (p2[0] - p1[0]) / det};
  g.grad[1] = {(p2[1] - p0[1]) / det, (p0[0] - p2[0]) / det};
  g.grad[2] = {(p0[1] - p1[1]) / det, (p1[0] - p0[0]) / det};
  return g;
}

double grad_dot(const Vec2& a, const Vec2& b) { return a[0] * b[0] + a[1] * b[1]; }

void add_scaled(Mat3& m, const Mat3& x, double s) {
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m[i][j] += s * x[i][j];
}

void add_identity(Mat3& m, double s) {
  for (int i = 0; i < 3; ++i) m[i][i] += s;
}

/// Assembles sum_K |K| sum_q w_q (psi_i psi_j S_q + grad psi_i . grad psi_j G_q)
/// into a 3N x 3N matrix, where `coefficients(t, q, S, G)` fills S_q and G_q.
template <class Coefficients>
CsrMatrix assemble_vector_form(const FeSpace& space, Coefficients&& coefficients) {
  const Mesh& mesh = space.mesh();
  const QuadratureRule& rule = space.rule();
  const std::size_t n = 3 * mesh.num_vertices();
  CooBuilder builder(n, n);
  builder.reserve(81 * mesh.num_triangles());

  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles()[t];
    const ElementGeometry& g = space.geometry()[t];
    std::array<std::array<Mat3, 3>, 3> local{};
    for (std::size_t q = 0; q < rule.size(); ++q) {
      Mat3 s{};
      Mat3 gm{};
      coefficients(t, q, s, gm);
      const auto& psi = rule.points[q];
      const double w = g.area * rule.weights[q];
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
          add_scaled(local[i][j], s, w * psi[i] * psi[j]);
          add_scaled(local[i][j], gm, w * grad_dot(g.grad[i], g.grad[j]));
        }
      }
    }
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        for (std::size_t a = 0; a < 3; ++a) {
          for (std::size_t b = 0; b < 3; ++b) builder.add(3 * tri[i] + a, 3 * tri[j] + b, local[i][j][a][b]);
        }
      }
    }
  }
  return builder.finalize();
}

bool has(unsigned parts, unsigned flag) { return (parts & flag) != 0; }

std::vector<double> solve_mass_component(const FeSpace& space, std::span<const double> rhs) {
  const auto& opts = space.mass_options();
  if (opts.lumped) {
    std::vector<double> x(rhs.size());
    const auto& d = space.ops().lumped_mass;
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = rhs[i] / d[i];
    return x;
  }
  return solve_cg_or_throw(space.ops().mass, rhs, {opts.tol, opts.max_iter, Preconditioner::jacobi});
}

}  // namespace

AssembledOperators assemble_core(const Mesh& mesh) {
  const std::size_t n = mesh.num_vertices();
  CooBuilder mass(n, n);
  CooBuilder stiff(n, n);
  mass.reserve(9 * mesh.num_triangles());
  stiff.reserve(9 * mesh.num_triangles());
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles()[t];
    const ElementGeometry g = element_geometry(mesh, t);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        mass.add(tri[i], tri[j], g.area * (i == j ? 2.0 : 1.0) / 12.0);
        stiff.add(tri[i], tri[j], g.area * grad_dot(g.grad[i], g.grad[j]));
      }
    }
  }
  AssembledOperators ops{mass.finalize(), stiff.finalize(), std::vector<double>(n, 0.0)};
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t k = ops.mass.row_ptr[r]; k < ops.mass.row_ptr[r + 1]; ++k) ops.lumped_mass[r] += ops.mass.values[k];
  }
  return ops;
}

FeSpace::FeSpace(Mesh mesh, MassSolveOptions mass_options)
    : mesh_(std::move(mesh)), ops_(assemble_core(mesh_)), mass_options_(mass_options) {
  geometry_.reserve(mesh_.num_triangles());
  for (std::size_t t = 0; t < mesh_.num_triangles(); ++t) geometry_.push_back(element_geometry(mesh_, t));
}

std::vector<double> FeSpace::mass_solve(std::span<const double> rhs) const { return solve_mass_component(*this, rhs); }

NodalField FeSpace::mass_solve_field(std::span<const double> rhs) const {
  if (rhs.size() != 3 * num_nodes()) throw StructuralError("mass_solve_field: rhs has wrong length");
  NodalField out(mesh_);
  std::vector<double> comp(num_nodes());
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t i = 0; i < comp.size(); ++i) comp[i] = rhs[3 * i + c];
    out.set_component(c, mass_solve(comp));
  }
  return out;
}

namespace {

std::vector<double> apply_blockwise(const CsrMatrix& a, const NodalField& v) {
  std::vector<double> out(v.raw().size(), 0.0);
  for (std::size_t r = 0; r < a.n_rows; ++r) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0;
    for (std::size_t k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) {
      const std::size_t c = 3 * a.col_idx[k];
      s0 += a.values[k] * v.raw()[c];
      s1 += a.values[k] * v.raw()[c + 1];
      s2 += a.values[k] * v.raw()[c + 2];
    }
    out[3 * r] = s0;
    out[3 * r + 1] = s1;
    out[3 * r + 2] = s2;
  }
  return out;
}

}  // namespace

std::vector<double> FeSpace::apply_mass(const NodalField& v) const {
  require_on_mesh(v, mesh_);
  return apply_blockwise(ops_.mass, v);
}

std::vector<double> FeSpace::apply_stiffness(const NodalField& v) const {
  require_on_mesh(v, mesh_);
  return apply_blockwise(ops_.stiffness, v);
}

Vec3 FeSpace::eval(const NodalField& v, std::size_t t, const std::array<double, 3>& bary) const {
  const auto& tri = mesh_.triangles()[t];
  Vec3 out{0.0, 0.0, 0.0};
  for (int i = 0; i < 3; ++i) out = out + bary[i] * v.at(tri[i]);
  return out;
}

std::array<Vec2, 3> FeSpace::gradient(const NodalField& v, std::size_t t) const {
  const auto& tri = mesh_.triangles()[t];
  const auto& g = geometry_[t];
  std::array<Vec2, 3> out{};
  for (int i = 0; i < 3; ++i) {
    const Vec3 vi = v.at(tri[i]);
    for (int c = 0; c < 3; ++c) {
      out[c][0] += vi[c] * g.grad[i][0];
      out[c][1] += vi[c] * g.grad[i][1];
    }
  }
  return out;
}

Vec2 FeSpace::position(std::size_t t, const std::array<double, 3>& bary) const {
  const auto& tri = mesh_.triangles()[t];
  const auto& v = mesh_.vertices();
  return {bary[0] * v[tri[0]][0] + bary[1] * v[tri[1]][0] + bary[2] * v[tri[2]][0],
          bary[0] * v[tri[0]][1] + bary[1] * v[tri[1]][1] + bary[2] * v[tri[2]][1]};
}

NodalField discrete_laplacian(const FeSpace& space, const NodalField& v) {
  std::vector<double> rhs = space.apply_stiffness(v);
  for (double& x : rhs) x = -x;
  return space.mass_solve_field(rhs);
}

namespace {

std::vector<double> function_load(const FeSpace& space, const VectorFunction& f) {
  const Mesh& mesh = space.mesh();
  const QuadratureRule& rule = space.rule();
  std::vector<double> b(3 * mesh.num_vertices(), 0.0);
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles()[t];
    const double area = space.geometry()[t].area;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Vec3 fq = f.value(space.position(t, rule.points[q]));
      for (int i = 0; i < 3; ++i) {
        const double w = area * rule.weights[q] * rule.points[q][i];
        for (int c = 0; c < 3; ++c) b[3 * tri[i] + c] += w * fq[c];
      }
    }
  }
  return b;
}

}  // namespace

NodalField l2_project(const FeSpace& space, const VectorFunction& f) {
  return space.mass_solve_field(function_load(space, f));
}

NodalField l2_project(const FeSpace& space, const NodalField& v) { return space.mass_solve_field(space.apply_mass(v)); }

NodalField interpolate(const FeSpace& space, const VectorFunction& f) {
  NodalField out(space.mesh());
  const auto& v = space.mesh().vertices();
  for (std::size_t i = 0; i < v.size(); ++i) out.set(i, f.value(v[i]));
  return out;
}

NodalField ritz_project(const FeSpace& space, const VectorFunction& u0) {
  if (!u0.jacobian) throw ConfigError("ritz_project: the function must provide its Jacobian");
  const Mesh& mesh = space.mesh();
  const QuadratureRule& rule = space.rule();
  const std::size_t n = mesh.num_vertices();

  // Load b_i = <grad u0, grad psi_i> per component.
  std::vector<double> b(3 * n, 0.0);
  Vec3 mean{0.0, 0.0, 0.0};
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles()[t];
    const auto& g = space.geometry()[t];
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Vec2 x = space.position(t, rule.points[q]);
      const auto jac = u0.jacobian(x);
      const double w = g.area * rule.weights[q];
      mean = mean + w * u0.value(x);
      for (int i = 0; i < 3; ++i) {
        for (int c = 0; c < 3; ++c) b[3 * tri[i] + c] += w * grad_dot(jac[c], g.grad[i]);
      }
    }
  }
  const double area = mesh.bounds().area();
  mean = (1.0 / area) * mean;

  // Pin vertex 0 to remove the constant kernel; the load is consistent, so the
  // pinned row's equation follows from the others. The mean is fixed afterwards.
  const CsrMatrix& k = space.ops().stiffness;
  CsrMatrix pinned = k;
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t idx = pinned.row_ptr[r]; idx < pinned.row_ptr[r + 1]; ++idx) {
      const std::size_t c = pinned.col_idx[idx];
      if (r == 0 || c == 0) pinned.values[idx] = (r == c) ? 1.0 : 0.0;
    }
  }

  NodalField out(mesh);
  const auto& lumped = space.ops().lumped_mass;
  std::vector<double> rhs(n);
  const SolveOptions opts{space.mass_options().tol, space.mass_options().max_iter, Preconditioner::jacobi};
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t i = 0; i < n; ++i) rhs[i] = b[3 * i + c];
    rhs[0] = 0.0;
    std::vector<double> x = solve_cg_or_throw(pinned, rhs, opts);
    // Integral of a P1 function is sum_i x_i * (row sum of M)_i.
    double discrete_mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) discrete_mean += lumped[i] * x[i];
    discrete_mean /= area;
    for (double& xi : x) xi += mean[c] - discrete_mean;
    out.set_component(c, x);
  }
  return out;
}

CsrMatrix assemble_linear_scheme_matrix(const FeSpace& space, const LlbParams& p, const NodalField& phi,
                                        const CurrentField& current, double t, double k, unsigned parts) {
  require_on_mesh(phi, space.mesh());
  if (has(parts, static_cast<unsigned>(LinearFormPart::time)) && !(k > 0.0)) {
    throw ConfigError("assemble_linear_scheme_matrix: time step must be positive");
  }
  const QuadratureRule& rule = space.rule();
  const Mat3 eet{{{p.e[0] * p.e[0], p.e[0] * p.e[1], p.e[0] * p.e[2]},
                  {p.e[1] * p.e[0], p.e[1] * p.e[1], p.e[1] * p.e[2]},
                  {p.e[2] * p.e[0], p.e[2] * p.e[1], p.e[2] * p.e[2]}}};

  std::size_t cached_t = static_cast<std::size_t>(-1);
  std::array<Vec2, 3> grad_phi{};
  return assemble_vector_form(space, [&](std::size_t tri, std::size_t q, Mat3& s, Mat3& g) {
    if (tri != cached_t) {
      grad_phi = space.gradient(phi, tri);
      cached_t = tri;
    }
    const auto& bary = rule.points[q];
    const Vec3 phi_q = space.eval(phi, tri, bary);
    if (has(parts, static_cast<unsigned>(LinearFormPart::time))) add_identity(s, 1.0 / k);
    if (has(parts, static_cast<unsigned>(LinearFormPart::a1))) {
      add_identity(s, p.alpha * p.kappa * p.mu);
      add_scaled(s, eet, p.alpha * p.lambda);
      add_identity(g, p.alpha * p.sigma);
    }
    if (has(parts, static_cast<unsigned>(LinearFormPart::b))) add_identity(s, p.alpha * p.kappa * dot(phi_q, phi_q));
    if (has(parts, static_cast<unsigned>(LinearFormPart::c))) {
      // -gamma sigma <phi x grad v, grad w>
      add_scaled(g, cross_matrix(phi_q), -p.gamma * p.sigma);
      // -gamma lambda <v x e(e.phi), w> = gamma lambda <[e(e.phi)]_x v, w>
      add_scaled(s, cross_matrix(dot(p.e, phi_q) * p.e), p.gamma * p.lambda);
      if (p.beta2 != 0.0) {
        const Vec2 nu = current.eval(space.position(tri, bary), t);
        const Vec3 conv{nu[0] * grad_phi[0][0] + nu[1] * grad_phi[0][1], nu[0] * grad_phi[1][0] + nu[1] * grad_phi[1][1],
                        nu[0] * grad_phi[2][0] + nu[1] * grad_phi[2][1]};
        // -beta2 <v x (nu.grad)phi, w>
        add_scaled(s, cross_matrix(conv), p.beta2);
      }
    }
  });
}

std::vector<double> assemble_d_rhs(const FeSpace& space, const LlbParams& p, const NodalField& u_prev,
                                   const CurrentField& current, double t) {
  require_on_mesh(u_prev, space.mesh());
  const Mesh& mesh = space.mesh();
  std::vector<double> b(3 * mesh.num_vertices(), 0.0);
  if (p.beta1 == 0.0 || current.is_zero()) return b;
  const QuadratureRule& rule = space.rule();
  for (std::size_t tri = 0; tri < mesh.num_triangles(); ++tri) {
    const auto& ids = mesh.triangles()[tri];
    const auto grad_u = space.gradient(u_prev, tri);
    const double area = space.geometry()[tri].area;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Vec2 nu = current.eval(space.position(tri, rule.points[q]), t);
      const double w = p.beta1 * area * rule.weights[q];
      for (int c = 0; c < 3; ++c) {
        const double conv = nu[0] * grad_u[c][0] + nu[1] * grad_u[c][1];
        for (int i = 0; i < 3; ++i) b[3 * ids[i] + c] += w * rule.points[q][i] * conv;
      }
    }
  }
  return b;
}

CsrMatrix assemble_nonlinear_iterate_matrix(const FeSpace& space, const LlbParams& p, const NodalField& u_iter,
                                            const NodalField& h_iter, double k, unsigned parts) {
  require_on_mesh(u_iter, space.mesh());
  require_on_mesh(h_iter, space.mesh());
  if (has(parts, static_cast<unsigned>(IterateFormPart::time)) && !(k > 0.0)) {
    throw ConfigError("assemble_nonlinear_iterate_matrix: time step must be positive");
  }
  const QuadratureRule& rule = space.rule();
  const Mat3 eet{{{p.e[0] * p.e[0], p.e[0] * p.e[1], p.e[0] * p.e[2]},
                  {p.e[1] * p.e[0], p.e[1] * p.e[1], p.e[1] * p.e[2]},
                  {p.e[2] * p.e[0], p.e[2] * p.e[1], p.e[2] * p.e[2]}}};
  return assemble_vector_form(space, [&](std::size_t tri, std::size_t q, Mat3& s, Mat3& g) {
    const auto& bary = rule.points[q];
    if (has(parts, static_cast<unsigned>(IterateFormPart::time))) add_identity(s, 1.0 / k);
    if (has(parts, static_cast<unsigned>(IterateFormPart::a1))) {
      add_identity(s, p.alpha * p.kappa * p.mu);
      add_scaled(s, eet, p.alpha * p.lambda);
      add_identity(g, p.alpha * p.sigma);
    }
    if (has(parts, static_cast<unsigned>(IterateFormPart::cubic))) {
      const Vec3 u_q = space.eval(u_iter, tri, bary);
      add_identity(s, p.alpha * p.kappa * dot(u_q, u_q));
    }
    if (has(parts, static_cast<unsigned>(IterateFormPart::precession))) {
      // gamma <v x H, w> = -gamma <[H]_x v, w>
      add_scaled(s, cross_matrix(space.eval(h_iter, tri, bary)), -p.gamma);
    }
  });
}

std::vector<double> cubic_load(const FeSpace& space, const NodalField& u) {
  require_on_mesh(u, space.mesh());
  const Mesh& mesh = space.mesh();
  const QuadratureRule& rule = space.rule();
  std::vector<double> b(3 * mesh.num_vertices(), 0.0);
  for (std::size_t tri = 0; tri < mesh.num_triangles(); ++tri) {
    const auto& ids = mesh.triangles()[tri];
    const double area = space.geometry()[tri].area;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Vec3 uq = space.eval(u, tri, rule.points[q]);
      const Vec3 f = dot(uq, uq) * uq;
      for (int i = 0; i < 3; ++i) {
        const double w = area * rule.weights[q] * rule.points[q][i];
        for (int c = 0; c < 3; ++c) b[3 * ids[i] + c] += w * f[c];
      }
    }
  }
  return b;
}

NodalField compute_discrete_field_H(const FeSpace& space, const LlbParams& p, const NodalField& u,
                                    bool include_anisotropy) {
  require_on_mesh(u, space.mesh());
  NodalField h = discrete_laplacian(space, u);
  h *= p.sigma;
  const NodalField cubic = space.mass_solve_field(cubic_load(space, u));
  for (std::size_t i = 0; i < u.num_nodes(); ++i) {
    const Vec3 ui = u.at(i);
    Vec3 hi = h.at(i) - (p.kappa * p.mu) * ui - p.kappa * cubic.at(i);
    if (include_anisotropy) hi = hi - (p.lambda * dot(p.e, ui)) * p.e;
    h.set(i, hi);
  }
  return h;
}

double l2_inner(const FeSpace& space, const NodalField& u, const NodalField& v) {
  require_on_mesh(v, space.mesh());
  const auto mu = space.apply_mass(u);
  return dot(mu, v.raw());
}

double dual_l2_norm(const FeSpace& space, std::span<const double> r) {
  const NodalField riesz = space.mass_solve_field(r);
  return std::sqrt(std::max(0.0, dot(r, riesz.raw())));
}

double integrate(const FeSpace& space, const std::function<double(const Vec2&)>& f) {
  const QuadratureRule& rule = space.rule();
  double sum = 0.0;
  for (std::size_t t = 0; t < space.mesh().num_triangles(); ++t) {
    double local = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) local += rule.weights[q] * f(space.position(t, rule.points[q]));
    sum += space.geometry()[t].area * local;
  }
  return sum;
}

namespace {

double l4_power4(const FeSpace& space, const NodalField& v) {
  const QuadratureRule& rule = space.rule();
  double sum = 0.0;
  for (std::size_t t = 0; t < space.mesh().num_triangles(); ++t) {
    double local = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Vec3 vq = space.eval(v, t, rule.points[q]);
      const double s = dot(vq, vq);
      local += rule.weights[q] * s * s;
    }
    sum += space.geometry()[t].area * local;
  }
  return sum;
}

}  // namespace

FieldNorms norms(const FeSpace& space, const NodalField& v) {
  require_on_mesh(v, space.mesh());
  FieldNorms out;
  out.l2 = std::sqrt(std::max(0.0, dot(space.apply_mass(v), v.raw())));
  out.h1_semi = std::sqrt(std::max(0.0, dot(space.apply_stiffness(v), v.raw())));
  out.h1 = std::sqrt(out.l2 * out.l2 + out.h1_semi * out.h1_semi);
  for (std::size_t i = 0; i < v.num_nodes(); ++i) out.linf = std::max(out.linf, norm(v.at(i)));
  out.l4 = std::pow(l4_power4(space, v), 0.25);
  return out;
}

EnergyBreakdown energy(const FeSpace& space, const LlbParams& p, const NodalField& u) {
  require_on_mesh(u, space.mesh());
  const double l2_sq = std::max(0.0, dot(space.apply_mass(u), u.raw()));
  const double grad_sq = std::max(0.0, dot(space.apply_stiffness(u), u.raw()));
  const double l4_4 = l4_power4(space, u);
  double aniso = 0.0;
  if (p.lambda != 0.0) {
    const QuadratureRule& rule = space.rule();
    for (std::size_t t = 0; t < space.mesh().num_triangles(); ++t) {
      double local = 0.0;
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const double eu = dot(p.e, space.eval(u, t, rule.points[q]));
        local += rule.weights[q] * eu * eu;
      }
      aniso += space.geometry()[t].area * local;
    }
  }
  EnergyBreakdown e;
  e.exchange = 0.5 * p.sigma * grad_sq;
  e.internal = 0.5 * p.kappa * p.mu * l2_sq + 0.25 * p.kappa * l4_4;
  e.anisotropy = 0.5 * p.lambda * aniso;
  e.total = e.exchange + e.internal + e.anisotropy;
  return e;
}

}  // namespace llb
