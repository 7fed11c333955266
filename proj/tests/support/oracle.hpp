#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

#include "dense.hpp"
#include "llb/mesh.hpp"
#include "llb/model.hpp"

namespace llbtest {

using Point = std::array<double, 2>;
using Vec = std::array<double, 3>;
using Current = std::function<Point(const Point&)>;

/// Collapsed Gauss-Legendre rule on the unit reference triangle with n*n
/// points, exact for total degree 2n - 2. Points are (s, t), weights sum to 1/2.
struct TriangleRule {
  std::vector<Point> points;
  std::vector<double> weights;
};
TriangleRule collapsed_gauss(int n);

/// Brute-force integration over every triangle of the mesh. The callback gets
/// the physical point, barycentric coordinates, the hat gradients and the
/// quadrature weight already scaled by the element Jacobian.
using ElementVisitor = std::function<void(std::size_t tri, const Point& x, const std::array<double, 3>& bary,
                                          const std::array<Point, 3>& grad, double weight)>;
void for_each_quadrature_point(const llb::Mesh& mesh, const TriangleRule& rule, const ElementVisitor& visit);

/// Value and Jacobian (row c = gradient of component c) of the P1 field with
/// node-major coefficients `u` on triangle `tri`.
Vec p1_value(const llb::Mesh& mesh, const std::vector<double>& u, std::size_t tri, const std::array<double, 3>& bary);
std::array<Point, 3> p1_jacobian(const llb::Mesh& mesh, const std::vector<double>& u, std::size_t tri,
                                 const std::array<Point, 3>& grad);

/// (1/k)<v,w> + A1 + B + C of the linear scheme, entry by entry from the
/// pointwise definitions of the forms.
Dense linear_scheme_matrix(const llb::Mesh& mesh, const llb::LlbParams& p, const std::vector<double>& phi,
                           const Current& nu, double k, bool include_time = true);

/// (1/k)<v,w> + gamma <v x H, w> + alpha sigma <grad v, grad w> + alpha kappa <|u|^2 v, w>
/// + alpha kappa mu <v,w> + alpha lambda <e(e.v), w>.
Dense iterate_matrix(const llb::Mesh& mesh, const llb::LlbParams& p, const std::vector<double>& u,
                     const std::vector<double>& h, double k);

/// beta1 <(nu.grad) u, chi> in convective form.
std::vector<double> d_load_convective(const llb::Mesh& mesh, double beta1, const std::vector<double>& u,
                                      const Current& nu);
/// The same form rewritten as -beta1 <u, (nu.grad) chi> - beta1 <(div nu) u, chi>, valid when nu.n = 0.
std::vector<double> d_load_divergence(const llb::Mesh& mesh, double beta1, const std::vector<double>& u,
                                      const Current& nu, const std::function<double(const Point&)>& div_nu);

/// Scalar mass and stiffness from hat-function products.
Dense scalar_mass(const llb::Mesh& mesh);
Dense scalar_stiffness(const llb::Mesh& mesh);

/// Load <f, psi_i e_a> of a pointwise vector function.
std::vector<double> vector_load(const llb::Mesh& mesh, const std::function<Vec(const Point&)>& f);
/// Load <grad f, grad psi_i> per component from the Jacobian of f.
std::vector<double> gradient_load(const llb::Mesh& mesh, const std::function<std::array<Point, 3>(const Point&)>& df);

/// Integral of a scalar function over the mesh domain.
double integrate(const llb::Mesh& mesh, const std::function<double(const Point&)>& f, int n = 6);

}  // namespace llbtest
