#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace llb {

/// Quadrature on the reference triangle in barycentric coordinates. Weights
/// are normalised to sum to one, so an integral over a triangle K is
/// |K| * sum_q w_q f(x_q).
struct QuadratureRule {
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;
  int degree = 0;

  std::size_t size() const { return weights.size(); }
};

/// Six-point symmetric rule, exact for polynomials of total degree <= 4.
const QuadratureRule& degree4_rule();

}  // namespace llb
