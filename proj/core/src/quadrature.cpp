#include "llb/quadrature.hpp"

namespace llb {

const QuadratureRule& degree4_rule() {
  static const QuadratureRule rule = [] {
    constexpr double a1 = 0.445948490915964886;
    constexpr double b1 = 0.108103018168070227;
    constexpr double w1 = 0.223381589678011466;
    constexpr double a2 = 0.091576213509770743;
    constexpr double b2 = 0.816847572980458514;
    constexpr double w2 = 0.109951743655321868;
    QuadratureRule r;
    r.degree = 4;
    r.points = {{a1, a1, b1}, {a1, b1, a1}, {b1, a1, a1}, {a2, a2, b2}, {a2, b2, a2}, {b2, a2, a2}};
    r.weights = {w1, w1, w1, w2, w2, w2};
    return r;
  }();
  return rule;
}

}  // namespace llb
