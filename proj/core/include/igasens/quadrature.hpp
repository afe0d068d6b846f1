#pragma once

#include <vector>

namespace igasens {

/// One-dimensional Gauss-Legendre rule on [0, 1], exact for polynomials of
/// degree 2*num_points - 1.
struct QuadratureRule1D {
  std::vector<double> points;
  std::vector<double> weights;
};

QuadratureRule1D gauss_legendre(int num_points);

}  // namespace igasens
