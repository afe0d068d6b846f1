#pragma once

#include <vector>

#include "igasens/errors.hpp"

namespace igasens::oracles {

/// Bessel function of the first kind, order 0, by power series (adequate for
/// the small arguments used here).
double bessel_j0(double x);

/// Bessel function of the first kind, order 1.
double bessel_j1(double x);

/// First positive root of J0 by bisection on [2, 3], absolute accuracy
/// better than 1e-13.
double bessel_j0_first_root();

/// First positive root of J1 by bisection on [3, 4.5].
double bessel_j1_first_root();

/// Fundamental pillbox eigenvalue lambda(r) = x01^2 / r^2 and its first n
/// derivatives with respect to the radius:
/// d^k/dr^k = x01^2 (-1)^k (k+1)! r^(-2-k). Throws DomainError for r <= 0.
std::vector<double> pillbox_lambda_derivs(double r, int n);

/// Maxwell eigenvalues of the PEC cube [0, L]^3:
/// (pi/L)^2 (m^2+n^2+k^2) over nonnegative triples with at least two nonzero
/// indices, with the standard multiplicities (two modes when all three
/// indices are positive, one when exactly one vanishes), ascending.
std::vector<double> cube_maxwell_spectrum(double L, int count);

/// Closed-form reference spectra for the benchmark domains.
struct ClosedFormSpectrum {
  enum class Problem { DiskH1, IntervalH1, SquareH1, CubeMaxwell };
  Problem problem;
  double parameter;  // radius or edge length

  /// Ascending eigenvalues. DiskH1 provides the first three values only
  /// (fundamental plus the doubly degenerate J1 pair).
  std::vector<double> eigenvalues(int count) const;
};

/// Central finite differences of orders 1-4 with O(h^2) consistency.
/// The value type needs +, -, and scalar division.
template <class F>
auto finite_difference(F&& f, double t, int order, double h) {
  if (!(h > 0.0)) throw DomainError("finite_difference: h must be positive");
  using V = decltype(f(t));
  switch (order) {
    case 1: {
      V a = f(t + h);
      V b = f(t - h);
      return V((a - b) / (2.0 * h));
    }
    case 2: {
      V a = f(t + h);
      V b = f(t);
      V c = f(t - h);
      return V((a - 2.0 * b + c) / (h * h));
    }
    case 3: {
      V a = f(t + 2.0 * h);
      V b = f(t + h);
      V c = f(t - h);
      V d = f(t - 2.0 * h);
      return V((0.5 * a - b + c - 0.5 * d) / (h * h * h));
    }
    case 4: {
      V a = f(t + 2.0 * h);
      V b = f(t + h);
      V c = f(t);
      V d = f(t - h);
      V e = f(t - 2.0 * h);
      return V((a - 4.0 * b + 6.0 * c - 4.0 * d + e) / (h * h * h * h));
    }
    default:
      throw DomainError("finite_difference: order must be 1..4");
  }
}

}  // namespace igasens::oracles
