#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "igasens/errors.hpp"

namespace igasens {

/// Vector and matrix types sized by the spatial dimension (at most 3).
/// Fixed maximum size keeps them off the heap.
using VecD = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 3, 1>;
using MatD = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 3, 3>;

/// Open (clamped) knot vector on [0, 1] for B-splines of a fixed degree.
///
/// The first and last knot are repeated exactly degree+1 times; interior
/// knots are non-decreasing. The number of basis functions is
/// values.size() - degree - 1.
class KnotVector {
public:
  KnotVector(std::vector<double> values, int degree);

  int degree() const { return degree_; }
  int num_basis() const { return static_cast<int>(values_.size()) - degree_ - 1; }
  const std::vector<double>& values() const { return values_; }
  double operator[](int i) const { return values_[static_cast<std::size_t>(i)]; }

  /// Index s of the knot span [values[s], values[s+1]) containing xi.
  /// The final span is right-closed so that xi = 1 maps into it.
  int find_span(double xi) const;

  /// Distinct knot values, ascending.
  std::vector<double> breakpoints() const;

  /// Largest multiplicity among interior knots (0 if there are none).
  int max_interior_multiplicity() const;

private:
  std::vector<double> values_;
  int degree_ = 0;
};

/// Univariate B-spline space: knot vector plus derived regularity.
class SplineSpace1D {
public:
  explicit SplineSpace1D(KnotVector knots);

  const KnotVector& knots() const { return knots_; }
  int degree() const { return knots_.degree(); }
  int num_basis() const { return knots_.num_basis(); }

  /// Smoothness across interior knots: degree - max interior multiplicity
  /// (degree - 1 for maximally smooth vectors, -1 for discontinuous ones).
  int regularity() const { return regularity_; }

private:
  KnotVector knots_;
  int regularity_ = -1;
};

/// Result of evaluating the possibly-nonzero basis functions at one point:
/// values[k] is basis function first + k.
struct ActiveBasis {
  int first = 0;
  std::vector<double> values;
};

/// Values of the degree+1 active B-spline basis functions at xi via the
/// Cox-de Boor recursion. Throws DomainError for xi outside [0, 1].
ActiveBasis eval_basis(const SplineSpace1D& space, double xi);

/// Derivatives of the active basis functions up to max_order.
/// Row j holds the j-th derivatives of the same functions as eval_basis;
/// row 0 equals the values. Orders above the degree are exact zeros.
/// Returns a (max_order+1) x (degree+1) matrix along with the first index.
struct ActiveBasisDerivatives {
  int first = 0;
  Eigen::MatrixXd rows;  // (max_order+1) x (degree+1)
};
ActiveBasisDerivatives eval_basis_derivatives(const SplineSpace1D& space, double xi,
                                              int max_order);

/// Tensor-product spline space over [0,1]^d, d = number of factors (1..3).
/// Multi-indices flatten with the first factor running fastest.
class TensorSplineSpace {
public:
  explicit TensorSplineSpace(std::vector<SplineSpace1D> factors);

  int dim_space() const { return static_cast<int>(factors_.size()); }
  const SplineSpace1D& factor(int axis) const { return factors_[static_cast<std::size_t>(axis)]; }
  int num_basis(int axis) const { return factors_[static_cast<std::size_t>(axis)].num_basis(); }

  /// Total number of tensor basis functions.
  long dim() const;

  /// Flat index of a multi-index (first factor fastest).
  long flatten(std::span<const int> index) const;

private:
  std::vector<SplineSpace1D> factors_;
};

/// NURBS point: sum_i B_i w_i P_i / sum_i B_i w_i over the full tensor basis.
/// Weights must be positive; counts must match the space dimension.
/// With all weights equal to one this reduces exactly to the B-spline
/// combination of the control points.
VecD eval_nurbs(const TensorSplineSpace& space, std::span<const double> xi,
                std::span<const double> weights, std::span<const VecD> points);

/// Uniform h-refinement by knot insertion: every nonempty span is split into
/// n_subdiv equal spans. Degree and original knots (with multiplicities) are
/// preserved, so the refined space contains the original one.
SplineSpace1D uniform_refine(const SplineSpace1D& space, int n_subdiv);

/// Open knot vector of the given degree whose interior breakpoints are those
/// of `space` refined n_subdiv times, each with multiplicity one (maximal
/// smoothness). Used to build solution spaces on a geometry's spans.
SplineSpace1D solution_space(const SplineSpace1D& geometry_space, int degree, int n_subdiv);

/// Knot vector of the derivative space: degree lowered by one, regularity
/// lowered by one in the same direction (drops one end knot on each side).
SplineSpace1D derivative_space(const SplineSpace1D& space);

}  // namespace igasens
