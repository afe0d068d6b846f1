#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "igasens/errors.hpp"
#include "igasens/splines.hpp"

namespace igasens {

/// Binomial coefficient as a double (exact for the orders used here).
double binomial(int n, int k);

namespace detail {
inline double zero_like(const double&) { return 0.0; }
template <class M>
inline M zero_like(const Eigen::MatrixBase<M>& m) {
  return M::Zero(m.rows(), m.cols());
}
}  // namespace detail

/// Truncated stack of t-derivative values of a function at one point:
/// coefficient k is the k-th derivative (not divided by k!). Evaluating
/// sum_k c[k] delta^k / k! recovers the function up to the truncation
/// remainder.
template <class T>
class Jet {
public:
  Jet(int order, const T& shape)
      : c_(static_cast<std::size_t>(order) + 1, detail::zero_like(shape)) {
    if (order < 0) throw DomainError("jet order must be nonnegative");
  }

  int order() const { return static_cast<int>(c_.size()) - 1; }
  T& operator[](int k) { return c_[static_cast<std::size_t>(k)]; }
  const T& operator[](int k) const { return c_[static_cast<std::size_t>(k)]; }

private:
  std::vector<T> c_;
};

using ScalarJet = Jet<double>;
using MatrixJet = Jet<MatD>;

namespace detail {
template <class T>
void check_same_order(const Jet<T>& a, const Jet<T>& b, const char* op) {
  if (a.order() != b.order())
    throw ValidationError(std::string(op) + ": jet orders do not match");
}
}  // namespace detail

/// Leibniz product of two jets.
template <class T>
Jet<T> jet_mul(const Jet<T>& a, const Jet<T>& b) {
  detail::check_same_order(a, b, "jet_mul");
  Jet<T> out(a.order(), a[0]);
  for (int k = 0; k <= a.order(); ++k) {
    T acc = detail::zero_like(a[0]);
    for (int j = 0; j <= k; ++j) acc += binomial(k, j) * a[j] * b[k - j];
    out[k] = acc;
  }
  return out;
}

/// Jet of the scalar function s times the matrix function a.
MatrixJet jet_scale(const ScalarJet& s, const MatrixJet& a);

MatrixJet jet_transpose(const MatrixJet& a);

/// Jet of the matrix inverse; requires an invertible zeroth coefficient.
/// Derived from differentiating X X^{-1} = I, whose first order is the
/// familiar d/dt inv(X) = -X^{-1} (dX/dt) X^{-1}.
MatrixJet jet_inv(const MatrixJet& a);

/// Jet of the determinant via cofactor expansion on scalar entry jets
/// (spatial dimension capped at 3).
ScalarJet jet_det(const MatrixJet& a);

/// Jet of 1/s; requires a nonzero zeroth coefficient.
ScalarJet jet_recip(const ScalarJet& s);

/// Jet of an affine-in-t Jacobian family dG[t] = J0 + t*JV expanded at t0:
/// coefficient 0 is J0 + t0*JV, coefficient 1 is JV, the rest vanish.
MatrixJet jet_from_affine(const MatD& J0, const MatD& JV, double t0, int order);

/// Derivative stack of the gradient-pullback matrix
/// A[t] = det(dG[t]) dG[t]^{-1} dG[t]^{-T}.
MatrixJet pullback_A_jet(const MatrixJet& G);

/// Derivative stack of the curl-pullback matrix
/// C[t] = (1/det(dG[t])) dG[t]^T dG[t].
MatrixJet pullback_C_jet(const MatrixJet& G);

/// Closed-form first derivatives of det, A and C for an affine family
/// dG[t] = G0 + t*JV, evaluated at parameter t.
struct PullbackRates {
  double det_rate;
  MatD A_rate;
  MatD C_rate;
};
PullbackRates pullback_first_derivative(const MatD& G0, const MatD& JV, double t);

/// Closed-form second derivative of C[t] for the same affine family.
MatD pullback_C_second_derivative(const MatD& G0, const MatD& JV, double t);

/// Closed-form third derivative of C[t] (general Leibniz expansion).
MatD pullback_C_third_derivative(const MatD& G0, const MatD& JV, double t);

/// Taylor evaluation of a jet at offset delta from its expansion point.
template <class T>
T taylor_sum(const Jet<T>& jet, double delta) {
  T acc = jet[0];
  double power = 1.0;
  double factorial = 1.0;
  for (int k = 1; k <= jet.order(); ++k) {
    power *= delta;
    factorial *= k;
    acc += (power / factorial) * jet[k];
  }
  return acc;
}

}  // namespace igasens
