#include "igasens/splines.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

namespace igasens {

KnotVector::KnotVector(std::vector<double> values, int degree)
    : values_(std::move(values)), degree_(degree) {
  if (degree_ < 0) throw ValidationError("knot vector: degree must be nonnegative");
  const auto n = static_cast<int>(values_.size()) - degree_ - 1;
  if (n < degree_ + 1)
    throw ValidationError(fmt::format(
        "knot vector: needs at least {} knots for degree {}, got {}",
        2 * (degree_ + 1), degree_, values_.size()));
  if (!std::is_sorted(values_.begin(), values_.end()))
    throw ValidationError("knot vector: values must be non-decreasing");
  for (int i = 0; i <= degree_; ++i) {
    if (values_[static_cast<std::size_t>(i)] != values_.front() ||
        values_[values_.size() - 1 - static_cast<std::size_t>(i)] != values_.back())
      throw ValidationError("knot vector: must be open (end knots repeated degree+1 times)");
  }
  if (values_[static_cast<std::size_t>(degree_ + 1)] == values_.front())
    throw ValidationError("knot vector: first knot repeated more than degree+1 times");
  if (values_[values_.size() - 2 - static_cast<std::size_t>(degree_)] == values_.back())
    throw ValidationError("knot vector: last knot repeated more than degree+1 times");
}

int KnotVector::find_span(double xi) const {
  const double lo = values_.front();
  const double hi = values_.back();
  if (xi < lo || xi > hi)
    throw DomainError(fmt::format("parameter {} outside knot range [{}, {}]", xi, lo, hi));
  const int n = num_basis();
  if (xi >= hi) return n - 1;  // right-closed final span
  // Last index s with values[s] <= xi < values[s+1].
  auto it = std::upper_bound(values_.begin(), values_.end(), xi);
  int s = static_cast<int>(it - values_.begin()) - 1;
  return std::clamp(s, degree_, n - 1);
}

std::vector<double> KnotVector::breakpoints() const {
  std::vector<double> out;
  for (double v : values_)
    if (out.empty() || v > out.back()) out.push_back(v);
  return out;
}

int KnotVector::max_interior_multiplicity() const {
  int best = 0;
  std::size_t i = static_cast<std::size_t>(degree_) + 1;
  const std::size_t end = values_.size() - static_cast<std::size_t>(degree_) - 1;
  while (i < end) {
    std::size_t j = i;
    while (j < end && values_[j] == values_[i]) ++j;
    best = std::max(best, static_cast<int>(j - i));
    i = j;
  }
  return best;
}

SplineSpace1D::SplineSpace1D(KnotVector knots)
    : knots_(std::move(knots)), regularity_(knots_.degree() - knots_.max_interior_multiplicity()) {
  if (knots_.max_interior_multiplicity() > knots_.degree() + 1)
    throw ValidationError("spline space: interior multiplicity exceeds degree+1");
}

ActiveBasis eval_basis(const SplineSpace1D& space, double xi) {
  const KnotVector& kv = space.knots();
  const int p = kv.degree();
  const int s = kv.find_span(xi);

  // Knot-difference form of the Cox-de Boor recursion (inverted triangle).
  ActiveBasis out;
  out.first = s - p;
  out.values.assign(static_cast<std::size_t>(p) + 1, 0.0);
  std::vector<double> left(static_cast<std::size_t>(p) + 1);
  std::vector<double> right(static_cast<std::size_t>(p) + 1);
  out.values[0] = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[static_cast<std::size_t>(j)] = xi - kv[s + 1 - j];
    right[static_cast<std::size_t>(j)] = kv[s + j] - xi;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double denom = right[static_cast<std::size_t>(r + 1)] + left[static_cast<std::size_t>(j - r)];
      const double temp = out.values[static_cast<std::size_t>(r)] / denom;
      out.values[static_cast<std::size_t>(r)] = saved + right[static_cast<std::size_t>(r + 1)] * temp;
      saved = left[static_cast<std::size_t>(j - r)] * temp;
    }
    out.values[static_cast<std::size_t>(j)] = saved;
  }
  return out;
}

ActiveBasisDerivatives eval_basis_derivatives(const SplineSpace1D& space, double xi,
                                              int max_order) {
  if (max_order < 0) throw DomainError("derivative order must be nonnegative");
  const KnotVector& kv = space.knots();
  const int p = kv.degree();
  const int s = kv.find_span(xi);

  // Full triangle of lower-degree basis values plus the knot differences,
  // then the standard derivative recursion on top of it.
  Eigen::MatrixXd ndu(p + 1, p + 1);
  std::vector<double> left(static_cast<std::size_t>(p) + 1);
  std::vector<double> right(static_cast<std::size_t>(p) + 1);
  ndu(0, 0) = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[static_cast<std::size_t>(j)] = xi - kv[s + 1 - j];
    right[static_cast<std::size_t>(j)] = kv[s + j] - xi;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      ndu(j, r) = right[static_cast<std::size_t>(r + 1)] + left[static_cast<std::size_t>(j - r)];
      const double temp = ndu(r, j - 1) / ndu(j, r);
      ndu(r, j) = saved + right[static_cast<std::size_t>(r + 1)] * temp;
      saved = left[static_cast<std::size_t>(j - r)] * temp;
    }
    ndu(j, j) = saved;
  }

  ActiveBasisDerivatives out;
  out.first = s - p;
  out.rows = Eigen::MatrixXd::Zero(max_order + 1, p + 1);
  for (int j = 0; j <= p; ++j) out.rows(0, j) = ndu(j, p);

  const int kmax = std::min(max_order, p);
  Eigen::MatrixXd a(2, p + 1);
  for (int r = 0; r <= p; ++r) {
    int s1 = 0, s2 = 1;
    a(0, 0) = 1.0;
    for (int k = 1; k <= kmax; ++k) {
      double d = 0.0;
      const int rk = r - k;
      const int pk = p - k;
      if (r >= k) {
        a(s2, 0) = a(s1, 0) / ndu(pk + 1, rk);
        d = a(s2, 0) * ndu(rk, pk);
      }
      const int j1 = (rk >= -1) ? 1 : -rk;
      const int j2 = (r - 1 <= pk) ? k - 1 : p - r;
      for (int j = j1; j <= j2; ++j) {
        a(s2, j) = (a(s1, j) - a(s1, j - 1)) / ndu(pk + 1, rk + j);
        d += a(s2, j) * ndu(rk + j, pk);
      }
      if (r <= pk) {
        a(s2, k) = -a(s1, k - 1) / ndu(pk + 1, r);
        d += a(s2, k) * ndu(r, pk);
      }
      out.rows(k, r) = d;
      std::swap(s1, s2);
    }
  }
  double factor = p;
  for (int k = 1; k <= kmax; ++k) {
    for (int j = 0; j <= p; ++j) out.rows(k, j) *= factor;
    factor *= (p - k);
  }
  return out;
}

TensorSplineSpace::TensorSplineSpace(std::vector<SplineSpace1D> factors)
    : factors_(std::move(factors)) {
  if (factors_.empty() || factors_.size() > 3)
    throw ValidationError("tensor spline space: dimension must be 1, 2, or 3");
}

long TensorSplineSpace::dim() const {
  long d = 1;
  for (const auto& f : factors_) d *= f.num_basis();
  return d;
}

long TensorSplineSpace::flatten(std::span<const int> index) const {
  long flat = 0;
  long stride = 1;
  for (std::size_t axis = 0; axis < factors_.size(); ++axis) {
    flat += stride * index[axis];
    stride *= factors_[axis].num_basis();
  }
  return flat;
}

VecD eval_nurbs(const TensorSplineSpace& space, std::span<const double> xi,
                std::span<const double> weights, std::span<const VecD> points) {
  const int d = space.dim_space();
  if (static_cast<int>(xi.size()) != d)
    throw ValidationError("eval_nurbs: parameter dimension mismatch");
  const long n = space.dim();
  if (static_cast<long>(weights.size()) != n || static_cast<long>(points.size()) != n)
    throw ValidationError("eval_nurbs: weight/point count does not match space dimension");
  for (double w : weights)
    if (!(w > 0.0)) throw ValidationError("eval_nurbs: weights must be positive");

  std::array<ActiveBasis, 3> basis;
  for (int axis = 0; axis < d; ++axis) basis[static_cast<std::size_t>(axis)] = eval_basis(space.factor(axis), xi[static_cast<std::size_t>(axis)]);

  const int geo_dim = static_cast<int>(points[0].size());
  VecD numerator = VecD::Zero(geo_dim);
  double denominator = 0.0;

  std::array<int, 3> idx{0, 0, 0};
  std::array<int, 3> counts{1, 1, 1};
  for (int axis = 0; axis < d; ++axis)
    counts[static_cast<std::size_t>(axis)] = static_cast<int>(basis[static_cast<std::size_t>(axis)].values.size());

  for (int k = 0; k < counts[2]; ++k)
    for (int j = 0; j < counts[1]; ++j)
      for (int i = 0; i < counts[0]; ++i) {
        double b = basis[0].values[static_cast<std::size_t>(i)];
        idx[0] = basis[0].first + i;
        if (d > 1) {
          b *= basis[1].values[static_cast<std::size_t>(j)];
          idx[1] = basis[1].first + j;
        }
        if (d > 2) {
          b *= basis[2].values[static_cast<std::size_t>(k)];
          idx[2] = basis[2].first + k;
        }
        const long flat = space.flatten(std::span<const int>(idx.data(), static_cast<std::size_t>(d)));
        const double bw = b * weights[static_cast<std::size_t>(flat)];
        numerator += bw * points[static_cast<std::size_t>(flat)];
        denominator += bw;
      }
  return numerator / denominator;
}

SplineSpace1D uniform_refine(const SplineSpace1D& space, int n_subdiv) {
  if (n_subdiv < 1) throw DomainError("uniform_refine: n_subdiv must be >= 1");
  const KnotVector& kv = space.knots();
  if (n_subdiv == 1) return space;
  std::vector<double> values;
  const auto& v = kv.values();
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    values.push_back(v[i]);
    if (v[i + 1] > v[i]) {
      const double h = (v[i + 1] - v[i]) / n_subdiv;
      for (int k = 1; k < n_subdiv; ++k) values.push_back(v[i] + k * h);
    }
  }
  values.push_back(v.back());
  return SplineSpace1D(KnotVector(std::move(values), kv.degree()));
}

SplineSpace1D solution_space(const SplineSpace1D& geometry_space, int degree, int n_subdiv) {
  if (degree < 1) throw DomainError("solution_space: degree must be >= 1");
  if (n_subdiv < 1) throw DomainError("solution_space: n_subdiv must be >= 1");
  const std::vector<double> brk = geometry_space.knots().breakpoints();
  std::vector<double> values(static_cast<std::size_t>(degree) + 1, brk.front());
  for (std::size_t i = 0; i + 1 < brk.size(); ++i) {
    const double h = (brk[i + 1] - brk[i]) / n_subdiv;
    for (int k = 1; k <= n_subdiv; ++k)
      if (i + 2 < brk.size() || k < n_subdiv) values.push_back(brk[i] + k * h);
  }
  values.insert(values.end(), static_cast<std::size_t>(degree) + 1, brk.back());
  return SplineSpace1D(KnotVector(std::move(values), degree));
}

SplineSpace1D derivative_space(const SplineSpace1D& space) {
  const auto& v = space.knots().values();
  if (space.degree() < 1)
    throw ValidationError("derivative_space: degree must be at least 1");
  std::vector<double> reduced(v.begin() + 1, v.end() - 1);
  return SplineSpace1D(KnotVector(std::move(reduced), space.degree() - 1));
}

}  // namespace igasens
