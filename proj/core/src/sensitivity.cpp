#include "igasens/sensitivity.hpp"

#include <cmath>
#include <fmt/format.h>

#include <Eigen/SparseLU>

#include "igasens/jets.hpp"

namespace igasens {

namespace {

double one_norm(const Eigen::SparseMatrix<double>& m) {
  double best = 0.0;
  for (int col = 0; col < m.outerSize(); ++col) {
    double sum = 0.0;
    for (Eigen::SparseMatrix<double>::InnerIterator it(m, col); it; ++it)
      sum += std::abs(it.value());
    best = std::max(best, sum);
  }
  return best;
}

// Hager-style 1-norm estimate of the inverse through the existing
// factorization (a handful of solves with the matrix and its adjoint).
// Non-const because SparseLU::adjoint() is non-const.
double inverse_one_norm_estimate(Eigen::SparseLU<Eigen::SparseMatrix<double>>& lu, int n) {
  Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0 / n);
  double estimate = 0.0;
  for (int iter = 0; iter < 5; ++iter) {
    const Eigen::VectorXd y = lu.solve(x);
    estimate = y.lpNorm<1>();
    Eigen::VectorXd xi(n);
    for (int i = 0; i < n; ++i) xi(i) = (y(i) >= 0.0) ? 1.0 : -1.0;
    const Eigen::VectorXd z = lu.adjoint().solve(xi);
    int j = 0;
    double zmax = 0.0;
    for (int i = 0; i < n; ++i)
      if (std::abs(z(i)) > zmax) {
        zmax = std::abs(z(i));
        j = i;
      }
    if (zmax <= z.dot(x)) break;
    x.setZero();
    x(j) = 1.0;
  }
  return estimate;
}

}  // namespace

MultiplicityReport check_multiplicity(const EigenSolution& base, int mode, double gap_tol) {
  const int count = static_cast<int>(base.values.size());
  if (mode < 1 || mode > count)
    throw DomainError(fmt::format("check_multiplicity: mode {} outside [1, {}]", mode, count));
  MultiplicityReport report;
  if (count == 1) {
    report.gap = std::numeric_limits<double>::infinity();
    report.simple = true;
    return report;
  }
  const double lambda = base.values(mode - 1);
  double gap = std::numeric_limits<double>::infinity();
  for (int j = 0; j < count; ++j)
    if (j != mode - 1) gap = std::min(gap, std::abs(lambda - base.values(j)));
  report.gap = gap / std::max(1.0, std::abs(lambda));
  report.simple = report.gap > gap_tol;
  return report;
}

EigenpairJet eigenpair_derivatives(const AssembledSystem& system, const EigenSolution& base,
                                   int mode, int max_order, double gap_tol) {
  if (max_order < 1) throw DomainError("eigenpair_derivatives: max_order must be >= 1");
  if (system.order < max_order)
    throw ValidationError(fmt::format(
        "eigenpair_derivatives: system carries order {} but order {} was requested",
        system.order, max_order));
  const MultiplicityReport mult = check_multiplicity(base, mode, gap_tol);
  if (!mult.simple)
    throw MultiplicityError(fmt::format(
        "eigenpair_derivatives: mode {} is not simple (relative gap {:.3e} <= {:.3e}); "
        "derivatives of multiple eigenvalues are not supported",
        mode, mult.gap, gap_tol));

  const int n = system.num_dofs();
  const double lambda0 = base.values(mode - 1);
  const Eigen::VectorXd u0 = base.vectors.col(mode - 1);
  const Eigen::VectorXd u_star = base.u_star.col(mode - 1);

  // Bordered matrix [[K - lambda M, -M u], [u_star^T M, 0]], factorized once.
  const Eigen::VectorXd Mu = system.M[0] * u0;
  const Eigen::VectorXd Mus = system.M[0] * u_star;
  Eigen::SparseMatrix<double> shifted = system.K[0] - lambda0 * system.M[0];
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(shifted.nonZeros()) + 2 * static_cast<std::size_t>(n));
  for (int col = 0; col < shifted.outerSize(); ++col)
    for (Eigen::SparseMatrix<double>::InnerIterator it(shifted, col); it; ++it)
      triplets.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
  for (int i = 0; i < n; ++i) {
    if (Mu(i) != 0.0) triplets.emplace_back(i, n, -Mu(i));
    if (Mus(i) != 0.0) triplets.emplace_back(n, i, Mus(i));
  }
  Eigen::SparseMatrix<double> bordered(n + 1, n + 1);
  bordered.setFromTriplets(triplets.begin(), triplets.end());

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(bordered);
  if (lu.info() != Eigen::Success)
    throw NumericalRankError("eigenpair_derivatives: bordered matrix is numerically singular");

  EigenpairJet jet;
  jet.mode = mode;
  jet.lambda = Eigen::VectorXd::Zero(max_order + 1);
  jet.vectors = Eigen::MatrixXd::Zero(n, max_order + 1);
  jet.u_star = u_star;
  jet.residuals = Eigen::VectorXd::Zero(max_order);
  jet.lambda(0) = lambda0;
  jet.vectors.col(0) = u0;
  jet.factorization_count = 1;
  jet.condition_estimate = one_norm(bordered) * inverse_one_norm_estimate(lu, n + 1);

  const double norm_K = one_norm(system.K[0]);
  const double norm_M = one_norm(system.M[0]);

  // (lambda M)^(i) u^(k-i) pieces assembled by the Leibniz rule; the terms
  // containing the unknowns u^(k) and lambda^(k) sit on the left-hand side.
  for (int k = 1; k <= max_order; ++k) {
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
    for (int i = 1; i <= k; ++i) {
      const Eigen::VectorXd& u_prev = jet.vectors.col(k - i);
      Eigen::VectorXd term = system.K[i] * u_prev;
      for (int j = 0; j <= i; ++j) {
        if (i == k && j == k) continue;  // unknown lambda^(k) M u0 stays on the LHS
        term -= binomial(i, j) * jet.lambda(j) * (system.M[i - j] * u_prev);
      }
      rhs.head(n) -= binomial(k, i) * term;
      rhs(n) -= binomial(k, i) * u_star.dot(system.M[i] * u_prev);
    }

    const Eigen::VectorXd sol = lu.solve(rhs);
    jet.vectors.col(k) = sol.head(n);
    jet.lambda(k) = sol(n);

    // Re-verify the defining Leibniz identity at this order, measured
    // against the gross magnitude of the cancelling terms.
    Eigen::VectorXd defect = Eigen::VectorXd::Zero(n);
    double gross = (norm_K + std::abs(lambda0) * norm_M) * u0.norm();
    for (int i = 0; i <= k; ++i) {
      const Eigen::VectorXd& u_prev = jet.vectors.col(k - i);
      Eigen::VectorXd term = system.K[i] * u_prev;
      for (int j = 0; j <= i; ++j)
        term -= binomial(i, j) * jet.lambda(j) * (system.M[i - j] * u_prev);
      defect += binomial(k, i) * term;
      gross = std::max(gross, binomial(k, i) * term.norm());
    }
    jet.residuals(k - 1) = defect.norm() / gross;
    if (jet.residuals(k - 1) > 1e-6)
      throw NumericalRankError(fmt::format(
          "eigenpair_derivatives: order-{} defect {:.3e} indicates a rank-deficient "
          "bordered system",
          k, jet.residuals(k - 1)));
  }
  return jet;
}

}  // namespace igasens
