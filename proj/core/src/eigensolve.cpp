#include "igasens/eigensolve.hpp"

#include <cmath>
#include <fmt/format.h>
#include <numbers>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

namespace igasens {

namespace {

double inf_norm(const Eigen::SparseMatrix<double>& m) {
  Eigen::VectorXd row_sums = Eigen::VectorXd::Zero(m.rows());
  for (int col = 0; col < m.outerSize(); ++col)
    for (Eigen::SparseMatrix<double>::InnerIterator it(m, col); it; ++it)
      row_sums(it.row()) += std::abs(it.value());
  return m.rows() ? row_sums.maxCoeff() : 0.0;
}

void fix_sign(Eigen::Ref<Eigen::VectorXd> u) {
  int at = 0;
  double best = 0.0;
  for (int i = 0; i < u.size(); ++i)
    if (std::abs(u(i)) > best) {
      best = std::abs(u(i));
      at = i;
    }
  if (u(at) < 0.0) u = -u;
}

EigenSolution finalize(const AssembledSystem& system, Eigen::VectorXd values,
                       Eigen::MatrixXd vectors, double tol) {
  EigenSolution out;
  out.values = std::move(values);
  out.vectors = std::move(vectors);
  for (int m = 0; m < out.vectors.cols(); ++m) fix_sign(out.vectors.col(m));
  out.u_star = out.vectors;

  const double norm_K = inf_norm(system.K[0]);
  const double norm_M = inf_norm(system.M[0]);
  for (int m = 0; m < out.values.size(); ++m) {
    const Eigen::VectorXd residual =
        system.K[0] * out.vectors.col(m) - out.values(m) * (system.M[0] * out.vectors.col(m));
    const double bound = tol * (norm_K + std::abs(out.values(m)) * norm_M);
    if (residual.norm() > bound * out.vectors.col(m).norm())
      throw NumericalRankError(fmt::format(
          "eigen solve residual {} exceeds bound {} for mode {}", residual.norm(), bound, m + 1));
  }

  const double zero_tol = 1e-8 * std::max(1.0, out.values.size() ? out.values.maxCoeff() : 0.0);
  out.num_zero = 0;
  for (int m = 0; m < out.values.size(); ++m)
    if (std::abs(out.values(m)) < zero_tol) ++out.num_zero;
  return out;
}

EigenSolution solve_dense(const AssembledSystem& system, int count, double tol) {
  const Eigen::MatrixXd K(system.K[0]);
  const Eigen::MatrixXd M(system.M[0]);

  // Guard the Cholesky reduction: Eigen's generalized solver assumes M > 0.
  Eigen::LLT<Eigen::MatrixXd> llt(M);
  if (llt.info() != Eigen::Success)
    throw DefinitenessError("solve_gevp: mass matrix is not positive definite");

  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(K, M,
                                                                   Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success)
    throw NumericalRankError("solve_gevp: dense eigenvalue iteration failed");

  return finalize(system, solver.eigenvalues().head(count),
                  solver.eigenvectors().leftCols(count), tol);
}

EigenSolution solve_shift_invert(const AssembledSystem& system, int count, double tol) {
  const int n = system.num_dofs();
  const Eigen::SparseMatrix<double>& K = system.K[0];
  const Eigen::SparseMatrix<double>& M = system.M[0];

  // Negative shift keeps K - sigma M positive definite for semidefinite K.
  const double sigma = -1e-3 * (inf_norm(K) / std::max(inf_norm(M), 1e-300) + 1.0);
  Eigen::SparseMatrix<double> shifted = K - sigma * M;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> factor(shifted);
  if (factor.info() != Eigen::Success)
    throw DefinitenessError("solve_gevp: shift-invert factorization failed");

  const int block = std::min(n, count + std::min(count + 8, 16));
  Eigen::MatrixXd X(n, block);
  for (int j = 0; j < block; ++j)
    for (int i = 0; i < n; ++i) X(i, j) = std::sin(static_cast<double>((i + 1) * (j + 1)));

  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
  const double norm_K = inf_norm(K);
  const double norm_M = inf_norm(M);
  for (int iter = 0; iter < 300; ++iter) {
    X = factor.solve(M * X);
    // M-orthonormalize the block.
    Eigen::MatrixXd G = X.transpose() * (M * X);
    Eigen::LLT<Eigen::MatrixXd> gram(G);
    if (gram.info() != Eigen::Success)
      throw NumericalRankError("solve_gevp: subspace became degenerate");
    X = gram.matrixL().solve(X.transpose()).transpose();

    // Rayleigh-Ritz on the block.
    Eigen::MatrixXd Kp = X.transpose() * (K * X);
    Eigen::MatrixXd Mp = X.transpose() * (M * X);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> small(Kp, Mp,
                                                                    Eigen::ComputeEigenvectors);
    X = X * small.eigenvectors();
    values = small.eigenvalues().head(count);
    vectors = X.leftCols(count);

    double worst = 0.0;
    for (int m = 0; m < count; ++m) {
      const Eigen::VectorXd r = K * vectors.col(m) - values(m) * (M * vectors.col(m));
      worst = std::max(worst, r.norm() / ((norm_K + std::abs(values(m)) * norm_M) *
                                          vectors.col(m).norm()));
    }
    if (worst < 0.1 * tol) break;
  }
  return finalize(system, values, vectors, tol);
}

}  // namespace

EigenSolution solve_gevp(const AssembledSystem& system, int count, double tol,
                         GevpMethod method) {
  const int n = system.num_dofs();
  if (count < 1 || count > n)
    throw DomainError(fmt::format("solve_gevp: count {} outside [1, {}]", count, n));
  if (method == GevpMethod::Dense) return solve_dense(system, count, tol);
  return solve_shift_invert(system, count, tol);
}

double frequency(double lambda) {
  if (lambda < 0.0) throw DomainError("frequency: eigenvalue must be nonnegative");
  return std::sqrt(lambda) * kSpeedOfLight / (2.0 * std::numbers::pi);
}

}  // namespace igasens
