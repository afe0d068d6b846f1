#pragma once

#include <Eigen/Dense>

#include "igasens/assembly.hpp"
#include "igasens/eigensolve.hpp"

namespace igasens {

/// Derivatives of one eigenpair: lambda[k] and vectors.col(k) are the k-th
/// t-derivative values of the eigenvalue and eigenvector (column 0 is the
/// base pair). The normalization vector u_star is frozen across orders, so
/// d^k/dt^k (u_star^T M[t] u_t) = [k == 0] holds for every k.
struct EigenpairJet {
  int mode = 1;  // 1-based
  Eigen::VectorXd lambda;
  Eigen::MatrixXd vectors;
  Eigen::VectorXd u_star;
  Eigen::VectorXd residuals;        // scaled defect per order 1..n
  double condition_estimate = 0.0;  // 1-norm estimate of the bordered matrix
  int factorization_count = 0;
};

struct MultiplicityReport {
  bool simple = false;
  double gap = 0.0;  // min_j |lambda_m - lambda_j| / max(1, |lambda_m|)
};

/// Relative spectral gap of a mode among the computed eigenvalues.
MultiplicityReport check_multiplicity(const EigenSolution& base, int mode, double gap_tol);

/// Eigenpair derivatives up to max_order via bordered linear solves with the
/// fixed matrix [[K - lambda M, -M u], [u_star^T M, 0]]; the matrix is
/// factorized once and reused for every order. Requires a simple eigenvalue
/// (MultiplicityError otherwise) and system.order >= max_order.
EigenpairJet eigenpair_derivatives(const AssembledSystem& system, const EigenSolution& base,
                                   int mode, int max_order, double gap_tol = 1e-6);

}  // namespace igasens
