#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "igasens/assembly.hpp"

namespace igasens {

/// Speed of light in vacuum [m/s].
inline constexpr double kSpeedOfLight = 299'792'458.0;

/// Solution of the generalized eigenvalue problem K u = lambda M u.
///
/// Eigenvalues ascend; eigenvectors satisfy the root-finding normalization
/// u_star^T M u = 1 with u_star frozen to the eigenvector itself at solve
/// time (stored separately so later stages reuse it unchanged). Signs are
/// fixed so the largest-magnitude entry is positive.
struct EigenSolution {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
  Eigen::MatrixXd u_star;
  int num_zero = 0;  // numerically-zero eigenvalues among the returned ones
};

enum class GevpMethod {
  Dense,        // Cholesky reduction to a standard symmetric problem
  ShiftInvert,  // sparse factorization + subspace iteration, same contract
};

/// Smallest `count` eigenpairs of K[0] u = lambda M[0] u.
/// Throws DefinitenessError if M is not positive definite and DomainError
/// for a count outside [1, n_dof].
EigenSolution solve_gevp(const AssembledSystem& system, int count, double tol = 1e-9,
                         GevpMethod method = GevpMethod::Dense);

/// Resonant frequency f = sqrt(lambda) c0 / (2 pi) for lambda in 1/m^2.
double frequency(double lambda);

}  // namespace igasens
