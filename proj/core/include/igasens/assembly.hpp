#pragma once

#include <iosfwd>
#include <vector>

#include <Eigen/Sparse>

#include "igasens/jets.hpp"
#include "igasens/spaces.hpp"

namespace igasens {

/// Which fixed domain the pullback integrals live on: the reference cube
/// (transformation F[t]) or the start-of-morph physical domain (F-tilde[t],
/// itself integrated through F0). Both produce the same matrices up to
/// quadrature roundoff.
enum class AssemblyForm { Reference, Physical };

/// Stiffness/mass derivative stacks at one expansion point: K[k] and M[k]
/// hold the k-th t-derivatives of the constrained system matrices.
struct AssembledSystem {
  ProblemKind kind = ProblemKind::H1;
  double t0 = 0.0;
  int order = 0;
  std::vector<Eigen::SparseMatrix<double>> K;
  std::vector<Eigen::SparseMatrix<double>> M;

  int num_dofs() const { return static_cast<int>(K.front().rows()); }
};

/// Assembles K and M together with their t-derivatives up to `order` at the
/// expansion point t0, by inserting the pullback coefficient jets into the
/// fixed-domain integrals. quad_points = 0 chooses degree+1 Gauss points per
/// direction. Throws GeometryError if the mapping is invalid at a quadrature
/// point and SingularityError if the Jacobian is numerically singular there.
AssembledSystem assemble(const DiscreteSpace& space, const MorphGeometry& geom, double t0,
                         int order, int quad_points = 0,
                         AssemblyForm form = AssemblyForm::Reference);

struct DirectSystem {
  Eigen::SparseMatrix<double> K;
  Eigen::SparseMatrix<double> M;
};

/// Plain assembly at parameter t (the order-zero pullback); the reference
/// check for the derivative stacks.
DirectSystem assemble_direct(const DiscreteSpace& space, const MorphGeometry& geom, double t,
                             int quad_points = 0, AssemblyForm form = AssemblyForm::Reference);

/// Coefficient map taking scalar coefficients on an H1 space to the
/// coefficients of their gradient in the matching HCurl space (same patch,
/// degrees and refinement). Columns are H1 active dofs, rows HCurl ones.
Eigen::SparseMatrix<double> discrete_gradient(const DiscreteSpace& h1_space,
                                              const DiscreteSpace& hcurl_space);

/// Writes the lower triangle in "i j value" coordinate text form (0-based,
/// 17 significant digits).
void dump_lower_triangle(std::ostream& out, const Eigen::SparseMatrix<double>& matrix);

}  // namespace igasens
