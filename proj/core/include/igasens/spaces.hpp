#pragma once

#include <vector>

#include "igasens/geometry.hpp"
#include "igasens/splines.hpp"

namespace igasens {

enum class ProblemKind { H1, HCurl };

/// Configuration of a discretization space on a morph geometry.
struct SpaceOptions {
  std::vector<int> degrees;    // per direction; a single entry broadcasts
  int refine = 1;              // subdivisions per geometry knot span
  bool apply_dirichlet = true; // eliminate boundary dofs
};

/// Conforming discrete space on the reference domains of all patches.
///
/// H1: one scalar tensor space per patch, glued C0 across declared
/// interfaces by dof identification. HCurl: d component spaces per patch
/// with degree and regularity lowered in the component's own direction
/// (single patch only). Dirichlet rows are eliminated: for H1 all basis
/// functions supported on the physical boundary, for HCurl the tangential
/// trace layers.
class DiscreteSpace {
public:
  static DiscreteSpace build(const MorphGeometry& geom, ProblemKind kind,
                             const SpaceOptions& options);

  ProblemKind kind() const { return kind_; }
  int dimension() const { return dim_; }
  int num_patches() const { return static_cast<int>(components_.size()); }
  int num_components() const { return kind_ == ProblemKind::H1 ? 1 : dim_; }

  /// Active (post-elimination) dof count.
  int num_dofs() const { return num_active_; }
  /// Glued dof count before boundary elimination.
  int num_dofs_glued() const { return num_glued_; }

  const TensorSplineSpace& component_space(int patch, int comp) const;
  /// Base (undifferentiated) 1D solution space of a patch direction; all
  /// component spaces share its breakpoints.
  const SplineSpace1D& base_space(int patch, int axis) const;

  /// Active dof id of a patch-local component basis function, or -1 if the
  /// dof was eliminated.
  long active_index(int patch, int comp, long flat) const;

  const SpaceOptions& options() const { return options_; }

private:
  DiscreteSpace() = default;

  ProblemKind kind_ = ProblemKind::H1;
  int dim_ = 0;
  int num_active_ = 0;
  int num_glued_ = 0;
  SpaceOptions options_;
  std::vector<std::vector<TensorSplineSpace>> components_;  // [patch][comp]
  std::vector<std::vector<SplineSpace1D>> base_;            // [patch][axis]
  std::vector<std::vector<std::vector<long>>> active_;      // [patch][comp][flat]
};

}  // namespace igasens
