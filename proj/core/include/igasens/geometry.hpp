#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "igasens/splines.hpp"

namespace igasens {

/// One NURBS patch: tensor spline space, positive weights and control points
/// (physical coordinates in meters). Weights and points are stored in the
/// flat tensor order of the space (first factor fastest).
struct Patch {
  TensorSplineSpace space;
  std::vector<double> weights;
  std::vector<VecD> points;
};

/// A conforming interface between two patch faces. Face f of a patch has
/// axis f/2 and side f%2 (0: parameter 0, 1: parameter 1). The orientation
/// encodes how tangential indices map from face_a to face_b: in 2D, 0 keeps
/// the edge direction and 1 reverses it; in 3D only orientation 0 (identical
/// tangential axes and directions) is supported.
struct Interface {
  int patch_a = 0;
  int face_a = 0;
  int patch_b = 0;
  int face_b = 0;
  int orientation = 0;
};

/// Values and reference-coordinate gradients of the active rational basis
/// functions of a patch at one parameter point.
struct RationalBasis {
  std::vector<long> indices;          // flat tensor indices
  std::vector<double> values;         // R_i
  std::vector<VecD> gradients;        // grad R_i
};

struct ValidityReport {
  double min_det = 0.0;
  bool valid = false;
};

/// A family of domains Omega[t] spanned by two control nets of identical
/// layout: control points move along the convex combination
/// P_i[t] = (1-t) P_{0,i} + t P_{1,i} while weights stay fixed, so the
/// mapping and its Jacobian are affine in t.
class MorphGeometry {
public:
  MorphGeometry(std::vector<Patch> patches_start,
                std::vector<std::vector<VecD>> points_end,
                std::vector<Interface> interfaces);

  int dimension() const { return dim_; }
  int num_patches() const { return static_cast<int>(patches_.size()); }
  const Patch& patch(int p) const;
  const std::vector<VecD>& points_end(int p) const;
  std::span<const Interface> interfaces() const { return interfaces_; }

  /// True if any control point actually moves between t=0 and t=1.
  bool has_morph() const;

  /// F[t](xhat) for xhat in the closed reference cube.
  VecD map_point(int patch, double t, std::span<const double> xhat) const;

  /// Jacobian dF[t]/dxhat, analytic.
  MatD jacobian(int patch, double t, std::span<const double> xhat) const;

  /// Jacobian of the start mapping F0.
  MatD jacobian_start(int patch, std::span<const double> xhat) const;

  /// The t-independent matrix sum_i (P_{1,i}-P_{0,i}) grad(R_i)^T such that
  /// dF[t] = dF0 + t * velocity_jacobian.
  MatD velocity_jacobian(int patch, std::span<const double> xhat) const;

  /// Both Jacobian factors of the affine family in one basis evaluation.
  struct MorphJacobians {
    MatD J0;
    MatD JV;
  };
  MorphJacobians morph_jacobians(int patch, std::span<const double> xhat) const;

  /// Rational basis values and gradients of the geometry space at xhat.
  RationalBasis rational_basis(int patch, std::span<const double> xhat) const;

  /// Samples det(dF[t]) on a tensor grid per nonempty knot span of every
  /// patch; valid iff the minimum stays positive.
  ValidityReport validate_mapping(double t, int samples_per_element) const;

private:
  VecD point_at(int patch, long flat, double t) const;

  std::vector<Patch> patches_;
  std::vector<std::vector<VecD>> points_end_;
  std::vector<Interface> interfaces_;
  int dim_ = 0;
};

/// Index map of the solution/geometry dofs on a patch face, ordered so that
/// walking both faces of an interface in parallel visits coincident points.
/// counts[] are the per-tangential-axis basis counts of the supplied space.
std::vector<long> face_indices(const TensorSplineSpace& space, int face);

/// Applies an interface orientation to the face index list of side b so it
/// pairs element-wise with side a. Throws UnsupportedError for 3D
/// orientations other than 0.
std::vector<long> orient_face_indices(const TensorSplineSpace& space_b, int face_b,
                                      int orientation);

/// Geometry JSON (schema documented in the README): load, with field-level
/// diagnostics on errors, and save.
MorphGeometry load_geometry(const std::filesystem::path& file);
MorphGeometry parse_geometry(const std::string& json_text);
std::string geometry_to_json(const MorphGeometry& geom);
void save_geometry(const MorphGeometry& geom, const std::filesystem::path& file);

}  // namespace igasens
