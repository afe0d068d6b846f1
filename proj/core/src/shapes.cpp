#include "igasens/shapes.hpp"

#include <cmath>

namespace igasens::shapes {

namespace {

VecD v1(double x) {
  VecD v(1);
  v << x;
  return v;
}
VecD v2(double x, double y) {
  VecD v(2);
  v << x, y;
  return v;
}
VecD v3(double x, double y, double z) {
  VecD v(3);
  v << x, y, z;
  return v;
}

SplineSpace1D line_space(int degree) {
  std::vector<double> knots(static_cast<std::size_t>(degree) + 1, 0.0);
  knots.insert(knots.end(), static_cast<std::size_t>(degree) + 1, 1.0);
  return SplineSpace1D(KnotVector(std::move(knots), degree));
}

std::vector<VecD> scaled(const std::vector<VecD>& pts, double factor) {
  std::vector<VecD> out = pts;
  for (VecD& p : out) p *= factor;
  return out;
}

}  // namespace

MorphGeometry interval(double length, double length_end) {
  if (!(length > 0.0) || !(length_end > 0.0))
    throw DomainError("interval: lengths must be positive");
  TensorSplineSpace space({line_space(1)});
  std::vector<VecD> start{v1(0.0), v1(length)};
  std::vector<VecD> end{v1(0.0), v1(length_end)};
  Patch patch{std::move(space), {1.0, 1.0}, std::move(start)};
  return MorphGeometry({std::move(patch)}, {std::move(end)}, {});
}

MorphGeometry square(double length, double length_end) {
  if (!(length > 0.0) || !(length_end > 0.0))
    throw DomainError("square: lengths must be positive");
  TensorSplineSpace space({line_space(1), line_space(1)});
  std::vector<VecD> start{v2(0, 0), v2(length, 0), v2(0, length), v2(length, length)};
  std::vector<VecD> end = scaled(start, length_end / length);
  Patch patch{std::move(space), std::vector<double>(4, 1.0), std::move(start)};
  return MorphGeometry({std::move(patch)}, {std::move(end)}, {});
}

MorphGeometry cube(double length, double length_end) {
  if (!(length > 0.0) || !(length_end > 0.0))
    throw DomainError("cube: lengths must be positive");
  TensorSplineSpace space({line_space(1), line_space(1), line_space(1)});
  std::vector<VecD> start;
  for (int k = 0; k < 2; ++k)
    for (int j = 0; j < 2; ++j)
      for (int i = 0; i < 2; ++i) start.push_back(v3(i * length, j * length, k * length));
  std::vector<VecD> end = scaled(start, length_end / length);
  Patch patch{std::move(space), std::vector<double>(8, 1.0), std::move(start)};
  return MorphGeometry({std::move(patch)}, {std::move(end)}, {});
}

MorphGeometry quarter_annulus(double inner_radius, double outer_radius) {
  if (!(0.0 < inner_radius && inner_radius < outer_radius))
    throw DomainError("quarter_annulus: need 0 < inner < outer");
  const double c = std::sqrt(0.5);
  // Axis 0: radial (degree 1), axis 1: angular (degree 2, 0..90 degrees).
  TensorSplineSpace space({line_space(1), line_space(2)});
  std::vector<double> weights{1, 1, c, c, 1, 1};
  std::vector<VecD> pts;
  for (double angle_stop : {0, 1, 2}) {
    for (double r : {inner_radius, outer_radius}) {
      if (angle_stop == 0) pts.push_back(v2(r, 0));
      if (angle_stop == 1) pts.push_back(v2(r, r));
      if (angle_stop == 2) pts.push_back(v2(0, r));
    }
  }
  Patch patch{std::move(space), std::move(weights), pts};
  return MorphGeometry({std::move(patch)}, {pts}, {});
}

MorphGeometry disk(double radius, double radius_end) {
  if (!(radius > 0.0) || !(radius_end > 0.0))
    throw DomainError("disk: radii must be positive");
  const double r = radius;
  const double s = 0.5 * r;          // half-width of the central square
  const double c = std::sqrt(0.5);
  const double ro = r * c;           // circle point on the diagonals
  const double rt = r / c;           // tangent intersection distance

  std::vector<Patch> patches;
  std::vector<std::vector<VecD>> ends;

  // Patch 0: central square, biquadratic with matching rational edge
  // parametrization (tensor weights [1,c,1] x [1,c,1]).
  {
    TensorSplineSpace space({line_space(2), line_space(2)});
    const double grid[3] = {-s, 0.0, s};
    const double u[3] = {1.0, c, 1.0};
    std::vector<VecD> pts;
    std::vector<double> weights;
    for (int j = 0; j < 3; ++j)
      for (int i = 0; i < 3; ++i) {
        pts.push_back(v2(grid[i], grid[j]));
        weights.push_back(u[i] * u[j]);
      }
    patches.push_back(Patch{std::move(space), std::move(weights), pts});
    ends.push_back(scaled(pts, radius_end / radius));
  }

  // Patches 1..4: annular quadrants. Axis 0 is radial (inner edge -> circle),
  // axis 1 is the counterclockwise angular direction, so det(dF) > 0.
  // Inner edges are straight segments sharing the square's rational edge
  // parametrization; outer edges are exact 90-degree arcs.
  struct Quadrant {
    VecD in0, in1, in2;    // inner edge control points
    VecD out0, out1, out2; // outer arc control points
  };
  const Quadrant quadrants[4] = {
      // right: -45 deg .. +45 deg
      {v2(s, -s), v2(s, 0), v2(s, s), v2(ro, -ro), v2(rt, 0), v2(ro, ro)},
      // top: 45 .. 135
      {v2(s, s), v2(0, s), v2(-s, s), v2(ro, ro), v2(0, rt), v2(-ro, ro)},
      // left: 135 .. 225
      {v2(-s, s), v2(-s, 0), v2(-s, -s), v2(-ro, ro), v2(-rt, 0), v2(-ro, -ro)},
      // bottom: 225 .. 315
      {v2(-s, -s), v2(0, -s), v2(s, -s), v2(-ro, -ro), v2(0, -rt), v2(ro, -ro)},
  };
  for (const Quadrant& q : quadrants) {
    TensorSplineSpace space({line_space(1), line_space(2)});
    std::vector<VecD> pts{q.in0, q.out0, q.in1, q.out1, q.in2, q.out2};
    std::vector<double> weights{1, 1, c, c, 1, 1};
    patches.push_back(Patch{std::move(space), std::move(weights), pts});
    ends.push_back(scaled(pts, radius_end / radius));
  }

  // Square edge <-> annulus inner edge, then lateral edges between quadrants.
  std::vector<Interface> interfaces{
      {0, 1, 1, 0, 0},  // square right edge, same direction
      {0, 3, 2, 0, 1},  // square top edge, reversed
      {0, 0, 3, 0, 1},  // square left edge, reversed
      {0, 2, 4, 0, 0},  // square bottom edge, same direction
      {1, 3, 2, 2, 0},  // right/top lateral edge at 45 degrees
      {2, 3, 3, 2, 0},  // top/left at 135
      {3, 3, 4, 2, 0},  // left/bottom at 225
      {4, 3, 1, 2, 0},  // bottom/right at 315
  };
  return MorphGeometry(std::move(patches), std::move(ends), std::move(interfaces));
}

}  // namespace igasens::shapes
