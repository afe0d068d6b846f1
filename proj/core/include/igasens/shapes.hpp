#pragma once

#include "igasens/geometry.hpp"

namespace igasens::shapes {

/// Interval [0, length] in 1D, morphing to [0, length_end].
MorphGeometry interval(double length, double length_end);

/// Axis-aligned square [0, L]^2, single bilinear patch, morphing to [0, L_end]^2.
MorphGeometry square(double length, double length_end);

/// Axis-aligned cube [0, L]^3, single trilinear patch, morphing to [0, L_end]^3.
MorphGeometry cube(double length, double length_end);

/// Quarter annulus (first quadrant) between the given radii, one rational
/// patch representing the circular arcs exactly. No morph.
MorphGeometry quarter_annulus(double inner_radius, double outer_radius);

/// Disk of radius r as the five-patch cavity-style layout: a central square
/// of half-width r/2 surrounded by four rational annular patches whose outer
/// edges trace the circle exactly. Morphs radially from radius r to r_end by
/// scaling every control point.
MorphGeometry disk(double radius, double radius_end);

}  // namespace igasens::shapes
