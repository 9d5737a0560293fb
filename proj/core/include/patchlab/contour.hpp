#pragma once

#include <vector>

#include "patchlab/grid.hpp"
#include "patchlab/vec.hpp"

namespace patchlab::contour {

/// Closed marker ring (planar, counterclockwise).
using Ring = std::vector<Vec3>;

double ring_area(const Ring& ring);  // shoelace

/// Ratio of the largest to the smallest adjacent marker spacing.
double spacing_ratio(const Ring& ring);

/// Periodic Catmull-Rom resample to `count` markers, equispaced in arc
/// length along the current polygon.
Ring reparametrize(const Ring& ring, int count);

/// Scanline point-in-polygon indicator sampled at grid nodes (1 inside).
ScalarField rasterize(const Ring& ring, const Grid& g);

/// Area-fraction indicator: cells cut by the contour carry their coverage
/// fraction (supersampled scanlines).  Used for the velocity-solve rebuild,
/// where the staircase bias of the sharp indicator would push markers.
ScalarField rasterize_fraction(const Ring& ring, const Grid& g, int subsamples = 4);

/// Free-space contour-dynamics velocity of a uniform patch with vorticity
/// jump `jump` (interior minus exterior): the boundary integral of the 2-D
/// fundamental solution along the ring (trapezoid rule; the self marker is
/// skipped, which is the principal value for smooth contours).
Vec3 cd_velocity(const Ring& ring, double jump, const Vec3& p, int skip = -1);

/// Velocity gradient of the same representation (principal value).
void cd_velocity_gradient(const Ring& ring, double jump, const Vec3& p, int skip,
                          double grad[2][2]);

/// Orientation angle of the ring from second moments, in [-pi/2, pi/2).
double orientation_angle(const Ring& ring);

}  // namespace patchlab::contour
