#pragma once

#include <vector>

#include "patchlab/grid.hpp"
#include "patchlab/vec.hpp"

namespace patchlab {

/// Smooth bounded domain described by a signed function delta with
/// delta > 0 inside, delta = 0 on the boundary and n = -grad(delta) the unit
/// outward normal on boundary points.  Only the disk (2-D) and ball (3-D)
/// are supported; both use the closed form
///
///   delta(x) = (R^2 - |x - c|^2) / (2R),   grad(delta) = -(x - c)/R,
///
/// which is smooth everywhere and has |grad(delta)| = 1 on |x - c| = R.
struct Domain {
    int dim = 2;
    Vec3 center;
    double radius = 0.0;
    double box_extent = 0.0;

    double delta(const Vec3& p) const {
        const Vec3 q = p - center;
        return (radius * radius - dot(q, q)) / (2.0 * radius);
    }
    Vec3 grad_delta(const Vec3& p) const { return (center - p) / radius; }

    /// Unit outward normal; exact on the boundary, normalized radial elsewhere.
    Vec3 outward_normal(const Vec3& p) const { return normalized(p - center); }

    double diameter() const { return 2.0 * radius; }

    /// Geometric distance to the boundary (exact for the disk/ball).
    double boundary_distance(const Vec3& p) const { return radius - norm(p - center); }

    bool inside(const Vec3& p) const { return delta(p) > 0.0; }

    /// Uniform boundary sample (theta in 2-D; Fibonacci sphere point in 3-D).
    Vec3 boundary_point(int i, int count) const;
    std::vector<Vec3> boundary_samples(int count) const;
};

/// Disk of radius R centered in the periodic box of `grid`.  Throws if the
/// disk does not fit strictly inside the box with a margin of at least 4h
/// (spectral wrap-around would otherwise contaminate every extension).
Domain domain_disk(const Grid& grid, double R);

/// Ball of radius R centered in a 3-D periodic box; same margin rule.
Domain domain_ball(const Grid& grid, double R);

}  // namespace patchlab
