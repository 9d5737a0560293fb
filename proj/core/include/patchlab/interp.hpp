#pragma once

#include <cmath>

#include "patchlab/grid.hpp"
#include "patchlab/vec.hpp"

namespace patchlab::interp {

/// Periodic bilinear / trilinear sampling.
double sample_linear(const ScalarField& f, const Vec3& p);
Vec3 sample_linear(const VectorField& f, const Vec3& p);

/// Periodic Catmull-Rom (C^1) sampling; used wherever smooth dependence on
/// the sample point matters (flow-map integration, boundary traces).
double sample_cubic(const ScalarField& f, const Vec3& p);
Vec3 sample_cubic(const VectorField& f, const Vec3& p);

/// Catmull-Rom sampling clamped to the local data range (monotone transport).
double sample_cubic_clamped(const ScalarField& f, const Vec3& p);

/// Value and spatial gradient of the Catmull-Rom interpolant (2-D grids).
void sample_cubic_jet(const ScalarField& f, const Vec3& p, double& value, Vec3& grad);

}  // namespace patchlab::interp
