#pragma once

#include <string>
#include <vector>

#include "patchlab/grid.hpp"

namespace patchlab::io {

/// Field snapshot format (little-endian):
///   magic      "PLFS"            4 bytes
///   version    u32 = 1
///   dim        u32
///   ncomp      u32 (1 for scalar)
///   n_per_axis u32
///   extent     f64
///   time       f64
///   payload    row-major f64, component-major (comp0 plane, comp1 plane, ...)
void write_snapshot(const std::string& path, const VectorField& f, double time = 0.0);
void write_snapshot(const std::string& path, const ScalarField& f, double time = 0.0);

struct Snapshot {
    VectorField field;  // ncomp == 1 for scalar payloads
    double time = 0.0;
};
Snapshot read_snapshot(const std::string& path);

/// 1-D slice along an axis through a fixed node, as "coord,value" CSV rows.
std::string slice_csv(const ScalarField& f, int axis, int fixed_i, int fixed_j);

void write_text(const std::string& path, const std::string& content);

}  // namespace patchlab::io
