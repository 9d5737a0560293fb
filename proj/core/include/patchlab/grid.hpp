#pragma once

#include <cstdint>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "patchlab/vec.hpp"

namespace patchlab {

/// Uniform periodic grid over [0, extent)^dim with a power-of-two point count
/// per axis.  The power-of-two requirement keeps every dyadic frequency shell
/// exactly representable by the FFT lattice.
struct Grid {
    int dim = 2;          // 2 or 3
    int n = 0;            // points per axis
    double extent = 0.0;  // box side length
    double h = 0.0;       // spacing = extent / n

    std::size_t size() const {
        std::size_t s = 1;
        for (int d = 0; d < dim; ++d) s *= static_cast<std::size_t>(n);
        return s;
    }

    // Row-major: the last axis index varies fastest.
    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(i) * n + j;
    }
    std::size_t index(int i, int j, int k) const {
        return (static_cast<std::size_t>(i) * n + j) * n + k;
    }

    int wrap(int i) const {
        i %= n;
        return i < 0 ? i + n : i;
    }

    Vec3 node(int i, int j) const { return {i * h, j * h, 0.0}; }
    Vec3 node(int i, int j, int k) const { return {i * h, j * h, k * h}; }

    Vec3 center() const { return dim == 2 ? Vec3{extent / 2, extent / 2, 0.0}
                                          : Vec3{extent / 2, extent / 2, extent / 2}; }

    /// Signed integer frequency of lattice index i (FFT ordering).
    int freq(int i) const { return i <= n / 2 ? i : i - n; }

    bool operator==(const Grid& o) const {
        return dim == o.dim && n == o.n && extent == o.extent;
    }
};

bool is_power_of_two(int n);

/// Build a periodic grid.  Throws std::invalid_argument unless n is a power
/// of two with n >= 8 and dim is 2 or 3.
Grid build_grid(int dim, double extent, int n);

/// Scalar samples on a Grid.
struct ScalarField {
    Grid grid;
    std::vector<double> data;

    ScalarField() = default;
    explicit ScalarField(const Grid& g) : grid(g), data(g.size(), 0.0) {}

    double& operator[](std::size_t i) { return data[i]; }
    double operator[](std::size_t i) const { return data[i]; }
    double& at(int i, int j) { return data[grid.index(i, j)]; }
    double at(int i, int j) const { return data[grid.index(i, j)]; }
    double& at(int i, int j, int k) { return data[grid.index(i, j, k)]; }
    double at(int i, int j, int k) const { return data[grid.index(i, j, k)]; }
};

/// Vector samples on a Grid, stored as separate component planes.
/// A 2-D grid may carry 3 components (z-invariant emulation of 3-D fields).
struct VectorField {
    Grid grid;
    int ncomp = 0;
    std::vector<ScalarField> comp;

    VectorField() = default;
    VectorField(const Grid& g, int ncomp_) : grid(g), ncomp(ncomp_) {
        if (ncomp_ < g.dim || ncomp_ > 3)
            throw std::invalid_argument("VectorField: component count must be dim..3");
        comp.assign(ncomp_, ScalarField(g));
    }

    Vec3 at(std::size_t idx) const {
        Vec3 v;
        for (int c = 0; c < ncomp; ++c) v[c] = comp[c][idx];
        return v;
    }
    void set(std::size_t idx, const Vec3& v) {
        for (int c = 0; c < ncomp; ++c) comp[c][idx] = v[c];
    }
};

double max_abs(const ScalarField& f);
double max_norm(const VectorField& f);
bool all_finite(const ScalarField& f);
bool all_finite(const VectorField& f);

/// Kahan-compensated sum; keeps grid reductions deterministic and accurate.
double stable_sum(const std::vector<double>& v);

}  // namespace patchlab
