#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "patchlab/grid.hpp"

namespace patchlab::spectral {

/// DFT coefficients of a scalar field, FFTW layout (unnormalized forward;
/// inverse() divides by the node count).
struct Spectrum {
    Grid grid;
    std::vector<std::complex<double>> data;

    Spectrum() = default;
    explicit Spectrum(const Grid& g) : grid(g), data(g.size(), {0.0, 0.0}) {}
};

Spectrum forward(const ScalarField& f);
ScalarField inverse(const Spectrum& s);

/// Integer frequency vector of a flattened lattice index.
/// Components lie in [-n/2, n/2).
void freq_of_index(const Grid& g, std::size_t idx, int k[3]);

/// Physical wavevector magnitude: |k| * 2*pi / extent.
double wavenumber(const Grid& g, const int k[3]);

/// Spectral partial derivative along axis; exact for band-limited data.
ScalarField differentiate(const ScalarField& f, int axis);

VectorField gradient(const ScalarField& f);
ScalarField divergence(const VectorField& v);
VectorField curl(const VectorField& v);    // 3-component curl (2-D grids: z-invariant)
ScalarField curl_z(const VectorField& v);  // scalar vorticity d(vy)/dx - d(vx)/dy

/// Apply a radial symbol m(|xi|) to the spectrum of f (|xi| physical).
ScalarField apply_radial_symbol(const ScalarField& f, const std::function<double(double)>& m);

/// 4th-order finite-difference derivative restricted to a region mask;
/// stencils slide to one-sided forms so they never cross the region edge.
/// Nodes whose axis line has fewer than 5 in-region neighbours are left 0
/// (and flagged 0 in `valid` when given).
ScalarField fd4_derivative(const ScalarField& f, int axis, const std::vector<std::uint8_t>& region,
                           std::vector<std::uint8_t>* valid = nullptr);

/// Region-wise divergence; nonzero only at nodes where every axis admits a
/// full in-region stencil.
ScalarField fd4_divergence(const VectorField& v, const std::vector<std::uint8_t>& region);

}  // namespace patchlab::spectral
