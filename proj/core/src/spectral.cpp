#include "patchlab/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace patchlab::spectral {

namespace {

// One forward/backward c2c plan pair per (dim, n).  Plans are created with
// FFTW_ESTIMATE so planning never depends on runtime measurements, and are
// executed on caller buffers via fftw_execute_dft (thread-safe in FFTW).
struct PlanPair {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
};

PlanPair& plans_for(const Grid& g) {
    static std::map<std::pair<int, int>, PlanPair> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(g.dim, g.n);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    std::vector<std::complex<double>> buf(g.size());
    auto* p = reinterpret_cast<fftw_complex*>(buf.data());
    PlanPair pp;
    if (g.dim == 2) {
        pp.fwd = fftw_plan_dft_2d(g.n, g.n, p, p, FFTW_FORWARD, FFTW_ESTIMATE);
        pp.bwd = fftw_plan_dft_2d(g.n, g.n, p, p, FFTW_BACKWARD, FFTW_ESTIMATE);
    } else {
        pp.fwd = fftw_plan_dft_3d(g.n, g.n, g.n, p, p, FFTW_FORWARD, FFTW_ESTIMATE);
        pp.bwd = fftw_plan_dft_3d(g.n, g.n, g.n, p, p, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    return cache.emplace(key, pp).first->second;
}

}  // namespace

Spectrum forward(const ScalarField& f) {
    Spectrum s(f.grid);
    for (std::size_t i = 0; i < f.data.size(); ++i) s.data[i] = {f.data[i], 0.0};
    auto* p = reinterpret_cast<fftw_complex*>(s.data.data());
    fftw_execute_dft(plans_for(f.grid).fwd, p, p);
    return s;
}

ScalarField inverse(const Spectrum& s) {
    std::vector<std::complex<double>> buf = s.data;
    auto* p = reinterpret_cast<fftw_complex*>(buf.data());
    fftw_execute_dft(plans_for(s.grid).bwd, p, p);
    ScalarField f(s.grid);
    const double scale = 1.0 / static_cast<double>(s.grid.size());
    for (std::size_t i = 0; i < buf.size(); ++i) f.data[i] = buf[i].real() * scale;
    return f;
}

void freq_of_index(const Grid& g, std::size_t idx, int k[3]) {
    k[0] = k[1] = k[2] = 0;
    if (g.dim == 2) {
        const int j = static_cast<int>(idx % g.n);
        const int i = static_cast<int>(idx / g.n);
        k[0] = g.freq(i);
        k[1] = g.freq(j);
    } else {
        const int kk = static_cast<int>(idx % g.n);
        const int j = static_cast<int>((idx / g.n) % g.n);
        const int i = static_cast<int>(idx / (static_cast<std::size_t>(g.n) * g.n));
        k[0] = g.freq(i);
        k[1] = g.freq(j);
        k[2] = g.freq(kk);
    }
}

double wavenumber(const Grid& g, const int k[3]) {
    const double f = 2.0 * std::numbers::pi / g.extent;
    return f * std::sqrt(double(k[0]) * k[0] + double(k[1]) * k[1] + double(k[2]) * k[2]);
}

ScalarField differentiate(const ScalarField& f, int axis) {
    if (axis < 0 || axis >= 3)
        throw std::invalid_argument("differentiate: axis out of range");
    if (axis >= f.grid.dim) {
        // z-derivative of a z-invariant field
        return ScalarField(f.grid);
    }
    Spectrum s = forward(f);
    const Grid& g = f.grid;
    const double base = 2.0 * std::numbers::pi / g.extent;
    int k[3];
    for (std::size_t i = 0; i < s.data.size(); ++i) {
        freq_of_index(g, i, k);
        // The n/2 mode has no well-defined odd derivative; zero it.
        const double kv = (std::abs(k[axis]) == g.n / 2) ? 0.0 : base * k[axis];
        s.data[i] *= std::complex<double>(0.0, kv);
    }
    return inverse(s);
}

VectorField gradient(const ScalarField& f) {
    VectorField g(f.grid, f.grid.dim);
    for (int d = 0; d < f.grid.dim; ++d) g.comp[d] = differentiate(f, d);
    return g;
}

ScalarField divergence(const VectorField& v) {
    ScalarField d(v.grid);
    const int nd = std::min(v.ncomp, v.grid.dim);
    for (int c = 0; c < nd; ++c) {
        ScalarField dc = differentiate(v.comp[c], c);
        for (std::size_t i = 0; i < d.data.size(); ++i) d.data[i] += dc.data[i];
    }
    return d;
}

VectorField curl(const VectorField& v) {
    // z-invariant promotion: missing components/derivatives are zero.
    const Grid& g = v.grid;
    auto comp_or_zero = [&](int c) -> ScalarField {
        if (c < v.ncomp) return v.comp[c];
        return ScalarField(g);
    };
    ScalarField vx = comp_or_zero(0), vy = comp_or_zero(1), vz = comp_or_zero(2);
    VectorField out(g, 3);
    ScalarField dvz_dy = differentiate(vz, 1);
    ScalarField dvy_dz = differentiate(vy, 2);
    ScalarField dvx_dz = differentiate(vx, 2);
    ScalarField dvz_dx = differentiate(vz, 0);
    ScalarField dvy_dx = differentiate(vy, 0);
    ScalarField dvx_dy = differentiate(vx, 1);
    for (std::size_t i = 0; i < g.size(); ++i) {
        out.comp[0].data[i] = dvz_dy.data[i] - dvy_dz.data[i];
        out.comp[1].data[i] = dvx_dz.data[i] - dvz_dx.data[i];
        out.comp[2].data[i] = dvy_dx.data[i] - dvx_dy.data[i];
    }
    return out;
}

ScalarField curl_z(const VectorField& v) {
    ScalarField dvy_dx = differentiate(v.comp[1], 0);
    ScalarField dvx_dy = differentiate(v.comp[0], 1);
    for (std::size_t i = 0; i < dvy_dx.data.size(); ++i) dvy_dx.data[i] -= dvx_dy.data[i];
    return dvy_dx;
}

ScalarField apply_radial_symbol(const ScalarField& f, const std::function<double(double)>& m) {
    Spectrum s = forward(f);
    int k[3];
    for (std::size_t i = 0; i < s.data.size(); ++i) {
        freq_of_index(f.grid, i, k);
        s.data[i] *= m(wavenumber(f.grid, k));
    }
    return inverse(s);
}

namespace {

// 4th-order first-derivative weights for stencil offsets {o, ..., o+4}*h.
constexpr double kFd4Fwd[5] = {-25.0 / 12, 4.0, -3.0, 4.0 / 3, -1.0 / 4};      // o = 0
constexpr double kFd4F1[5] = {-1.0 / 4, -5.0 / 6, 3.0 / 2, -1.0 / 2, 1.0 / 12};  // o = -1
constexpr double kFd4Cen[5] = {1.0 / 12, -2.0 / 3, 0.0, 2.0 / 3, -1.0 / 12};   // o = -2
constexpr double kFd4B1[5] = {-1.0 / 12, 1.0 / 2, -3.0 / 2, 5.0 / 6, 1.0 / 4};   // o = -3
constexpr double kFd4Bwd[5] = {1.0 / 4, -4.0 / 3, 3.0, -4.0, 25.0 / 12};       // o = -4

}  // namespace

ScalarField fd4_derivative(const ScalarField& f, int axis,
                           const std::vector<std::uint8_t>& region,
                           std::vector<std::uint8_t>* valid) {
    const Grid& g = f.grid;
    if (region.size() != g.size())
        throw std::invalid_argument("fd4_derivative: region mask size mismatch");
    if (valid) valid->assign(g.size(), 0);
    if (axis >= g.dim) {
        if (valid) valid->assign(g.size(), 1);  // z-derivative of z-invariant data
        return ScalarField(g);
    }

    ScalarField out(g);
    const std::size_t stride = [&] {
        if (g.dim == 2) return axis == 0 ? static_cast<std::size_t>(g.n) : std::size_t{1};
        if (axis == 0) return static_cast<std::size_t>(g.n) * g.n;
        return axis == 1 ? static_cast<std::size_t>(g.n) : std::size_t{1};
    }();

    auto in_region = [&](std::size_t base, int off, int pos) -> bool {
        const int q = pos + off;
        if (q < 0 || q >= g.n) return false;  // region never wraps the box
        return region[base + static_cast<std::size_t>(off) * stride] != 0;
    };

    const std::size_t total = g.size();
    for (std::size_t idx = 0; idx < total; ++idx) {
        if (!region[idx]) continue;
        const int pos = static_cast<int>((idx / stride) % g.n);
        // Pick the most centered admissible 5-point stencil.
        static const int starts[5] = {-2, -1, -3, 0, -4};
        static const double* const weights[5] = {kFd4Cen, kFd4F1, kFd4B1, kFd4Fwd, kFd4Bwd};
        for (int s = 0; s < 5; ++s) {
            const int o = starts[s];
            bool ok = true;
            for (int m = 0; m < 5; ++m)
                if (!in_region(idx, o + m, pos)) { ok = false; break; }
            if (!ok) continue;
            double acc = 0.0;
            for (int m = 0; m < 5; ++m)
                acc += weights[s][m] *
                       f.data[idx + static_cast<std::size_t>(static_cast<std::ptrdiff_t>(o + m)) * stride];
            out.data[idx] = acc / g.h;
            if (valid) (*valid)[idx] = 1;
            break;
        }
    }
    return out;
}

ScalarField fd4_divergence(const VectorField& v, const std::vector<std::uint8_t>& region) {
    ScalarField d(v.grid);
    const int nd = std::min(v.ncomp, v.grid.dim);
    std::vector<std::uint8_t> all_valid(v.grid.size(), 1), axis_valid;
    for (int c = 0; c < nd; ++c) {
        ScalarField dc = fd4_derivative(v.comp[c], c, region, &axis_valid);
        for (std::size_t i = 0; i < d.data.size(); ++i) {
            d.data[i] += dc.data[i];
            all_valid[i] &= axis_valid[i];
        }
    }
    for (std::size_t i = 0; i < d.data.size(); ++i)
        if (!all_valid[i]) d.data[i] = 0.0;
    return d;
}

}  // namespace patchlab::spectral
