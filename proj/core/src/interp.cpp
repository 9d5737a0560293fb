#include "patchlab/interp.hpp"

#include <algorithm>

namespace patchlab::interp {

namespace {

struct AxisPos {
    int i0;      // base node
    double t;    // fractional offset in [0,1)
};

AxisPos locate(double x, double h, int n) {
    double s = x / h;
    double fl = std::floor(s);
    int i0 = static_cast<int>(fl) % n;
    if (i0 < 0) i0 += n;
    return {i0, s - fl};
}

double catmull_rom(double fm1, double f0, double f1, double f2, double t) {
    const double a = -0.5 * fm1 + 1.5 * f0 - 1.5 * f1 + 0.5 * f2;
    const double b = fm1 - 2.5 * f0 + 2.0 * f1 - 0.5 * f2;
    const double c = 0.5 * (f1 - fm1);
    return ((a * t + b) * t + c) * t + f0;
}

}  // namespace

double sample_linear(const ScalarField& f, const Vec3& p) {
    const Grid& g = f.grid;
    AxisPos ax = locate(p.x, g.h, g.n);
    AxisPos ay = locate(p.y, g.h, g.n);
    const int i1 = (ax.i0 + 1) % g.n, j1 = (ay.i0 + 1) % g.n;
    if (g.dim == 2) {
        const double f00 = f.at(ax.i0, ay.i0), f01 = f.at(ax.i0, j1);
        const double f10 = f.at(i1, ay.i0), f11 = f.at(i1, j1);
        return (1 - ax.t) * ((1 - ay.t) * f00 + ay.t * f01) +
               ax.t * ((1 - ay.t) * f10 + ay.t * f11);
    }
    AxisPos az = locate(p.z, g.h, g.n);
    const int k1 = (az.i0 + 1) % g.n;
    double acc = 0.0;
    for (int di = 0; di <= 1; ++di)
        for (int dj = 0; dj <= 1; ++dj)
            for (int dk = 0; dk <= 1; ++dk) {
                const double w = (di ? ax.t : 1 - ax.t) * (dj ? ay.t : 1 - ay.t) *
                                 (dk ? az.t : 1 - az.t);
                acc += w * f.at(di ? i1 : ax.i0, dj ? j1 : ay.i0, dk ? k1 : az.i0);
            }
    return acc;
}

Vec3 sample_linear(const VectorField& f, const Vec3& p) {
    Vec3 v;
    for (int c = 0; c < f.ncomp; ++c) v[c] = sample_linear(f.comp[c], p);
    return v;
}

namespace {

template <bool Clamp>
double cubic_impl(const ScalarField& f, const Vec3& p) {
    const Grid& g = f.grid;
    AxisPos ax = locate(p.x, g.h, g.n);
    AxisPos ay = locate(p.y, g.h, g.n);
    auto wrap = [&](int i) { return ((i % g.n) + g.n) % g.n; };

    double lo = 0.0, hi = 0.0;
    double result;
    if (g.dim == 2) {
        double rows[4];
        for (int d = -1; d <= 2; ++d) {
            const int i = wrap(ax.i0 + d);
            const double c0 = f.at(i, wrap(ay.i0 - 1));
            const double c1 = f.at(i, ay.i0);
            const double c2 = f.at(i, wrap(ay.i0 + 1));
            const double c3 = f.at(i, wrap(ay.i0 + 2));
            rows[d + 1] = catmull_rom(c0, c1, c2, c3, ay.t);
            if constexpr (Clamp) {
                if (d == 0 || d == 1) {
                    lo = (d == 0) ? std::min(c1, c2) : std::min({lo, c1, c2});
                    hi = (d == 0) ? std::max(c1, c2) : std::max({hi, c1, c2});
                }
            }
        }
        result = catmull_rom(rows[0], rows[1], rows[2], rows[3], ax.t);
    } else {
        AxisPos az = locate(p.z, g.h, g.n);
        double planes[4];
        for (int d = -1; d <= 2; ++d) {
            const int i = wrap(ax.i0 + d);
            double rows[4];
            for (int e = -1; e <= 2; ++e) {
                const int j = wrap(ay.i0 + e);
                const double c0 = f.at(i, j, wrap(az.i0 - 1));
                const double c1 = f.at(i, j, az.i0);
                const double c2 = f.at(i, j, wrap(az.i0 + 1));
                const double c3 = f.at(i, j, wrap(az.i0 + 2));
                rows[e + 1] = catmull_rom(c0, c1, c2, c3, az.t);
                if constexpr (Clamp) {
                    if ((d == 0 || d == 1) && (e == 0 || e == 1)) {
                        if (d == 0 && e == 0) { lo = std::min(c1, c2); hi = std::max(c1, c2); }
                        else { lo = std::min({lo, c1, c2}); hi = std::max({hi, c1, c2}); }
                    }
                }
            }
            planes[d + 1] = catmull_rom(rows[0], rows[1], rows[2], rows[3], ay.t);
        }
        result = catmull_rom(planes[0], planes[1], planes[2], planes[3], ax.t);
    }
    if constexpr (Clamp) result = std::clamp(result, lo, hi);
    return result;
}

}  // namespace

double sample_cubic(const ScalarField& f, const Vec3& p) { return cubic_impl<false>(f, p); }

namespace {

void catmull_jet(double fm1, double f0, double f1, double f2, double t, double& v, double& dv) {
    const double a = -0.5 * fm1 + 1.5 * f0 - 1.5 * f1 + 0.5 * f2;
    const double b = fm1 - 2.5 * f0 + 2.0 * f1 - 0.5 * f2;
    const double c = 0.5 * (f1 - fm1);
    v = ((a * t + b) * t + c) * t + f0;
    dv = (3.0 * a * t + 2.0 * b) * t + c;
}

}  // namespace

void sample_cubic_jet(const ScalarField& f, const Vec3& p, double& value, Vec3& grad) {
    const Grid& g = f.grid;
    if (g.dim != 2) throw std::invalid_argument("sample_cubic_jet: 2-D grids only");
    AxisPos ax = locate(p.x, g.h, g.n);
    AxisPos ay = locate(p.y, g.h, g.n);
    auto wrap = [&](int i) { return ((i % g.n) + g.n) % g.n; };
    double rows[4], drows[4];
    for (int d = -1; d <= 2; ++d) {
        const int i = wrap(ax.i0 + d);
        catmull_jet(f.at(i, wrap(ay.i0 - 1)), f.at(i, ay.i0), f.at(i, wrap(ay.i0 + 1)),
                    f.at(i, wrap(ay.i0 + 2)), ay.t, rows[d + 1], drows[d + 1]);
    }
    double dvx, dy_val, dy_slope;
    catmull_jet(rows[0], rows[1], rows[2], rows[3], ax.t, value, dvx);
    catmull_jet(drows[0], drows[1], drows[2], drows[3], ax.t, dy_val, dy_slope);
    (void)dy_slope;
    grad = {dvx / g.h, dy_val / g.h, 0.0};
}

double sample_cubic_clamped(const ScalarField& f, const Vec3& p) { return cubic_impl<true>(f, p); }

Vec3 sample_cubic(const VectorField& f, const Vec3& p) {
    Vec3 v;
    for (int c = 0; c < f.ncomp; ++c) v[c] = sample_cubic(f.comp[c], p);
    return v;
}

}  // namespace patchlab::interp
