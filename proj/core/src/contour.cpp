#include "patchlab/contour.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace patchlab::contour {

using std::numbers::pi;

double ring_area(const Ring& ring) {
    double acc = 0.0;
    const std::size_t m = ring.size();
    for (std::size_t i = 0; i < m; ++i) {
        const Vec3& a = ring[i];
        const Vec3& b = ring[(i + 1) % m];
        acc += a.x * b.y - b.x * a.y;
    }
    return 0.5 * acc;
}

double spacing_ratio(const Ring& ring) {
    const std::size_t m = ring.size();
    double lo = 1e300, hi = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double d = norm(ring[(i + 1) % m] - ring[i]);
        lo = std::min(lo, d);
        hi = std::max(hi, d);
    }
    return lo > 0.0 ? hi / lo : 1e300;
}

namespace {

Vec3 catmull_point(const Vec3& pm1, const Vec3& p0, const Vec3& p1, const Vec3& p2, double t) {
    auto cr = [t](double fm1, double f0, double f1, double f2) {
        const double a = -0.5 * fm1 + 1.5 * f0 - 1.5 * f1 + 0.5 * f2;
        const double b = fm1 - 2.5 * f0 + 2.0 * f1 - 0.5 * f2;
        const double c = 0.5 * (f1 - fm1);
        return ((a * t + b) * t + c) * t + f0;
    };
    return {cr(pm1.x, p0.x, p1.x, p2.x), cr(pm1.y, p0.y, p1.y, p2.y), 0.0};
}

}  // namespace

Ring reparametrize(const Ring& ring, int count) {
    const std::size_t m = ring.size();
    if (m < 4) throw std::invalid_argument("reparametrize: ring too small");
    std::vector<double> arc(m + 1, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        arc[i + 1] = arc[i] + norm(ring[(i + 1) % m] - ring[i]);
    const double total = arc[m];

    Ring out(count);
    std::size_t seg = 0;
    for (int k = 0; k < count; ++k) {
        const double s = total * k / count;
        while (seg + 1 < m + 1 && arc[seg + 1] <= s) ++seg;
        const double t = (s - arc[seg]) / std::max(arc[seg + 1] - arc[seg], 1e-300);
        const std::size_t i0 = seg % m;
        out[k] = catmull_point(ring[(i0 + m - 1) % m], ring[i0], ring[(i0 + 1) % m],
                               ring[(i0 + 2) % m], t);
    }
    return out;
}

ScalarField rasterize(const Ring& ring, const Grid& g) {
    ScalarField chi(g);
    const std::size_t m = ring.size();
    // For each grid row, collect x-crossings of the polygon and fill
    // alternating spans.
    std::vector<double> crossings;
    for (int j = 0; j < g.n; ++j) {
        const double y = j * g.h;
        crossings.clear();
        for (std::size_t i = 0; i < m; ++i) {
            const Vec3& a = ring[i];
            const Vec3& b = ring[(i + 1) % m];
            if ((a.y <= y) == (b.y <= y)) continue;
            crossings.push_back(a.x + (y - a.y) / (b.y - a.y) * (b.x - a.x));
        }
        std::sort(crossings.begin(), crossings.end());
        for (std::size_t c = 0; c + 1 < crossings.size(); c += 2) {
            int lo = static_cast<int>(std::ceil(crossings[c] / g.h));
            int hi = static_cast<int>(std::floor(crossings[c + 1] / g.h));
            lo = std::clamp(lo, 0, g.n - 1);
            hi = std::clamp(hi, -1, g.n - 1);
            for (int i = lo; i <= hi; ++i) chi.at(i, j) = 1.0;
        }
    }
    return chi;
}

ScalarField rasterize_fraction(const Ring& ring, const Grid& g, int subsamples) {
    ScalarField frac(g);
    const std::size_t m = ring.size();
    const double sub_h = g.h / subsamples;
    std::vector<double> crossings;
    // Node-centered cells: node (i, j) owns [x_i - h/2, x_i + h/2).
    for (int j = 0; j < g.n; ++j)
        for (int sj = 0; sj < subsamples; ++sj) {
            const double y = (j - 0.5) * g.h + (sj + 0.5) * sub_h;
            crossings.clear();
            for (std::size_t i = 0; i < m; ++i) {
                const Vec3& a = ring[i];
                const Vec3& b = ring[(i + 1) % m];
                if ((a.y <= y) == (b.y <= y)) continue;
                crossings.push_back(a.x + (y - a.y) / (b.y - a.y) * (b.x - a.x));
            }
            std::sort(crossings.begin(), crossings.end());
            for (std::size_t c = 0; c + 1 < crossings.size(); c += 2) {
                const double x0 = crossings[c], x1 = crossings[c + 1];
                int i0 = static_cast<int>(std::floor(x0 / g.h + 0.5));
                int i1 = static_cast<int>(std::floor(x1 / g.h + 0.5));
                i0 = std::clamp(i0, 0, g.n - 1);
                i1 = std::clamp(i1, 0, g.n - 1);
                for (int i = i0; i <= i1; ++i) {
                    const double cell_lo = (i - 0.5) * g.h;
                    const double cell_hi = (i + 0.5) * g.h;
                    const double cover =
                        std::max(0.0, std::min(x1, cell_hi) - std::max(x0, cell_lo));
                    frac.at(i, j) += cover / (g.h * subsamples);
                }
            }
        }
    for (auto& v : frac.data) v = std::min(v, 1.0);
    return frac;
}

Vec3 cd_velocity(const Ring& ring, double jump, const Vec3& p, int skip) {
    // v(x) = -(jump / 2 pi) oint ln|x - y| dy, dy = tangent ds.  When x sits
    // on marker `skip`, the self arc carries the analytic integral
    // int_{-l/2}^{l/2} ln|s| ds = l (ln(l/2) - 1) along the local tangent.
    const std::size_t m = ring.size();
    double ax = 0.0, ay = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const Vec3 tangent = 0.5 * (ring[(i + 1) % m] - ring[(i + m - 1) % m]);
        if (static_cast<int>(i) == skip) {
            const double ell = norm(tangent);
            if (ell > 0.0) {
                const double self_ln = std::log(0.5 * ell) - 1.0;
                ax += self_ln * tangent.x;
                ay += self_ln * tangent.y;
            }
            continue;
        }
        const Vec3 d = p - ring[i];
        const double r2 = norm2(d);
        if (r2 == 0.0) continue;
        const double lnr = 0.5 * std::log(r2);
        ax += lnr * tangent.x;
        ay += lnr * tangent.y;
    }
    const double f = -jump / (2.0 * pi);
    return {f * ax, f * ay, 0.0};
}

void cd_velocity_gradient(const Ring& ring, double jump, const Vec3& p, int skip,
                          double grad[2][2]) {
    // grad v = -(jump / 2 pi) oint (x - y)/|x - y|^2 (x) dy.
    const std::size_t m = ring.size();
    grad[0][0] = grad[0][1] = grad[1][0] = grad[1][1] = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        if (static_cast<int>(i) == skip) continue;
        const Vec3 d = p - ring[i];
        const double r2 = norm2(d);
        if (r2 == 0.0) continue;
        const Vec3 tangent = 0.5 * (ring[(i + 1) % m] - ring[(i + m - 1) % m]);
        grad[0][0] += d.x / r2 * tangent.x;
        grad[0][1] += d.y / r2 * tangent.x;
        grad[1][0] += d.x / r2 * tangent.y;
        grad[1][1] += d.y / r2 * tangent.y;
    }
    const double f = -jump / (2.0 * pi);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) grad[a][b] *= f;
}

double orientation_angle(const Ring& ring) {
    double cx = 0.0, cy = 0.0;
    for (const Vec3& p : ring) {
        cx += p.x;
        cy += p.y;
    }
    cx /= ring.size();
    cy /= ring.size();
    double ixx = 0.0, iyy = 0.0, ixy = 0.0;
    for (const Vec3& p : ring) {
        const double qx = p.x - cx, qy = p.y - cy;
        ixx += qx * qx;
        iyy += qy * qy;
        ixy += qx * qy;
    }
    return 0.5 * std::atan2(2.0 * ixy, ixx - iyy);
}

}  // namespace patchlab::contour
