#include "patchlab/extension.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "patchlab/interp.hpp"
#include "patchlab/lp.hpp"
#include "patchlab/spectral.hpp"

namespace patchlab::ext {

using std::numbers::pi;

namespace {

// Smooth bump: 1 at t = 0, 0 for |t| >= 1.
double bump1(double t) {
    t = std::abs(t);
    if (t >= 1.0) return 0.0;
    if (t <= 0.0) return 1.0;
    const double a = std::exp(-1.0 / (1.0 - t));
    const double b = std::exp(-1.0 / t);
    return a / (a + b);
}

// Smooth step: 0 for t <= 0, 1 for t >= 1.
double step1(double t) { return 1.0 - bump1(std::clamp(t, 0.0, 1.0)); }

double angular_distance(const Vec3& a, const Vec3& b) {
    return std::acos(std::clamp(dot(a, b), -1.0, 1.0));
}

}  // namespace

VectorSampler field_sampler(const VectorField& f) {
    return [f](const Vec3& p) { return interp::sample_cubic(f, p); };
}

double BoundaryAtlas::bump(int i, const Vec3& p) const {
    const double d = domain_.delta(p);
    if (i == 0) return step1((d / collar_ - 0.3) / 0.4);  // 1 for delta >= 0.7*collar
    if (d >= collar_ || d <= -collar_) return 0.0;
    const Vec3 dir = normalized(p - domain_.center);
    const Vec3 cdir = normalized(charts_[i - 1].center - domain_.center);
    const double ang = angular_distance(dir, cdir);
    if (ang >= psi_arc_) return 0.0;
    return bump1(ang / psi_arc_) * bump1(d / collar_);
}

void BoundaryAtlas::build_bins() {
    if (domain_.dim == 2) {
        nbin_theta_ = 1;
        nbin_phi_ = std::max(64, 4 * chart_count());
    } else {
        nbin_theta_ = 96;
        nbin_phi_ = 192;
    }
    bins_.assign(static_cast<std::size_t>(nbin_theta_) * nbin_phi_, {});
    const double bin_rad =
        domain_.dim == 2
            ? pi / nbin_phi_
            : 0.75 * std::sqrt(std::pow(pi / nbin_theta_, 2) + std::pow(2.0 * pi / nbin_phi_, 2));
    for (int bt = 0; bt < nbin_theta_; ++bt)
        for (int bp = 0; bp < nbin_phi_; ++bp) {
            Vec3 dir;
            const double phi = 2.0 * pi * (bp + 0.5) / nbin_phi_;
            if (domain_.dim == 2) {
                dir = {std::cos(phi), std::sin(phi), 0.0};
            } else {
                const double th = pi * (bt + 0.5) / nbin_theta_;
                dir = {std::sin(th) * std::cos(phi), std::sin(th) * std::sin(phi), std::cos(th)};
            }
            const double reach = std::cos(std::min(pi, psi_arc_ + bin_rad));
            auto& list = bins_[static_cast<std::size_t>(bt) * nbin_phi_ + bp];
            for (int c = 0; c < chart_count(); ++c) {
                const Vec3 cdir = normalized(charts_[c].center - domain_.center);
                if (dot(cdir, dir) >= reach) list.push_back(c);
            }
        }
}

const std::vector<int>& BoundaryAtlas::candidates(const Vec3& dir) const {
    int bp, bt = 0;
    const double phi = std::atan2(dir.y, dir.x);
    bp = static_cast<int>(std::floor((phi < 0 ? phi + 2.0 * pi : phi) / (2.0 * pi) * nbin_phi_));
    bp = std::clamp(bp, 0, nbin_phi_ - 1);
    if (domain_.dim == 3) {
        const double th = std::acos(std::clamp(dir.z, -1.0, 1.0));
        bt = std::clamp(static_cast<int>(std::floor(th / pi * nbin_theta_)), 0, nbin_theta_ - 1);
    }
    return bins_[static_cast<std::size_t>(bt) * nbin_phi_ + bp];
}

double BoundaryAtlas::eta(const Vec3& p) const {
    const double d = domain_.delta(p);
    // 1 for delta >= -0.35*collar, 0 for delta <= -0.8*collar.
    return step1((d / collar_ + 0.8) / 0.45);
}

double BoundaryAtlas::weights_at(const Vec3& p, std::vector<std::pair<int, double>>& out) const {
    out.clear();
    const double e = eta(p);
    if (e == 0.0) return 0.0;
    double total = bump(0, p);
    if (total > 0.0) out.emplace_back(0, total);
    for (int i : candidates(normalized(p - domain_.center))) {
        const double b = bump(i + 1, p);
        if (b > 0.0) {
            out.emplace_back(i + 1, b);
            total += b;
        }
    }
    if (total <= 0.0) {
        out.clear();
        return 0.0;
    }
    for (auto& [i, b] : out) b = e * b / total;
    return e;
}

double BoundaryAtlas::chart_weights(const Vec3& p,
                                    std::vector<std::pair<int, double>>& out) const {
    out.clear();
    double total = 0.0;
    for (int i : candidates(normalized(p - domain_.center))) {
        const double b = bump(i + 1, p);
        if (b > 0.0) {
            out.emplace_back(i, b);
            total += b;
        }
    }
    if (total <= 0.0) return 0.0;
    for (auto& [i, b] : out) b /= total;
    return 1.0;
}

double BoundaryAtlas::psi(int i, const Vec3& p) const {
    const double e = eta(p);
    if (e == 0.0) return 0.0;
    double total = 0.0, mine = 0.0;
    for (int k = 0; k <= chart_count(); ++k) {
        const double b = bump(k, p);
        total += b;
        if (k == i) mine = b;
    }
    return total > 0.0 ? e * mine / total : 0.0;
}

double BoundaryAtlas::psi0(const Vec3& p) const { return psi(0, p); }

Vec3 BoundaryAtlas::project(int i, int j, const Vec3& p) const {
    const Chart& ch = charts_[i];
    const Vec3 e = ch.frame[j];
    const Vec3 q = p - domain_.center;
    const double qe = dot(q, e);
    const double disc = qe * qe - dot(q, q) + domain_.radius * domain_.radius;
    if (disc <= 0.0)
        throw std::runtime_error("atlas: frame ray misses the boundary (shrink charts)");
    const double root = std::sqrt(disc);
    const Vec3 y_plus = p + (-qe + root) * e;
    const Vec3 y_minus = p + (-qe - root) * e;
    const double d_plus = norm(y_plus - ch.center);
    const double d_minus = norm(y_minus - ch.center);
    const Vec3& near = d_plus <= d_minus ? y_plus : y_minus;
    const double d_near = std::min(d_plus, d_minus);
    const double d_far = std::max(d_plus, d_minus);
    if (d_near > window_ || d_far < 1.05 * window_)
        throw std::runtime_error(
            "atlas: boundary intersection not unique inside the chart window (shrink charts)");
    return near;
}

BoundaryAtlas build_atlas(const Domain& domain, const Grid& grid, int charts,
                          double arc_factor) {
    if (domain.dim == 2 && charts < 4)
        throw std::invalid_argument("build_atlas: need >= 4 charts in 2-D");
    if (domain.dim == 3 && charts < 6)
        throw std::invalid_argument("build_atlas: need >= 6 charts in 3-D");

    BoundaryAtlas atlas;
    atlas.domain_ = domain;
    atlas.grid_ = grid;

    // Chart centers: uniform on the circle, Fibonacci points on the sphere.
    const double frame_tilt = domain.dim == 2 ? pi / 4.0 : std::acos(1.0 / std::sqrt(3.0));
    for (int i = 0; i < charts; ++i) {
        Chart ch;
        ch.center = domain.boundary_point(i, charts);
        const Vec3 n = domain.outward_normal(ch.center);
        if (domain.dim == 2) {
            const Vec3 t = perp(n);
            const double c = std::cos(frame_tilt), s = std::sin(frame_tilt);
            ch.frame[0] = c * n + s * t;
            ch.frame[1] = c * n - s * t;
            ch.frame[2] = Vec3{0.0, 0.0, 1.0};
        } else {
            // Rotate the standard basis so (1,1,1)/sqrt(3) lands on n: every
            // frame vector then satisfies e_j . n = 1/sqrt(3) > 0.
            const Vec3 u0 = normalized(Vec3{1.0, 1.0, 1.0});
            Vec3 axis = cross(u0, n);
            const double sa = norm(axis), ca = dot(u0, n);
            if (sa < 1e-14) {
                for (int j = 0; j < 3; ++j) {
                    Vec3 ej;
                    ej[j] = ca > 0 ? 1.0 : -1.0;
                    ch.frame[j] = ej;
                }
            } else {
                axis = axis / sa;
                auto rotate = [&](const Vec3& v) {
                    // Rodrigues rotation by angle with given sin/cos.
                    return v * ca + cross(axis, v) * sa + axis * dot(axis, v) * (1.0 - ca);
                };
                for (int j = 0; j < 3; ++j) {
                    Vec3 ej;
                    ej[j] = 1.0;
                    ch.frame[j] = rotate(ej);
                }
            }
        }
        atlas.charts_.push_back(ch);
    }

    // Covering radius of the chart centers over a fine boundary sampling.
    const int probe = domain.dim == 2 ? 4096 : 16384;
    double covering = 0.0;
    for (int s = 0; s < probe; ++s) {
        const Vec3 dir = normalized(domain.boundary_point(s, probe) - domain.center);
        double best = pi;
        for (const Chart& ch : atlas.charts_)
            best = std::min(best, angular_distance(dir, normalized(ch.center - domain.center)));
        covering = std::max(covering, best);
    }
    atlas.psi_arc_ = arc_factor * std::max(covering, 1e-6);
    if (atlas.psi_arc_ >= 0.5 * pi)
        throw std::runtime_error("build_atlas: chart neighbourhoods span a half boundary");

    // Collar depth from the transversality margin of the steepest ray.
    const double worst = frame_tilt + 1.35 * atlas.psi_arc_;
    if (worst >= 0.5 * pi)
        throw std::runtime_error("build_atlas: frame rays graze the boundary (add charts)");
    const double sin_w = std::sin(worst);
    const double geom = 0.75 * domain.radius * (1.0 / sin_w - 1.0);
    atlas.collar_ = std::min(0.15 * domain.radius, geom);
    atlas.build_bins();

    // Keep the whole enclosing set V and all ray excursions inside the box.
    const double excursion = atlas.collar_ / std::cos(worst);
    if (domain.radius + atlas.collar_ + excursion + 2.0 * grid.h >= 0.5 * grid.extent)
        throw std::runtime_error("build_atlas: enclosing set V does not fit in the box");

    atlas.window_ =
        domain.radius * 2.0 * std::sin(0.5 * std::min(pi, 1.6 * atlas.psi_arc_)) +
        2.0 * excursion;

    // Verify the single-intersection property at every point the extensions
    // can touch: a boundary-aligned lattice of the exterior collar.
    const int ang_probe = domain.dim == 2 ? 2048 : 8192;
    std::vector<std::pair<int, double>> w;
    for (int s = 0; s < ang_probe; ++s) {
        const Vec3 bp = domain.boundary_point(s, ang_probe);
        const Vec3 n = domain.outward_normal(bp);
        for (int depth = 1; depth <= 4; ++depth) {
            const Vec3 p = bp + (0.24 * depth * atlas.collar_) * n;
            for (int i : atlas.candidates(normalized(p - domain.center))) {
                if (atlas.bump(i + 1, p) <= 0.0) continue;
                for (int j = 0; j < atlas.frame_count(); ++j) {
                    const Vec3 y = atlas.project(i, j, p);  // throws on failure
                    if (std::abs(domain.delta(y)) > 1e-8)
                        throw std::runtime_error("build_atlas: projection left the boundary");
                }
            }
            if (atlas.weights_at(p, w) == 0.0 && domain.delta(p) > -atlas.support_depth())
                throw std::runtime_error("build_atlas: coverage hole in the collar");
        }
    }
    return atlas;
}

namespace {

Vec3 reflected_value(const VectorSampler& u, const BoundaryAtlas& atlas, int chart_idx,
                     const Vec3& p, bool continuous) {
    const Domain& dom = atlas.domain();
    Vec3 acc;
    for (int j = 0; j < atlas.frame_count(); ++j) {
        const Vec3 y = atlas.project(chart_idx, j, p);
        const Vec3 e = atlas.chart(chart_idx).frame[j];
        const Vec3 trace = continuous
                               ? u(y)
                               : dot(u(y), dom.outward_normal(y)) * dom.outward_normal(y);
        acc += dot(trace, e) * e;
    }
    if (continuous && dom.dim == 2) {
        // z-component of a z-invariant field: carry it along the first ray.
        const Vec3 y = atlas.project(chart_idx, 0, p);
        acc.z = u(y).z;
    }
    return acc;
}

}  // namespace

Vec3 eval_P(const VectorSampler& u, const BoundaryAtlas& atlas, const Vec3& p,
            bool continuous) {
    const double d = atlas.domain().delta(p);
    if (d >= 0.0) return u(p);
    if (d <= -atlas.support_depth()) return Vec3{};
    std::vector<std::pair<int, double>> w;
    if (atlas.weights_at(p, w) == 0.0) return Vec3{};
    Vec3 acc;
    for (const auto& [i, psi] : w) {
        if (i == 0) continue;  // interior bump never reaches outside
        acc += psi * reflected_value(u, atlas, i - 1, p, continuous);
    }
    return acc;
}

namespace {

// Exterior-branch limit of Pu: the chart reflections evaluated regardless of
// the side of the boundary.  The shell problem is posed on the open shell, so
// fluxes on edges crossing the boundary take the shell-side values.
Vec3 eval_P_exterior_branch(const VectorSampler& u, const BoundaryAtlas& atlas, const Vec3& p) {
    const double d = atlas.domain().delta(p);
    if (d <= -atlas.support_depth()) return Vec3{};
    Vec3 acc;
    if (d < 0.0) {
        std::vector<std::pair<int, double>> w;
        if (atlas.weights_at(p, w) == 0.0) return Vec3{};
        for (const auto& [i, psi] : w) {
            if (i == 0) continue;
            acc += psi * reflected_value(u, atlas, i - 1, p, false);
        }
        return acc;
    }
    // Inside: weight the reflections with the boundary-limit chart weights
    // (interior bump excluded; eta = 1 here).
    std::vector<std::pair<int, double>> raw;
    if (atlas.chart_weights(p, raw) == 0.0) return u(p);
    for (const auto& [i, b] : raw) acc += b * reflected_value(u, atlas, i, p, false);
    return acc;
}

}  // namespace

namespace {

VectorField extend_impl(const VectorSampler& u, const BoundaryAtlas& atlas, bool continuous) {
    const Grid& g = atlas.grid();
    VectorField out(g, 3);
    const std::size_t total = g.size();
    for (std::size_t idx = 0; idx < total; ++idx) {
        Vec3 p;
        if (g.dim == 2) {
            p = g.node(static_cast<int>(idx / g.n), static_cast<int>(idx % g.n));
        } else {
            const int k = static_cast<int>(idx % g.n);
            const int j = static_cast<int>((idx / g.n) % g.n);
            const int i = static_cast<int>(idx / (static_cast<std::size_t>(g.n) * g.n));
            p = g.node(i, j, k);
        }
        out.set(idx, eval_P(u, atlas, p, continuous));
    }
    return out;
}

}  // namespace

VectorField extend_P(const VectorSampler& u, const BoundaryAtlas& atlas) {
    return extend_impl(u, atlas, false);
}

VectorField extend_Pc(const VectorSampler& u, const BoundaryAtlas& atlas) {
    return extend_impl(u, atlas, true);
}

PdivResult extend_Pdiv(const VectorSampler& u, const BoundaryAtlas& atlas) {
    const Domain& dom = atlas.domain();
    const Grid& g = atlas.grid();

    PdivResult res;

    // Flux compatibility over the boundary (divergence theorem demands 0).
    const int M = dom.dim == 2 ? 2048 : 8192;
    double flux = 0.0, scale = 1e-30;
    for (const Vec3& b : dom.boundary_samples(M)) {
        const double un = dot(u(b), dom.outward_normal(b));
        flux += un;
        scale = std::max(scale, std::abs(un));
    }
    const double area = dom.dim == 2 ? 2.0 * pi * dom.radius
                                     : 4.0 * pi * dom.radius * dom.radius;
    flux *= area / M;
    res.boundary_flux = flux;
    if (std::abs(flux) > 1e-6 * std::max(1.0, scale) * area)
        throw std::invalid_argument(
            "extend_Pdiv: nonzero net boundary flux, shell Neumann problem insolvable");

    VectorField base = extend_P(u, atlas);

    // Shell nodes: grid nodes strictly outside Omega but inside V.
    const double depth = atlas.support_depth();
    std::vector<std::size_t> shell;
    std::vector<long> shell_id(g.size(), -1);
    auto node_of = [&](std::size_t idx) {
        if (g.dim == 2)
            return g.node(static_cast<int>(idx / g.n), static_cast<int>(idx % g.n));
        const int k = static_cast<int>(idx % g.n);
        const int j = static_cast<int>((idx / g.n) % g.n);
        const int i = static_cast<int>(idx / (static_cast<std::size_t>(g.n) * g.n));
        return g.node(i, j, k);
    };
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
        const double d = dom.delta(node_of(idx));
        if (d < 0.0 && d > -depth) {
            shell_id[idx] = static_cast<long>(shell.size());
            shell.push_back(idx);
        }
    }
    res.shell_nodes = static_cast<int>(shell.size());
    if (shell.empty()) {
        res.field = std::move(base);
        return res;
    }

    // Staggered divergence of Pu sampled at edge midpoints.
    const int naxes = g.dim;
    auto stride_of = [&](int a) -> std::size_t {
        if (g.dim == 2) return a == 0 ? static_cast<std::size_t>(g.n) : 1;
        if (a == 0) return static_cast<std::size_t>(g.n) * g.n;
        return a == 1 ? static_cast<std::size_t>(g.n) : 1;
    };
    std::vector<double> src(shell.size(), 0.0);
    for (std::size_t s = 0; s < shell.size(); ++s) {
        const Vec3 p = node_of(shell[s]);
        double acc = 0.0;
        for (int a = 0; a < naxes; ++a) {
            Vec3 ea;
            ea[a] = 1.0;
            const Vec3 mid_p = p + (0.5 * g.h) * ea;
            const Vec3 mid_m = p - (0.5 * g.h) * ea;
            acc += dot(eval_P_exterior_branch(u, atlas, mid_p), ea) -
                   dot(eval_P_exterior_branch(u, atlas, mid_m), ea);
        }
        src[s] = acc / g.h;
    }
    // Pure-Neumann compatibility: the shell graph may split into several
    // components (it can be a single cell thick on coarse grids), and each
    // carries its own constant null vector, so the source mean is removed
    // component by component.
    std::vector<int> comp_of(shell.size(), -1);
    {
        std::vector<std::size_t> stack;
        int ncomp = 0;
        for (std::size_t seed = 0; seed < shell.size(); ++seed) {
            if (comp_of[seed] >= 0) continue;
            comp_of[seed] = ncomp;
            stack.push_back(seed);
            while (!stack.empty()) {
                const std::size_t s = stack.back();
                stack.pop_back();
                const std::size_t idx = shell[s];
                for (int a = 0; a < naxes; ++a) {
                    const std::size_t str = stride_of(a);
                    const int pos = static_cast<int>((idx / str) % g.n);
                    if (pos + 1 < g.n && shell_id[idx + str] >= 0 &&
                        comp_of[shell_id[idx + str]] < 0) {
                        comp_of[shell_id[idx + str]] = ncomp;
                        stack.push_back(static_cast<std::size_t>(shell_id[idx + str]));
                    }
                    if (pos - 1 >= 0 && shell_id[idx - str] >= 0 &&
                        comp_of[shell_id[idx - str]] < 0) {
                        comp_of[shell_id[idx - str]] = ncomp;
                        stack.push_back(static_cast<std::size_t>(shell_id[idx - str]));
                    }
                }
            }
            ++ncomp;
        }
        std::vector<double> mean(ncomp, 0.0);
        std::vector<int> count(ncomp, 0);
        for (std::size_t s = 0; s < src.size(); ++s) {
            mean[comp_of[s]] += src[s];
            ++count[comp_of[s]];
        }
        for (int c = 0; c < ncomp; ++c) mean[c] /= std::max(1, count[c]);
        for (std::size_t s = 0; s < src.size(); ++s) src[s] -= mean[comp_of[s]];
    }

    // Graph Laplacian on the shell (zero-flux edges elsewhere), CG solve.
    auto apply_L = [&](const std::vector<double>& x, std::vector<double>& y) {
        for (std::size_t s = 0; s < shell.size(); ++s) {
            const std::size_t idx = shell[s];
            double acc = 0.0;
            for (int a = 0; a < naxes; ++a) {
                const std::size_t str = stride_of(a);
                const int pos = static_cast<int>((idx / str) % g.n);
                if (pos + 1 < g.n && shell_id[idx + str] >= 0)
                    acc += x[s] - x[shell_id[idx + str]];
                if (pos - 1 >= 0 && shell_id[idx - str] >= 0)
                    acc += x[s] - x[shell_id[idx - str]];
            }
            y[s] = acc / (g.h * g.h);
        }
    };

    std::vector<double> psi(shell.size(), 0.0), r = src, pdir = src, Ap(shell.size());
    double rr = 0.0;
    for (double v : r) rr += v * v;
    const double rr0 = rr > 0 ? rr : 1.0;
    int it = 0;
    for (; it < 4000 && rr > 1e-24 * rr0 && rr < 1e6 * rr0; ++it) {
        apply_L(pdir, Ap);
        double pAp = 0.0;
        for (std::size_t s = 0; s < pdir.size(); ++s) pAp += pdir[s] * Ap[s];
        if (pAp <= 0.0) break;
        const double alpha = rr / pAp;
        for (std::size_t s = 0; s < psi.size(); ++s) {
            psi[s] += alpha * pdir[s];
            r[s] -= alpha * Ap[s];
        }
        double rr_new = 0.0;
        for (double v : r) rr_new += v * v;
        const double beta = rr_new / rr;
        rr = rr_new;
        for (std::size_t s = 0; s < pdir.size(); ++s) pdir[s] = r[s] + beta * pdir[s];
    }
    res.cg_iterations = it;

    apply_L(psi, Ap);
    double resid = 0.0;
    for (std::size_t s = 0; s < psi.size(); ++s)
        resid = std::max(resid, std::abs(Ap[s] - src[s]));
    res.shell_residual = resid;

    // Subtract grad(psi) on shell nodes (centered where possible).
    for (std::size_t s = 0; s < shell.size(); ++s) {
        const std::size_t idx = shell[s];
        Vec3 gp;
        for (int a = 0; a < naxes; ++a) {
            const std::size_t str = stride_of(a);
            const int pos = static_cast<int>((idx / str) % g.n);
            const bool has_p = pos + 1 < g.n && shell_id[idx + str] >= 0;
            const bool has_m = pos - 1 >= 0 && shell_id[idx - str] >= 0;
            if (has_p && has_m)
                gp[a] = (psi[shell_id[idx + str]] - psi[shell_id[idx - str]]) / (2.0 * g.h);
            else if (has_p)
                gp[a] = (psi[shell_id[idx + str]] - psi[s]) / g.h;
            else if (has_m)
                gp[a] = (psi[s] - psi[shell_id[idx - str]]) / g.h;
        }
        base.set(idx, base.at(idx) - gp);
    }
    res.field = std::move(base);
    return res;
}

std::string ExtensionReport::to_csv_row() const {
    std::ostringstream os;
    os.precision(17);
    os << sup_ratio << "," << ext_cr_ratio << "," << div_sup_ratio << ","
       << ext_div_cr_ratio;
    return os.str();
}

ExtensionReport extension_report(const VectorSampler& u, const BoundaryAtlas& atlas,
                                 double r) {
    const Domain& dom = atlas.domain();

    // Boundary-aligned sample lattice (angles x depths), grid independent.
    const int n_ang = dom.dim == 2 ? 384 : 1536;
    std::vector<Vec3> in_pts, ext_pts;
    for (int s = 0; s < n_ang; ++s) {
        const Vec3 b = dom.boundary_point(s, n_ang);
        const Vec3 n = dom.outward_normal(b);
        for (double fin : {0.02, 0.12, 0.3, 0.6}) in_pts.push_back(b - (fin * dom.radius) * n);
        for (double fout : {0.1, 0.3, 0.5, 0.75})
            ext_pts.push_back(b + (fout * atlas.support_depth()) * n);
    }

    double sup_u = 1e-300;
    for (const Vec3& p : in_pts) sup_u = std::max(sup_u, norm(u(p)));

    // ||u.n||_{C^r} over boundary samples.
    const int M = 512;
    std::vector<Vec3> bpts = dom.boundary_samples(M);
    std::vector<double> un(M);
    for (int i = 0; i < M; ++i) un[i] = dot(u(bpts[i]), dom.outward_normal(bpts[i]));
    const double un_cr = std::max(lp::boundary_holder_norm(un, bpts, r), 1e-300);

    // div(Pu) through the chart rule: the reflected fields are divergence
    // free along their own frame directions, so
    //   div Pu = grad(psi_0).u + psi_0 div(u)        inside,
    //   div Pu = sum_i grad(psi_i) . utilde_i        outside,
    // with the psi gradients taken by small central differences.
    const double fd = 1e-5 * dom.radius;
    auto grad_psi = [&](int i, const Vec3& p) {
        Vec3 gpsi;
        for (int a = 0; a < dom.dim; ++a) {
            Vec3 e;
            e[a] = 1.0;
            gpsi[a] = (atlas.psi(i, p + fd * e) - atlas.psi(i, p - fd * e)) / (2.0 * fd);
        }
        return gpsi;
    };
    auto div_u = [&](const Vec3& p) {
        double acc = 0.0;
        for (int a = 0; a < dom.dim; ++a) {
            Vec3 e;
            e[a] = 1.0;
            acc += (u(p + fd * e)[a] - u(p - fd * e)[a]) / (2.0 * fd);
        }
        return acc;
    };

    ExtensionReport rep;
    double sup_pu = 0.0, div_sup = 0.0;
    for (const Vec3& p : in_pts) {
        sup_pu = std::max(sup_pu, norm(u(p)));
        // Inside, sum(psi) == 1: div Pu = div u.
        div_sup = std::max(div_sup, std::abs(div_u(p)));
    }

    std::vector<std::pair<int, double>> w;
    std::vector<double> ext_vals[3];
    std::vector<double> ext_div_vals;
    for (const Vec3& p : ext_pts) {
        const Vec3 pu = eval_P(u, atlas, p, false);
        sup_pu = std::max(sup_pu, norm(pu));
        for (int c = 0; c < 3; ++c) ext_vals[c].push_back(pu[c]);
        double dv = 0.0;
        if (atlas.weights_at(p, w) > 0.0) {
            for (const auto& [i, psi_val] : w) {
                (void)psi_val;
                if (i == 0) continue;
                dv += dot(grad_psi(i, p), reflected_value(u, atlas, i - 1, p, false));
            }
        }
        ext_div_vals.push_back(dv);
        div_sup = std::max(div_sup, std::abs(dv));
    }

    rep.sup_ratio = sup_pu / sup_u;
    rep.div_sup_ratio = div_sup / sup_u;

    // Exterior C^r of Pu and of its divergence: direct Holder seminorms over
    // a subsample of the exterior lattice.
    std::vector<Vec3> pts2;
    std::vector<double> vals2[3], divs2;
    const std::size_t stride = ext_pts.size() / 900 + 1;
    for (std::size_t s = 0; s < ext_pts.size(); s += stride) {
        pts2.push_back(ext_pts[s]);
        for (int c = 0; c < 3; ++c) vals2[c].push_back(ext_vals[c][s]);
        divs2.push_back(ext_div_vals[s]);
    }
    double ext_cr = 0.0;
    for (int c = 0; c < 3; ++c)
        ext_cr = std::max(ext_cr, lp::boundary_holder_norm(vals2[c], pts2, r));
    rep.ext_cr_ratio = ext_cr / un_cr;
    rep.ext_div_cr_ratio = lp::boundary_holder_norm(divs2, pts2, r) / un_cr;
    return rep;
}

}  // namespace patchlab::ext
