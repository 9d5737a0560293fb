#include "patchlab/biot_savart.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "patchlab/interp.hpp"
#include "patchlab/lp.hpp"
#include "patchlab/spectral.hpp"

namespace patchlab::bs {

using std::numbers::pi;

// ---------------------------------------------------------------------------
// Periodic symbol route
// ---------------------------------------------------------------------------

VectorField bs_periodic(const VectorField& omega) {
    const Grid& g = omega.grid;
    if (omega.ncomp != 3) throw std::invalid_argument("bs_periodic: need 3 components");
    const double scale = 1.0 / static_cast<double>(g.size());
    for (int c = 0; c < 3; ++c) {
        double mean = 0.0;
        for (double v : omega.comp[c].data) mean += v;
        mean *= scale;
        if (std::abs(mean) > 1e-10 * (1.0 + max_abs(omega.comp[c])))
            throw std::invalid_argument(
                "bs_periodic: vorticity component has nonzero mean (periodic solvability)");
    }
    spectral::Spectrum what[3] = {spectral::forward(omega.comp[0]),
                                  spectral::forward(omega.comp[1]),
                                  spectral::forward(omega.comp[2])};
    spectral::Spectrum vhat[3] = {spectral::Spectrum(g), spectral::Spectrum(g),
                                  spectral::Spectrum(g)};
    const double base = 2.0 * pi / g.extent;
    int k[3];
    for (std::size_t i = 0; i < g.size(); ++i) {
        spectral::freq_of_index(g, i, k);
        const double k2 = base * base * (double(k[0]) * k[0] + double(k[1]) * k[1] +
                                         double(k[2]) * k[2]);
        if (k2 == 0.0) continue;
        const std::complex<double> I(0.0, 1.0);
        const std::complex<double> wx = what[0].data[i], wy = what[1].data[i],
                                   wz = what[2].data[i];
        const double kx = base * k[0], ky = base * k[1], kz = base * k[2];
        vhat[0].data[i] = I * (ky * wz - kz * wy) / k2;
        vhat[1].data[i] = I * (kz * wx - kx * wz) / k2;
        vhat[2].data[i] = I * (kx * wy - ky * wx) / k2;
    }
    VectorField v(g, 3);
    for (int c = 0; c < 3; ++c) v.comp[c] = spectral::inverse(vhat[c]);
    return v;
}

VectorField bs_periodic(const ScalarField& omega_z) {
    VectorField w(omega_z.grid, 3);
    double mean = 0.0;
    for (double v : omega_z.data) mean += v;
    mean /= static_cast<double>(omega_z.data.size());
    for (std::size_t i = 0; i < omega_z.data.size(); ++i)
        w.comp[2].data[i] = omega_z.data[i] - mean;
    return bs_periodic(w);
}

// ---------------------------------------------------------------------------
// Free-space route: zero-padded convolution with the fundamental solution
// ---------------------------------------------------------------------------

namespace {

struct FreeKernels {
    Grid padded;
    std::vector<spectral::Spectrum> khat;  // 2-D: {Hx, Hy}; 3-D: {G1, G2, G3}
};

const FreeKernels& free_kernels(const Grid& g) {
    static std::map<std::tuple<int, int, double>, FreeKernels> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_tuple(g.dim, g.n, g.extent);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    FreeKernels fk;
    fk.padded = build_grid(g.dim, 2.0 * g.extent, 2 * g.n);
    const Grid& pg = fk.padded;
    auto offset = [&](int i) { return (i <= pg.n / 2 ? i : i - pg.n) * g.h; };

    if (g.dim == 2) {
        ScalarField Hx(pg), Hy(pg);
        for (int i = 0; i < pg.n; ++i)
            for (int j = 0; j < pg.n; ++j) {
                const double rx = offset(i), ry = offset(j);
                const double r2 = rx * rx + ry * ry;
                if (r2 == 0.0) continue;  // odd kernel: self term vanishes
                Hx.at(i, j) = -ry / (2.0 * pi * r2);
                Hy.at(i, j) = rx / (2.0 * pi * r2);
            }
        fk.khat.push_back(spectral::forward(Hx));
        fk.khat.push_back(spectral::forward(Hy));
    } else {
        for (int c = 0; c < 3; ++c) {
            ScalarField G(pg);
            for (int i = 0; i < pg.n; ++i)
                for (int j = 0; j < pg.n; ++j)
                    for (int kk = 0; kk < pg.n; ++kk) {
                        const double r[3] = {offset(i), offset(j), offset(kk)};
                        const double rr = std::sqrt(r[0] * r[0] + r[1] * r[1] + r[2] * r[2]);
                        if (rr == 0.0) continue;
                        G.at(i, j, kk) = r[c] / (4.0 * pi * rr * rr * rr);
                    }
            fk.khat.push_back(spectral::forward(G));
        }
    }
    return cache.emplace(key, std::move(fk)).first->second;
}

void require_margin(const ScalarField& f, int margin) {
    const Grid& g = f.grid;
    auto nonzero_near_edge = [&](std::size_t idx) { return f.data[idx] != 0.0; };
    if (g.dim == 2) {
        for (int b = 0; b < margin; ++b)
            for (int t = 0; t < g.n; ++t)
                for (int e : {b, g.n - 1 - b})
                    if (nonzero_near_edge(g.index(e, t)) || nonzero_near_edge(g.index(t, e)))
                        throw std::invalid_argument(
                            "bs_free: vorticity support must clear the box edge by 4h");
    } else {
        for (int b = 0; b < margin; ++b)
            for (int s = 0; s < g.n; ++s)
                for (int t = 0; t < g.n; ++t)
                    for (int e : {b, g.n - 1 - b})
                        if (nonzero_near_edge(g.index(e, s, t)) ||
                            nonzero_near_edge(g.index(s, e, t)) ||
                            nonzero_near_edge(g.index(s, t, e)))
                            throw std::invalid_argument(
                                "bs_free: vorticity support must clear the box edge by 4h");
    }
}

spectral::Spectrum pad_forward(const ScalarField& f, const Grid& pg) {
    ScalarField padded(pg);
    const Grid& g = f.grid;
    if (g.dim == 2) {
        for (int i = 0; i < g.n; ++i)
            for (int j = 0; j < g.n; ++j) padded.at(i, j) = f.at(i, j);
    } else {
        for (int i = 0; i < g.n; ++i)
            for (int j = 0; j < g.n; ++j)
                for (int k = 0; k < g.n; ++k) padded.at(i, j, k) = f.at(i, j, k);
    }
    return spectral::forward(padded);
}

ScalarField crop(const ScalarField& big, const Grid& g) {
    ScalarField out(g);
    if (g.dim == 2) {
        for (int i = 0; i < g.n; ++i)
            for (int j = 0; j < g.n; ++j) out.at(i, j) = big.at(i, j);
    } else {
        for (int i = 0; i < g.n; ++i)
            for (int j = 0; j < g.n; ++j)
                for (int k = 0; k < g.n; ++k) out.at(i, j, k) = big.at(i, j, k);
    }
    return out;
}

}  // namespace

VectorField bs_free(const ScalarField& omega_z) {
    const Grid& g = omega_z.grid;
    if (g.dim != 2) throw std::invalid_argument("bs_free(scalar): 2-D grids only");
    require_margin(omega_z, 4);
    const FreeKernels& fk = free_kernels(g);
    spectral::Spectrum what = pad_forward(omega_z, fk.padded);
    const double meas = g.h * g.h;

    VectorField v(g, 3);
    for (int c = 0; c < 2; ++c) {
        spectral::Spectrum prod(fk.padded);
        for (std::size_t i = 0; i < prod.data.size(); ++i)
            prod.data[i] = fk.khat[c].data[i] * what.data[i];
        ScalarField conv = spectral::inverse(prod);
        for (auto& x : conv.data) x *= meas;
        v.comp[c] = crop(conv, g);
    }
    return v;
}

VectorField bs_free(const VectorField& omega) {
    const Grid& g = omega.grid;
    if (g.dim != 3 || omega.ncomp != 3)
        throw std::invalid_argument("bs_free(vector): 3-D, 3-component fields only");
    for (int c = 0; c < 3; ++c) require_margin(omega.comp[c], 4);
    const FreeKernels& fk = free_kernels(g);
    spectral::Spectrum what[3] = {pad_forward(omega.comp[0], fk.padded),
                                  pad_forward(omega.comp[1], fk.padded),
                                  pad_forward(omega.comp[2], fk.padded)};
    const double meas = g.h * g.h * g.h;

    VectorField v(g, 3);
    // v_i = conv(G_k, w_j) - conv(G_j, w_k) for (i, j, k) cyclic.
    const int cyc[3][2] = {{1, 2}, {2, 0}, {0, 1}};
    for (int i = 0; i < 3; ++i) {
        const int j = cyc[i][0], k = cyc[i][1];
        spectral::Spectrum prod(fk.padded);
        for (std::size_t s = 0; s < prod.data.size(); ++s)
            prod.data[s] = fk.khat[k].data[s] * what[j].data[s] -
                           fk.khat[j].data[s] * what[k].data[s];
        ScalarField conv = spectral::inverse(prod);
        for (auto& x : conv.data) x *= meas;
        v.comp[i] = crop(conv, g);
    }
    return v;
}

// ---------------------------------------------------------------------------
// Lambda multiplier
// ---------------------------------------------------------------------------

double lambda_symbol(double rho) {
    return std::sqrt(lp::DyadicFilterBank::chi(rho) + rho * rho);
}

ScalarField lambda_apply(const ScalarField& f, double sigma) {
    if (sigma == 0.0) return f;
    return spectral::apply_radial_symbol(
        f, [sigma](double rho) { return std::pow(lambda_symbol(rho), sigma); });
}

// ---------------------------------------------------------------------------
// Disk Neumann correction
// ---------------------------------------------------------------------------

DiskCorrection solve_disk_neumann(const std::vector<double>& g_samples, const Domain& dom,
                                  double mean_tol) {
    const int M = static_cast<int>(g_samples.size());
    if (M < 8 || (M & (M - 1)) != 0)
        throw std::invalid_argument("solve_disk_neumann: sample count must be a power of two");
    double scale = 0.0;
    for (double v : g_samples) scale = std::max(scale, std::abs(v));

    // Direct DFT of the boundary samples (M is small).
    std::vector<std::complex<double>> ghat(M / 2, {0.0, 0.0});
    for (int m = 0; m < M / 2; ++m) {
        std::complex<double> acc{0.0, 0.0};
        for (int j = 0; j < M; ++j) {
            const double th = 2.0 * pi * j * m / M;
            acc += g_samples[j] * std::complex<double>(std::cos(th), -std::sin(th));
        }
        ghat[m] = acc / static_cast<double>(M);
    }
    if (std::abs(ghat[0]) > mean_tol * std::max(1.0, scale))
        throw std::invalid_argument("neumann_correct: boundary flux compatibility violated");

    std::vector<std::complex<double>> b(M / 2, {0.0, 0.0});
    for (int m = 1; m < M / 2; ++m) b[m] = 2.0 * ghat[m];
    return DiskCorrection(dom.center, dom.radius, std::move(b));
}

Vec3 DiskCorrection::grad(const Vec3& p) const {
    // alpha = Re A(z), A'(z) = sum_m b_m (z/R)^{m-1}: grad = (Re A', -Im A').
    const std::complex<double> w((p.x - center_.x) / R_, (p.y - center_.y) / R_);
    std::complex<double> acc{0.0, 0.0};
    for (int m = static_cast<int>(coef_.size()) - 1; m >= 1; --m)
        acc = acc * w + coef_[m];
    return {acc.real(), -acc.imag(), 0.0};
}

void DiskCorrection::grad_hessian(const Vec3& p, Vec3& grad_out, double& axx,
                                  double& axy) const {
    const std::complex<double> w((p.x - center_.x) / R_, (p.y - center_.y) / R_);
    std::complex<double> a1{0.0, 0.0}, a2{0.0, 0.0};
    for (int m = static_cast<int>(coef_.size()) - 1; m >= 1; --m) {
        a1 = a1 * w + coef_[m];
        if (m >= 2) a2 = a2 * w + coef_[m] * static_cast<double>(m - 1);
    }
    a2 /= R_;
    grad_out = {a1.real(), -a1.imag(), 0.0};
    axx = a2.real();
    axy = -a2.imag();
}

// ---------------------------------------------------------------------------
// Ball Neumann correction (real spherical harmonics)
// ---------------------------------------------------------------------------

namespace {

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double t = std::cos(pi * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = t;
            for (int l = 2; l <= n; ++l) {
                const double p2 = ((2 * l - 1) * t * p1 - (l - 1) * p0) / l;
                p0 = p1;
                p1 = p2;
            }
            const double dp = n * (t * p1 - p0) / (t * t - 1.0);
            const double dt = p1 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-15) {
                x[i] = t;
                w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
                break;
            }
        }
    }
}

// Orthonormal real spherical harmonics Y_{l,m} at (ct = cos(theta), phi),
// packed l*(l+1) + m with m in [-l, l] (negative m = sine branch).
void real_sph_harmonics(int lmax, double ct, double phi, std::vector<double>& out) {
    const int nc = (lmax + 1) * (lmax + 1);
    out.assign(nc, 0.0);
    const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    // Associated Legendre P_l^m without Condon-Shortley phase.
    std::vector<double> P((lmax + 1) * (lmax + 1), 0.0);
    auto idx = [lmax](int l, int m) { return l * (lmax + 1) + m; };
    P[idx(0, 0)] = 1.0;
    for (int m = 1; m <= lmax; ++m)
        P[idx(m, m)] = P[idx(m - 1, m - 1)] * (2 * m - 1) * st;
    for (int m = 0; m < lmax; ++m) P[idx(m + 1, m)] = ct * (2 * m + 1) * P[idx(m, m)];
    for (int m = 0; m <= lmax; ++m)
        for (int l = m + 2; l <= lmax; ++l)
            P[idx(l, m)] =
                (ct * (2 * l - 1) * P[idx(l - 1, m)] - (l + m - 1) * P[idx(l - 2, m)]) /
                (l - m);

    for (int l = 0; l <= lmax; ++l) {
        // m = 0
        double norm0 = std::sqrt((2 * l + 1) / (4.0 * pi));
        out[l * (l + 1)] = norm0 * P[idx(l, 0)];
        double ratio = 1.0;  // (l-m)! / (l+m)!
        for (int m = 1; m <= l; ++m) {
            ratio /= (l - m + 1.0) * (l + m);
            const double nlm = std::sqrt((2 * l + 1) / (2.0 * pi) * ratio);
            out[l * (l + 1) + m] = nlm * P[idx(l, m)] * std::cos(m * phi);
            out[l * (l + 1) - m] = nlm * P[idx(l, m)] * std::sin(m * phi);
        }
    }
}

}  // namespace

BallCorrection solve_ball_neumann(const ext::VectorSampler& vbar, const Domain& dom,
                                  int lmax, double mean_tol) {
    const int ngl = std::max(2 * lmax + 2, 24);
    const int nphi = std::max(2 * lmax + 2, 32);
    std::vector<double> ct, wgl;
    gauss_legendre(ngl, ct, wgl);

    std::vector<double> coef(BallCorrection::coef_count(lmax), 0.0);
    std::vector<double> Y;
    double gsup = 0.0;
    for (int i = 0; i < ngl; ++i) {
        const double st = std::sqrt(std::max(0.0, 1.0 - ct[i] * ct[i]));
        for (int j = 0; j < nphi; ++j) {
            const double phi = 2.0 * pi * j / nphi;
            const Vec3 n{st * std::cos(phi), st * std::sin(phi), ct[i]};
            const Vec3 p = dom.center + dom.radius * n;
            const double gval = dot(vbar(p), n);
            gsup = std::max(gsup, std::abs(gval));
            const double wq = wgl[i] * (2.0 * pi / nphi);
            real_sph_harmonics(lmax, ct[i], phi, Y);
            for (std::size_t c = 0; c < coef.size(); ++c) coef[c] += wq * gval * Y[c];
        }
    }
    if (std::abs(coef[0]) > mean_tol * std::max(1.0, gsup) * std::sqrt(4.0 * pi)) {
        std::ostringstream msg;
        msg << "ball neumann: boundary flux compatibility violated (l=0 coef "
            << coef[0] << ", g sup " << gsup << ")";
        throw std::invalid_argument(msg.str());
    }
    coef[0] = 0.0;
    // d(alpha)/dr = g on r = R  =>  alpha_{lm} = g_{lm} R / l for the
    // interior solid harmonic (r/R)^l Y_lm.
    for (int l = 1; l <= lmax; ++l)
        for (int m = -l; m <= l; ++m) coef[l * (l + 1) + m] *= dom.radius / l;
    return BallCorrection(dom.center, dom.radius, lmax, std::move(coef));
}

double BallCorrection::alpha(const Vec3& p) const {
    const Vec3 q = p - center_;
    const double r = norm(q);
    if (r < 1e-14) return 0.0;
    const double ct = q.z / r;
    const double phi = std::atan2(q.y, q.x);
    std::vector<double> Y;
    real_sph_harmonics(lmax_, ct, phi, Y);
    double acc = 0.0;
    double rl = 1.0;
    for (int l = 1; l <= lmax_; ++l) {
        rl *= r / R_;
        for (int m = -l; m <= l; ++m) acc += coef_[l * (l + 1) + m] * rl * Y[l * (l + 1) + m];
    }
    return acc;
}

Vec3 BallCorrection::grad(const Vec3& p) const {
    const double fd = 1e-5 * R_;
    Vec3 g;
    for (int a = 0; a < 3; ++a) {
        Vec3 e;
        e[a] = 1.0;
        g[a] = (alpha(p + fd * e) - alpha(p - fd * e)) / (2.0 * fd);
    }
    return g;
}

// ---------------------------------------------------------------------------
// Velocity reconstruction
// ---------------------------------------------------------------------------

Vec3 VelocitySolution::vbar_at(const Vec3& p) const { return interp::sample_cubic(vbar, p); }

Vec3 VelocitySolution::correction_grad(const Vec3& p) const {
    return planar ? disk.grad(p) : ball.grad(p);
}

Vec3 VelocitySolution::velocity_at(const Vec3& p) const {
    return vbar_at(p) - correction_grad(p);
}

VectorField VelocitySolution::velocity_field() const {
    VectorField v(grid, 3);
    const std::size_t total = grid.size();
    for (std::size_t idx = 0; idx < total; ++idx) {
        Vec3 p;
        if (grid.dim == 2) {
            p = grid.node(static_cast<int>(idx / grid.n), static_cast<int>(idx % grid.n));
        } else {
            const int k = static_cast<int>(idx % grid.n);
            const int j = static_cast<int>((idx / grid.n) % grid.n);
            const int i = static_cast<int>(idx / (static_cast<std::size_t>(grid.n) * grid.n));
            p = grid.node(i, j, k);
        }
        if (domain.delta(p) < 0.0) continue;
        v.set(idx, vbar.at(idx) - correction_grad(p));
    }
    return v;
}

double VelocitySolution::boundary_normal_residual(int count) const {
    double worst = 0.0;
    for (const Vec3& b : domain.boundary_samples(count))
        worst = std::max(worst, std::abs(dot(velocity_at(b), domain.outward_normal(b))));
    return worst;
}

VelocitySolution velocity_from_vorticity(const ScalarField& omega, const Domain& dom) {
    const Grid& g = omega.grid;
    if (g.dim != 2) throw std::invalid_argument("velocity_from_vorticity: 2-D overload");

    // 2-D vorticity is tangent to every boundary (it points along z), so its
    // divergence-free extension is extension by zero.
    ScalarField masked(g);
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
            masked.at(i, j) = dom.delta(g.node(i, j)) >= 0.0 ? omega.at(i, j) : 0.0;

    VelocitySolution sol;
    sol.grid = g;
    sol.domain = dom;
    sol.planar = true;
    sol.vbar = bs_free(masked);

    const int M = 512;
    std::vector<double> gbnd(M);
    std::vector<Vec3> bpts = dom.boundary_samples(M);
    for (int i = 0; i < M; ++i)
        gbnd[i] = dot(interp::sample_cubic(sol.vbar, bpts[i]), dom.outward_normal(bpts[i]));
    sol.disk = solve_disk_neumann(gbnd, dom);
    return sol;
}

VelocitySolution velocity_from_vorticity(const ext::VectorSampler& omega,
                                         const ext::BoundaryAtlas& atlas) {
    const Grid& g = atlas.grid();
    if (g.dim != 3) throw std::invalid_argument("velocity_from_vorticity: 3-D overload");
    ext::PdivResult pd = ext::extend_Pdiv(omega, atlas);

    VelocitySolution sol;
    sol.grid = g;
    sol.domain = atlas.domain();
    sol.planar = false;
    sol.vbar = bs_free(pd.field);
    // Desk-scale grids leave a small discrete flux defect in vbar.n; the
    // l = 0 harmonic is projected out by the solve either way.
    sol.ball = solve_ball_neumann(ext::field_sampler(sol.vbar), atlas.domain(), 14, 3e-3);
    return sol;
}

double kinetic_energy(const VectorField& v, const Domain& dom) {
    const Grid& g = v.grid;
    double s = 0.0, comp = 0.0;
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
        if (dom.delta(p) < 0.0) continue;
        const double term = norm2(v.at(idx)) - comp;
        const double t = s + term;
        comp = (t - s) - term;
        s = t;
    }
    return 0.5 * std::pow(g.h, g.dim) * s;
}

// ---------------------------------------------------------------------------
// Static estimate assembly
// ---------------------------------------------------------------------------

std::string StaticReport::csv_header() const {
    return "t,v_lip_grid,v_lip_pairs,omega_sup,winv_sup,sum_w_cr,sum_conormal,"
           "omega_n_cr,X,log_ratio,grad_v_holder,omega_holder,x20_margin";
}

std::string StaticReport::csv_row(double t) const {
    std::ostringstream os;
    os.precision(17);
    os << t << "," << v_lip_grid << "," << v_lip_pairs << "," << omega_sup << ","
       << winv_sup << "," << sum_w_cr << "," << sum_conormal << "," << omega_n_cr << ","
       << X << "," << log_ratio << "," << grad_v_holder << "," << omega_holder << ","
       << x20_margin;
    return os.str();
}

StaticReport static_estimate_report(const VelocitySolution& vel, const ScalarField& omega,
                                    const patch::TangentSystem& W,
                                    const patch::VortexPatch& pat, const Domain& dom,
                                    double r, Rng rng) {
    const Grid& g = vel.grid;
    StaticReport rep;

    // Velocity gradient on interior nodes: spectral grad of vbar minus the
    // analytic correction Hessian.
    ScalarField dvx_dx = spectral::differentiate(vel.vbar.comp[0], 0);
    ScalarField dvx_dy = spectral::differentiate(vel.vbar.comp[0], 1);
    ScalarField dvy_dx = spectral::differentiate(vel.vbar.comp[1], 0);
    ScalarField dvy_dy = spectral::differentiate(vel.vbar.comp[1], 1);

    std::vector<Vec3> interior_pts;
    std::vector<double> gxx, gxy, gyx, gyy, om_interior;
    std::vector<Vec3> omega_pts;
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j) {
            const Vec3 p = g.node(i, j);
            if (dom.delta(p) < 0.0) continue;
            Vec3 ga;
            double axx, axy;
            vel.disk.grad_hessian(p, ga, axx, axy);
            const double vxx = dvx_dx.at(i, j) - axx;
            const double vxy = dvx_dy.at(i, j) - axy;
            const double vyx = dvy_dx.at(i, j) - axy;
            const double vyy = dvy_dy.at(i, j) + axx;  // harmonic: ayy = -axx
            rep.v_lip_grid = std::max({rep.v_lip_grid, std::abs(vxx), std::abs(vxy),
                                       std::abs(vyx), std::abs(vyy)});
            rep.omega_sup = std::max(rep.omega_sup, std::abs(omega.at(i, j)));
            if (dom.boundary_distance(p) >= 0.15 * dom.radius) {
                interior_pts.push_back(p);
                gxx.push_back(vxx);
                gxy.push_back(vxy);
                gyx.push_back(vyx);
                gyy.push_back(vyy);
                om_interior.push_back(omega.at(i, j));
                omega_pts.push_back(p);
            }
        }

    // Two-point Lipschitz seminorm over random interior pairs.
    Rng pairs = rng.stream("static-lip-pairs");
    VectorField vfield = vel.velocity_field();
    const std::size_t npts = interior_pts.size();
    for (int trial = 0; trial < 10000 && npts >= 2; ++trial) {
        const std::size_t a = pairs.next_u64() % npts;
        const std::size_t b = pairs.next_u64() % npts;
        if (a == b) continue;
        const Vec3 pa = interior_pts[a], pb = interior_pts[b];
        const double dist = norm(pa - pb);
        if (dist < g.h) continue;
        const Vec3 va = vel.velocity_at(pa), vb = vel.velocity_at(pb);
        rep.v_lip_pairs = std::max(rep.v_lip_pairs, norm(va - vb) / dist);
    }

    // [grad v]_r and [omega]_r over a subsample of interior nodes.
    Rng holder = rng.stream("static-holder-pairs");
    double gv_sn = 0.0, om_sn = 0.0;
    for (int trial = 0; trial < 20000 && npts >= 2; ++trial) {
        const std::size_t a = holder.next_u64() % npts;
        const std::size_t b = holder.next_u64() % npts;
        if (a == b) continue;
        const double dist = norm(interior_pts[a] - interior_pts[b]);
        if (dist < 2.0 * g.h) continue;
        const double dr = std::pow(dist, r);
        gv_sn = std::max({gv_sn, std::abs(gxx[a] - gxx[b]) / dr,
                          std::abs(gxy[a] - gxy[b]) / dr, std::abs(gyx[a] - gyx[b]) / dr,
                          std::abs(gyy[a] - gyy[b]) / dr});
        om_sn = std::max(om_sn, std::abs(om_interior[a] - om_interior[b]) / dr);
    }
    rep.grad_v_holder = gv_sn;
    rep.omega_holder = om_sn;

    // Admissibility and tangent-field norms.
    patch::AdmissibilityResult adm = patch::admissibility(W, g, dom);
    if (adm.degenerate)
        throw std::invalid_argument("static_estimate_report: tangent system not admissible");
    rep.winv_sup = adm.sup;

    for (const auto& wfn : W.fields) {
        VectorField wf(g, 3);
        for (int i = 0; i < g.n; ++i)
            for (int j = 0; j < g.n; ++j) wf.set(g.index(i, j), wfn(g.node(i, j)));
        rep.sum_w_cr += lp::holder_norm(wf, r);
        patch::ConormalReport con = patch::conormal_derivative(wfn, pat, g, r, false);
        rep.sum_conormal += con.csm1_estimate;
    }

    // ||omega.n||_{C^r(boundary)}: planar vorticity points along z, so this
    // vanishes identically in 2-D.
    rep.omega_n_cr = 0.0;

    rep.X = 1.0 + rep.omega_sup + rep.winv_sup + rep.sum_w_cr + rep.sum_conormal +
            rep.omega_n_cr;
    const double vlip = std::max(rep.v_lip_grid, rep.v_lip_pairs);
    rep.log_ratio = vlip / ((1.0 + rep.omega_sup) * std::log(std::numbers::e + rep.X));

    const double x20 = std::pow(std::min(rep.X, 1e15), 20.0);
    rep.x20_margin = (rep.grad_v_holder - rep.omega_holder) / x20;
    return rep;
}

}  // namespace patchlab::bs
