// Acceptance suite: one line per criterion, nonzero exit if any fails.
// Thresholds are pinned here; oracle values come from closed forms or
// independent evaluation routes, never from the implementation under test.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

#include "patchlab/biot_savart.hpp"
#include "patchlab/contour.hpp"
#include "patchlab/domain.hpp"
#include "patchlab/dynamics.hpp"
#include "patchlab/extension.hpp"
#include "patchlab/grid.hpp"
#include "patchlab/interp.hpp"
#include "patchlab/lp.hpp"
#include "patchlab/multiplier.hpp"
#include "patchlab/patch.hpp"
#include "patchlab/rng.hpp"
#include "patchlab/scenario.hpp"
#include "patchlab/spectral.hpp"
#include "patchlab/verify.hpp"

using namespace patchlab;
using std::numbers::pi;

namespace {

constexpr double kTwoPi = 2.0 * pi;

// Regression baseline for the log-Lipschitz ratio (criterion 10): largest
// observed ratio across the shipped scenarios is ~0.091; recorded with
// ~2.5x headroom.
constexpr double kLogRatioBound = 0.25;

int g_failures = 0;

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

void report(int id, const std::string& what, bool pass, double value, double threshold,
            double secs) {
    std::printf("[%s] criterion %2d: %-58s value=%.4e threshold=%.4e (%.1f s)\n",
                pass ? "PASS" : "FAIL", id, what.c_str(), value, threshold, secs);
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

ScalarField random_field(const Grid& g, Rng& rng, int kmax) {
    spectral::Spectrum s(g);
    int k[3];
    for (std::size_t i = 0; i < g.size(); ++i) {
        spectral::freq_of_index(g, i, k);
        const double k2 = double(k[0]) * k[0] + double(k[1]) * k[1];
        if (k2 == 0.0 || k2 > double(kmax) * kmax) continue;
        s.data[i] = {rng.gaussian() / std::sqrt(k2), rng.gaussian() / std::sqrt(k2)};
    }
    ScalarField f = spectral::inverse(s);
    const double scale = static_cast<double>(g.size()) / g.n;
    for (auto& v : f.data) v *= scale;
    return f;
}

// --------------------------------------------------------------- criteria 1+2
void criterion_bony_and_reconstruction() {
    Timer timer;
    Grid g = build_grid(2, kTwoPi, 256);
    Rng rng(1);
    Rng stream = rng.stream("acc-bony");
    double worst_bony = 0.0, worst_recon = 0.0;
    for (int t = 0; t < 100; ++t) {
        ScalarField a = random_field(g, stream, g.n / 3);
        ScalarField b = random_field(g, stream, g.n / 3);
        lp::BonySplit split = lp::bony_split(a, b);
        double err = 0.0, scale = 1.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double ab = a.data[i] * b.data[i];
            scale = std::max(scale, std::abs(ab));
            err = std::max(err, std::abs(split.T_ab.data[i] + split.T_ba.data[i] +
                                         split.R_ab.data[i] - ab));
        }
        worst_bony = std::max(worst_bony, err / scale);
        if (t % 10 == 0) {
            ScalarField rec = lp::dyadic_blocks(a).reconstruct();
            double rerr = 0.0;
            for (std::size_t i = 0; i < g.size(); ++i)
                rerr = std::max(rerr, std::abs(rec.data[i] - a.data[i]));
            worst_recon = std::max(worst_recon, rerr / std::max(1.0, max_abs(a)));
        }
    }
    const double secs = timer.seconds();
    report(1, "Bony identity, 100 random pairs at 256^2", worst_bony <= 1e-10 && secs < 60.0,
           worst_bony, 1e-10, secs);
    report(2, "LP reconstruction over the corpus", worst_recon <= 1e-10, worst_recon, 1e-10,
           timer.seconds());
}

// ----------------------------------------------------------------- criterion 3
void criterion_multiplier() {
    Timer timer;
    auto census_at = [](int n) {
        Grid g = build_grid(2, kTwoPi, n);
        patch::VortexPatch p;
        p.support.kind = patch::LevelSet::Kind::Circle;
        p.support.center = g.center();
        p.support.a = 0.7;
        p.planar = true;
        p.omega_i_s = [](const Vec3&) { return 1.0; };
        p.omega_e_s = [](const Vec3&) { return 0.0; };
        Rng rng(2);
        return lp::indicator_multiplier_census(p.indicator(g), 0.5, 50, rng).max_ratio;
    };
    const double r128 = census_at(128);
    const double r256 = census_at(256);
    const double change = std::abs(r256 - r128) / r128;
    const bool finite = std::isfinite(r128) && std::isfinite(r256);
    report(3, "multiplier census finite, 128->256 change <= 30%", finite && change <= 0.30,
           change, 0.30, timer.seconds());
}

// ----------------------------------------------------------------- criterion 4
void criterion_extension() {
    Timer timer;
    Grid g = build_grid(2, kTwoPi, 256);
    Domain d = domain_disk(g, 1.3);
    ext::BoundaryAtlas atlas = ext::build_atlas(d, g, 24);

    // (a) tangent divergence-free fields extend by zero.
    double worst_ext = 0.0;
    for (int mode = 0; mode < 20; ++mode) {
        auto u = [c = d.center, mode](const Vec3& p) {
            const Vec3 q = p - c;
            const double r2 = dot(q, q);
            // G'(delta)-type tangent field with angular modulation baked
            // into the radial profile (analytically tangent to every circle)
            return perp(q) * (1.0 + 0.1 * mode) * std::exp(-r2);
        };
        VectorField pu = ext::extend_P(u, atlas);
        for (int i = 0; i < g.n; ++i)
            for (int j = 0; j < g.n; ++j)
                if (d.delta(g.node(i, j)) < 0.0)
                    worst_ext = std::max(worst_ext, norm(pu.at(g.index(i, j))));
    }

    // (b) div(P_div u) over a 20-field corpus of discretely divergence-free
    // interior-supported fields: u = centered-difference curl of a compact
    // stream function (exactly compact, exactly div-free under the matching
    // centered divergence, which is also the audit operator).
    Rng rng(3);
    Rng stream = rng.stream("acc-ext-div");
    double worst_div = 0.0;
    auto cdiff = [&](const ScalarField& f, int axis) {
        ScalarField out(g);
        for (int i = 0; i < g.n; ++i)
            for (int j = 0; j < g.n; ++j) {
                const int ip = (axis == 0 ? (i + 1) % g.n : i);
                const int im = (axis == 0 ? (i + g.n - 1) % g.n : i);
                const int jp = (axis == 1 ? (j + 1) % g.n : j);
                const int jm = (axis == 1 ? (j + g.n - 1) % g.n : j);
                out.at(i, j) = (f.at(ip, jp) - f.at(im, jm)) / (2.0 * g.h);
            }
        return out;
    };
    for (int t = 0; t < 20; ++t) {
        ScalarField phi = random_field(g, stream, 12);
        for (int i = 0; i < g.n; ++i)
            for (int j = 0; j < g.n; ++j) {
                const double bd = d.boundary_distance(g.node(i, j));
                const double cut =
                    bd < 0.25 * d.radius
                        ? 0.0
                        : (bd > 0.45 * d.radius
                               ? 1.0
                               : 0.5 - 0.5 * std::cos(pi * (bd - 0.25 * d.radius) /
                                                      (0.2 * d.radius)));
                phi.at(i, j) *= cut;
            }
        VectorField u(g, 3);
        u.comp[0] = cdiff(phi, 1);
        ScalarField mdx = cdiff(phi, 0);
        for (std::size_t i = 0; i < g.size(); ++i) u.comp[1].data[i] = -mdx.data[i];
        double usup = std::max(max_norm(u), 1e-300);
        ext::PdivResult res = ext::extend_Pdiv(ext::field_sampler(u), atlas);
        ScalarField div_x = cdiff(res.field.comp[0], 0);
        ScalarField div_y = cdiff(res.field.comp[1], 1);
        double dsup = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i)
            dsup = std::max(dsup, std::abs(div_x.data[i] + div_y.data[i]));
        worst_div = std::max(worst_div, dsup / usup);
    }
    const double secs = timer.seconds();
    report(4, "extension: tangent P vanishes outside; Pdiv div-free (ratio)",
           worst_ext <= 1e-10 && worst_div <= 1e-6,
           std::max(worst_ext / 1e-10, worst_div / 1e-6), 1.0, secs);
}

// ----------------------------------------------------------------- criterion 5
void criterion_biot_savart() {
    Timer timer;
    bool pass = true;
    double worst_rankine = 0.0;
    for (int n : {256, 512}) {
        Grid g = build_grid(2, kTwoPi, n);
        const double a = 0.5;
        ScalarField omega(g);
        for (int i = 0; i < g.n; ++i)
            for (int j = 0; j < g.n; ++j)
                if (norm(g.node(i, j) - g.center()) < a) omega.at(i, j) = 1.0;
        VectorField v = bs::bs_free(omega);
        double worst = 0.0;
        for (int i = 0; i < g.n; ++i)
            for (int j = 0; j < g.n; ++j) {
                const Vec3 q = g.node(i, j) - g.center();
                const double r = norm(q);
                if (r < 4.0 * g.h || r > 2.0 * a || std::abs(r - a) < 2.0 * g.h) continue;
                const double vt_exact = r < a ? 0.5 * r : 0.5 * a * a / r;
                worst = std::max(worst, std::abs(dot(v.at(g.index(i, j)),
                                                     normalized(perp(q))) -
                                                 vt_exact) /
                                            vt_exact);
            }
        pass = pass && worst <= 5.0 / n;
        worst_rankine = std::max(worst_rankine, worst * n / 5.0);
    }

    // Uniform-field correction kills the field to 1e-8.
    Grid g = build_grid(2, kTwoPi, 256);
    Domain d = domain_disk(g, 1.0);
    std::vector<double> gb(512);
    for (int i = 0; i < 512; ++i)
        gb[i] = dot(Vec3{1, 0, 0}, d.outward_normal(d.boundary_point(i, 512)));
    bs::DiskCorrection corr = bs::solve_disk_neumann(gb, d);
    Rng rng(5);
    double worst_unif = 0.0;
    for (int t = 0; t < 300; ++t) {
        const double rr = rng.uniform(0.0, 0.99);
        const double th = rng.uniform(0.0, kTwoPi);
        worst_unif = std::max(
            worst_unif, norm(corr.grad(d.center + rr * Vec3{std::cos(th), std::sin(th), 0}) -
                             Vec3{1, 0, 0}));
    }
    pass = pass && worst_unif <= 1e-8;

    // Point vortex vs the method-of-images closed form.
    Grid g5 = build_grid(2, kTwoPi, 512);
    Domain d5 = domain_disk(g5, 1.0);
    const Vec3 x0 = d5.center + Vec3{0.4, 0.0, 0.0};
    const double eps = 6.0 * g5.h;
    ScalarField blob(g5);
    double gamma = 0.0;
    for (int i = 0; i < g5.n; ++i)
        for (int j = 0; j < g5.n; ++j) {
            const double rr = norm(g5.node(i, j) - x0) / eps;
            if (rr >= 1.0) continue;
            const double w =
                rr <= 0.5 ? 1.0 : 0.5 * (1.0 + std::cos(pi * (rr - 0.5) / 0.5));
            blob.at(i, j) = w;
            gamma += w * g5.h * g5.h;
        }
    bs::VelocitySolution sol = bs::velocity_from_vorticity(blob, d5);
    const Vec3 ximg = d5.center + Vec3{1.0 / 0.4, 0.0, 0.0};
    auto K = [gamma](const Vec3& r) { return perp(r) * (gamma / kTwoPi / norm2(r)); };
    double worst_img = 0.0;
    Rng irng(7);
    int counted = 0;
    while (counted < 300) {
        const double rr = irng.uniform(0.05, 0.93);
        const double th = irng.uniform(0.0, kTwoPi);
        const Vec3 p = d5.center + rr * Vec3{std::cos(th), std::sin(th), 0.0};
        if (norm(p - x0) < 3.0 * eps) continue;
        ++counted;
        const Vec3 exact = K(p - x0) - K(p - ximg);
        worst_img = std::max(worst_img,
                             norm(sol.velocity_at(p) - exact) / std::max(norm(exact), 1e-10));
    }
    pass = pass && worst_img <= 1e-3;

    report(5, "Biot-Savart closed forms (Rankine, uniform, image vortex)", pass,
           std::max({worst_rankine * 1e-3, worst_unif, worst_img}), 1e-3, timer.seconds());
}

// -------------------------------------------------------- criteria 6, 8b, 9b, 10a
struct RankineRunOutput {
    double marker_drift = 0.0;
    double area_drift = 0.0;
    double omega_particle_drift = 0.0;
    double max_log_ratio = 0.0;
};

RankineRunOutput criterion_rankine_steady() {
    Timer timer;
    Grid g = build_grid(2, kTwoPi, 512);
    Domain d = domain_disk(g, 1.0);
    patch::VortexPatch p;
    p.support.kind = patch::LevelSet::Kind::Circle;
    p.support.center = g.center();
    p.support.a = 0.5;
    p.planar = true;
    p.omega_i_s = [](const Vec3&) { return 1.0; };
    p.omega_e_s = [](const Vec3&) { return 0.0; };
    dyn::DiskPatchFlow flow(g, d, p, 1024, 300);

    const double dt = 0.5 * flow.cfl_dt();
    const int steps = static_cast<int>(std::ceil(5.0 / dt));
    const double area0 = flow.patch_area();
    RankineRunOutput out;
    Rng rng(11);
    for (int s = 1; s <= steps; ++s) {
        flow.step(dt);
        out.marker_drift = std::max(out.marker_drift, flow.max_marker_displacement());
        if (s % 100 == 0 || s == steps) {
            dyn::Diag row = flow.diagnostics(0.5, rng.stream("acc-r" + std::to_string(s)));
            out.max_log_ratio = std::max(out.max_log_ratio, row.log_ratio);
            // 2-D: omega.n on the boundary vanishes identically by
            // construction of the planar diagnostics (criterion 9b).
            if (row.omega_n_cr != 0.0) out.omega_particle_drift = 1.0;
        }
    }
    out.area_drift = std::abs(flow.patch_area() - area0) / area0;
    out.omega_particle_drift =
        std::max(out.omega_particle_drift, flow.max_particle_omega_drift());

    const double secs = timer.seconds();
    report(6, "steady Rankine at n=512: marker drift, area drift",
           out.marker_drift <= 1e-3 * 0.5 && out.area_drift <= 5e-3,
           std::max(out.marker_drift / 0.5, out.area_drift), 1e-3, secs);
    return out;
}

// ----------------------------------------------------------------- criterion 7
void criterion_kirchhoff() {
    Timer timer;
    scenario::ScenarioConfig cfg = scenario::builtin_scenario("kirchhoff-free");
    scenario::RunResult res = scenario::run_scenario(cfg, "acceptance_out/kirchhoff");
    const double rel = std::abs(res.fitted_rate - res.expected_rate) / res.expected_rate;
    report(7, "Kirchhoff rotation rate within 2% over one revolution", rel <= 0.02, rel, 0.02,
           timer.seconds());
}

// ----------------------------------------------------------------- criterion 8
void criterion_conservation(const RankineRunOutput& rankine) {
    Timer timer;
    contour::Ring ring;
    for (int i = 0; i < 256; ++i) {
        const double th = kTwoPi * i / 256;
        ring.push_back({std::cos(th), 0.6 * std::sin(th), 0.0});
    }
    auto velocity = [&](const Vec3& q) { return contour::cd_velocity(ring, 1.0, q); };
    auto gradient = [&](const Vec3& q, double M[3][3]) {
        double G[2][2];
        contour::cd_velocity_gradient(ring, 1.0, q, -1, G);
        const double tr = 0.5 * (G[0][0] + G[1][1]);
        M[0][0] = G[0][0] - tr; M[0][1] = G[0][1]; M[0][2] = 0;
        M[1][0] = G[1][0]; M[1][1] = G[1][1] - tr; M[1][2] = 0;
        M[2][0] = M[2][1] = M[2][2] = 0;
    };
    Rng rng(13);
    dyn::FrozenProbe probe;
    for (int q = 0; q < 24; ++q) {
        // Stay clear of the contour: the frozen gradient is singular there.
        const double rr = (q % 2 == 0) ? rng.uniform(0.25, 0.5) : rng.uniform(1.35, 1.6);
        const double th = rng.uniform(0.0, kTwoPi);
        probe.pos.push_back({rr * std::cos(th), rr * std::sin(th), 0.0});
        std::vector<Vec3> w;
        for (int nu = 0; nu < 3; ++nu)
            w.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)});
        probe.w.push_back(w);
        probe.omega.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)});
    }
    const double T = 0.8;
    const double d1 = dyn::frozen_transport_cross_drift(velocity, gradient, probe, T, T / 40);
    const double d2 = dyn::frozen_transport_cross_drift(velocity, gradient, probe, T, T / 80);
    const double ratio = d1 / d2;
    report(8, "cross-invariant drift shrinks >= 8x under dt halving; 2-D omega exact",
           ratio >= 8.0 && rankine.omega_particle_drift <= 1e-12, ratio, 8.0,
           timer.seconds());
}

// ----------------------------------------------------------------- criterion 9
void criterion_omega_dot_n() {
    Timer timer;
    scenario::ScenarioConfig cfg = scenario::builtin_scenario("sphere-ball-desk");
    Grid g = build_grid(3, cfg.extent, cfg.grid_n);
    Domain dom = domain_ball(g, cfg.domain_radius);
    ext::BoundaryAtlas atlas = ext::build_atlas(dom, g, 2048);
    patch::VortexPatch p = scenario::make_patch(cfg, g);
    dyn::BallPatchFlow flow(g, atlas, p, scenario::make_potential(cfg, g), 400, 300);
    const double dt = cfg.dt_factor * flow.cfl_dt();
    const int steps = std::min(50, static_cast<int>(std::ceil(cfg.t_end / dt)));
    double worst = 0.0;
    for (int s = 0; s < steps; ++s) {
        flow.step(dt);
        worst = std::max(worst, flow.omega_dot_n(0.5).max_discrepancy);
    }
    report(9, "omega.n closed formula vs direct sampling (3-D desk run)", worst <= 0.05,
           worst, 0.05, timer.seconds());
}

// ---------------------------------------------------------------- criterion 10
void criterion_log_ratio(const RankineRunOutput& rankine) {
    Timer timer;
    // Shipped scenarios at two resolutions: the ratio must stay below the
    // recorded constant and grow by <= 50% under refinement.
    auto scenario_ratio = [](const std::string& name, int n) {
        scenario::ScenarioConfig cfg = scenario::builtin_scenario(name);
        cfg.grid_n = n;
        cfg.t_end = 0.8;
        cfg.sample_every = 20;
        Grid g = build_grid(2, cfg.extent, cfg.grid_n);
        Domain d = domain_disk(g, cfg.domain_radius);
        patch::VortexPatch p = scenario::make_patch(cfg, g);
        dyn::DiskPatchFlow flow(g, d, p, std::min(cfg.markers, 4 * n), 250);
        Rng rng(cfg.seed);
        double worst = flow.diagnostics(cfg.r_exp, rng.stream("d0")).log_ratio;
        const double dt = cfg.dt_factor * flow.cfl_dt();
        const int steps = static_cast<int>(std::ceil(cfg.t_end / dt));
        for (int s = 1; s <= steps; ++s) {
            flow.step(dt);
            if (s % cfg.sample_every == 0)
                worst = std::max(worst,
                                 flow.diagnostics(cfg.r_exp, rng.stream("d" + std::to_string(s)))
                                     .log_ratio);
        }
        return worst;
    };
    const double pe128 = scenario_ratio("perturbed-ellipse-disk", 128);
    const double pe256 = scenario_ratio("perturbed-ellipse-disk", 256);
    const double rk128 = scenario_ratio("rankine-disk", 128);
    const double rk256 = scenario_ratio("rankine-disk", 256);

    const double worst_all = std::max({pe128, pe256, rk128, rk256, rankine.max_log_ratio});
    const double growth =
        std::max(pe256 / pe128, rk256 / rk128);
    report(10, "log-Lipschitz ratio bounded and refinement-stable",
           worst_all <= kLogRatioBound && growth <= 1.5, worst_all, kLogRatioBound,
           timer.seconds());
}

// ---------------------------------------------------------------- criterion 11
void criterion_axisym() {
    Timer timer;
    scenario::ScenarioConfig cfg = scenario::builtin_scenario("vortex-ring-axisym");
    scenario::RunResult res = scenario::run_scenario(cfg, "acceptance_out/axisym");
    report(11, "axisymmetric bound ||omega(t)|| <= ||omega0/delta|| max delta",
           res.omega_bound_excess <= 1e-12, res.omega_bound_excess, 1e-12, timer.seconds());
}

// ---------------------------------------------------------------- criterion 12
void criterion_verify_battery() {
    Timer timer;
    bool all = true;
    for (const auto& name : verify::suite_names()) {
        verify::SuiteResult res = verify::run_suite(name, /*fast=*/false, /*seed=*/1);
        if (!res.all_pass()) {
            all = false;
            std::printf("  verify suite failed: %s\n%s", name.c_str(),
                        res.to_text().c_str());
        }
    }
    const double secs = timer.seconds();
    report(12, "full verify battery passes in under 30 minutes", all && secs < 1800.0, secs,
           1800.0, secs);
}

}  // namespace

int main() {
    std::printf("patchlab acceptance suite\n");
    criterion_bony_and_reconstruction();
    criterion_multiplier();
    criterion_extension();
    criterion_biot_savart();
    RankineRunOutput rankine = criterion_rankine_steady();
    criterion_kirchhoff();
    criterion_conservation(rankine);
    criterion_omega_dot_n();
    criterion_log_ratio(rankine);
    criterion_axisym();
    criterion_verify_battery();
    std::printf(g_failures == 0 ? "ALL CRITERIA PASSED\n"
                                : "%d CRITERIA FAILED\n",
                g_failures);
    return g_failures == 0 ? 0 : 1;
}
