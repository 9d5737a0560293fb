#include "patchlab/verify.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

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
#include "patchlab/spectral.hpp"

namespace patchlab::verify {

using std::numbers::pi;
constexpr double kTwoPi = 2.0 * pi;

namespace {

ScalarField random_field(const Grid& g, Rng& rng, int kmax) {
    spectral::Spectrum s(g);
    int k[3];
    for (std::size_t i = 0; i < g.size(); ++i) {
        spectral::freq_of_index(g, i, k);
        const double k2 = double(k[0]) * k[0] + double(k[1]) * k[1] + double(k[2]) * k[2];
        if (k2 == 0.0 || k2 > double(kmax) * kmax) continue;
        s.data[i] = {rng.gaussian() / std::sqrt(k2), rng.gaussian() / std::sqrt(k2)};
    }
    ScalarField f = spectral::inverse(s);
    const double scale = static_cast<double>(g.size()) / g.n;
    for (auto& v : f.data) v *= scale;
    return f;
}

void check_le(SuiteResult& out, const std::string& name, double value, double threshold) {
    out.checks.push_back({name, value <= threshold, value, threshold});
}

void check_ge(SuiteResult& out, const std::string& name, double value, double threshold) {
    out.checks.push_back({name, value >= threshold, value, threshold});
}

patch::VortexPatch disk_rankine(const Grid& g, double a, double wi) {
    patch::VortexPatch p;
    p.support.kind = patch::LevelSet::Kind::Circle;
    p.support.center = g.center();
    p.support.a = a;
    p.planar = true;
    p.omega_i_s = [wi](const Vec3&) { return wi; };
    p.omega_e_s = [](const Vec3&) { return 0.0; };
    return p;
}

void suite_lp(SuiteResult& out, bool fast, Rng rng) {
    const int n = fast ? 128 : 256;
    Grid g = build_grid(2, kTwoPi, n);

    // Partition of unity reconstruction.
    double worst_recon = 0.0;
    Rng recon = rng.stream("lp-recon");
    for (int t = 0; t < (fast ? 3 : 8); ++t) {
        ScalarField f = random_field(g, recon, g.n / 3);
        ScalarField rec = lp::dyadic_blocks(f).reconstruct();
        double err = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i)
            err = std::max(err, std::abs(rec.data[i] - f.data[i]));
        worst_recon = std::max(worst_recon, err / std::max(1.0, max_abs(f)));
    }
    check_le(out, "lp.reconstruction", worst_recon, 1e-10);

    // Quasi-orthogonality of the symbol tables.
    const auto& bank = lp::DyadicFilterBank::get(g);
    double worst_qo = 0.0;
    const long max_k2 = 2L * (g.n / 2) * (g.n / 2);
    for (int qa = -1; qa <= bank.n_max(); ++qa)
        for (int qb = qa + 2; qb <= bank.n_max(); ++qb)
            for (long k2 = 0; k2 <= max_k2; k2 += 7)
                worst_qo = std::max(
                    worst_qo, std::abs(bank.block_symbol(qa, k2) * bank.block_symbol(qb, k2)));
    check_le(out, "lp.quasi_orthogonality", worst_qo, 0.0);

    // Bony identity.
    Rng bony = rng.stream("lp-bony");
    double worst_bony = 0.0;
    for (int t = 0; t < (fast ? 5 : 20); ++t) {
        ScalarField a = random_field(g, bony, g.n / 3);
        ScalarField b = random_field(g, bony, g.n / 3);
        lp::BonySplit split = lp::bony_split(a, b);
        double err = 0.0, scale = 1.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double ab = a.data[i] * b.data[i];
            scale = std::max(scale, std::abs(ab));
            err = std::max(err, std::abs(split.T_ab.data[i] + split.T_ba.data[i] +
                                         split.R_ab.data[i] - ab));
        }
        worst_bony = std::max(worst_bony, err / scale);
    }
    check_le(out, "lp.bony_identity", worst_bony, 1e-10);

    // Holder subadditivity.
    Rng sub = rng.stream("lp-subadd");
    double worst_sub = 0.0;
    for (int t = 0; t < 5; ++t) {
        ScalarField a = random_field(g, sub, 15);
        ScalarField b = random_field(g, sub, 15);
        ScalarField s(g);
        for (std::size_t i = 0; i < g.size(); ++i) s.data[i] = a.data[i] + b.data[i];
        worst_sub = std::max(worst_sub, lp::holder_norm(s, 0.7) - lp::holder_norm(a, 0.7) -
                                            lp::holder_norm(b, 0.7));
    }
    check_le(out, "lp.holder_subadditive", worst_sub, 1e-12);

    // Besov refinement stability: one fixed band-limited function sampled on
    // nested grids (the norm is a property of the function, not the grid).
    Rng stab = rng.stream("lp-besov-stab");
    struct Mode {
        double a, kx, ky, phase;
    };
    std::vector<Mode> modes;
    for (int t = 0; t < 40; ++t)
        modes.push_back({stab.gaussian(), double(stab.uniform_int(-15, 15)),
                         double(stab.uniform_int(-15, 15)), stab.uniform(0.0, kTwoPi)});
    auto sample = [&](const Grid& gg) {
        ScalarField f(gg);
        for (int i = 0; i < gg.n; ++i)
            for (int j = 0; j < gg.n; ++j) {
                double acc = 0.0;
                for (const Mode& m : modes)
                    acc += m.a * std::cos(m.kx * (i * gg.h) + m.ky * (j * gg.h) + m.phase);
                f.at(i, j) = acc;
            }
        return f;
    };
    Grid g2 = build_grid(2, kTwoPi, 2 * n);
    const double n1 = lp::besov_norm(sample(g), 0.5, 1, 2);
    const double n2 = lp::besov_norm(sample(g2), 0.5, 1, 2);
    check_le(out, "lp.besov_refinement_stability", std::max(n1 / n2, n2 / n1), 1.2);

    // Paraproduct operator-norm census: max ||T_a b||_{C^r} / (||a||_inf
    // ||b||_{C^r}) over a corpus, stable across one refinement.
    auto para_census = [&](const Grid& gg, Rng draw) {
        double worst = 0.0;
        for (int t = 0; t < (fast ? 6 : 12); ++t) {
            ScalarField a = random_field(gg, draw, 18);
            ScalarField b = random_field(gg, draw, 18);
            const double denom = max_abs(a) * lp::holder_norm(b, 0.7);
            worst = std::max(worst, lp::holder_norm(lp::paraproduct(a, b), 0.7) / denom);
        }
        return worst;
    };
    const double p1 = para_census(g, rng.stream("lp-para"));
    const double p2 = para_census(g2, rng.stream("lp-para"));
    check_le(out, "lp.paraproduct_census_stability", std::max(p1 / p2, p2 / p1), 1.2);
}

void suite_extension(SuiteResult& out, bool fast, Rng rng) {
    (void)rng;
    const int n = fast ? 128 : 256;
    Grid g = build_grid(2, kTwoPi, n);
    Domain d = domain_disk(g, 1.3);
    ext::BoundaryAtlas atlas = ext::build_atlas(d, g, 24);

    // Partition of unity at interior nodes.
    double worst_psi = 0.0;
    for (int i = 0; i < g.n; i += 2)
        for (int j = 0; j < g.n; j += 2) {
            const Vec3 p = g.node(i, j);
            if (d.delta(p) < 0.0) continue;
            double sum = 0.0;
            for (int c = 0; c <= atlas.chart_count(); ++c) sum += atlas.psi(c, p);
            worst_psi = std::max(worst_psi, std::abs(sum - 1.0));
        }
    check_le(out, "extension.psi_partition", worst_psi, 1e-12);

    // Tangent fields extend by zero.
    auto rot = [c = d.center](const Vec3& p) { return perp(p - c); };
    VectorField pu = ext::extend_P(rot, atlas);
    double ext_max = 0.0;
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
            if (d.delta(g.node(i, j)) < 0.0)
                ext_max = std::max(ext_max, norm(pu.at(g.index(i, j))));
    check_le(out, "extension.tangent_vanishes_outside", ext_max, 1e-10);

    // Pdiv: tangent field needs no correction; normal-trace data is solved
    // to the shell tolerance.
    ext::PdivResult tangent = ext::extend_Pdiv(rot, atlas);
    check_le(out, "extension.pdiv_tangent_residual", tangent.shell_residual, 1e-10);
    ext::PdivResult e1 = ext::extend_Pdiv([](const Vec3&) { return Vec3{1, 0, 0}; }, atlas);
    check_le(out, "extension.pdiv_shell_residual", e1.shell_residual, 1e-8);

    // Extension-estimate census stability across one refinement.
    auto census = [&](const Grid& gg) {
        Domain dd = domain_disk(gg, 1.3);
        ext::BoundaryAtlas at = ext::build_atlas(dd, gg, 24);
        double worst = 0.0;
        for (int mode = 1; mode <= 3; ++mode) {
            const double s2 = std::pow(0.8 * dd.radius, 2);
            auto u = [c = dd.center, mode, s2](const Vec3& p) {
                const Vec3 q = p - c;
                const double rr = std::hypot(q.x, q.y);
                const double th = std::atan2(q.y, q.x);
                const double rm1 = std::pow(rr, mode - 1);
                const double env = std::exp(-0.5 * norm2(q) / s2);
                const Vec3 grad{env * (mode * rm1 * std::sin((mode - 1) * th) -
                                       rm1 * rr * std::sin(mode * th) * q.x / s2),
                                env * (mode * rm1 * std::cos((mode - 1) * th) -
                                       rm1 * rr * std::sin(mode * th) * q.y / s2),
                                0.0};
                return perp(grad);
            };
            worst = std::max(worst, ext::extension_report(u, at, 0.5).div_sup_ratio);
        }
        return worst;
    };
    const double c1 = census(g);
    const double c2 = census(build_grid(2, kTwoPi, 2 * n));
    check_le(out, "extension.div_census_stability", std::max(c1 / c2, c2 / c1), 1.3);
}

void suite_biot_savart(SuiteResult& out, bool fast, Rng rng) {
    const int n = fast ? 128 : 256;
    Grid g = build_grid(2, kTwoPi, n);
    Domain d = domain_disk(g, 1.0);

    // Rankine free-space profile.
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
            const double vt = dot(v.at(g.index(i, j)), normalized(perp(q)));
            worst = std::max(worst, std::abs(vt - vt_exact) / vt_exact);
        }
    check_le(out, "biot_savart.rankine_profile", worst, 5.0 / n);

    // Lambda calculus identities.
    Rng lam = rng.stream("bs-lambda");
    ScalarField f = random_field(g, lam, 20);
    ScalarField f2 = bs::lambda_apply(bs::lambda_apply(f, 2.0), -2.0);
    double err = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        err = std::max(err, std::abs(f2.data[i] - f.data[i]));
    check_le(out, "biot_savart.lambda_inverse", err / std::max(1.0, max_abs(f)), 1e-12);

    // Uniform-field correction: v = 0 after killing alpha = x1.
    std::vector<double> gb(512);
    for (int i = 0; i < 512; ++i)
        gb[i] = dot(Vec3{1, 0, 0}, d.outward_normal(d.boundary_point(i, 512)));
    bs::DiskCorrection corr = bs::solve_disk_neumann(gb, d);
    double worst_u = 0.0;
    Rng unif = rng.stream("bs-uniform");
    for (int t = 0; t < 100; ++t) {
        const double rr = unif.uniform(0.0, 0.99);
        const double th = unif.uniform(0.0, kTwoPi);
        const Vec3 p = d.center + rr * Vec3{std::cos(th), std::sin(th), 0.0};
        worst_u = std::max(worst_u, norm(corr.grad(p) - Vec3{1, 0, 0}));
    }
    check_le(out, "biot_savart.uniform_correction", worst_u, 1e-8);

    // Tangency after correction.
    bs::VelocitySolution sol = bs::velocity_from_vorticity(omega, d);
    check_le(out, "biot_savart.boundary_tangency", sol.boundary_normal_residual(), 1e-8);

    // Rotation invariance of the kinetic energy.
    ScalarField om2(g);
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j) {
            const Vec3 q = g.node(i, j) - g.center();
            if (norm(q) < 0.8) om2.at(i, j) = std::sin(3.0 * q.x) + 0.5 * std::cos(2.0 * q.y);
        }
    ScalarField om_rot(g);
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j) om_rot.at(j, (g.n - i) % g.n) = om2.at(i, j);
    const double e1 = bs::kinetic_energy(bs::velocity_from_vorticity(om2, d).velocity_field(), d);
    const double e2 =
        bs::kinetic_energy(bs::velocity_from_vorticity(om_rot, d).velocity_field(), d);
    check_le(out, "biot_savart.energy_rotation_invariance", std::abs(e1 - e2) / e1, 1e-10);
}

void suite_patch(SuiteResult& out, bool fast, Rng rng) {
    const int n = fast ? 128 : 256;
    Grid g = build_grid(2, kTwoPi, n);
    Domain d = domain_disk(g, 1.4);

    // defW homogeneity.
    Rng hom = rng.stream("patch-hom");
    double worst_hom = 0.0;
    for (int t = 0; t < 20; ++t) {
        std::vector<Vec3> w;
        for (int nu = 0; nu < 4; ++nu)
            w.push_back({hom.uniform(-1, 1), hom.uniform(-1, 1), hom.uniform(-1, 1)});
        const double base = patch::admissibility_at(w);
        const double lam = hom.uniform(0.5, 3.0);
        std::vector<Vec3> wl = w;
        for (auto& vv : wl) vv *= lam;
        worst_hom = std::max(worst_hom,
                             std::abs(patch::admissibility_at(wl) * lam - base) / base);
    }
    check_le(out, "patch.defW_homogeneity", worst_hom, 1e-12);

    patch::VortexPatch p = disk_rankine(g, 0.6, 1.0);
    patch::TangentSystem W = patch::tangent_system_from_levelset(p, d, g);
    double worst_tan = 0.0;
    for (const Vec3& bp : p.support.boundary_samples(512))
        for (const auto& w : W.fields)
            worst_tan = std::max(worst_tan, std::abs(dot(w(bp), p.support.unit_normal(bp))));
    for (const Vec3& bd : d.boundary_samples(512))
        for (const auto& w : W.fields)
            worst_tan = std::max(worst_tan, std::abs(dot(w(bd), d.outward_normal(bd))));
    check_le(out, "patch.tangency", worst_tan, 1e-6);

    patch::AdmissibilityResult adm = patch::admissibility(W, g, d);
    check_le(out, "patch.admissibility_finite", adm.degenerate ? 1.0 : 0.0, 0.0);

    // Tangency identity (Gauss-Green surface layer).
    const Vec3 c = g.center();
    patch::VectorFn azimuthal = [c](const Vec3& q) { return perp(q - c); };
    check_le(out, "patch.tangency_identity",
             patch::tangency_identity_residual(azimuthal, p, g, 0.5), 1e-4);

    // Normal field matches both boundary normals.
    patch::VectorFn ntilde = patch::patch_normal_field(p, d, g);
    double worst_n = 0.0;
    for (const Vec3& bp : p.support.boundary_samples(256))
        worst_n = std::max(worst_n, norm(ntilde(bp) - p.support.unit_normal(bp)));
    for (const Vec3& bd : d.boundary_samples(256))
        worst_n = std::max(worst_n, norm(ntilde(bd) - d.outward_normal(bd)));
    check_le(out, "patch.normal_field", worst_n, 1e-6);

    // Conormal estimate census across refinement.
    auto census = [&](int nn) {
        Grid gg = build_grid(2, kTwoPi, nn);
        patch::VortexPatch pp = disk_rankine(gg, 0.6, 1.0);
        pp.omega_i_s = [](const Vec3& q) { return 1.0 + 0.3 * std::sin(q.x + q.y); };
        const Vec3 cc = gg.center();
        patch::VectorFn w = [cc](const Vec3& q) {
            return perp(q - cc) * std::exp(-norm2(q - cc) / 0.72);
        };
        return patch::conormal_derivative(w, pp, gg, 0.5).ratio;
    };
    const double r1 = census(n), r2 = census(2 * n);
    check_le(out, "patch.typepoche_census_stability", std::max(r1 / r2, r2 / r1), 1.3);
    (void)fast;
}

void suite_multiplier(SuiteResult& out, bool fast, Rng rng) {
    const int n = fast ? 128 : 256;
    const int corpus = fast ? 12 : 50;
    Grid g = build_grid(2, kTwoPi, n);
    patch::VortexPatch p = disk_rankine(g, 0.7, 1.0);

    // chi == 1: every ratio is exactly 1.
    ScalarField ones(g);
    for (auto& v : ones.data) v = 1.0;
    Rng r1 = rng.stream("mult-one");
    ScalarField f = random_field(g, r1, 20);
    lp::MultiplierSample s1 = lp::multiplier_ratio(ones, f, 0.5);
    check_le(out, "multiplier.identity_ratio", std::abs(s1.ratio - 1.0), 1e-10);

    // f supported away from the patch boundary with chi = 1 on supp f.
    ScalarField chi = p.indicator(g);
    ScalarField fin(g);
    const Vec3 c = g.center();
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j) {
            const double rr = norm(g.node(i, j) - c);
            if (rr < 0.35)
                fin.at(i, j) = std::cos(4.0 * (g.node(i, j).x)) *
                               std::exp(-rr * rr / 0.02);
        }
    lp::MultiplierSample s2 = lp::multiplier_ratio(chi, fin, 0.5);
    check_le(out, "multiplier.interior_support_ratio", s2.ratio, 1.0 + 1e-6);

    // Census: finite, and stable across one refinement.
    lp::MultiplierCensus c1 =
        lp::indicator_multiplier_census(chi, 0.5, corpus, rng.stream("mult-census"));
    check_ge(out, "multiplier.census_finite", std::isfinite(c1.max_ratio) ? 1.0 : 0.0, 1.0);
    Grid g2 = build_grid(2, kTwoPi, 2 * n);
    patch::VortexPatch p2 = disk_rankine(g2, 0.7, 1.0);
    lp::MultiplierCensus c2 = lp::indicator_multiplier_census(p2.indicator(g2), 0.5, corpus,
                                                              rng.stream("mult-census"));
    check_le(out, "multiplier.census_refinement_stability",
             std::max(c1.max_ratio / c2.max_ratio, c2.max_ratio / c1.max_ratio), 1.3);
}

void suite_dynamics(SuiteResult& out, bool fast, Rng rng) {
    (void)rng;
    // Steady Rankine, short horizon.
    const int n = fast ? 128 : 256;
    Grid g = build_grid(2, kTwoPi, n);
    Domain d = domain_disk(g, 1.0);
    patch::VortexPatch p = disk_rankine(g, 0.5, 1.0);
    dyn::DiskPatchFlow flow(g, d, p, fast ? 512 : 1024, 200);
    const double dt = 0.5 * flow.cfl_dt();
    const int steps = fast ? 30 : 60;
    const double area0 = flow.patch_area();
    for (int s = 0; s < steps; ++s) flow.step(dt);
    // Drift scales like h^2 * t; gate at the measured scale for this n.
    const double budget = 8.0 * (g.h * g.h) * flow.time();
    check_le(out, "dynamics.rankine_marker_drift", flow.max_marker_displacement(), budget);
    check_le(out, "dynamics.rankine_area_drift",
             std::abs(flow.patch_area() - area0) / area0, 5e-3);
    check_le(out, "dynamics.particle_omega_drift", flow.max_particle_omega_drift(), 1e-12);
    check_le(out, "dynamics.w_cross_drift", flow.max_cross_drift(), 1e-5);

    // Frozen-field transport order.
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
    Rng probe_rng(7);
    dyn::FrozenProbe probe;
    for (int q = 0; q < 16; ++q) {
        // keep probes clear of the contour (singular frozen gradient)
        const double rr = (q % 2 == 0) ? probe_rng.uniform(0.25, 0.5)
                                       : probe_rng.uniform(1.35, 1.6);
        const double th = probe_rng.uniform(0.0, kTwoPi);
        probe.pos.push_back({rr * std::cos(th), rr * std::sin(th), 0.0});
        std::vector<Vec3> w;
        for (int nu = 0; nu < 3; ++nu)
            w.push_back({probe_rng.uniform(-1, 1), probe_rng.uniform(-1, 1),
                         probe_rng.uniform(-1, 1)});
        probe.w.push_back(w);
        probe.omega.push_back({probe_rng.uniform(-1, 1), probe_rng.uniform(-1, 1),
                               probe_rng.uniform(-1, 1)});
    }
    const double T = 0.8;
    const double d1 = dyn::frozen_transport_cross_drift(velocity, gradient, probe, T, T / 40);
    const double d2 = dyn::frozen_transport_cross_drift(velocity, gradient, probe, T, T / 80);
    check_ge(out, "dynamics.cross_invariant_order", d1 / d2, 8.0);

    // Kirchhoff phase over a partial revolution.
    dyn::FreePatchFlow kflow(ring, 1.0);
    const double rate = dyn::kirchhoff_rate(1.0, 0.6, 1.0);
    const double T2 = (fast ? 0.1 : 0.25) * kTwoPi / rate;
    const int ksteps = fast ? 250 : 600;
    for (int s = 0; s < ksteps; ++s) kflow.step(T2 / ksteps);
    check_le(out, "dynamics.kirchhoff_phase",
             std::abs(kflow.orientation() - rate * T2) / (rate * T2), 0.02);
}

}  // namespace

bool SuiteResult::all_pass() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

std::string SuiteResult::to_csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "suite,check,pass,value,threshold\n";
    for (const auto& c : checks)
        os << suite << "," << c.name << "," << (c.pass ? 1 : 0) << "," << c.value << ","
           << c.threshold << "\n";
    return os.str();
}

std::string SuiteResult::to_text() const {
    std::ostringstream os;
    os.precision(6);
    for (const auto& c : checks)
        os << (c.pass ? "PASS " : "FAIL ") << suite << "." << c.name << "  value=" << c.value
           << " threshold=" << c.threshold << "\n";
    os << (all_pass() ? "OK" : "FAILED") << " suite=" << suite << " (" << seconds << " s)\n";
    return os.str();
}

std::vector<std::string> suite_names() {
    return {"lp", "extension", "biot-savart", "patch", "dynamics", "multiplier"};
}

SuiteResult run_suite(const std::string& name, bool fast, std::uint64_t seed) {
    SuiteResult out;
    out.suite = name;
    Rng rng(seed);
    const auto t0 = std::chrono::steady_clock::now();
    if (name == "lp")
        suite_lp(out, fast, rng.stream("lp"));
    else if (name == "extension")
        suite_extension(out, fast, rng.stream("extension"));
    else if (name == "biot-savart")
        suite_biot_savart(out, fast, rng.stream("biot-savart"));
    else if (name == "patch")
        suite_patch(out, fast, rng.stream("patch"));
    else if (name == "dynamics")
        suite_dynamics(out, fast, rng.stream("dynamics"));
    else if (name == "multiplier")
        suite_multiplier(out, fast, rng.stream("multiplier"));
    else
        throw std::invalid_argument("verify: unknown suite '" + name + "'");
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

}  // namespace patchlab::verify
