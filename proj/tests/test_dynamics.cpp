#include <cmath>
#include <numbers>

#include "doctest.h"
#include "patchlab/contour.hpp"
#include "patchlab/domain.hpp"
#include "patchlab/dynamics.hpp"
#include "patchlab/grid.hpp"
#include "patchlab/patch.hpp"
#include "patchlab/rng.hpp"
#include "test_util.hpp"

using namespace patchlab;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

patch::VortexPatch circle_patch(const Vec3& c, double a, double wi) {
    patch::VortexPatch p;
    p.support.kind = patch::LevelSet::Kind::Circle;
    p.support.center = c;
    p.support.a = a;
    p.planar = true;
    p.omega_i_s = [wi](const Vec3&) { return wi; };
    p.omega_e_s = [](const Vec3&) { return 0.0; };
    return p;
}

}  // namespace

TEST_CASE("contour: ring area and reparametrization") {
    contour::Ring ring;
    const double a = 0.8, b = 0.5;
    for (int i = 0; i < 256; ++i) {
        const double th = kTwoPi * i / 256;
        ring.push_back({a * std::cos(th), b * std::sin(th), 0.0});
    }
    CHECK(contour::ring_area(ring) ==
          doctest::Approx(std::numbers::pi * a * b).epsilon(1e-3));

    // Bunch the markers artificially, reparametrize, spacing evens out.
    contour::Ring bunched = ring;
    for (int i = 0; i < 256; ++i) {
        const double th = kTwoPi * std::pow(i / 256.0, 1.5);
        bunched[i] = {a * std::cos(th), b * std::sin(th), 0.0};
    }
    CHECK(contour::spacing_ratio(bunched) > 3.0);
    contour::Ring fixed = contour::reparametrize(bunched, 256);
    CHECK(contour::spacing_ratio(fixed) < 1.8);
    CHECK(contour::ring_area(fixed) ==
          doctest::Approx(std::numbers::pi * a * b).epsilon(1e-2));
}

TEST_CASE("contour: rasterize matches the disk indicator") {
    Grid g = build_grid(2, kTwoPi, 128);
    contour::Ring ring;
    const Vec3 c = g.center();
    for (int i = 0; i < 512; ++i) {
        const double th = kTwoPi * i / 512;
        ring.push_back(c + Vec3{0.7 * std::cos(th), 0.7 * std::sin(th), 0.0});
    }
    ScalarField chi = contour::rasterize(ring, g);
    int mismatches = 0;
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j) {
            const double r = norm(g.node(i, j) - c);
            if (std::abs(r - 0.7) < 1.5 * g.h) continue;  // edge band
            const double want = r < 0.7 ? 1.0 : 0.0;
            if (chi.at(i, j) != want) ++mismatches;
        }
    CHECK(mismatches == 0);
}

TEST_CASE("contour dynamics velocity reproduces the Rankine closed form") {
    contour::Ring ring;
    const double a = 1.0, w0 = 1.0;
    for (int i = 0; i < 512; ++i) {
        const double th = kTwoPi * i / 512;
        ring.push_back({a * std::cos(th), a * std::sin(th), 0.0});
    }
    // Interior: solid body w0 r / 2; exterior: w0 a^2 / (2 r).
    for (double r : {0.3, 0.6, 0.9}) {
        const Vec3 v = contour::cd_velocity(ring, w0, {r, 0.0, 0.0});
        CHECK(v.x == doctest::Approx(0.0).epsilon(1e-6));
        CHECK(v.y == doctest::Approx(0.5 * w0 * r).epsilon(1e-4));
    }
    for (double r : {1.2, 1.8, 2.5}) {
        const Vec3 v = contour::cd_velocity(ring, w0, {r, 0.0, 0.0});
        CHECK(v.y == doctest::Approx(0.5 * w0 * a * a / r).epsilon(1e-4));
    }
    // On the ring (principal value): tangential speed w0 a / 2.
    const Vec3 von = contour::cd_velocity(ring, w0, ring[0], 0);
    CHECK(von.y == doctest::Approx(0.5 * w0 * a).epsilon(1e-3));
}

TEST_CASE("Kirchhoff ellipse rotates at the classical rate (short run)") {
    const double a = 1.0, b = 0.5, w0 = 1.0;
    contour::Ring ring;
    for (int i = 0; i < 512; ++i) {
        const double th = kTwoPi * i / 512;
        ring.push_back({a * std::cos(th), b * std::sin(th), 0.0});
    }
    dyn::FreePatchFlow flow(ring, w0);
    const double rate = dyn::kirchhoff_rate(a, b, w0);
    const double T = 0.15 * kTwoPi / rate;  // ~15% of a revolution
    const double dt = T / 400;
    for (int s = 0; s < 400; ++s) flow.step(dt);
    const double angle = flow.orientation();
    CHECK(angle == doctest::Approx(rate * T).epsilon(0.02));
    CHECK(std::abs(flow.area() - std::numbers::pi * a * b) / (std::numbers::pi * a * b) <
          1e-3);
}

TEST_CASE("frozen-field cross invariant drift is 4th order in dt") {
    // Kirchhoff ellipse velocity as the frozen field; synthetic 3-vector
    // payloads probe the transport order.
    contour::Ring ring;
    const double a = 1.0, b = 0.6;
    for (int i = 0; i < 256; ++i) {
        const double th = kTwoPi * i / 256;
        ring.push_back({a * std::cos(th), b * std::sin(th), 0.0});
    }
    auto velocity = [&](const Vec3& p) { return contour::cd_velocity(ring, 1.0, p); };
    auto gradient = [&](const Vec3& p, double M[3][3]) {
        double G[2][2];
        contour::cd_velocity_gradient(ring, 1.0, p, -1, G);
        const double tr = 0.5 * (G[0][0] + G[1][1]);
        M[0][0] = G[0][0] - tr; M[0][1] = G[0][1]; M[0][2] = 0.0;
        M[1][0] = G[1][0]; M[1][1] = G[1][1] - tr; M[1][2] = 0.0;
        M[2][0] = M[2][1] = M[2][2] = 0.0;
    };

    Rng rng(77);
    auto stream = rng.stream("dyn-frozen");
    dyn::FrozenProbe probe;
    for (int q = 0; q < 24; ++q) {
        const double rr = stream.uniform(0.3, 1.6);
        const double th = stream.uniform(0.0, kTwoPi);
        probe.pos.push_back({rr * std::cos(th), rr * std::sin(th), 0.0});
        std::vector<Vec3> w;
        for (int nu = 0; nu < 3; ++nu)
            w.push_back({stream.uniform(-1, 1), stream.uniform(-1, 1), stream.uniform(-1, 1)});
        probe.w.push_back(w);
        probe.omega.push_back(
            {stream.uniform(-1, 1), stream.uniform(-1, 1), stream.uniform(-1, 1)});
    }
    const double T = 0.8;
    const double d1 = dyn::frozen_transport_cross_drift(velocity, gradient, probe, T, T / 40);
    const double d2 = dyn::frozen_transport_cross_drift(velocity, gradient, probe, T, T / 80);
    CAPTURE(d1);
    CAPTURE(d2);
    CHECK(d1 / d2 >= 8.0);
}

TEST_CASE("Rankine patch in the disk stays steady (short horizon)") {
    Grid g = build_grid(2, kTwoPi, 128);
    Domain d = domain_disk(g, 1.0);
    patch::VortexPatch p = circle_patch(g.center(), 0.5, 1.0);
    dyn::DiskPatchFlow flow(g, d, p, 512, 200);

    const double dt = 0.5 * flow.cfl_dt();
    const double area0 = flow.patch_area();
    for (int s = 0; s < 40; ++s) flow.step(dt);

    // The strict 1e-3*a budget is pinned at n = 512 over t in [0,5] in the
    // acceptance suite; at n = 128 the rebuild error scales like h^2.
    CHECK(flow.max_marker_displacement() < 4e-3);
    CHECK(std::abs(flow.patch_area() - area0) / area0 < 5e-3);
    CHECK(flow.max_particle_omega_drift() == 0.0);
    CHECK(flow.max_cross_drift() < 1e-6);
}

TEST_CASE("CFL violation and escape are flagged") {
    Grid g = build_grid(2, kTwoPi, 64);
    Domain d = domain_disk(g, 1.0);
    patch::VortexPatch p = circle_patch(g.center(), 0.35, 1.0);
    dyn::DiskPatchFlow flow(g, d, p, 256, 100);
    CHECK_THROWS_AS(flow.step(100.0 * flow.cfl_dt()), std::runtime_error);
}

TEST_CASE("zero vorticity freezes the state") {
    Grid g = build_grid(2, kTwoPi, 64);
    Domain d = domain_disk(g, 1.0);
    patch::VortexPatch p = circle_patch(g.center(), 0.35, 0.0);  // omega = 0
    dyn::DiskPatchFlow flow(g, d, p, 256, 100);
    contour::Ring before = flow.ring();
    for (int s = 0; s < 3; ++s) flow.step(0.05);
    double move = 0.0;
    for (std::size_t i = 0; i < before.size(); ++i)
        move = std::max(move, norm(flow.ring()[i] - before[i]));
    CHECK(move < 1e-12);
}

TEST_CASE("diagnostics row is populated and self-consistent") {
    Grid g = build_grid(2, kTwoPi, 128);
    Domain d = domain_disk(g, 1.0);
    patch::VortexPatch p = circle_patch(g.center(), 0.5, 1.0);
    dyn::DiskPatchFlow flow(g, d, p, 512, 200);
    Rng rng(5);
    dyn::Diag row = flow.diagnostics(0.5, rng);
    CHECK(row.X >= 1.0);
    CHECK(row.area > 0.0);
    CHECK(row.omega_sup == doctest::Approx(1.0));
    CHECK(row.v_lip > 0.0);
    CHECK(row.winv_sup > 0.0);
    CHECK(std::isfinite(row.sum_conormal));
    CHECK(row.log_ratio > 0.0);
    // Both boundary-norm routes see the same transported object at t = 0.
    CHECK(row.boundary_norm_direct ==
          doctest::Approx(row.boundary_norm_formula).epsilon(1e-10));
}

TEST_CASE("gronwall envelope on a steady synthetic series") {
    std::vector<dyn::Diag> series(80);
    for (int i = 0; i < 80; ++i) {
        series[i].t = 0.1 * i;
        series[i].v_lip = 0.5;
        series[i].X = 7.0;
    }
    dyn::GronwallReport rep = dyn::gronwall_envelope_check(series);
    CHECK(rep.envelope_holds);
    CHECK(std::abs(rep.loglog_slope) < 1e-10);
    CHECK(std::abs(rep.B) < 1e-10);
    CHECK(rep.A == doctest::Approx(0.5).epsilon(1e-6));

    std::vector<dyn::Diag> short_series(10);
    CHECK_THROWS_AS(dyn::gronwall_envelope_check(short_series), std::invalid_argument);
}
