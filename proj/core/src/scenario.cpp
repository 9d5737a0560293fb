#include "patchlab/scenario.hpp"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "patchlab/axisym.hpp"
#include "patchlab/dynamics.hpp"
#include "patchlab/io.hpp"
#include "patchlab/rng.hpp"

namespace patchlab::scenario {

using nlohmann::json;
using std::numbers::pi;

double PolyProfile::eval(const Vec3& q) const {
    double acc = 0.0;
    for (const Term& t : terms) {
        double v = t.c;
        for (int k = 0; k < t.px; ++k) v *= q.x;
        for (int k = 0; k < t.py; ++k) v *= q.y;
        for (int k = 0; k < t.pz; ++k) v *= q.z;
        acc += v;
    }
    return acc;
}

namespace {

std::string mode_name(Mode m) {
    switch (m) {
        case Mode::TwoD: return "2d";
        case Mode::Axisym: return "axisym";
        case Mode::DeskThreeD: return "3d-desk";
        case Mode::FreeSpace: return "free-space";
    }
    return "?";
}

Mode mode_from(const std::string& s) {
    if (s == "2d") return Mode::TwoD;
    if (s == "axisym") return Mode::Axisym;
    if (s == "3d-desk") return Mode::DeskThreeD;
    if (s == "free-space") return Mode::FreeSpace;
    throw std::invalid_argument("scenario: unknown mode '" + s + "'");
}

json profile_to_json(const PolyProfile& p) {
    json terms = json::array();
    for (const auto& t : p.terms) terms.push_back({t.c, t.px, t.py, t.pz});
    return json{{"terms", terms}};
}

void fill_profile_defaults(ScenarioConfig& c) {
    if (c.omega_i.terms.empty()) c.omega_i.terms.push_back({1.0, 0, 0, 0});
    if (c.omega_e.terms.empty()) c.omega_e.terms.push_back({0.0, 0, 0, 0});
}

PolyProfile profile_from_json(const json& j) {
    PolyProfile p;
    if (j.is_number()) {
        p.terms.push_back({j.get<double>(), 0, 0, 0});
        return p;
    }
    if (j.contains("const")) {
        p.terms.push_back({j["const"].get<double>(), 0, 0, 0});
        return p;
    }
    for (const auto& t : j.at("terms")) {
        if (!t.is_array() || t.size() != 4)
            throw std::invalid_argument("scenario: profile terms are [c, px, py, pz]");
        p.terms.push_back({t[0].get<double>(), t[1].get<int>(), t[2].get<int>(),
                           t[3].get<int>()});
    }
    return p;
}

}  // namespace

std::string ScenarioConfig::to_json() const {
    json j;
    j["schema"] = schema;
    j["name"] = name;
    j["mode"] = mode_name(mode);
    j["grid"] = {{"n", grid_n}, {"extent", extent}};
    j["domain"] = {{"kind", domain_kind}, {"radius", domain_radius}};
    j["patch"] = {{"kind", patch_kind},
                  {"offset", {patch_offset.x, patch_offset.y, patch_offset.z}},
                  {"a", patch_a},
                  {"b", patch_b},
                  {"omega_i", profile_to_json(omega_i)},
                  {"omega_e", profile_to_json(omega_e)},
                  {"r", r_exp}};
    j["tangent_system"] = {{"s", s_exp}};
    j["integrator"] = {{"dt_factor", dt_factor},
                       {"t_end", t_end},
                       {"sample_every", sample_every},
                       {"snapshot_every", snapshot_every}};
    j["markers"] = markers;
    j["sample_particles"] = sample_particles;
    j["seed"] = seed;
    if (mode == Mode::Axisym)
        j["axisym"] = {{"nr", axi_nr},       {"nz", axi_nz},
                       {"R", axi_R},         {"H", axi_H},
                       {"ring_r", axi_ring_center.x}, {"ring_z", axi_ring_center.y},
                       {"ring_radius", axi_ring_radius},
                       {"ring_strength", axi_ring_strength}};
    return j.dump(2) + "\n";
}

ScenarioConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("scenario: config parse error: ") + e.what());
    }
    ScenarioConfig c;
    if (j.contains("schema") && j["schema"].get<int>() != 1)
        throw std::invalid_argument("scenario: unsupported schema version");
    if (j.contains("name")) c.name = j["name"].get<std::string>();
    if (j.contains("mode")) c.mode = mode_from(j["mode"].get<std::string>());
    if (j.contains("grid")) {
        c.grid_n = j["grid"].value("n", c.grid_n);
        c.extent = j["grid"].value("extent", c.extent);
    }
    if (j.contains("domain")) {
        c.domain_kind = j["domain"].value("kind", c.domain_kind);
        c.domain_radius = j["domain"].value("radius", c.domain_radius);
    }
    if (j.contains("patch")) {
        const auto& p = j["patch"];
        c.patch_kind = p.value("kind", c.patch_kind);
        if (p.contains("offset")) {
            const auto& o = p["offset"];
            c.patch_offset = {o.at(0).get<double>(), o.at(1).get<double>(),
                              o.size() > 2 ? o.at(2).get<double>() : 0.0};
        }
        c.patch_a = p.value("a", c.patch_a);
        c.patch_b = p.value("b", c.patch_b);
        if (p.contains("omega_i")) c.omega_i = profile_from_json(p["omega_i"]);
        if (p.contains("omega_e")) c.omega_e = profile_from_json(p["omega_e"]);
        c.r_exp = p.value("r", c.r_exp);
    }
    if (j.contains("tangent_system")) c.s_exp = j["tangent_system"].value("s", c.s_exp);
    if (j.contains("integrator")) {
        const auto& it = j["integrator"];
        c.dt_factor = it.value("dt_factor", c.dt_factor);
        c.t_end = it.value("t_end", c.t_end);
        c.sample_every = it.value("sample_every", c.sample_every);
        c.snapshot_every = it.value("snapshot_every", c.snapshot_every);
    }
    c.markers = j.value("markers", c.markers);
    c.sample_particles = j.value("sample_particles", c.sample_particles);
    c.seed = j.value("seed", c.seed);
    if (j.contains("axisym")) {
        const auto& a = j["axisym"];
        c.axi_nr = a.value("nr", c.axi_nr);
        c.axi_nz = a.value("nz", c.axi_nz);
        c.axi_R = a.value("R", c.axi_R);
        c.axi_H = a.value("H", c.axi_H);
        c.axi_ring_center.x = a.value("ring_r", c.axi_ring_center.x);
        c.axi_ring_center.y = a.value("ring_z", c.axi_ring_center.y);
        c.axi_ring_radius = a.value("ring_radius", c.axi_ring_radius);
        c.axi_ring_strength = a.value("ring_strength", c.axi_ring_strength);
    }

    fill_profile_defaults(c);
    if (!(c.r_exp > 0.0 && c.r_exp < 1.0) || !(c.s_exp > 0.0 && c.s_exp < 1.0))
        throw std::invalid_argument("scenario: exponents must lie in (0,1)");
    if (c.mode == Mode::TwoD && c.domain_kind != "disk")
        throw std::invalid_argument("scenario: 2d mode needs a disk domain");
    if (c.mode == Mode::DeskThreeD && c.domain_kind != "ball")
        throw std::invalid_argument("scenario: 3d-desk mode needs a ball domain");
    return c;
}

ScenarioConfig builtin_scenario(const std::string& raw_name) {
    const std::string& name = raw_name;
    ScenarioConfig c;
    c.name = name;
    struct Finalize {
        ScenarioConfig& cfg;
        ~Finalize() { fill_profile_defaults(cfg); }
    } finalize{c};
    if (name == "rankine-disk") {
        c.mode = Mode::TwoD;
        c.grid_n = 512;
        c.domain_radius = 1.0;
        c.patch_kind = "circle";
        c.patch_a = 0.5;
        c.t_end = 5.0;
        c.sample_every = 10;
        c.markers = 1024;
        return c;
    }
    if (name == "kirchhoff-free") {
        c.mode = Mode::FreeSpace;
        c.patch_kind = "ellipse";
        c.patch_a = 1.0;
        c.patch_b = 0.5;
        c.markers = 512;
        c.t_end = 2.0 * pi / dyn::kirchhoff_rate(1.0, 0.5, 1.0);  // one revolution
        c.sample_every = 20;
        return c;
    }
    if (name == "perturbed-ellipse-disk") {
        c.mode = Mode::TwoD;
        c.grid_n = 256;
        c.domain_radius = 1.2;
        c.patch_kind = "ellipse";
        c.patch_a = 0.55;
        c.patch_b = 0.4;
        c.omega_i.terms = {{1.0, 0, 0, 0}, {0.15, 1, 0, 0}};
        c.t_end = 4.0;
        c.sample_every = 5;
        return c;
    }
    if (name == "vortex-ring-axisym") {
        c.mode = Mode::Axisym;
        c.t_end = 8.0;
        c.sample_every = 5;
        return c;
    }
    if (name == "sphere-ball-desk") {
        c.mode = Mode::DeskThreeD;
        c.grid_n = 64;
        c.domain_kind = "ball";
        c.domain_radius = 1.4;
        c.patch_kind = "sphere";
        c.patch_a = 0.55;
        // interior swirl strength and exterior profile strength; the
        // exterior field makes omega.n nonzero on the domain boundary
        c.omega_i.terms = {{1.5, 0, 0, 0}};
        c.omega_e.terms = {{0.5, 0, 0, 0}};
        c.dt_factor = 0.35;
        c.t_end = 0.55;
        c.sample_every = 1;
        return c;
    }
    throw std::invalid_argument("scenario: unknown builtin '" + name + "'");
}

std::vector<std::string> builtin_names() {
    return {"rankine-disk", "kirchhoff-free", "perturbed-ellipse-disk", "vortex-ring-axisym",
            "sphere-ball-desk"};
}

patch::VortexPatch make_patch(const ScenarioConfig& cfg, const Grid& g) {
    patch::VortexPatch p;
    p.support.center = g.center() + cfg.patch_offset;
    p.support.a = cfg.patch_a;
    p.support.b = cfg.patch_b;
    p.r = cfg.r_exp;
    if (cfg.patch_kind == "circle")
        p.support.kind = patch::LevelSet::Kind::Circle;
    else if (cfg.patch_kind == "ellipse")
        p.support.kind = patch::LevelSet::Kind::Ellipse;
    else if (cfg.patch_kind == "sphere")
        p.support.kind = patch::LevelSet::Kind::Sphere;
    else
        throw std::invalid_argument("scenario: unknown patch kind");

    const Vec3 c = p.support.center;
    const PolyProfile oi = cfg.omega_i, oe = cfg.omega_e;
    p.planar = cfg.mode != Mode::DeskThreeD;
    if (p.planar) {
        p.omega_i_s = [oi, c](const Vec3& x) { return oi.eval(x - c); };
        p.omega_e_s = [oe, c](const Vec3& x) { return oe.eval(x - c); };
    } else {
        // 3-D desk data is built from a global vector potential so the
        // evolved vorticity can be extended through its pull-back:
        //   A_0 = (0, 0, k x'y' + g(|q|)),  g = s a^2 (1 - (r/a)^2)^3 inside,
        // giving omega_e = k (x', -y', 0) plus a smooth swirl supported in
        // the patch sphere (the jump across the patch boundary vanishes).
        const double swirl = oi.terms.empty() ? 1.0 : oi.terms[0].c;
        const double kext = oe.terms.empty() ? 0.0 : oe.terms[0].c;
        const double a = cfg.patch_a;
        auto gprime_over_r = [swirl, a](double r) {
            if (r >= a) return 0.0;
            const double u = 1.0 - (r / a) * (r / a);
            return -6.0 * swirl * u * u;  // g' / r with g = s a^2 u^3
        };
        p.omega_e_v = [kext, c](const Vec3& x) {
            const Vec3 q = x - c;
            return Vec3{kext * q.x, -kext * q.y, 0.0};
        };
        p.omega_i_v = [kext, c, gprime_over_r](const Vec3& x) {
            const Vec3 q = x - c;
            const double gor = gprime_over_r(norm(q));
            return Vec3{kext * q.x + gor * q.y, -kext * q.y - gor * q.x, 0.0};
        };
    }
    return p;
}

patch::VectorFn make_potential(const ScenarioConfig& cfg, const Grid& g) {
    const Vec3 c = g.center() + cfg.patch_offset;
    const double swirl = cfg.omega_i.terms.empty() ? 1.0 : cfg.omega_i.terms[0].c;
    const double kext = cfg.omega_e.terms.empty() ? 0.0 : cfg.omega_e.terms[0].c;
    const double a = cfg.patch_a;
    return [c, swirl, kext, a](const Vec3& x) {
        const Vec3 q = x - c;
        const double r2 = dot(q, q);
        double gg = 0.0;
        if (r2 < a * a) {
            const double u = 1.0 - r2 / (a * a);
            gg = swirl * a * a * u * u * u;
        }
        return Vec3{0.0, 0.0, kext * q.x * q.y + gg};
    };
}

namespace {

void write_file(const std::filesystem::path& p, const std::string& content) {
    std::ofstream os(p, std::ios::binary);
    if (!os) throw std::runtime_error("run_scenario: cannot write " + p.string());
    os << content;
}

RunResult run_2d(const ScenarioConfig& cfg, const std::filesystem::path& out) {
    Grid g = build_grid(2, cfg.extent, cfg.grid_n);
    Domain dom = domain_disk(g, cfg.domain_radius);
    patch::VortexPatch p = make_patch(cfg, g);
    dyn::DiskPatchFlow flow(g, dom, p, cfg.markers, cfg.sample_particles);
    Rng rng(cfg.seed);

    const double dt = cfg.dt_factor * flow.cfl_dt();
    const int steps = std::max(1, static_cast<int>(std::ceil(cfg.t_end / dt)));

    std::vector<dyn::Diag> series;
    std::ostringstream csv;
    csv << dyn::Diag::csv_header() << "\n";
    series.push_back(flow.diagnostics(cfg.r_exp, rng.stream("diag-0")));
    csv << series.back().csv_row() << "\n";

    const double area0 = flow.patch_area();
    try {
        for (int s_i = 1; s_i <= steps; ++s_i) {
            flow.step(dt);
            if (s_i % cfg.sample_every == 0 || s_i == steps) {
                series.push_back(
                    flow.diagnostics(cfg.r_exp, rng.stream("diag-" + std::to_string(s_i))));
                csv << series.back().csv_row() << "\n";
            }
            if (cfg.snapshot_every > 0 && s_i % cfg.snapshot_every == 0) {
                std::ostringstream name;
                name << "omega_" << s_i << ".bin";
                io::write_snapshot((out / name.str()).string(), flow.omega_field(),
                                   flow.time());
            }
        }
    } catch (const std::exception& e) {
        // Abort mid-run (CFL breach, particle escape): keep what we have and
        // flag the directory before propagating.
        write_file(out / "timeseries.csv", csv.str());
        write_file(out / "ABORTED", std::string(e.what()) + "\n");
        throw;
    }
    write_file(out / "timeseries.csv", csv.str());

    RunResult res;
    res.rows = static_cast<int>(series.size());
    res.final_time = flow.time();
    res.area_drift = std::abs(flow.patch_area() - area0) / std::abs(area0);
    if (series.size() >= 50) {
        dyn::GronwallReport rep = dyn::gronwall_envelope_check(series);
        res.envelope_holds = rep.envelope_holds;
        std::ostringstream env;
        env.precision(17);
        env << "loglog_slope,loglog_intercept,envelope_excess,A,B,holds\n"
            << rep.loglog_slope << "," << rep.loglog_intercept << "," << rep.envelope_excess
            << "," << rep.A << "," << rep.B << "," << (rep.envelope_holds ? 1 : 0) << "\n";
        write_file(out / "envelope.csv", env.str());
    }
    std::ostringstream sum;
    sum.precision(17);
    sum << "marker_drift=" << flow.max_marker_displacement()
        << " area_drift=" << res.area_drift << " cross_drift=" << flow.max_cross_drift();
    res.summary = sum.str();
    return res;
}

RunResult run_free(const ScenarioConfig& cfg, const std::filesystem::path& out) {
    Grid g = build_grid(2, cfg.extent, 64);  // free-space mode is grid-free
    patch::VortexPatch p = make_patch(cfg, g);
    if (p.support.kind == patch::LevelSet::Kind::Circle &&
        cfg.patch_kind == "ellipse")
        throw std::invalid_argument("free-space: bad patch");
    const double w0 = p.omega_i_s(p.support.center) - p.omega_e_s(p.support.center);
    contour::Ring ring = p.support.boundary_samples(cfg.markers);
    dyn::FreePatchFlow flow(ring, w0);

    const double rate = dyn::kirchhoff_rate(cfg.patch_a, cfg.patch_b, w0);
    const double vmax = 0.5 * w0 * cfg.patch_a;  // outer rim speed scale
    const double spacing = 2.0 * pi * cfg.patch_a / cfg.markers;
    const double dt = cfg.dt_factor * spacing / vmax;
    const int steps = std::max(1, static_cast<int>(std::ceil(cfg.t_end / dt)));

    std::ostringstream csv;
    csv.precision(17);
    csv << "t,area,orientation\n";
    const double area0 = flow.area();
    std::vector<double> ts, angles;
    double prev_angle = flow.orientation(), unwrapped = prev_angle;
    for (int s_i = 1; s_i <= steps; ++s_i) {
        flow.step(dt);
        double ang = flow.orientation();
        double delta = ang - prev_angle;
        while (delta > 0.5 * pi) delta -= pi;   // moment angle has period pi
        while (delta < -0.5 * pi) delta += pi;
        unwrapped += delta;
        prev_angle = ang;
        if (s_i % cfg.sample_every == 0 || s_i == steps) {
            ts.push_back(flow.time());
            angles.push_back(unwrapped);
            csv << flow.time() << "," << flow.area() << "," << unwrapped << "\n";
        }
    }
    write_file(out / "timeseries.csv", csv.str());

    // Fit the rotation rate.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        sx += ts[i];
        sy += angles[i];
        sxx += ts[i] * ts[i];
        sxy += ts[i] * angles[i];
    }
    const double m = static_cast<double>(ts.size());
    const double fitted = (m * sxy - sx * sy) / std::max(m * sxx - sx * sx, 1e-300);

    RunResult res;
    res.rows = static_cast<int>(ts.size());
    res.final_time = flow.time();
    res.fitted_rate = fitted;
    res.expected_rate = rate;
    res.area_drift = std::abs(flow.area() - area0) / std::abs(area0);
    std::ostringstream sum;
    sum.precision(17);
    sum << "fitted_rate=" << fitted << " expected_rate=" << rate
        << " area_drift=" << res.area_drift;
    res.summary = sum.str();
    write_file(out / "rotation.csv",
               "fitted_rate,expected_rate,rel_error\n" + std::to_string(fitted) + "," +
                   std::to_string(rate) + "," +
                   std::to_string(std::abs(fitted - rate) / rate) + "\n");
    return res;
}

RunResult run_axisym(const ScenarioConfig& cfg, const std::filesystem::path& out) {
    const Vec3 rc = cfg.axi_ring_center;
    const double rad = cfg.axi_ring_radius, amp = cfg.axi_ring_strength;
    axi::MeridianFlow flow(cfg.axi_nr, cfg.axi_nz, cfg.axi_R, cfg.axi_H,
                           [rc, rad, amp](double r, double z) {
                               const double d2 = (r - rc.x) * (r - rc.x) +
                                                 (z - rc.y) * (z - rc.y);
                               return amp * std::exp(-d2 / (rad * rad));
                           });
    const double bound = flow.q_sup() * flow.max_radius();
    const double dt = cfg.dt_factor * flow.cfl_dt();
    const int steps = std::max(1, static_cast<int>(std::ceil(cfg.t_end / dt)));

    std::ostringstream csv;
    csv.precision(17);
    csv << "t,omega_sup,bound,v_lip\n";
    RunResult res;
    std::vector<dyn::Diag> series;
    for (int s_i = 0; s_i <= steps; ++s_i) {
        if (s_i > 0) flow.step(dt);
        if (s_i % cfg.sample_every == 0 || s_i == steps) {
            const double osup = flow.omega_sup();
            csv << flow.time() << "," << osup << "," << bound << "," << flow.velocity_lip()
                << "\n";
            res.omega_bound_excess = std::max(res.omega_bound_excess, osup - bound);
            dyn::Diag d;
            d.t = flow.time();
            d.v_lip = flow.velocity_lip();
            d.X = 1.0 + osup;
            series.push_back(d);
        }
    }
    write_file(out / "timeseries.csv", csv.str());
    res.rows = static_cast<int>(series.size());
    res.final_time = flow.time();
    if (series.size() >= 50) {
        dyn::GronwallReport rep = dyn::gronwall_envelope_check(series);
        res.envelope_holds = rep.envelope_holds;
        std::ostringstream env;
        env.precision(17);
        env << "A,B,holds\n" << rep.A << "," << rep.B << "," << (rep.envelope_holds ? 1 : 0)
            << "\n";
        write_file(out / "envelope.csv", env.str());
    }
    std::ostringstream sum;
    sum.precision(17);
    sum << "omega_bound_excess=" << res.omega_bound_excess;
    res.summary = sum.str();
    return res;
}

RunResult run_3d(const ScenarioConfig& cfg, const std::filesystem::path& out) {
    Grid g = build_grid(3, cfg.extent, cfg.grid_n);
    Domain dom = domain_ball(g, cfg.domain_radius);
    ext::BoundaryAtlas atlas = ext::build_atlas(dom, g, 2048);
    patch::VortexPatch p = make_patch(cfg, g);
    dyn::BallPatchFlow flow(g, atlas, p, make_potential(cfg, g), 400, 300);

    const double dt = cfg.dt_factor * flow.cfl_dt();
    const int steps = std::min(50, std::max(1, static_cast<int>(std::ceil(cfg.t_end / dt))));

    std::ostringstream csv;
    csv.precision(17);
    csv << "t,omega_n_discrepancy,omega_n_cr,cross_drift,w_normal_residual,w_projection_correction\n";
    for (int s_i = 0; s_i <= steps; ++s_i) {
        if (s_i > 0) flow.step(dt);
        if (s_i % cfg.sample_every == 0 || s_i == steps) {
            dyn::BallPatchFlow::OmegaDotN rep = flow.omega_dot_n(cfg.r_exp);
            csv << flow.time() << "," << rep.max_discrepancy << "," << rep.cr_norm << ","
                << flow.max_cross_drift() << "," << flow.max_w_normal_residual() << ","
                << flow.max_w_projection_correction() << "\n";
        }
    }
    write_file(out / "timeseries.csv", csv.str());

    dyn::BallPatchFlow::OmegaDotN rep = flow.omega_dot_n(cfg.r_exp);
    RunResult res;
    res.rows = steps / cfg.sample_every + 1;
    res.final_time = flow.time();
    std::ostringstream sum;
    sum.precision(17);
    sum << "omega_n_discrepancy=" << rep.max_discrepancy
        << " cross_drift=" << flow.max_cross_drift();
    res.summary = sum.str();
    return res;
}

}  // namespace

RunResult run_scenario(const ScenarioConfig& cfg, const std::string& out_dir) {
    std::filesystem::path out(out_dir);
    std::filesystem::create_directories(out);
    write_file(out / "config.json", cfg.to_json());

    RunResult res;
    switch (cfg.mode) {
        case Mode::TwoD: res = run_2d(cfg, out); break;
        case Mode::FreeSpace: res = run_free(cfg, out); break;
        case Mode::Axisym: res = run_axisym(cfg, out); break;
        case Mode::DeskThreeD: res = run_3d(cfg, out); break;
    }
    write_file(out / "summary.txt", res.summary + "\n");
    return res;
}

}  // namespace patchlab::scenario
