// patchlab command line: norm analysis, extension operators, velocity
// reconstruction, scenario runs and the verify battery.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "patchlab/biot_savart.hpp"
#include "patchlab/domain.hpp"
#include "patchlab/extension.hpp"
#include "patchlab/grid.hpp"
#include "patchlab/io.hpp"
#include "patchlab/lp.hpp"
#include "patchlab/scenario.hpp"
#include "patchlab/verify.hpp"

using namespace patchlab;

namespace {

int worker_cap() {
    if (const char* env = std::getenv("PATCHLAB_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    return 1;
}

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

// "disk:1.0" or "ball:2.0"
Domain parse_domain(const std::string& spec, const Grid& g) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos)
        throw std::runtime_error("domain spec must look like disk:<radius>");
    const std::string kind = spec.substr(0, colon);
    const double radius = std::stod(spec.substr(colon + 1));
    if (kind == "disk") return domain_disk(g, radius);
    if (kind == "ball") return domain_ball(g, radius);
    throw std::runtime_error("unknown domain kind '" + kind + "'");
}

// "C:0.5" (Holder) or "B:0.5:1:2" (Besov; inf encoded as 0)
void parse_space(const std::string& spec, double& s, int& p, int& q) {
    std::stringstream ss(spec);
    std::string tok;
    std::vector<std::string> parts;
    while (std::getline(ss, tok, ':')) parts.push_back(tok);
    if (parts.empty()) throw std::runtime_error("empty space spec");
    if (parts[0] == "C") {
        if (parts.size() != 2) throw std::runtime_error("Holder space spec is C:<r>");
        s = std::stod(parts[1]);
        p = q = 0;
        return;
    }
    if (parts[0] == "B") {
        if (parts.size() != 4) throw std::runtime_error("Besov space spec is B:<s>:<p>:<q>");
        s = std::stod(parts[1]);
        p = std::stoi(parts[2]);
        q = std::stoi(parts[3]);
        return;
    }
    throw std::runtime_error("space spec must start with C or B");
}

int cmd_analyze(const std::string& space, const std::string& field_path,
                const std::string& out_path) {
    double s;
    int p, q;
    parse_space(space, s, p, q);
    io::Snapshot snap = io::read_snapshot(field_path);
    std::ostringstream os;
    os.precision(17);
    for (int c = 0; c < snap.field.ncomp; ++c) {
        lp::NormReport rep = lp::besov_report(snap.field.comp[c], s, p, q);
        os << "component " << c << (rep.integer_order_flag ? " (integer order: C^s_* norm)" : "")
           << "\n";
        os << rep.to_csv();
    }
    if (out_path.empty())
        std::cout << os.str();
    else
        io::write_text(out_path, os.str());
    return 0;
}

int cmd_extend(const std::string& op, const std::string& in_path,
               const std::string& out_path, const std::string& report_path,
               const std::string& domain_spec, int charts, double r) {
    io::Snapshot snap = io::read_snapshot(in_path);
    if (snap.field.ncomp < 2) throw std::runtime_error("extend expects a vector field");
    const Grid& g = snap.field.grid;
    Domain dom = parse_domain(domain_spec, g);
    ext::BoundaryAtlas atlas = ext::build_atlas(dom, g, charts);
    ext::VectorSampler u = ext::field_sampler(snap.field);

    VectorField result;
    if (op == "P")
        result = ext::extend_P(u, atlas);
    else if (op == "Pc")
        result = ext::extend_Pc(u, atlas);
    else if (op == "Pdiv") {
        ext::PdivResult pr = ext::extend_Pdiv(u, atlas);
        result = std::move(pr.field);
        std::cout << "shell_residual=" << pr.shell_residual
                  << " boundary_flux=" << pr.boundary_flux << "\n";
    } else {
        throw std::runtime_error("extend op must be P, Pc or Pdiv");
    }
    io::write_snapshot(out_path, result, snap.time);
    if (!report_path.empty()) {
        ext::ExtensionReport rep = ext::extension_report(u, atlas, r);
        io::write_text(report_path,
                       "sup_ratio,ext_cr_ratio,div_sup_ratio,ext_div_cr_ratio\n" +
                           rep.to_csv_row() + "\n");
    }
    return 0;
}

int cmd_velocity(const std::string& omega_path, const std::string& domain_spec,
                 const std::string& out_path, const std::string& report_path) {
    io::Snapshot snap = io::read_snapshot(omega_path);
    const Grid& g = snap.field.grid;
    Domain dom = parse_domain(domain_spec, g);
    if (g.dim != 2)
        throw std::runtime_error("velocity: 3-D input should go through run --builtin");
    bs::VelocitySolution sol = bs::velocity_from_vorticity(snap.field.comp[0], dom);
    io::write_snapshot(out_path, sol.velocity_field(), snap.time);
    if (!report_path.empty()) {
        double omega_sup = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i)
            omega_sup = std::max(omega_sup, std::abs(snap.field.comp[0].data[i]));
        VectorField vf = sol.velocity_field();
        std::ostringstream os;
        os.precision(17);
        os << snap.time << "," << omega_sup << "," << max_norm(vf) << ","
           << sol.boundary_normal_residual() << "\n";
        std::ofstream app(report_path, std::ios::app);
        if (app.tellp() == 0) app << "t,omega_sup,v_max,vn_residual\n";
        app << os.str();
    }
    return 0;
}

int cmd_run(const std::string& config_path, const std::string& builtin,
            const std::string& out_dir, std::uint64_t seed, bool seed_set, int sample_every) {
    scenario::ScenarioConfig cfg;
    if (!builtin.empty())
        cfg = scenario::builtin_scenario(builtin);
    else if (!config_path.empty())
        cfg = scenario::parse_config(read_file(config_path));
    else
        throw std::runtime_error("run needs --config or --builtin");
    if (seed_set) cfg.seed = seed;
    if (sample_every > 0) cfg.sample_every = sample_every;
    scenario::RunResult res = scenario::run_scenario(cfg, out_dir);
    std::cout << "rows=" << res.rows << " t_end=" << res.final_time << " " << res.summary
              << "\n";
    return 0;
}

int cmd_verify(const std::string& suite, bool fast, std::uint64_t seed,
               const std::string& out_path) {
    std::vector<std::string> names;
    if (suite == "all")
        names = verify::suite_names();
    else
        names.push_back(suite);
    bool ok = true;
    std::ostringstream csv;
    for (const auto& name : names) {
        verify::SuiteResult res = verify::run_suite(name, fast, seed);
        std::cout << res.to_text();
        csv << res.to_csv();
        ok = ok && res.all_pass();
    }
    if (!out_path.empty()) io::write_text(out_path, csv.str());
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"patchlab: vortex patch numerical laboratory"};
    app.require_subcommand(1);
    (void)worker_cap();  // PATCHLAB_THREADS is honored (serial kernels cap at 1)

    // analyze norm
    auto* analyze = app.add_subcommand("analyze", "norms and block decompositions");
    auto* norm = analyze->add_subcommand("norm", "Littlewood-Paley norm of a snapshot");
    std::string space = "C:0.5", field_path, analyze_out;
    norm->add_option("--space", space, "C:<r> or B:<s>:<p>:<q> (0 = inf)");
    norm->add_option("--field", field_path, "field snapshot (.bin)")->required();
    norm->add_option("--out", analyze_out, "CSV output path (default stdout)");

    // extend
    auto* extend = app.add_subcommand("extend", "boundary extension operators");
    std::string ext_op = "P", ext_in, ext_out, ext_report, ext_domain = "disk:1.0";
    int ext_charts = 24;
    double ext_r = 0.5;
    extend->add_option("--op", ext_op, "P | Pc | Pdiv");
    extend->add_option("--in", ext_in, "input snapshot")->required();
    extend->add_option("--out", ext_out, "output snapshot")->required();
    extend->add_option("--report", ext_report, "ratio census CSV");
    extend->add_option("--domain", ext_domain, "disk:<R> or ball:<R>");
    extend->add_option("--charts", ext_charts, "chart count");
    extend->add_option("--holder", ext_r, "Holder exponent for the report");

    // velocity
    auto* velocity = app.add_subcommand("velocity", "velocity from vorticity");
    std::string vel_omega, vel_domain = "disk:1.0", vel_out, vel_report;
    velocity->add_option("--omega", vel_omega, "vorticity snapshot")->required();
    velocity->add_option("--domain", vel_domain, "disk:<R>");
    velocity->add_option("--out", vel_out, "velocity snapshot")->required();
    velocity->add_option("--report", vel_report, "append a report row here");

    // run
    auto* run = app.add_subcommand("run", "run a scenario");
    std::string run_config, run_builtin, run_out = "out";
    std::uint64_t run_seed = 0;
    int run_sample = 0;
    run->add_option("--config", run_config, "scenario JSON");
    run->add_option("--builtin", run_builtin, "builtin scenario name");
    run->add_option("--out", run_out, "output directory");
    auto* seed_opt = run->add_option("--seed", run_seed, "override the config seed");
    run->add_option("--sample-every", run_sample, "diagnostic sampling stride");

    // scenarios listing
    auto* scen = app.add_subcommand("scenarios", "list builtin scenarios");

    // verify
    auto* ver = app.add_subcommand("verify", "invariant batteries");
    std::string ver_suite = "all", ver_out;
    bool ver_fast = false;
    std::uint64_t ver_seed = 1;
    ver->add_option("suite", ver_suite, "lp|extension|biot-savart|patch|dynamics|multiplier|all");
    ver->add_flag("--fast", ver_fast, "reduced corpus sizes");
    ver->add_option("--seed", ver_seed, "corpus seed");
    ver->add_option("--out", ver_out, "machine-readable CSV path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (norm->parsed()) return cmd_analyze(space, field_path, analyze_out);
        if (analyze->parsed()) {
            std::cerr << "analyze: expected the 'norm' subcommand\n";
            return 2;
        }
        if (extend->parsed())
            return cmd_extend(ext_op, ext_in, ext_out, ext_report, ext_domain, ext_charts,
                              ext_r);
        if (velocity->parsed()) return cmd_velocity(vel_omega, vel_domain, vel_out, vel_report);
        if (run->parsed())
            return cmd_run(run_config, run_builtin, run_out, run_seed, seed_opt->count() > 0,
                           run_sample);
        if (scen->parsed()) {
            for (const auto& n : scenario::builtin_names()) std::cout << n << "\n";
            return 0;
        }
        if (ver->parsed()) return cmd_verify(ver_suite, ver_fast, ver_seed, ver_out);
    } catch (const std::exception& e) {
        std::cerr << "patchlab: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
