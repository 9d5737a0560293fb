#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "patchlab/domain.hpp"
#include "patchlab/grid.hpp"
#include "patchlab/patch.hpp"

namespace patchlab::scenario {

/// Scenario mode (restricts the allowed domain/patch combinations).
enum class Mode { TwoD, Axisym, DeskThreeD, FreeSpace };

/// Low-order polynomial profile in centered coordinates: sum of
/// c * x^px * y^py * z^pz terms.
struct PolyProfile {
    struct Term {
        double c;
        int px, py, pz;
    };
    std::vector<Term> terms;
    double eval(const Vec3& q) const;
};

struct ScenarioConfig {
    int schema = 1;
    std::string name = "custom";
    Mode mode = Mode::TwoD;
    int grid_n = 256;
    double extent = 2.0 * 3.14159265358979323846;
    std::string domain_kind = "disk";
    double domain_radius = 1.0;

    std::string patch_kind = "circle";
    Vec3 patch_offset{};
    double patch_a = 0.5, patch_b = 0.5;
    PolyProfile omega_i, omega_e;
    double r_exp = 0.5, s_exp = 0.5;

    double dt_factor = 0.5;
    double t_end = 1.0;
    int sample_every = 10;
    int snapshot_every = 0;  // 0: no snapshots
    int markers = 1024;
    int sample_particles = 300;
    std::uint64_t seed = 1;

    // axisym extras
    int axi_nr = 128, axi_nz = 128;
    double axi_R = 2.0, axi_H = 4.0;
    Vec3 axi_ring_center{1.0, 2.0, 0.0};  // (r0, z0)
    double axi_ring_radius = 0.4;
    double axi_ring_strength = 1.0;

    std::string to_json() const;  // defaults materialized, key-sorted
};

ScenarioConfig parse_config(const std::string& json_text);
ScenarioConfig builtin_scenario(const std::string& name);
std::vector<std::string> builtin_names();

patch::VortexPatch make_patch(const ScenarioConfig& cfg, const Grid& g);

/// Global vector potential of the 3-D desk scenario's vorticity.
patch::VectorFn make_potential(const ScenarioConfig& cfg, const Grid& g);

struct RunResult {
    int rows = 0;
    double final_time = 0.0;
    bool envelope_holds = false;
    double fitted_rate = 0.0;      // free-space: fitted rotation rate
    double expected_rate = 0.0;    // free-space: closed-form rate
    double area_drift = 0.0;
    double omega_bound_excess = 0.0;  // axisym: max(omega_sup - bound)
    std::string summary;
};

/// Runs a scenario, writing config echo, the time-series CSV, snapshots and
/// the envelope report into out_dir.  Deterministic for (config, seed).
RunResult run_scenario(const ScenarioConfig& cfg, const std::string& out_dir);

}  // namespace patchlab::scenario
