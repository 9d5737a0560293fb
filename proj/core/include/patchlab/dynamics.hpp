#pragma once

#include <functional>
#include <string>
#include <vector>

#include "patchlab/biot_savart.hpp"
#include "patchlab/contour.hpp"
#include "patchlab/domain.hpp"
#include "patchlab/grid.hpp"
#include "patchlab/patch.hpp"
#include "patchlab/rng.hpp"

namespace patchlab::dyn {

/// One sampled row of the evolution diagnostics.
struct Diag {
    double t = 0.0;
    double v_lip = 0.0;
    double omega_sup = 0.0;
    double winv_sup = 0.0;
    double sum_w_cr = 0.0;
    double sum_conormal = 0.0;
    double omega_n_cr = 0.0;
    double X = 1.0;
    double log_ratio = 0.0;
    double area = 0.0;
    double cross_drift = 0.0;
    double boundary_norm_direct = 0.0;
    double boundary_norm_formula = 0.0;

    static std::string csv_header();
    std::string csv_row() const;
};

struct GronwallReport {
    double loglog_slope = 0.0;      // fit of ln ln(e+X) against int ||v||_Lip
    double loglog_intercept = 0.0;
    double envelope_excess = 0.0;   // max (measured - fitted envelope), <= 0 when it holds
    double A = 0.0, B = 0.0;        // ||v(t)||_Lip <= A e^{Bt} envelope (2-D/axisym)
    bool envelope_holds = false;
};

/// Fits the Gronwall-type envelopes to a completed diagnostics series
/// (needs >= 50 rows).
GronwallReport gronwall_envelope_check(const std::vector<Diag>& series);

// ---------------------------------------------------------------------------
// Bounded-disk 2-D patch evolution
// ---------------------------------------------------------------------------

class DiskPatchFlow {
  public:
    DiskPatchFlow(const Grid& g, const Domain& dom, const patch::VortexPatch& patch0,
                  int markers = 1024, int sample_particles = 300);

    double time() const { return t_; }
    const contour::Ring& ring() const { return ring_; }
    const Grid& grid() const { return grid_; }

    /// Largest stable step: 0.5 h / max|v| at the current state.
    double cfl_dt();

    /// One classical RK4 step; velocity is re-solved at every stage.
    /// Throws when dt violates the CFL bound or a particle leaves the domain.
    void step(double dt);

    /// Velocity solution at the current state.
    bs::VelocitySolution solve() const;

    /// Eulerian vorticity rebuilt from the marker ring and the backward map.
    ScalarField omega_field() const;

    Diag diagnostics(double r, Rng rng);

    double patch_area() const { return contour::ring_area(ring_); }
    double max_marker_displacement() const;  // vs t = 0 positions
    double max_cross_drift() const;          // particle (w^mu x w^nu) . omega drift
    double max_particle_omega_drift() const { return 0.0; }  // transport by assignment

    const std::vector<Vec3>& particles() const { return part_pos_; }
    const std::vector<std::vector<Vec3>>& particle_w() const { return part_w_; }

  private:
    struct Stage;  // state derivative bundle

    Grid grid_;
    Domain dom_;
    patch::VortexPatch patch0_;
    patch::TangentSystem W0_;
    double t_ = 0.0;
    int steps_ = 0;

    contour::Ring ring_, ring0_;
    std::vector<Vec3> probe_pos_;               // Lagrangian boundary probes
    std::vector<Vec3> marker_gradphi_;          // transported grad(phi) at probes
    std::vector<std::vector<Vec3>> marker_w_;   // per probe, per field
    std::vector<std::uint8_t> marker_alpha_;    // orientation bits per pair, packed
    std::vector<double> marker_denom0_;         // sum |w0 x w0| at probes
    std::vector<double> marker_gradf0_;         // |grad f_P| at t = 0

    std::vector<Vec3> part_pos_;
    std::vector<std::vector<Vec3>> part_w_;
    std::vector<double> part_omega_;
    std::vector<std::vector<double>> part_cross0_;  // initial invariants per pair

    VectorField backmap_;  // B(t): Eulerian inverse flow map (2 components)

    bs::VelocitySolution solve_for(const contour::Ring& ring) const;
    void check_inside() const;
};

// ---------------------------------------------------------------------------
// Free-space contour-dynamics evolution (uniform patch)
// ---------------------------------------------------------------------------

class FreePatchFlow {
  public:
    FreePatchFlow(contour::Ring ring, double vorticity_jump);

    double time() const { return t_; }
    const contour::Ring& ring() const { return ring_; }
    double area() const { return contour::ring_area(ring_); }
    double orientation() const { return contour::orientation_angle(ring_); }

    void step(double dt);  // RK4 on marker positions, CD velocity each stage

  private:
    contour::Ring ring_;
    double jump_;
    double t_ = 0.0;
    int steps_ = 0;
};

/// Kirchhoff ellipse rotation rate omega0 a b / (a + b)^2.
double kirchhoff_rate(double a, double b, double omega0);

// ---------------------------------------------------------------------------
// Frozen-field transport probe (conservation order checks)
// ---------------------------------------------------------------------------

struct FrozenProbe {
    std::vector<Vec3> pos;
    std::vector<std::vector<Vec3>> w;  // per particle, per field
    std::vector<Vec3> omega;
};

/// RK4-transports particles, tangent vectors and vorticity vectors through a
/// frozen velocity field given by value/gradient samplers; returns the max
/// drift of (w^mu x w^nu) . omega over particles and pairs.  The gradient
/// sampler must be trace-free (solenoidal field).
double frozen_transport_cross_drift(
    const std::function<Vec3(const Vec3&)>& velocity,
    const std::function<void(const Vec3&, double M[3][3])>& gradient, FrozenProbe probe,
    double t_end, double dt);

// ---------------------------------------------------------------------------
// 3-D desk-scale evolution in the ball
// ---------------------------------------------------------------------------

class BallPatchFlow {
  public:
    /// potential0 must satisfy curl(potential0) = omega_0 globally; the
    /// evolved vorticity is extended through the transported potential
    /// (grad B)^T A_0(B), whose curl is exactly divergence free.  The chart
    /// collar is a single cell at desk resolutions, too thin to host the
    /// reflected extension, so the divergence-free requirement is met
    /// through the potential instead.
    BallPatchFlow(const Grid& g, const ext::BoundaryAtlas& atlas,
                  const patch::VortexPatch& patch0, const patch::VectorFn& potential0,
                  int boundary_particles = 400, int patch_particles = 300);

    double time() const { return t_; }
    double cfl_dt();
    void step(double dt);

    /// Eulerian vorticity via the Cauchy formula through the backward map.
    VectorField omega_field() const;
    bs::VelocitySolution solve() const;

    struct OmegaDotN {
        double max_discrepancy = 0.0;   // |formula - direct| / scale
        double formula_sup = 0.0;
        double direct_sup = 0.0;
        double cr_norm = 0.0;           // ||omega.n||_{C^r} over boundary particles
    };
    OmegaDotN omega_dot_n(double r) const;

    double max_cross_drift() const;
    double max_w_normal_residual() const;  // |w.n| at boundary particles
    /// Largest per-step tangency correction applied to the boundary w's.
    double max_w_projection_correction() const { return w_projection_max_; }

  private:
    Grid grid_;
    ext::BoundaryAtlas atlas_;
    patch::VortexPatch patch0_;
    patch::VectorFn potential0_;
    patch::TangentSystem W0_;
    double t_ = 0.0;

    std::vector<Vec3> bpos_, bpos0_;            // boundary ring on dOmega
    std::vector<std::vector<Vec3>> bw_;
    std::vector<Vec3> bomega_;
    std::vector<double> bomega_n0_, bdenom0_;

    std::vector<Vec3> ppos_;                    // patch-attached probes
    std::vector<std::vector<Vec3>> pw_;
    std::vector<Vec3> pomega_;
    std::vector<std::vector<double>> pcross0_;

    VectorField backmap_;  // 3 components
    double cutoff_inner_ = 0.0, cutoff_outer_ = 0.0;  // potential cutoff radii
    double w_projection_max_ = 0.0;

    double cutoff_eta(double r) const;
    bs::VelocitySolution solve_for(const VectorField& backmap) const;
    VectorField omega_from_backmap(const VectorField& backmap) const;
};

}  // namespace patchlab::dyn
