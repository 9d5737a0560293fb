#pragma once

#include <functional>
#include <string>
#include <vector>

#include "patchlab/domain.hpp"
#include "patchlab/grid.hpp"
#include "patchlab/vec.hpp"

namespace patchlab::ext {

/// Continuous vector field on (a neighbourhood of) closure(Omega).  The
/// extension operators act on continuous fields, so they take a sampler
/// rather than a grid array; exact boundary traces matter for the
/// tangent-field identities.  Use field_sampler() to wrap gridded data.
using VectorSampler = std::function<Vec3(const Vec3&)>;

VectorSampler field_sampler(const VectorField& f);

struct Chart {
    Vec3 center;    // x_i on the boundary
    Vec3 frame[3];  // unit, mutually orthogonal, all with frame.n > 0
};

/// Boundary atlas: charts with outward-oriented orthogonal frames, ray
/// projections onto the boundary, and a partition of unity
/// psi_0..psi_N with sum = 1 on closure(Omega) and supp psi_i inside V_i.
///
/// The collar parameter fixes how far outside the boundary chart bumps
/// reach; it is capped by the requirement that every frame ray from the
/// collar meets the boundary transversally in exactly one nearby point
/// (verified node-by-node during construction).
class BoundaryAtlas {
  public:
    const Domain& domain() const { return domain_; }
    const Grid& grid() const { return grid_; }
    int chart_count() const { return static_cast<int>(charts_.size()); }
    const Chart& chart(int i) const { return charts_[i]; }

    double collar() const { return collar_; }
    /// Extensions vanish on delta <= -support_depth(): the enclosing open
    /// set V of the construction is {delta > -support_depth()}.
    double support_depth() const { return 0.85 * collar_; }

    /// Chart bump b_i (i >= 1) and interior bump b_0; psi_i = eta * b_i / sum b.
    double bump(int i, const Vec3& p) const;
    double eta(const Vec3& p) const;  // 1 on closure(Omega), 0 below -0.8*collar

    /// All charts with nonzero bump at p, with normalized weights psi_i(p).
    /// Returns sum psi_i (= eta(p), or 0 where no chart reaches).
    double weights_at(const Vec3& p, std::vector<std::pair<int, double>>& out) const;

    /// Chart weights excluding the interior bump and the eta decay: the
    /// boundary-limit weighting of the exterior branch.  Returns 0 if no
    /// chart reaches p.  Entries are 0-based chart indices.
    double chart_weights(const Vec3& p, std::vector<std::pair<int, double>>& out) const;

    double psi0(const Vec3& p) const;
    double psi(int i, const Vec3& p) const;  // i = 0..chart_count()

    /// y^{i,j}: boundary point hit by the ray through p along frame j.
    /// Throws std::runtime_error if the single-intersection property fails.
    Vec3 project(int i, int j, const Vec3& p) const;

    int frame_count() const { return domain_.dim; }
    double chart_angular_radius() const { return psi_arc_; }

    friend BoundaryAtlas build_atlas(const Domain& domain, const Grid& grid, int charts,
                                     double arc_factor);

  private:
    Domain domain_;
    Grid grid_;
    std::vector<Chart> charts_;
    double psi_arc_ = 0.0;   // angular bump radius (radians at the center)
    double collar_ = 0.0;    // exterior bump depth
    double window_ = 0.0;    // projection window |y - x_i| <= window_

    // Angular bins of chart indices, so point evaluations touch only nearby
    // charts (direction -> candidate list).
    int nbin_theta_ = 0, nbin_phi_ = 0;
    std::vector<std::vector<int>> bins_;
    void build_bins();
    const std::vector<int>& candidates(const Vec3& dir) const;
};

/// Verified atlas construction.  Chart count >= 4 (2-D) / >= 6 (3-D).
/// arc_factor scales the chart bump radius relative to the covering radius
/// of the chart centers; values > ~1.6 produce over-wide charts whose rays
/// graze the boundary, which the verification rejects.
BoundaryAtlas build_atlas(const Domain& domain, const Grid& grid, int charts,
                          double arc_factor = 1.25);

/// Normal-trace extension: keeps only the normal trace outside, so tangent
/// fields extend by zero.  Restriction to Omega is exact.
VectorField extend_P(const VectorSampler& u, const BoundaryAtlas& atlas);

/// Continuous extension: keeps the full boundary trace.
VectorField extend_Pc(const VectorSampler& u, const BoundaryAtlas& atlas);

/// Evaluate the P / Pc extension at one (arbitrary) point.
Vec3 eval_P(const VectorSampler& u, const BoundaryAtlas& atlas, const Vec3& p,
            bool continuous);

struct PdivResult {
    VectorField field;
    double boundary_flux = 0.0;       // oint u.n over the domain boundary
    double shell_residual = 0.0;      // max |div_MAC(corrected)| over shell nodes
    int shell_nodes = 0;
    int cg_iterations = 0;
};

/// Divergence-free extension: P, then a pure-Neumann finite-difference solve
/// in the exterior shell removes div(Pu) there (compatibility shift on the
/// source; conjugate gradients on the shell graph).  Requires zero total
/// boundary flux.
PdivResult extend_Pdiv(const VectorSampler& u, const BoundaryAtlas& atlas);

/// Estimate census for one field: the four ratios
/// (sup, exterior C^r, div sup, exterior div C^r), all against the norms the
/// estimates reference.
struct ExtensionReport {
    double sup_ratio = 0.0;       // ||Pu||_inf / ||u||_inf
    double ext_cr_ratio = 0.0;    // ||Pu||_{C^r(ext)} / ||u.n||_{C^r(bdry)}
    double div_sup_ratio = 0.0;   // ||div Pu||_inf / ||u||_inf
    double ext_div_cr_ratio = 0.0;
    std::string to_csv_row() const;
};

ExtensionReport extension_report(const VectorSampler& u, const BoundaryAtlas& atlas,
                                 double r);

}  // namespace patchlab::ext
