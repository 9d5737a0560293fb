#pragma once

#include <functional>
#include <string>
#include <vector>

#include "patchlab/domain.hpp"
#include "patchlab/grid.hpp"
#include "patchlab/vec.hpp"

namespace patchlab::patch {

using ScalarFn = std::function<double(const Vec3&)>;
using VectorFn = std::function<Vec3(const Vec3&)>;

/// C^{1+r} level set describing the patch support {f_P < 0}.
struct LevelSet {
    enum class Kind { Circle, Ellipse, Sphere };
    Kind kind = Kind::Circle;
    Vec3 center;
    double a = 0.5, b = 0.5;  // semi-axes (circle/sphere use a)

    double value(const Vec3& p) const;
    Vec3 gradient(const Vec3& p) const;
    Vec3 unit_normal(const Vec3& p) const { return normalized(gradient(p)); }
    Vec3 boundary_point(int i, int count) const;
    std::vector<Vec3> boundary_samples(int count) const;
    double typical_gradient() const;  // median |grad f| over boundary samples
};

/// Vortex patch data: support level set plus smooth interior/exterior
/// profiles.  Planar mode carries a scalar vorticity; 3-D mode a vector one.
struct VortexPatch {
    LevelSet support;
    double r = 0.5;  // Holder exponent of the data
    bool planar = true;
    ScalarFn omega_i_s, omega_e_s;
    VectorFn omega_i_v, omega_e_v;

    bool inside(const Vec3& p) const { return support.value(p) < 0.0; }
    double omega_scalar(const Vec3& p) const {
        return inside(p) ? omega_i_s(p) : omega_e_s(p);
    }
    Vec3 omega_vector(const Vec3& p) const {
        return inside(p) ? omega_i_v(p) : omega_e_v(p);
    }
    ScalarField sample_scalar(const Grid& g) const;
    VectorField sample_vector(const Grid& g) const;
    ScalarField indicator(const Grid& g) const;
};

/// min |grad f_P| over boundary samples (must stay >= 0.1), and for 3-D
/// patches the normal jump of the profiles across the patch boundary
/// (zero-flux divergence compatibility).
struct PatchValidation {
    double min_grad = 0.0;
    double max_normal_jump = 0.0;
    double boundary_clearance = 0.0;  // min delta over patch boundary samples
};
PatchValidation validate_patch(const VortexPatch& patch, const Domain& domain);

/// Tangent vector-field system W = {w^nu} with its Holder exponent.
struct TangentSystem {
    std::vector<VectorFn> fields;
    double s = 0.5;
    int size() const { return static_cast<int>(fields.size()); }
};

/// [W]^{-1}(x) = {2/(N'(N'-1)) sum_{mu<nu} |w^mu x w^nu|^2}^{-1/4} from the
/// field values at one point.
double admissibility_at(const std::vector<Vec3>& w_values);

struct AdmissibilityResult {
    ScalarField field;   // [W]^{-1} on grid nodes inside Omega (0 elsewhere)
    double sup = 0.0;    // sup over Omega
    bool degenerate = false;  // some node had all cross products ~ 0
};
AdmissibilityResult admissibility(const TangentSystem& W, const Grid& g, const Domain& dom);

/// P-regular system for an interior patch: level-set tangent fields blended
/// through interior constants into domain-tangent fields near the boundary.
/// Planar mode emits {blend, e3, midfield}; 3-D emits three blended fields
/// plus two cut-off constants.
TangentSystem tangent_system_from_levelset(const VortexPatch& patch, const Domain& domain,
                                           const Grid& grid);

/// Smooth unit field equal to the patch normal on the patch boundary and to
/// the domain normal on the domain boundary.
VectorFn patch_normal_field(const VortexPatch& patch, const Domain& domain, const Grid& grid);

/// Conormal derivative <grad, w (x) omega_0> = sum_i d_i(w^i omega_0),
/// assembled through the Bony split of w chi_P against each profile, with
/// the norm bound of the tangential-regularity estimate.
struct ConormalReport {
    ScalarField value_s;            // planar mode value
    VectorField value_v;            // 3-D mode value
    double csm1_norm = 0.0;         // raw C^{s-1} norm of the sampled value
    double csm1_estimate = 0.0;     // proof-split estimator (see below)
    double rhs_bracket = 0.0;       // ||w||_inf(||o_i||_s+||o_e||_s) + ||o||_inf ||w||_s
    double ratio = 0.0;             // empirical constant csm1_estimate / bracket
    double tangency_residual = 0.0; // sup |w.n_P| / ||w||_inf on patch boundary
    double para_low_high = 0.0;     // sum_i ||T_{a_i} b + R(a_i, b)||_{C^s}
    double para_high_low = 0.0;     // sum_i ||d_i T_b a_i||_{C^{s-1}}
};

/// Stable C^{s-1} estimator of ||sum_i d_i(a_i b)|| through the Bony pieces,
/// with div(a) replaced by the Gauss-Green identity value chi * div(w):
///
///   || sum_i (T_{a_i} b + R(a_i, b)) ||_{C^s}
///   + || sum_i T_{d_i b} a_i ||_{C^{s-1}} + || T_b (chi div w) ||_{C^{s-1}}.
///
/// The raw spectral norm of the sharply sampled value grows like h^{-s}
/// (the sampled indicator's surface layer); the pieces do not.
double conormal_csm1_estimate(const std::vector<ScalarField>& a, const ScalarField& b,
                              const ScalarField& chi_div_w, double s);
ConormalReport conormal_derivative(const VectorFn& w, const VortexPatch& patch,
                                   const Grid& grid, double s, bool proof_split = true);

/// Surface-weighted C^{s-1} size of div(w chi_P) - chi_P div w: the Gauss-
/// Green pairing of the residual boundary measure (w.n_P) against the patch
/// boundary, scaled by the C^{s-1} norm of the discrete surface layer.
double tangency_identity_residual(const VectorFn& w, const VortexPatch& patch,
                                  const Grid& grid, double s);

/// C^{s-1} norm of sum_i d_i(w^i omega) assembled from sampled fields
/// (omega = b_in inside the indicator, b_out elsewhere); the lean path used
/// by the evolution diagnostics.
double conormal_norm_from_fields(const VectorField& w, const ScalarField& chi,
                                 const ScalarField& b_in, const ScalarField& b_out,
                                 double s);

}  // namespace patchlab::patch
