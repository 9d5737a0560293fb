#pragma once

#include <complex>
#include <vector>

#include "patchlab/domain.hpp"
#include "patchlab/extension.hpp"
#include "patchlab/grid.hpp"
#include "patchlab/patch.hpp"
#include "patchlab/rng.hpp"

namespace patchlab::bs {

/// Periodic symbol route: vhat = i k x what / |k|^2, zero mean mode.
/// In 3-D every vorticity component must have zero mean (periodic
/// solvability); 2-D scalar mode subtracts the mean (curl v = w - mean).
VectorField bs_periodic(const VectorField& omega);
VectorField bs_periodic(const ScalarField& omega_z);

/// Free-space Biot-Savart: discrete convolution with the gradient of the
/// Laplacian's fundamental solution on a zero-padded (doubled) grid, so the
/// result carries no periodic images.  Vorticity support must clear the box
/// edge by >= 4h.
VectorField bs_free(const ScalarField& omega_z);
VectorField bs_free(const VectorField& omega);

/// Fourier multiplier Lambda^sigma, lambda(xi) = sqrt(chi(xi) + |xi|^2) with
/// the filter-bank low-pass chi (positive, = 1 near 0).
double lambda_symbol(double rho);
ScalarField lambda_apply(const ScalarField& f, double sigma);

/// Harmonic Neumann correction in the disk: alpha with Laplace(alpha) = 0,
/// d(alpha)/dn = g on the boundary, via the boundary Fourier series.  The
/// complex power series is evaluated by Horner at arbitrary interior points.
class DiskCorrection {
  public:
    DiskCorrection() = default;
    DiskCorrection(Vec3 center, double R, std::vector<std::complex<double>> series_coef)
        : center_(center), R_(R), coef_(std::move(series_coef)) {}

    Vec3 grad(const Vec3& p) const;
    /// Hessian entries (xx, xy, yy) of alpha; alpha is harmonic so yy = -xx.
    void grad_hessian(const Vec3& p, Vec3& grad_out, double& axx, double& axy) const;

  private:
    Vec3 center_;
    double R_ = 1.0;
    std::vector<std::complex<double>> coef_;  // b_m, m >= 1
};

/// Fit the series from M uniform boundary samples of g = vbar.n; throws if
/// the compatibility integral (mean of g) exceeds tol.
DiskCorrection solve_disk_neumann(const std::vector<double>& g_samples, const Domain& dom,
                                  double mean_tol = 1e-8);

/// Ball analogue via real spherical harmonics on a Gauss-Legendre x uniform
/// longitude quadrature grid; gradients by small central differences.
class BallCorrection {
  public:
    BallCorrection() = default;
    BallCorrection(Vec3 center, double R, int lmax, std::vector<double> coef)
        : center_(center), R_(R), lmax_(lmax), coef_(std::move(coef)) {}

    double alpha(const Vec3& p) const;
    Vec3 grad(const Vec3& p) const;

    static int coef_count(int lmax) { return (lmax + 1) * (lmax + 1); }

  private:
    Vec3 center_;
    double R_ = 1.0;
    int lmax_ = 0;
    std::vector<double> coef_;  // packed (l, m) real-harmonic coefficients
};

BallCorrection solve_ball_neumann(const ext::VectorSampler& vbar, const Domain& dom,
                                  int lmax = 14, double mean_tol = 1e-6);

/// Velocity reconstructed from vorticity in a bounded domain:
/// v = vbar|_Omega - grad(alpha).
struct VelocitySolution {
    Grid grid;
    Domain domain;
    bool planar = true;
    VectorField vbar;        // free-space field on the whole box
    DiskCorrection disk;
    BallCorrection ball;

    Vec3 velocity_at(const Vec3& p) const;      // cubic vbar sample - grad alpha
    Vec3 vbar_at(const Vec3& p) const;
    Vec3 correction_grad(const Vec3& p) const;

    /// Eulerian velocity on grid nodes (zero outside closure(Omega)).
    VectorField velocity_field() const;

    /// Max |v.n| over `count` boundary samples.
    double boundary_normal_residual(int count = 512) const;
};

/// 2-D pipeline: scalar vorticity (trusted inside Omega, masked to the
/// closure), free-space solve, disk Neumann correction.
VelocitySolution velocity_from_vorticity(const ScalarField& omega, const Domain& dom);

/// 3-D pipeline: divergence-free extension of the vorticity through the
/// atlas (extend_Pdiv), free-space solve, ball correction.
VelocitySolution velocity_from_vorticity(const ext::VectorSampler& omega,
                                         const ext::BoundaryAtlas& atlas);

/// Kinetic energy (1/2) int_Omega |v|^2.
double kinetic_energy(const VectorField& v, const Domain& dom);

/// Static log-Lipschitz estimate assembly.
struct StaticReport {
    double v_lip_grid = 0.0;    // sup-norm of the velocity gradient on nodes
    double v_lip_pairs = 0.0;   // two-point seminorm over random interior pairs
    double omega_sup = 0.0;
    double winv_sup = 0.0;      // ||[W]^{-1}||_inf
    double sum_w_cr = 0.0;      // sum_nu ||w^nu||_{C^r}
    double sum_conormal = 0.0;  // sum_nu ||<grad, w^nu (x) omega>||_{C^{r-1}}
    double omega_n_cr = 0.0;    // ||omega.n||_{C^r(boundary)}
    double X = 1.0;
    double log_ratio = 0.0;     // ||v||_Lip / ((1+||omega||_inf) ln(e+X))
    double grad_v_holder = 0.0; // [grad v]^{Omega'}_r
    double omega_holder = 0.0;  // [omega]^{Omega'}_r
    double x20_margin = 0.0;    // ([grad v]_r - [omega]_r) / X^20 (clamped)

    std::string csv_header() const;
    std::string csv_row(double t) const;
};

StaticReport static_estimate_report(const VelocitySolution& vel, const ScalarField& omega,
                                    const patch::TangentSystem& W,
                                    const patch::VortexPatch& pat, const Domain& dom,
                                    double r, Rng rng);

}  // namespace patchlab::bs
