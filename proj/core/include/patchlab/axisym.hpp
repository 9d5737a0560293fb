#pragma once

#include <functional>
#include <vector>

#include "patchlab/vec.hpp"

namespace patchlab::axi {

/// Axisymmetric Euler flow on the meridian rectangle (r, z) in
/// [0, R] x [0, H], streamfunction form:
///
///   u_r = -psi_z / r,  u_z = psi_r / r,
///   (d_rr - (1/r) d_r + d_zz) psi = -r * omega_theta,
///
/// psi = 0 on the axis and on the container walls.  The transported
/// invariant is q = omega_theta / r (the swirl-free vortex-ring system).
class MeridianFlow {
  public:
    /// q0(r, z) = initial omega_theta / r; must vanish near the walls.
    MeridianFlow(int nr, int nz, double R, double H,
                 const std::function<double(double, double)>& q0);

    double time() const { return t_; }
    int nr() const { return nr_; }
    int nz() const { return nz_; }
    double q(int i, int j) const { return q_[idx(i, j)]; }

    double cfl_dt() const;
    void step(double dt);  // semi-Lagrangian RK4 backtrace, clamped cubic

    double omega_sup() const;       // max |q * r|
    double q_sup() const;           // max |q| = ||omega/delta||_inf
    double max_radius() const { return R_; }
    double velocity_lip() const;    // FD gradient sup of (u_r, u_z)

  private:
    int nr_, nz_;
    double R_, H_, hr_, hz_;
    double t_ = 0.0;
    std::vector<double> q_;            // transported invariant on nodes
    std::vector<double> psi_, ur_, uz_;

    std::size_t idx(int i, int j) const { return static_cast<std::size_t>(i) * nz_ + j; }
    void solve_stream();               // DST in z, tridiagonal in r
    double sample_q(double r, double z) const;
    void velocity_at(double r, double z, double& vr, double& vz) const;
};

}  // namespace patchlab::axi
