#include "patchlab/axisym.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace patchlab::axi {

using std::numbers::pi;

MeridianFlow::MeridianFlow(int nr, int nz, double R, double H,
                           const std::function<double(double, double)>& q0)
    : nr_(nr), nz_(nz), R_(R), H_(H), hr_(R / nr), hz_(H / nz) {
    if (nr < 8 || nz < 8) throw std::invalid_argument("MeridianFlow: grid too small");
    q_.assign(static_cast<std::size_t>(nr_ + 1) * (nz_ + 1), 0.0);
    for (int i = 0; i <= nr_; ++i)
        for (int j = 0; j <= nz_; ++j) q_[idx(i, j)] = q0(i * hr_, j * hz_);
    psi_.assign(q_.size(), 0.0);
    ur_.assign(q_.size(), 0.0);
    uz_.assign(q_.size(), 0.0);
    solve_stream();
}

void MeridianFlow::solve_stream() {
    // (d_rr - (1/r) d_r + d_zz) psi = -r^2 q, psi = 0 on all edges.
    const int mi = nr_ - 1, mj = nz_ - 1;  // interior sizes
    // DST-I in z by direct summation (meridian grids are small).
    std::vector<double> rhs_hat(static_cast<std::size_t>(mi) * mj, 0.0);
    for (int i = 1; i <= mi; ++i) {
        const double r = i * hr_;
        for (int m = 1; m <= mj; ++m) {
            double acc = 0.0;
            for (int j = 1; j <= mj; ++j)
                acc += -r * r * q_[idx(i, j)] * std::sin(pi * j * m / nz_);
            rhs_hat[static_cast<std::size_t>(i - 1) * mj + (m - 1)] = acc * 2.0 / nz_;
        }
    }
    // Tridiagonal solve in r for each z mode.
    std::vector<double> psi_hat(rhs_hat.size(), 0.0);
    std::vector<double> a(mi), b(mi), c(mi), d(mi);
    for (int m = 1; m <= mj; ++m) {
        const double lam = -4.0 * std::pow(std::sin(0.5 * pi * m / nz_), 2) / (hz_ * hz_);
        for (int i = 1; i <= mi; ++i) {
            const double r = i * hr_;
            a[i - 1] = 1.0 / (hr_ * hr_) + 1.0 / (2.0 * r * hr_);
            b[i - 1] = -2.0 / (hr_ * hr_) + lam;
            c[i - 1] = 1.0 / (hr_ * hr_) - 1.0 / (2.0 * r * hr_);
            d[i - 1] = rhs_hat[static_cast<std::size_t>(i - 1) * mj + (m - 1)];
        }
        // Thomas algorithm.
        for (int i = 1; i < mi; ++i) {
            const double f = a[i] / b[i - 1];
            b[i] -= f * c[i - 1];
            d[i] -= f * d[i - 1];
        }
        double prev = d[mi - 1] / b[mi - 1];
        psi_hat[static_cast<std::size_t>(mi - 1) * mj + (m - 1)] = prev;
        for (int i = mi - 2; i >= 0; --i) {
            prev = (d[i] - c[i] * prev) / b[i];
            psi_hat[static_cast<std::size_t>(i) * mj + (m - 1)] = prev;
        }
    }
    // Inverse DST.
    std::fill(psi_.begin(), psi_.end(), 0.0);
    for (int i = 1; i <= mi; ++i)
        for (int j = 1; j <= mj; ++j) {
            double acc = 0.0;
            for (int m = 1; m <= mj; ++m)
                acc += psi_hat[static_cast<std::size_t>(i - 1) * mj + (m - 1)] *
                       std::sin(pi * j * m / nz_);
            psi_[idx(i, j)] = acc;
        }

    // Velocities u_r = -psi_z / r, u_z = psi_r / r (axis limit by Taylor).
    for (int i = 0; i <= nr_; ++i)
        for (int j = 0; j <= nz_; ++j) {
            const double r = i * hr_;
            double psz = 0.0, psr = 0.0;
            if (j > 0 && j < nz_) psz = (psi_[idx(i, j + 1)] - psi_[idx(i, j - 1)]) / (2 * hz_);
            if (i > 0 && i < nr_) psr = (psi_[idx(i + 1, j)] - psi_[idx(i - 1, j)]) / (2 * hr_);
            if (i == 0) {
                ur_[idx(i, j)] = 0.0;
                uz_[idx(i, j)] = 2.0 * psi_[idx(1, j)] / (hr_ * hr_);
            } else {
                ur_[idx(i, j)] = -psz / r;
                uz_[idx(i, j)] = psr / r;
            }
        }
}

double MeridianFlow::sample_q(double r, double z) const {
    // Clamped bicubic on the rectangle; never exceeds the local data range,
    // so max|q| cannot grow under transport.
    const double x = std::clamp(r / hr_, 0.0, double(nr_));
    const double y = std::clamp(z / hz_, 0.0, double(nz_));
    const int i0 = std::clamp(static_cast<int>(std::floor(x)), 0, nr_ - 1);
    const int j0 = std::clamp(static_cast<int>(std::floor(y)), 0, nz_ - 1);
    const double tx = x - i0, ty = y - j0;
    auto at = [&](int i, int j) {
        return q_[idx(std::clamp(i, 0, nr_), std::clamp(j, 0, nz_))];
    };
    auto cr = [](double fm1, double f0, double f1, double f2, double t) {
        const double a = -0.5 * fm1 + 1.5 * f0 - 1.5 * f1 + 0.5 * f2;
        const double b = fm1 - 2.5 * f0 + 2.0 * f1 - 0.5 * f2;
        const double c = 0.5 * (f1 - fm1);
        return ((a * t + b) * t + c) * t + f0;
    };
    double rows[4];
    for (int d = -1; d <= 2; ++d)
        rows[d + 1] = cr(at(i0 + d, j0 - 1), at(i0 + d, j0), at(i0 + d, j0 + 1),
                         at(i0 + d, j0 + 2), ty);
    double v = cr(rows[0], rows[1], rows[2], rows[3], tx);
    const double lo = std::min({at(i0, j0), at(i0 + 1, j0), at(i0, j0 + 1), at(i0 + 1, j0 + 1)});
    const double hi = std::max({at(i0, j0), at(i0 + 1, j0), at(i0, j0 + 1), at(i0 + 1, j0 + 1)});
    return std::clamp(v, lo, hi);
}

void MeridianFlow::velocity_at(double r, double z, double& vr, double& vz) const {
    const double x = std::clamp(r / hr_, 0.0, double(nr_));
    const double y = std::clamp(z / hz_, 0.0, double(nz_));
    const int i0 = std::clamp(static_cast<int>(std::floor(x)), 0, nr_ - 1);
    const int j0 = std::clamp(static_cast<int>(std::floor(y)), 0, nz_ - 1);
    const double tx = x - i0, ty = y - j0;
    auto lerp = [&](const std::vector<double>& f) {
        return (1 - tx) * ((1 - ty) * f[idx(i0, j0)] + ty * f[idx(i0, j0 + 1)]) +
               tx * ((1 - ty) * f[idx(i0 + 1, j0)] + ty * f[idx(i0 + 1, j0 + 1)]);
    };
    vr = lerp(ur_);
    vz = lerp(uz_);
}

double MeridianFlow::cfl_dt() const {
    double vmax = 1e-300;
    for (std::size_t k = 0; k < ur_.size(); ++k)
        vmax = std::max(vmax, std::hypot(ur_[k], uz_[k]));
    return 0.5 * std::min(hr_, hz_) / vmax;
}

void MeridianFlow::step(double dt) {
    if (dt > cfl_dt() * 2.0 + 1e-14)
        throw std::runtime_error("MeridianFlow: CFL violation");
    std::vector<double> qnew(q_.size(), 0.0);
    for (int i = 0; i <= nr_; ++i)
        for (int j = 0; j <= nz_; ++j) {
            const double r = i * hr_, z = j * hz_;
            // RK4 backtrace through the frozen stage field.
            double v1r, v1z, v2r, v2z, v3r, v3z, v4r, v4z;
            velocity_at(r, z, v1r, v1z);
            velocity_at(r - 0.5 * dt * v1r, z - 0.5 * dt * v1z, v2r, v2z);
            velocity_at(r - 0.5 * dt * v2r, z - 0.5 * dt * v2z, v3r, v3z);
            velocity_at(r - dt * v3r, z - dt * v3z, v4r, v4z);
            const double br = r - dt / 6.0 * (v1r + 2 * v2r + 2 * v3r + v4r);
            const double bz = z - dt / 6.0 * (v1z + 2 * v2z + 2 * v3z + v4z);
            qnew[idx(i, j)] = sample_q(br, bz);
        }
    q_ = std::move(qnew);
    solve_stream();
    t_ += dt;
}

double MeridianFlow::omega_sup() const {
    double m = 0.0;
    for (int i = 0; i <= nr_; ++i)
        for (int j = 0; j <= nz_; ++j) m = std::max(m, std::abs(q_[idx(i, j)] * (i * hr_)));
    return m;
}

double MeridianFlow::q_sup() const {
    double m = 0.0;
    for (double v : q_) m = std::max(m, std::abs(v));
    return m;
}

double MeridianFlow::velocity_lip() const {
    double m = 0.0;
    for (int i = 1; i < nr_; ++i)
        for (int j = 1; j < nz_; ++j) {
            m = std::max({m, std::abs(ur_[idx(i + 1, j)] - ur_[idx(i - 1, j)]) / (2 * hr_),
                          std::abs(ur_[idx(i, j + 1)] - ur_[idx(i, j - 1)]) / (2 * hz_),
                          std::abs(uz_[idx(i + 1, j)] - uz_[idx(i - 1, j)]) / (2 * hr_),
                          std::abs(uz_[idx(i, j + 1)] - uz_[idx(i, j - 1)]) / (2 * hz_)});
        }
    return m;
}

}  // namespace patchlab::axi
