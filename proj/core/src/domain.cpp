#include "patchlab/domain.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace patchlab {

namespace {

Domain make_round_domain(const Grid& grid, double R, int dim) {
    if (grid.dim != dim)
        throw std::invalid_argument("domain: grid dimension mismatch");
    if (!(R > 0.0))
        throw std::invalid_argument("domain: radius must be positive");
    if (R + 4.0 * grid.h >= 0.5 * grid.extent)
        throw std::invalid_argument(
            "domain: must fit strictly inside the periodic box with margin >= 4h");
    Domain d;
    d.dim = dim;
    d.center = grid.center();
    d.radius = R;
    d.box_extent = grid.extent;
    return d;
}

}  // namespace

Domain domain_disk(const Grid& grid, double R) { return make_round_domain(grid, R, 2); }
Domain domain_ball(const Grid& grid, double R) { return make_round_domain(grid, R, 3); }

Vec3 Domain::boundary_point(int i, int count) const {
    using std::numbers::pi;
    if (dim == 2) {
        const double th = 2.0 * pi * i / count;
        return center + Vec3{radius * std::cos(th), radius * std::sin(th), 0.0};
    }
    // Fibonacci sphere: near-uniform, deterministic.
    const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
    const double zk = 1.0 - (2.0 * i + 1.0) / count;
    const double rk = std::sqrt(std::max(0.0, 1.0 - zk * zk));
    const double th = 2.0 * pi * i / golden;
    return center + radius * Vec3{rk * std::cos(th), rk * std::sin(th), zk};
}

std::vector<Vec3> Domain::boundary_samples(int count) const {
    std::vector<Vec3> pts;
    pts.reserve(count);
    for (int i = 0; i < count; ++i) pts.push_back(boundary_point(i, count));
    return pts;
}

}  // namespace patchlab
