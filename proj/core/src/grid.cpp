#include "patchlab/grid.hpp"

#include <cmath>

namespace patchlab {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

Grid build_grid(int dim, double extent, int n) {
    if (dim != 2 && dim != 3)
        throw std::invalid_argument("build_grid: dim must be 2 or 3");
    if (!is_power_of_two(n) || n < 8)
        throw std::invalid_argument("build_grid: points per axis must be a power of two >= 8");
    if (!(extent > 0.0))
        throw std::invalid_argument("build_grid: extent must be positive");
    Grid g;
    g.dim = dim;
    g.n = n;
    g.extent = extent;
    g.h = extent / n;
    return g;
}

double max_abs(const ScalarField& f) {
    double m = 0.0;
    for (double v : f.data) m = std::max(m, std::abs(v));
    return m;
}

double max_norm(const VectorField& f) {
    double m = 0.0;
    const std::size_t sz = f.grid.size();
    for (std::size_t i = 0; i < sz; ++i) m = std::max(m, norm(f.at(i)));
    return m;
}

bool all_finite(const ScalarField& f) {
    for (double v : f.data)
        if (!std::isfinite(v)) return false;
    return true;
}

bool all_finite(const VectorField& f) {
    for (const auto& c : f.comp)
        if (!all_finite(c)) return false;
    return true;
}

double stable_sum(const std::vector<double>& v) {
    double s = 0.0, c = 0.0;
    for (double x : v) {
        const double y = x - c;
        const double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    return s;
}

}  // namespace patchlab
