#include "patchlab/lp.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "patchlab/spectral.hpp"

namespace patchlab::lp {

namespace {

// Smooth transition: 1 for t <= 0, 0 for t >= 1.
double smooth_step_down(double t) {
    if (t <= 0.0) return 1.0;
    if (t >= 1.0) return 0.0;
    const double a = std::exp(-1.0 / t);
    const double b = std::exp(-1.0 / (1.0 - t));
    return b / (a + b);
}

}  // namespace

double DyadicFilterBank::chi(double rho) {
    // 1 on [0, 2/3], 0 on [4/3, inf).
    return smooth_step_down((rho - 2.0 / 3.0) * 1.5);
}

DyadicFilterBank::DyadicFilterBank(const Grid& grid) : grid_(grid) {
    const double kmax_int = std::sqrt(static_cast<double>(grid.dim)) * (grid.n / 2);
    const double base = 2.0 * std::numbers::pi / grid.extent;
    const double ximax = base * kmax_int;
    // Smallest N with chi(ximax / 2^(N+1)) == 1, i.e. ximax / 2^(N+1) <= 2/3.
    int npow = 0;
    while (ximax / std::pow(2.0, npow + 1) > 2.0 / 3.0) ++npow;
    n_max_ = npow;

    max_k2_ = static_cast<long>(grid.dim) * (grid.n / 2) * (grid.n / 2);
    tables_.assign(n_max_ + 2, std::vector<double>(max_k2_ + 1, 0.0));

    // Consecutive low-pass partial sums; block q is their exact difference,
    // so the lattice partition of unity telescopes to chi(.) == 1.
    std::vector<double> s_prev(max_k2_ + 1), s_next(max_k2_ + 1);
    for (long k2 = 0; k2 <= max_k2_; ++k2)
        s_prev[k2] = chi(base * std::sqrt(static_cast<double>(k2)));
    tables_[0] = s_prev;  // Delta_{-1} = chi(D)
    for (int q = 0; q <= n_max_; ++q) {
        const double scale = base / std::pow(2.0, q + 1);
        for (long k2 = 0; k2 <= max_k2_; ++k2) {
            s_next[k2] = chi(scale * std::sqrt(static_cast<double>(k2)));
            tables_[q + 1][k2] = s_next[k2] - s_prev[k2];
        }
        std::swap(s_prev, s_next);
    }
}

double DyadicFilterBank::lowpass_symbol(int q, long k2) const {
    // S_q = sum_{m <= q-1} Delta_m = chi(xi / 2^q) by telescoping.
    const double base = 2.0 * std::numbers::pi / grid_.extent;
    return chi(base / std::pow(2.0, q) * std::sqrt(static_cast<double>(k2)));
}

const DyadicFilterBank& DyadicFilterBank::get(const Grid& grid) {
    static std::map<std::tuple<int, int, double>, DyadicFilterBank> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_tuple(grid.dim, grid.n, grid.extent);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, DyadicFilterBank(grid)).first;
    return it->second;
}

namespace {

long k2_of_index(const Grid& g, std::size_t idx) {
    int k[3];
    spectral::freq_of_index(g, idx, k);
    return static_cast<long>(k[0]) * k[0] + static_cast<long>(k[1]) * k[1] +
           static_cast<long>(k[2]) * k[2];
}

}  // namespace

LPSpectrum dyadic_blocks(const ScalarField& f) {
    const auto& bank = DyadicFilterBank::get(f.grid);
    spectral::Spectrum hat = spectral::forward(f);

    LPSpectrum out;
    out.grid = f.grid;
    out.n_max = bank.n_max();
    out.blocks.reserve(bank.block_count());

    spectral::Spectrum work(f.grid);
    for (int q = -1; q <= bank.n_max(); ++q) {
        for (std::size_t i = 0; i < hat.data.size(); ++i) {
            const double sym = bank.block_symbol(q, k2_of_index(f.grid, i));
            work.data[i] = sym == 0.0 ? std::complex<double>{0.0, 0.0} : hat.data[i] * sym;
        }
        out.blocks.push_back(spectral::inverse(work));
    }
    return out;
}

ScalarField LPSpectrum::reconstruct() const {
    ScalarField f(grid);
    for (const auto& b : blocks)
        for (std::size_t i = 0; i < f.data.size(); ++i) f.data[i] += b.data[i];
    return f;
}

namespace {

double block_lp_norm(const ScalarField& b, int p) {
    const double meas = std::pow(b.grid.h, b.grid.dim);
    if (p == 0) return max_abs(b);
    if (p == 1) {
        double s = 0.0, c = 0.0;
        for (double v : b.data) {
            const double y = std::abs(v) - c;
            const double t = s + y;
            c = (t - s) - y;
            s = t;
        }
        return meas * s;
    }
    // p == 2
    double s = 0.0, c = 0.0;
    for (double v : b.data) {
        const double y = v * v - c;
        const double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    return std::sqrt(meas * s);
}

}  // namespace

NormReport besov_report(const ScalarField& f, double s, int p, int q) {
    if ((p != 0 && p != 1 && p != 2) || (q != 0 && q != 1 && q != 2))
        throw std::invalid_argument("besov_report: p, q must be 1, 2 or inf(0)");
    if (!(s > -2.0 && s < 2.0))
        throw std::invalid_argument("besov_report: s must lie in (-2, 2)");

    NormReport rep;
    rep.s = s;
    rep.p = p;
    rep.q = q;
    rep.integer_order_flag = (s == std::floor(s));

    LPSpectrum lps = dyadic_blocks(f);
    for (int lev = -1; lev <= lps.n_max; ++lev) {
        const double bn = block_lp_norm(lps.block(lev), p);
        rep.levels.push_back({lev, bn, std::pow(2.0, lev * s) * bn});
    }
    if (q == 0) {
        for (const auto& L : rep.levels) rep.value = std::max(rep.value, L.weighted);
    } else if (q == 1) {
        for (const auto& L : rep.levels) rep.value += L.weighted;
    } else {
        double acc = 0.0;
        for (const auto& L : rep.levels) acc += L.weighted * L.weighted;
        rep.value = std::sqrt(acc);
    }
    return rep;
}

double besov_norm(const ScalarField& f, double s, int p, int q) {
    return besov_report(f, s, p, q).value;
}

double holder_norm(const ScalarField& f, double r) {
    return besov_report(f, r, 0, 0).value;
}

double holder_norm(const VectorField& f, double r) {
    double m = 0.0;
    for (const auto& c : f.comp) m = std::max(m, holder_norm(c, r));
    return m;
}

std::string NormReport::to_csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "level,block_norm,weighted\n";
    for (const auto& L : levels)
        os << L.level << "," << L.block_norm << "," << L.weighted << "\n";
    os << "total," << value << ",\n";
    return os.str();
}

BonySplit bony_split(const ScalarField& a, const ScalarField& b) {
    if (!(a.grid == b.grid)) throw std::invalid_argument("bony_split: grid mismatch");
    LPSpectrum A = dyadic_blocks(a);
    LPSpectrum B = dyadic_blocks(b);
    const int nmax = A.n_max;
    const std::size_t sz = a.grid.size();

    BonySplit out{ScalarField(a.grid), ScalarField(a.grid), ScalarField(a.grid)};

    // Running partial sums S_{q-1} = sum_{m <= q-2} Delta_m.
    ScalarField Sa(a.grid), Sb(a.grid);
    for (int qq = 1; qq <= nmax; ++qq) {
        // After this update Sa = S_{q-1} a (levels -1 .. q-2).
        const ScalarField& add_a = A.block(qq - 2);
        const ScalarField& add_b = B.block(qq - 2);
        for (std::size_t i = 0; i < sz; ++i) {
            Sa.data[i] += add_a.data[i];
            Sb.data[i] += add_b.data[i];
        }
        const ScalarField& dqb = B.block(qq);
        const ScalarField& dqa = A.block(qq);
        for (std::size_t i = 0; i < sz; ++i) {
            out.T_ab.data[i] += Sa.data[i] * dqb.data[i];
            out.T_ba.data[i] += Sb.data[i] * dqa.data[i];
        }
    }
    for (int qa = -1; qa <= nmax; ++qa)
        for (int qb = std::max(-1, qa - 1); qb <= std::min(nmax, qa + 1); ++qb) {
            const ScalarField& da = A.block(qa);
            const ScalarField& db = B.block(qb);
            for (std::size_t i = 0; i < sz; ++i)
                out.R_ab.data[i] += da.data[i] * db.data[i];
        }
    return out;
}

ScalarField paraproduct(const ScalarField& a, const ScalarField& b) {
    return bony_split(a, b).T_ab;
}

ScalarField remainder(const ScalarField& a, const ScalarField& b) {
    return bony_split(a, b).R_ab;
}

double direct_holder_seminorm(const std::vector<double>& values,
                              const std::vector<Vec3>& points, double r) {
    if (values.size() != points.size())
        throw std::invalid_argument("direct_holder_seminorm: size mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            const double d = norm(points[i] - points[j]);
            if (d <= 0.0) continue;
            m = std::max(m, std::abs(values[i] - values[j]) / std::pow(d, r));
        }
    return m;
}

double boundary_holder_norm(const std::vector<double>& values,
                            const std::vector<Vec3>& points, double r) {
    double sup = 0.0;
    for (double v : values) sup = std::max(sup, std::abs(v));
    return sup + direct_holder_seminorm(values, points, r);
}

}  // namespace patchlab::lp
