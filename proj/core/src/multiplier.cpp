#include "patchlab/multiplier.hpp"

#include <cmath>
#include <stdexcept>

#include "patchlab/lp.hpp"
#include "patchlab/spectral.hpp"

namespace patchlab::lp {

namespace {

void require_interior_indicator(const ScalarField& chi) {
    const Grid& g = chi.grid;
    auto differs = [&](std::size_t a, std::size_t b) { return chi.data[a] != chi.data[b]; };
    // Reject transitions within two cells of the box edge along any axis.
    if (g.dim == 2) {
        for (int band = 0; band < 2; ++band)
            for (int t = 0; t < g.n; ++t) {
                for (int e : {band, g.n - 1 - band}) {
                    if (differs(g.index(e, t), g.index(e, (t + 1) % g.n)) ||
                        differs(g.index(t, e), g.index((t + 1) % g.n, e)))
                        throw std::invalid_argument(
                            "multiplier: patch support touches the periodic box edge");
                }
            }
    } else {
        for (int band = 0; band < 2; ++band)
            for (int a = 0; a < g.n; ++a)
                for (int b = 0; b < g.n; ++b)
                    for (int e : {band, g.n - 1 - band}) {
                        if (differs(g.index(e, a, b), g.index(e, (a + 1) % g.n, b)) ||
                            differs(g.index(a, e, b), g.index((a + 1) % g.n, e, b)) ||
                            differs(g.index(a, b, e), g.index((a + 1) % g.n, b, e)))
                            throw std::invalid_argument(
                                "multiplier: patch support touches the periodic box edge");
                    }
    }
}

ScalarField random_bandlimited_field(const Grid& g, Rng& rng, int kmax, double decay) {
    spectral::Spectrum s(g);
    int k[3];
    for (std::size_t i = 0; i < g.size(); ++i) {
        spectral::freq_of_index(g, i, k);
        const double k2 = double(k[0]) * k[0] + double(k[1]) * k[1] + double(k[2]) * k[2];
        if (k2 == 0.0 || k2 > double(kmax) * kmax) continue;
        const double amp = std::pow(k2, -decay / 2.0);
        s.data[i] = {amp * rng.gaussian(), amp * rng.gaussian()};
    }
    ScalarField f = spectral::inverse(s);
    const double scale = static_cast<double>(g.size()) / g.n;
    for (auto& v : f.data) v *= scale;
    return f;
}

}  // namespace

MultiplierSample multiplier_ratio(const ScalarField& indicator, const ScalarField& f,
                                  double s) {
    if (!(indicator.grid == f.grid))
        throw std::invalid_argument("multiplier_ratio: grid mismatch");
    const double nf = besov_norm(f, s, 1, 2);
    if (nf == 0.0) throw std::invalid_argument("multiplier_ratio: zero field");

    ScalarField prod(f.grid);
    for (std::size_t i = 0; i < f.data.size(); ++i)
        prod.data[i] = indicator.data[i] * f.data[i];

    BonySplit split = bony_split(indicator, f);
    ScalarField low_high(f.grid);
    for (std::size_t i = 0; i < f.data.size(); ++i)
        low_high.data[i] = split.T_ab.data[i] + split.R_ab.data[i];

    MultiplierSample out;
    out.ratio = besov_norm(prod, s, 1, 2) / nf;
    out.low_high_part = besov_norm(low_high, s, 1, 2) / nf;
    out.high_low_part = besov_norm(split.T_ba, s, 1, 2) / nf;
    return out;
}

MultiplierCensus indicator_multiplier_census(const ScalarField& indicator, double s,
                                             int corpus_size, Rng rng) {
    if (!(s > 0.0 && s < 1.0))
        throw std::invalid_argument("multiplier census: s must lie in (0,1)");
    require_interior_indicator(indicator);

    MultiplierCensus census;
    census.s = s;
    Rng corpus = rng.stream("multiplier-corpus");
    const int kmax = indicator.grid.n / 3;
    for (int m = 0; m < corpus_size; ++m) {
        Rng draw = corpus.stream("field-" + std::to_string(m));
        ScalarField f = random_bandlimited_field(indicator.grid, draw, kmax, s + 1.0);
        MultiplierSample sample = multiplier_ratio(indicator, f, s);
        census.max_ratio = std::max(census.max_ratio, sample.ratio);
        census.max_low_high = std::max(census.max_low_high, sample.low_high_part);
        census.max_high_low = std::max(census.max_high_low, sample.high_low_part);
        census.samples.push_back(sample);
    }
    return census;
}

}  // namespace patchlab::lp
