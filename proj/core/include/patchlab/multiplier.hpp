#pragma once

#include <vector>

#include "patchlab/grid.hpp"
#include "patchlab/rng.hpp"

namespace patchlab::lp {

/// One corpus entry of the characteristic-function multiplier census.
struct MultiplierSample {
    double ratio;          // ||chi_P f|| / ||f|| in B^s_{1,2}
    double low_high_part;  // ||T_chi f + R(chi, f)|| / ||f||  (regularity-blind piece)
    double high_low_part;  // ||T_f chi|| / ||f||              (boundary-geometry piece)
};

struct MultiplierCensus {
    double s = 0.0;
    double max_ratio = 0.0;
    double max_low_high = 0.0;
    double max_high_low = 0.0;
    std::vector<MultiplierSample> samples;
};

/// Ratio ||chi_P f||_{B^s_{1,2}} / ||f||_{B^s_{1,2}} for one field, plus the
/// paraproduct-wise breakdown chi*f = [T_chi f + R(chi,f)] + T_f chi.
MultiplierSample multiplier_ratio(const ScalarField& indicator, const ScalarField& f, double s);

/// Census over a corpus of random band-limited fields normalized in
/// B^s_{1,2}.  Throws if the indicator transitions within two cells of the
/// periodic box edge (wrap-around would fake boundary geometry).
MultiplierCensus indicator_multiplier_census(const ScalarField& indicator, double s,
                                             int corpus_size, Rng rng);

}  // namespace patchlab::lp
