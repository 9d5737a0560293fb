#pragma once

#include <string>
#include <vector>

#include "patchlab/grid.hpp"
#include "patchlab/vec.hpp"

namespace patchlab::lp {

/// Dyadic filter bank over the discrete frequency lattice of one grid.
///
/// The radial low-pass chi equals 1 for |xi| <= 2/3 and 0 for |xi| >= 4/3;
/// annulus symbols are built by telescoping,
///
///   phi_q(xi) = chi(xi / 2^(q+1)) - chi(xi / 2^q),
///
/// so the partition of unity chi + sum_q phi_q = chi(xi / 2^(Nmax+1)) = 1
/// holds at every lattice frequency by construction, and blocks two or more
/// levels apart have disjoint symbol support.
class DyadicFilterBank {
  public:
    explicit DyadicFilterBank(const Grid& grid);

    const Grid& grid() const { return grid_; }
    int n_max() const { return n_max_; }
    int block_count() const { return n_max_ + 2; }  // Delta_{-1} .. Delta_{Nmax}

    /// Symbol of block Delta_q (q = -1..n_max) at squared integer frequency k2.
    double block_symbol(int q, long k2) const { return tables_[q + 1][k2]; }

    /// Symbol of the partial-sum operator S_q = sum_{m <= q-1} Delta_m.
    double lowpass_symbol(int q, long k2) const;

    /// Smooth radial low-pass profile (1 near 0, support in a ball).
    static double chi(double rho);

    /// Shared per-grid instance.
    static const DyadicFilterBank& get(const Grid& grid);

  private:
    Grid grid_;
    int n_max_ = 0;
    long max_k2_ = 0;
    std::vector<std::vector<double>> tables_;  // [q+1][k2]
};

/// The family {Delta_q f}, q = -1..n_max, of dyadic blocks.
struct LPSpectrum {
    Grid grid;
    int n_max = 0;
    std::vector<ScalarField> blocks;  // blocks[q+1] = Delta_q f

    const ScalarField& block(int q) const { return blocks[q + 1]; }

    ScalarField reconstruct() const;
};

LPSpectrum dyadic_blocks(const ScalarField& f);

/// One row per level of a Besov-type norm evaluation.
struct NormReport {
    double s = 0.0;
    int p = 0, q = 0;  // 0 encodes infinity
    bool integer_order_flag = false;  // s integral: C^s_* computed, plain C^s differs
    struct Level {
        int level;
        double block_norm;  // ||Delta_q f||_{L^p}
        double weighted;    // 2^{qs} * block_norm
    };
    std::vector<Level> levels;
    double value = 0.0;

    std::string to_csv() const;
};

/// Holder norm ||f||_{C^r_*} = sup_q 2^{qr} ||Delta_q f||_inf.
double holder_norm(const ScalarField& f, double r);

/// Besov norm with p, q in {1, 2, inf} (pass 0 for inf); s in (-2, 2).
/// L^p block norms carry the grid measure h^dim.
double besov_norm(const ScalarField& f, double s, int p, int q);
NormReport besov_report(const ScalarField& f, double s, int p, int q);

/// Holder norm of a vector field: max over components.
double holder_norm(const VectorField& f, double r);

/// Bony paraproduct T_a b = sum_q S_{q-1}a * Delta_q b, with
/// S_{q-1} = sum_{m <= q-2} Delta_m.
ScalarField paraproduct(const ScalarField& a, const ScalarField& b);

/// Bony remainder R(a,b) = sum_{|q-q'| <= 1} Delta_q a * Delta_{q'} b.
ScalarField remainder(const ScalarField& a, const ScalarField& b);

/// All three Bony pieces from one block decomposition (cheaper than three
/// separate calls; T_ab + T_ba + R == a*b pointwise up to reconstruction
/// roundoff).
struct BonySplit {
    ScalarField T_ab;
    ScalarField T_ba;
    ScalarField R_ab;
};
BonySplit bony_split(const ScalarField& a, const ScalarField& b);

/// Direct two-point Holder seminorm sup |f(x)-f(y)| / |x-y|^r over the given
/// sample pairs.  (The usual |x-y|^r denominator; r = 1 gives the Lipschitz
/// seminorm.)
double direct_holder_seminorm(const std::vector<double>& values,
                              const std::vector<Vec3>& points, double r);

/// sup |g| + direct seminorm over boundary samples (chordal distances).
double boundary_holder_norm(const std::vector<double>& values,
                            const std::vector<Vec3>& points, double r);

}  // namespace patchlab::lp
