#include "patchlab/patch.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "patchlab/lp.hpp"
#include "patchlab/spectral.hpp"

namespace patchlab::patch {

using std::numbers::pi;

namespace {

double bump1(double t) {
    t = std::abs(t);
    if (t >= 1.0) return 0.0;
    if (t <= 0.0) return 1.0;
    const double a = std::exp(-1.0 / (1.0 - t));
    const double b = std::exp(-1.0 / t);
    return a / (a + b);
}

double step1(double t) { return 1.0 - bump1(std::clamp(t, 0.0, 1.0)); }

Vec3 node_point(const Grid& g, std::size_t idx) {
    if (g.dim == 2) return g.node(static_cast<int>(idx / g.n), static_cast<int>(idx % g.n));
    const int k = static_cast<int>(idx % g.n);
    const int j = static_cast<int>((idx / g.n) % g.n);
    const int i = static_cast<int>(idx / (static_cast<std::size_t>(g.n) * g.n));
    return g.node(i, j, k);
}

}  // namespace

double LevelSet::value(const Vec3& p) const {
    const Vec3 q = p - center;
    switch (kind) {
        case Kind::Circle: return q.x * q.x + q.y * q.y - a * a;
        case Kind::Sphere: return dot(q, q) - a * a;
        case Kind::Ellipse:
            return (q.x / a) * (q.x / a) + (q.y / b) * (q.y / b) - 1.0;
    }
    return 0.0;
}

Vec3 LevelSet::gradient(const Vec3& p) const {
    const Vec3 q = p - center;
    switch (kind) {
        case Kind::Circle: return {2.0 * q.x, 2.0 * q.y, 0.0};
        case Kind::Sphere: return 2.0 * q;
        case Kind::Ellipse: return {2.0 * q.x / (a * a), 2.0 * q.y / (b * b), 0.0};
    }
    return {};
}

Vec3 LevelSet::boundary_point(int i, int count) const {
    const double th = 2.0 * pi * i / count;
    switch (kind) {
        case Kind::Circle: return center + Vec3{a * std::cos(th), a * std::sin(th), 0.0};
        case Kind::Ellipse: return center + Vec3{a * std::cos(th), b * std::sin(th), 0.0};
        case Kind::Sphere: {
            const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
            const double zk = 1.0 - (2.0 * i + 1.0) / count;
            const double rk = std::sqrt(std::max(0.0, 1.0 - zk * zk));
            const double ph = 2.0 * pi * i / golden;
            return center + a * Vec3{rk * std::cos(ph), rk * std::sin(ph), zk};
        }
    }
    return center;
}

std::vector<Vec3> LevelSet::boundary_samples(int count) const {
    std::vector<Vec3> pts;
    pts.reserve(count);
    for (int i = 0; i < count; ++i) pts.push_back(boundary_point(i, count));
    return pts;
}

double LevelSet::typical_gradient() const {
    std::vector<double> mags;
    for (const Vec3& p : boundary_samples(128)) mags.push_back(norm(gradient(p)));
    std::nth_element(mags.begin(), mags.begin() + mags.size() / 2, mags.end());
    return mags[mags.size() / 2];
}

ScalarField VortexPatch::sample_scalar(const Grid& g) const {
    ScalarField f(g);
    for (std::size_t i = 0; i < g.size(); ++i) f.data[i] = omega_scalar(node_point(g, i));
    return f;
}

VectorField VortexPatch::sample_vector(const Grid& g) const {
    VectorField f(g, 3);
    for (std::size_t i = 0; i < g.size(); ++i) f.set(i, omega_vector(node_point(g, i)));
    return f;
}

ScalarField VortexPatch::indicator(const Grid& g) const {
    ScalarField f(g);
    for (std::size_t i = 0; i < g.size(); ++i)
        f.data[i] = inside(node_point(g, i)) ? 1.0 : 0.0;
    return f;
}

PatchValidation validate_patch(const VortexPatch& patch, const Domain& domain) {
    PatchValidation v;
    v.min_grad = 1e300;
    v.boundary_clearance = 1e300;
    const int M = domain.dim == 2 ? 512 : 2048;
    for (const Vec3& p : patch.support.boundary_samples(M)) {
        const Vec3 gf = patch.support.gradient(p);
        v.min_grad = std::min(v.min_grad, norm(gf));
        v.boundary_clearance = std::min(v.boundary_clearance, domain.boundary_distance(p));
        if (!patch.planar && patch.omega_i_v && patch.omega_e_v) {
            const Vec3 jump = patch.omega_i_v(p) - patch.omega_e_v(p);
            v.max_normal_jump =
                std::max(v.max_normal_jump, std::abs(dot(jump, normalized(gf))));
        }
    }
    if (v.min_grad < 0.1)
        throw std::invalid_argument("patch: level-set gradient degenerates on the boundary");
    return v;
}

double admissibility_at(const std::vector<Vec3>& w) {
    const int np = static_cast<int>(w.size());
    if (np < 2) throw std::invalid_argument("admissibility: need N' >= 2 fields");
    double acc = 0.0;
    for (int mu = 0; mu < np; ++mu)
        for (int nu = mu + 1; nu < np; ++nu) acc += norm2(cross(w[mu], w[nu]));
    acc *= 2.0 / (double(np) * (np - 1));
    return std::pow(acc, -0.25);
}

AdmissibilityResult admissibility(const TangentSystem& W, const Grid& g, const Domain& dom) {
    if (W.size() < 2) throw std::invalid_argument("admissibility: need N' >= 2 fields");
    AdmissibilityResult res;
    res.field = ScalarField(g);
    std::vector<Vec3> vals(W.size());
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
        const Vec3 p = node_point(g, idx);
        if (dom.delta(p) < 0.0) continue;
        for (int nu = 0; nu < W.size(); ++nu) vals[nu] = W.fields[nu](p);
        const double a = admissibility_at(vals);
        res.field.data[idx] = a;
        if (!std::isfinite(a) || a > 1e12) res.degenerate = true;
        res.sup = std::max(res.sup, a);
    }
    return res;
}

TangentSystem tangent_system_from_levelset(const VortexPatch& patch, const Domain& domain,
                                           const Grid& grid) {
    const PatchValidation val = validate_patch(patch, domain);
    if (val.boundary_clearance < 6.0 * grid.h)
        throw std::invalid_argument(
            "tangent system: patch boundary must clear the domain boundary by 6h");

    // Tube half-widths in level-set value / signed-distance units; the
    // spatial blend width is ~8h on the build grid, but never so wide that
    // the patch and domain tubes overlap.
    const double gscale = patch.support.typical_gradient();
    const double tube_p = std::min(8.0 * grid.h * gscale,
                                   0.45 * val.boundary_clearance * gscale);
    const double tube_d = std::min(8.0 * grid.h, 0.45 * val.boundary_clearance);

    const LevelSet ls = patch.support;
    const Domain dom = domain;

    auto c_patch = [ls, tube_p](const Vec3& p) { return bump1(ls.value(p) / tube_p); };
    auto c_domain = [dom, tube_d](const Vec3& p) { return bump1(dom.delta(p) / tube_d); };
    auto c_mid = [ls, dom, tube_p, tube_d](const Vec3& p) {
        const double fp = std::abs(ls.value(p)) / tube_p;
        const double fd = std::abs(dom.delta(p)) / tube_d;
        return step1((fp - 0.25) / 0.2) * step1((fd - 0.25) / 0.2);
    };

    TangentSystem W;
    W.s = patch.r;
    if (patch.planar) {
        W.fields.push_back([=](const Vec3& p) {
            const Vec3 t_p = cross(ls.gradient(p), Vec3{0, 0, 1});
            const Vec3 t_d = cross(dom.grad_delta(p), Vec3{0, 0, 1});
            return c_patch(p) * t_p + c_mid(p) * Vec3{1, 0, 0} + c_domain(p) * t_d;
        });
        W.fields.push_back([](const Vec3&) { return Vec3{0, 0, 1}; });
        W.fields.push_back([=](const Vec3& p) { return c_mid(p) * Vec3{0, 1, 0}; });
    } else {
        for (int i = 0; i < 3; ++i) {
            Vec3 ei;
            ei[i] = 1.0;
            W.fields.push_back([=](const Vec3& p) {
                return c_patch(p) * cross(ls.gradient(p), ei) + c_mid(p) * ei +
                       c_domain(p) * cross(dom.grad_delta(p), ei);
            });
        }
        for (int i = 0; i < 2; ++i) {
            Vec3 ei;
            ei[i] = 1.0;
            W.fields.push_back([=](const Vec3& p) { return c_mid(p) * ei; });
        }
    }
    return W;
}

VectorFn patch_normal_field(const VortexPatch& patch, const Domain& domain, const Grid& grid) {
    const PatchValidation val = validate_patch(patch, domain);
    const double gscale = patch.support.typical_gradient();
    const double tube_p =
        std::min(8.0 * grid.h * gscale, 0.45 * val.boundary_clearance * gscale);
    // The blend tube must stay clear of the domain boundary.
    for (const Vec3& b : domain.boundary_samples(256))
        if (std::abs(patch.support.value(b)) < tube_p)
            throw std::invalid_argument("patch_normal_field: blend tubes overlap");
    const LevelSet ls = patch.support;
    const Domain dom = domain;
    return [ls, dom, tube_p](const Vec3& p) {
        const double eta = bump1(ls.value(p) / tube_p);
        const Vec3 n_patch = eta > 0.0 ? ls.unit_normal(p) : Vec3{};
        return eta * n_patch - (1.0 - eta) * dom.grad_delta(p);
    };
}

namespace {

// Spectral d_i applied to the pointwise product a_i * b, accumulated.
ScalarField div_of_product(const std::vector<ScalarField>& a, const ScalarField& b) {
    ScalarField acc(b.grid);
    for (int i = 0; i < b.grid.dim; ++i) {
        ScalarField prod(b.grid);
        for (std::size_t k = 0; k < prod.data.size(); ++k)
            prod.data[k] = a[i].data[k] * b.data[k];
        ScalarField d = spectral::differentiate(prod, i);
        for (std::size_t k = 0; k < prod.data.size(); ++k) acc.data[k] += d.data[k];
    }
    return acc;
}

}  // namespace

ConormalReport conormal_derivative(const VectorFn& w, const VortexPatch& patch,
                                   const Grid& grid, double s, bool proof_split) {
    ConormalReport rep;

    // Tangency residual on the patch boundary; the Gauss-Green identity
    // div(w chi_P) = chi_P div w needs it to vanish.
    double wsup_b = 1e-300;
    const int M = grid.dim == 2 ? 512 : 2048;
    for (const Vec3& p : patch.support.boundary_samples(M)) {
        const Vec3 wn = w(p);
        wsup_b = std::max(wsup_b, norm(wn));
        rep.tangency_residual =
            std::max(rep.tangency_residual, std::abs(dot(wn, patch.support.unit_normal(p))));
    }
    rep.tangency_residual /= wsup_b;
    if (rep.tangency_residual > 1e-6)
        throw std::invalid_argument(
            "conormal_derivative: field is not tangent to the patch boundary");

    // Sample w, the indicator and the profiles.
    std::vector<ScalarField> w_comp(grid.dim, ScalarField(grid));
    ScalarField chi = patch.indicator(grid);
    double w_sup = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const Vec3 p = node_point(grid, k);
        const Vec3 wv = w(p);
        for (int i = 0; i < grid.dim; ++i) w_comp[i].data[k] = wv[i];
        w_sup = std::max(w_sup, norm(wv));
    }

    std::vector<ScalarField> a_in(grid.dim, ScalarField(grid)),
        a_ex(grid.dim, ScalarField(grid));
    for (int i = 0; i < grid.dim; ++i)
        for (std::size_t k = 0; k < grid.size(); ++k) {
            a_in[i].data[k] = w_comp[i].data[k] * chi.data[k];
            a_ex[i].data[k] = w_comp[i].data[k] * (1.0 - chi.data[k]);
        }

    double w_cs = 0.0;
    for (int i = 0; i < grid.dim; ++i) w_cs = std::max(w_cs, lp::holder_norm(w_comp[i], s));

    ScalarField div_w(grid);
    {
        VectorField wf(grid, grid.dim);
        for (int i = 0; i < grid.dim; ++i) wf.comp[i] = w_comp[i];
        div_w = spectral::divergence(wf);
    }

    auto one_profile = [&](const ScalarField& b, const std::vector<ScalarField>& a,
                           const ScalarField& indicator, ScalarField& value_acc) {
        ScalarField g = div_of_product(a, b);
        for (std::size_t k = 0; k < g.data.size(); ++k) value_acc.data[k] += g.data[k];
        ScalarField chi_div_w(grid);
        for (std::size_t k = 0; k < grid.size(); ++k)
            chi_div_w.data[k] = indicator.data[k] * div_w.data[k];
        rep.csm1_estimate += conormal_csm1_estimate(a, b, chi_div_w, s);
        if (!proof_split) return;
        for (int i = 0; i < grid.dim; ++i) {
            lp::BonySplit split = lp::bony_split(a[i], b);
            ScalarField low_high(grid);
            for (std::size_t k = 0; k < grid.size(); ++k)
                low_high.data[k] = split.T_ab.data[k] + split.R_ab.data[k];
            rep.para_low_high += lp::holder_norm(low_high, s);
            rep.para_high_low +=
                lp::holder_norm(spectral::differentiate(split.T_ba, i), s - 1.0);
        }
    };

    double omega_sup = 0.0, prof_cs = 0.0;
    if (patch.planar) {
        ScalarField bi(grid), be(grid), omega(grid);
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const Vec3 p = node_point(grid, k);
            bi.data[k] = patch.omega_i_s(p);
            be.data[k] = patch.omega_e_s(p);
            omega.data[k] = chi.data[k] > 0.5 ? bi.data[k] : be.data[k];
            omega_sup = std::max(omega_sup, std::abs(omega.data[k]));
        }
        prof_cs = lp::holder_norm(bi, s) + lp::holder_norm(be, s);
        rep.value_s = ScalarField(grid);
        one_profile(bi, a_in, chi, rep.value_s);
        ScalarField chi_c(grid);
        for (std::size_t k = 0; k < grid.size(); ++k) chi_c.data[k] = 1.0 - chi.data[k];
        one_profile(be, a_ex, chi_c, rep.value_s);
        rep.csm1_norm = lp::holder_norm(rep.value_s, s - 1.0);
    } else {
        VectorField bi(grid, 3), be(grid, 3);
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const Vec3 p = node_point(grid, k);
            bi.set(k, patch.omega_i_v(p));
            be.set(k, patch.omega_e_v(p));
            const Vec3 o = chi.data[k] > 0.5 ? bi.at(k) : be.at(k);
            omega_sup = std::max(omega_sup, norm(o));
        }
        for (int c = 0; c < 3; ++c)
            prof_cs = std::max(prof_cs, lp::holder_norm(bi.comp[c], s) +
                                            lp::holder_norm(be.comp[c], s));
        rep.value_v = VectorField(grid, 3);
        ScalarField chi_c(grid);
        for (std::size_t k = 0; k < grid.size(); ++k) chi_c.data[k] = 1.0 - chi.data[k];
        for (int c = 0; c < 3; ++c) {
            one_profile(bi.comp[c], a_in, chi, rep.value_v.comp[c]);
            one_profile(be.comp[c], a_ex, chi_c, rep.value_v.comp[c]);
            rep.csm1_norm =
                std::max(rep.csm1_norm, lp::holder_norm(rep.value_v.comp[c], s - 1.0));
        }
    }

    rep.rhs_bracket = w_sup * prof_cs + omega_sup * w_cs;
    rep.ratio = rep.csm1_estimate / std::max(rep.rhs_bracket, 1e-300);
    return rep;
}

double conormal_csm1_estimate(const std::vector<ScalarField>& a, const ScalarField& b,
                              const ScalarField& chi_div_w, double s) {
    const Grid& g = b.grid;
    ScalarField low_high(g), high_low(g);
    for (std::size_t i = 0; i < a.size(); ++i) {
        lp::BonySplit split = lp::bony_split(a[i], b);
        ScalarField db = spectral::differentiate(b, static_cast<int>(i));
        ScalarField t_dba = lp::paraproduct(db, a[i]);
        for (std::size_t k = 0; k < g.size(); ++k) {
            low_high.data[k] += split.T_ab.data[k] + split.R_ab.data[k];
            high_low.data[k] += t_dba.data[k];
        }
    }
    ScalarField t_bdiv = lp::paraproduct(b, chi_div_w);
    return lp::holder_norm(low_high, s) + lp::holder_norm(high_low, s - 1.0) +
           lp::holder_norm(t_bdiv, s - 1.0);
}

double conormal_norm_from_fields(const VectorField& w, const ScalarField& chi,
                                 const ScalarField& b_in, const ScalarField& b_out,
                                 double s) {
    const Grid& g = chi.grid;
    ScalarField div_w = spectral::divergence(w);
    double total = 0.0;
    for (int pass = 0; pass < 2; ++pass) {
        std::vector<ScalarField> a(g.dim, ScalarField(g));
        ScalarField chi_div_w(g);
        for (std::size_t k = 0; k < g.size(); ++k) {
            const double ind = pass == 0 ? chi.data[k] : 1.0 - chi.data[k];
            for (int i = 0; i < g.dim; ++i) a[i].data[k] = w.comp[i].data[k] * ind;
            chi_div_w.data[k] = ind * div_w.data[k];
        }
        total += conormal_csm1_estimate(a, pass == 0 ? b_in : b_out, chi_div_w, s);
    }
    return total;
}

double tangency_identity_residual(const VectorFn& w, const VortexPatch& patch,
                                  const Grid& grid, double s) {
    // Gauss-Green: the residual div(w chi_P) - chi_P div w is the surface
    // layer -(w . n_P) dS.  Quadrature of the layer density against the
    // patch boundary, weighted by the C^{s-1} norm of the discrete layer.
    const int M = grid.dim == 2 ? 1024 : 4096;
    double density_sup = 0.0;
    for (const Vec3& p : patch.support.boundary_samples(M))
        density_sup = std::max(density_sup,
                               std::abs(dot(w(p), patch.support.unit_normal(p))));

    // C^{s-1} norm of a unit surface layer splatted on the grid (linear
    // deposition of arc-length weights).
    ScalarField layer(grid);
    const double seg = (grid.dim == 2 ? 2.0 * pi * patch.support.a : 1.0) / M;
    for (const Vec3& p : patch.support.boundary_samples(M)) {
        // nearest node deposit is enough for a norm scale
        int i = static_cast<int>(std::round(p.x / grid.h)) % grid.n;
        int j = static_cast<int>(std::round(p.y / grid.h)) % grid.n;
        if (grid.dim == 2)
            layer.at(i, j) += seg / (grid.h * grid.h);
        else {
            int k = static_cast<int>(std::round(p.z / grid.h)) % grid.n;
            layer.at(i, j, k) += seg / (grid.h * grid.h * grid.h);
        }
    }
    const double layer_norm = lp::holder_norm(layer, s - 1.0);
    return density_sup * layer_norm;
}

}  // namespace patchlab::patch
