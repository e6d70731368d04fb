#include "keldysh/rotation.hpp"

#include <algorithm>
#include <cmath>

namespace keldysh {

namespace {

template <class E>
double max_abs(const Eigen::MatrixBase<E>& m) {
    return m.size() ? m.cwiseAbs().maxCoeff() : 0.0;
}

TwoPointKernel proj(const TwoPointKernel& K, Arg a, Sign s, OrderingParam p) { return pair_kernel_project(K, a, s, p); }

TwoPointKernel proj2(const TwoPointKernel& K, Sign first, Sign second, OrderingParam p) {
    return proj(proj(K, Arg::second, second, p), Arg::first, first, p);
}

double lag_step(const TimeGrid& g, std::size_t j) {
    long d = long(j) - long(g.zero_index());
    if (d == 0) return 0.5;
    if (g.n % 2 == 0 && d == -long(g.n / 2)) return 0.5;
    return d > 0 ? 1.0 : 0.0;
}

}  // namespace

double ConsistencyReport::worst() const { return std::max({closure, hermiticity, reversal, ordering}); }

ConsistencyReport consistency(const CumulantSet& ctl) {
    require_same_grid(ctl.K_F.grid, ctl.K_W.grid, "consistency");
    require_same_grid(ctl.K_rev.grid, ctl.K_W.grid, "consistency");
    const TimeGrid& g = ctl.grid();
    double scale = std::max({max_abs(ctl.K_F.values), max_abs(ctl.K_rev.values), max_abs(ctl.K_W.values), 1e-300});
    const CMat& W = ctl.K_W.values;
    ConsistencyReport r;
    r.closure = max_abs(W + W.transpose() - ctl.K_F.values - ctl.K_rev.values) / scale;
    r.hermiticity = max_abs(W - W.adjoint()) / scale;
    r.reversal = max_abs(ctl.K_rev.values - ctl.K_F.values.conjugate()) / scale;
    CMat diff = ctl.K_rev.values - W;
    double ord = 0.0;
    for (std::size_t i = 0; i < g.n; ++i)
        for (std::size_t j = 0; j < g.n; ++j)
            if (g.step(i, j) == 0.0) ord = std::max(ord, std::abs(diff(Eigen::Index(i), Eigen::Index(j))));
    r.ordering = ord / scale;
    return r;
}

CumulantSet cumulants_from_wightman(const TwoPointKernel& K_W, const Signal& mean, double hbar_c) {
    const TimeGrid& g = K_W.grid;
    require_same_grid(mean.grid, g, "cumulants_from_wightman");
    CumulantSet c{mean, TwoPointKernel(g), TwoPointKernel(g), K_W, hbar_c};
    for (std::size_t i = 0; i < g.n; ++i)
        for (std::size_t j = 0; j < g.n; ++j) {
            auto a = Eigen::Index(i), b = Eigen::Index(j);
            double sij = g.step(i, j), sji = g.step(j, i);
            c.K_F.values(a, b) = sij * K_W.values(a, b) + sji * K_W.values(b, a);
            c.K_rev.values(a, b) = sji * K_W.values(a, b) + sij * K_W.values(b, a);
        }
    return c;
}

RotatedCumulants rotate(const CumulantSet& ctl, OrderingParam p, RotateOptions opt) {
    const TimeGrid& g = ctl.grid();
    require_same_grid(ctl.mean.grid, g, "rotate");
    if (opt.check) {
        ConsistencyReport r = consistency(ctl);
        if (r.hermiticity > opt.consistency_tol)
            throw Error("complex_field", "rotate: Wightman kernel is not Hermitian; only Hermitian fields are supported");
        if (r.worst() > opt.consistency_tol)
            throw Error("inconsistent_cumulants", "rotate: cumulant set violates the closed-time-loop consistency identities");
    }
    RotatedCumulants out{ctl.mean, TwoPointKernel(g), TwoPointKernel(g), p, ctl.hbar_c};
    out.D_R.values = (ctl.K_rev.values - ctl.K_W.values) / (-I * ctl.hbar_c);
    for (std::size_t i = 0; i < g.n; ++i)
        for (std::size_t j = 0; j < g.n; ++j)
            if (g.step(i, j) == 0.0) out.D_R.values(Eigen::Index(i), Eigen::Index(j)) = 0.0;
    CMat n = proj2(ctl.K_F, Sign::plus, Sign::plus, p).values + proj2(ctl.K_W, Sign::minus, Sign::plus, p).values;
    out.N_s.values = 2.0 * n.real().cast<cd>();
    return out;
}

CumulantSet unrotate(const RotatedCumulants& rot) {
    const TimeGrid& g = rot.D_R.grid;
    require_same_grid(rot.N_s.grid, g, "unrotate");
    CMat xm = proj(rot.D_R, Arg::second, Sign::minus, rot.p).values;
    CMat xp = proj(rot.D_R, Arg::second, Sign::plus, rot.p).values;
    cd ih = I * rot.hbar_c;
    CumulantSet c{rot.mean, TwoPointKernel(g), TwoPointKernel(g), TwoPointKernel(g), rot.hbar_c};
    c.K_F.values = rot.N_s.values + ih * (xm + xm.transpose());
    c.K_W.values = rot.N_s.values + ih * (xm - xp.transpose());
    c.K_rev.values = c.K_F.values.conjugate();
    return c;
}

TwoPointKernel reordering_gap(const TwoPointKernel& D_R, double hbar_c) {
    OrderingParam one(1.0);
    CMat xm = proj(D_R, Arg::second, Sign::minus, one).values;
    CMat xp = proj(D_R, Arg::second, Sign::plus, one).values;
    TwoPointKernel Z(D_R.grid);
    Z.values = (0.5 * I * hbar_c) * (xm + xm.transpose() - xp - xp.transpose());
    return Z;
}

RotatedCumulants reorder(const RotatedCumulants& rot, double s_new) {
    OrderingParam pn(s_new);
    RotatedCumulants out = rot;
    out.p = pn;
    if (s_new == rot.p.s) return out;
    out.N_s.values = rot.N_s.values + (rot.p.s - s_new) * reordering_gap(rot.D_R, rot.hbar_c).values;
    return out;
}

EtaPair rotation_substitution(const Signal& eta, const Signal& j_s, OrderingParam p, double hbar_c) {
    require_same_grid(eta.grid, j_s.grid, "rotation_substitution");
    Signal em = project_s(eta, p, Sign::minus);
    Signal ep = project_s(eta, p, Sign::plus);
    CVec j = j_s.values / hbar_c;
    return {Signal(eta.grid, j + em.values), Signal(eta.grid, j - ep.values)};
}

SourcePair inverse_substitution(const Signal& eta_plus, const Signal& eta_minus, OrderingParam p, double hbar_c) {
    require_same_grid(eta_plus.grid, eta_minus.grid, "inverse_substitution");
    Signal a = project_s(eta_plus, p, Sign::plus);
    Signal b = project_s(eta_minus, p, Sign::minus);
    return {Signal(eta_plus.grid, eta_plus.values - eta_minus.values), Signal(eta_plus.grid, hbar_c * (a.values + b.values))};
}

cd lambda_form(const CumulantSet& ctl, const Signal& ep, const Signal& em) {
    return -0.5 * bilinear(ep, ctl.K_F, ep) - 0.5 * bilinear(em, ctl.K_rev, em) + bilinear(em, ctl.K_W, ep);
}

cd lambda2_form(const CumulantSet& ctl, const Signal& ep, const Signal& em) {
    Signal eta(ep.grid, ep.values - em.values);
    return -I * bilinear(eta, ctl.mean) + lambda_form(ctl, ep, em);
}

cd rotated_form(const RotatedCumulants& rot, const Signal& eta, const Signal& j_s) {
    return -I * bilinear(eta, rot.mean) - I * bilinear(eta, rot.D_R, j_s) - 0.5 * bilinear(eta, rot.N_s, eta);
}

Lambda2Check lambda2_identity_check(const CumulantSet& ctl, OrderingParam p, const Signal& eta, const Signal& j_s) {
    return lambda2_identity_check(ctl, p, eta, j_s, [](const CumulantSet& c, OrderingParam q) { return rotate(c, q); });
}

Lambda2Check lambda2_identity_check(const CumulantSet& ctl, OrderingParam p, const Signal& eta, const Signal& j_s,
                                    const RotateFn& rot_fn) {
    require_same_grid(eta.grid, ctl.grid(), "lambda2_identity_check");
    require_same_grid(j_s.grid, ctl.grid(), "lambda2_identity_check");
    EtaPair e = rotation_substitution(eta, j_s, p, ctl.hbar_c);
    RotatedCumulants rot = rot_fn(ctl, p);
    Lambda2Check c;
    c.lhs = lambda2_form(ctl, e.eta_plus, e.eta_minus);
    c.rhs = rotated_form(rot, eta, j_s);
    c.residual = c.lhs - c.rhs;
    Signal j(j_s.grid, j_s.values / ctl.hbar_c);
    c.quadratic_source_term = bilinear(j, ctl.K_W, j) - 0.5 * bilinear(j, ctl.K_F, j) - 0.5 * bilinear(j, ctl.K_rev, j);
    c.scale = 0.5 * std::abs(bilinear(e.eta_plus, ctl.K_F, e.eta_plus)) + 0.5 * std::abs(bilinear(e.eta_minus, ctl.K_rev, e.eta_minus)) +
              std::abs(bilinear(e.eta_minus, ctl.K_W, e.eta_plus)) + std::abs(bilinear(eta, ctl.mean)) +
              std::abs(bilinear(eta, rot.D_R, j_s)) + 0.5 * std::abs(bilinear(eta, rot.N_s, eta));
    return c;
}

StationaryCumulants stationary_cumulants_from_wightman(const StationaryKernel& K_W, double hbar_c) {
    const TimeGrid& g = K_W.grid();
    StationaryKernel refl = K_W.reflected();
    StationaryCumulants c{StationaryKernel(g), StationaryKernel(g), K_W, hbar_c};
    for (std::size_t j = 0; j < g.n; ++j) {
        double th = lag_step(g, j);
        auto k = Eigen::Index(j);
        c.K_F.lag.values[k] = th * K_W.lag.values[k] + (1.0 - th) * refl.lag.values[k];
        c.K_rev.lag.values[k] = (1.0 - th) * K_W.lag.values[k] + th * refl.lag.values[k];
    }
    return c;
}

StationaryRotated rotate(const StationaryCumulants& ctl, OrderingParam p, RotateOptions opt) {
    const TimeGrid& g = ctl.K_W.grid();
    require_same_grid(ctl.K_F.grid(), g, "rotate");
    require_same_grid(ctl.K_rev.grid(), g, "rotate");
    StationaryRotated out{StationaryKernel(g), StationaryKernel(g), p, ctl.hbar_c};
    CVec diff = ctl.K_rev.lag.values - ctl.K_W.lag.values;
    if (opt.check) {
        const CVec& W = ctl.K_W.lag.values;
        CVec Wr = ctl.K_W.reflected().lag.values;
        double scale = std::max({max_abs(W), max_abs(ctl.K_F.lag.values), max_abs(ctl.K_rev.lag.values), 1e-300});
        double herm = max_abs(W - Wr.conjugate()) / scale;
        if (herm > opt.consistency_tol)
            throw Error("complex_field", "rotate: Wightman kernel is not Hermitian; only Hermitian fields are supported");
        double closure = max_abs(W + Wr - ctl.K_F.lag.values - ctl.K_rev.lag.values) / scale;
        double rev = max_abs(ctl.K_rev.lag.values - ctl.K_F.lag.values.conjugate()) / scale;
        double ord = 0.0;
        for (std::size_t j = 0; j < g.n; ++j)
            if (lag_step(g, j) == 0.0) ord = std::max(ord, std::abs(diff[Eigen::Index(j)]));
        if (std::max({closure, rev, ord / scale}) > opt.consistency_tol)
            throw Error("inconsistent_cumulants", "rotate: cumulant set violates the closed-time-loop consistency identities");
    }
    out.D_R.lag.values = diff / (-I * ctl.hbar_c);
    for (std::size_t j = 0; j < g.n; ++j)
        if (lag_step(g, j) == 0.0) out.D_R.lag.values[Eigen::Index(j)] = 0.0;
    StationaryKernel n = project_pair(ctl.K_F, Sign::plus, p, Sign::plus, p) + project_pair(ctl.K_W, Sign::minus, p, Sign::plus, p);
    out.N_s.lag.values = 2.0 * n.lag.values.real().cast<cd>();
    return out;
}

StationaryCumulants unrotate(const StationaryRotated& rot) {
    const TimeGrid& g = rot.D_R.grid();
    StationaryKernel xm = project_arg(rot.D_R, Arg::second, Sign::minus, rot.p);
    StationaryKernel xp = project_arg(rot.D_R, Arg::second, Sign::plus, rot.p);
    cd ih = I * rot.hbar_c;
    StationaryCumulants c{StationaryKernel(g), StationaryKernel(g), StationaryKernel(g), rot.hbar_c};
    c.K_F = rot.N_s + ih * (xm + xm.reflected());
    c.K_W = rot.N_s + ih * (xm - xp.reflected());
    c.K_rev = c.K_F.conj();
    return c;
}

StationaryKernel reordering_gap(const StationaryKernel& D_R, double hbar_c) {
    OrderingParam one(1.0);
    StationaryKernel xm = project_arg(D_R, Arg::second, Sign::minus, one);
    StationaryKernel xp = project_arg(D_R, Arg::second, Sign::plus, one);
    return (0.5 * I * hbar_c) * (xm + xm.reflected() - xp - xp.reflected());
}

StationaryRotated reorder(const StationaryRotated& rot, double s_new) {
    OrderingParam pn(s_new);
    StationaryRotated out = rot;
    out.p = pn;
    if (s_new == rot.p.s) return out;
    out.N_s = rot.N_s + cd(rot.p.s - s_new) * reordering_gap(rot.D_R, rot.hbar_c);
    return out;
}

CumulantSet realize(const StationaryCumulants& s) {
    TwoPointKernel W = s.K_W.realize();
    return {Signal(W.grid), s.K_F.realize(), s.K_rev.realize(), W, s.hbar_c};
}

RotatedCumulants realize(const StationaryRotated& s) {
    TwoPointKernel D = s.D_R.realize();
    return {Signal(D.grid), D, s.N_s.realize(), s.p, s.hbar_c};
}

}  // namespace keldysh
