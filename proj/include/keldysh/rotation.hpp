#pragma once

#include "keldysh/stationary.hpp"

#include <functional>

namespace keldysh {

struct CumulantSet {
    Signal mean;
    TwoPointKernel K_F;
    TwoPointKernel K_rev;
    TwoPointKernel K_W;
    double hbar_c = 1.0;

    const TimeGrid& grid() const { return K_W.grid; }
};

struct RotatedCumulants {
    Signal mean;
    TwoPointKernel D_R;
    TwoPointKernel N_s;
    OrderingParam p;
    double hbar_c = 1.0;
};

struct RotateOptions {
    double consistency_tol = 1e-8;
    bool check = true;
};

struct ConsistencyReport {
    double closure = 0.0;      // |K_W + K_W^T - K_F - K_rev| / scale
    double hermiticity = 0.0;  // |K_W - K_W^H| / scale
    double reversal = 0.0;     // |K_rev - K_F^*| / scale
    double ordering = 0.0;     // non-retarded part of K_rev - K_W / scale
    double worst() const;
};

ConsistencyReport consistency(const CumulantSet& ctl);

// CTL triple of a Hermitian field from its Wightman function, ordered by the grid's time order
CumulantSet cumulants_from_wightman(const TwoPointKernel& K_W, const Signal& mean, double hbar_c = 1.0);

RotatedCumulants rotate(const CumulantSet& ctl, OrderingParam p, RotateOptions opt = {});
CumulantSet unrotate(const RotatedCumulants& rot);
RotatedCumulants reorder(const RotatedCumulants& rot, double s_new);

// response-only gap Z with N_s' = N_s + (s - s') Z
TwoPointKernel reordering_gap(const TwoPointKernel& D_R, double hbar_c = 1.0);

// substitution eta_+ = j_s/hc + eta^(s-), eta_- = j_s/hc - eta^(s+) and its inverse
struct EtaPair {
    Signal eta_plus;
    Signal eta_minus;
};
struct SourcePair {
    Signal eta;
    Signal j_s;
};
EtaPair rotation_substitution(const Signal& eta, const Signal& j_s, OrderingParam p, double hbar_c = 1.0);
SourcePair inverse_substitution(const Signal& eta_plus, const Signal& eta_minus, OrderingParam p, double hbar_c = 1.0);

// -1/2 e+ K_F e+ - 1/2 e- K_rev e- + e- K_W e+
cd lambda_form(const CumulantSet& ctl, const Signal& eta_plus, const Signal& eta_minus);
// lambda_form minus i (e+ - e-) <A>
cd lambda2_form(const CumulantSet& ctl, const Signal& eta_plus, const Signal& eta_minus);
// -i eta <A> - i eta D_R j - 1/2 eta N eta
cd rotated_form(const RotatedCumulants& rot, const Signal& eta, const Signal& j_s);

struct Lambda2Check {
    cd lhs;
    cd rhs;
    cd residual;
    double scale = 0.0;
    cd quadratic_source_term;  // the j_s j_s piece, removed by the closure identity
};

using RotateFn = std::function<RotatedCumulants(const CumulantSet&, OrderingParam)>;

Lambda2Check lambda2_identity_check(const CumulantSet& ctl, OrderingParam p, const Signal& eta, const Signal& j_s);
Lambda2Check lambda2_identity_check(const CumulantSet& ctl, OrderingParam p, const Signal& eta, const Signal& j_s,
                                    const RotateFn& rot_fn);

// Stationary (lag) specialisation with spectral projections.
struct StationaryCumulants {
    StationaryKernel K_F;
    StationaryKernel K_rev;
    StationaryKernel K_W;
    double hbar_c = 1.0;
};

struct StationaryRotated {
    StationaryKernel D_R;
    StationaryKernel N_s;
    OrderingParam p;
    double hbar_c = 1.0;
};

StationaryCumulants stationary_cumulants_from_wightman(const StationaryKernel& K_W, double hbar_c = 1.0);
StationaryRotated rotate(const StationaryCumulants& ctl, OrderingParam p, RotateOptions opt = {});
StationaryCumulants unrotate(const StationaryRotated& rot);
StationaryRotated reorder(const StationaryRotated& rot, double s_new);
StationaryKernel reordering_gap(const StationaryKernel& D_R, double hbar_c = 1.0);

CumulantSet realize(const StationaryCumulants& s);
RotatedCumulants realize(const StationaryRotated& s);

}  // namespace keldysh
