#pragma once

#include "keldysh/fieldkernels.hpp"
#include "keldysh/pvreg.hpp"

#include <array>

namespace keldysh {

struct DiracSeaSpec {
    double mu0 = 1.0;
    double alpha = 7.2973525693e-3;
    void validate() const;
};

enum class PolKind { R, F, plus };

// Tensor stored through its scalar coefficient of (k_v k_v' - k^2 g_vv') / (-mu_vac).
struct PolarizationValue {
    MomentumPoint k;
    cd scalar;
    PolKind kind = PolKind::R;
};

struct RObsOptions {
    bool exact = true;     // principal value plus residue; false uses finite eps
    double eps = 1e-6;     // finite-eps mode, in units of k^2
    double y_max = 1e6;    // quadrature range in y = mu^2 / 4 mu0^2, analytic tail beyond
    double tol = 1e-12;    // requested relative accuracy
};

double F_threshold(double y);
double K_reg(double k_sq, const PVScheme& scheme);

// R_obs at invariant k^2 with the i0 side given by sgn (sign of k0; 0 only off the cut).
cd R_obs(double k_sq, double sgn, const DiracSeaSpec& spec, const RObsOptions& opt = {});
cd R_obs(const MomentumPoint& k, const DiracSeaSpec& spec, const RObsOptions& opt = {});

double R0(const PVScheme& scheme, const DiracSeaSpec& spec);
double R0_quadrature(const PVScheme& scheme, const DiracSeaSpec& spec, double Lambda_sq = 0.0);

PolarizationValue Pi_R_reg(const MomentumPoint& k, const DiracSeaSpec& spec, double R0_value, const RObsOptions& opt = {});
PolarizationValue Pi_F_reg(const MomentumPoint& k, const DiracSeaSpec& spec, double R0_value, const RObsOptions& opt = {});
PolarizationValue Pi_plus(const MomentumPoint& k, const DiracSeaSpec& spec, double R0_value, const RObsOptions& opt = {});
PolarizationValue Pi_plus_closed_form(const MomentumPoint& k, const DiracSeaSpec& spec);

using Tensor4 = Eigen::Matrix<cd, 4, 4>;
// lower-index tensor for k = (k0, kvec), metric diag(1,-1,-1,-1)
Tensor4 polarization_tensor(const PolarizationValue& v, const std::array<double, 3>& kvec, double mu_vac = 1.0);
// max_v |T_{v v'} k^{v'}| relative to max |T|
double transversality_residual(const Tensor4& T, double k0, const std::array<double, 3>& kvec);

// K_reg(x) = i k(x) in coordinates; returns k for timelike x_sq, 0 otherwise.
// abs_scale receives the same integral with |integrand|, the size of the cancellation.
double K_reg_coordinate(double x_sq, int sign_t, const PVScheme& scheme, double cutoff, double* abs_scale = nullptr);

}  // namespace keldysh
