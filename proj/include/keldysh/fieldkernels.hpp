#pragma once

#include "keldysh/grid.hpp"

#include <vector>

namespace keldysh {

struct MomentumPoint {
    double k0 = 0.0;
    double kvec_sq = 0.0;

    MomentumPoint() = default;
    MomentumPoint(double k0_, double kvec_sq_);
    double k_sq() const { return k0 * k0 - kvec_sq; }
    MomentumPoint reflected() const { return MomentumPoint(-k0, kvec_sq); }
    // sign k0 with sign 0 = 0, matching the half split of the step function
    double sign() const { return k0 > 0.0 ? 1.0 : (k0 < 0.0 ? -1.0 : 0.0); }
    double theta_plus() const { return k0 > 0.0 ? 1.0 : (k0 < 0.0 ? 0.0 : 0.5); }
    double theta_minus() const { return 1.0 - theta_plus(); }
};

struct EpsilonPrescription {
    double eps = 1e-6;
    EpsilonPrescription() = default;
    explicit EpsilonPrescription(double e);
};

struct ScalarKernels {
    cd D_R, D_A, D_F, D_plus, D_minus, D;
};

ScalarKernels scalar_kernels(const MomentumPoint& k, double mu_sq, double eps);

struct TransformResiduals {
    double feynman = 0.0;       // D_F vs theta(k0) D_R(k) + theta(-k0) D_R(-k)
    double plus = 0.0;          // D+ vs theta(k0) [D_R(k) - D_R(-k)]
    double minus = 0.0;         // D- vs theta(-k0) [D_R(k) - D_R(-k)]
    double plus_from_feynman = 0.0;  // D+ vs D_F - D_A
    double commutator = 0.0;    // D vs D_R - D_A
    double completeness = 0.0;  // D+ + D- vs D, all points including k0 = 0
    double conjugation = 0.0;   // D_R(-k) vs D_R(k)*
    std::size_t points = 0;
    std::size_t zero_bins = 0;  // k0 = 0 points, checked for completeness and conjugation only
    double max() const;
};

// Residuals relative to max |D_R| over the grid; overall multiplies all kernels (photon factor).
TransformResiduals response_transform_check(const std::vector<MomentumPoint>& grid, double mu_sq, double eps, double overall = 1.0);

// k0 samples at (j + 1/2) * step, symmetric, never zero
std::vector<MomentumPoint> symmetric_k0_grid(double kvec_sq, double k0_max, std::size_t n_half);

struct PhotonPair {
    cd D_F;
    cd D_plus;
};

// Metric-diagonal Feynman-gauge photon kernels (coefficient of g_{mu mu'}) from the retarded function alone.
PhotonPair photon_keldysh_pair(const MomentumPoint& k, double eps, double mu_vac = 1.0);
cd photon_retarded(const MomentumPoint& k, double eps, double mu_vac = 1.0);

}  // namespace keldysh
