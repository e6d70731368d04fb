#include "keldysh/fieldkernels.hpp"

#include <algorithm>
#include <cmath>

namespace keldysh {

MomentumPoint::MomentumPoint(double k0_, double kvec_sq_) : k0(k0_), kvec_sq(kvec_sq_) {
    if (!(kvec_sq >= 0.0)) throw Error("invalid_momentum", "kvec_sq must be >= 0");
}

EpsilonPrescription::EpsilonPrescription(double e) : eps(e) {
    if (!(eps > 0.0)) throw Error("invalid_epsilon", "eps must be > 0");
}

namespace {

cd retarded(const MomentumPoint& k, double mu_sq, double eps) { return 1.0 / (k.k_sq() - mu_sq + I * eps * k.sign()); }

}  // namespace

ScalarKernels scalar_kernels(const MomentumPoint& k, double mu_sq, double eps) {
    if (!(eps > 0.0)) throw Error("invalid_epsilon", "eps must be > 0");
    if (!(mu_sq >= 0.0)) throw Error("invalid_mass", "mu_sq must be >= 0");
    ScalarKernels r;
    r.D_R = retarded(k, mu_sq, eps);
    r.D_A = std::conj(r.D_R);
    r.D_F = 1.0 / (k.k_sq() - mu_sq + I * eps);
    r.D = r.D_R - r.D_A;
    r.D_plus = k.theta_plus() * r.D;
    r.D_minus = k.theta_minus() * r.D;
    return r;
}

double TransformResiduals::max() const {
    return std::max({feynman, plus, minus, plus_from_feynman, commutator, completeness, conjugation});
}

TransformResiduals response_transform_check(const std::vector<MomentumPoint>& grid, double mu_sq, double eps, double overall) {
    TransformResiduals r;
    double scale = 0.0;
    for (const auto& k : grid) scale = std::max(scale, std::abs(overall * scalar_kernels(k, mu_sq, eps).D_R));
    if (scale == 0.0) scale = 1.0;
    auto upd = [&](double& slot, cd v) { slot = std::max(slot, std::abs(v) / scale); };
    for (const auto& k : grid) {
        ScalarKernels a = scalar_kernels(k, mu_sq, eps);
        ScalarKernels b = scalar_kernels(k.reflected(), mu_sq, eps);
        cd dr = overall * a.D_R, drm = overall * b.D_R, da = overall * a.D_A;
        cd df = overall * a.D_F, dp = overall * a.D_plus, dm = overall * a.D_minus, d = overall * a.D;
        ++r.points;
        upd(r.completeness, dp + dm - d);
        upd(r.conjugation, drm - std::conj(dr));
        if (k.k0 == 0.0) {
            ++r.zero_bins;
            continue;
        }
        upd(r.feynman, df - (k.theta_plus() * dr + k.theta_minus() * drm));
        upd(r.plus, dp - k.theta_plus() * (dr - drm));
        upd(r.minus, dm - k.theta_minus() * (dr - drm));
        upd(r.plus_from_feynman, dp - (df - da));
        upd(r.commutator, d - (dr - da));
    }
    return r;
}

std::vector<MomentumPoint> symmetric_k0_grid(double kvec_sq, double k0_max, std::size_t n_half) {
    std::vector<MomentumPoint> g;
    double h = k0_max / double(n_half);
    for (std::size_t j = n_half; j-- > 0;) g.emplace_back(-(double(j) + 0.5) * h, kvec_sq);
    for (std::size_t j = 0; j < n_half; ++j) g.emplace_back((double(j) + 0.5) * h, kvec_sq);
    return g;
}

cd photon_retarded(const MomentumPoint& k, double eps, double mu_vac) { return -mu_vac * scalar_kernels(k, 0.0, eps).D_R; }

PhotonPair photon_keldysh_pair(const MomentumPoint& k, double eps, double mu_vac) {
    cd dr = photon_retarded(k, eps, mu_vac);
    cd drm = photon_retarded(k.reflected(), eps, mu_vac);
    return {k.theta_plus() * dr + k.theta_minus() * drm, k.theta_plus() * (dr - drm)};
}

}  // namespace keldysh
