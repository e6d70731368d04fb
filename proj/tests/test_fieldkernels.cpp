#include "doctest.h"

#include "keldysh/fieldkernels.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

using namespace keldysh;

namespace {

// int_0^inf dt exp(i z t) (-sin(w t)/w), Im z > 0, by quadrature
cd retarded_ft(cd z, double w) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    cd sum = 0.0;
    for (double a = 0.0; a < 500.0; a += 2.0) {
        auto re = [&](double t) { return std::real(std::exp(I * z * t)) * (-std::sin(w * t) / w); };
        auto im = [&](double t) { return std::imag(std::exp(I * z * t)) * (-std::sin(w * t) / w); };
        sum += cd(GK::integrate(re, a, a + 2.0, 0), GK::integrate(im, a, a + 2.0, 0));
    }
    return sum;
}

}  // namespace

TEST_CASE("retarded kernel is the transform of the mode response") {
    double eta = 0.1, mu_sq = 0.8, kv = 1.5;
    double w = std::sqrt(kv + mu_sq);
    for (double k0 : {-2.5, -0.6, 0.3, 1.9}) {
        // (k0 + i eta)^2 - w^2 = k^2 - (mu^2 + eta^2) + 2 i k0 eta
        ScalarKernels s = scalar_kernels(MomentumPoint(k0, kv), mu_sq + eta * eta, 2.0 * std::abs(k0) * eta);
        cd q = retarded_ft(cd(k0, eta), w);
        CHECK(std::abs(s.D_R - q) < 1e-9 * std::abs(q));
    }
}

TEST_CASE("closed-form kernel values") {
    ScalarKernels s = scalar_kernels(MomentumPoint(2.0, 1.0), 1.0, 0.01);
    CHECK(std::abs(s.D_R - 1.0 / cd(2.0, 0.01)) < 1e-15);
    CHECK(std::abs(s.D_F - 1.0 / cd(2.0, 0.01)) < 1e-15);
    CHECK(s.D_minus == cd(0.0));
    ScalarKernels m = scalar_kernels(MomentumPoint(-2.0, 1.0), 1.0, 0.01);
    CHECK(std::abs(m.D_R - 1.0 / cd(2.0, -0.01)) < 1e-15);
    CHECK(std::abs(m.D_F - 1.0 / cd(2.0, 0.01)) < 1e-15);
    CHECK(m.D_plus == cd(0.0));
    // on shell D is a narrow Lorentzian of weight -2 pi i sign k0
    ScalarKernels on = scalar_kernels(MomentumPoint(std::sqrt(2.0), 1.0), 1.0, 1e-3);
    CHECK(std::abs(on.D - cd(0.0, -2e3)) < 1e-9);
}

TEST_CASE("response transform identities") {
    for (double eps : {1e-6, 1e-2, 0.5}) {
        auto g = symmetric_k0_grid(0.7, 6.0, 200);
        CHECK(g.size() == 400);
        for (const auto& k : g) CHECK(k.k0 != 0.0);
        TransformResiduals r = response_transform_check(g, 1.0, eps);
        CHECK(r.zero_bins == 0);
        CHECK(r.points == 400);
        CHECK(r.max() < 1e-14);
        TransformResiduals ph = response_transform_check(g, 0.0, eps, -1.0);
        CHECK(ph.max() < 1e-14);
    }
    std::vector<MomentumPoint> z{MomentumPoint(0.0, 2.0), MomentumPoint(1.0, 2.0)};
    TransformResiduals r = response_transform_check(z, 1.0, 1e-3);
    CHECK(r.zero_bins == 1);
    CHECK(r.max() < 1e-14);
    ScalarKernels s0 = scalar_kernels(z[0], 1.0, 1e-3);
    CHECK(s0.D_plus == 0.5 * s0.D);
}

TEST_CASE("photon pair from the retarded function") {
    for (double k0 : {-3.0, -0.5, 0.5, 3.0}) {
        MomentumPoint k(k0, 1.2);
        PhotonPair p = photon_keldysh_pair(k, 1e-4, 1.0);
        ScalarKernels s = scalar_kernels(k, 0.0, 1e-4);
        CHECK(std::abs(p.D_F + s.D_F) < 1e-12 * std::abs(s.D_F));
        CHECK(std::abs(p.D_plus + s.D_plus) < 1e-12 * std::max(1.0, std::abs(s.D_plus)));
        CHECK(std::abs(photon_retarded(k.reflected(), 1e-4) - std::conj(photon_retarded(k, 1e-4))) < 1e-15);
    }
}

TEST_CASE("input validation") {
    CHECK_THROWS_AS(MomentumPoint(1.0, -0.1), Error);
    CHECK_THROWS_AS(EpsilonPrescription(0.0), Error);
    CHECK_THROWS_AS(scalar_kernels(MomentumPoint(1.0, 0.0), 1.0, -1e-3), Error);
    CHECK_THROWS_AS(scalar_kernels(MomentumPoint(1.0, 0.0), -1.0, 1e-3), Error);
}
