#include "doctest.h"

#include "keldysh/oscillator.hpp"
#include "keldysh/rng.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <unsupported/Eigen/MatrixFunctions>

using namespace keldysh;

namespace {

// truncated Fock space: squeezed thermal state and q(t)
struct Fock {
    int N;
    CMat a, rho;
    double hbar, w;

    Fock(int n, double nbar, cd xi, double hbar_, double w_) : N(n), a(CMat::Zero(n, n)), rho(CMat::Zero(n, n)), hbar(hbar_), w(w_) {
        for (int k = 1; k < N; ++k) a(k - 1, k) = std::sqrt(double(k));
        double q = nbar / (1.0 + nbar), z = 0.0;
        for (int k = 0; k < N; ++k) z += std::pow(q, k);
        for (int k = 0; k < N; ++k) rho(k, k) = std::pow(q, k) / z;
        CMat ad = a.adjoint();
        CMat gen = 0.5 * (std::conj(xi) * a * a - xi * ad * ad);
        CMat S = gen.exp();
        rho = S * rho * S.adjoint();
    }
    CMat qop(double t) const { return std::sqrt(0.5 * hbar) * (a * std::exp(-I * w * t) + a.adjoint() * std::exp(I * w * t)); }
    cd wightman(double t, double t2) const { return (rho * qop(t) * qop(t2)).trace(); }
    double nbar() const { return (rho * a.adjoint() * a).trace().real(); }
    cd m() const { return (rho * a * a).trace(); }
};

}  // namespace

TEST_CASE("retarded response and its spectrum") {
    OscillatorSpec os{1.3, 1.0};
    CHECK(retarded_response(os, -0.4) == 0.0);
    CHECK(retarded_response(os, 0.0) == 0.0);
    CHECK(retarded_response(os, 0.7) == doctest::Approx(-std::sin(1.3 * 0.7)));
    double eps = 0.3;
    for (double w : {-2.0, 0.4, 1.3, 3.1}) {
        auto re = [&](double t) { return std::real(retarded_response(os, t) * std::exp((I * w - eps) * t)); };
        auto im = [&](double t) { return std::imag(retarded_response(os, t) * std::exp((I * w - eps) * t)); };
        using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
        cd num(GK::integrate(re, 0.0, 150.0, 20, 1e-12), GK::integrate(im, 0.0, 150.0, 20, 1e-12));
        CHECK(std::abs(num - retarded_response_spectrum(os, w, eps)) < 1e-8);
    }
    CHECK_THROWS_AS(retarded_response(OscillatorSpec{-1.0, 1.0}, 0.1), Error);
}

TEST_CASE("Fock-space oracle for the Gaussian kernels") {
    OscillatorSpec os{0.9, 1.7};
    Fock f(70, 0.3, cd(0.25, 0.1), os.hbar, os.omega0);
    GaussianState st{f.nbar(), f.m()};
    TimeGrid g(9, 0.37, -0.5);
    CumulantSet c = oscillator_cumulants(os, st, g);
    double wmax = 0.0;
    for (std::size_t i = 0; i < g.n; ++i)
        for (std::size_t j = 0; j < g.n; ++j) {
            cd W = f.wightman(g.t(i), g.t(j));
            wmax = std::max(wmax, std::abs(c.K_W.values(Eigen::Index(i), Eigen::Index(j)) - W));
            // symmetric ordering is the real part; normal and antinormal shift by the commutator halves
            double tau = g.t(i) - g.t(j);
            CHECK(std::abs(s_ordered_kernel(os, st, OrderingParam(0.0), g.t(i), g.t(j)) - W.real()) < 1e-10);
            cd normal = W - 0.5 * os.hbar * std::exp(-I * os.omega0 * tau);
            CHECK(std::abs(s_ordered_kernel(os, st, OrderingParam(1.0), g.t(i), g.t(j)) - normal) < 1e-10);
            cd anti = W + 0.5 * os.hbar * std::exp(I * os.omega0 * tau);
            CHECK(std::abs(s_ordered_kernel(os, st, OrderingParam(-1.0), g.t(i), g.t(j)) - anti) < 1e-10);
        }
    CHECK(wmax < 1e-10);
}

TEST_CASE("vacuum Keldysh contractions") {
    OscillatorSpec os{1.1, 1.0};
    Fock f(4, 0.0, 0.0, os.hbar, os.omega0);
    for (auto [t, t2] : {std::pair{0.3, 1.2}, {1.4, -0.2}}) {
        KeldyshPair k = keldysh_contractions(os, t, t2);
        cd TW = t >= t2 ? f.wightman(t, t2) : f.wightman(t2, t);
        CHECK(std::abs(k.D_F - TW / (I * os.hbar)) < 1e-12);
        CHECK(std::abs(k.D_plus - f.wightman(t, t2) / (I * os.hbar)) < 1e-12);
    }
}

TEST_CASE("reordering gap and recovery of D_R") {
    TimeGrid lg = TimeGrid::lag(128, 0.1);
    OscillatorSpec os{2.0 * pi * 3.0 / lg.period(), 2.0};
    Signal Z = reorder_gap_Z_grid(os, lg);
    for (std::size_t j = 0; j < lg.n; ++j) CHECK(std::abs(Z.values[Eigen::Index(j)] - reorder_gap_Z(os, lg.t(j))) < 1e-12);
    Signal D = recover_DR_from_Z(Z, os.hbar);
    for (std::size_t j = 0; j < lg.n; ++j) CHECK(std::abs(D.values[Eigen::Index(j)] - retarded_response(os, lg.t(j))) < 1e-12);
    GaussianState st{0.4, 0.0};
    double s = 0.6, s2 = -0.2;
    for (double tau : {-1.0, 0.0, 2.3}) {
        cd gap = s_ordered_kernel(os, st, OrderingParam(s), tau, 0.0) - s_ordered_kernel(os, st, OrderingParam(s2), tau, 0.0);
        CHECK(std::abs(gap - (s2 - s) * reorder_gap_Z(os, tau)) < 1e-14);
    }
}

TEST_CASE("periodicity requirement") {
    TimeGrid g(64, 0.1, 0.0, TimeOrder::cyclic);
    CHECK_NOTHROW(require_periodic(OscillatorSpec{2.0 * pi * 4.0 / g.period(), 1.0}, g));
    CHECK_THROWS_AS(require_periodic(OscillatorSpec{1.0, 1.0}, g), Error);
}

TEST_CASE("states and quasidistributions") {
    CHECK_THROWS_AS(GaussianState({-0.1, 0.0}).validate(), Error);
    CHECK_THROWS_AS(GaussianState({0.1, 1.0}).validate(), Error);
    // a squeezed state has no positive P-function
    GaussianState sq{0.2, std::sqrt(0.2 * 1.2)};
    CHECK_THROWS_AS(quasi_covariance(sq, OrderingParam(1.0)), Error);
    CHECK_NOTHROW(quasi_covariance(sq, OrderingParam(0.0)));
    Eigen::Matrix2d S = quasi_covariance(GaussianState{0.5, 0.0}, OrderingParam(-1.0));
    CHECK(S.trace() == doctest::Approx(1.5));
}

TEST_CASE("classical in-field") {
    OscillatorSpec os{1.2, 0.8};
    cd al(0.3, -0.7);
    double t = 0.9;
    CHECK(classical_infield(al, os, t) == doctest::Approx(std::sqrt(0.4) * 2.0 * std::real(al * std::exp(-I * 1.2 * t))));
}

TEST_CASE("Monte Carlo quasiaverage") {
    OscillatorSpec os{1.0, 1.0};
    GaussianState st{0.3, cd(0.1, 0.05)};
    TimeGrid g(6, 0.4);
    OrderingParam p(0.0);
    McKernel a = mc_quasiaverage(os, st, p, g, 200000, 99);
    McKernel b = mc_quasiaverage(os, st, p, g, 200000, 99);
    CHECK((a.mean.values - b.mean.values).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a.cos_coefficient == b.cos_coefficient);
    McKernel c = mc_quasiaverage(os, st, p, g, 200000, 100);
    CHECK(c.cos_coefficient != a.cos_coefficient);
    double z = (a.cos_coefficient - os.hbar * (st.nbar + p.s_minus())) / a.cos_coefficient_se;
    CHECK(std::abs(z) < 4.0);
    // shard boundary: a partial last shard
    McKernel d = mc_quasiaverage(os, st, p, g, mc_shard_size + 17, 5);
    CHECK(d.n_samples == mc_shard_size + 17);
    TwoPointKernel K = s_ordered_kernel_grid(os, st, p, g);
    CHECK((a.mean.values - K.values).cwiseAbs().maxCoeff() < 6.0 * a.std_error.values.cwiseAbs().maxCoeff());
}
