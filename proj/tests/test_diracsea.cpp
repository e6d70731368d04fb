#include "doctest.h"

#include "keldysh/diracsea.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

using namespace keldysh;

namespace {

// one-loop Feynman-parameter form, evaluated independently of the dispersive route
cd feynman_parameter_R(double k2, double sgn, const DiracSeaSpec& sp) {
    double a = k2 / (sp.mu0 * sp.mu0);
    auto f = [&](double x) {
        double g = std::abs(1.0 - x * (1.0 - x) * a);
        return g > 0.0 ? x * (1.0 - x) * std::log(g) : 0.0;
    };
    boost::math::quadrature::tanh_sinh<double> ts;
    double re = 0.0, in = 0.0;
    if (a > 4.0) {
        double xm = 0.5 * (1.0 - std::sqrt(1.0 - 4.0 / a));
        re = 2.0 * (ts.integrate(f, 0.0, xm) + ts.integrate(f, xm, 0.5));
        // measure of x(1-x) over the region where the log argument is negative
        in = 2.0 * (1.0 / 12.0 - (xm * xm / 2.0 - xm * xm * xm / 3.0));
    } else {
        re = 2.0 * ts.integrate(f, 0.0, 0.5);
    }
    return -(2.0 * sp.alpha / pi) * cd(re, -pi * sgn * in);
}

template <class F>
std::string code_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return "";
}

}  // namespace

TEST_CASE("threshold function") {
    CHECK(F_threshold(0.5) == 0.0);
    CHECK(F_threshold(1.0) == 0.0);
    CHECK(F_threshold(1e12) == doctest::Approx(1.0));
    CHECK(F_threshold(2.0) == doctest::Approx(1.25 * std::sqrt(0.5)));
    auto f = [](double u) { return u > 0.0 ? F_threshold(1.0 / u) : 1.0; };
    double v = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, 1.0, 15, 1e-14);
    CHECK(std::abs(v - 0.8) < 1e-10);
}

TEST_CASE("observable polarization against the Feynman-parameter integral") {
    DiracSeaSpec sp{1.3, 7.2973525693e-3};
    double m2 = sp.mu0 * sp.mu0;
    for (double k2 : {-50.0, -2.0, -1e-2, 1e-2, 1.0, 3.9, 4.3, 9.0, 60.0})
        for (double sgn : {1.0, -1.0}) {
            cd want = feynman_parameter_R(k2 * m2, sgn, sp);
            cd got = R_obs(k2 * m2, sgn, sp);
            CHECK(std::abs(got - want) < 1e-9 * std::abs(want));
        }
    // imaginary part is the threshold function
    cd r = R_obs(9.0 * m2, 1.0, sp);
    CHECK(r.imag() == doctest::Approx(sp.alpha / 3.0 * F_threshold(9.0 / 4.0)).epsilon(1e-10));
    CHECK(R_obs(0.0, 1.0, sp) == cd(0.0));
    // small k^2
    double k2 = 1e-4 * m2;
    CHECK(std::abs(R_obs(k2, 1.0, sp).real() / k2 - sp.alpha / (15.0 * pi * m2)) < 1e-3 * sp.alpha / (15.0 * pi * m2));
}

TEST_CASE("finite-eps route approaches the exact one") {
    DiracSeaSpec sp;
    RObsOptions o;
    o.exact = false;
    o.eps = 1e-7;
    for (double k2 : {-3.0, 2.0, 8.0, 30.0}) {
        cd a = R_obs(k2, 1.0, sp), b = R_obs(k2, 1.0, sp, o);
        CHECK(std::abs(a - b) < 1e-5 * std::abs(a));
    }
    o.eps = 0.0;
    CHECK(code_of([&] { R_obs(2.0, 1.0, sp, o); }) == "invalid_epsilon");
}

TEST_CASE("positive-frequency polarization") {
    DiracSeaSpec sp;
    double R0v = -0.37;
    for (double kv : {0.0, 0.7, 3.0})
        for (double k2 : {4.5, 10.0, 80.0}) {
            MomentumPoint k(std::sqrt(k2 + kv), kv);
            PolarizationValue p = Pi_plus(k, sp, R0v), c = Pi_plus_closed_form(k, sp);
            CHECK(std::abs(p.scalar - c.scalar) < 1e-9 * std::abs(c.scalar));
            CHECK(Pi_plus(k.reflected(), sp, R0v).scalar == cd(0.0));
            // independent of the constant
            CHECK(std::abs(Pi_plus(k, sp, 0.0).scalar - p.scalar) < 1e-15);
            PolarizationValue f = Pi_F_reg(k.reflected(), sp, R0v);
            CHECK(std::abs(f.scalar - Pi_R_reg(k, sp, R0v).scalar) < 1e-15);
        }
    // below threshold and spacelike
    CHECK(std::abs(Pi_plus(MomentumPoint(1.5, 0.2), sp, R0v).scalar) < 1e-15);
    CHECK(std::abs(Pi_plus(MomentumPoint(0.5, 3.0), sp, R0v).scalar) < 1e-15);
}

TEST_CASE("polarization tensor is transverse") {
    DiracSeaSpec sp;
    std::array<double, 3> kvec{0.3, -1.1, 0.8};
    double kv = 0.09 + 1.21 + 0.64;
    for (double k0 : {-4.0, 0.5, 2.5}) {
        MomentumPoint k(k0, kv);
        Tensor4 T = polarization_tensor(Pi_R_reg(k, sp, 0.1), kvec);
        CHECK(transversality_residual(T, k0, kvec) < 1e-14);
    }
    CHECK(code_of([&] { polarization_tensor(Pi_R_reg(MomentumPoint(1.0, 1.0), sp, 0.0), kvec); }) == "invalid_momentum");
}

TEST_CASE("subtraction constant") {
    DiracSeaSpec sp;
    PVScheme s = solve_scheme(build_system(0, geometric_masses(1.0, 20.0, 4), false));
    CHECK(std::abs(R0_quadrature(s, sp) - R0(s, sp)) < 1e-8 * std::abs(R0(s, sp)));
    CHECK(R0(unregularized_scheme(1.0), sp) == 0.0);
}

TEST_CASE("regularized spectral function") {
    using big = boost::multiprecision::cpp_bin_float_50;
    using BMat = Eigen::Matrix<big, Eigen::Dynamic, Eigen::Dynamic>;
    using BVec = Eigen::Matrix<big, Eigen::Dynamic, 1>;
    auto masses = geometric_masses(1.0, 3.0, 6);
    PVScheme s = solve_scheme(build_system(1, masses, false));
    // rows sum_l (-1)^l d_l mu_l^{2n} = 0 for n = 0..3 and the log rows for n = 2, 3, solved in 50 digits
    BMat A(6, 6);
    BVec b(6);
    int r = 0;
    auto row = [&](int n, bool lg) {
        for (int l = 1; l <= 6; ++l) {
            big z = big(masses[std::size_t(l)]);
            A(r, l - 1) = (l % 2 ? -1 : 1) * pow(z, 2 * n) * (lg ? big(2 * log(z)) : big(1));
        }
        b(r) = lg ? big(0) : big(-1);
        ++r;
    };
    for (int n = 0; n <= 3; ++n) row(n, false);
    row(2, true);
    row(3, true);
    BVec d = A.fullPivLu().solve(b);
    for (int l = 1; l <= 6; ++l) CHECK(s.d[std::size_t(l)] == doctest::Approx(static_cast<double>(d(l - 1))).epsilon(1e-14));
    auto oracle = [&](double k2, big& scale) {
        big acc = 0;
        scale = 0;
        for (std::size_t l = 0; l < masses.size(); ++l) {
            big y = big(k2) / (4 * big(masses[l]) * big(masses[l]));
            big F = y > 1 ? (1 + 0.5 / y) * sqrt(1 - 1 / y) : big(0);
            big dl = l == 0 ? big(1) : d(Eigen::Index(l) - 1);
            acc += (l % 2 ? -1 : 1) * dl * F;
            scale += abs(dl * F);
        }
        scale /= 6 * boost::math::constants::pi<big>();
        return static_cast<double>(acc / (6 * boost::math::constants::pi<big>()));
    };
    // direct sum: roundoff relative to the size of the terms
    for (double k2 : {2.0, 50.0, 1e4, 1e6}) {
        big sc;
        double want = oracle(k2, sc);
        CHECK(std::abs(K_reg(k2, s) - want) <= 1e-15 * static_cast<double>(sc) + 1e-12 * std::abs(want));
    }
    // far above the thresholds the series keeps full relative accuracy
    for (double k2 : {1e7, 1e8, 1e10}) {
        big sc;
        double want = oracle(k2, sc);
        CHECK(std::abs(K_reg(k2, s) - want) < 1e-10 * std::abs(want));
    }
}

TEST_CASE("coordinate-space kernel") {
    PVScheme s = solve_scheme(build_system(1, geometric_masses(1.0, 3.0, 6), false));
    double muN = s.masses.back();
    double sc = 0.0;
    double a = K_reg_coordinate(0.5, 1, s, 10.0 * muN, &sc);
    CHECK(sc > 0.0);
    CHECK(K_reg_coordinate(0.5, -1, s, 10.0 * muN) == -a);
    CHECK(K_reg_coordinate(-0.5, 1, s, 10.0 * muN) == 0.0);
    double b = K_reg_coordinate(0.5, 1, s, 20.0 * muN);
    CHECK(std::abs(a - b) < 1e-3 * sc);
    CHECK(code_of([&] { K_reg_coordinate(0.5, 1, s, muN); }) == "cutoff_too_small");
    CHECK(code_of([&] { K_reg_coordinate(0.5, 0, s, 10.0 * muN); }) == "invalid_argument");
}
