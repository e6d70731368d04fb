#include "doctest.h"

#include "keldysh/medium.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

using namespace keldysh;

namespace {

template <class F>
std::string code_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return "";
}

double toy_error(const OneModeToy& toy, double dt, double T) {
    auto n = std::size_t(std::llround(T / dt)) + 1;
    auto X = dress_toy_volterra(toy, dt, n);
    double e = 0.0;
    for (std::size_t m = 0; m < n; ++m) e = std::max(e, std::abs(X[m] - dress_toy_closed_form(toy, dt * double(m))));
    return e;
}

}  // namespace

TEST_CASE("one-mode toy converges at second order") {
    OneModeToy toy{1.0, 0.3};
    CHECK(toy.Omega() == doctest::Approx(std::sqrt(1.3)));
    double e1 = toy_error(toy, 0.02, 10.0), e2 = toy_error(toy, 0.01, 10.0), e3 = toy_error(toy, 0.005, 10.0);
    CHECK(e2 < 1e-3);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.1));
    CHECK(e2 / e3 == doctest::Approx(4.0).epsilon(0.1));
    auto X = dress_toy_volterra(toy, 0.01, 1001);
    ToyResidual r = toy_equation_residual(toy, X, 0.01);
    CHECK(r.equation < 1e-3);
    CHECK(r.initial_slope < 1e-3);
    CHECK(code_of([] { OneModeToy{1.0, -2.0}.validate(); }) == "invalid_spec");
    CHECK(code_of([&] { dress_toy_volterra(toy, 0.01, 1); }) == "invalid_grid");
}

TEST_CASE("toy spectrum is the transform of the closed form") {
    OneModeToy toy{1.2, 0.5};
    double eps = 0.2;
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    for (double w : {-2.0, 0.3, 1.5}) {
        cd sum = 0.0;
        for (double a = 0.0; a < 250.0; a += 1.0) {
            auto re = [&](double t) { return std::real(std::exp(cd(-eps, w) * t)) * dress_toy_closed_form(toy, t); };
            auto im = [&](double t) { return std::imag(std::exp(cd(-eps, w) * t)) * dress_toy_closed_form(toy, t); };
            sum += cd(GK::integrate(re, a, a + 1.0, 0), GK::integrate(im, a, a + 1.0, 0));
        }
        CHECK(std::abs(sum - dress_toy_spectrum(toy, w, eps)) < 1e-9);
    }
}

TEST_CASE("grid Dyson solve") {
    OneModeToy toy{1.0, 0.4};
    TimeGrid g(200, 0.02);
    OscillatorSpec os{toy.omega0, 1.0};
    TwoPointKernel D = retarded_response_grid(os, g);
    TwoPointKernel P = toy_pi_grid(toy, g);
    TwoPointKernel X = dress_retarded_grid(D, P);
    auto v = dress_toy_volterra(toy, g.dt, g.n);
    for (std::size_t i = 0; i < g.n; ++i) CHECK(std::abs(X.values(Eigen::Index(i), 0) - v[i]) < 1e-12);
    // stationary: column j is column 0 shifted
    CHECK(std::abs(X.values(150, 40) - X.values(110, 0)) < 1e-12);
    // the solution satisfies the equation
    CMat res = X.values - D.values - g.dt * g.dt * D.values * P.values * X.values;
    CHECK(res.cwiseAbs().maxCoeff() < 1e-12);

    OneModeToy weak{1.0, 0.02};
    TimeGrid g2(50, 0.05);
    TwoPointKernel Dw = retarded_response_grid(os, g2), Pw = toy_pi_grid(weak, g2);
    TwoPointKernel Xw = dress_retarded_grid(Dw, Pw);
    TwoPointKernel S = neumann_series(Dw, Pw, 30);
    CHECK((S.values - Xw.values).cwiseAbs().maxCoeff() < 1e-13);
    TwoPointKernel S1 = neumann_series(Dw, Pw, 1);
    CHECK((S1.values - Dw.values).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("Dyson input validation") {
    TimeGrid g(10, 0.1);
    OscillatorSpec os{1.0, 1.0};
    TwoPointKernel D = retarded_response_grid(os, g), P = toy_pi_grid(OneModeToy{1.0, 0.1}, g);
    TwoPointKernel bad = P;
    bad.values(2, 7) = 0.5;
    CHECK(code_of([&] { dress_retarded_grid(D, bad); }) == "non_retarded");
    TimeGrid cg(10, 0.1, 0.0, TimeOrder::cyclic);
    CHECK(code_of([&] { dress_retarded_grid(retarded_response_grid(os, cg), toy_pi_grid(OneModeToy{1.0, 0.1}, cg)); }) == "non_retarded");
    CHECK(code_of([&] { dress_retarded_grid(D, toy_pi_grid(OneModeToy{1.0, 0.1}, TimeGrid(10, 0.2))); }) == "grid_mismatch");

    TwoPointKernel N(g);
    N.values(1, 3) = cd(0.0, 1.0);
    CHECK(code_of([&] { noise_map(D, N); }) == "not_hermitian");
    N.values(3, 1) = cd(0.0, -1.0);
    N.values(4, 4) = 2.0;
    TwoPointKernel out = noise_map(D, N);
    CHECK((out.values - out.values.adjoint()).cwiseAbs().maxCoeff() < 1e-15);

    Signal J(g), z(g);
    J.values[3] = 1.0;
    Signal m = mean_field(D, J, z);
    for (Eigen::Index i = 0; i < 10; ++i) CHECK(m.values[i] == g.dt * D.values(i, 3));
}

TEST_CASE("dressed momentum function") {
    MediumSpec m;
    MomentumPoint k(0.8, 0.3);
    DressedValue d = dress_retarded_momentum(k, m);
    CHECK_FALSE(d.on_light_cone);
    CHECK(d.delta.weight == cd(0.0, -pi));
    CHECK(std::abs(dress_retarded_momentum_eps(k, m, 1e-9) - d.value) < 1e-6 * std::abs(d.value));
    CHECK(dress_retarded_momentum(MomentumPoint(1.0, 1.0), m).on_light_cone);
    CHECK(dress_retarded_momentum(MomentumPoint(-1.0, 0.3), m).delta.weight == cd(0.0, pi));
    CHECK(code_of([&] { dress_retarded_momentum_eps(k, m, 0.0); }) == "invalid_epsilon");
    MediumSpec bad;
    bad.hbar_c = 0.0;
    CHECK(code_of([&] { bad.validate(); }) == "invalid_spec");
}

TEST_CASE("zero-point spectrum ledger") {
    MediumSpec m;
    double eps = 1e-5;
    for (double k2 : {10.0, 40.0}) {
        MomentumPoint k(std::sqrt(k2 + 1.0), 1.0);
        SpectralDensity z = zero_point_spectrum(k, m);
        CHECK(z.smooth > 0.0);
        double fe = zero_point_finite_eps(k, m, eps) - delta_ledger_at_eps(z, eps);
        CHECK(std::abs(fe - z.smooth) < 1e-3 * z.smooth);
        // same density for negative frequency
        CHECK(zero_point_spectrum(k.reflected(), m).smooth == doctest::Approx(z.smooth).epsilon(1e-12));
    }
    // below threshold only the delta term remains
    SpectralDensity z = zero_point_spectrum(MomentumPoint(1.5, 0.5), m);
    CHECK(z.smooth == 0.0);
    REQUIRE(z.delta_terms.size() == 1);
    CHECK(z.delta_terms[0].weight.real() == doctest::Approx(pi));
    CHECK(zero_point_finite_eps(MomentumPoint(0.0, 1.0), m, eps) == 0.0);
}

TEST_CASE("time-normal vacuum noise vanishes") {
    MediumSpec m;
    TimeGrid lg = TimeGrid::lag(33, 0.25);
    VacuumPolarizationLag v = vacuum_polarization_lag(lg, 0.5, m);
    StationaryKernel n = time_normal_vacuum_noise(v.pi_F, v.pi_W);
    double scale = v.pi_W.lag.values.cwiseAbs().maxCoeff();
    CHECK(scale > 0.0);
    CHECK(n.lag.values.cwiseAbs().maxCoeff() < 1e-10 * scale);
}

TEST_CASE("gauge diagnosis") {
    MediumSpec m;
    std::array<double, 3> kv{0.0, 0.0, 1.0};
    GaugeDiagnosis d = diagnose_gauge(MomentumPoint(3.0, 1.0), kv, m);
    CHECK_FALSE(d.consistent);
    CHECK(d.delta_weight == doctest::Approx(pi));
    CHECK(d.transversality > 0.1);
    CHECK(d.projected_smooth_residual < 1e-14);
    CHECK_FALSE(d.obstruction.empty());
}

TEST_CASE("classical stochastic model") {
    WyldConfig c;
    c.osc = OscillatorSpec{1.0, 1.0};
    c.state = GaussianState{0.4, 0.0};
    c.p = OrderingParam(1.0);
    c.sigma = 0.6;
    c.grid = TimeGrid(6, 0.5);
    c.J_e = Signal(c.grid);
    c.J_e.values[1] = 1.0;
    auto n = Eigen::Index(c.grid.n);
    c.probes.push_back(Eigen::MatrixXd::Identity(n, n));
    WyldResult a = wyld_mc(c, 100000, 42), b = wyld_mc(c, 100000, 42);
    CHECK((a.cov.values - b.cov.values).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a.probe_mean[0] == b.probe_mean[0]);
    // oracle: in-field kernel plus sigma^2 R R^T / dt
    Eigen::MatrixXd R = wyld_response_matrix(c).values.real();
    Eigen::MatrixXd K = s_ordered_kernel_grid(c.osc, c.state, c.p, c.grid).values.real();
    Eigen::MatrixXd C = K + c.sigma * c.sigma * R * R.transpose() / c.grid.dt;
    double z = (a.probe_mean[0] - C.trace()) / a.probe_se[0];
    CHECK(std::abs(z) < 4.0);
    Eigen::VectorXd mean = R * c.J_e.values.real();
    for (Eigen::Index i = 0; i < n; ++i) CHECK(std::abs(a.mean.values[i].real() - mean[i]) < 5.0 * a.mean_se.values[i].real() + 1e-15);

    WyldConfig bad = c;
    bad.grid = TimeGrid(6, 0.5, 0.0, TimeOrder::cyclic);
    bad.J_e = Signal(bad.grid);
    CHECK(code_of([&] { wyld_mc(bad, 10, 1); }) == "invalid_grid");
    bad = c;
    bad.sigma = -1.0;
    CHECK(code_of([&] { wyld_mc(bad, 10, 1); }) == "invalid_argument");
    CHECK(code_of([&] { wyld_mc(c, 0, 1); }) == "invalid_argument");
    bad = c;
    bad.probes.push_back(Eigen::MatrixXd::Identity(3, 3));
    CHECK(code_of([&] { wyld_mc(bad, 10, 1); }) == "grid_mismatch");
}
