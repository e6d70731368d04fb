#include "doctest.h"

#include "keldysh/stationary.hpp"

#include <random>

using namespace keldysh;

namespace {

Signal noise(const TimeGrid& g, std::uint64_t seed) {
    std::mt19937_64 eng(seed);
    std::normal_distribution<double> nd;
    Signal s(g);
    for (Eigen::Index j = 0; j < s.values.size(); ++j) s.values[j] = cd(nd(eng), nd(eng));
    return s;
}

double maxdiff(const CVec& a, const CVec& b) { return (a - b).cwiseAbs().maxCoeff(); }

// O(n^2) reference: coefficients of exp(-i w_k (t - t0)), masked, resummed
Signal naive_project(const Signal& f, Sign sign, double s) {
    const TimeGrid& g = f.grid;
    long n = long(g.n);
    CVec out = CVec::Zero(n);
    for (long k = 0; k < n; ++k) {
        long b = k <= n / 2 ? k : k - n;
        cd c = 0.0;
        for (long j = 0; j < n; ++j) c += f.values[j] * std::exp(2.0 * pi * I * double(b * j) / double(n));
        c /= double(n);
        double th;
        if (b == 0 || (n % 2 == 0 && k == n / 2))
            th = 0.5;
        else
            th = ((b > 0) == (sign == Sign::plus)) ? 1.0 : 0.0;
        double m = s * th + 0.5 * (1.0 - s);
        for (long j = 0; j < n; ++j) out[j] += m * c * std::exp(-2.0 * pi * I * double(b * j) / double(n));
    }
    return Signal(g, out);
}

}  // namespace

TEST_CASE("spectral projection agrees with a direct transform") {
    for (std::size_t n : {15u, 16u}) {
        TimeGrid g(n, 0.3, 1.7);
        Signal f = noise(g, n);
        for (double s : {1.0, 0.2, -1.0})
            for (Sign sg : {Sign::plus, Sign::minus}) CHECK(maxdiff(project_s(f, OrderingParam(s), sg).values, naive_project(f, sg, s).values) < 1e-12);
    }
}

TEST_CASE("single modes") {
    TimeGrid g(64, 0.1);
    double w = 2.0 * pi * 5.0 / g.period();
    Signal e(g), c(g), half(g);
    for (std::size_t j = 0; j < g.n; ++j) {
        e.values[Eigen::Index(j)] = std::exp(-I * w * g.t(j));
        c.values[Eigen::Index(j)] = std::cos(w * g.t(j));
        half.values[Eigen::Index(j)] = 0.5 * std::exp(-I * w * g.t(j));
    }
    CHECK(maxdiff(project_pm(e, Sign::plus).values, e.values) < 1e-13);
    CHECK(project_pm(e, Sign::minus).values.cwiseAbs().maxCoeff() < 1e-13);
    CHECK(maxdiff(project_pm(c, Sign::plus).values, half.values) < 1e-13);
}

TEST_CASE("s-weighted projections") {
    TimeGrid g(32, 0.1);
    Signal f = noise(g, 7);
    CHECK(maxdiff(project_s(f, OrderingParam(0.0), Sign::plus).values, 0.5 * f.values) < 1e-13);
    CHECK(maxdiff(project_s(f, OrderingParam(0.0), Sign::minus).values, 0.5 * f.values) < 1e-13);
    CHECK(maxdiff(project_s(f, OrderingParam(1.0), Sign::plus).values, project_pm(f, Sign::plus).values) < 1e-13);
    CHECK(maxdiff(project_s(f, OrderingParam(-1.0), Sign::plus).values, project_pm(f, Sign::minus).values) < 1e-13);
    OrderingParam p(0.35);
    CVec want = p.s * project_pm(f, Sign::plus).values + p.s_minus() * f.values;
    CHECK(maxdiff(project_s(f, p, Sign::plus).values, want) < 1e-13);
}

TEST_CASE("projector algebra on random signals") {
    TimeGrid g(128, 0.05);
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        Signal f = noise(g, seed);
        Signal p = project_pm(f, Sign::plus), m = project_pm(f, Sign::minus);
        CHECK(maxdiff(p.values + m.values, f.values) < 1e-12);

        // conjugation and adjoint hold for every s
        OrderingParam s(-0.4);
        Signal h = noise(g, seed + 100);
        CVec lhs = project_s(f, s, Sign::plus).values.conjugate();
        CHECK(maxdiff(lhs, project_s(Signal(g, f.values.conjugate()), s, Sign::minus).values) < 1e-12);
        CHECK(std::abs(bilinear(project_s(f, s, Sign::plus), h) - bilinear(f, project_s(h, s, Sign::minus))) < 1e-10);

        // idempotency off the zero and Nyquist bins
        CVec c = fourier_coeffs(f.values);
        c[0] = 0.0;
        c[64] = 0.0;
        Signal q(g, fourier_synth(c));
        Signal qp = project_pm(q, Sign::plus);
        CHECK(maxdiff(project_pm(qp, Sign::plus).values, qp.values) < 1e-12);
        CHECK(project_pm(qp, Sign::minus).values.cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("zero bin is split in half") {
    TimeGrid g(16, 0.1);
    Signal one(g, CVec::Ones(16));
    CHECK(maxdiff(project_pm(one, Sign::plus).values, 0.5 * one.values) < 1e-14);
    CHECK(theta_bin(g, 0, Sign::plus) == 0.5);
    CHECK(theta_bin(g, 8, Sign::minus) == 0.5);
    CHECK(theta_bin(g, 3, Sign::plus) == 1.0);
    CHECK(theta_bin(g, 3, Sign::minus) == 0.0);
}

TEST_CASE("pair kernel projection of a stationary kernel") {
    TimeGrid lg = TimeGrid::lag(33, 0.2);
    StationaryKernel K = StationaryKernel::from_function(lg, [](double t) { return std::exp(-t * t) * cd(std::cos(2.0 * t), 0.3 * std::sin(t)); });
    TwoPointKernel R = K.realize();
    TwoPointKernel a = pair_kernel_project(R, Arg::first, Sign::plus);
    TwoPointKernel b = pair_kernel_project(R, Arg::second, Sign::minus);
    CHECK((a.values - b.values).cwiseAbs().maxCoeff() < 1e-10);
    // F+ on both arguments: only the zero bin survives, at weight 1/4
    TwoPointKernel pp = pair_kernel_project(a, Arg::second, Sign::plus);
    cd dc = K.coeffs()[0];
    CHECK((pp.values - CMat::Constant(33, 33, 0.25 * dc)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("identity kernel rows give delta(+-) samples") {
    TimeGrid g(16, 0.1);
    TwoPointKernel Id(g, CMat::Identity(16, 16).cast<cd>() / g.dt);
    TwoPointKernel P = pair_kernel_project(Id, Arg::first, Sign::plus);
    Signal col(g, Id.values.col(3));
    CHECK(maxdiff(P.values.col(3), project_pm(col, Sign::plus).values) < 1e-12);
    TwoPointKernel bad = Id;
    bad.grid = TimeGrid(8, 0.1);
    CHECK_THROWS_AS(pair_kernel_project(bad, Arg::first, Sign::plus), Error);
}
