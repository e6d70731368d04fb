#include "doctest.h"

#include "keldysh/pvreg.hpp"
#include "keldysh/grid.hpp"

#include <cmath>

using namespace keldysh;

namespace {

std::string code_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return "";
}

// sum_l (-1)^l d_l z_l^{2n} (2 ln z_l)^b in long double, relative to the largest term
long double row_residual(const PVScheme& s, int n, bool b) {
    long double sum = 0.0L, big = 0.0L;
    for (std::size_t l = 0; l < s.masses.size(); ++l) {
        long double z = (long double)s.masses[l] / s.masses[0];
        long double t = (l % 2 ? -1.0L : 1.0L) * s.d[l] * std::pow(z, 2 * n) * (b ? 2.0L * std::log(z) : 1.0L);
        sum += t;
        big = std::max(big, std::fabs(t));
    }
    return std::fabs(sum) / big;
}

}  // namespace

TEST_CASE("series coefficients: sqrt(1 - x) (1 + x/2)") {
    auto c = series_coeffs(30);
    // generalized binomial coefficients of sqrt(1 - x)
    std::vector<double> b(31);
    b[0] = 1.0;
    for (int m = 1; m <= 30; ++m) b[std::size_t(m)] = b[std::size_t(m) - 1] * (0.5 - (m - 1)) / m * -1.0;
    CHECK(c[0] == 1.0);
    for (int m = 1; m <= 30; ++m) CHECK(c[std::size_t(m)] == doctest::Approx(b[std::size_t(m)] + 0.5 * b[std::size_t(m) - 1]).epsilon(1e-14));
    CHECK(c[1] == 0.0);
    CHECK_THROWS_AS(series_coeffs(-1), Error);
}

TEST_CASE("mass count and system validation") {
    CHECK(minimal_mass_count(0, false) == 4);
    CHECK(minimal_mass_count(0, true) == 5);
    CHECK(minimal_mass_count(2, true) == 9);
    CHECK(code_of([] { build_system(0, geometric_masses(1.0, 10.0, 3), false); }) == "wrong_mass_count");
    CHECK(code_of([] { build_system(0, {1.0, 2.0, 2.0, 3.0, 4.0}, false); }) == "duplicate_masses");
    CHECK(code_of([] { build_system(0, {1.0, 3.0, 2.0, 5.0, 6.0}, false); }) == "invalid_masses");
    CHECK(code_of([] { build_system(-1, {1.0}, false); }) == "invalid_argument");
    LinearSystem sys = build_system(1, geometric_masses(1.0, 10.0, 7), true);
    CHECK(sys.matrix.rows() == 7);
    CHECK(sys.matrix.cols() == 7);
    CHECK(sys.labels.front() == "A(0)");
    CHECK(sys.labels[1] == "B(0)");
    CHECK(code_of([] { PVScheme().require_solved(); }) == "unsolved_scheme");
    CHECK(code_of([] { unregularized_scheme(0.0); }) == "invalid_masses");
}

TEST_CASE("widely spaced masses") {
    PVScheme s = solve_scheme(build_system(0, geometric_masses(1.0, 1e3, 5), true));
    CHECK(s.solved);
    CHECK(s.d[0] == 1.0);
    CHECK(s.warnings.empty());
    for (double r : s.row_residuals) CHECK(r < 1e-10);
    for (int n : {0, 1, 2}) CHECK(row_residual(s, n, false) < 1e-15);
    CHECK(row_residual(s, 0, true) < 1e-15);
    CHECK(row_residual(s, 2, true) < 1e-15);
    AsymptoticComparison a = asymptotic_comparison(s);
    CHECK(a.d2_asymptotic == doctest::Approx(1.0));
    CHECK(std::abs(a.d1 / 2.0 - 1.0) < 0.1);
    CHECK(std::abs(a.d2 - 1.0) < 0.1);
    CHECK(a.max_rest < 0.1);
}

TEST_CASE("precision backends agree") {
    LinearSystem sys = build_system(1, geometric_masses(1.0, 30.0, 6), false);
    SolveOptions o;
    o.precision = Precision::bits128;
    PVScheme a = solve_scheme(sys, o);
    o.precision = Precision::bits512;
    PVScheme b = solve_scheme(sys, o);
    for (std::size_t l = 0; l < a.d.size(); ++l) CHECK(a.d[l] == doctest::Approx(b.d[l]).epsilon(1e-13));
}

TEST_CASE("crowded masses trigger the boundedness warning") {
    PVScheme s = solve_scheme(build_system(0, {1.0, 100.0, 101.0, 1e4, 1e6}, false));
    REQUIRE_FALSE(s.warnings.empty());
    CHECK(s.warnings[0].find("unbounded") != std::string::npos);
}

TEST_CASE("regularized moments fall off with the cutoff") {
    PVScheme s = solve_scheme(build_system(0, geometric_masses(1.0, 1e3, 5), true));
    double top = 4.0 * s.masses.back() * s.masses.back();
    for (int n : {0, 1}) {
        double prev = check_moments(s, n, 1e3 * top).residual;
        for (double f : {1e4, 1e5, 1e6}) {
            double r = check_moments(s, n, f * top).residual;
            CHECK(r < prev);
            prev = r;
        }
    }
    CHECK(code_of([&] { check_moments(s, 0, 0.5 * top); }) == "cutoff_too_small");
    CHECK(code_of([&] { check_moments(s, -1, 2.0 * top); }) == "invalid_argument");
}
