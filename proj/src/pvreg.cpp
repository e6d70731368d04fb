#include "keldysh/pvreg.hpp"

#include "keldysh/diracsea.hpp"
#include "spectral_quad.hpp"

#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace keldysh {

namespace bmp = boost::multiprecision;

void PVScheme::require_solved() const {
    if (!solved) throw Error("unsolved_scheme", "regularization scheme has not been solved");
}

std::vector<double> series_coeffs(int n_max) {
    if (n_max < 0) throw Error("invalid_argument", "series_coeffs needs n_max >= 0");
    std::vector<double> c(std::size_t(n_max) + 1, 0.0);
    c[0] = 1.0;
    if (n_max >= 2) c[2] = -3.0 / 8.0;
    for (int m = 2; m < n_max; ++m) c[std::size_t(m) + 1] = c[std::size_t(m)] * double(m) * (2.0 * m - 3.0) / (2.0 * (double(m) * m - 1.0));
    return c;
}

int minimal_mass_count(int M, bool impose_B0) { return 2 * M + 4 + (impose_B0 ? 1 : 0); }

std::vector<double> geometric_masses(double mu0, double Y, int N) {
    if (!(mu0 > 0.0) || !(Y > 1.0) || N < 0) throw Error("invalid_argument", "geometric masses need mu0 > 0, Y > 1, N >= 0");
    std::vector<double> m(std::size_t(N) + 1);
    for (int l = 0; l <= N; ++l) m[std::size_t(l)] = mu0 * std::pow(Y, l);
    return m;
}

LinearSystem build_system(int M, const std::vector<double>& masses, bool impose_B0) {
    if (M < 0) throw Error("invalid_argument", "smoothness order M must be >= 0");
    int N = int(masses.size()) - 1;
    if (N != minimal_mass_count(M, impose_B0)) {
        std::ostringstream os;
        os << "wrong mass count: need mu_0 plus " << minimal_mass_count(M, impose_B0) << " regularization masses, got " << N;
        throw Error("wrong_mass_count", os.str());
    }
    if (!(masses[0] > 0.0)) throw Error("invalid_masses", "masses must be positive");
    for (int l = 1; l <= N; ++l) {
        if (masses[std::size_t(l)] == masses[std::size_t(l) - 1]) throw Error("duplicate_masses", "regularization masses must be distinct");
        if (!(masses[std::size_t(l)] > masses[std::size_t(l) - 1])) throw Error("invalid_masses", "masses must be strictly increasing");
    }
    LinearSystem sys;
    sys.M = M;
    sys.masses = masses;
    sys.impose_B0 = impose_B0;
    sys.rows.push_back({'A', 0});
    if (impose_B0) sys.rows.push_back({'B', 0});
    sys.rows.push_back({'A', 1});
    for (int n = 2; n <= M + 2; ++n) {
        sys.rows.push_back({'A', n});
        sys.rows.push_back({'B', n});
    }
    for (auto& r : sys.rows) sys.labels.push_back(std::string(1, r.kind) + "(" + std::to_string(2 * r.n) + ")");
    sys.matrix.resize(Eigen::Index(sys.rows.size()), N);
    sys.rhs.resize(Eigen::Index(sys.rows.size()));
    for (std::size_t i = 0; i < sys.rows.size(); ++i) {
        const auto& r = sys.rows[i];
        for (int l = 1; l <= N; ++l) {
            double z = masses[std::size_t(l)] / masses[0];
            double v = (l % 2 ? -1.0 : 1.0) * std::pow(z, 2 * r.n);
            if (r.kind == 'B') v *= 2.0 * std::log(z);
            sys.matrix(Eigen::Index(i), l - 1) = v;
        }
        sys.rhs[Eigen::Index(i)] = r.kind == 'A' ? -1.0 : 0.0;
    }
    return sys;
}

namespace {

template <unsigned Digits10>
void solve_mp(const LinearSystem& sys, PVScheme& out) {
    using Real = bmp::number<bmp::mpfr_float_backend<Digits10>, bmp::et_off>;
    using Mat = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
    using Vec = Eigen::Matrix<Real, Eigen::Dynamic, 1>;
    int N = int(sys.masses.size()) - 1;
    int R = int(sys.rows.size());
    Real mu0 = sys.masses[0];
    Mat A(R, N);
    Vec b(R);
    for (int i = 0; i < R; ++i) {
        const auto& r = sys.rows[std::size_t(i)];
        for (int l = 1; l <= N; ++l) {
            Real z = Real(sys.masses[std::size_t(l)]) / mu0;
            Real v = bmp::pow(z, 2 * r.n);
            if (l % 2) v = -v;
            if (r.kind == 'B') v *= 2 * bmp::log(z);
            A(i, l - 1) = v;
        }
        b(i) = r.kind == 'A' ? Real(-1) : Real(0);
    }
    Vec cs(N), rs(R);
    Mat S = A;
    for (int j = 0; j < N; ++j) {
        Real m = 0;
        for (int i = 0; i < R; ++i) m = bmp::fmax(m, bmp::abs(S(i, j)));
        cs(j) = m > 0 ? Real(1) / m : Real(1);
        for (int i = 0; i < R; ++i) S(i, j) *= cs(j);
    }
    for (int i = 0; i < R; ++i) {
        Real m = 0;
        for (int j = 0; j < N; ++j) m = bmp::fmax(m, bmp::abs(S(i, j)));
        rs(i) = m > 0 ? Real(1) / m : Real(1);
        for (int j = 0; j < N; ++j) S(i, j) *= rs(i);
    }
    Vec bs = rs.cwiseProduct(b);
    Eigen::FullPivLU<Mat> lu(S);
    if (!lu.isInvertible()) throw Error("singular_system", "regularization system is singular");
    Vec y = lu.solve(bs);
    Vec d = cs.cwiseProduct(y);

    out.d.assign(std::size_t(N) + 1, 0.0);
    out.d[0] = 1.0;
    for (int l = 1; l <= N; ++l) out.d[std::size_t(l)] = double(d(l - 1));
    out.row_residuals.clear();
    for (int i = 0; i < R; ++i) {
        Real acc = 0, mag = bmp::abs(b(i));
        for (int j = 0; j < N; ++j) {
            Real t = A(i, j) * d(j);
            acc += t;
            mag += bmp::abs(t);
        }
        out.row_residuals.push_back(double(bmp::abs(acc - b(i)) / (mag > 0 ? mag : Real(1))));
    }
}

}  // namespace

PVScheme solve_scheme(const LinearSystem& sys, SolveOptions opt) {
    PVScheme s;
    s.M = sys.M;
    s.masses = sys.masses;
    s.impose_B0 = sys.impose_B0;
    s.row_labels = sys.labels;
    switch (opt.precision) {
        case Precision::bits128: solve_mp<38>(sys, s); break;
        case Precision::bits256: solve_mp<77>(sys, s); break;
        case Precision::bits512: solve_mp<154>(sys, s); break;
    }
    double worst = *std::max_element(s.row_residuals.begin(), s.row_residuals.end());
    if (!(worst < opt.residual_tol)) {
        std::ostringstream os;
        os << "regularization system residual " << worst << " exceeds tolerance " << opt.residual_tol;
        throw Error("residual_failure", os.str());
    }
    s.solved = true;
    double dmax = 0.0;
    for (std::size_t l = 1; l < s.d.size(); ++l) dmax = std::max(dmax, std::abs(s.d[l]));
    AsymptoticComparison a = asymptotic_comparison(s);
    if (dmax > opt.boundedness_limit || std::abs(a.d2_asymptotic) > opt.boundedness_limit) {
        std::ostringstream os;
        os << "unbounded coefficients: max |d_l| = " << dmax << ", ln(mu1/mu0)/ln(mu2/mu1) = " << a.d2_asymptotic;
        s.warnings.push_back(os.str());
    }
    return s;
}

PVScheme unregularized_scheme(double mu0) {
    if (!(mu0 > 0.0)) throw Error("invalid_masses", "mu0 must be positive");
    PVScheme s;
    s.M = 0;
    s.masses = {mu0};
    s.d = {1.0};
    s.solved = true;
    return s;
}

AsymptoticComparison asymptotic_comparison(const PVScheme& s) {
    s.require_solved();
    AsymptoticComparison a;
    if (s.N() < 2) return a;
    a.d1 = s.d[1];
    a.d2 = s.d[2];
    a.d2_asymptotic = std::log(s.masses[1] / s.masses[0]) / std::log(s.masses[2] / s.masses[1]);
    a.d1_asymptotic = 1.0 + a.d2_asymptotic;
    for (std::size_t l = 3; l < s.d.size(); ++l) a.max_rest = std::max(a.max_rest, std::abs(s.d[l]));
    return a;
}

MomentCheck check_moments(const PVScheme& s, int n, double Lambda_sq) {
    s.require_solved();
    if (n < 0) throw Error("invalid_argument", "moment order must be >= 0");
    double top = 4.0 * s.masses.back() * s.masses.back();
    if (!(Lambda_sq > top)) throw Error("cutoff_too_small", "cutoff must exceed the largest threshold 4 mu_N^2");
    std::vector<double> breaks;
    for (double m : s.masses) breaks.push_back(4.0 * m * m);
    double lo = 4.0 * s.mu0() * s.mu0();

    MomentCheck r;
    r.integral = detail::log_segment_integral([&](double m2) { return K_reg(m2, s); }, n, lo, Lambda_sq, breaks);
    r.unregularized = detail::log_segment_integral([&](double m2) { return F_threshold(m2 / lo) / (6.0 * pi); }, n, lo, Lambda_sq, {});

    r.remainder = detail::moment_tail(s, n, Lambda_sq);
    r.residual = std::abs(r.integral + r.remainder) / std::abs(r.unregularized);
    return r;
}

namespace detail {

double moment_tail(const PVScheme& s, int n, double Lambda_sq) {
    const int m_max = 200;
    std::vector<double> c = series_coeffs(m_max);
    double ratio = 4.0 * s.masses.back() * s.masses.back() / Lambda_sq;
    double tail = 0.0;
    int m_lo = std::max(n + 2, 1);
    if (s.N() > 0) m_lo = std::max(m_lo, s.M + 3);  // lower powers vanish by the moment rows
    for (int m = m_lo; m <= m_max; ++m) {
        // 4^m S_m Lambda^{-2m} as sum_l (-1)^l d_l (4 mu_l^2 / Lambda^2)^m
        double Sm = 0.0;
        for (std::size_t l = 0; l < s.masses.size(); ++l)
            Sm += (l % 2 ? -1.0 : 1.0) * s.d[l] * std::pow(4.0 * s.masses[l] * s.masses[l] / Lambda_sq, m);
        tail += c[std::size_t(m)] * Sm * std::pow(Lambda_sq, n + 1) / double(m - n - 1);
        if (m > n + 4 && std::pow(ratio, m) < 1e-18) break;
    }
    return tail / (6.0 * pi);
}

}  // namespace detail

}  // namespace keldysh
