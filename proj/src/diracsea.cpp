#include "keldysh/diracsea.hpp"

#include "spectral_quad.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace keldysh {

void DiracSeaSpec::validate() const {
    if (!(mu0 > 0.0)) throw Error("invalid_spec", "mu0 must be > 0");
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error("invalid_spec", "alpha must lie in (0, 1)");
}

double F_threshold(double y) {
    if (!(y > 1.0)) return 0.0;
    return (1.0 + 0.5 / y) * std::sqrt(1.0 - 1.0 / y);
}

namespace {

double F_prime(double y) {
    if (!(y > 1.0)) return 0.0;
    double r = std::sqrt(1.0 - 1.0 / y);
    return -0.5 / (y * y) * r + (1.0 + 0.5 / y) * 0.5 / (y * y * r);
}

struct Accum {
    double value = 0.0, l1 = 0.0, err = 0.0;
};

// int_a^b h(y) dy in t = ln y
template <class H>
void integrate_log(H h, double a, double b, Accum& acc) {
    if (!(b > a)) return;
    double err = 0.0, l1 = 0.0;
    auto g = [&](double t) {
        double y = std::exp(t);
        return h(y) * y;
    };
    acc.value += detail::integrate_interval(g, std::log(a), std::log(b), 1e-13, &err, &l1);
    acc.err += err;
    acc.l1 += l1;
}

std::vector<double> y_breaks(double y_max, std::vector<double> extra) {
    std::vector<double> b{1.0, 2.0};
    for (double y = 10.0; y < y_max; y *= 10.0) b.push_back(y);
    b.push_back(y_max);
    for (double e : extra)
        if (e > 1.0 && e < y_max) b.push_back(e);
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
    return b;
}

template <class H>
Accum integrate_breaks(H h, const std::vector<double>& b) {
    Accum acc;
    for (std::size_t i = 0; i + 1 < b.size(); ++i) integrate_log(h, b[i], b[i + 1], acc);
    return acc;
}

void check_accuracy(const Accum& a, double tol, const char* what) {
    if (a.err > std::max(tol, 1e-9) * std::max(a.l1, 1e-300) * 10.0) {
        std::ostringstream os;
        os << what << ": quadrature did not converge, error estimate " << a.err << " against L1 norm " << a.l1;
        throw Error("quadrature_failure", os.str());
    }
}

// int_Y^inf F(y) / (y (y - z)) dy from F = sum c_m y^-m and 1/(y-z) = sum z^j / y^{j+1}
cd tail_integral(cd z, double Y) {
    static const std::vector<double> c = series_coeffs(10);
    cd total = 0.0;
    for (std::size_t m = 0; m < c.size(); ++m) {
        if (c[m] == 0.0) continue;
        cd zj = 1.0;
        for (int j = 0; j < 200; ++j) {
            double p = 1.0 + double(m) + j;
            cd term = c[m] * zj * std::pow(Y, -p) / p;
            total += term;
            if (std::abs(term) < 1e-18 * std::abs(total)) break;
            zj *= z;
        }
    }
    return total;
}

}  // namespace

double K_reg(double k_sq, const PVScheme& scheme) {
    scheme.require_solved();
    double top = 4.0 * scheme.masses.back() * scheme.masses.back();
    if (scheme.N() > 0 && k_sq > 4.0 * top) {
        // far above every threshold the direct sum cancels to roundoff; the moment rows
        // remove the first M + 3 powers, so sum the remaining series instead
        static const std::vector<double> c = series_coeffs(120);
        double acc = 0.0;
        for (int m = scheme.M + 3; m <= 120; ++m) {
            double Sm = 0.0;
            for (std::size_t l = 0; l < scheme.masses.size(); ++l)
                Sm += (l % 2 ? -1.0 : 1.0) * scheme.d[l] * std::pow(4.0 * scheme.masses[l] * scheme.masses[l] / k_sq, m);
            acc += c[std::size_t(m)] * Sm;
            if (std::pow(top / k_sq, m) < 1e-17 * std::abs(acc)) break;
        }
        return acc / (6.0 * pi);
    }
    double acc = 0.0;
    for (std::size_t l = 0; l < scheme.masses.size(); ++l) {
        double m = scheme.masses[l];
        acc += (l % 2 ? -1.0 : 1.0) * scheme.d[l] * F_threshold(k_sq / (4.0 * m * m));
    }
    return acc / (6.0 * pi);
}

cd R_obs(double k_sq, double sgn, const DiracSeaSpec& spec, const RObsOptions& opt) {
    spec.validate();
    if (k_sq == 0.0) return 0.0;
    double z = k_sq / (4.0 * spec.mu0 * spec.mu0);
    double Y = std::max(opt.y_max, 1e3 * std::abs(z));
    double pref = spec.alpha * z / (3.0 * pi);

    if (!opt.exact) {
        if (!(opt.eps > 0.0)) throw Error("invalid_epsilon", "eps must be > 0");
        double delta = opt.eps / (4.0 * spec.mu0 * spec.mu0);
        cd zc(z, delta * sgn);
        std::vector<double> extra{z};
        for (double w : {0.3, 1.0, 3.0, 10.0, 30.0, 100.0, 300.0, 1e3, 1e4, 1e5}) {
            extra.push_back(z - w * delta);
            extra.push_back(z + w * delta);
        }
        auto b = y_breaks(Y, extra);
        Accum re = integrate_breaks([&](double y) { return (F_threshold(y) / (y * (cd(y) - zc))).real(); }, b);
        Accum im = integrate_breaks([&](double y) { return (F_threshold(y) / (y * (cd(y) - zc))).imag(); }, b);
        check_accuracy(re, 1e-6, "R_obs");
        return pref * (cd(re.value, im.value) + tail_integral(zc, Y));
    }

    if (z <= 1.0) {
        auto b = y_breaks(Y, {});
        Accum a = integrate_breaks(
            [&](double y) {
                double f = F_threshold(y);
                return f == 0.0 ? 0.0 : f / (y * (y - z));
            },
            b);
        check_accuracy(a, opt.tol, "R_obs");
        return pref * (a.value + tail_integral(z, Y));
    }

    // principal value by subtraction of g(z), g = F / y, plus the residue
    double gz = F_threshold(z) / z;
    double gpz = F_prime(z) / z - F_threshold(z) / (z * z);
    double guard = 1e-5 * std::min(z, z - 1.0);
    auto h = [&](double y) {
        double dy = y - z;
        if (std::abs(dy) < guard) return gpz;
        return (F_threshold(y) / y - gz) / dy;
    };
    std::vector<double> extra{z, 0.5 * (1.0 + z), 2.0 * z};
    for (double w = 1.0; w < 1.0 / (z - 1.0); w *= 10.0) {
        extra.push_back(1.0 + (z - 1.0) * (1.0 - 0.5 / w));
        extra.push_back(z + (z - 1.0) * w);
    }
    auto b = y_breaks(Y, extra);
    Accum a = integrate_breaks(h, b);
    check_accuracy(a, opt.tol, "R_obs");
    double pv = a.value + gz * std::log((Y - z) / (z - 1.0));
    return pref * (cd(pv, pi * sgn * gz) + tail_integral(z, Y));
}

cd R_obs(const MomentumPoint& k, const DiracSeaSpec& spec, const RObsOptions& opt) { return R_obs(k.k_sq(), k.sign(), spec, opt); }

double R0(const PVScheme& scheme, const DiracSeaSpec& spec) {
    scheme.require_solved();
    spec.validate();
    double acc = 0.0;
    double m0 = scheme.mu0();
    for (std::size_t l = 1; l < scheme.masses.size(); ++l)
        acc += (l % 2 ? -1.0 : 1.0) * scheme.d[l] * std::log(scheme.masses[l] * scheme.masses[l] / (m0 * m0));
    return -spec.alpha / (3.0 * pi) * acc;
}

double R0_quadrature(const PVScheme& scheme, const DiracSeaSpec& spec, double Lambda_sq) {
    scheme.require_solved();
    spec.validate();
    double top = 4.0 * scheme.masses.back() * scheme.masses.back();
    if (Lambda_sq <= 0.0) Lambda_sq = 1e4 * top;
    if (!(Lambda_sq > top)) throw Error("cutoff_too_small", "cutoff must exceed the largest threshold 4 mu_N^2");
    std::vector<double> breaks;
    for (double m : scheme.masses) breaks.push_back(4.0 * m * m);
    double integral = detail::log_segment_integral([&](double m2) { return K_reg(m2, scheme); }, -1, breaks.front(), Lambda_sq, breaks);
    return 2.0 * spec.alpha * (integral + detail::moment_tail(scheme, -1, Lambda_sq));
}

PolarizationValue Pi_R_reg(const MomentumPoint& k, const DiracSeaSpec& spec, double R0_value, const RObsOptions& opt) {
    return {k, R0_value + R_obs(k, spec, opt), PolKind::R};
}

PolarizationValue Pi_F_reg(const MomentumPoint& k, const DiracSeaSpec& spec, double R0_value, const RObsOptions& opt) {
    cd a = Pi_R_reg(k, spec, R0_value, opt).scalar;
    cd b = Pi_R_reg(k.reflected(), spec, R0_value, opt).scalar;
    return {k, k.theta_plus() * a + k.theta_minus() * b, PolKind::F};
}

PolarizationValue Pi_plus(const MomentumPoint& k, const DiracSeaSpec& spec, double R0_value, const RObsOptions& opt) {
    if (k.theta_plus() == 0.0) return {k, 0.0, PolKind::plus};
    cd a = Pi_R_reg(k, spec, R0_value, opt).scalar;
    cd b = Pi_R_reg(k.reflected(), spec, R0_value, opt).scalar;
    return {k, k.theta_plus() * (a - b), PolKind::plus};
}

PolarizationValue Pi_plus_closed_form(const MomentumPoint& k, const DiracSeaSpec& spec) {
    spec.validate();
    double z = k.k_sq() / (4.0 * spec.mu0 * spec.mu0);
    return {k, 2.0 * I * spec.alpha / 3.0 * k.theta_plus() * F_threshold(z), PolKind::plus};
}

Tensor4 polarization_tensor(const PolarizationValue& v, const std::array<double, 3>& kvec, double mu_vac) {
    double q2 = kvec[0] * kvec[0] + kvec[1] * kvec[1] + kvec[2] * kvec[2];
    if (std::abs(q2 - v.k.kvec_sq) > 1e-12 * std::max(1.0, q2)) throw Error("invalid_momentum", "kvec does not match the momentum point");
    std::array<double, 4> kl{v.k.k0, -kvec[0], -kvec[1], -kvec[2]};
    std::array<double, 4> g{1.0, -1.0, -1.0, -1.0};
    double k2 = v.k.k_sq();
    Tensor4 T;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) T(a, b) = (kl[std::size_t(a)] * kl[std::size_t(b)] - (a == b ? k2 * g[std::size_t(a)] : 0.0)) * v.scalar / (-mu_vac);
    return T;
}

double transversality_residual(const Tensor4& T, double k0, const std::array<double, 3>& kvec) {
    Eigen::Matrix<cd, 4, 1> ku(k0, kvec[0], kvec[1], kvec[2]);
    double scale = T.cwiseAbs().maxCoeff() * ku.cwiseAbs().maxCoeff();
    if (scale == 0.0) return 0.0;
    return (T * ku).cwiseAbs().maxCoeff() / scale;
}

double K_reg_coordinate(double x_sq, int sign_t, const PVScheme& scheme, double cutoff, double* abs_scale) {
    scheme.require_solved();
    if (sign_t != 1 && sign_t != -1) throw Error("invalid_argument", "sign_t must be +1 or -1");
    if (!(cutoff >= 10.0 * scheme.masses.back())) throw Error("cutoff_too_small", "cutoff must be at least 10 mu_N for the spectral integral to converge");
    if (abs_scale) *abs_scale = 0.0;
    if (!(x_sq > 0.0)) return 0.0;
    double s = std::sqrt(x_sq);
    double lo = 2.0 * scheme.mu0();
    std::vector<double> b{lo, cutoff};
    for (double m : scheme.masses)
        if (2.0 * m < cutoff) b.push_back(2.0 * m);
    for (double m = 2.0 * lo; m < cutoff; m *= 2.0) b.push_back(m);
    double period = pi / s;
    double n_osc = (cutoff - lo) / period;
    if (n_osc > 2e5) throw Error("convergence_failure", "too many Bessel oscillations below the cutoff; lower the cutoff or x_sq");
    for (double m = std::ceil(lo / period) * period; m < cutoff; m += period) b.push_back(m);
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());

    auto f = [&](double mu) { return 2.0 * mu * mu * K_reg(mu * mu, scheme) * std::cyl_bessel_j(1.0, mu * s); };
    double total = 0.0, l1 = 0.0;
    for (std::size_t i = 0; i + 1 < b.size(); ++i) {
        if (!(b[i + 1] > b[i])) continue;
        double e = 0.0, n1 = 0.0;
        total += detail::integrate_interval(f, b[i], b[i + 1], 1e-12, &e, &n1);
        l1 += n1;
    }
    if (abs_scale) *abs_scale = l1 / (8.0 * pi * pi * s);
    return double(sign_t) * total / (8.0 * pi * pi * s);
}

}  // namespace keldysh
