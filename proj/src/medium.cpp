#include "keldysh/medium.hpp"

#include "keldysh/rng.hpp"

#include <cmath>
#include <limits>

namespace keldysh {

void MediumSpec::validate() const {
    dirac.validate();
    if (!(hbar_c > 0.0)) throw Error("invalid_spec", "hbar_c must be > 0");
    if (!(mu_vac > 0.0)) throw Error("invalid_spec", "mu_vac must be > 0");
}

DressedValue dress_retarded_momentum(const MomentumPoint& k, const MediumSpec& m) {
    m.validate();
    DressedValue r;
    double s = k.sign();
    r.delta = {0.0, -I * pi * s * m.mu_vac / (1.0 + m.R0)};
    double k2 = k.k_sq();
    if (k2 == 0.0) {
        r.on_light_cone = true;
        r.value = 0.0;
        return r;
    }
    cd R = m.R0 + R_obs(k2, s, m.dirac, m.robs);
    r.value = m.mu_vac / (k2 * (1.0 + R));
    return r;
}

cd dress_retarded_momentum_eps(const MomentumPoint& k, const MediumSpec& m, double eps) {
    m.validate();
    if (!(eps > 0.0)) throw Error("invalid_epsilon", "eps must be > 0");
    RObsOptions o = m.robs;
    o.exact = false;
    o.eps = eps;
    double s = k.sign();
    cd R = m.R0 + R_obs(k.k_sq(), s, m.dirac, o);
    return m.mu_vac / ((k.k_sq() + I * eps * s) * (1.0 + R));
}

namespace {

void require_retarded(const TwoPointKernel& K, double tol, const char* what) {
    if (K.grid.order != TimeOrder::linear) throw Error("non_retarded", std::string(what) + ": Dyson solve needs a linear time order");
    double scale = K.values.cwiseAbs().maxCoeff();
    auto n = K.values.rows();
    double upper = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) upper = std::max(upper, std::abs(K.values(i, j)));
    if (upper > tol * std::max(scale, 1e-300)) throw Error("non_retarded", std::string(what) + " is not retarded");
}

}  // namespace

TwoPointKernel dress_retarded_grid(const TwoPointKernel& D_R, const TwoPointKernel& pi_R, double tol) {
    require_same_grid(D_R.grid, pi_R.grid, "dress_retarded_grid");
    require_retarded(D_R, tol, "D_R");
    require_retarded(pi_R, tol, "pi_R");
    double dt = D_R.grid.dt;
    CMat M = (dt * dt) * (D_R.values * pi_R.values);
    M.triangularView<Eigen::StrictlyUpper>().setZero();
    CMat A = CMat::Identity(M.rows(), M.cols()) - M;
    CMat X = A.triangularView<Eigen::Lower>().solve(D_R.values);
    return TwoPointKernel(D_R.grid, X);
}

TwoPointKernel neumann_series(const TwoPointKernel& D_R, const TwoPointKernel& pi_R, int terms) {
    require_same_grid(D_R.grid, pi_R.grid, "neumann_series");
    double dt = D_R.grid.dt;
    CMat M = (dt * dt) * (D_R.values * pi_R.values);
    CMat term = D_R.values, acc = CMat::Zero(D_R.values.rows(), D_R.values.cols());
    for (int t = 0; t < terms; ++t) {
        acc += term;
        term = M * term;
    }
    return TwoPointKernel(D_R.grid, acc);
}

Signal mean_field(const TwoPointKernel& Dr, const Signal& J_e, const Signal& j_r_mean) {
    require_same_grid(Dr.grid, J_e.grid, "mean_field");
    require_same_grid(Dr.grid, j_r_mean.grid, "mean_field");
    return Signal(Dr.grid, Dr.grid.dt * (Dr.values * (J_e.values + j_r_mean.values)));
}

TwoPointKernel noise_map(const TwoPointKernel& Dr, const TwoPointKernel& pi_N, double tol) {
    require_same_grid(Dr.grid, pi_N.grid, "noise_map");
    double scale = pi_N.values.cwiseAbs().maxCoeff();
    double herm = (pi_N.values - pi_N.values.adjoint()).cwiseAbs().maxCoeff();
    if (herm > tol * std::max(scale, 1e-300)) throw Error("not_hermitian", "noise kernel pi_N must satisfy pi_N(t,t') = pi_N(t',t)*");
    double dt = Dr.grid.dt;
    CMat N = (dt * dt) * (Dr.values * pi_N.values * Dr.values.adjoint());
    return TwoPointKernel(Dr.grid, N);
}

void OneModeToy::validate() const {
    if (!(omega0 > 0.0)) throw Error("invalid_spec", "toy needs omega0 > 0");
    if (!(omega0 * omega0 + omega0 * pi0 > 0.0)) throw Error("invalid_spec", "toy susceptibility makes the dressed mode unstable");
}

double OneModeToy::Omega() const {
    validate();
    return std::sqrt(omega0 * omega0 + omega0 * pi0);
}

std::vector<double> dress_toy_volterra(const OneModeToy& toy, double dt, std::size_t n) {
    toy.validate();
    if (!(dt > 0.0) || n < 2) throw Error("invalid_grid", "toy Volterra needs dt > 0 and n >= 2");
    std::vector<double> D(n), X(n, 0.0);
    for (std::size_t m = 0; m < n; ++m) D[m] = m == 0 ? 0.0 : -std::sin(toy.omega0 * dt * double(m));
    double c = dt * toy.pi0;
    for (std::size_t m = 1; m < n; ++m) {
        double acc = 0.0;
        for (std::size_t k = 1; k < m; ++k) acc += D[m - k] * X[k];
        X[m] = D[m] + c * acc;
    }
    return X;
}

double dress_toy_closed_form(const OneModeToy& toy, double tau) {
    double W = toy.Omega();
    if (tau <= 0.0) return 0.0;
    return -(toy.omega0 / W) * std::sin(W * tau);
}

cd dress_toy_spectrum(const OneModeToy& toy, double omega, double eps) {
    toy.validate();
    cd w = omega + I * eps;
    return toy.omega0 / (w * w - toy.omega0 * toy.omega0 - toy.omega0 * toy.pi0);
}

TwoPointKernel toy_pi_grid(const OneModeToy& toy, const TimeGrid& g) {
    TwoPointKernel P(g);
    for (std::size_t i = 0; i < g.n; ++i) P.values(Eigen::Index(i), Eigen::Index(i)) = toy.pi0 / g.dt;
    return P;
}

ToyResidual toy_equation_residual(const OneModeToy& toy, const std::vector<double>& X, double dt) {
    double W = toy.Omega();
    ToyResidual r;
    double mx = 0.0;
    for (double v : X) mx = std::max(mx, std::abs(v));
    for (std::size_t m = 1; m + 1 < X.size(); ++m) {
        double d2 = (X[m + 1] - 2.0 * X[m] + X[m - 1]) / (dt * dt);
        r.equation = std::max(r.equation, std::abs(d2 + W * W * X[m]));
    }
    r.equation /= W * W * std::max(mx, 1e-300);
    if (X.size() >= 3) {
        double d1 = (-3.0 * X[0] + 4.0 * X[1] - X[2]) / (2.0 * dt);
        r.initial_slope = std::abs(d1 + toy.omega0) / toy.omega0;
    }
    return r;
}

SpectralDensity zero_point_spectrum(const MomentumPoint& k, const MediumSpec& m) {
    m.validate();
    SpectralDensity z;
    z.k_sq = k.k_sq();
    z.delta_terms.push_back({0.0, cd(pi * m.hbar_c * m.mu_vac / (1.0 + m.R0), 0.0)});
    double y = z.k_sq / (4.0 * m.dirac.mu0 * m.dirac.mu0);
    double F = F_threshold(y);
    if (F > 0.0) {
        cd R = m.R0 + R_obs(z.k_sq, k.sign() == 0.0 ? 1.0 : k.sign(), m.dirac, m.robs);
        z.smooth = m.hbar_c * m.mu_vac * m.dirac.alpha * F / (3.0 * z.k_sq * std::norm(1.0 + R));
    }
    return z;
}

double zero_point_finite_eps(const MomentumPoint& k, const MediumSpec& m, double eps) {
    double s = k.sign();
    if (s == 0.0) return 0.0;
    cd a = dress_retarded_momentum_eps(k, m, eps);
    cd b = dress_retarded_momentum_eps(k.reflected(), m, eps);
    return (0.5 * I * m.hbar_c * (a - b) * s).real();
}

double delta_ledger_at_eps(const SpectralDensity& z, double eps) {
    double acc = 0.0;
    for (const auto& d : z.delta_terms) {
        double x = z.k_sq - d.k_sq;
        acc += d.weight.real() * (eps / pi) / (x * x + eps * eps);
    }
    return acc;
}

StationaryKernel time_normal_vacuum_noise(const StationaryKernel& pi_F, const StationaryKernel& pi_W, double hbar_c) {
    OrderingParam one(1.0);
    StationaryKernel a = project_pair(pi_F, Sign::plus, one, Sign::plus, one);
    StationaryKernel b = project_pair(pi_W, Sign::minus, one, Sign::plus, one);
    StationaryKernel sum = a + b;
    StationaryKernel out(sum.grid());
    for (Eigen::Index j = 0; j < sum.lag.values.size(); ++j) out.lag.values[j] = -2.0 * hbar_c * sum.lag.values[j].imag();
    return out;
}

VacuumPolarizationLag vacuum_polarization_lag(const TimeGrid& lag_grid, double kvec_sq, const MediumSpec& m) {
    m.validate();
    auto F = [&](double w) { return Pi_F_reg(MomentumPoint(w, kvec_sq), m.dirac, m.R0, m.robs).scalar; };
    auto W = [&](double w) { return Pi_plus(MomentumPoint(w, kvec_sq), m.dirac, m.R0, m.robs).scalar; };
    auto R = [&](double w) { return Pi_R_reg(MomentumPoint(w, kvec_sq), m.dirac, m.R0, m.robs).scalar; };
    return {StationaryKernel::from_spectrum(lag_grid, F), StationaryKernel::from_spectrum(lag_grid, W), StationaryKernel::from_spectrum(lag_grid, R)};
}

StationaryKernel dressed_retarded_lag(const TimeGrid& lag_grid, double kvec_sq, const MediumSpec& m, double eps) {
    return StationaryKernel::from_spectrum(lag_grid, [&](double w) { return dress_retarded_momentum_eps(MomentumPoint(w, kvec_sq), m, eps); });
}

GaugeDiagnosis diagnose_gauge(const MomentumPoint& k, const std::array<double, 3>& kvec, const MediumSpec& m) {
    SpectralDensity z = zero_point_spectrum(k, m);
    GaugeDiagnosis d;
    d.delta_weight = z.delta_terms.front().weight.real();
    d.projector = "P_vv' = g_vv' - k_v k_v' / k^2";
    Eigen::Vector4d ku(k.k0, kvec[0], kvec[1], kvec[2]);
    Eigen::Vector4d kl(k.k0, -kvec[0], -kvec[1], -kvec[2]);
    Eigen::Matrix4d g = Eigen::Vector4d(1.0, -1.0, -1.0, -1.0).asDiagonal();
    double kmax = ku.cwiseAbs().maxCoeff();
    Eigen::Matrix4d Zf = z.smooth * g;
    if (z.smooth != 0.0 && kmax > 0.0) d.transversality = (Zf * ku).cwiseAbs().maxCoeff() / (std::abs(z.smooth) * kmax);
    double k2 = k.k_sq();
    if (k2 != 0.0) {
        Eigen::Matrix4d P = g - kl * kl.transpose() / k2;
        Eigen::Matrix4d Zp = z.smooth * P;
        if (z.smooth != 0.0) d.projected_smooth_residual = (Zp * ku).cwiseAbs().maxCoeff() / (Zp.cwiseAbs().maxCoeff() * kmax);
    } else {
        d.projected_smooth_residual = std::numeric_limits<double>::infinity();
    }
    d.consistent = false;
    d.obstruction =
        "the delta(k^2) term of weight pi*hbar_c*mu_vac is multiplied by k_v k_v' / k^2 under the projector; "
        "its coefficient diverges on the support k^2 = 0, so no finite transverse zero-point spectrum exists";
    return d;
}

TwoPointKernel wyld_response_matrix(const WyldConfig& cfg) {
    if (cfg.grid.order != TimeOrder::linear) throw Error("invalid_grid", "Wyld sampling needs a linear time grid");
    TwoPointKernel R = retarded_response_grid(cfg.osc, cfg.grid);
    R.values *= cfg.grid.dt;
    return R;
}

namespace {

struct WyldAcc {
    Eigen::VectorXd s1;
    Eigen::MatrixXd s2, s4;
    Eigen::VectorXd p1, p2;
    std::size_t count = 0;
    void merge(const WyldAcc& o) {
        s1 += o.s1;
        p1 += o.p1;
        p2 += o.p2;
        s2 += o.s2;
        s4 += o.s4;
        count += o.count;
    }
};

}  // namespace

WyldResult wyld_mc(const WyldConfig& cfg, std::size_t n_samples, std::uint64_t seed) {
    if (n_samples == 0) throw Error("invalid_argument", "wyld_mc needs n_samples >= 1");
    cfg.osc.validate();
    if (!(cfg.sigma >= 0.0)) throw Error("invalid_argument", "sigma must be >= 0");
    const TimeGrid& g = cfg.grid;
    if (cfg.J_e.values.size() != 0) require_same_grid(g, cfg.J_e.grid, "wyld_mc");
    auto n = Eigen::Index(g.n);
    for (const auto& G : cfg.probes)
        if (G.rows() != n || G.cols() != n) throw Error("grid_mismatch", "probe matrix does not match the grid");
    Eigen::MatrixXd R = wyld_response_matrix(cfg).values.real();
    Eigen::VectorXd Je = cfg.J_e.values.size() ? Eigen::VectorXd(cfg.J_e.values.real()) : Eigen::VectorXd::Zero(n);
    Eigen::VectorXd c = R * Je;

    Eigen::Matrix2d S = quasi_covariance(cfg.state, cfg.p);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(S);
    Eigen::Matrix2d L = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
    Eigen::MatrixXd basis(n, 2);
    double amp = std::sqrt(2.0 * cfg.osc.hbar);
    for (Eigen::Index i = 0; i < n; ++i) {
        double t = g.t(std::size_t(i));
        basis(i, 0) = amp * std::cos(cfg.osc.omega0 * t);
        basis(i, 1) = amp * std::sin(cfg.osc.omega0 * t);
    }
    Eigen::MatrixXd B = basis * L;
    Eigen::MatrixXd RJ = R * (cfg.sigma / std::sqrt(g.dt));

    WyldAcc acc = sharded_reduce<WyldAcc>(
        n_samples, seed, 0x3d1d,
        [&] {
            auto np = Eigen::Index(cfg.probes.size());
            return WyldAcc{Eigen::VectorXd::Zero(n), Eigen::MatrixXd::Zero(n, n), Eigen::MatrixXd::Zero(n, n), Eigen::VectorXd::Zero(np),
                           Eigen::VectorXd::Zero(np), 0};
        },
        [&](WyldAcc& a, std::mt19937_64& eng, std::size_t count) {
            std::normal_distribution<double> nd;
            Eigen::Vector2d z;
            Eigen::VectorXd w(n), y(n);
            for (std::size_t k = 0; k < count; ++k) {
                z << nd(eng), nd(eng);
                for (Eigen::Index i = 0; i < n; ++i) w[i] = nd(eng);
                y.noalias() = B * z;
                if (cfg.sigma > 0.0) y.noalias() += RJ * w;
                a.s1 += y;
                for (Eigen::Index j = 0; j < n; ++j)
                    for (Eigen::Index i = 0; i < n; ++i) {
                        double p = y[i] * y[j];
                        a.s2(i, j) += p;
                        a.s4(i, j) += p * p;
                    }
                for (std::size_t q = 0; q < cfg.probes.size(); ++q) {
                    double v = y.dot(cfg.probes[q] * y);
                    a.p1[Eigen::Index(q)] += v;
                    a.p2[Eigen::Index(q)] += v * v;
                }
            }
            a.count += count;
        });

    double N = double(acc.count);
    Eigen::VectorXd mu = acc.s1 / N;
    Eigen::MatrixXd m2 = acc.s2 / N;
    Eigen::MatrixXd cov = m2 - mu * mu.transpose();
    if (acc.count > 1) cov *= N / (N - 1.0);
    Eigen::MatrixXd var2 = (acc.s4 / N - m2.cwiseAbs2()).cwiseMax(0.0);

    WyldResult r{Signal(g), Signal(g), TwoPointKernel(g), TwoPointKernel(g), {}, {}, n_samples};
    for (Eigen::Index i = 0; i < n; ++i) {
        r.mean.values[i] = c[i] + mu[i];
        r.mean_se.values[i] = std::sqrt(std::max(0.0, m2(i, i) - mu[i] * mu[i]) / N);
    }
    r.cov.values = cov.cast<cd>();
    r.cov_se.values = (var2 / N).cwiseSqrt().cast<cd>();
    for (Eigen::Index q = 0; q < acc.p1.size(); ++q) {
        double pm = acc.p1[q] / N;
        r.probe_mean.push_back(pm);
        r.probe_se.push_back(std::sqrt(std::max(0.0, acc.p2[q] / N - pm * pm) / N));
    }
    return r;
}

}  // namespace keldysh
