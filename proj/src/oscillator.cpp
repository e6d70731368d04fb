#include "keldysh/oscillator.hpp"

#include "keldysh/rng.hpp"

#include <cmath>

namespace keldysh {

void OscillatorSpec::validate() const {
    if (!(omega0 > 0.0) || !std::isfinite(omega0)) throw Error("invalid_spec", "oscillator needs omega0 > 0");
    if (!(hbar > 0.0) || !std::isfinite(hbar)) throw Error("invalid_spec", "oscillator needs hbar > 0");
}

void GaussianState::validate() const {
    if (!(nbar >= 0.0) || !std::isfinite(nbar)) throw Error("unphysical_state", "Gaussian state needs nbar >= 0");
    double bound = std::sqrt(nbar * (nbar + 1.0));
    if (std::abs(m) > bound * (1.0 + 1e-12) + 1e-300) throw Error("unphysical_state", "Gaussian state violates |m| <= sqrt(nbar (nbar + 1))");
}

double retarded_response(const OscillatorSpec& spec, double tau) {
    spec.validate();
    return tau > 0.0 ? -std::sin(spec.omega0 * tau) : 0.0;
}

cd retarded_response_spectrum(const OscillatorSpec& spec, double omega, double eps) {
    spec.validate();
    return 0.5 * (1.0 / (omega - spec.omega0 + I * eps) - 1.0 / (omega + spec.omega0 + I * eps));
}

cd s_ordered_kernel(const OscillatorSpec& spec, const GaussianState& state, OrderingParam p, double t, double t2) {
    spec.validate();
    state.validate();
    double w = spec.omega0;
    cd ph = std::exp(-I * w * (t + t2));
    return 0.5 * spec.hbar * (state.m * ph + std::conj(state.m) * std::conj(ph) + 2.0 * (state.nbar + p.s_minus()) * std::cos(w * (t - t2)));
}

double reorder_gap_Z(const OscillatorSpec& spec, double tau) {
    spec.validate();
    return 0.5 * spec.hbar * std::cos(spec.omega0 * tau);
}

Signal reorder_gap_Z_grid(const OscillatorSpec& spec, const TimeGrid& g) {
    Signal D(g);
    for (std::size_t j = 0; j < g.n; ++j) D.values[Eigen::Index(j)] = retarded_response(spec, g.t(j));
    Signal dp = project_pm(D, Sign::plus);
    Signal dm = project_pm(D, Sign::minus);
    Signal Z(g);
    for (std::size_t j = 0; j < g.n; ++j) {
        auto a = Eigen::Index(j), r = Eigen::Index(g.reflect(j));
        Z.values[a] = 0.5 * I * spec.hbar * (dp.values[a] + dp.values[r] - dm.values[a] - dm.values[r]);
    }
    return Z;
}

Signal recover_DR_from_Z(const Signal& Z, double hbar) {
    Signal zp = project_pm(Z, Sign::plus);
    Signal zm = project_pm(Z, Sign::minus);
    Signal D(Z.grid);
    for (std::size_t j = 0; j < Z.grid.n; ++j) {
        double tau = Z.grid.t(j);
        double th = std::abs(tau) < 1e-12 * Z.grid.dt ? 0.5 : (tau > 0.0 ? 1.0 : 0.0);
        auto a = Eigen::Index(j);
        D.values[a] = (2.0 / (I * hbar)) * th * (zp.values[a] - zm.values[a]);
    }
    return D;
}

KeldyshPair keldysh_contractions(const OscillatorSpec& spec, double t, double t2) {
    spec.validate();
    double tau = t - t2;
    cd ih = I * spec.hbar;
    return {0.5 * spec.hbar * std::exp(-I * spec.omega0 * std::abs(tau)) / ih, 0.5 * spec.hbar * std::exp(-I * spec.omega0 * tau) / ih};
}

double classical_infield(cd alpha, const OscillatorSpec& spec, double t) {
    spec.validate();
    return std::sqrt(0.5 * spec.hbar) * 2.0 * std::real(alpha * std::exp(-I * spec.omega0 * t));
}

void require_periodic(const OscillatorSpec& spec, const TimeGrid& g) {
    double cycles = spec.omega0 * g.period() / (2.0 * pi);
    if (std::abs(cycles - std::round(cycles)) > 1e-9 * std::max(1.0, cycles))
        throw Error("grid_not_periodic", "omega0 does not complete a whole number of periods on the grid");
    if (2.0 * std::round(cycles) >= double(g.n)) throw Error("grid_not_periodic", "omega0 is at or beyond the Nyquist frequency");
}

namespace {

double grid_lag(const TimeGrid& g, std::size_t i, std::size_t j) {
    if (g.order == TimeOrder::cyclic) return double(g.wrapped_lag(i, j)) * g.dt;
    return (double(i) - double(j)) * g.dt;
}

}  // namespace

TwoPointKernel retarded_response_grid(const OscillatorSpec& spec, const TimeGrid& g) {
    spec.validate();
    TwoPointKernel D(g);
    for (std::size_t i = 0; i < g.n; ++i)
        for (std::size_t j = 0; j < g.n; ++j)
            D.values(Eigen::Index(i), Eigen::Index(j)) = -g.step(i, j) * std::sin(spec.omega0 * grid_lag(g, i, j));
    return D;
}

TwoPointKernel s_ordered_kernel_grid(const OscillatorSpec& spec, const GaussianState& state, OrderingParam p, const TimeGrid& g) {
    TwoPointKernel K(g);
    for (std::size_t i = 0; i < g.n; ++i)
        for (std::size_t j = 0; j < g.n; ++j) K.values(Eigen::Index(i), Eigen::Index(j)) = s_ordered_kernel(spec, state, p, g.t(i), g.t(j));
    return K;
}

CumulantSet oscillator_cumulants(const OscillatorSpec& spec, const GaussianState& state, const TimeGrid& g) {
    spec.validate();
    state.validate();
    double w = spec.omega0;
    TwoPointKernel W(g);
    for (std::size_t i = 0; i < g.n; ++i)
        for (std::size_t j = 0; j < g.n; ++j) {
            double t = g.t(i), t2 = g.t(j);
            cd ph = std::exp(-I * w * (t + t2));
            cd e = std::exp(-I * w * (t - t2));
            W.values(Eigen::Index(i), Eigen::Index(j)) =
                0.5 * spec.hbar * (state.m * ph + std::conj(state.m) * std::conj(ph) + (state.nbar + 1.0) * e + state.nbar * std::conj(e));
        }
    return cumulants_from_wightman(W, Signal(g), spec.hbar);
}

StationaryCumulants oscillator_vacuum_stationary(const OscillatorSpec& spec, const TimeGrid& lag_grid) {
    spec.validate();
    StationaryKernel W = StationaryKernel::from_function(lag_grid, [&](double tau) { return 0.5 * spec.hbar * std::exp(-I * spec.omega0 * tau); });
    return stationary_cumulants_from_wightman(W, spec.hbar);
}

Eigen::Matrix2d quasi_covariance(const GaussianState& state, OrderingParam p) {
    state.validate();
    double A = state.nbar + p.s_minus();
    Eigen::Matrix2d S;
    S << 0.5 * (A + state.m.real()), 0.5 * state.m.imag(), 0.5 * state.m.imag(), 0.5 * (A - state.m.real());
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(S);
    if (es.eigenvalues().minCoeff() < -1e-12 * std::max(1.0, A))
        throw Error("not_sampleable", "quasidistribution not sampleable: s-ordered Gaussian has negative variance");
    return S;
}

namespace {

struct QuadAcc {
    Eigen::Vector3d sum = Eigen::Vector3d::Zero();
    Eigen::Matrix3d sum2 = Eigen::Matrix3d::Zero();
    std::size_t count = 0;
    void merge(const QuadAcc& o) {
        sum += o.sum;
        sum2 += o.sum2;
        count += o.count;
    }
};

}  // namespace

McKernel mc_quasiaverage(const OscillatorSpec& spec, const GaussianState& state, OrderingParam p, const TimeGrid& g,
                         std::size_t n_samples, std::uint64_t seed) {
    spec.validate();
    if (n_samples == 0) throw Error("invalid_argument", "mc_quasiaverage needs n_samples >= 1");
    Eigen::Matrix2d S = quasi_covariance(state, p);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(S);
    Eigen::Matrix2d L = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();

    QuadAcc acc = sharded_reduce<QuadAcc>(
        n_samples, seed, 0x05c1, [] { return QuadAcc{}; },
        [&](QuadAcc& a, std::mt19937_64& eng, std::size_t count) {
            std::normal_distribution<double> nd;
            for (std::size_t k = 0; k < count; ++k) {
                Eigen::Vector2d z(nd(eng), nd(eng));
                Eigen::Vector2d xy = L * z;
                Eigen::Vector3d u(xy[0] * xy[0], xy[1] * xy[1], xy[0] * xy[1]);
                a.sum += u;
                a.sum2 += u * u.transpose();
            }
            a.count += count;
        });

    double N = double(acc.count);
    Eigen::Vector3d mean = acc.sum / N;
    Eigen::Matrix3d cov = acc.sum2 / N - mean * mean.transpose();
    if (acc.count > 1) cov *= N / (N - 1.0);

    McKernel out{TwoPointKernel(g), TwoPointKernel(g), 0.0, 0.0, n_samples};
    Eigen::Vector3d tr(1.0, 1.0, 0.0);
    out.cos_coefficient = spec.hbar * tr.dot(mean);
    out.cos_coefficient_se = spec.hbar * std::sqrt(std::max(0.0, tr.dot(cov * tr)) / N);
    double w = spec.omega0, c2 = 2.0 * spec.hbar;
    for (std::size_t i = 0; i < g.n; ++i)
        for (std::size_t j = 0; j < g.n; ++j) {
            double ci = std::cos(w * g.t(i)), si = std::sin(w * g.t(i));
            double cj = std::cos(w * g.t(j)), sj = std::sin(w * g.t(j));
            Eigen::Vector3d wt(ci * cj, si * sj, ci * sj + si * cj);
            auto a = Eigen::Index(i), b = Eigen::Index(j);
            out.mean.values(a, b) = c2 * wt.dot(mean);
            out.std_error.values(a, b) = c2 * std::sqrt(std::max(0.0, wt.dot(cov * wt)) / N);
        }
    return out;
}

}  // namespace keldysh
