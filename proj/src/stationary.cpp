#include "keldysh/stationary.hpp"

namespace keldysh {

namespace {

void require_lag_grid(const TimeGrid& g) {
    if (g.order != TimeOrder::cyclic) throw Error("invalid_grid", "stationary kernels need a cyclic lag grid");
    g.zero_index();
}

}  // namespace

StationaryKernel::StationaryKernel(const TimeGrid& lag_grid) : lag(lag_grid) { require_lag_grid(lag_grid); }

StationaryKernel::StationaryKernel(Signal s) : lag(std::move(s)) { require_lag_grid(lag.grid); }

StationaryKernel StationaryKernel::from_function(const TimeGrid& g, const std::function<cd(double)>& f) {
    StationaryKernel K(g);
    for (std::size_t j = 0; j < g.n; ++j) K.lag.values[Eigen::Index(j)] = f(g.t(j));
    return K;
}

StationaryKernel StationaryKernel::from_spectrum(const TimeGrid& g, const std::function<cd(double)>& f_w) {
    CVec C(Eigen::Index(g.n));
    double norm = 1.0 / g.period();
    for (std::size_t k = 0; k < g.n; ++k) C[Eigen::Index(k)] = f_w(g.omega(k)) * norm;
    return from_coeffs(g, C);
}

cd StationaryKernel::at_lag(long d) const {
    long nn = long(n());
    long idx = (d + long(lag.grid.zero_index())) % nn;
    if (idx < 0) idx += nn;
    return lag.values[idx];
}

CVec StationaryKernel::coeffs() const {
    CVec c = fourier_coeffs(lag.values);
    const TimeGrid& g = lag.grid;
    for (std::size_t k = 0; k < g.n; ++k) c[Eigen::Index(k)] *= std::exp(I * g.omega(k) * g.t0);
    return c;
}

StationaryKernel StationaryKernel::from_coeffs(const TimeGrid& g, const CVec& C) {
    CVec c = C;
    for (std::size_t k = 0; k < g.n; ++k) c[Eigen::Index(k)] *= std::exp(-I * g.omega(k) * g.t0);
    return StationaryKernel(Signal(g, fourier_synth(c)));
}

CVec StationaryKernel::spectrum() const { return coeffs() * lag.grid.period(); }

StationaryKernel StationaryKernel::reflected() const {
    StationaryKernel out(lag.grid);
    for (std::size_t j = 0; j < n(); ++j) out.lag.values[Eigen::Index(lag.grid.reflect(j))] = lag.values[Eigen::Index(j)];
    return out;
}

StationaryKernel StationaryKernel::conj() const { return StationaryKernel(Signal(lag.grid, lag.values.conjugate())); }

TwoPointKernel StationaryKernel::realize() const {
    TimeGrid g(n(), lag.grid.dt, 0.0, TimeOrder::cyclic);
    TwoPointKernel K(g);
    for (std::size_t i = 0; i < n(); ++i)
        for (std::size_t j = 0; j < n(); ++j) K.values(Eigen::Index(i), Eigen::Index(j)) = at_lag(g.wrapped_lag(i, j));
    return K;
}

StationaryKernel project_pair(const StationaryKernel& K, Sign a, OrderingParam pa, Sign b, OrderingParam pb) {
    const TimeGrid& g = K.grid();
    Eigen::VectorXd ma = s_mask(g, pa, a);
    Eigen::VectorXd mb = s_mask(g, pb, b);
    CVec c = fourier_coeffs(K.lag.values);
    std::size_t n = g.n;
    // exp(-i w (t - t')) carries frequency -w in t'
    for (std::size_t k = 0; k < n; ++k) c[Eigen::Index(k)] *= ma[Eigen::Index(k)] * mb[Eigen::Index((n - k) % n)];
    return StationaryKernel(Signal(g, fourier_synth(c)));
}

StationaryKernel project_arg(const StationaryKernel& K, Arg which, Sign sign, OrderingParam p) {
    const TimeGrid& g = K.grid();
    Eigen::VectorXd m = s_mask(g, p, sign);
    CVec c = fourier_coeffs(K.lag.values);
    std::size_t n = g.n;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t bin = which == Arg::first ? k : (n - k) % n;
        c[Eigen::Index(k)] *= m[Eigen::Index(bin)];
    }
    return StationaryKernel(Signal(g, fourier_synth(c)));
}

StationaryKernel operator+(const StationaryKernel& a, const StationaryKernel& b) {
    require_same_grid(a.grid(), b.grid(), "stationary +");
    return StationaryKernel(Signal(a.grid(), a.lag.values + b.lag.values));
}

StationaryKernel operator-(const StationaryKernel& a, const StationaryKernel& b) {
    require_same_grid(a.grid(), b.grid(), "stationary -");
    return StationaryKernel(Signal(a.grid(), a.lag.values - b.lag.values));
}

StationaryKernel operator*(cd c, const StationaryKernel& a) {
    return StationaryKernel(Signal(a.grid(), c * a.lag.values));
}

}  // namespace keldysh
