#include "keldysh/grid.hpp"

#include <cmath>

namespace keldysh {

TimeGrid TimeGrid::lag(std::size_t n, double dt) {
    return TimeGrid(n, dt, -double(n / 2) * dt, TimeOrder::cyclic);
}

void TimeGrid::validate() const {
    if (n < 2) throw Error("invalid_grid", "time grid needs n >= 2");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw Error("invalid_grid", "time grid needs dt > 0");
    if (!std::isfinite(t0)) throw Error("invalid_grid", "time grid origin must be finite");
}

long TimeGrid::signed_bin(std::size_t k) const {
    long kk = long(k);
    long nn = long(n);
    return kk <= nn / 2 ? kk : kk - nn;
}

long TimeGrid::wrapped_lag(std::size_t i, std::size_t j) const {
    long nn = long(n);
    long d = (long(i) - long(j)) % nn;
    if (d < 0) d += nn;
    if (d >= nn - nn / 2) d -= nn;
    return d;
}

double TimeGrid::step(std::size_t i, std::size_t j) const {
    if (order == TimeOrder::linear) {
        if (i == j) return 0.5;
        return i > j ? 1.0 : 0.0;
    }
    long d = wrapped_lag(i, j);
    if (d == 0) return 0.5;
    if (n % 2 == 0 && (d == long(n / 2) || d == -long(n / 2))) return 0.5;
    return d > 0 ? 1.0 : 0.0;
}

std::size_t TimeGrid::zero_index() const {
    double j = -t0 / dt;
    double r = std::round(j);
    if (std::abs(j - r) > 1e-9 || r < 0 || r >= double(n))
        throw Error("invalid_grid", "lag grid does not contain tau = 0");
    return std::size_t(r);
}

std::size_t TimeGrid::reflect(std::size_t j) const {
    std::size_t z = zero_index();
    long r = (2 * long(z) - long(j)) % long(n);
    if (r < 0) r += long(n);
    return std::size_t(r);
}

bool TimeGrid::matches(const TimeGrid& o) const {
    auto close = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)}); };
    return n == o.n && close(dt, o.dt) && close(t0, o.t0) && order == o.order;
}

void require_same_grid(const TimeGrid& a, const TimeGrid& b, const char* where) {
    if (!a.matches(b)) throw Error("grid_mismatch", std::string(where) + ": grids differ");
}

Signal::Signal(const TimeGrid& g, CVec v) : grid(g), values(std::move(v)) {
    grid.validate();
    if (std::size_t(values.size()) != grid.n) throw Error("grid_mismatch", "signal length differs from grid size");
}

TwoPointKernel::TwoPointKernel(const TimeGrid& g, CMat v) : grid(g), values(std::move(v)) {
    grid.validate();
    if (std::size_t(values.rows()) != grid.n || std::size_t(values.cols()) != grid.n)
        throw Error("grid_mismatch", "kernel shape differs from grid size");
}

OrderingParam::OrderingParam(double s_) : s(s_) {
    if (!(s >= -1.0 && s <= 1.0)) throw Error("invalid_ordering", "ordering parameter s must lie in [-1, 1]");
}

}  // namespace keldysh
