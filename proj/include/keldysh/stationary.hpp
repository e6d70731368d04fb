#pragma once

#include "keldysh/projection.hpp"

#include <functional>

namespace keldysh {

// Kernel depending on t - t' only, stored as samples on a cyclic lag grid.
struct StationaryKernel {
    Signal lag;

    StationaryKernel() = default;
    explicit StationaryKernel(const TimeGrid& lag_grid);
    explicit StationaryKernel(Signal s);

    static StationaryKernel from_function(const TimeGrid& lag_grid, const std::function<cd(double)>& f);
    // f(tau) = int dw/2pi exp(-i w tau) f_w, sampled on the DFT frequencies of the lag grid
    static StationaryKernel from_spectrum(const TimeGrid& lag_grid, const std::function<cd(double)>& f_w);

    const TimeGrid& grid() const { return lag.grid; }
    std::size_t n() const { return lag.grid.n; }
    cd at_lag(long d) const;
    double tau(std::size_t j) const { return lag.grid.t(j); }

    // coefficients C_k of f(tau) = sum_k C_k exp(-i w_k tau)
    CVec coeffs() const;
    static StationaryKernel from_coeffs(const TimeGrid& lag_grid, const CVec& C);
    // continuum spectrum samples f_w = n dt C_k
    CVec spectrum() const;

    StationaryKernel reflected() const;
    StationaryKernel conj() const;
    TwoPointKernel realize() const;
};

// F^(a)_t F^(b)_t' with independent s-weights on each argument
StationaryKernel project_pair(const StationaryKernel& K, Sign a, OrderingParam pa, Sign b, OrderingParam pb);
StationaryKernel project_arg(const StationaryKernel& K, Arg which, Sign sign, OrderingParam p = OrderingParam(1.0));

StationaryKernel operator+(const StationaryKernel& a, const StationaryKernel& b);
StationaryKernel operator-(const StationaryKernel& a, const StationaryKernel& b);
StationaryKernel operator*(cd c, const StationaryKernel& a);

}  // namespace keldysh
