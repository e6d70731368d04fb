#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace keldysh {

using cd = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

inline constexpr double pi = 3.141592653589793238462643383279502884;
inline constexpr cd I{0.0, 1.0};

class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(what), code_(std::move(code)) {}
    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

// linear: ordinary time order on [t0, t0 + n dt).
// cyclic: order by the lag wrapped into [-T/2, T/2), used for periodic/stationary data.
enum class TimeOrder { linear, cyclic };

struct TimeGrid {
    std::size_t n = 2;
    double dt = 1.0;
    double t0 = 0.0;
    TimeOrder order = TimeOrder::linear;

    TimeGrid() = default;
    TimeGrid(std::size_t n_, double dt_, double t0_ = 0.0, TimeOrder o = TimeOrder::linear)
        : n(n_), dt(dt_), t0(t0_), order(o) { validate(); }

    // symmetric lag grid containing tau = 0, cyclic order
    static TimeGrid lag(std::size_t n, double dt);

    void validate() const;
    double t(std::size_t j) const { return t0 + dt * double(j); }
    double period() const { return dt * double(n); }
    double dw() const { return 2.0 * pi / period(); }
    long signed_bin(std::size_t k) const;
    double omega(std::size_t k) const { return dw() * double(signed_bin(k)); }
    bool is_nyquist(std::size_t k) const { return n % 2 == 0 && k == n / 2; }

    // step function theta(t_i - t_j) in this grid's order, 1/2 on ties
    double step(std::size_t i, std::size_t j) const;
    // wrapped lag index (i - j) in [-(n/2), n - n/2)
    long wrapped_lag(std::size_t i, std::size_t j) const;

    std::size_t zero_index() const;
    std::size_t reflect(std::size_t j) const;

    bool matches(const TimeGrid& o) const;
};

struct Signal {
    TimeGrid grid;
    CVec values;

    Signal() = default;
    Signal(const TimeGrid& g) : grid(g), values(CVec::Zero(Eigen::Index(g.n))) {}
    Signal(const TimeGrid& g, CVec v);
    std::size_t size() const { return grid.n; }
};

struct TwoPointKernel {
    TimeGrid grid;
    CMat values;

    TwoPointKernel() = default;
    TwoPointKernel(const TimeGrid& g) : grid(g), values(CMat::Zero(Eigen::Index(g.n), Eigen::Index(g.n))) {}
    TwoPointKernel(const TimeGrid& g, CMat v);
};

struct OrderingParam {
    double s = 1.0;

    OrderingParam() = default;
    OrderingParam(double s_);
    double s_plus() const { return 0.5 * (1.0 + s); }
    double s_minus() const { return 0.5 * (1.0 - s); }
};

enum class Sign { plus, minus };
enum class Arg { first, second };

inline Sign flip(Sign s) { return s == Sign::plus ? Sign::minus : Sign::plus; }

void require_same_grid(const TimeGrid& a, const TimeGrid& b, const char* where);

}  // namespace keldysh
