#pragma once

#include "keldysh/pvreg.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

namespace keldysh::detail {

// tanh-sinh on [a, b] through an explicit map to [-1, 1]; narrow intervals far from 0 are safe
template <class F>
double integrate_interval(F f, double a, double b, double tol = 1e-13, double* err = nullptr, double* l1 = nullptr) {
    static thread_local boost::math::quadrature::tanh_sinh<double> ts(12);
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    auto g = [&](double x) { return f(mid + half * x) * half; };
    return ts.integrate(g, -1.0, 1.0, tol, err, l1);
}

// int over [lo, hi] in mu^2 of mu^{2n} f(mu^2) dmu^2, segmented in log mu^2 at the given breaks
template <class F>
double log_segment_integral(F f, int n, double lo, double hi, std::vector<double> breaks) {
    breaks.push_back(lo);
    breaks.push_back(hi);
    std::sort(breaks.begin(), breaks.end());
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        double a = std::max(breaks[i], lo), b = std::min(breaks[i + 1], hi);
        if (!(b > a)) continue;
        double ua = std::log(a), ub = std::log(b);
        int pieces = std::max(1, int(std::ceil((ub - ua) / 2.0)));
        double h = (ub - ua) / pieces;
        auto g = [&](double u) { return std::exp(double(n + 1) * u) * f(std::exp(u)); };
        for (int p = 0; p < pieces; ++p) total += integrate_interval(g, ua + p * h, ua + (p + 1) * h);
    }
    return total;
}

// int_{Lambda^2}^inf dmu^2 mu^{2n} K_reg(mu^2) from the large-mass expansion, valid above 4 mu_N^2
double moment_tail(const PVScheme& s, int n, double Lambda_sq);

}  // namespace keldysh::detail
