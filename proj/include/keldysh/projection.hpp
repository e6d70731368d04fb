#pragma once

#include "keldysh/grid.hpp"

namespace keldysh {

// Expansion f(t_j) = sum_k c_k exp(-i w_k (t_j - t0)) with w_k the signed DFT frequencies.
CVec fourier_coeffs(const CVec& f);
CVec fourier_synth(const CVec& c);

// theta(+-w_k) with 1/2 on the zero and Nyquist bins
double theta_bin(const TimeGrid& g, std::size_t k, Sign sign);
// s * theta(+-w_k) + s_-
Eigen::VectorXd s_mask(const TimeGrid& g, OrderingParam p, Sign sign);

Signal project_pm(const Signal& f, Sign sign);
Signal project_s(const Signal& f, OrderingParam p, Sign sign);

// F^(s+-) acting on the first (t) or second (t') argument
TwoPointKernel pair_kernel_project(const TwoPointKernel& K, Arg which, Sign sign, OrderingParam p = OrderingParam(1.0));

// sum_j f_j g_j dt
cd bilinear(const Signal& f, const Signal& g);
// sum_ij f_i K_ij g_j dt^2
cd bilinear(const Signal& f, const TwoPointKernel& K, const Signal& g);

}  // namespace keldysh
