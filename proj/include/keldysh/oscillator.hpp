#pragma once

#include "keldysh/rotation.hpp"

#include <cstdint>

namespace keldysh {

struct OscillatorSpec {
    double omega0 = 1.0;
    double hbar = 1.0;
    void validate() const;
};

struct GaussianState {
    double nbar = 0.0;
    cd m = 0.0;
    void validate() const;
};

double retarded_response(const OscillatorSpec& spec, double tau);
// 1/2 [1/(w - w0 + i eps) - 1/(w + w0 + i eps)]
cd retarded_response_spectrum(const OscillatorSpec& spec, double omega, double eps);

cd s_ordered_kernel(const OscillatorSpec& spec, const GaussianState& state, OrderingParam p, double t, double t2);

double reorder_gap_Z(const OscillatorSpec& spec, double tau);
// Z on a lag grid assembled from the +- parts of sampled D_R
Signal reorder_gap_Z_grid(const OscillatorSpec& spec, const TimeGrid& lag_grid);
Signal recover_DR_from_Z(const Signal& Z, double hbar = 1.0);

struct KeldyshPair {
    cd D_F;
    cd D_plus;
};
KeldyshPair keldysh_contractions(const OscillatorSpec& spec, double t, double t2);

double classical_infield(cd alpha, const OscillatorSpec& spec, double t);

// Throws unless omega0 completes a whole number of periods on the cyclic grid.
void require_periodic(const OscillatorSpec& spec, const TimeGrid& g);

// D_R(t_i - t_j) with the lag measured in the grid's time order
TwoPointKernel retarded_response_grid(const OscillatorSpec& spec, const TimeGrid& g);
TwoPointKernel s_ordered_kernel_grid(const OscillatorSpec& spec, const GaussianState& state, OrderingParam p, const TimeGrid& g);
CumulantSet oscillator_cumulants(const OscillatorSpec& spec, const GaussianState& state, const TimeGrid& g);
StationaryCumulants oscillator_vacuum_stationary(const OscillatorSpec& spec, const TimeGrid& lag_grid);

struct McKernel {
    TwoPointKernel mean;
    TwoPointKernel std_error;
    // estimate of the stationary coefficient hbar (nbar + s_-) of cos w0 (t - t'), with its standard error
    double cos_coefficient = 0.0;
    double cos_coefficient_se = 0.0;
    std::size_t n_samples = 0;
};

// Sample alpha from the Gaussian s-quasidistribution and average q_in(t) q_in(t').
McKernel mc_quasiaverage(const OscillatorSpec& spec, const GaussianState& state, OrderingParam p, const TimeGrid& g,
                         std::size_t n_samples, std::uint64_t seed);

// 2x2 covariance of (Re alpha, Im alpha) under the s-quasidistribution; throws if not positive semidefinite
Eigen::Matrix2d quasi_covariance(const GaussianState& state, OrderingParam p);

}  // namespace keldysh
