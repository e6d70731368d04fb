#pragma once

#include "keldysh/diracsea.hpp"
#include "keldysh/oscillator.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace keldysh {

struct MediumSpec {
    DiracSeaSpec dirac;
    double R0 = 0.0;  // renormalized by default
    double hbar_c = 1.0;
    double mu_vac = 1.0;
    RObsOptions robs;
    void validate() const;
};

struct DeltaTerm {
    double k_sq = 0.0;  // location
    cd weight;          // coefficient of delta(k^2 - k_sq)
};

// Dressed retarded function in momentum space: value off the light cone plus its delta(k^2) ledger.
struct DressedValue {
    cd value;
    DeltaTerm delta;
    bool on_light_cone = false;
};

DressedValue dress_retarded_momentum(const MomentumPoint& k, const MediumSpec& m);
// same with k^2 -> k^2 + i eps sign k0 and finite-eps R_obs
cd dress_retarded_momentum_eps(const MomentumPoint& k, const MediumSpec& m, double eps);

// Solves Dr = D + dt^2 D Pi Dr by forward substitution; both kernels retarded on a linear grid.
TwoPointKernel dress_retarded_grid(const TwoPointKernel& D_R, const TwoPointKernel& pi_R, double tol = 1e-12);
// first terms of the Neumann series D + D Pi D + ...
TwoPointKernel neumann_series(const TwoPointKernel& D_R, const TwoPointKernel& pi_R, int terms);

Signal mean_field(const TwoPointKernel& Dr, const Signal& J_e, const Signal& j_r_mean);
TwoPointKernel noise_map(const TwoPointKernel& Dr, const TwoPointKernel& pi_N, double tol = 1e-10);

// One-mode toy: bare oscillator response dressed by a local susceptibility pi0 delta(tau).
struct OneModeToy {
    double omega0 = 1.0;
    double pi0 = 0.0;
    void validate() const;
    double Omega() const;  // dressed frequency, sqrt(omega0^2 + omega0 pi0)
};
// D_R(tau) samples at tau = m dt, m = 0 .. n-1, by the causal Volterra recursion in O(n^2)
std::vector<double> dress_toy_volterra(const OneModeToy& toy, double dt, std::size_t n);
// inverse transform of omega0 / ((w + i0)^2 - omega0^2 - omega0 pi0), from its poles
double dress_toy_closed_form(const OneModeToy& toy, double tau);
cd dress_toy_spectrum(const OneModeToy& toy, double omega, double eps);
TwoPointKernel toy_pi_grid(const OneModeToy& toy, const TimeGrid& g);

struct ToyResidual {
    double equation = 0.0;    // max |Dr'' + Omega^2 Dr| / (Omega^2 max |Dr|), interior
    double initial_slope = 0.0;  // |Dr'(0+) + omega0| / omega0
};
ToyResidual toy_equation_residual(const OneModeToy& toy, const std::vector<double>& Dr, double dt);

struct SpectralDensity {
    std::vector<DeltaTerm> delta_terms;
    double k_sq = 0.0;
    double smooth = 0.0;
};

SpectralDensity zero_point_spectrum(const MomentumPoint& k, const MediumSpec& m);
// (i hc / 2) [Dr(k) - Dr(-k)] sign k0 at finite eps
double zero_point_finite_eps(const MomentumPoint& k, const MediumSpec& m, double eps);
// finite-eps Lorentzian image of the delta ledger: weight (eps/pi) / (k^4 + eps^2)
double delta_ledger_at_eps(const SpectralDensity& z, double eps);

// -2 hc Im[F+ F+ Pi_F + F- F+ Pi_>] for stationary kernels
StationaryKernel time_normal_vacuum_noise(const StationaryKernel& pi_F, const StationaryKernel& pi_W, double hbar_c = 1.0);

// Stationary lag kernels of the Dirac-sea polarization at fixed |k|^2 (scalar coefficient).
struct VacuumPolarizationLag {
    StationaryKernel pi_F;
    StationaryKernel pi_W;  // Pi^(+), frequency-positive
    StationaryKernel pi_R;
};
VacuumPolarizationLag vacuum_polarization_lag(const TimeGrid& lag_grid, double kvec_sq, const MediumSpec& m);
// dressed retarded function of the Dirac-sea medium at fixed |k|^2, finite eps, sampled on the lag grid
StationaryKernel dressed_retarded_lag(const TimeGrid& lag_grid, double kvec_sq, const MediumSpec& m, double eps);

struct GaugeDiagnosis {
    bool consistent = false;
    double delta_weight = 0.0;        // pi hc mu_vac
    double transversality = 0.0;      // |k^v Z g_vv'| / |Z| |k| of the Feynman-gauge form, smooth part
    double projected_smooth_residual = 0.0;  // transversality after projection, smooth part
    std::string projector;
    std::string obstruction;
};
GaugeDiagnosis diagnose_gauge(const MomentumPoint& k, const std::array<double, 3>& kvec, const MediumSpec& m);

// Classical stochastic cross-check on the bare one-mode toy.
struct WyldConfig {
    OscillatorSpec osc;
    GaussianState state;   // in-field statistics, sampled with the s-quasidistribution
    OrderingParam p{1.0};
    double sigma = 0.0;    // white J_r: <J_r(t) J_r(t')> = sigma^2 delta(t - t')
    TimeGrid grid;         // linear
    Signal J_e;
    // quadratic probes y^T G y of the fluctuation y = q - D J_e, estimated with their standard errors
    std::vector<Eigen::MatrixXd> probes;
};
struct WyldResult {
    Signal mean;
    Signal mean_se;
    TwoPointKernel cov;
    TwoPointKernel cov_se;
    std::vector<double> probe_mean;
    std::vector<double> probe_se;
    std::size_t n_samples = 0;
};
WyldResult wyld_mc(const WyldConfig& cfg, std::size_t n_samples, std::uint64_t seed);
// oracle pieces for the same model
TwoPointKernel wyld_response_matrix(const WyldConfig& cfg);  // dt D_R(t_i - t_j)

}  // namespace keldysh
