#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace keldysh {

enum class Precision { bits128, bits256, bits512 };

struct PVScheme {
    int M = 0;
    std::vector<double> masses;  // mu_0 < mu_1 < ... < mu_N
    std::vector<double> d;       // d_0 = 1, d_1 ... d_N
    bool impose_B0 = false;
    bool solved = false;
    std::vector<std::string> row_labels;
    std::vector<double> row_residuals;
    std::vector<std::string> warnings;

    int N() const { return int(masses.size()) - 1; }
    double mu0() const { return masses.front(); }
    void require_solved() const;
};

struct LinearSystem {
    int M = 0;
    std::vector<double> masses;
    bool impose_B0 = false;
    struct Row {
        char kind;  // 'A' or 'B'
        int n;      // power index: mu^{2n}
    };
    std::vector<Row> rows;
    std::vector<std::string> labels;
    Eigen::MatrixXd matrix;  // double-precision view, unknowns d_1 ... d_N
    Eigen::VectorXd rhs;
};

struct SolveOptions {
    Precision precision = Precision::bits256;
    double residual_tol = 1e-10;
    double boundedness_limit = 10.0;
};

std::vector<double> series_coeffs(int n_max);
int minimal_mass_count(int M, bool impose_B0);
std::vector<double> geometric_masses(double mu0, double Y, int N);
LinearSystem build_system(int M, const std::vector<double>& masses, bool impose_B0);
PVScheme solve_scheme(const LinearSystem& sys, SolveOptions opt = {});
PVScheme unregularized_scheme(double mu0);

struct AsymptoticComparison {
    double d1 = 0.0, d2 = 0.0;
    double d1_asymptotic = 0.0, d2_asymptotic = 0.0;
    double max_rest = 0.0;  // max |d_l| for l >= 3
};
AsymptoticComparison asymptotic_comparison(const PVScheme& s);

struct MomentCheck {
    double residual = 0.0;       // |integral + remainder| / unregularized
    double integral = 0.0;       // quadrature over [4 mu0^2, Lambda^2]
    double remainder = 0.0;      // analytic tail beyond Lambda^2
    double unregularized = 0.0;  // same moment of the single-mass spectrum
};

MomentCheck check_moments(const PVScheme& s, int n, double Lambda_sq);

}  // namespace keldysh
