#include "keldysh/projection.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>

namespace keldysh {

namespace {

std::mutex plan_mutex;

fftw_plan plan_for(int n, int dir) {
    static std::map<std::pair<int, int>, fftw_plan> plans;
    std::lock_guard<std::mutex> lock(plan_mutex);
    auto key = std::make_pair(n, dir);
    auto it = plans.find(key);
    if (it != plans.end()) return it->second;
    fftw_complex* a = fftw_alloc_complex(std::size_t(n));
    fftw_complex* b = fftw_alloc_complex(std::size_t(n));
    fftw_plan p = fftw_plan_dft_1d(n, a, b, dir, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(a);
    fftw_free(b);
    plans.emplace(key, p);
    return p;
}

void run(const cd* in, cd* out, int n, int dir) {
    fftw_plan p = plan_for(n, dir);
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(const_cast<cd*>(in)), reinterpret_cast<fftw_complex*>(out));
}

void mask_column(cd* col, int n, const Eigen::VectorXd& mask, CVec& work) {
    run(col, work.data(), n, FFTW_BACKWARD);
    for (int k = 0; k < n; ++k) work[k] *= mask[k] / double(n);
    run(work.data(), col, n, FFTW_FORWARD);
}

}  // namespace

CVec fourier_coeffs(const CVec& f) {
    int n = int(f.size());
    CVec c(n);
    run(f.data(), c.data(), n, FFTW_BACKWARD);
    return c / double(n);
}

CVec fourier_synth(const CVec& c) {
    int n = int(c.size());
    CVec f(n);
    run(c.data(), f.data(), n, FFTW_FORWARD);
    return f;
}

double theta_bin(const TimeGrid& g, std::size_t k, Sign sign) {
    long b = g.signed_bin(k);
    if (b == 0 || g.is_nyquist(k)) return 0.5;
    bool pos = b > 0;
    return (sign == Sign::plus) == pos ? 1.0 : 0.0;
}

Eigen::VectorXd s_mask(const TimeGrid& g, OrderingParam p, Sign sign) {
    Eigen::VectorXd m(Eigen::Index(g.n));
    for (std::size_t k = 0; k < g.n; ++k) m[Eigen::Index(k)] = p.s * theta_bin(g, k, sign) + p.s_minus();
    return m;
}

Signal project_pm(const Signal& f, Sign sign) {
    return project_s(f, OrderingParam(1.0), sign);
}

Signal project_s(const Signal& f, OrderingParam p, Sign sign) {
    Signal out(f.grid, f.values);
    CVec work(f.values.size());
    mask_column(out.values.data(), int(f.grid.n), s_mask(f.grid, p, sign), work);
    return out;
}

TwoPointKernel pair_kernel_project(const TwoPointKernel& K, Arg which, Sign sign, OrderingParam p) {
    int n = int(K.grid.n);
    if (K.values.rows() != n || K.values.cols() != n)
        throw Error("grid_mismatch", "pair_kernel_project: kernel shape does not match its grid");
    Eigen::VectorXd mask = s_mask(K.grid, p, sign);
    CVec work(n);
    TwoPointKernel out(K.grid);
    if (which == Arg::first) {
        out.values = K.values;
        for (int j = 0; j < n; ++j) mask_column(out.values.col(j).data(), n, mask, work);
    } else {
        out.values = K.values.transpose();
        for (int j = 0; j < n; ++j) mask_column(out.values.col(j).data(), n, mask, work);
        out.values.transposeInPlace();
    }
    return out;
}

cd bilinear(const Signal& f, const Signal& g) {
    require_same_grid(f.grid, g.grid, "bilinear");
    return (f.values.array() * g.values.array()).sum() * f.grid.dt;
}

cd bilinear(const Signal& f, const TwoPointKernel& K, const Signal& g) {
    require_same_grid(f.grid, K.grid, "bilinear");
    require_same_grid(g.grid, K.grid, "bilinear");
    cd v = f.values.transpose() * (K.values * g.values);
    return v * K.grid.dt * K.grid.dt;
}

}  // namespace keldysh
