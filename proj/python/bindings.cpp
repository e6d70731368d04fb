#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "keldysh/acceptance.hpp"
#include "keldysh/medium.hpp"

namespace py = pybind11;
using namespace keldysh;

PYBIND11_MODULE(_keldysh, m) {
    py::register_exception<Error>(m, "KeldyshError", PyExc_ValueError);

    py::enum_<TimeOrder>(m, "TimeOrder").value("linear", TimeOrder::linear).value("cyclic", TimeOrder::cyclic);
    py::enum_<Sign>(m, "Sign").value("plus", Sign::plus).value("minus", Sign::minus);
    py::enum_<Precision>(m, "Precision").value("bits128", Precision::bits128).value("bits256", Precision::bits256).value("bits512", Precision::bits512);

    py::class_<TimeGrid>(m, "TimeGrid")
        .def(py::init<std::size_t, double, double, TimeOrder>(), py::arg("n"), py::arg("dt"), py::arg("t0") = 0.0, py::arg("order") = TimeOrder::linear)
        .def_static("lag", &TimeGrid::lag)
        .def_readonly("n", &TimeGrid::n)
        .def_readonly("dt", &TimeGrid::dt)
        .def_readonly("t0", &TimeGrid::t0)
        .def_readonly("order", &TimeGrid::order)
        .def("period", &TimeGrid::period)
        .def("times", [](const TimeGrid& g) {
            Eigen::VectorXd t(Eigen::Index(g.n));
            for (std::size_t j = 0; j < g.n; ++j) t[Eigen::Index(j)] = g.t(j);
            return t;
        });

    m.def("fourier_coeffs", &fourier_coeffs);
    m.def("fourier_synth", &fourier_synth);
    m.def(
        "project",
        [](const TimeGrid& g, const CVec& f, double s, Sign sign) { return project_s(Signal(g, f), OrderingParam(s), sign).values; },
        py::arg("grid"), py::arg("f"), py::arg("s") = 1.0, py::arg("sign") = Sign::plus);

    py::class_<OscillatorSpec>(m, "OscillatorSpec")
        .def(py::init([](double w, double h) { return OscillatorSpec{w, h}; }), py::arg("omega0") = 1.0, py::arg("hbar") = 1.0)
        .def_readwrite("omega0", &OscillatorSpec::omega0)
        .def_readwrite("hbar", &OscillatorSpec::hbar);
    py::class_<GaussianState>(m, "GaussianState")
        .def(py::init([](double n, cd mm) { return GaussianState{n, mm}; }), py::arg("nbar") = 0.0, py::arg("m") = cd(0.0))
        .def_readwrite("nbar", &GaussianState::nbar)
        .def_readwrite("m", &GaussianState::m);

    m.def("s_ordered_kernel", [](const OscillatorSpec& os, const GaussianState& st, double s, const TimeGrid& g) {
        return s_ordered_kernel_grid(os, st, OrderingParam(s), g).values;
    });
    m.def("retarded_response", [](const OscillatorSpec& os, const TimeGrid& g) { return retarded_response_grid(os, g).values; });
    m.def("reorder_gap_Z", [](const OscillatorSpec& os, const TimeGrid& lag_grid) { return reorder_gap_Z_grid(os, lag_grid).values; });
    m.def("rotate", [](const OscillatorSpec& os, const GaussianState& st, double s, const TimeGrid& g) {
        RotatedCumulants r = rotate(oscillator_cumulants(os, st, g), OrderingParam(s));
        return py::make_tuple(r.D_R.values, r.N_s.values);
    });

    m.def("scalar_kernels", [](double k0, double kvec_sq, double mu_sq, double eps) {
        ScalarKernels s = scalar_kernels(MomentumPoint(k0, kvec_sq), mu_sq, eps);
        return py::dict(py::arg("D_R") = s.D_R, py::arg("D_A") = s.D_A, py::arg("D_F") = s.D_F, py::arg("D_plus") = s.D_plus,
                        py::arg("D_minus") = s.D_minus, py::arg("D") = s.D);
    });

    m.def("F_threshold", &F_threshold);
    m.def(
        "R_obs",
        [](double k_sq, double sgn, double mu0, double alpha) { return R_obs(k_sq, sgn, DiracSeaSpec{mu0, alpha}); },
        py::arg("k_sq"), py::arg("sgn") = 1.0, py::arg("mu0") = 1.0, py::arg("alpha") = DiracSeaSpec{}.alpha);
    m.def("Pi_plus_closed_form", [](double k0, double kvec_sq) { return Pi_plus_closed_form(MomentumPoint(k0, kvec_sq), DiracSeaSpec{}).scalar; });

    m.def(
        "pv_solve",
        [](int M, const std::vector<double>& masses, bool impose_B0, Precision prec) {
            SolveOptions o;
            o.precision = prec;
            PVScheme s = solve_scheme(build_system(M, masses, impose_B0), o);
            return py::dict(py::arg("d") = s.d, py::arg("residuals") = s.row_residuals, py::arg("labels") = s.row_labels,
                            py::arg("warnings") = s.warnings);
        },
        py::arg("M"), py::arg("masses"), py::arg("impose_B0") = false, py::arg("precision") = Precision::bits256);
    m.def("geometric_masses", &geometric_masses);
    m.def("minimal_mass_count", &minimal_mass_count);

    m.def("dress_toy_volterra", [](double w0, double pi0, double dt, std::size_t n) { return dress_toy_volterra(OneModeToy{w0, pi0}, dt, n); });
    m.def("dress_toy_closed_form", [](double w0, double pi0, double tau) { return dress_toy_closed_form(OneModeToy{w0, pi0}, tau); });
    m.def("zero_point_smooth", [](double k0, double kvec_sq) { return zero_point_spectrum(MomentumPoint(k0, kvec_sq), MediumSpec{}).smooth; });

    m.def(
        "run_acceptance",
        [](std::uint64_t seed, bool timing) {
            AcceptanceOptions o;
            o.seed = seed;
            o.timing = timing;
            auto r = run_acceptance(o);
            return py::make_tuple(all_pass(r), format_report(r));
        },
        py::arg("seed") = AcceptanceOptions{}.seed, py::arg("timing") = false);
}
