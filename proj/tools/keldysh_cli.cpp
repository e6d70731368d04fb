#include "keldysh/acceptance.hpp"
#include "keldysh/io.hpp"
#include "keldysh/medium.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>

namespace fs = std::filesystem;
using namespace keldysh;
using io::json;

namespace {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class PType { num, integer, flag, text, numlist };

struct PSpec {
    std::string name;
    PType type;
    json def;
    std::string help;
};

struct Ctx;

struct Verb {
    std::string name;  // "oscillator mc"
    std::vector<PSpec> params;
    bool stochastic = false;
    bool medium = false;  // takes --diagnose-gauge
    std::function<json(Ctx&)> run;
};

struct Ctx {
    const Verb* verb = nullptr;
    json params;
    std::uint64_t seed = 0;
    bool has_seed = false;
    bool diagnose_gauge = false;
    fs::path out;
    Precision backend = Precision::bits256;
    std::vector<std::string> outputs;

    double num(const std::string& k) const { return params.at(k).get<double>(); }
    long integer(const std::string& k) const { return params.at(k).get<long>(); }
    std::size_t count(const std::string& k) const {
        long v = integer(k);
        if (v < 1) throw ConfigError("parameter '" + k + "' must be >= 1");
        return std::size_t(v);
    }
    bool flag(const std::string& k) const { return params.at(k).get<bool>(); }
    std::string text(const std::string& k) const { return params.at(k).get<std::string>(); }
    std::vector<double> list(const std::string& k) const { return params.at(k).get<std::vector<double>>(); }

    void csv(const std::string& name, const io::Table& t) {
        io::write_csv((out / name).string(), t);
        outputs.push_back(name);
    }
    std::uint64_t need_seed() const {
        if (!has_seed) throw ConfigError("verb '" + verb->name + "' is stochastic and needs --seed");
        return seed;
    }
};

double parse_number(const std::string& s, const std::string& key) {
    std::size_t pos = 0;
    double v;
    try {
        v = std::stod(s, &pos);
    } catch (...) {
        throw ConfigError("parameter '" + key + "': not a number: '" + s + "'");
    }
    if (pos != s.size()) throw ConfigError("parameter '" + key + "': not a number: '" + s + "'");
    return v;
}

json coerce(const PSpec& p, const json& v) {
    switch (p.type) {
        case PType::num:
            if (v.is_number()) return v.get<double>();
            break;
        case PType::integer:
            if (v.is_number_integer()) return v.get<long>();
            if (v.is_number_float() && v.get<double>() == std::floor(v.get<double>())) return long(v.get<double>());
            break;
        case PType::flag:
            if (v.is_boolean()) return v;
            break;
        case PType::text:
            if (v.is_string()) return v;
            break;
        case PType::numlist:
            if (v.is_number()) return json::array({v.get<double>()});
            if (v.is_array() && std::all_of(v.begin(), v.end(), [](const json& e) { return e.is_number(); })) {
                json a = json::array();
                for (const auto& e : v) a.push_back(e.get<double>());
                return a;
            }
            break;
    }
    throw ConfigError("parameter '" + p.name + "' has the wrong type");
}

json coerce_text(const PSpec& p, const std::vector<std::string>& raw) {
    switch (p.type) {
        case PType::num: return parse_number(raw.back(), p.name);
        case PType::integer: {
            double v = parse_number(raw.back(), p.name);
            if (v != std::floor(v)) throw ConfigError("parameter '" + p.name + "' must be an integer");
            return long(v);
        }
        case PType::flag: return true;
        case PType::text: return raw.back();
        case PType::numlist: {
            json a = json::array();
            for (const auto& s : raw) a.push_back(parse_number(s, p.name));
            return a;
        }
    }
    return nullptr;
}

MomentumPoint point_from_k2(double k2) { return k2 >= 0.0 ? MomentumPoint(std::sqrt(k2), 0.0) : MomentumPoint(0.0, -k2); }

MediumSpec medium_from(const Ctx& c) {
    MediumSpec m;
    m.dirac.mu0 = c.num("mu0");
    m.dirac.alpha = c.num("alpha");
    m.R0 = c.num("R0");
    m.validate();
    return m;
}

json gauge_json(const MomentumPoint& k, const MediumSpec& m) {
    double kv = std::sqrt(k.kvec_sq);
    GaugeDiagnosis d = diagnose_gauge(k, {kv, 0.0, 0.0}, m);
    return json{{"consistent", d.consistent},
                {"delta_weight", d.delta_weight},
                {"divergent_coefficient", "delta_weight / k^2 at k^2 = 0"},
                {"transversality_feynman_form", d.transversality},
                {"projected_smooth_residual", d.projected_smooth_residual},
                {"projector", d.projector},
                {"obstruction", d.obstruction}};
}

OscillatorSpec osc_from(const Ctx& c, double omega0) {
    OscillatorSpec os{omega0, c.num("hbar")};
    os.validate();
    return os;
}

GaussianState state_from(const Ctx& c) {
    GaussianState st{c.num("nbar"), cd(c.num("m-re"), c.num("m-im"))};
    st.validate();
    return st;
}

// cyclic grid with omega0 = 2 pi cycles / T
std::pair<TimeGrid, OscillatorSpec> periodic_setup(const Ctx& c) {
    TimeGrid g(c.count("n"), c.num("dt"), 0.0, TimeOrder::cyclic);
    return {g, osc_from(c, 2.0 * pi * c.num("cycles") / g.period())};
}

io::Table two_kernel_table(const TwoPointKernel& a, const TwoPointKernel& b, const char* na, const char* nb) {
    io::Table t{{"t", "t2", std::string(na) + "_re", std::string(na) + "_im", std::string(nb) + "_re", std::string(nb) + "_im"}, {},
                {io::grid_comment(a.grid)}};
    for (std::size_t i = 0; i < a.grid.n; ++i)
        for (std::size_t j = 0; j < a.grid.n; ++j) {
            auto x = Eigen::Index(i), y = Eigen::Index(j);
            cd u = a.values(x, y), v = b.values(x, y);
            t.rows.push_back({a.grid.t(i), a.grid.t(j), u.real(), u.imag(), v.real(), v.imag()});
        }
    return t;
}

double max_abs(const CMat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

// ---- verbs

json run_project(Ctx& c) {
    TimeGrid g(c.count("n"), c.num("dt"), 0.0, TimeOrder::cyclic);
    Signal f(g);
    std::string kind = c.text("signal");
    double w = 2.0 * pi * c.num("cycles") / g.period();
    if (kind == "random") {
        std::mt19937_64 eng(c.need_seed());
        std::normal_distribution<double> nd;
        for (Eigen::Index j = 0; j < f.values.size(); ++j) f.values[j] = cd(nd(eng), nd(eng));
    } else if (kind == "cos" || kind == "exp") {
        for (std::size_t j = 0; j < g.n; ++j) f.values[Eigen::Index(j)] = kind == "cos" ? cd(std::cos(w * g.t(j))) : std::exp(-I * w * g.t(j));
    } else {
        throw ConfigError("signal must be random, cos or exp");
    }
    std::string sg = c.text("sign");
    if (sg != "+" && sg != "-") throw ConfigError("sign must be + or -");
    Sign sign = sg == "+" ? Sign::plus : Sign::minus;
    OrderingParam p(c.num("s"));
    Signal out = project_s(f, p, sign);
    io::Table t{{"t", "in_re", "in_im", "out_re", "out_im"}, {}, {io::grid_comment(g)}};
    for (std::size_t j = 0; j < g.n; ++j) {
        cd a = f.values[Eigen::Index(j)], b = out.values[Eigen::Index(j)];
        t.rows.push_back({g.t(j), a.real(), a.imag(), b.real(), b.imag()});
    }
    c.csv("projection.csv", t);
    Signal other = project_s(f, p, flip(sign));
    double comp = (out.values + other.values - f.values).cwiseAbs().maxCoeff();
    // s-weighted completeness: F(s+) + F(s-) = 1 for every s
    return json{{"residuals", json{{"completeness", comp}}}};
}

json run_osc_kernel(Ctx& c) {
    OscillatorSpec os = osc_from(c, c.num("omega0"));
    GaussianState st = state_from(c);
    TimeGrid g(c.count("n"), c.num("dt"), 0.0, TimeOrder::linear);
    OrderingParam p(c.num("s"));
    TwoPointKernel K = s_ordered_kernel_grid(os, st, p, g);
    TwoPointKernel D = retarded_response_grid(os, g);
    c.csv("kernel.csv", two_kernel_table(K, D, "s_ordered", "retarded"));
    return json{{"omega0", os.omega0}, {"s", p.s}, {"stationary_coefficient", os.hbar * (st.nbar + p.s_minus())}, {"residuals", json::object()}};
}

json run_osc_lambda(Ctx& c) {
    auto [g, os] = periodic_setup(c);
    GaussianState st = state_from(c);
    OrderingParam p(c.num("s"));
    std::mt19937_64 eng(c.need_seed());
    std::normal_distribution<double> nd;
    CumulantSet oc = oscillator_cumulants(os, st, g);
    RotatedCumulants closed{Signal(g), retarded_response_grid(os, g), s_ordered_kernel_grid(os, st, p, g), p, os.hbar};
    json draws = json::array();
    double worst = 0.0;
    for (std::size_t i = 0; i < c.count("draws"); ++i) {
        Signal eta(g), js(g);
        for (Eigen::Index j = 0; j < eta.values.size(); ++j) {
            eta.values[j] = nd(eng);
            js.values[j] = nd(eng);
        }
        EtaPair e = rotation_substitution(eta, js, p, os.hbar);
        cd lhs = lambda_form(oc, e.eta_plus, e.eta_minus);
        cd rhs = rotated_form(closed, eta, js);
        double rel = std::abs(lhs - rhs) / std::max(std::abs(lhs), 1e-300);
        worst = std::max(worst, rel);
        draws.push_back(json{{"lhs", io::complex_json(lhs)}, {"rhs", io::complex_json(rhs)}, {"relative_residual", rel}});
    }
    return json{{"draws", draws}, {"residuals", json{{"max_relative", worst}}}};
}

json run_osc_mc(Ctx& c) {
    OscillatorSpec os = osc_from(c, c.num("omega0"));
    GaussianState st = state_from(c);
    TimeGrid g(c.count("n"), c.num("dt"), 0.0, TimeOrder::linear);
    OrderingParam p(c.num("s"));
    McKernel mc = mc_quasiaverage(os, st, p, g, c.count("samples"), c.need_seed());
    TwoPointKernel K = s_ordered_kernel_grid(os, st, p, g);
    io::Table t{{"t", "t2", "mc", "se", "exact"}, {}, {io::grid_comment(g)}};
    double zmax = 0.0;
    for (std::size_t i = 0; i < g.n; ++i)
        for (std::size_t j = 0; j < g.n; ++j) {
            auto a = Eigen::Index(i), b = Eigen::Index(j);
            double m = mc.mean.values(a, b).real(), se = mc.std_error.values(a, b).real(), ex = K.values(a, b).real();
            t.rows.push_back({g.t(i), g.t(j), m, se, ex});
            if (se > 0.0) zmax = std::max(zmax, std::abs(m - ex) / se);
        }
    c.csv("mc_kernel.csv", t);
    json r{{"samples", mc.n_samples}, {"cos_coefficient", mc.cos_coefficient}, {"cos_coefficient_se", mc.cos_coefficient_se},
           {"max_entry_z_diagnostic", zmax}};
    if (st.m == cd(0.0)) {
        double want = os.hbar * (st.nbar + p.s_minus());
        r["expected"] = want;
        r["residuals"] = json{{"cos_coefficient_z", (mc.cos_coefficient - want) / mc.cos_coefficient_se}};
    } else {
        r["residuals"] = json::object();
    }
    return r;
}

json run_rotate(Ctx& c) {
    auto [g, os] = periodic_setup(c);
    GaussianState st = state_from(c);
    OrderingParam p(c.num("s"));
    CumulantSet ctl = oscillator_cumulants(os, st, g);
    RotatedCumulants rot = rotate(ctl, p);
    c.csv("rotated.csv", two_kernel_table(rot.D_R, rot.N_s, "D_R", "N_s"));
    ConsistencyReport cr = consistency(ctl);
    double dr = max_abs(rot.D_R.values - retarded_response_grid(os, g).values);
    double ns = max_abs(rot.N_s.values - s_ordered_kernel_grid(os, st, p, g).values);
    return json{{"consistency", json{{"closure", cr.closure}, {"hermiticity", cr.hermiticity}, {"reversal", cr.reversal}, {"ordering", cr.ordering}}},
                {"residuals", json{{"D_R_vs_closed_form", dr}, {"N_s_vs_closed_form", ns}}}};
}

json run_unrotate(Ctx& c) {
    auto [g, os] = periodic_setup(c);
    GaussianState st = state_from(c);
    OrderingParam p(c.num("s"));
    CumulantSet ctl = oscillator_cumulants(os, st, g);
    CumulantSet back = unrotate(rotate(ctl, p));
    c.csv("wightman.csv", two_kernel_table(back.K_W, back.K_F, "K_W", "K_F"));
    double e = std::max({max_abs(back.K_W.values - ctl.K_W.values), max_abs(back.K_F.values - ctl.K_F.values),
                         max_abs(back.K_rev.values - ctl.K_rev.values)});
    return json{{"residuals", json{{"round_trip", e}}}};
}

json run_reorder(Ctx& c) {
    auto [g, os] = periodic_setup(c);
    GaussianState st = state_from(c);
    OrderingParam p(c.num("s"));
    double s2 = c.num("s-new");
    (void)OrderingParam(s2);  // range check
    CumulantSet ctl = oscillator_cumulants(os, st, g);
    RotatedCumulants rot = rotate(ctl, p);
    RotatedCumulants ro = reorder(rot, s2);
    TwoPointKernel Z = reordering_gap(rot.D_R, rot.hbar_c);
    c.csv("reordered.csv", two_kernel_table(ro.N_s, Z, "N_s_new", "Z"));
    double direct = max_abs(ro.N_s.values - rotate(ctl, OrderingParam(s2)).N_s.values);
    double closed = max_abs(ro.N_s.values - s_ordered_kernel_grid(os, st, OrderingParam(s2), g).values);
    return json{{"residuals", json{{"vs_direct_rotation", direct}, {"vs_closed_form", closed}}}};
}

std::vector<MomentumPoint> k0_grid(const Ctx& c) { return symmetric_k0_grid(c.num("kvec-sq"), c.num("k0-max"), c.count("n-half")); }

json residuals_json(const TransformResiduals& r) {
    return json{{"feynman", r.feynman},       {"plus", r.plus},         {"minus", r.minus},
                {"plus_from_feynman", r.plus_from_feynman}, {"commutator", r.commutator}, {"completeness", r.completeness},
                {"conjugation", r.conjugation}, {"points", r.points}};
}

json run_kernels_scalar(Ctx& c) {
    auto grid = k0_grid(c);
    double mu2 = c.num("mu-sq"), eps = c.num("eps");
    io::Table t{{"k0", "kvec_sq", "D_R_re", "D_R_im", "D_F_re", "D_F_im", "D_plus_re", "D_plus_im", "D_minus_re", "D_minus_im"}, {}, {}};
    for (const auto& k : grid) {
        ScalarKernels s = scalar_kernels(k, mu2, eps);
        t.rows.push_back({k.k0, k.kvec_sq, s.D_R.real(), s.D_R.imag(), s.D_F.real(), s.D_F.imag(), s.D_plus.real(), s.D_plus.imag(),
                          s.D_minus.real(), s.D_minus.imag()});
    }
    c.csv("scalar_kernels.csv", t);
    return json{{"residuals", residuals_json(response_transform_check(grid, mu2, eps))}};
}

json run_kernels_photon(Ctx& c) {
    auto grid = k0_grid(c);
    double eps = c.num("eps"), mv = c.num("mu-vac");
    io::Table t{{"k0", "kvec_sq", "D_R_re", "D_R_im", "D_F_re", "D_F_im", "D_plus_re", "D_plus_im"}, {}, {}};
    for (const auto& k : grid) {
        cd dr = photon_retarded(k, eps, mv);
        PhotonPair pp = photon_keldysh_pair(k, eps, mv);
        t.rows.push_back({k.k0, k.kvec_sq, dr.real(), dr.imag(), pp.D_F.real(), pp.D_F.imag(), pp.D_plus.real(), pp.D_plus.imag()});
    }
    c.csv("photon_kernels.csv", t);
    return json{{"residuals", residuals_json(response_transform_check(grid, 0.0, eps, -mv))}};
}

json run_vacuum_pol(Ctx& c) {
    DiracSeaSpec sp{c.num("mu0"), c.num("alpha")};
    sp.validate();
    double R0v = 0.0;
    json scheme = nullptr;
    if (!c.flag("renormalized")) {
        int M = int(c.integer("M"));
        bool b0 = c.flag("impose-b0");
        SolveOptions so;
        so.precision = c.backend;
        PVScheme s = solve_scheme(build_system(M, geometric_masses(sp.mu0, c.num("geometric"), minimal_mass_count(M, b0)), b0), so);
        R0v = R0(s, sp);
        scheme = io::scheme_json(s);
    }
    RObsOptions o;
    if (c.num("finite-eps") > 0.0) {
        o.exact = false;
        o.eps = c.num("finite-eps");
    }
    std::string kind = c.text("kind");
    if (kind != "R" && kind != "F" && kind != "plus") throw ConfigError("kind must be R, F or plus");
    std::vector<MomentumPoint> pts;
    for (double k2 : c.list("k2")) pts.push_back(point_from_k2(k2));
    for (double k0 : c.list("k0")) pts.push_back(MomentumPoint(k0, c.num("kvec-sq")));
    if (pts.empty()) throw ConfigError("vacuum-pol needs --k2 or --k0");
    io::Table t{{"k0", "kvec_sq", "k2", "re", "im", "re_over_k2", "im_over_k2"}, {}, {"kind=" + kind}};
    for (const auto& k : pts) {
        cd v = kind == "R" ? Pi_R_reg(k, sp, R0v, o).scalar : kind == "F" ? Pi_F_reg(k, sp, R0v, o).scalar : Pi_plus(k, sp, R0v, o).scalar;
        double k2 = k.k_sq();
        t.rows.push_back({k.k0, k.kvec_sq, k2, v.real(), v.imag(), k2 != 0.0 ? v.real() / k2 : NAN, k2 != 0.0 ? v.imag() / k2 : NAN});
    }
    c.csv("vacuum_pol.csv", t);
    return json{{"R0", R0v}, {"low_k_reference", sp.alpha / (15.0 * pi * sp.mu0 * sp.mu0)}, {"scheme", scheme}, {"residuals", json::object()}};
}

json run_pv_solve(Ctx& c) {
    int M = int(c.integer("M"));
    bool b0 = c.flag("impose-b0");
    double mu0 = c.num("mu0");
    std::vector<double> masses = c.list("masses");
    if (masses.empty()) {
        long N = c.integer("N");
        masses = geometric_masses(mu0, c.num("geometric"), N > 0 ? int(N) : minimal_mass_count(M, b0));
    }
    SolveOptions so;
    so.precision = c.backend;
    PVScheme s = solve_scheme(build_system(M, masses, b0), so);
    DiracSeaSpec sp{masses.front(), c.num("alpha")};
    json r = io::scheme_json(s);
    AsymptoticComparison ac = asymptotic_comparison(s);
    r["asymptotic"] = json{{"d1", ac.d1}, {"d2", ac.d2}, {"d1_asymptotic", ac.d1_asymptotic}, {"d2_asymptotic", ac.d2_asymptotic}, {"max_rest", ac.max_rest}};
    r["R0"] = R0(s, sp);
    double worst = 0.0;
    for (double v : s.row_residuals) worst = std::max(worst, std::abs(v));
    r["residuals"] = json{{"max_row_residual", worst}};
    return r;
}

json run_dress(Ctx& c) {
    std::string model = c.text("model");
    if (model == "toy") {
        OneModeToy toy{c.num("omega0"), c.num("pi0")};
        toy.validate();
        double dt = c.num("dt");
        auto n = std::size_t(std::llround(c.num("T") / dt)) + 1;
        std::vector<double> X = dress_toy_volterra(toy, dt, n);
        io::Table t{{"tau", "volterra", "closed_form"}, {}, {}};
        double err = 0.0, sc = 0.0;
        for (std::size_t m = 0; m < n; ++m) {
            double cf = dress_toy_closed_form(toy, double(m) * dt);
            t.rows.push_back({double(m) * dt, X[m], cf});
            err = std::max(err, std::abs(X[m] - cf));
            sc = std::max(sc, std::abs(cf));
        }
        c.csv("dress_toy.csv", t);
        ToyResidual tr = toy_equation_residual(toy, X, dt);
        return json{{"Omega", toy.Omega()},
                    {"residuals", json{{"volterra_vs_closed_form", err / sc}, {"equation", tr.equation}, {"initial_slope", tr.initial_slope}}}};
    }
    if (model != "momentum") throw ConfigError("model must be toy or momentum");
    MediumSpec m = medium_from(c);
    double eps = c.num("finite-eps");
    io::Table t{{"k0", "kvec_sq", "k2", "re", "im", "delta_weight_re", "delta_weight_im"}, {}, {}};
    std::vector<MomentumPoint> pts;
    for (double k0 : c.list("k0")) pts.push_back(MomentumPoint(k0, c.num("kvec-sq")));
    if (pts.empty()) throw ConfigError("dress --model momentum needs --k0");
    for (const auto& k : pts) {
        if (eps > 0.0) {
            cd v = dress_retarded_momentum_eps(k, m, eps);
            t.rows.push_back({k.k0, k.kvec_sq, k.k_sq(), v.real(), v.imag(), 0.0, 0.0});
        } else {
            DressedValue v = dress_retarded_momentum(k, m);
            t.rows.push_back({k.k0, k.kvec_sq, k.k_sq(), v.value.real(), v.value.imag(), v.delta.weight.real(), v.delta.weight.imag()});
        }
    }
    c.csv("dress_momentum.csv", t);
    json r{{"residuals", json::object()}};
    if (c.diagnose_gauge) r["gauge"] = gauge_json(pts.front(), m);
    return r;
}

json run_noise_spectrum(Ctx& c) {
    MediumSpec m = medium_from(c);
    TimeGrid lg = TimeGrid::lag(c.count("n"), c.num("dt"));
    double kv = c.num("kvec-sq"), eps = c.num("eps");
    OrderingParam p(c.num("s"));
    VacuumPolarizationLag vp = vacuum_polarization_lag(lg, kv, m);
    StationaryKernel PN = time_normal_vacuum_noise(vp.pi_F, vp.pi_W, m.hbar_c);
    StationaryRotated tn{dressed_retarded_lag(lg, kv, m, eps), StationaryKernel(lg), OrderingParam(1.0), m.hbar_c};
    CVec noise = reorder(tn, p.s).N_s.spectrum();
    CVec pn = PN.spectrum();
    io::Table t{{"omega", "time_normal_pi_N_re", "time_normal_pi_N_im", "noise_re", "noise_im", "two_s_minus_Z"}, {}, {io::grid_comment(lg)}};
    double err = 0.0, sc = 0.0;
    for (std::size_t k = 0; k < lg.n; ++k) {
        auto a = Eigen::Index(k);
        double want = 2.0 * p.s_minus() * zero_point_finite_eps(MomentumPoint(lg.omega(k), kv), m, eps);
        err = std::max(err, std::abs(noise[a] - want));
        sc = std::max(sc, std::abs(want));
        t.rows.push_back({lg.omega(k), pn[a].real(), pn[a].imag(), noise[a].real(), noise[a].imag(), want});
    }
    c.csv("noise_spectrum.csv", t);
    json r{{"residuals", json{{"time_normal_pi_N_relative", PN.lag.values.cwiseAbs().maxCoeff() / vp.pi_F.lag.values.cwiseAbs().maxCoeff()},
                              {"noise_vs_2_s_minus_Z", sc > 0.0 ? err / sc : err}}}};
    if (c.diagnose_gauge) r["gauge"] = gauge_json(MomentumPoint(std::sqrt(8.0 * m.dirac.mu0 * m.dirac.mu0 + kv), kv), m);
    return r;
}

json run_zero_point(Ctx& c) {
    MediumSpec m = medium_from(c);
    double kv = c.num("kvec-sq"), eps = c.num("eps");
    io::Table t{{"k2", "k0", "kvec_sq", "smooth", "finite_eps", "ledger_image", "delta_weight"}, {}, {}};
    double worst = 0.0;
    MomentumPoint first;
    bool have = false;
    for (double k2 : c.list("k2")) {
        if (k2 + kv < 0.0) throw ConfigError("k2 + kvec-sq must be >= 0");
        MomentumPoint k(std::sqrt(k2 + kv), kv);
        if (!have) first = k, have = true;
        SpectralDensity z = zero_point_spectrum(k, m);
        double fe = zero_point_finite_eps(k, m, eps), led = delta_ledger_at_eps(z, eps);
        if (z.smooth != 0.0) worst = std::max(worst, std::abs(fe - led - z.smooth) / std::abs(z.smooth));
        t.rows.push_back({k2, k.k0, kv, z.smooth, fe, led, z.delta_terms.front().weight.real()});
    }
    if (!have) throw ConfigError("zero-point needs --k2");
    c.csv("zero_point.csv", t);
    json r{{"residuals", json{{"smooth_vs_finite_eps", worst}}}};
    if (c.diagnose_gauge) r["gauge"] = gauge_json(first, m);
    return r;
}

json run_mc(Ctx& c) {
    WyldConfig w;
    w.osc = osc_from(c, c.num("omega0"));
    w.state = state_from(c);
    w.p = OrderingParam(c.num("s"));
    w.sigma = c.num("sigma");
    w.grid = TimeGrid(c.count("n"), c.num("dt"), 0.0, TimeOrder::linear);
    w.J_e = Signal(w.grid);
    long kick = c.integer("kick");
    if (kick < 0 || std::size_t(kick) >= w.grid.n) throw ConfigError("kick index outside the grid");
    w.J_e.values[kick] = c.num("amplitude");
    auto n = Eigen::Index(w.grid.n);
    TwoPointKernel R = wyld_response_matrix(w);
    TwoPointKernel piN(w.grid);
    piN.values = CMat::Identity(n, n) * (w.sigma * w.sigma / w.grid.dt);
    TwoPointKernel NM = noise_map(retarded_response_grid(w.osc, w.grid), piN);
    TwoPointKernel K = s_ordered_kernel_grid(w.osc, w.state, w.p, w.grid);
    Eigen::MatrixXd C = (NM.values + K.values).real();
    w.probes = {Eigen::MatrixXd::Identity(n, n), (R.values * R.values.transpose()).real()};
    WyldResult res = wyld_mc(w, c.count("samples"), c.need_seed());
    io::Table t{{"t", "t2", "mc", "se", "exact"}, {}, {io::grid_comment(w.grid)}};
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            t.rows.push_back({w.grid.t(std::size_t(i)), w.grid.t(std::size_t(j)), res.cov.values(i, j).real(), res.cov_se.values(i, j).real(), C(i, j)});
    c.csv("wyld_covariance.csv", t);
    json probes = json::array();
    const char* names[] = {"trace", "noise_map_shape"};
    json z;
    for (std::size_t q = 0; q < 2; ++q) {
        double want = w.probes[q].cwiseProduct(C).sum();
        double zz = (res.probe_mean[q] - want) / res.probe_se[q];
        probes.push_back(json{{"probe", names[q]}, {"mc", res.probe_mean[q]}, {"se", res.probe_se[q]}, {"exact", want}, {"z", zz}});
        z[std::string(names[q]) + "_z"] = zz;
    }
    Eigen::VectorXd h = (R.values * w.J_e.values).real();
    double se = std::sqrt(h.dot(res.cov.values.real() * h) / double(res.n_samples));
    z["mean_response_z"] = se > 0.0 ? h.dot(res.mean.values.real() - h) / se : 0.0;
    return json{{"samples", res.n_samples}, {"probes", probes}, {"residuals", z}};
}

int accept_status = 0;

json run_accept(Ctx& c) {
    AcceptanceOptions opt;
    if (c.has_seed) opt.seed = c.seed;
    opt.mc_samples = c.count("samples");
    opt.timing = !c.flag("no-timing");
    auto res = run_acceptance(opt);
    std::string rep = format_report(res);
    {
        std::ofstream f(c.out / "report.txt", std::ios::binary);
        f << rep;
    }
    c.outputs.push_back("report.txt");
    std::fputs(rep.c_str(), stderr);
    json crit = json::array();
    for (const auto& r : res) {
        json checks = json::array();
        for (const auto& k : r.checks) checks.push_back(json{{"label", k.label}, {"value", k.value}, {"limit", k.limit}, {"pass", k.pass}});
        crit.push_back(json{{"id", r.id}, {"name", r.name}, {"pass", r.pass()}, {"checks", checks}, {"error", r.error}});
    }
    accept_status = all_pass(res) ? 0 : 1;
    return json{{"seed", opt.seed}, {"all_pass", accept_status == 0}, {"criteria", crit}, {"residuals", json::object()}};
}

// ---- parameter tables

PSpec N(const char* n, double d, const char* h = "") { return {n, PType::num, d, h}; }
PSpec Int(const char* n, long d, const char* h = "") { return {n, PType::integer, d, h}; }
PSpec Flag(const char* n, const char* h = "") { return {n, PType::flag, false, h}; }
PSpec Text(const char* n, const char* d, const char* h = "") { return {n, PType::text, d, h}; }
PSpec List(const char* n, std::vector<double> d, const char* h = "") { return {n, PType::numlist, d, h}; }

std::vector<PSpec> state_params() { return {N("hbar", 1.0), N("nbar", 0.0, "mean occupation"), N("m-re", 0.0), N("m-im", 0.0), N("s", 0.0, "ordering parameter")}; }

std::vector<PSpec> join(std::vector<PSpec> a, const std::vector<PSpec>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

std::vector<PSpec> dirac_params() { return {N("mu0", 1.0), N("alpha", 7.2973525693e-3), N("R0", 0.0, "vacuum-polarization constant")}; }

std::vector<Verb> verbs() {
    std::vector<Verb> v;
    v.push_back({"project",
                 {Int("n", 64), N("dt", 0.1), Text("signal", "cos", "random|cos|exp"), N("cycles", 3.0), N("s", 1.0), Text("sign", "+", "+|-")},
                 false, false, run_project});
    v.push_back({"oscillator kernel", join({N("omega0", 1.0), Int("n", 32), N("dt", 0.1)}, state_params()), false, false, run_osc_kernel});
    v.push_back({"oscillator lambda-check", join({N("cycles", 3.0), Int("n", 64), N("dt", 0.1), Int("draws", 20)}, state_params()), true, false,
                 run_osc_lambda});
    v.push_back({"oscillator mc", join({N("omega0", 1.0), Int("n", 16), N("dt", 0.3), Int("samples", 100000)}, state_params()), true, false,
                 run_osc_mc});
    for (auto [name, fn] : {std::pair<const char*, json (*)(Ctx&)>{"rotate", run_rotate}, {"unrotate", run_unrotate}})
        v.push_back({name, join({N("cycles", 3.0), Int("n", 64), N("dt", 0.1)}, state_params()), false, false, fn});
    v.push_back({"reorder", join({N("cycles", 3.0), Int("n", 64), N("dt", 0.1), N("s-new", 1.0)}, state_params()), false, false, run_reorder});
    v.push_back({"kernels scalar", {N("mu-sq", 1.0), N("eps", 1e-6), N("kvec-sq", 0.5), N("k0-max", 5.0), Int("n-half", 50)}, false, false,
                 run_kernels_scalar});
    v.push_back({"kernels photon", {N("mu-vac", 1.0), N("eps", 1e-6), N("kvec-sq", 0.5), N("k0-max", 5.0), Int("n-half", 50)}, false, false,
                 run_kernels_photon});
    v.push_back({"vacuum-pol",
                 {N("mu0", 1.0), N("alpha", 7.2973525693e-3), Text("kind", "R", "R|F|plus"), Flag("renormalized", "R0 = 0"), Int("M", 0),
                  N("geometric", 1e3), Flag("impose-b0"), List("k2", {}), List("k0", {}), N("kvec-sq", 0.0), N("finite-eps", 0.0)},
                 false, false, run_vacuum_pol});
    v.push_back({"pv-solve",
                 {Int("M", 0), N("geometric", 1e3), Int("N", 0, "0: minimal"), Flag("impose-b0"), N("mu0", 1.0), List("masses", {}),
                  N("alpha", 7.2973525693e-3)},
                 false, false, run_pv_solve});
    v.push_back({"dress",
                 join({Text("model", "toy", "toy|momentum"), N("omega0", 1.0), N("pi0", 0.3), N("dt", 0.01), N("T", 10.0), List("k0", {}),
                       N("kvec-sq", 0.0), N("finite-eps", 0.0)},
                      dirac_params()),
                 false, true, run_dress});
    v.push_back({"noise-spectrum", join({Int("n", 65), N("dt", 0.2), N("kvec-sq", 0.5), N("s", 0.0), N("eps", 1e-3)}, dirac_params()), false, true,
                 run_noise_spectrum});
    v.push_back({"zero-point", join({List("k2", {8.0, 20.0, 50.0}), N("kvec-sq", 1.0), N("eps", 1e-4)}, dirac_params()), false, true,
                 run_zero_point});
    v.push_back({"mc",
                 join({N("omega0", 1.0), N("sigma", 0.7), Int("n", 8), N("dt", 0.4), Int("kick", 1), N("amplitude", 1.0), Int("samples", 100000)},
                      state_params()),
                 true, false, run_mc});
    v.push_back({"accept", {Int("samples", 1000000), Flag("no-timing")}, false, false, run_accept});
    return v;
}

int fail(int code, const std::string& kind, const std::string& msg, const fs::path& out = {}) {
    json e = io::error_json(kind, msg);
    std::string s = io::dump(e);
    std::fputs(s.c_str(), stdout);
    if (!out.empty()) {
        std::error_code ec;
        fs::create_directories(out, ec);
        if (!ec) {
            std::ofstream f(out / "error.json", std::ios::binary);
            f << s;
        }
    }
    return code;
}

struct Bound {
    const Verb* verb;
    CLI::App* app;
    std::map<std::string, std::vector<std::string>> raw;
    std::map<std::string, bool> flags;
};

}  // namespace

int main(int argc, char** argv) {
    std::vector<Verb> table = verbs();
    CLI::App app{"keldysh: closed-time-loop response and noise toolkit"};
    app.require_subcommand(1);
    std::string config_path, out_dir;
    std::uint64_t seed = 0;
    bool diagnose = false;

    std::map<std::string, CLI::App*> groups;
    std::vector<Bound> bound;
    bound.reserve(table.size());
    for (const auto& v : table) {
        auto sp = v.name.find(' ');
        CLI::App* parent = &app;
        std::string leaf = v.name;
        if (sp != std::string::npos) {
            std::string g = v.name.substr(0, sp);
            leaf = v.name.substr(sp + 1);
            if (!groups.count(g)) {
                groups[g] = app.add_subcommand(g, g + " operations");
                groups[g]->require_subcommand(1);
            }
            parent = groups[g];
        }
        CLI::App* sub = parent->add_subcommand(leaf, v.name);
        bound.push_back({&v, sub, {}, {}});
        Bound& b = bound.back();
        sub->add_option("--config", config_path, "JSON run configuration");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seed", seed, "64-bit seed");
        if (v.medium) sub->add_flag("--diagnose-gauge", diagnose, "report the gauge obstruction of the zero-point spectrum");
        for (const auto& p : v.params) {
            if (p.type == PType::flag) {
                sub->add_flag("--" + p.name, b.flags[p.name], p.help);
            } else {
                CLI::Option* o = sub->add_option("--" + p.name, b.raw[p.name], p.help)->allow_extra_args(false);
                if (p.type == PType::numlist)
                    o->delimiter(',')->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
                else
                    o->expected(1);
                static const char* tn[] = {"FLOAT", "INT", "", "TEXT", "FLOAT,..."};
                o->type_name(tn[int(p.type)]);
            }
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail(2, "usage", e.what());
    }

    Bound* chosen = nullptr;
    for (auto& b : bound)
        if (b.app->parsed()) chosen = &b;
    if (!chosen) return fail(2, "usage", "no verb given");
    const Verb& verb = *chosen->verb;

    Ctx ctx;
    ctx.verb = &verb;
    ctx.diagnose_gauge = diagnose;
    std::string precision = "extended";
    fs::path out;
    try {
        for (const auto& p : verb.params) ctx.params[p.name] = p.def;
        if (!config_path.empty()) {
            std::ifstream f(config_path);
            if (!f) throw ConfigError("cannot read config " + config_path);
            json cfg;
            try {
                cfg = json::parse(f);
            } catch (const std::exception& e) {
                throw ConfigError(std::string("malformed config: ") + e.what());
            }
            if (!cfg.is_object()) throw ConfigError("config must be a JSON object");
            for (auto it = cfg.begin(); it != cfg.end(); ++it) {
                const std::string& k = it.key();
                if (k == "command") {
                    if (!it->is_string() || it->get<std::string>() != verb.name)
                        throw ConfigError("config command does not match verb '" + verb.name + "'");
                } else if (k == "params") {
                    if (!it->is_object()) throw ConfigError("params must be an object");
                    for (auto pt = it->begin(); pt != it->end(); ++pt) {
                        auto spec = std::find_if(verb.params.begin(), verb.params.end(), [&](const PSpec& s) { return s.name == pt.key(); });
                        if (spec == verb.params.end()) throw ConfigError("unknown parameter '" + pt.key() + "' for verb '" + verb.name + "'");
                        ctx.params[pt.key()] = coerce(*spec, *pt);
                    }
                } else if (k == "output_path") {
                    if (!it->is_string()) throw ConfigError("output_path must be a string");
                    out = it->get<std::string>();
                } else if (k == "seed") {
                    if (!it->is_number_unsigned()) throw ConfigError("seed must be a non-negative integer");
                    ctx.seed = it->get<std::uint64_t>();
                    ctx.has_seed = true;
                } else if (k == "precision") {
                    if (!it->is_string() || (*it != "double" && *it != "extended")) throw ConfigError("precision must be double or extended");
                    precision = it->get<std::string>();
                } else {
                    throw ConfigError("unknown config key '" + k + "'");
                }
            }
        }
        for (const auto& p : verb.params) {
            if (p.type == PType::flag) {
                if (chosen->flags[p.name]) ctx.params[p.name] = true;
            } else if (!chosen->raw[p.name].empty()) {
                ctx.params[p.name] = coerce_text(p, chosen->raw[p.name]);
            }
        }
        if (chosen->app->count("--seed")) {
            ctx.seed = seed;
            ctx.has_seed = true;
        }
        if (!out_dir.empty()) out = out_dir;
        if (out.empty()) out = "keldysh_out";
        if (verb.stochastic && !ctx.has_seed) throw ConfigError("verb '" + verb.name + "' is stochastic and needs --seed");
        if (precision == "double" && (verb.name == "pv-solve" || (verb.name == "vacuum-pol" && !ctx.params["renormalized"].get<bool>())))
            throw ConfigError("the mass-coefficient solve runs in extended precision only");
        ctx.backend = io::precision_from_env();
    } catch (const ConfigError& e) {
        return fail(2, "config", e.what());
    } catch (const Error& e) {
        return fail(2, e.code(), e.what());
    }

    ctx.out = out;
    json config{{"command", verb.name}, {"params", ctx.params}, {"precision", precision}, {"precision_backend", io::precision_name(ctx.backend)}};
    if (ctx.has_seed) config["seed"] = ctx.seed;
    if (verb.medium) config["diagnose_gauge"] = ctx.diagnose_gauge;

    json result;
    try {
        std::error_code ec;
        fs::create_directories(out, ec);
        if (ec) throw Error("io_error", "cannot create output directory " + out.string());
        result = verb.run(ctx);
        result["config_hash"] = io::config_hash(config);
        io::write_json((out / "result.json").string(), result);
        ctx.outputs.push_back("result.json");
        json achieved = result.contains("residuals") ? result["residuals"] : json::object();
        io::write_json((out / "manifest.json").string(), io::manifest(verb.name, config, ctx.outputs, achieved));
    } catch (const ConfigError& e) {
        return fail(2, "config", e.what(), out);
    } catch (const Error& e) {
        return fail(1, e.code(), e.what(), out);
    } catch (const std::exception& e) {
        return fail(1, "internal", e.what(), out);
    }
    std::fputs(io::dump(result).c_str(), stdout);
    return accept_status;
}
