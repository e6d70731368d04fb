#include "keldysh/io.hpp"

#include <boost/version.hpp>
#include <fftw3.h>
#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace keldysh::io {

std::string num(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", x);
    return buf;
}

void write_csv(std::ostream& os, const Table& t) {
    for (const auto& c : t.comments) os << "# " << c << '\n';
    for (std::size_t i = 0; i < t.header.size(); ++i) os << (i ? "," : "") << t.header[i];
    os << '\n';
    for (const auto& r : t.rows) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << num(r[i]);
        os << '\n';
    }
}

void write_csv(const std::string& path, const Table& t) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("io_error", "cannot open " + path + " for writing");
    write_csv(f, t);
    if (!f) throw Error("io_error", "write failed: " + path);
}

std::string grid_comment(const TimeGrid& g) {
    std::ostringstream os;
    os << "grid n=" << g.n << " dt=" << num(g.dt) << " t0=" << num(g.t0) << " order=" << (g.order == TimeOrder::linear ? "linear" : "cyclic");
    return os.str();
}

Table signal_table(const Signal& s, const char* time_name) {
    Table t{{time_name, "re", "im"}, {}, {grid_comment(s.grid)}};
    for (std::size_t j = 0; j < s.grid.n; ++j) {
        cd v = s.values[Eigen::Index(j)];
        t.rows.push_back({s.grid.t(j), v.real(), v.imag()});
    }
    return t;
}

Table kernel_table(const TwoPointKernel& K) {
    Table t{{"t", "t2", "re", "im"}, {}, {grid_comment(K.grid)}};
    for (std::size_t i = 0; i < K.grid.n; ++i)
        for (std::size_t j = 0; j < K.grid.n; ++j) {
            cd v = K.values(Eigen::Index(i), Eigen::Index(j));
            t.rows.push_back({K.grid.t(i), K.grid.t(j), v.real(), v.imag()});
        }
    return t;
}

json grid_json(const TimeGrid& g) {
    return json{{"n", g.n}, {"dt", g.dt}, {"t0", g.t0}, {"order", g.order == TimeOrder::linear ? "linear" : "cyclic"}};
}

json complex_json(cd z) { return json::array({z.real(), z.imag()}); }

json scheme_json(const PVScheme& s) {
    json j;
    j["M"] = s.M;
    j["impose_B0"] = s.impose_B0;
    j["masses"] = s.masses;
    j["d"] = s.d;
    j["rows"] = json::array();
    for (std::size_t i = 0; i < s.row_labels.size(); ++i)
        j["rows"].push_back(json{{"label", s.row_labels[i]}, {"residual", i < s.row_residuals.size() ? s.row_residuals[i] : 0.0}});
    j["warnings"] = s.warnings;
    return j;
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string config_hash(const json& config) {
    // sorted keys
    nlohmann::json canon = nlohmann::json::parse(config.dump());
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(canon.dump())));
    return buf;
}

json versions() {
    json v;
    v["keldysh"] = "0.1.0";
    v["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." + std::to_string(EIGEN_MINOR_VERSION);
    v["boost"] = std::to_string(BOOST_VERSION / 100000) + "." + std::to_string(BOOST_VERSION / 100 % 1000) + "." + std::to_string(BOOST_VERSION % 100);
    v["fftw"] = std::string(fftw_version);
    v["mpfr"] = std::string(mpfr_get_version());
    return v;
}

json manifest(const std::string& verb, const json& config, const std::vector<std::string>& outputs, const json& achieved) {
    json m;
    m["verb"] = verb;
    m["config_hash"] = config_hash(config);
    m["config"] = config;
    m["outputs"] = outputs;
    m["precision"] = precision_name(precision_from_env());
    m["achieved"] = achieved;
    m["versions"] = versions();
    return m;
}

json error_json(const std::string& code, const std::string& message) { return json{{"error", json{{"code", code}, {"message", message}}}}; }

Precision precision_from_env() {
    const char* e = std::getenv("KELDYSH_PRECISION");
    if (!e || !*e) return Precision::bits256;
    std::string s(e);
    if (s == "bits128") return Precision::bits128;
    if (s == "bits256") return Precision::bits256;
    if (s == "bits512") return Precision::bits512;
    throw Error("config", "KELDYSH_PRECISION must be bits128, bits256 or bits512, got '" + s + "'");
}

const char* precision_name(Precision p) {
    switch (p) {
        case Precision::bits128: return "bits128";
        case Precision::bits256: return "bits256";
        case Precision::bits512: return "bits512";
    }
    return "?";
}

namespace {

void dump_rec(std::ostream& os, const json& j, int indent) {
    std::string pad(std::size_t(indent + 2), ' '), close(std::size_t(indent), ' ');
    switch (j.type()) {
        case json::value_t::object: {
            if (j.empty()) {
                os << "{}";
                return;
            }
            os << "{\n";
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) os << ",\n";
                first = false;
                os << pad << json(it.key()).dump() << ": ";
                dump_rec(os, it.value(), indent + 2);
            }
            os << '\n' << close << '}';
            return;
        }
        case json::value_t::array: {
            if (j.empty()) {
                os << "[]";
                return;
            }
            bool flat = std::all_of(j.begin(), j.end(), [](const json& e) { return e.is_primitive(); });
            if (flat) {
                os << '[';
                for (std::size_t i = 0; i < j.size(); ++i) {
                    if (i) os << ", ";
                    dump_rec(os, j[i], indent);
                }
                os << ']';
                return;
            }
            os << "[\n";
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) os << ",\n";
                os << pad;
                dump_rec(os, j[i], indent + 2);
            }
            os << '\n' << close << ']';
            return;
        }
        case json::value_t::number_float: {
            double x = j.get<double>();
            // JSON has no inf/nan
            if (std::isfinite(x))
                os << num(x);
            else
                os << "null";
            return;
        }
        default:
            os << j.dump();
    }
}

}  // namespace

std::string dump(const json& j) {
    std::ostringstream os;
    dump_rec(os, j, 0);
    os << '\n';
    return os.str();
}

void write_json(const std::string& path, const json& j) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("io_error", "cannot open " + path + " for writing");
    f << dump(j);
    if (!f) throw Error("io_error", "write failed: " + path);
}

}  // namespace keldysh::io
