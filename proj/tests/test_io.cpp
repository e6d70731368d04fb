#include "doctest.h"

#include "keldysh/io.hpp"

#include <cstdlib>
#include <sstream>

using namespace keldysh;
namespace kio = keldysh::io;

TEST_CASE("FNV-1a reference values") {
    CHECK(kio::fnv1a64("") == 0xcbf29ce484222325ull);
    CHECK(kio::fnv1a64("a") == 0xaf63dc4c8601ec8cull);
    CHECK(kio::fnv1a64("foobar") == 0x85944171f73967e8ull);
}

TEST_CASE("config hash ignores key order") {
    kio::json a = {{"command", "pv-solve"}, {"params", {{"M", 0}, {"geometric", 1000.0}}}, {"seed", 3}};
    kio::json b = {{"seed", 3}, {"params", {{"geometric", 1000.0}, {"M", 0}}}, {"command", "pv-solve"}};
    CHECK(kio::config_hash(a) == kio::config_hash(b));
    CHECK(kio::config_hash(a).size() == 16);
    b["seed"] = 4;
    CHECK(kio::config_hash(a) != kio::config_hash(b));
}

TEST_CASE("numbers round trip with 17 digits") {
    for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 1.0000000000000002}) CHECK(std::stod(kio::num(x)) == x);
    CHECK(kio::num(std::nan("")) == "nan");
    CHECK(kio::dump(kio::json{{"x", 1.0 / 3.0}, {"y", std::numeric_limits<double>::infinity()}}) ==
          "{\n  \"x\": 3.3333333333333331e-01,\n  \"y\": null\n}\n");
}

TEST_CASE("csv layout") {
    kio::Table t{{"a", "b"}, {{1.0, -0.5}}, {"note"}};
    std::ostringstream os;
    kio::write_csv(os, t);
    CHECK(os.str() == "# note\na,b\n1.0000000000000000e+00,-5.0000000000000000e-01\n");
    Signal s(TimeGrid(2, 0.5));
    s.values[1] = cd(1.0, 2.0);
    kio::Table st = kio::signal_table(s);
    CHECK(st.rows.size() == 2);
    CHECK(st.rows[1] == std::vector<double>{0.5, 1.0, 2.0});
}

TEST_CASE("error payload and manifest") {
    kio::json e = kio::error_json("config", "bad");
    CHECK(e["error"]["code"] == "config");
    CHECK(e["error"]["message"] == "bad");
    kio::json cfg = {{"command", "x"}};
    kio::json m = kio::manifest("x", cfg, {"out.csv"}, kio::json::object());
    CHECK(m["config_hash"] == kio::config_hash(cfg));
    CHECK(m["versions"].contains("fftw"));
}

TEST_CASE("precision from the environment") {
    ::unsetenv("KELDYSH_PRECISION");
    CHECK(kio::precision_from_env() == Precision::bits256);
    ::setenv("KELDYSH_PRECISION", "bits512", 1);
    CHECK(kio::precision_from_env() == Precision::bits512);
    ::setenv("KELDYSH_PRECISION", "quad", 1);
    CHECK_THROWS_AS(kio::precision_from_env(), Error);
    ::unsetenv("KELDYSH_PRECISION");
}
