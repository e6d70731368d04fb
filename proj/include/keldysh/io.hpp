#pragma once

#include "keldysh/pvreg.hpp"
#include "keldysh/stationary.hpp"

#include "json.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace keldysh::io {

using json = nlohmann::ordered_json;

// 17 significant digits, scientific
std::string num(double x);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    std::vector<std::string> comments;  // written as leading '# ' lines
};

void write_csv(std::ostream& os, const Table& t);
void write_csv(const std::string& path, const Table& t);

std::string grid_comment(const TimeGrid& g);
Table signal_table(const Signal& s, const char* time_name = "t");
Table kernel_table(const TwoPointKernel& K);

json grid_json(const TimeGrid& g);
json complex_json(cd z);
json scheme_json(const PVScheme& s);

// FNV-1a 64 over the compact dump of the config, as 16 hex digits
std::uint64_t fnv1a64(const std::string& bytes);
std::string config_hash(const json& config);

json versions();
json manifest(const std::string& verb, const json& config, const std::vector<std::string>& outputs, const json& achieved);
json error_json(const std::string& code, const std::string& message);

// KELDYSH_PRECISION = bits128 | bits256 | bits512; unset means bits256
Precision precision_from_env();
const char* precision_name(Precision p);

void write_json(const std::string& path, const json& j);
// dump with 17-digit numbers, stable key order
std::string dump(const json& j);

}  // namespace keldysh::io
