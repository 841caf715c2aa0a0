#include "lna/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <utility>

#include "lna/error.hpp"

namespace lna::io {

void atomic_write(const std::string& path, const std::string& contents) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw Error(ErrorKind::Io, "cannot open " + tmp + " for writing");
        os << contents;
        if (!os) throw Error(ErrorKind::Io, "write failed for " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw Error(ErrorKind::Io, "rename " + tmp + " -> " + path + ": " + ec.message());
}

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error(ErrorKind::Io, "cannot open " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

std::string fmt_double(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (std::isnan(x)) return "nan";
    char buf[32];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, x);
        if (std::strtod(buf, nullptr) == x) break;
    }
    return buf;
}

std::string fmt_fixed(double x, int decimals) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, x);
    std::string s = buf;
    if (s == "-0" || s.rfind("-0.", 0) == 0) {
        // avoid printing "-0.00"
        bool all_zero = true;
        for (char c : s.substr(1))
            if (c != '0' && c != '.') all_zero = false;
        if (all_zero) s.erase(0, 1);
    }
    return s;
}

std::string fmt_sig(double x, int digits) {
    if (!std::isfinite(x)) return fmt_double(x);
    if (x == 0.0) return "0";
    int e = static_cast<int>(std::floor(std::log10(std::abs(x))));
    const double unit = std::pow(10.0, e - digits + 1);
    const double r = std::round(x / unit) * unit;
    e = static_cast<int>(std::floor(std::log10(std::abs(r))));  // 999.6 -> 1000
    return fmt_fixed(r, std::max(0, digits - 1 - e));
}

std::string fmt_component(double value, bool inductor) {
    return inductor ? fmt_sig(value * 1e12, 3) + " pH" : fmt_sig(value * 1e15, 3) + " fF";
}

double parse_quantity(const std::string& text) {
    const char* begin = text.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) throw Error(ErrorKind::Parse, "expected a number, got '" + text + "'");
    std::string unit(end);
    unit.erase(0, unit.find_first_not_of(" \t"));
    unit.erase(unit.find_last_not_of(" \t") + 1);
    if (unit.empty()) return v;
    static const std::pair<const char*, double> units[] = {
        {"fF", 1e-15}, {"pF", 1e-12}, {"nF", 1e-9}, {"uF", 1e-6}, {"F", 1.0},
        {"pH", 1e-12}, {"nH", 1e-9},  {"uH", 1e-6}, {"H", 1.0}};
    for (const auto& [name, scale] : units)
        if (unit == name) return v * scale;
    throw Error(ErrorKind::Parse, "unknown unit '" + unit + "'");
}

namespace {
std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}
}  // namespace

std::vector<KeyValue> parse_key_values(std::istream& is) {
    std::vector<KeyValue> out;
    std::string raw;
    int lineno = 0;
    while (std::getline(is, raw)) {
        ++lineno;
        const std::string line = trim(raw.substr(0, raw.find('#')));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorKind::Parse, "line " + std::to_string(lineno) + ": expected 'key = value'");
        KeyValue kv{trim(line.substr(0, eq)), trim(line.substr(eq + 1)), lineno};
        if (kv.key.empty()) throw Error(ErrorKind::Parse, "line " + std::to_string(lineno) + ": empty key");
        for (const auto& prev : out)
            if (prev.key == kv.key)
                throw Error(ErrorKind::Parse, "line " + std::to_string(lineno) + ": duplicate key '" + kv.key +
                                                  "' (first set on line " + std::to_string(prev.line) + ")");
        out.push_back(std::move(kv));
    }
    return out;
}

}  // namespace lna::io
