#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lna::io {

// Writes to "<path>.tmp" then renames over `path`.
void atomic_write(const std::string& path, const std::string& contents);

std::string read_file(const std::string& path);

// Shortest round-trippable decimal form of x.
std::string fmt_double(double x);

// Fixed-point with `decimals` digits.
std::string fmt_fixed(double x, int decimals);

// `digits` significant digits in plain notation: 113, 16.0, 0.500, 1000.
std::string fmt_sig(double x, int digits);

// Capacitance in fF or inductance in pH, three significant digits.
std::string fmt_component(double value, bool inductor);

// Number with an optional unit suffix (fF, pF, nF, uF, F, pH, nH, uH, H).
// Throws Parse on anything else.
double parse_quantity(const std::string& text);

struct KeyValue {
    std::string key;
    std::string value;
    int line;
};

// Flat "key = value" lines; '#' starts a comment, blank lines are skipped.
// Throws Parse naming the line for a missing '=', an empty key or a repeat.
std::vector<KeyValue> parse_key_values(std::istream& is);

}  // namespace lna::io
