#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "lna/cli.hpp"
#include "lna/error.hpp"
#include "lna/io.hpp"

namespace lna::cli {

namespace {

std::string at_line(int line) { return "config line " + std::to_string(line) + ": "; }

double to_number(const io::KeyValue& kv) {
    char* end = nullptr;
    const double v = std::strtod(kv.value.c_str(), &end);
    if (kv.value.empty() || *end != '\0' || !std::isfinite(v))
        throw Error(ErrorKind::Parse, at_line(kv.line) + "'" + kv.key + "' expects a number, got '" + kv.value + "'");
    return v;
}

double positive(const io::KeyValue& kv) {
    const double v = to_number(kv);
    if (!(v > 0.0)) throw Error(ErrorKind::Parse, at_line(kv.line) + "'" + kv.key + "' must be positive");
    return v;
}

int count(const io::KeyValue& kv) {
    const double v = to_number(kv);
    if (v < 0.0 || v != std::floor(v) || v > 1e7)
        throw Error(ErrorKind::Parse, at_line(kv.line) + "'" + kv.key + "' expects a non-negative integer");
    return static_cast<int>(v);
}

bool boolean(const io::KeyValue& kv) {
    if (kv.value == "true" || kv.value == "1" || kv.value == "yes") return true;
    if (kv.value == "false" || kv.value == "0" || kv.value == "no") return false;
    throw Error(ErrorKind::Parse, at_line(kv.line) + "'" + kv.key + "' expects true or false");
}

using Setter = std::function<void(RunConfig&, const io::KeyValue&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> m = [] {
        std::map<std::string, Setter> s;
        s["hbt.emitter_area"] = [](RunConfig& c, const io::KeyValue& kv) { c.devices.hbt.emitter_area = positive(kv); };
        s["hbt.beta0"] = [](RunConfig& c, const io::KeyValue& kv) { c.devices.hbt.beta0 = positive(kv); };
        s["hbt.r_b"] = [](RunConfig& c, const io::KeyValue& kv) { c.devices.hbt.r_b = positive(kv); };
        s["hbt.r_e"] = [](RunConfig& c, const io::KeyValue& kv) { c.devices.hbt.r_e = positive(kv); };
        s["hbt.c_mu"] = [](RunConfig& c, const io::KeyValue& kv) { c.devices.hbt.c_mu = positive(kv); };
        s["hbt.c_cs"] = [](RunConfig& c, const io::KeyValue& kv) { c.devices.hbt.c_cs = positive(kv); };
        s["hbt.f_t_peak"] = [](RunConfig& c, const io::KeyValue& kv) { c.devices.hbt.f_t_peak = positive(kv); };
        s["hbt.j_peak"] = [](RunConfig& c, const io::KeyValue& kv) { c.devices.hbt.j_peak = positive(kv); };
        s["hbt.kirk_sharpness"] = [](RunConfig& c, const io::KeyValue& kv) {
            c.devices.hbt.kirk_sharpness = positive(kv);
        };
        s["hbt.v_t"] = [](RunConfig& c, const io::KeyValue& kv) { c.devices.hbt.v_t = positive(kv); };
        s["hbt.temperature"] = [](RunConfig& c, const io::KeyValue& kv) { c.devices.hbt.temperature = positive(kv); };
        s["bias.j"] = [](RunConfig& c, const io::KeyValue& kv) {
            if (kv.value == "auto") {
                c.bias_auto = true;
                return;
            }
            c.devices.j = positive(kv);
            c.bias_auto = false;
        };
        s["inductor.q_low"] = [](RunConfig& c, const io::KeyValue& kv) { c.devices.passives.inductor.q_low = positive(kv); };
        s["inductor.l_low"] = [](RunConfig& c, const io::KeyValue& kv) {
            c.devices.passives.inductor.l_low = io::parse_quantity(kv.value);
        };
        s["inductor.q_high"] = [](RunConfig& c, const io::KeyValue& kv) {
            c.devices.passives.inductor.q_high = positive(kv);
        };
        s["inductor.l_high"] = [](RunConfig& c, const io::KeyValue& kv) {
            c.devices.passives.inductor.l_high = io::parse_quantity(kv.value);
        };
        s["capacitor.q_at_f0"] = [](RunConfig& c, const io::KeyValue& kv) {
            c.devices.passives.capacitor.q_at_f0 = positive(kv);
        };
        s["capacitor.f0"] = [](RunConfig& c, const io::KeyValue& kv) { c.devices.passives.capacitor.f0 = positive(kv); };
        s["capacitor.exponent"] = [](RunConfig& c, const io::KeyValue& kv) {
            c.devices.passives.capacitor.exponent = to_number(kv);
        };
        s["passives.lossless"] = [](RunConfig& c, const io::KeyValue& kv) { c.devices.passives.lossless = boolean(kv); };
        s["passives.temperature_k"] = [](RunConfig& c, const io::KeyValue& kv) {
            c.devices.passives.temperature = positive(kv);
        };
        s["design.f0"] = [](RunConfig& c, const io::KeyValue& kv) { c.spec.f0 = positive(kv); };
        s["design.z_source"] = [](RunConfig& c, const io::KeyValue& kv) { c.spec.z_source = parse_impedance(kv.value); };
        s["design.z_load"] = [](RunConfig& c, const io::KeyValue& kv) { c.spec.z_load = parse_impedance(kv.value); };
        s["design.match_tolerance_db"] = [](RunConfig& c, const io::KeyValue& kv) {
            c.spec.match_tolerance_db = to_number(kv);
        };
        s["design.seed"] = [](RunConfig& c, const io::KeyValue& kv) { c.spec.seed = static_cast<std::uint64_t>(count(kv)); };
        s["design.area_trim"] = [](RunConfig& c, const io::KeyValue& kv) { c.spec.area_trim = positive(kv); };
        s["grid.start_hz"] = [](RunConfig& c, const io::KeyValue& kv) { c.grid_start = positive(kv); };
        s["grid.stop_hz"] = [](RunConfig& c, const io::KeyValue& kv) { c.grid_stop = positive(kv); };
        s["grid.points"] = [](RunConfig& c, const io::KeyValue& kv) { c.grid_points = count(kv); };
        s["sweep.j_start"] = [](RunConfig& c, const io::KeyValue& kv) { c.sweep_j_start = positive(kv); };
        s["sweep.j_stop"] = [](RunConfig& c, const io::KeyValue& kv) { c.sweep_j_stop = positive(kv); };
        s["sweep.j_points"] = [](RunConfig& c, const io::KeyValue& kv) { c.sweep_j_points = count(kv); };
        s["output.dir"] = [](RunConfig& c, const io::KeyValue& kv) { c.output_dir = kv.value; };

        const std::pair<const char*, int> bounds[] = {{"c1", 0}, {"le", 1}, {"l1", 1}, {"c2", 2}, {"lb", 3},
                                                      {"l2", 3}, {"lc", 4}, {"cc", 5}, {"co", 6}};
        for (const auto& [name, field] : bounds) {
            const int f = field;
            s[std::string("design.bounds.") + name] = [f](RunConfig& c, const io::KeyValue& kv) {
                const auto comma = kv.value.find(',');
                if (comma == std::string::npos)
                    throw Error(ErrorKind::Parse, at_line(kv.line) + "'" + kv.key + "' expects 'min, max'");
                c.spec.bounds[f] = {io::parse_quantity(kv.value.substr(0, comma)),
                                    io::parse_quantity(kv.value.substr(comma + 1))};
            };
        }
        return s;
    }();
    return m;
}

}  // namespace

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Parse:
        case ErrorKind::Io:
        case ErrorKind::InvalidArgument:
        case ErrorKind::InvalidTopologyTag:
        case ErrorKind::GridTooLarge: return kConfigError;
        case ErrorKind::Infeasible: return kInfeasible;
        default: return kNumericError;
    }
}

cplx parse_impedance(const std::string& text) {
    std::string t;
    for (char ch : text)
        if (ch != ' ' && ch != '\t') t += ch;
    const char* p = t.c_str();
    char* end = nullptr;
    const double a = std::strtod(p, &end);
    if (end == p) throw Error(ErrorKind::Parse, "bad impedance '" + text + "'");
    if (*end == '\0') return {a, 0.0};
    if (*end == 'j' && end[1] == '\0') return {0.0, a};
    const char* q = end;
    const double b = std::strtod(q, &end);
    if (end == q || (*q != '+' && *q != '-') || *end != 'j' || end[1] != '\0')
        throw Error(ErrorKind::Parse, "bad impedance '" + text + "'");
    return {a, b};
}

net::FrequencyGrid RunConfig::grid() const {
    if (grid_points <= 0) throw Error(ErrorKind::InvalidArgument, "frequency grid empty");
    if (grid_points == 1) return net::FrequencyGrid({grid_start});
    return net::FrequencyGrid::linear(grid_start, grid_stop, static_cast<std::size_t>(grid_points));
}

std::vector<double> RunConfig::j_grid() const {
    if (sweep_j_points <= 0) throw Error(ErrorKind::InvalidArgument, "current-density grid empty");
    if (sweep_j_points == 1) return {sweep_j_start};
    std::vector<double> g;
    for (int i = 0; i < sweep_j_points; ++i)
        g.push_back(sweep_j_start + (sweep_j_stop - sweep_j_start) * i / (sweep_j_points - 1));
    return g;
}

RunConfig parse_config(std::istream& is) {
    RunConfig cfg;
    const auto kvs = io::parse_key_values(is);
    const auto& table = setters();
    for (const auto& kv : kvs) {
        const auto it = table.find(kv.key);
        if (it == table.end()) throw Error(ErrorKind::Parse, at_line(kv.line) + "unknown key '" + kv.key + "'");
        try {
            it->second(cfg, kv);
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::Parse && e.detail().rfind("config line", 0) == 0) throw;
            throw Error(ErrorKind::Parse, at_line(kv.line) + e.detail());
        }
    }
    try {
        cfg.devices.hbt.validate();
        cfg.devices.passives.inductor.validate();
        cfg.devices.passives.capacitor.validate();
        cfg.spec.validate();
    } catch (const Error& e) {
        throw Error(ErrorKind::Parse, "config: " + e.detail());
    }
    if (cfg.grid_points > 1 && !(cfg.grid_stop > cfg.grid_start))
        throw Error(ErrorKind::Parse, "config: grid.stop_hz must exceed grid.start_hz");
    if (cfg.sweep_j_points > 1 && !(cfg.sweep_j_stop > cfg.sweep_j_start))
        throw Error(ErrorKind::Parse, "config: sweep.j_stop must exceed sweep.j_start");
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::istringstream is(io::read_file(path));
    return parse_config(is);
}

void resolve_bias(RunConfig& cfg) {
    if (!cfg.bias_auto) return;
    const auto curve = dev::sweep_tnmin_vs_j(cfg.devices.hbt, cfg.j_grid(), cfg.spec.f0);
    cfg.devices.j = curve[dev::argmin_tnmin(curve)].j;
    cfg.bias_auto = false;
}

}  // namespace lna::cli
