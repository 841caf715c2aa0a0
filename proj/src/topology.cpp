#include "lna/topology.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "lna/error.hpp"
#include "lna/io.hpp"
#include "lna/parallel.hpp"

namespace lna::topo {

using noise::NoisyTwoPort;
using net::Placement;
using io::fmt_double;

std::string to_string(Topology t) { return t == Topology::A ? "A" : "B"; }

Topology topology_from_string(const std::string& s) {
    if (s == "A" || s == "a") return Topology::A;
    if (s == "B" || s == "b") return Topology::B;
    throw Error(ErrorKind::InvalidTopologyTag, "unknown topology '" + s + "' (expected A or B)");
}

namespace {
constexpr const char* kKeys[kSizingFields] = {"c1", "le_or_l1", "c2", "lb_or_l2", "lc", "cc", "co"};
}

const char* sizing_key(int index) {
    if (index < 0 || index >= kSizingFields) throw Error(ErrorKind::InvalidArgument, "sizing index out of range");
    return kKeys[index];
}

double& sizing_field(LnaSizing& s, int index) {
    switch (index) {
        case 0: return s.c1;
        case 1: return s.le_or_l1;
        case 2: return s.c2;
        case 3: return s.lb_or_l2;
        case 4: return s.lc;
        case 5: return s.cc;
        case 6: return s.co;
    }
    throw Error(ErrorKind::InvalidArgument, "sizing index out of range");
}

double sizing_field(const LnaSizing& s, int index) { return sizing_field(const_cast<LnaSizing&>(s), index); }

bool is_inductor_field(int index) { return index == 1 || index == 3 || index == 4; }

const char* component_key(Topology t, int index) {
    static constexpr const char* a[kSizingFields] = {"c1", "le", "c2", "lb", "lc", "cc", "co"};
    static constexpr const char* b[kSizingFields] = {"c1", "l1", "c2", "l2", "lc", "cc", "co"};
    sizing_key(index);  // range check
    return t == Topology::A ? a[index] : b[index];
}

void LnaSizing::validate() const {
    for (int i = 0; i < kSizingFields; ++i) {
        const double v = sizing_field(*this, i);
        const bool may_vanish = topology == Topology::A && (i == 1 || i == 2);
        if (!std::isfinite(v) || v < 0.0 || (v == 0.0 && !may_vanish))
            throw Error(ErrorKind::InvalidArgument, std::string("sizing value ") + kKeys[i] + " must be positive");
    }
}

LnaSizing LnaSizing::default_a() { return {1e-12, 113e-12, 16e-15, 241e-12, 73e-12, 81e-15, 15e-15, Topology::A}; }

LnaSizing LnaSizing::default_b() { return {134e-15, 85e-12, 15e-15, 222e-12, 73e-12, 81e-15, 15e-15, Topology::B}; }

NoisyTwoPort LnaCircuit::composite() const { return noise::cascade_noisy(noise::cascade_noisy(imn, an), omn); }

ActiveStages active_stages(const DeviceConfig& dc, double f) {
    return {dev::hbt_twoport(dc.hbt, dc.j, f), dev::hbt_common_base(dc.hbt, dc.j, f),
            cplx(0.0, 2.0 * kPi * f * dc.hbt.c_cs)};
}

NoisyTwoPort degenerated_an(const ActiveStages& st, double le, double c2, const dev::PassiveModels& pm, double f) {
    NoisyTwoPort q1 = st.ce;
    if (c2 > 0.0) q1 = noise::cascade_noisy(dev::capacitor(c2, f, pm, Placement::Shunt), q1);
    if (le > 0.0) {
        // C_cs returns to the substrate, not to the degenerated emitter.
        auto shunt = [&](cplx y) { return NoisyTwoPort::noiseless(net::element_twoport(Placement::Shunt, y, f)); };
        q1 = noise::cascade_noisy(q1, shunt(-st.y_cs));
        q1 = noise::series_feedback(q1, dev::inductor_impedance(le, f, pm.inductor, pm.lossless), pm.temperature);
        q1 = noise::cascade_noisy(q1, shunt(st.y_cs));
    }
    return noise::cascade_noisy(q1, st.cb);
}

NoisyTwoPort bare_an(const ActiveStages& st) { return noise::cascade_noisy(st.ce, st.cb); }

NoisyTwoPort build_imn_a(const LnaSizing& s, const dev::PassiveModels& pm, double f) {
    return noise::cascade_noisy(dev::capacitor(s.c1, f, pm, Placement::Series),
                                dev::inductor(s.lb_or_l2, f, pm, Placement::Series));
}

NoisyTwoPort build_imn_b(const LnaSizing& s, const dev::PassiveModels& pm, double f) {
    NoisyTwoPort n = dev::capacitor(s.c1, f, pm, Placement::Series);
    n = noise::cascade_noisy(n, dev::inductor(s.le_or_l1, f, pm, Placement::Shunt));
    n = noise::cascade_noisy(n, dev::capacitor(s.c2, f, pm, Placement::Shunt));
    return noise::cascade_noisy(n, dev::inductor(s.lb_or_l2, f, pm, Placement::Series));
}

NoisyTwoPort build_omn(const LnaSizing& s, const dev::PassiveModels& pm, double f) {
    NoisyTwoPort n = dev::inductor(s.lc, f, pm, Placement::Shunt);
    n = noise::cascade_noisy(n, dev::capacitor(s.cc, f, pm, Placement::Shunt));
    return noise::cascade_noisy(n, dev::capacitor(s.co, f, pm, Placement::Series));
}

LnaCircuit assemble(const LnaSizing& s, const ActiveStages& st, const dev::PassiveModels& pm, double f, cplx z_s,
                    cplx z_l) {
    s.validate();
    if (s.topology == Topology::A)
        return {build_imn_a(s, pm, f), degenerated_an(st, s.le_or_l1, s.c2, pm, f), build_omn(s, pm, f), z_s, z_l, f};
    return {build_imn_b(s, pm, f), bare_an(st), build_omn(s, pm, f), z_s, z_l, f};
}

LnaCircuit build_lna_a(const LnaSizing& s, const DeviceConfig& dc, double f, cplx z_s, cplx z_l) {
    if (s.topology != Topology::A) throw Error(ErrorKind::InvalidTopologyTag, "build_lna_a needs a topology A sizing");
    return assemble(s, active_stages(dc, f), dc.passives, f, z_s, z_l);
}

LnaCircuit build_lna_b(const LnaSizing& s, const DeviceConfig& dc, double f, cplx z_s, cplx z_l) {
    if (s.topology != Topology::B) throw Error(ErrorKind::InvalidTopologyTag, "build_lna_b needs a topology B sizing");
    return assemble(s, active_stages(dc, f), dc.passives, f, z_s, z_l);
}

LnaCircuit build_lna(const LnaSizing& s, const DeviceConfig& dc, double f, cplx z_s, cplx z_l) {
    return s.topology == Topology::A ? build_lna_a(s, dc, f, z_s, z_l) : build_lna_b(s, dc, f, z_s, z_l);
}

ReportRow analyze_point(const LnaCircuit& c) {
    const NoisyTwoPort lna = c.composite();
    ReportRow r{};
    r.freq = c.freq;
    r.s = net::convert(lna.net(), net::Repr::S).matrix();
    r.t_n = noise::noise_temperature(lna, c.z_source);
    r.nf_db = noise::nf_db(r.t_n);
    r.t_nmin = noise::tnmin_of(lna).t_nmin;
    const net::Gains g = net::gains(lna.net(), c.z_source, c.z_load);
    r.g_a = g.available;
    r.g_t = g.transducer;
    r.g_msg_an = net::gains(c.an.net(), c.z_source, c.z_load).max_stable;
    r.mu = net::mu_stability(lna.net());
    r.mt0 = !(r.g_a > 0.0) || std::abs(r.g_a - 1.0) < 1e-12 ? std::numeric_limits<double>::quiet_NaN()
                                                             : noise::noise_measure(r.t_n, r.g_a).mt0;
    r.eps_gn_db = r.s_db(1, 0) - r.nf_db;
    r.g_a_imn = net::available_gain(c.imn.net(), c.z_source);
    r.z_out_imn = net::port_impedance(c.imn.net(), c.z_source, net::Side::Output);
    r.z_on_an = noise::tnmin_of(c.an).z_on;
    r.g_a_an_omn = net::available_gain(net::cascade(c.an.net(), c.omn.net()), r.z_out_imn);
    return r;
}

DesignReport analyze(const LnaSizing& s, const DeviceConfig& dc, const net::FrequencyGrid& grid, cplx z_s, cplx z_l) {
    s.validate();
    const auto& f = grid.points();
    DesignReport rep{s.topology, std::vector<ReportRow>(f.size())};
    parallel_for(f.size(), [&](std::size_t i) {
        try {
            rep.rows[i] = analyze_point(build_lna(s, dc, f[i], z_s, z_l));
        } catch (const Error& e) {
            throw Error(e.kind(), e.detail() + " at " + fmt_double(f[i]) + " Hz");
        }
    });
    return rep;
}

const std::vector<std::string>& report_columns() {
    static const std::vector<std::string> cols{
        "freq_hz",       "s11_db",        "s11_deg",         "s21_db",          "s21_deg",
        "s12_db",        "s12_deg",       "s22_db",          "s22_deg",         "nf_db",
        "tn_k",          "tnmin_k",       "ga_db",           "gt_db",           "gmsg_an_db",
        "mu",            "mt0_k",         "eps_gn_db",       "ga_imn_db",       "re_zout_imn_ohm",
        "im_zout_imn_ohm", "re_zon_an_ohm", "im_zon_an_ohm", "ga_an_omn_db"};
    return cols;
}

void write_report_csv(std::ostream& os, const DesignReport& r) {
    const auto& cols = report_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
    os << '\n';
    for (const auto& row : r.rows) {
        const double v[] = {row.freq,
                            row.s_db(0, 0),
                            row.s_deg(0, 0),
                            row.s_db(1, 0),
                            row.s_deg(1, 0),
                            row.s_db(0, 1),
                            row.s_deg(0, 1),
                            row.s_db(1, 1),
                            row.s_deg(1, 1),
                            row.nf_db,
                            row.t_n,
                            row.t_nmin,
                            net::db10(row.g_a),
                            net::db10(row.g_t),
                            net::db10(row.g_msg_an),
                            row.mu,
                            row.mt0,
                            row.eps_gn_db,
                            net::db10(row.g_a_imn),
                            row.z_out_imn.real(),
                            row.z_out_imn.imag(),
                            row.z_on_an.real(),
                            row.z_on_an.imag(),
                            net::db10(row.g_a_an_omn)};
        for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << fmt_double(v[i]);
        os << '\n';
    }
}

std::vector<std::vector<double>> read_report_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw Error(ErrorKind::Parse, "report csv: missing header");
    std::string expected;
    for (std::size_t i = 0; i < report_columns().size(); ++i) expected += (i ? "," : "") + report_columns()[i];
    if (line != expected) throw Error(ErrorKind::Parse, "report csv: unexpected header");
    std::vector<std::vector<double>> rows;
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str() || *end != '\0')
                throw Error(ErrorKind::Parse, "report csv line " + std::to_string(lineno) + ": bad number '" + cell + "'");
            row.push_back(v);
        }
        if (row.size() != report_columns().size())
            throw Error(ErrorKind::Parse, "report csv line " + std::to_string(lineno) + ": wrong column count");
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace lna::topo
