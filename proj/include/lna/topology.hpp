#pragma once

// The two LNA circuits, kept partitioned as IMN -> AN -> OMN.
//
// Topology A (inductive degeneration):
//   IMN  series C1, series LB
//   AN   common-emitter Q1 with C2 across base-emitter and LE in the emitter
//        lead, followed by common-base Q2
//   OMN  shunt LC, shunt CC at the collector, series CO to the load
//
// Topology B (four-element IMN, no feedback):
//   IMN  series C1 from the source, shunt L1, shunt C2, series L2 into the base
//   AN   bare cascode
//   OMN  as topology A
//
// The element roles in topology B's IMN are fixed here; changing the reading
// of the schematic means editing build_imn_b() only.

#include <iosfwd>
#include <string>
#include <vector>

#include "lna/devices.hpp"

namespace lna::topo {

enum class Topology { A, B };

std::string to_string(Topology t);
Topology topology_from_string(const std::string& s);  // "A" or "B"; InvalidTopologyTag otherwise

// Component values in SI units.
struct LnaSizing {
    double c1 = 0.0;
    double le_or_l1 = 0.0;  // L_E (A) or L_1 (B)
    double c2 = 0.0;
    double lb_or_l2 = 0.0;  // L_B (A) or L_2 (B)
    double lc = 0.0;
    double cc = 0.0;
    double co = 0.0;
    Topology topology = Topology::A;

    // All values positive; topology A additionally accepts L_E = 0 and C_2 = 0
    // (element removed).
    void validate() const;

    static LnaSizing default_a();
    static LnaSizing default_b();
};

inline constexpr int kSizingFields = 7;
// Keys as used in sizing files: c1, le_or_l1, c2, lb_or_l2, lc, cc, co.
const char* sizing_key(int index);
double& sizing_field(LnaSizing& s, int index);
double sizing_field(const LnaSizing& s, int index);
bool is_inductor_field(int index);
// Per-topology names: c1 le c2 lb lc cc co (A), c1 l1 c2 l2 lc cc co (B).
const char* component_key(Topology t, int index);

struct DeviceConfig {
    dev::HbtParams hbt;
    double j = 6.4;  // mA/um^2, the T_Nmin optimum of the default cascode at 60 GHz
    dev::PassiveModels passives;
};

struct LnaCircuit {
    noise::NoisyTwoPort imn;
    noise::NoisyTwoPort an;
    noise::NoisyTwoPort omn;
    cplx z_source;
    cplx z_load;
    double freq;

    noise::NoisyTwoPort composite() const;
};

// Active-network pieces, exposed so designers can reuse the transistor stages
// across sweeps of the passive values.
struct ActiveStages {
    noise::NoisyTwoPort ce;  // common-emitter Q1
    noise::NoisyTwoPort cb;  // common-base Q2
    cplx y_cs;               // Q1 collector-substrate admittance, included in ce
};
ActiveStages active_stages(const DeviceConfig& dc, double f);

noise::NoisyTwoPort degenerated_an(const ActiveStages& st, double le, double c2, const dev::PassiveModels& pm, double f);
noise::NoisyTwoPort bare_an(const ActiveStages& st);
noise::NoisyTwoPort build_imn_a(const LnaSizing& s, const dev::PassiveModels& pm, double f);
noise::NoisyTwoPort build_imn_b(const LnaSizing& s, const dev::PassiveModels& pm, double f);
noise::NoisyTwoPort build_omn(const LnaSizing& s, const dev::PassiveModels& pm, double f);

LnaCircuit build_lna_a(const LnaSizing& s, const DeviceConfig& dc, double f, cplx z_s = kDefaultZRef,
                       cplx z_l = kDefaultZRef);
LnaCircuit build_lna_b(const LnaSizing& s, const DeviceConfig& dc, double f, cplx z_s = kDefaultZRef,
                       cplx z_l = kDefaultZRef);
LnaCircuit build_lna(const LnaSizing& s, const DeviceConfig& dc, double f, cplx z_s = kDefaultZRef,
                     cplx z_l = kDefaultZRef);

// Same, with prebuilt transistor stages.
LnaCircuit assemble(const LnaSizing& s, const ActiveStages& st, const dev::PassiveModels& pm, double f, cplx z_s,
                    cplx z_l);

struct ReportRow {
    double freq;
    Mat2 s;  // composite S-parameters
    double nf_db;
    double t_n;
    double t_nmin;
    double g_a;
    double g_t;
    double g_msg_an;  // NaN if the AN has no reverse transmission
    double mu;        // +inf for unilateral networks
    double mt0;       // NaN when G_A <= 0 or within 1e-12 of one
    double eps_gn_db;
    // block-level diagnostics
    double g_a_imn;
    cplx z_out_imn;
    cplx z_on_an;
    double g_a_an_omn;

    double s_db(int i, int j) const { return net::db20(s(i, j)); }
    double s_deg(int i, int j) const { return std::arg(s(i, j)) * 180.0 / kPi; }
};

struct DesignReport {
    Topology topology;
    std::vector<ReportRow> rows;
};

ReportRow analyze_point(const LnaCircuit& c);
DesignReport analyze(const LnaSizing& s, const DeviceConfig& dc, const net::FrequencyGrid& grid,
                     cplx z_s = kDefaultZRef, cplx z_l = kDefaultZRef);

// CSV with one row per frequency; column names in report_columns().
const std::vector<std::string>& report_columns();
void write_report_csv(std::ostream& os, const DesignReport& r);
std::vector<std::vector<double>> read_report_csv(std::istream& is);

}  // namespace lna::topo
