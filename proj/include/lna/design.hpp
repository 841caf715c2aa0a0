#pragma once

// Input-matching design procedures.
//
// design_mpmn   classical simultaneous noise/power match for topology A,
//               solved on lossless element models
// design_mpmcn  loss-aware match for topology B: input power match as a
//               constraint, cascade noise of IMN+AN as the objective
// design_omn    conjugate output match with the collector tank and C_O
// grid_oracle   exhaustive grid search, used to check the optimizers

#include <array>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "lna/topology.hpp"

namespace lna::design {

using topo::DeviceConfig;
using topo::LnaSizing;
using topo::Topology;

struct Bounds {
    double min;
    double max;
    bool fixed() const { return min == max; }
};

struct DesignSpec {
    double f0 = 60e9;
    cplx z_source = kDefaultZRef;
    cplx z_load = kDefaultZRef;
    double match_tolerance_db = -15.0;  // max |S11| at f0
    // Per sizing field, same indexing as topo::sizing_field(). A collapsed
    // range pins the element; {0, 0} removes L_E or C_2 from topology A.
    // The input designers and grid_oracle use the first four; the OMN
    // ranges only bound design_omn.
    std::array<Bounds, topo::kSizingFields> bounds{{{5e-15, 2e-12},
                                                   {5e-12, 600e-12},
                                                   {1e-15, 200e-15},
                                                   {5e-12, 600e-12},
                                                   {5e-12, 600e-12},
                                                   {1e-15, 2e-12},
                                                   {1e-15, 2e-12}}};
    std::uint64_t seed = 1;
    // Allowed trim of both transistors' emitter area in design_mpmn (ratio).
    double area_trim = 2.0;

    void validate() const;
};

enum class Method { MPmN, MPmCN, GridOracle };
std::string to_string(Method m);
Method method_from_string(const std::string& s);

struct Achieved {
    double s21_db;
    double nf_db;
    double mt0_k;
    double eps_gn_db;
    double s11_db;
    double s22_db;
};

struct DesignOutcome {
    Method method = Method::MPmN;
    LnaSizing sizing;
    double f0 = 60e9;
    std::uint64_t seed = 1;
    double area_scale = 1.0;  // emitter-area factor applied to both transistors
    Achieved achieved{};
    double cascade_tn = 0.0;  // T_N of IMN+AN at the source impedance
    double residual = 0.0;    // MPmN: worst normalized match residual
    bool non_improving = false;
    double outer_1d_tn = std::numeric_limits<double>::quiet_NaN();  // MPmCN only: exact-match searches over L_1, and over (L_1, C_2)
    double outer_2d_tn = std::numeric_limits<double>::quiet_NaN();
    bool has_sizing = true;  // false for hand-written outcome files carrying only metrics
};

// Device configuration the outcome was designed and evaluated with.
DeviceConfig outcome_devices(const DesignOutcome& o, const DeviceConfig& base);

Achieved achieved_metrics(const topo::ReportRow& r);

struct DesignPoint {
    double cascade_tn;  // +inf if the point cannot be evaluated
    double s11_db;
    bool feasible;
};

// Objective and constraint used by design_mpmcn and grid_oracle.
DesignPoint evaluate_point(const DesignSpec& spec, const DeviceConfig& dc, const LnaSizing& s);

// Residual-based solve on lossless models; achieved metrics use dc.passives.
// Throws Infeasible with the best residual when no bounded sizing reaches 1e-3.
DesignOutcome design_mpmn(const DesignSpec& spec, const DeviceConfig& dc,
                          const LnaSizing& tmpl = LnaSizing::default_a());

enum class OuterSearch { OneD, TwoD };

struct MpmcnOptions {
    OuterSearch outer = OuterSearch::TwoD;
    int seed_grid = 11;     // per-dimension points of the 4-D start grid
    int polish_starts = 8;  // best grid points polished, plus the exact-match seed
    int random_starts = 4;
};

DesignOutcome design_mpmcn(const DesignSpec& spec, const DeviceConfig& dc,
                           const LnaSizing& tmpl = LnaSizing::default_b(), const MpmcnOptions& opts = {},
                           const DesignOutcome* reference = nullptr);

enum class OmnFree { InductorLC, CapacitorCC };

struct OmnFragment {
    double lc;
    double cc;
    double co;
    double residual;  // |Z_omn - conj(Z_out)| / |Z_load|
};

OmnFragment design_omn(cplx z_out_an, const DesignSpec& spec, const dev::PassiveModels& pm,
                       const LnaSizing& tmpl = LnaSizing::default_a(), OmnFree free = OmnFree::InductorLC);

inline constexpr double kMaxGridPoints = 1e7;

// Log-spaced axis; a single point sits at the geometric mean.
std::vector<double> grid_axis(const Bounds& b, int n);

// Every non-fixed input field (C_1, L_E/L_1, C_2, L_B/L_2) is gridded with n
// points; OMN values come from the template.
DesignOutcome grid_oracle(const DesignSpec& spec, const DeviceConfig& dc, const LnaSizing& tmpl, int n);

// key = value text, component values first; see read_outcome for
// the accepted keys.
void write_outcome(std::ostream& os, const DesignOutcome& o);
std::string outcome_to_string(const DesignOutcome& o);
DesignOutcome read_outcome(std::istream& is);

// Sizing-only files: topology plus the seven component keys. Values accept
// fF/pF/nF/pH/nH suffixes. Outcome files are accepted as well.
LnaSizing read_sizing(std::istream& is);

}  // namespace lna::design
