#pragma once

// Run configuration and the four batch commands behind the `lna` tool.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lna/design.hpp"

namespace lna::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kNumericError = 3, kInfeasible = 4 };

// Exit code for a library error.
int exit_code_for(ErrorKind kind);

struct RunConfig {
    topo::DeviceConfig devices;
    bool bias_auto = true;  // bias.j = auto: T_Nmin optimum over the sweep.j grid at design.f0
    design::DesignSpec spec;
    double grid_start = 40e9;
    double grid_stop = 80e9;
    int grid_points = 81;
    double sweep_j_start = 1.0;
    double sweep_j_stop = 15.0;
    int sweep_j_points = 281;
    std::string output_dir = ".";

    net::FrequencyGrid grid() const;  // InvalidArgument "frequency grid empty" when grid.points = 0
    std::vector<double> j_grid() const;
};

// Keys (all optional):
//   hbt.{emitter_area, beta0, r_b, r_e, c_mu, c_cs, f_t_peak, j_peak, kirk_sharpness, v_t, temperature}
//   bias.j                  mA/um^2 or "auto"
//   inductor.{q_low, l_low, q_high, l_high}
//   capacitor.{q_at_f0, f0, exponent}
//   passives.{lossless, temperature_k}
//   design.{f0, z_source, z_load, match_tolerance_db, seed, area_trim}
//   design.bounds.<c1|le|l1|c2|lb|l2|lc|cc|co> = min, max
//   grid.{start_hz, stop_hz, points}
//   sweep.{j_start, j_stop, j_points}
//   output.dir
// Errors are Parse and name the offending line.
RunConfig parse_config(std::istream& is);
RunConfig load_config(const std::string& path);

// Resolves bias.j = auto against the configured sweep.
void resolve_bias(RunConfig& cfg);

// "50", "50+10j", "20-40j", "-5j"
cplx parse_impedance(const std::string& text);

enum class SweepKind { TnminVsJ, TnVsFreq, SparamsVsFreq };
SweepKind sweep_kind_from_string(const std::string& s);

// One-line summary at f0. ε_GN is formed from the printed S21 and NF.
std::string summary_line(topo::Topology t, const topo::ReportRow& r);

// Each command writes into `out_dir` and reports on `out`. They throw
// lna::Error; run() turns those into exit codes.
void cmd_analyze(const RunConfig& cfg, const topo::LnaSizing& sizing, const std::string& out_dir, std::ostream& out);
void cmd_sweep(const RunConfig& cfg, SweepKind kind, const topo::LnaSizing& sizing, const std::string& out_dir,
               std::ostream& out);
design::DesignOutcome cmd_design(const RunConfig& cfg, design::Method method, topo::Topology topology,
                                 const std::string& out_dir, std::ostream& out);

struct Comparison {
    double s21_a, s21_b;
    double nf_a, nf_b;
    double mt0_a, mt0_b;
    double eps_a, eps_b;  // recomputed as S21 - NF
    double d_s21() const { return s21_b - s21_a; }
    double d_nf() const { return nf_b - nf_a; }
    double d_mt0() const { return mt0_b - mt0_a; }
    double d_eps() const { return eps_b - eps_a; }
};

// Throws InvalidArgument when the two outcomes were designed at different f0.
Comparison compare(const design::DesignOutcome& a, const design::DesignOutcome& b);
void cmd_compare(const std::string& path_a, const std::string& path_b, std::ostream& out);

struct Invocation {
    std::string command;  // analyze | sweep | design | compare
    std::optional<std::string> config;
    std::optional<std::string> sizing;
    std::string topology = "A";
    bool topology_given = false;
    std::string method = "mpmcn";
    std::string kind = "tnmin_vs_j";
    std::optional<std::string> out_dir;
    std::vector<std::string> positional;  // compare: two outcome files
};

// Runs one invocation; messages go to `out` and `err`. Returns the exit code.
int run(const Invocation& inv, std::ostream& out, std::ostream& err);

}  // namespace lna::cli
