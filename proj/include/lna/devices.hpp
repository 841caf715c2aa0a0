#pragma once

// Lumped lossy passives and a SiGe HBT small-signal noise model.

#include <iosfwd>
#include <vector>

#include "lna/circuit.hpp"
#include "lna/noisecore.hpp"

namespace lna::dev {

using net::Placement;

// Spiral-inductor Q as a straight line through two (L, Q) anchors,
// extrapolated outside them and clamped below at 1.
struct InductorLossModel {
    double q_low = 25.0;
    double l_low = 50e-12;
    double q_high = 15.0;
    double l_high = 500e-12;

    void validate() const;
    double q(double inductance) const;
};

// MIM-capacitor Q(f) = q_at_f0 * (f0 / f)^exponent.
struct CapacitorLossModel {
    double q_at_f0 = 30.0;
    double f0 = 60e9;
    double exponent = 1.0;

    void validate() const;
    double q(double freq) const;
};

// Loss switches shared by every passive in a circuit.
struct PassiveModels {
    InductorLossModel inductor;
    CapacitorLossModel capacitor;
    bool lossless = false;
    double temperature = noise::kT0;
};

// Branch impedances: jwL + wL/Q and 1/(jwC) + 1/(wC Q).
cplx inductor_impedance(double l, double f, const InductorLossModel& m, bool lossless = false);
cplx capacitor_impedance(double c, double f, const CapacitorLossModel& m, bool lossless = false);

noise::NoisyTwoPort lossy_inductor(double l, double f, const InductorLossModel& model, Placement placement,
                                   double t_phys = noise::kT0);
noise::NoisyTwoPort lossy_capacitor(double c, double f, const CapacitorLossModel& model, Placement placement,
                                    double t_phys = noise::kT0);

// Same, honouring PassiveModels::lossless.
noise::NoisyTwoPort inductor(double l, double f, const PassiveModels& pm, Placement placement);
noise::NoisyTwoPort capacitor(double c, double f, const PassiveModels& pm, Placement placement);

// Hybrid-pi HBT. Units: emitter area um^2, j_peak mA/um^2, capacitances F,
// resistances ohm, f_t_peak Hz.
struct HbtParams {
    double emitter_area = 0.13;
    double beta0 = 410.0;
    double r_b = 13.7;
    double r_e = 2.75;
    double c_mu = 1.85e-15;
    double c_cs = 0.8e-15;
    double f_t_peak = 108e9;
    double j_peak = 7.25;
    double kirk_sharpness = 1.55;
    double v_t = 0.02585;
    double temperature = noise::kT0;
    bool noiseless = false;  // drop every noise source, keep the small-signal model

    void validate() const;
    // f_T(J) = f_t_peak / (1 + k (J/j_peak + j_peak/J - 2)); peak at j_peak.
    double f_t(double j) const;
    double collector_current(double j) const { return j * 1e-3 * emitter_area; }
    double transconductance(double j) const { return collector_current(j) / v_t; }
    // C_pi = g_m / (2 pi f_T) - C_mu, floored at zero.
    double c_pi(double j) const;
};

// Adds one transistor to `c` between the given terminal nodes (0 = ground).
void add_hbt(NoisyCircuit& c, const HbtParams& p, double j, double f, int base, int collector, int emitter);

// Common-emitter stage: port 1 base, port 2 collector, emitter grounded.
noise::NoisyTwoPort hbt_twoport(const HbtParams& p, double j, double f);
// Common-base stage: port 1 emitter, port 2 collector, base grounded.
noise::NoisyTwoPort hbt_common_base(const HbtParams& p, double j, double f);

// Common-emitter stage (p1) cascaded with a common-base stage (p2).
noise::NoisyTwoPort cascode(const HbtParams& p1, const HbtParams& p2, double j, double f);

struct TnminPoint {
    double j;
    double t_nmin;
    double nf_min_db;
};

std::vector<TnminPoint> sweep_tnmin_vs_j(const HbtParams& p, const std::vector<double>& j_grid, double f);

// Index of the minimum T_Nmin; ties resolve to the lowest J.
std::size_t argmin_tnmin(const std::vector<TnminPoint>& curve);

// CSV: j_ma_um2, tnmin_k, nfmin_db
void write_tnmin_csv(std::ostream& os, const std::vector<TnminPoint>& curve);
std::vector<TnminPoint> read_tnmin_csv(std::istream& is);

}  // namespace lna::dev
