#include "lna/devices.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "lna/io.hpp"

namespace lna::dev {

using noise::kBoltzmann;
using noise::kElectronCharge;
using noise::NoisyTwoPort;

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw Error(ErrorKind::InvalidArgument, what);
}

double omega(double f) { return 2.0 * kPi * f; }

NoisyTwoPort branch(cplx value, double f, Placement placement, double t_phys) {
    // Series: value is Z, noise 2kT Re{Z} on the voltage generator.
    // Shunt: value is Y = 1/Z, noise 2kT Re{Y} on the current generator.
    Mat2 corr = Mat2::Zero();
    if (placement == Placement::Series) {
        corr(0, 0) = 2.0 * kBoltzmann * t_phys * value.real();
    } else {
        value = 1.0 / value;
        corr(1, 1) = 2.0 * kBoltzmann * t_phys * value.real();
    }
    return NoisyTwoPort(net::element_twoport(placement, value, f), corr);
}

}  // namespace

void InductorLossModel::validate() const {
    require(q_low > 0.0 && q_high > 0.0, "inductor Q anchors must be positive");
    require(l_low > 0.0 && l_low < l_high, "inductor anchors need 0 < l_low < l_high");
}

double InductorLossModel::q(double l) const {
    const double slope = (q_high - q_low) / (l_high - l_low);
    return std::max(1.0, q_low + slope * (l - l_low));
}

void CapacitorLossModel::validate() const {
    require(q_at_f0 > 0.0, "capacitor Q must be positive");
    require(f0 > 0.0, "capacitor reference frequency must be positive");
}

double CapacitorLossModel::q(double f) const { return q_at_f0 * std::pow(f0 / f, exponent); }

cplx inductor_impedance(double l, double f, const InductorLossModel& m, bool lossless) {
    require(l > 0.0 && f > 0.0, "inductance and frequency must be positive");
    const double x = omega(f) * l;
    return {lossless ? 0.0 : x / m.q(l), x};
}

cplx capacitor_impedance(double c, double f, const CapacitorLossModel& m, bool lossless) {
    require(c > 0.0 && f > 0.0, "capacitance and frequency must be positive");
    const double x = 1.0 / (omega(f) * c);
    const double q = m.q(f);
    return {lossless || std::isinf(q) ? 0.0 : x / q, -x};
}

NoisyTwoPort lossy_inductor(double l, double f, const InductorLossModel& model, Placement placement, double t_phys) {
    return branch(inductor_impedance(l, f, model), f, placement, t_phys);
}

NoisyTwoPort lossy_capacitor(double c, double f, const CapacitorLossModel& model, Placement placement, double t_phys) {
    return branch(capacitor_impedance(c, f, model), f, placement, t_phys);
}

NoisyTwoPort inductor(double l, double f, const PassiveModels& pm, Placement placement) {
    return branch(inductor_impedance(l, f, pm.inductor, pm.lossless), f, placement, pm.temperature);
}

NoisyTwoPort capacitor(double c, double f, const PassiveModels& pm, Placement placement) {
    return branch(capacitor_impedance(c, f, pm.capacitor, pm.lossless), f, placement, pm.temperature);
}

void HbtParams::validate() const {
    require(emitter_area > 0 && beta0 > 0 && r_b > 0 && r_e > 0 && c_mu > 0 && c_cs > 0 && f_t_peak > 0 &&
                j_peak > 0 && kirk_sharpness > 0 && v_t > 0 && temperature > 0,
            "HBT parameters must all be positive");
}

double HbtParams::f_t(double j) const {
    return f_t_peak / (1.0 + kirk_sharpness * (j / j_peak + j_peak / j - 2.0));
}

double HbtParams::c_pi(double j) const {
    return std::max(0.0, transconductance(j) / (2.0 * kPi * f_t(j)) - c_mu);
}

void add_hbt(NoisyCircuit& c, const HbtParams& p, double j, double f, int base, int collector, int emitter) {
    p.validate();
    if (!(j > 0.0)) throw Error(ErrorKind::NonPositiveBias, "collector current density must be positive");
    const double w = omega(f);
    const double ic = p.collector_current(j);
    const double gm = p.transconductance(j);
    const int bi = c.add_node();
    const int ei = c.add_node();

    const double t_noise = p.noiseless ? 0.0 : p.temperature;
    c.impedance(base, bi, p.r_b, t_noise);
    c.admittance(bi, ei, cplx(gm / p.beta0, w * p.c_pi(j)));  // r_pi is not a thermal resistor
    c.admittance(bi, collector, cplx(0.0, w * p.c_mu));
    c.vccs(collector, ei, bi, ei, gm);
    c.impedance(ei, emitter, p.r_e, t_noise);
    c.admittance(collector, 0, cplx(0.0, w * p.c_cs));

    if (p.noiseless) return;
    // shot noise 2qI, stored as qI
    c.noise_current(bi, ei, kElectronCharge * ic / p.beta0);
    c.noise_current(collector, ei, kElectronCharge * ic);
}

NoisyTwoPort hbt_twoport(const HbtParams& p, double j, double f) {
    NoisyCircuit c;
    const int b = c.add_node(), col = c.add_node();
    add_hbt(c, p, j, f, b, col, 0);
    return c.two_port(b, col, f);
}

NoisyTwoPort hbt_common_base(const HbtParams& p, double j, double f) {
    NoisyCircuit c;
    const int e = c.add_node(), col = c.add_node();
    add_hbt(c, p, j, f, 0, col, e);
    return c.two_port(e, col, f);
}

NoisyTwoPort cascode(const HbtParams& p1, const HbtParams& p2, double j, double f) {
    return noise::cascade_noisy(hbt_twoport(p1, j, f), hbt_common_base(p2, j, f));
}

std::vector<TnminPoint> sweep_tnmin_vs_j(const HbtParams& p, const std::vector<double>& j_grid, double f) {
    if (j_grid.empty()) throw Error(ErrorKind::InvalidArgument, "current-density grid is empty");
    for (std::size_t i = 1; i < j_grid.size(); ++i)
        if (!(j_grid[i] > j_grid[i - 1]))
            throw Error(ErrorKind::InvalidArgument, "current-density grid must be strictly increasing");
    std::vector<TnminPoint> out;
    out.reserve(j_grid.size());
    for (double j : j_grid) {
        const double t = noise::tnmin_of(cascode(p, p, j, f)).t_nmin;
        out.push_back({j, t, noise::nf_db(t)});
    }
    return out;
}

std::size_t argmin_tnmin(const std::vector<TnminPoint>& curve) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < curve.size(); ++i)
        if (curve[i].t_nmin < curve[best].t_nmin) best = i;
    return best;
}

void write_tnmin_csv(std::ostream& os, const std::vector<TnminPoint>& curve) {
    os << "j_ma_um2,tnmin_k,nfmin_db\n";
    for (const auto& pt : curve)
        os << io::fmt_double(pt.j) << ',' << io::fmt_double(pt.t_nmin) << ',' << io::fmt_double(pt.nf_min_db) << '\n';
}

std::vector<TnminPoint> read_tnmin_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("j_ma_um2,tnmin_k,nfmin_db", 0) != 0)
        throw Error(ErrorKind::Parse, "T_Nmin CSV: unexpected header");
    std::vector<TnminPoint> out;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string a, b, c;
        if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, c, ','))
            throw Error(ErrorKind::Parse, "T_Nmin CSV: expected 3 columns");
        try {
            out.push_back({std::stod(a), std::stod(b), std::stod(c)});
        } catch (const std::exception&) {
            throw Error(ErrorKind::Parse, "T_Nmin CSV: non-numeric value in '" + line + "'");
        }
    }
    return out;
}

}  // namespace lna::dev
