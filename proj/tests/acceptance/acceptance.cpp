// One PASS/FAIL line per acceptance criterion; exit status is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "lna/circuit.hpp"
#include "lna/cli.hpp"
#include "lna/design.hpp"
#include "lna/io.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace lna;
using noise::NoisyTwoPort;
using testgen::rel_err;
using testgen::Rng;

namespace {

constexpr double kF = 60e9;

struct Verdict {
    bool ok;
    std::string detail;
};

std::string num(double x, int decimals) { return io::fmt_fixed(x, decimals); }
std::string sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2e", x);
    return buf;
}

// -- 1 ------------------------------------------------------------------------

Verdict noise_measure_consistency() {
    const double b = noise::noise_measure(703.0, std::pow(10.0, 0.84)).mt0;
    const double a = noise::noise_measure(568.0, std::pow(10.0, 0.44)).mt0;
    const double b_hand = 703.0 / (1.0 - std::pow(10.0, -0.84));
    const double a_hand = 568.0 / (1.0 - std::pow(10.0, -0.44));
    const bool ok = rel_err(b, b_hand) < 1e-12 && rel_err(a, a_hand) < 1e-12 && std::abs(b - 821.7) < 0.1 &&
                    rel_err(b, 821.0) < 0.002 && std::abs(a - 891.8) < 0.05 && rel_err(a, 897.0) < 0.01;
    return {ok, "MT0 " + num(b, 2) + " K vs 821 (" + num(100 * rel_err(b, 821.0), 3) + "%), " + num(a, 2) +
                    " K vs 897 (" + num(100 * rel_err(a, 897.0), 3) + "%)"};
}

// -- 2 ------------------------------------------------------------------------

Verdict temperature_nf_pairs() {
    struct Pair {
        double t, nf;
    };
    bool ok = true;
    std::string d;
    for (const Pair& p : {Pair{276.0, 2.9}, Pair{568.0, 4.7}, Pair{703.0, 5.3}}) {
        const double nf = noise::nf_db(p.t);
        const double hand = 10.0 * std::log10(1.0 + p.t / 290.0);
        ok = ok && std::abs(nf - p.nf) <= 0.05 && std::abs(nf - hand) < 1e-12 &&
             rel_err(noise::t_from_nf(nf), p.t) < 1e-12;
        d += num(p.t, 0) + " K -> " + num(nf, 3) + " dB; ";
    }
    const double ratio = 548.0 / 276.0;
    ok = ok && rel_err(ratio, 1.985) <= 0.005;
    d += "548/276 = " + num(ratio, 4);
    return {ok, d};
}

// -- 3 ------------------------------------------------------------------------

Verdict gain_noise_excess_and_compare() {
    const auto dir = std::filesystem::temp_directory_path() / ("lna_accept_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    auto write = [&](const std::string& name, double s21, double nf, double mt0) {
        const std::string p = (dir / name).string();
        std::ofstream(p) << "method = mpmn\nf0_hz = 60e9\ns21_db = " << s21 << "\nnf_db = " << nf << "\nmt0_k = " << mt0
                         << "\n";
        return p;
    };
    const std::string a = write("a.txt", 4.4, 4.7, 897), b = write("b.txt", 8.4, 5.3, 821);
    std::ostringstream out;
    cli::cmd_compare(a, b, out);
    std::istringstream ia(io::read_file(a)), ib(io::read_file(b));
    const cli::Comparison c = cli::compare(design::read_outcome(ia), design::read_outcome(ib));
    std::filesystem::remove_all(dir);

    std::string mt0_line;
    std::istringstream lines(out.str());
    for (std::string l; std::getline(lines, l);)
        if (l.rfind("MT0", 0) == 0) mt0_line = l;
    const bool ok = num(c.eps_a, 2) == "-0.30" && num(c.eps_b, 2) == "3.10" && std::abs(c.eps_a + 0.3) < 1e-12 &&
                    std::abs(c.eps_b - 3.1) < 1e-12 && c.d_mt0() == -76.0 &&
                    mt0_line.size() >= 5 && mt0_line.substr(mt0_line.size() - 5) == "-76.0";
    return {ok, "eps_GN " + num(c.eps_a, 2) + " / " + num(c.eps_b, 2) + " dB, compare dMT0 " + num(c.d_mt0(), 1) + " K"};
}

// -- 4 ------------------------------------------------------------------------

Verdict special_invariant() {
    Rng r(2024);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const NoisyTwoPort amp = testgen::noisy_amplifier(r, kF);
        const NoisyTwoPort in = NoisyTwoPort::noiseless(testgen::matching_ladder(r, kF, 4));
        const NoisyTwoPort out = NoisyTwoPort::noiseless(testgen::lossless_ladder(r, kF, 4));
        const double t0 = noise::tnmin_of(amp).t_nmin;
        const double t1 = noise::tnmin_of(noise::cascade_noisy(noise::cascade_noisy(in, amp), out)).t_nmin;
        worst = std::max(worst, rel_err(t1, t0));
    }
    return {worst < 1e-6, "max relative T_Nmin drift " + sci(worst) + " over 1000 embeddings"};
}

// -- 5 ------------------------------------------------------------------------

Verdict general_invariant() {
    Rng r(77);
    double worst = 0.0, worst_eig = 0.0;
    int done = 0, tried = 0;
    auto interior = [](const noise::MinNoiseMeasure& m) { return std::abs(net::gamma_of(m.z_s, kDefaultZRef)) < 0.95; };
    while (done < 100 && tried < 20000) {
        ++tried;
        const NoisyTwoPort amp = testgen::noisy_amplifier(r, kF);
        if (!(net::mu_stability(amp.net()) > 1.0)) continue;
        const NoisyTwoPort emb = noise::cascade_noisy(
            noise::cascade_noisy(NoisyTwoPort::noiseless(testgen::lossless_ladder(r, kF, 3)), amp),
            NoisyTwoPort::noiseless(testgen::lossless_ladder(r, kF, 3)));
        if (!(net::mu_stability(emb.net()) > 1.0)) continue;
        noise::MinNoiseMeasure m0, m1;
        try {
            m0 = noise::min_noise_measure(amp);
            m1 = noise::min_noise_measure(emb);
        } catch (const Error&) {
            continue;
        }
        if (!interior(m0) || !interior(m1)) continue;
        worst = std::max(worst, rel_err(m1.mt0, m0.mt0));
        worst_eig = std::max(worst_eig, rel_err(m0.mt0, oracle::eigen_noise_measure(amp)));
        ++done;
    }
    return {done == 100 && worst < 1e-3 && worst_eig < 1e-3,
            std::to_string(done) + " embeddings, max relative (MT0)min change " + sci(worst) +
                ", worst gap to eigenvalue oracle " + sci(worst_eig)};
}

// -- 6 ------------------------------------------------------------------------

Verdict feedback_lowering() {
    const dev::HbtParams p;
    const double j = topo::DeviceConfig{}.j;
    const double bare = noise::tnmin_of(dev::hbt_twoport(p, j, kF)).t_nmin;
    double best = bare, best_le = 0.0;
    const double w = 2.0 * kPi * kF;
    for (int k = 0; k <= 290; ++k) {
        const double le = (10.0 + k) * 1e-12;
        dev::NoisyCircuit c;
        const int b = c.add_node(), col = c.add_node(), e = c.add_node();
        dev::add_hbt(c, p, j, kF, b, col, e);
        c.impedance(e, 0, cplx(0.0, w * le));
        const double t = noise::tnmin_of(c.two_port(b, col, kF)).t_nmin;
        if (t < best) {
            best = t;
            best_le = le;
        }
    }
    return {bare - best >= 1.0, "bare stage T_Nmin " + num(bare, 1) + " K, with L_E = " +
                                    io::fmt_component(best_le, true) + " " + num(best, 1) + " K"};
}

// -- 7 ------------------------------------------------------------------------

Verdict attenuator_oracle() {
    bool ok = true;
    std::string d;
    for (double db : {3.0, 6.0, 10.0}) {
        const NoisyTwoPort pad = noise::passive_thermal_noise(oracle::matched_pad(db, kF), 290.0);
        const double nf = noise::nf_db(noise::noise_temperature(pad, kDefaultZRef));
        ok = ok && std::abs(nf - db) < 1e-6;
        d += num(nf, 6) + " ";
    }
    return {ok, "NF " + d + "dB"};
}

// -- 8 ------------------------------------------------------------------------

Verdict oracle_equivalence() {
    const design::DesignSpec spec;
    const topo::DeviceConfig dc;
    const int n = 15;
    const auto grid = design::grid_oracle(spec, dc, topo::LnaSizing::default_b(), n);
    const auto opt = design::design_mpmcn(spec, dc);

    // Slack: largest objective change between the grid optimum and its axis neighbours.
    double slack = 0.0;
    for (int f = 0; f < 4; ++f) {
        const auto axis = design::grid_axis(spec.bounds[f], n);
        const double v = topo::sizing_field(grid.sizing, f);
        const auto it = std::find(axis.begin(), axis.end(), v);
        if (it == axis.end()) continue;
        for (int step : {-1, 1}) {
            const long k = (it - axis.begin()) + step;
            if (k < 0 || k >= n) continue;
            topo::LnaSizing s = grid.sizing;
            topo::sizing_field(s, f) = axis[k];
            const double t = design::evaluate_point(spec, dc, s).cascade_tn;
            if (std::isfinite(t)) slack = std::max(slack, std::abs(t - grid.cascade_tn));
        }
    }
    return {opt.cascade_tn <= grid.cascade_tn + slack,
            "optimizer " + num(opt.cascade_tn, 2) + " K, 15^4 grid " + num(grid.cascade_tn, 2) + " K, cell slack " +
                num(slack, 2) + " K"};
}

// -- 9 ------------------------------------------------------------------------

Verdict trend() {
    const design::DesignSpec spec;
    const topo::DeviceConfig dc;
    const auto a = design::design_mpmn(spec, dc);
    const auto b = design::design_mpmcn(spec, dc, topo::LnaSizing::default_b(), {}, &a);
    const net::FrequencyGrid band = net::FrequencyGrid::linear(40e9, 80e9, 81);
    double mu_min = INFINITY;
    for (const auto* o : {&a, &b})
        for (const auto& row : topo::analyze(o->sizing, design::outcome_devices(*o, dc), band).rows)
            mu_min = std::min(mu_min, row.mu);
    const auto& x = a.achieved;
    const auto& y = b.achieved;
    const bool ok = y.s21_db > x.s21_db && y.nf_db - x.nf_db <= 1.5 && y.eps_gn_db > x.eps_gn_db &&
                    y.mt0_k < x.mt0_k && mu_min > 1.0;
    return {ok, "A " + num(x.s21_db, 2) + "/" + num(x.nf_db, 2) + " dB, MT0 " + num(x.mt0_k, 1) + " K, eps " +
                    num(x.eps_gn_db, 2) + " dB; B " + num(y.s21_db, 2) + "/" + num(y.nf_db, 2) + " dB, MT0 " +
                    num(y.mt0_k, 1) + " K, eps " + num(y.eps_gn_db, 2) + " dB; min mu " + num(mu_min, 4)};
}

// -- 10 -----------------------------------------------------------------------

Verdict numerical_hygiene() {
    Rng r(99);
    using net::Repr;
    const Repr all[] = {Repr::S, Repr::Z, Repr::Y, Repr::ABCD};
    double round_trip = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const net::TwoPort s = testgen::well_conditioned_s(r, kF);
        for (Repr a : all) {
            const net::TwoPort x = net::convert(s, a);
            for (Repr b : all) round_trip = std::max(round_trip, rel_err(net::convert(net::convert(x, b), a).matrix(), x.matrix()));
        }
    }
    double assoc = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const auto a = testgen::well_conditioned_s(r, kF), b = testgen::well_conditioned_s(r, kF),
                   c = testgen::well_conditioned_s(r, kF);
        assoc = std::max(assoc, rel_err(net::convert(net::cascade(net::cascade(a, b), c), Repr::ABCD).matrix(),
                                        net::convert(net::cascade(a, net::cascade(b, c)), Repr::ABCD).matrix()));
    }
    int psd_fail = 0, steps = 0;
    for (int i = 0; i < 300; ++i) {
        NoisyTwoPort n = testgen::noisy_amplifier(r, kF);
        int len = 0;
        while (len < 10) {
            try {
                switch (testgen::pick(r, 0, 5)) {
                    case 0: n = noise::cascade_noisy(n, noise::passive_thermal_noise(testgen::lossy_ladder(r, kF, 2))); break;
                    case 1:
                        n = noise::cascade_noisy(NoisyTwoPort::noiseless(testgen::lossless_ladder(r, kF, 2)), n);
                        break;
                    case 2: n = noise::cascade_noisy(n, testgen::noisy_amplifier(r, kF)); break;
                    case 3:
                        n = noise::series_feedback(n, cplx(testgen::log_uniform(r, 0.1, 20), testgen::uniform(r, -50, 50)));
                        break;
                    case 4:
                        n = noise::from_impedance_form(kF, net::convert(n.net(), Repr::Z).matrix(),
                                                       noise::chain_to_impedance_corr(n));
                        break;
                    default:
                        n = noise::from_admittance_form(kF, net::convert(n.net(), Repr::Y).matrix(),
                                                        noise::chain_to_admittance_corr(n));
                        break;
                }
            } catch (const Error&) {
                continue;  // transformation undefined for this network, draw another
            }
            ++len;
            ++steps;
            psd_fail += !noise::is_hermitian_psd(n.corr(), 1e-12);
        }
    }
    return {round_trip < 1e-10 && assoc < 1e-9 && psd_fail == 0,
            "round trip " + sci(round_trip) + ", associativity " + sci(assoc) + ", " + std::to_string(psd_fail) + "/" +
                std::to_string(steps) + " non-PSD steps"};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double limit_s;
        std::function<Verdict()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "noise measure consistency", 1, noise_measure_consistency},
        {2, "temperature/NF pairings", 1, temperature_nf_pairs},
        {3, "gain-noise excess and compare", 1, gain_noise_excess_and_compare},
        {4, "T_Nmin invariance under lossless feedforward embedding", 30, special_invariant},
        {5, "min noise measure invariance under lossless embedding", 60, general_invariant},
        {6, "emitter degeneration lowers T_Nmin", 30, feedback_lowering},
        {7, "matched attenuator noise figure", 1, attenuator_oracle},
        {8, "optimizer vs grid oracle", 300, oracle_equivalence},
        {9, "topology B beats topology A", 600, trend},
        {10, "numerical hygiene", 30, numerical_hygiene},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v{false, ""};
        try {
            v = c.run();
        } catch (const std::exception& e) {
            v = {false, std::string("threw: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool ok = v.ok && secs < c.limit_s;
        failures += !ok;
        std::cout << (ok ? "PASS " : "FAIL ") << c.id << " " << c.name << ": " << v.detail << " [" << num(secs, 2)
                  << " s]" << std::endl;
    }
    return failures;
}
