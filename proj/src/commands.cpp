#include <filesystem>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "lna/cli.hpp"
#include "lna/error.hpp"
#include "lna/io.hpp"
#include "lna/parallel.hpp"

namespace lna::cli {

using io::fmt_fixed;
using topo::LnaSizing;
using topo::Topology;

namespace {

std::string join(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorKind::Io, "cannot create output directory '" + dir + "': " + ec.message());
}

template <class Writer>
void write_file(const std::string& path, Writer&& w) {
    std::ostringstream os;
    w(os);
    io::atomic_write(path, os.str());
}

double round_to(double x, int decimals) {
    return std::stod(fmt_fixed(x, decimals));
}

std::string sizing_line(const LnaSizing& s) {
    std::string line;
    for (int i = 0; i < topo::kSizingFields; ++i) {
        if (i) line += ", ";
        line += topo::component_key(s.topology, i);
        line += " = " + io::fmt_component(topo::sizing_field(s, i), topo::is_inductor_field(i));
    }
    return line;
}

void analyze_into(const RunConfig& cfg, const topo::DeviceConfig& dc, const LnaSizing& sizing,
                  const std::string& out_dir, std::ostream& out) {
    const net::FrequencyGrid grid = cfg.grid();
    const auto& spec = cfg.spec;
    const auto report = topo::analyze(sizing, dc, grid, spec.z_source, spec.z_load);

    const auto& f = grid.points();
    std::vector<net::TwoPort> lna, imn, an, omn;
    for (std::size_t i = 0; i < f.size(); ++i)
        for (auto* v : {&lna, &imn, &an, &omn}) v->push_back(net::TwoPort::identity(f[i]));
    parallel_for(f.size(), [&](std::size_t i) {
        const auto c = topo::build_lna(sizing, dc, f[i], spec.z_source, spec.z_load);
        lna[i] = c.composite().net();
        imn[i] = c.imn.net();
        an[i] = c.an.net();
        omn[i] = c.omn.net();
    });

    ensure_dir(out_dir);
    const std::string tag = topo::to_string(sizing.topology);
    write_file(join(out_dir, "report_" + tag + ".csv"), [&](std::ostream& os) { topo::write_report_csv(os, report); });
    const std::pair<const char*, const std::vector<net::TwoPort>*> blocks[] = {
        {"lna_", &lna}, {"imn_", &imn}, {"an_", &an}, {"omn_", &omn}};
    for (const auto& [prefix, sweep] : blocks)
        write_file(join(out_dir, prefix + tag + ".s2p"), [&](std::ostream& os) { net::write_touchstone(os, *sweep); });

    topo::ReportRow at_f0;
    try {
        at_f0 = topo::analyze_point(topo::build_lna(sizing, dc, spec.f0, spec.z_source, spec.z_load));
    } catch (const Error& e) {
        throw Error(e.kind(), e.detail() + " at " + io::fmt_double(spec.f0) + " Hz");
    }
    out << summary_line(sizing.topology, at_f0) << '\n';
}

}  // namespace

SweepKind sweep_kind_from_string(const std::string& s) {
    if (s == "tnmin_vs_j") return SweepKind::TnminVsJ;
    if (s == "tn_vs_freq") return SweepKind::TnVsFreq;
    if (s == "sparams_vs_freq") return SweepKind::SparamsVsFreq;
    throw Error(ErrorKind::InvalidArgument,
                "unknown sweep kind '" + s + "' (expected tnmin_vs_j, tn_vs_freq or sparams_vs_freq)");
}

std::string summary_line(Topology t, const topo::ReportRow& r) {
    const double s21 = round_to(r.s_db(1, 0), 2);
    const double nf = round_to(r.nf_db, 2);
    std::ostringstream os;
    os << "topology " << topo::to_string(t) << " at " << fmt_fixed(r.freq * 1e-9, 2) << " GHz: S21 = " << fmt_fixed(s21, 2)
       << " dB, NF = " << fmt_fixed(nf, 2) << " dB, eps_GN = " << fmt_fixed(s21 - nf, 2)
       << " dB, MT0 = " << fmt_fixed(r.mt0, 1) << " K";
    return os.str();
}

void cmd_analyze(const RunConfig& cfg, const LnaSizing& sizing, const std::string& out_dir, std::ostream& out) {
    analyze_into(cfg, cfg.devices, sizing, out_dir, out);
}

void cmd_sweep(const RunConfig& cfg, SweepKind kind, const LnaSizing& sizing, const std::string& out_dir,
               std::ostream& out) {
    const std::string tag = topo::to_string(sizing.topology);
    if (kind == SweepKind::TnminVsJ) {
        const auto curve = dev::sweep_tnmin_vs_j(cfg.devices.hbt, cfg.j_grid(), cfg.spec.f0);
        ensure_dir(out_dir);
        write_file(join(out_dir, "tnmin_vs_j.csv"), [&](std::ostream& os) { dev::write_tnmin_csv(os, curve); });
        const auto& best = curve[dev::argmin_tnmin(curve)];
        out << "T_Nmin minimum " << fmt_fixed(best.t_nmin, 1) << " K (NF_min " << fmt_fixed(best.nf_min_db, 2)
            << " dB) at J = " << fmt_fixed(best.j, 2) << " mA/um^2\n";
        return;
    }
    const net::FrequencyGrid grid = cfg.grid();
    const auto& f = grid.points();
    std::vector<noise::NoiseParamPoint> np(f.size());
    std::vector<net::TwoPort> sp(f.size(), net::TwoPort::identity(f.front()));
    parallel_for(f.size(), [&](std::size_t i) {
        try {
            const auto lna = topo::build_lna(sizing, cfg.devices, f[i], cfg.spec.z_source, cfg.spec.z_load).composite();
            if (kind == SweepKind::TnVsFreq)
                np[i] = {f[i], noise::tnmin_of(lna)};
            else
                sp[i] = lna.net();
        } catch (const Error& e) {
            throw Error(e.kind(), e.detail() + " at " + io::fmt_double(f[i]) + " Hz");
        }
    });
    ensure_dir(out_dir);
    if (kind == SweepKind::TnVsFreq) {
        write_file(join(out_dir, "noise_vs_freq_" + tag + ".csv"), [&](std::ostream& os) { noise::write_noise_csv(os, np); });
        out << "wrote " << f.size() << " noise-parameter rows for topology " << tag << '\n';
    } else {
        write_file(join(out_dir, "sparams_" + tag + ".s2p"), [&](std::ostream& os) { net::write_touchstone(os, sp); });
        out << "wrote " << f.size() << " S-parameter rows for topology " << tag << '\n';
    }
}

design::DesignOutcome cmd_design(const RunConfig& cfg, design::Method method, Topology topology,
                                 const std::string& out_dir, std::ostream& out) {
    using design::Method;
    design::DesignOutcome o;
    if (method == Method::MPmN) {
        if (topology != Topology::A)
            throw Error(ErrorKind::InvalidTopologyTag, "method mpmn designs topology A (inductive degeneration)");
        o = design::design_mpmn(cfg.spec, cfg.devices, LnaSizing::default_a());
    } else if (method == Method::MPmCN) {
        if (topology != Topology::B)
            throw Error(ErrorKind::InvalidTopologyTag, "method mpmcn designs topology B (four-element input network)");
        std::optional<design::DesignOutcome> reference;
        try {
            reference = design::design_mpmn(cfg.spec, cfg.devices, LnaSizing::default_a());
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::Infeasible) throw;
        }
        o = design::design_mpmcn(cfg.spec, cfg.devices, LnaSizing::default_b(), {}, reference ? &*reference : nullptr);
    } else {
        throw Error(ErrorKind::InvalidArgument, "design method must be mpmn or mpmcn");
    }

    ensure_dir(out_dir);
    write_file(join(out_dir, "outcome_" + design::to_string(method) + ".txt"),
               [&](std::ostream& os) { design::write_outcome(os, o); });
    out << design::to_string(method) << " sizing: " << sizing_line(o.sizing) << '\n';
    if (o.area_scale != 1.0) out << "emitter area trimmed by a factor " << io::fmt_sig(o.area_scale, 4) << '\n';
    if (o.non_improving) out << "NonImproving: cascade T_N exceeds the mpmn design\n";
    analyze_into(cfg, design::outcome_devices(o, cfg.devices), o.sizing, out_dir, out);
    return o;
}

Comparison compare(const design::DesignOutcome& a, const design::DesignOutcome& b) {
    if (std::abs(a.f0 - b.f0) > 1e-9 * std::max(a.f0, b.f0))
        throw Error(ErrorKind::InvalidArgument, "outcomes were designed at different frequencies (" +
                                                    io::fmt_double(a.f0) + " Hz vs " + io::fmt_double(b.f0) + " Hz)");
    const auto& x = a.achieved;
    const auto& y = b.achieved;
    return {x.s21_db, y.s21_db, x.nf_db, y.nf_db, x.mt0_k, y.mt0_k, x.s21_db - x.nf_db, y.s21_db - y.nf_db};
}

void cmd_compare(const std::string& path_a, const std::string& path_b, std::ostream& out) {
    auto load = [](const std::string& p) {
        std::istringstream is(io::read_file(p));
        try {
            return design::read_outcome(is);
        } catch (const Error& e) {
            throw Error(e.kind(), p + ": " + e.detail());
        }
    };
    const auto a = load(path_a);
    const auto b = load(path_b);
    const Comparison c = compare(a, b);

    auto row = [&](const char* name, double va, double vb, double d, int decimals) {
        out << std::left << std::setw(14) << name << std::right << std::setw(10) << fmt_fixed(va, decimals)
            << std::setw(10) << fmt_fixed(vb, decimals) << std::setw(10) << (d >= 0 ? "+" : "") + fmt_fixed(d, decimals)
            << '\n';
    };
    out << std::left << std::setw(14) << "metric" << std::right << std::setw(10) << "a" << std::setw(10) << "b"
        << std::setw(10) << "b - a" << '\n';
    row("S21 [dB]", c.s21_a, c.s21_b, c.d_s21(), 2);
    row("NF [dB]", c.nf_a, c.nf_b, c.d_nf(), 2);
    row("MT0 [K]", c.mt0_a, c.mt0_b, c.d_mt0(), 1);
    row("eps_GN [dB]", c.eps_a, c.eps_b, c.d_eps(), 2);
    for (const auto& [label, eps] : {std::pair{"a", c.eps_a}, std::pair{"b", c.eps_b}})
        if (eps < 0.0)
            out << "warning: " << label
                << " has eps_GN < 0 dB (NF above gain); it may degrade the receiver and not justify its cost\n";
}

// ---------------------------------------------------------------------------

int run(const Invocation& inv, std::ostream& out, std::ostream& err) {
    try {
        if (inv.command == "compare") {
            if (inv.positional.size() != 2) {
                err << "compare needs two outcome files\n";
                return kConfigError;
            }
            cmd_compare(inv.positional[0], inv.positional[1], out);
            return kOk;
        }
        if (inv.command != "analyze" && inv.command != "sweep" && inv.command != "design") {
            err << "unknown command '" << inv.command << "'\n";
            return kConfigError;
        }
        if (!inv.config) {
            err << "--config is required for " << inv.command << '\n';
            return kConfigError;
        }
        RunConfig cfg = load_config(*inv.config);
        const std::string out_dir = inv.out_dir ? *inv.out_dir : cfg.output_dir;
        const Topology requested = topo::topology_from_string(inv.topology);
        resolve_bias(cfg);

        if (inv.command == "design") {
            const design::Method m = design::method_from_string(inv.method);
            const Topology t = inv.topology_given ? requested : (m == design::Method::MPmN ? Topology::A : Topology::B);
            cmd_design(cfg, m, t, out_dir, out);
            return kOk;
        }

        LnaSizing sizing = requested == Topology::A ? LnaSizing::default_a() : LnaSizing::default_b();
        if (inv.sizing) {
            const std::string text = io::read_file(*inv.sizing);
            std::istringstream is(text);
            sizing = design::read_sizing(is);
            // Outcome files carry the emitter-area trim they were designed with.
            std::istringstream again(text);
            for (const auto& kv : io::parse_key_values(again))
                if (kv.key == "area_scale") cfg.devices.hbt.emitter_area *= io::parse_quantity(kv.value);
            if (inv.topology_given && sizing.topology != requested)
                throw Error(ErrorKind::InvalidTopologyTag, "sizing file is topology " + topo::to_string(sizing.topology) +
                                                               " but --topology " + inv.topology + " was given");
        }
        if (inv.command == "analyze")
            cmd_analyze(cfg, sizing, out_dir, out);
        else
            cmd_sweep(cfg, sweep_kind_from_string(inv.kind), sizing, out_dir, out);
        return kOk;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kNumericError;
    }
}

}  // namespace lna::cli
