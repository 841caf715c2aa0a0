#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <thread>

#include "lna/cli.hpp"
#include "lna/error.hpp"
#include "lna/io.hpp"
#include "lna/parallel.hpp"

using namespace lna;
using namespace lna::cli;
namespace fs = std::filesystem;

namespace {

class TempDir {
public:
    TempDir() {
        static int counter = 0;
        path_ = fs::temp_directory_path() / ("lna_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    std::string file(const std::string& name) const { return (path_ / name).string(); }
    std::string write(const std::string& name, const std::string& text) const {
        std::ofstream(file(name)) << text;
        return file(name);
    }

private:
    fs::path path_;
};

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run_cmd(Invocation inv) {
    std::ostringstream out, err;
    const int code = run(inv, out, err);
    return {code, out.str(), err.str()};
}

Invocation make(const std::string& command, const std::string& config, const std::string& out_dir) {
    Invocation inv;
    inv.command = command;
    inv.config = config;
    inv.out_dir = out_dir;
    return inv;
}

// Small grids keep the commands quick.
const char* kConfig =
    "# test run\n"
    "grid.start_hz = 50e9\n"
    "grid.stop_hz = 70e9\n"
    "grid.points = 5\n"
    "sweep.j_start = 1\n"
    "sweep.j_stop = 15\n"
    "sweep.j_points = 57\n";

std::string metrics_outcome(double s21, double nf, double mt0, double eps) {
    std::ostringstream os;
    os << "method = mpmn\nf0_hz = 60e9\ns21_db = " << s21 << "\nnf_db = " << nf << "\nmt0_k = " << mt0
       << "\neps_gn_db = " << eps << "\n";
    return os.str();
}

std::vector<std::string> tokens(const std::string& line) {
    std::istringstream is(line);
    std::vector<std::string> t;
    std::string w;
    while (is >> w) t.push_back(w);
    return t;
}

std::string line_starting(const std::string& text, const std::string& prefix) {
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line))
        if (line.rfind(prefix, 0) == 0) return line;
    return "";
}

}  // namespace

TEST(Config, ParsesSectionsCommentsAndBounds) {
    std::istringstream is(
        "# comment\n"
        "hbt.r_b = 9.5   # trailing\n"
        "\n"
        "bias.j = 7.0\n"
        "passives.lossless = true\n"
        "design.z_source = 50-5j\n"
        "design.bounds.le = 10pH, 300pH\n"
        "output.dir = results\n");
    const RunConfig c = parse_config(is);
    EXPECT_EQ(c.devices.hbt.r_b, 9.5);
    EXPECT_EQ(c.devices.j, 7.0);
    EXPECT_FALSE(c.bias_auto);
    EXPECT_TRUE(c.devices.passives.lossless);
    EXPECT_EQ(c.spec.z_source, cplx(50.0, -5.0));
    EXPECT_NEAR(c.spec.bounds[1].min, 10e-12, 1e-24);
    EXPECT_NEAR(c.spec.bounds[1].max, 300e-12, 1e-24);
    EXPECT_EQ(c.output_dir, "results");
}

TEST(Config, UnknownKeyNamesLine) {
    std::istringstream is("hbt.r_b = 9\n# c\nhbt.rb = 9\n");
    try {
        parse_config(is);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Parse);
        EXPECT_NE(e.detail().find("line 3"), std::string::npos) << e.detail();
        EXPECT_NE(e.detail().find("hbt.rb"), std::string::npos);
    }
}

TEST(Config, BadValuesNameLine) {
    for (const char* text : {"hbt.r_b = -1\n", "grid.points = 2.5\n", "passives.lossless = maybe\n",
                             "design.z_source = 50+j\n", "hbt.c_mu = 1.5 fF\n"}) {
        std::istringstream is(std::string("# x\n") + text);
        try {
            parse_config(is);
            FAIL() << text;
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::Parse);
            EXPECT_NE(e.detail().find("line 2"), std::string::npos) << e.detail();
        }
    }
    std::istringstream missing_eq("hbt.r_b 9\n");
    EXPECT_THROW(parse_config(missing_eq), Error);
    std::istringstream repeat("hbt.r_b = 9\nhbt.r_b = 8\n");
    EXPECT_THROW(parse_config(repeat), Error);
}

TEST(Config, Impedances) {
    EXPECT_EQ(parse_impedance("50"), cplx(50, 0));
    EXPECT_EQ(parse_impedance("50+10j"), cplx(50, 10));
    EXPECT_EQ(parse_impedance("20 - 40j"), cplx(20, -40));
    EXPECT_EQ(parse_impedance("-5j"), cplx(0, -5));
    EXPECT_THROW(parse_impedance("abc"), Error);
    EXPECT_THROW(parse_impedance("5+3"), Error);
}

TEST(ExitCodes, Contract) {
    EXPECT_EQ(exit_code_for(ErrorKind::Parse), 2);
    EXPECT_EQ(exit_code_for(ErrorKind::Io), 2);
    EXPECT_EQ(exit_code_for(ErrorKind::Infeasible), 4);
    EXPECT_EQ(exit_code_for(ErrorKind::SingularMatrix), 3);
    EXPECT_EQ(exit_code_for(ErrorKind::NoAmplifyingRegion), 3);
}

TEST(Analyze, WritesFilesAndSummary) {
    TempDir d;
    const std::string cfg = d.write("run.cfg", kConfig);
    const Result r = run_cmd(make("analyze", cfg, d.file("out")));
    ASSERT_EQ(r.code, 0) << r.err;
    for (const char* f : {"report_A.csv", "lna_A.s2p", "imn_A.s2p", "an_A.s2p", "omn_A.s2p"})
        EXPECT_TRUE(fs::exists(d.file("out/") + f)) << f;
    const std::regex line(
        R"(topology A at 60\.00 GHz: S21 = -?\d+\.\d\d dB, NF = \d+\.\d\d dB, eps_GN = -?\d+\.\d\d dB, MT0 = -?\d+\.\d K\n)");
    EXPECT_TRUE(std::regex_match(r.out, line)) << r.out;

    std::ifstream report(d.file("out/report_A.csv"));
    EXPECT_EQ(topo::read_report_csv(report).size(), 5u);
    std::ifstream s2p(d.file("out/lna_A.s2p"));
    EXPECT_EQ(net::read_touchstone(s2p).size(), 5u);
}

TEST(Analyze, SummaryEpsIsDifferenceOfPrintedValues) {
    TempDir d;
    const std::string cfg = d.write("run.cfg", kConfig);
    for (const char* topo : {"A", "B"}) {
        Invocation inv = make("analyze", cfg, d.file("out"));
        inv.topology = topo;
        inv.topology_given = true;
        const Result r = run_cmd(inv);
        ASSERT_EQ(r.code, 0) << r.err;
        const auto t = tokens(r.out);
        // ... S21 = x dB, NF = y dB, eps_GN = z dB, MT0 = w K
        ASSERT_EQ(t.size(), 21u) << r.out;
        const double s21 = std::stod(t[7]), nf = std::stod(t[11]), eps = std::stod(t[15]);
        EXPECT_EQ(io::fmt_fixed(s21 - nf, 2), t[15]);
        EXPECT_NEAR(eps, s21 - nf, 1e-9);
    }
}

TEST(Analyze, EmptyGridIsConfigError) {
    TempDir d;
    const std::string cfg = d.write("run.cfg", std::string(kConfig) + "grid.points = 0\n");
    // grid.points appears twice: the repeat itself is a config error.
    EXPECT_EQ(run_cmd(make("analyze", cfg, d.file("out"))).code, 2);
    const std::string cfg2 = d.write("run2.cfg", "grid.points = 0\n");
    const Result r = run_cmd(make("analyze", cfg2, d.file("out")));
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("frequency grid empty"), std::string::npos) << r.err;
}

TEST(Analyze, ConfigErrorsExitTwo) {
    TempDir d;
    Result r = run_cmd(make("analyze", d.file("missing.cfg"), d.file("out")));
    EXPECT_EQ(r.code, 2);
    const std::string bad = d.write("bad.cfg", "grid.points = 5\nnope = 1\n");
    r = run_cmd(make("analyze", bad, d.file("out")));
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("line 2"), std::string::npos) << r.err;
    Invocation inv;
    inv.command = "analyze";
    EXPECT_EQ(run_cmd(inv).code, 2);
    inv.command = "explode";
    EXPECT_EQ(run_cmd(inv).code, 2);
}

TEST(Sweep, TnminVsJIsUnimodalAndRepeatable) {
    TempDir d;
    const std::string cfg = d.write("run.cfg", kConfig);
    Invocation inv = make("sweep", cfg, d.file("a"));
    ASSERT_EQ(run_cmd(inv).code, 0);
    inv.out_dir = d.file("b");
    ASSERT_EQ(run_cmd(inv).code, 0);
    const std::string a = io::read_file(d.file("a/tnmin_vs_j.csv"));
    EXPECT_EQ(a, io::read_file(d.file("b/tnmin_vs_j.csv")));
    std::istringstream is(a);
    const auto curve = dev::read_tnmin_csv(is);
    ASSERT_EQ(curve.size(), 57u);
    const std::size_t m = dev::argmin_tnmin(curve);
    for (std::size_t i = 1; i <= m; ++i) EXPECT_LE(curve[i].t_nmin, curve[i - 1].t_nmin);
    for (std::size_t i = m + 1; i < curve.size(); ++i) EXPECT_GE(curve[i].t_nmin, curve[i - 1].t_nmin);
}

TEST(Sweep, FrequencyKindsAndSinglePoint) {
    TempDir d;
    const std::string cfg = d.write("run.cfg", "grid.start_hz = 60e9\ngrid.points = 1\n");
    Invocation inv = make("sweep", cfg, d.file("out"));
    inv.kind = "tn_vs_freq";
    ASSERT_EQ(run_cmd(inv).code, 0);
    std::istringstream noise_csv(io::read_file(d.file("out/noise_vs_freq_A.csv")));
    EXPECT_EQ(noise::read_noise_csv(noise_csv).size(), 1u);
    inv.kind = "sparams_vs_freq";
    ASSERT_EQ(run_cmd(inv).code, 0);
    std::istringstream s2p(io::read_file(d.file("out/sparams_A.s2p")));
    EXPECT_EQ(net::read_touchstone(s2p).size(), 1u);
    inv.kind = "bogus";
    EXPECT_EQ(run_cmd(inv).code, 2);
}

TEST(Design, OutcomeHasAllComponentsAndReanalyzes) {
    TempDir d;
    const std::string cfg = d.write("run.cfg", kConfig);
    for (const char* method : {"mpmn", "mpmcn"}) {
        Invocation inv = make("design", cfg, d.file("out"));
        inv.method = method;
        const Result r = run_cmd(inv);
        ASSERT_EQ(r.code, 0) << r.err;
        const std::string path = d.file(std::string("out/outcome_") + method + ".txt");
        std::istringstream is(io::read_file(path));
        const auto o = design::read_outcome(is);
        ASSERT_TRUE(o.has_sizing);
        const topo::Topology t = o.sizing.topology;
        EXPECT_EQ(t, std::string(method) == "mpmn" ? topo::Topology::A : topo::Topology::B);
        std::istringstream keys(io::read_file(path));
        int components = 0;
        for (const auto& kv : io::parse_key_values(keys))
            for (int i = 0; i < topo::kSizingFields; ++i) components += kv.key == topo::component_key(t, i);
        EXPECT_EQ(components, 7);

        // Re-analyzing the written outcome reproduces the design summary.
        Invocation again = make("analyze", cfg, d.file("re"));
        again.sizing = path;
        const Result a = run_cmd(again);
        ASSERT_EQ(a.code, 0) << a.err;
        EXPECT_EQ(line_starting(a.out, "topology"), line_starting(r.out, "topology"));
        std::istringstream report(io::read_file(d.file("re/report_") + topo::to_string(t) + ".csv"));
        const auto rows = topo::read_report_csv(report);
        const auto& mid = rows[2];  // 60 GHz
        ASSERT_EQ(mid[0], 60e9);
        EXPECT_NEAR(mid[3], o.achieved.s21_db, 1e-9);
        EXPECT_NEAR(mid[9], o.achieved.nf_db, 1e-9);
        EXPECT_NEAR(mid[16], o.achieved.mt0_k, 1e-9 * o.achieved.mt0_k);
    }
}

TEST(Design, InfeasibleExitsFour) {
    TempDir d;
    const std::string cfg = d.write("run.cfg", std::string(kConfig) + "design.bounds.le = 0, 0\n");
    Invocation inv = make("design", cfg, d.file("out"));
    inv.method = "mpmn";
    const Result r = run_cmd(inv);
    EXPECT_EQ(r.code, 4);
    EXPECT_NE(r.err.find("best residual"), std::string::npos) << r.err;
}

TEST(Design, WrongTopologyForMethod) {
    TempDir d;
    const std::string cfg = d.write("run.cfg", kConfig);
    Invocation inv = make("design", cfg, d.file("out"));
    inv.method = "mpmn";
    inv.topology = "B";
    inv.topology_given = true;
    EXPECT_EQ(run_cmd(inv).code, 2);
}

TEST(Compare, ReportsDeltasAndRecomputedEps) {
    TempDir d;
    const std::string a = d.write("a.txt", metrics_outcome(4.4, 4.7, 897, 99.0));
    const std::string b = d.write("b.txt", metrics_outcome(8.4, 5.3, 821, -99.0));
    std::istringstream ia(io::read_file(a)), ib(io::read_file(b));
    const Comparison c = compare(design::read_outcome(ia), design::read_outcome(ib));
    EXPECT_NEAR(c.d_s21(), 4.0, 1e-12);
    EXPECT_NEAR(c.d_nf(), 0.6, 1e-12);
    EXPECT_NEAR(c.d_mt0(), -76.0, 1e-12);
    EXPECT_NEAR(c.d_eps(), 3.4, 1e-12);
    EXPECT_NEAR(c.eps_a, -0.3, 1e-12);
    EXPECT_NEAR(c.eps_b, 3.1, 1e-12);

    Invocation inv;
    inv.command = "compare";
    inv.positional = {a, b};
    const Result r = run_cmd(inv);
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(tokens(line_starting(r.out, "S21")), (std::vector<std::string>{"S21", "[dB]", "4.40", "8.40", "+4.00"}));
    EXPECT_EQ(tokens(line_starting(r.out, "NF")), (std::vector<std::string>{"NF", "[dB]", "4.70", "5.30", "+0.60"}));
    EXPECT_EQ(tokens(line_starting(r.out, "MT0")), (std::vector<std::string>{"MT0", "[K]", "897.0", "821.0", "-76.0"}));
    EXPECT_EQ(tokens(line_starting(r.out, "eps_GN")),
              (std::vector<std::string>{"eps_GN", "[dB]", "-0.30", "3.10", "+3.40"}));
    EXPECT_NE(line_starting(r.out, "warning: a"), "");
    EXPECT_EQ(line_starting(r.out, "warning: b"), "");
}

TEST(Compare, IdenticalOutcomesGiveZeroDeltas) {
    TempDir d;
    const std::string a = d.write("a.txt", metrics_outcome(8.4, 5.3, 821, 3.1));
    Invocation inv;
    inv.command = "compare";
    inv.positional = {a, a};
    const Result r = run_cmd(inv);
    ASSERT_EQ(r.code, 0);
    for (const char* row : {"S21", "NF", "MT0", "eps_GN"}) {
        const auto t = tokens(line_starting(r.out, row));
        ASSERT_EQ(t.size(), 5u);
        EXPECT_TRUE(t[4] == "+0.00" || t[4] == "+0.0") << t[4];
    }
}

TEST(Compare, FrequencyMismatchExitsTwo) {
    TempDir d;
    const std::string a = d.write("a.txt", metrics_outcome(4.4, 4.7, 897, 0));
    std::string other = metrics_outcome(8.4, 5.3, 821, 0);
    other.replace(other.find("60e9"), 4, "61e9");
    const std::string b = d.write("b.txt", other);
    Invocation inv;
    inv.command = "compare";
    inv.positional = {a, b};
    EXPECT_EQ(run_cmd(inv).code, 2);
    inv.positional = {a};
    EXPECT_EQ(run_cmd(inv).code, 2);
}

TEST(Threads, EnvironmentCapsWorkers) {
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    ::setenv("LNA_THREADS", "1", 1);
    EXPECT_EQ(worker_count(), 1u);
    ::setenv("LNA_THREADS", "garbage", 1);
    EXPECT_EQ(worker_count(), hw);
    ::setenv("LNA_THREADS", "1000", 1);
    EXPECT_EQ(worker_count(), hw);
    ::unsetenv("LNA_THREADS");
    EXPECT_EQ(worker_count(), hw);
}

TEST(Threads, ResultIndependentOfWorkerCount) {
    TempDir d;
    const std::string cfg = d.write("run.cfg", kConfig);
    ::setenv("LNA_THREADS", "1", 1);
    ASSERT_EQ(run_cmd(make("analyze", cfg, d.file("one"))).code, 0);
    ::unsetenv("LNA_THREADS");
    ASSERT_EQ(run_cmd(make("analyze", cfg, d.file("all"))).code, 0);
    EXPECT_EQ(io::read_file(d.file("one/report_A.csv")), io::read_file(d.file("all/report_A.csv")));
}

TEST(AtomicWrite, ReplacesWholeFile) {
    TempDir d;
    const std::string p = d.file("x.txt");
    io::atomic_write(p, "first version, longer\n");
    io::atomic_write(p, "second\n");
    EXPECT_EQ(io::read_file(p), "second\n");
    EXPECT_FALSE(fs::exists(p + ".tmp"));
    try {
        io::atomic_write(d.file("no/such/dir/x.txt"), "x");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Io);
    }
}

TEST(Formatting, PrintPrecision) {
    EXPECT_EQ(io::fmt_fixed(2.904, 2), "2.90");
    EXPECT_EQ(io::fmt_fixed(821.78, 1), "821.8");
    EXPECT_EQ(io::fmt_fixed(-0.001, 2), "0.00");
    EXPECT_EQ(io::fmt_component(113e-12, true), "113 pH");
    EXPECT_EQ(io::fmt_component(16e-15, false), "16.0 fF");
    EXPECT_EQ(io::fmt_component(1e-12, false), "1000 fF");
    EXPECT_EQ(io::fmt_component(5.4665e-15, false), "5.47 fF");
}
