#include <sstream>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lna/cli.hpp"
#include "lna/design.hpp"
#include "lna/noisecore.hpp"
#include "lna/topology.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace lna;

namespace {

py::dict row_dict(const topo::ReportRow& r) {
    return py::dict("freq_hz"_a = r.freq, "s"_a = r.s, "nf_db"_a = r.nf_db, "tn_k"_a = r.t_n,
                    "tnmin_k"_a = r.t_nmin, "ga"_a = r.g_a, "gt"_a = r.g_t, "gmsg_an"_a = r.g_msg_an, "mu"_a = r.mu,
                    "mt0_k"_a = r.mt0, "eps_gn_db"_a = r.eps_gn_db, "ga_imn"_a = r.g_a_imn,
                    "z_out_imn"_a = r.z_out_imn, "z_on_an"_a = r.z_on_an, "ga_an_omn"_a = r.g_a_an_omn);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Noisy two-port algebra and cascode LNA matching";

    static py::exception<Error> lna_error(m, "LnaError");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object err = lna_error;
            py::object exc = err(e.what());
            exc.attr("kind") = std::string(to_string(e.kind()));
            PyErr_SetObject(err.ptr(), exc.ptr());
        }
    });

    py::enum_<net::Repr>(m, "Repr")
        .value("S", net::Repr::S)
        .value("Z", net::Repr::Z)
        .value("Y", net::Repr::Y)
        .value("ABCD", net::Repr::ABCD);

    py::class_<net::TwoPort>(m, "TwoPort")
        .def(py::init<double, const Mat2&, net::Repr, double>(), "freq"_a, "matrix"_a, "repr"_a,
             "z_ref"_a = kDefaultZRef)
        .def_property_readonly("freq", &net::TwoPort::freq)
        .def_property_readonly("matrix", &net::TwoPort::matrix)
        .def_property_readonly("repr", &net::TwoPort::repr)
        .def_property_readonly("z_ref", &net::TwoPort::z_ref)
        .def("to", [](const net::TwoPort& t, net::Repr r) { return net::convert(t, r); })
        .def_static("identity", &net::TwoPort::identity, "freq"_a, "z_ref"_a = kDefaultZRef);

    m.def("cascade", &net::cascade);
    m.def("available_gain", &net::available_gain, "net"_a, "z_s"_a);
    m.def("mu_stability", &net::mu_stability);

    py::class_<noise::NoiseParameters>(m, "NoiseParameters")
        .def(py::init([](cplx z_on, double r_n, double t_nmin) { return noise::NoiseParameters{z_on, r_n, t_nmin}; }),
             "z_on"_a, "r_n"_a, "t_nmin"_a)
        .def_readwrite("z_on", &noise::NoiseParameters::z_on)
        .def_readwrite("r_n", &noise::NoiseParameters::r_n)
        .def_readwrite("t_nmin", &noise::NoiseParameters::t_nmin)
        .def_property_readonly("f_min", &noise::NoiseParameters::f_min);

    py::class_<noise::NoisyTwoPort>(m, "NoisyTwoPort")
        .def(py::init<net::TwoPort, const Mat2&>(), "net"_a, "corr"_a)
        .def_static("noiseless", &noise::NoisyTwoPort::noiseless)
        .def_static("passive", &noise::passive_thermal_noise, "net"_a, "t_phys"_a = noise::kT0)
        .def_property_readonly("net", &noise::NoisyTwoPort::net)
        .def_property_readonly("corr", &noise::NoisyTwoPort::corr)
        .def_property_readonly("freq", &noise::NoisyTwoPort::freq)
        .def("noise_temperature", py::overload_cast<const noise::NoisyTwoPort&, cplx>(&noise::noise_temperature),
             "z_s"_a)
        .def("tnmin", &noise::tnmin_of);

    m.def("cascade_noisy", &noise::cascade_noisy);
    m.def("noise_measure", [](double t_n, double g_a) { return noise::noise_measure(t_n, g_a).mt0; }, "t_n"_a,
          "g_a"_a);
    m.def("min_noise_measure", [](const noise::NoisyTwoPort& n) {
        const auto r = noise::min_noise_measure(n);
        return py::dict("mt0_k"_a = r.mt0, "z_s"_a = r.z_s, "tn_k"_a = r.t_n, "ga"_a = r.g_a);
    });
    m.def("nf_db", &noise::nf_db);
    m.def("t_from_nf", &noise::t_from_nf);

    py::enum_<topo::Topology>(m, "Topology").value("A", topo::Topology::A).value("B", topo::Topology::B);

    py::class_<topo::LnaSizing>(m, "Sizing")
        .def_static("default_a", &topo::LnaSizing::default_a)
        .def_static("default_b", &topo::LnaSizing::default_b)
        .def_readwrite("topology", &topo::LnaSizing::topology)
        .def_readwrite("c1", &topo::LnaSizing::c1)
        .def_readwrite("le_or_l1", &topo::LnaSizing::le_or_l1)
        .def_readwrite("c2", &topo::LnaSizing::c2)
        .def_readwrite("lb_or_l2", &topo::LnaSizing::lb_or_l2)
        .def_readwrite("lc", &topo::LnaSizing::lc)
        .def_readwrite("cc", &topo::LnaSizing::cc)
        .def_readwrite("co", &topo::LnaSizing::co)
        .def("validate", &topo::LnaSizing::validate)
        .def("components", [](const topo::LnaSizing& s) {
            py::dict d;
            for (int i = 0; i < topo::kSizingFields; ++i)
                d[topo::component_key(s.topology, i)] = topo::sizing_field(s, i);
            return d;
        });

    py::class_<topo::DeviceConfig>(m, "DeviceConfig")
        .def(py::init<>())
        .def_readwrite("j", &topo::DeviceConfig::j)
        .def_property(
            "lossless", [](const topo::DeviceConfig& d) { return d.passives.lossless; },
            [](topo::DeviceConfig& d, bool v) { d.passives.lossless = v; })
        .def_property(
            "emitter_area", [](const topo::DeviceConfig& d) { return d.hbt.emitter_area; },
            [](topo::DeviceConfig& d, double v) { d.hbt.emitter_area = v; });

    m.def(
        "analyze",
        [](const topo::LnaSizing& s, const topo::DeviceConfig& dc, std::vector<double> freqs, cplx z_s, cplx z_l) {
            const auto rep = topo::analyze(s, dc, net::FrequencyGrid(std::move(freqs)), z_s, z_l);
            py::list rows;
            for (const auto& r : rep.rows) rows.append(row_dict(r));
            return rows;
        },
        "sizing"_a, "devices"_a = topo::DeviceConfig{}, "freqs"_a = std::vector<double>{60e9},
        "z_s"_a = cplx(kDefaultZRef), "z_l"_a = cplx(kDefaultZRef));

    py::class_<design::DesignSpec>(m, "DesignSpec")
        .def(py::init<>())
        .def_readwrite("f0", &design::DesignSpec::f0)
        .def_readwrite("z_source", &design::DesignSpec::z_source)
        .def_readwrite("z_load", &design::DesignSpec::z_load)
        .def_readwrite("match_tolerance_db", &design::DesignSpec::match_tolerance_db)
        .def_readwrite("seed", &design::DesignSpec::seed)
        .def_readwrite("area_trim", &design::DesignSpec::area_trim);

    py::class_<design::DesignOutcome>(m, "DesignOutcome")
        .def_readonly("sizing", &design::DesignOutcome::sizing)
        .def_readonly("f0", &design::DesignOutcome::f0)
        .def_readonly("area_scale", &design::DesignOutcome::area_scale)
        .def_readonly("cascade_tn", &design::DesignOutcome::cascade_tn)
        .def_readonly("non_improving", &design::DesignOutcome::non_improving)
        .def_property_readonly("method", [](const design::DesignOutcome& o) { return design::to_string(o.method); })
        .def_property_readonly("achieved",
                               [](const design::DesignOutcome& o) {
                                   const auto& a = o.achieved;
                                   return py::dict("s21_db"_a = a.s21_db, "nf_db"_a = a.nf_db, "mt0_k"_a = a.mt0_k,
                                                   "eps_gn_db"_a = a.eps_gn_db, "s11_db"_a = a.s11_db,
                                                   "s22_db"_a = a.s22_db);
                               })
        .def("__str__", &design::outcome_to_string)
        .def_static("parse", [](const std::string& text) {
            std::istringstream is(text);
            return design::read_outcome(is);
        });

    m.def(
        "design_mpmn",
        [](const design::DesignSpec& spec, const topo::DeviceConfig& dc) { return design::design_mpmn(spec, dc); },
        "spec"_a = design::DesignSpec{}, "devices"_a = topo::DeviceConfig{},
        py::call_guard<py::gil_scoped_release>());
    m.def(
        "design_mpmcn",
        [](const design::DesignSpec& spec, const topo::DeviceConfig& dc) { return design::design_mpmcn(spec, dc); },
        "spec"_a = design::DesignSpec{}, "devices"_a = topo::DeviceConfig{},
        py::call_guard<py::gil_scoped_release>());

    // Same semantics as the command-line tool; returns (exit code, stdout, stderr).
    m.def(
        "run",
        [](const std::string& command, std::optional<std::string> config, std::optional<std::string> sizing,
           std::optional<std::string> topology, std::string method, std::optional<std::string> out_dir,
           std::vector<std::string> files) {
            cli::Invocation inv;
            inv.command = command;
            inv.config = std::move(config);
            inv.sizing = std::move(sizing);
            if (topology) {
                inv.topology = *topology;
                inv.topology_given = true;
            }
            inv.method = std::move(method);
            inv.out_dir = std::move(out_dir);
            inv.positional = std::move(files);
            std::ostringstream out, err;
            const int code = cli::run(inv, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        "command"_a, "config"_a = py::none(), "sizing"_a = py::none(), "topology"_a = py::none(),
        "method"_a = "mpmcn", "out"_a = py::none(), "files"_a = std::vector<std::string>{});
}
