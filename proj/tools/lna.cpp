#include <iostream>

#include <CLI11.hpp>

#include "lna/cli.hpp"

int main(int argc, char** argv) {
    lna::cli::Invocation inv;
    CLI::App app{"Noise and matching analysis for 60 GHz cascode LNAs"};
    app.add_option("command", inv.command, "analyze | sweep | design | compare")->required();
    app.add_option("files", inv.positional, "compare: two outcome files");
    std::string config, sizing, out_dir;
    auto* c = app.add_option("--config", config, "run configuration (key = value)");
    auto* s = app.add_option("--sizing", sizing, "sizing or outcome file (default: built-in sizing for the topology)");
    auto* t = app.add_option("--topology", inv.topology, "A or B");
    app.add_option("--method", inv.method, "mpmn | mpmcn")->check(CLI::IsMember({"mpmn", "mpmcn"}));
    app.add_option("--kind", inv.kind, "sweep: tnmin_vs_j | tn_vs_freq | sparams_vs_freq");
    auto* o = app.add_option("--out", out_dir, "output directory (default: output.dir)");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : lna::cli::kConfigError;
    }
    if (*c) inv.config = config;
    if (*s) inv.sizing = sizing;
    if (*o) inv.out_dir = out_dir;
    inv.topology_given = t->count() > 0;
    return lna::cli::run(inv, std::cout, std::cerr);
}
