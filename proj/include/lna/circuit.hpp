#pragma once

// Small nodal-analysis solver for linear noisy circuits. Used to build the
// transistor two-ports and, in tests, as an independent route for composite
// circuits. Node 0 is ground; every port is referenced to ground.

#include <vector>

#include "lna/noisecore.hpp"

namespace lna::dev {

class NoisyCircuit {
public:
    int add_node() { return ++nodes_; }
    int node_count() const { return nodes_; }

    // Two-terminal admittance y between a and b. If noise_temp > 0 it carries
    // thermal noise 2 k T Re{y} (see noisecore for the unit convention).
    void admittance(int a, int b, cplx y, double noise_temp = 0.0);
    void impedance(int a, int b, cplx z, double noise_temp = 0.0);

    // Current g * (V(cp) - V(cn)) flowing out of node `from` into node `to`
    // through the source.
    void vccs(int from, int to, int cp, int cn, cplx g);

    // Independent noise current between a and b with the given correlation
    // value (half the one-sided PSD, A^2/Hz).
    void noise_current(int a, int b, double density);

    // Two-port seen between (p1, ground) and (p2, ground).
    noise::NoisyTwoPort two_port(int p1, int p2, double freq, double z_ref = kDefaultZRef) const;

private:
    struct Stamp {
        int r, c;
        cplx v;
    };
    struct Source {
        int a, b;
        double density;
    };
    int nodes_ = 0;
    std::vector<Stamp> stamps_;
    std::vector<Source> sources_;

    void stamp(int r, int c, cplx v) {
        if (r > 0 && c > 0) stamps_.push_back({r, c, v});
    }
};

}  // namespace lna::dev
