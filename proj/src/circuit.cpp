#include "lna/circuit.hpp"

#include <Eigen/Dense>

namespace lna::dev {

using noise::kBoltzmann;

void NoisyCircuit::admittance(int a, int b, cplx y, double noise_temp) {
    stamp(a, a, y);
    stamp(b, b, y);
    stamp(a, b, -y);
    stamp(b, a, -y);
    if (noise_temp > 0.0 && y.real() > 0.0) noise_current(a, b, 2.0 * kBoltzmann * noise_temp * y.real());
}

void NoisyCircuit::impedance(int a, int b, cplx z, double noise_temp) {
    if (std::abs(z) < kSingularTol) throw Error(ErrorKind::SingularMatrix, "zero impedance branch");
    admittance(a, b, 1.0 / z, noise_temp);
}

void NoisyCircuit::vccs(int from, int to, int cp, int cn, cplx g) {
    stamp(from, cp, g);
    stamp(from, cn, -g);
    stamp(to, cp, -g);
    stamp(to, cn, g);
}

void NoisyCircuit::noise_current(int a, int b, double density) {
    if (density > 0.0) sources_.push_back({a, b, density});
}

noise::NoisyTwoPort NoisyCircuit::two_port(int p1, int p2, double freq, double z_ref) const {
    const int n = nodes_;
    Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(n, n);
    for (const auto& s : stamps_) y(s.r - 1, s.c - 1) += s.v;

    // Reorder: ports first, then internal nodes.
    std::vector<int> order{p1 - 1, p2 - 1};
    for (int i = 0; i < n; ++i)
        if (i != p1 - 1 && i != p2 - 1) order.push_back(i);
    Eigen::MatrixXcd yr(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) yr(i, j) = y(order[i], order[j]);

    const int m = n - 2;
    const Eigen::MatrixXcd ypp = yr.topLeftCorner(2, 2);
    Mat2 y2 = ypp;
    Eigen::MatrixXcd gain = Eigen::MatrixXcd::Zero(2, m);  // Y_pi * Y_ii^-1
    if (m > 0) {
        const Eigen::MatrixXcd ypi = yr.topRightCorner(2, m);
        const Eigen::MatrixXcd yip = yr.bottomLeftCorner(m, 2);
        const Eigen::MatrixXcd yii = yr.bottomRightCorner(m, m);
        Eigen::PartialPivLU<Eigen::MatrixXcd> lu(yii);
        if (std::abs(lu.determinant()) == 0.0)
            throw Error(ErrorKind::SingularMatrix, "floating internal node in circuit");
        y2 = ypp - ypi * lu.solve(yip);
        gain = yii.transpose().partialPivLu().solve(ypi.transpose()).transpose();  // (Y_ii^-T Y_pi^T)^T = Y_pi Y_ii^-1
    }

    // Port short-circuit currents per source: I_p = Y_pi Y_ii^-1 J_int - J_p.
    std::vector<int> pos(n);
    for (int i = 0; i < n; ++i) pos[order[i]] = i;
    Mat2 cy = Mat2::Zero();
    for (const auto& src : sources_) {
        Eigen::VectorXcd j = Eigen::VectorXcd::Zero(n);  // in reordered indexing
        if (src.b > 0) j(pos[src.b - 1]) += 1.0;
        if (src.a > 0) j(pos[src.a - 1]) -= 1.0;
        Eigen::Vector2cd h = -j.head(2);
        if (m > 0) h += gain * j.tail(m);
        cy += src.density * (h * h.adjoint());
    }
    return noise::from_admittance_form(freq, y2, cy, z_ref);
}

}  // namespace lna::dev
