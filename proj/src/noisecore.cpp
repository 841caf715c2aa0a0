#include "lna/noisecore.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "lna/io.hpp"
#include "lna/optimize.hpp"
#include "lna/parallel.hpp"

namespace lna::noise {

using net::Repr;
using net::TwoPort;

namespace {

Mat2 mat(cplx a, cplx b, cplx c, cplx d) {
    Mat2 m;
    m << a, b, c, d;
    return m;
}

// Balances the voltage (ohm) and current (siemens) rows so eigenvalues are
// comparable; the PSD check is done in this frame.
constexpr double kBalance = kDefaultZRef;
// Absolute floor (V^2/Hz in the balanced frame), ~1e-17 K*ohm; below any physical noise level.
constexpr double kAbsFloor = 1e-40;

struct Eig2 {
    double lo, hi;
};

Eig2 hermitian_eigs(const Mat2& h) {
    const double a = h(0, 0).real(), d = h(1, 1).real();
    const double mid = 0.5 * (a + d);
    const double rad = std::hypot(0.5 * (a - d), std::abs(h(0, 1)));
    return {mid - rad, mid + rad};
}

Mat2 balanced(const Mat2& c) {
    Mat2 b = c;
    b(0, 1) *= kBalance;
    b(1, 0) *= kBalance;
    b(1, 1) *= kBalance * kBalance;
    return b;
}

Mat2 unbalanced(const Mat2& b) {
    Mat2 c = b;
    c(0, 1) /= kBalance;
    c(1, 0) /= kBalance;
    c(1, 1) /= kBalance * kBalance;
    return c;
}

// Z + Z^H with eigenvalues at roundoff level (relative to |Z|) set to zero,
// so lossless networks come out exactly noiseless.
Mat2 dissipative_part(const Mat2& m) {
    const Mat2 h = m + m.adjoint();
    Eigen::SelfAdjointEigenSolver<Mat2> es(h);
    const double tol = 1e-12 * m.cwiseAbs().maxCoeff();
    Eigen::Vector2d ev = es.eigenvalues();
    for (int i = 0; i < 2; ++i)
        if (ev(i) < tol) ev(i) = 0.0;
    return es.eigenvectors() * ev.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

void validate(const NoiseParameters& np) {
    auto fail = [](const std::string& why) { throw Error(ErrorKind::UnphysicalNoiseParameters, why); };
    if (!(np.z_on.real() > 0.0)) fail("Re{Z_ON} must be positive");
    if (!(np.r_n >= 0.0) || !std::isfinite(np.r_n)) fail("R_n must be non-negative");
    if (!(np.t_nmin >= 0.0) || !std::isfinite(np.t_nmin)) fail("T_Nmin must be non-negative");
    const double bound = 4.0 * np.r_n * np.y_on().real() * kT0;
    if (np.t_nmin > bound * (1.0 + 1e-12) + 1e-12)
        fail("T_Nmin exceeds 4 R_n Re{Y_ON} T0 (correlation would not be positive semidefinite)");
}

Mat2 make_psd(const Mat2& corr) {
    if (!corr.allFinite()) throw Error(ErrorKind::UnphysicalCorrelation, "non-finite correlation entries");
    Mat2 h = balanced(0.5 * (corr + corr.adjoint()));
    h(0, 0) = h(0, 0).real();
    h(1, 1) = h(1, 1).real();
    const double scale = std::abs(h(0, 0).real()) + std::abs(h(1, 1).real());
    const auto [lo, hi] = hermitian_eigs(h);
    if (lo >= 0.0) return unbalanced(h);
    if (lo < -(kPsdTol * scale + kAbsFloor))
        throw Error(ErrorKind::UnphysicalCorrelation, "correlation matrix is not positive semidefinite");
    // Clamp the small negative eigenvalue to zero: h' = h - lo * v v^H.
    Eigen::SelfAdjointEigenSolver<Mat2> es(h);
    const Eigen::Vector2cd v = es.eigenvectors().col(0);
    Mat2 clamped = h - es.eigenvalues()(0) * (v * v.adjoint());
    clamped(0, 0) = std::max(0.0, clamped(0, 0).real());
    clamped(1, 1) = std::max(0.0, clamped(1, 1).real());
    (void)hi;
    return unbalanced(clamped);
}

bool is_hermitian_psd(const Mat2& corr, double rel_tol) {
    const Mat2 b = balanced(corr);
    const double scale = std::abs(b(0, 0)) + std::abs(b(1, 1)) + std::abs(b(0, 1)) + std::abs(b(1, 0));
    if (scale == 0.0) return true;
    if (std::abs(b(0, 1) - std::conj(b(1, 0))) > rel_tol * scale) return false;
    if (std::abs(b(0, 0).imag()) > rel_tol * scale || std::abs(b(1, 1).imag()) > rel_tol * scale) return false;
    return hermitian_eigs(0.5 * (b + b.adjoint())).lo >= -(rel_tol * scale + kAbsFloor);
}

NoisyTwoPort::NoisyTwoPort(TwoPort net, const Mat2& corr) : net_(std::move(net)), corr_(make_psd(corr)) {}

NoisyTwoPort NoisyTwoPort::noiseless(const TwoPort& net) { return NoisyTwoPort(net, Mat2::Zero()); }

Mat2 noise_params_to_correlation(const NoiseParameters& np) {
    validate(np);
    const cplx y = np.y_on();
    const double half_excess = 0.5 * (np.f_min() - 1.0);
    const double s = 2.0 * kBoltzmann * kT0;
    return s * mat(np.r_n, half_excess - np.r_n * std::conj(y), half_excess - np.r_n * y, np.r_n * std::norm(y));
}

NoiseParameters correlation_to_noise_params(const Mat2& corr, double z_ref) {
    const Mat2 c = make_psd(corr);
    const double c11 = c(0, 0).real(), c22 = c(1, 1).real();
    const cplx c12 = c(0, 1);
    // Anything below 1e-9 K*ohm equivalent is treated as a noiseless network.
    const double total = c11 + c22 * z_ref * z_ref;
    if (total <= 2.0 * kBoltzmann * 1e-9 * z_ref) return {cplx(z_ref, 0.0), 0.0, 0.0};
    if (c11 <= 1e-14 * total)
        throw Error(ErrorKind::DegenerateNetwork, "noise optimum lies at a short circuit (no voltage generator)");

    const double im_y = c12.imag() / c11;
    const double re_y2 = c22 / c11 - im_y * im_y;
    if (re_y2 <= 1e-24 * (c22 / c11 + 1.0 / (z_ref * z_ref)))
        throw Error(ErrorKind::DegenerateNetwork, "noise optimum lies at a lossless termination");
    const cplx y_on(std::sqrt(re_y2), im_y);
    const double r_n = c11 / (2.0 * kBoltzmann * kT0);
    const double t_nmin = std::max(0.0, (c12 + c11 * std::conj(y_on)).real() / kBoltzmann);
    return {1.0 / y_on, r_n, t_nmin};
}

double noise_temperature(const NoiseParameters& np, cplx z_s) {
    if (!(z_s.real() > 0.0)) throw Error(ErrorKind::NonPassiveSource, "source impedance must have positive real part");
    const cplx y_s = 1.0 / z_s;
    return np.t_nmin + kT0 * (np.r_n / y_s.real()) * std::norm(y_s - np.y_on());
}

double noise_temperature(const Mat2& c, cplx z_s) {
    if (!(z_s.real() > 0.0)) throw Error(ErrorKind::NonPassiveSource, "source impedance must have positive real part");
    Eigen::Vector2cd z(1.0, std::conj(z_s));
    const double q = (z.adjoint() * c * z)(0, 0).real();
    return q / (2.0 * kBoltzmann * z_s.real());
}

double noise_temperature(const NoisyTwoPort& n, cplx z_s) { return noise_temperature(n.corr(), z_s); }

NoisyTwoPort cascade_noisy(const NoisyTwoPort& a, const NoisyTwoPort& b) {
    TwoPort net = net::cascade(a.net(), b.net());
    const Mat2 ta = net::convert(a.net(), Repr::ABCD).matrix();
    return NoisyTwoPort(std::move(net), a.corr() + ta * b.corr() * ta.adjoint());
}

NoisyTwoPort passive_thermal_noise(const TwoPort& net, double t_phys) {
    if (!(t_phys >= 0.0)) throw Error(ErrorKind::NegativeTemperature, "physical temperature must be >= 0");
    if (net::max_singular_value_s(net) > 1.0 + 1e-9)
        throw Error(ErrorKind::NonPassiveNetwork, "network has a singular value of S above one");
    const Mat2 t = net::convert(net, Repr::ABCD).matrix();
    const double z0 = net.z_ref();
    const double kt = kBoltzmann * t_phys;
    // Pick whichever immittance form is better conditioned; both give the
    // same chain matrix when both exist.
    if (std::abs(t(1, 0)) * z0 >= std::abs(t(0, 1)) / z0) {
        const Mat2 z = net::convert(net, Repr::Z).matrix();
        return from_impedance_form(net.freq(), z, kt * dissipative_part(z), z0);
    }
    const Mat2 y = net::convert(net, Repr::Y).matrix();
    return from_admittance_form(net.freq(), y, kt * dissipative_part(y), z0);
}

NoiseMeasureResult noise_measure(double t_n, double g_a) {
    if (!(g_a > 0.0)) throw Error(ErrorKind::InvalidArgument, "available gain must be positive");
    if (std::abs(g_a - 1.0) < 1e-12) throw Error(ErrorKind::UnityGain, "noise measure undefined at unity gain");
    if (std::isinf(g_a)) return {t_n, t_n, g_a};
    return {t_n / (1.0 - 1.0 / g_a), t_n, g_a};
}

MinNoiseMeasure min_noise_measure(const NoisyTwoPort& n, const MinNoiseMeasureOptions& opts) {
    const double z0 = n.net().z_ref();
    const Mat2 s = net::convert(n.net(), Repr::S).matrix();
    const Mat2& c = n.corr();

    struct Eval {
        double mt0, t_n, g_a;
    };
    auto evaluate = [&](cplx gs) -> Eval {
        constexpr double inf = std::numeric_limits<double>::infinity();
        const double gs2 = std::norm(gs);
        if (gs2 > opts.max_gamma * opts.max_gamma) return {inf, inf, 0.0};
        const cplx zs = net::impedance_of(gs, z0);
        const cplx one_minus = 1.0 - s(0, 0) * gs;
        const cplx g_out = s(1, 1) + s(0, 1) * s(1, 0) * gs / one_minus;
        const double g_a = std::norm(s(1, 0)) * (1.0 - gs2) / (std::norm(one_minus) * (1.0 - std::norm(g_out)));
        if (!(g_a > 1.0) || !std::isfinite(g_a)) return {inf, inf, g_a};
        const double t_n = noise_temperature(c, zs);
        return {t_n / (1.0 - 1.0 / g_a), t_n, g_a};
    };

    const int m = std::max(opts.grid, 2);
    const double step = 2.0 * opts.max_gamma / (m - 1);
    std::vector<double> best(static_cast<std::size_t>(m), std::numeric_limits<double>::infinity());
    std::vector<cplx> best_g(static_cast<std::size_t>(m));
    parallel_for(static_cast<std::size_t>(m), [&](std::size_t i) {
        const double x = -opts.max_gamma + step * static_cast<double>(i);
        for (int j = 0; j < m; ++j) {
            const cplx gs(x, -opts.max_gamma + step * j);
            const Eval e = evaluate(gs);
            if (e.mt0 < best[i]) {
                best[i] = e.mt0;
                best_g[i] = gs;
            }
        }
    });
    const auto it = std::min_element(best.begin(), best.end());
    if (!std::isfinite(*it))
        throw Error(ErrorKind::NoAmplifyingRegion, "available gain does not exceed one for any passive source");
    cplx g_best = best_g[static_cast<std::size_t>(it - best.begin())];

    if (opts.refine) {
        auto obj = [&](const std::vector<double>& x) { return evaluate({x[0], x[1]}).mt0; };
        const auto r = opt::nelder_mead(obj, {g_best.real(), g_best.imag()}, {step, step},
                                        {.max_evals = 2000, .x_tol = 1e-13, .f_tol = 1e-15});
        if (r.f <= *it) g_best = {r.x[0], r.x[1]};
    }
    const Eval e = evaluate(g_best);
    return {e.mt0, net::impedance_of(g_best, z0), e.t_n, e.g_a};
}

NoiseParameters tnmin_of(const NoisyTwoPort& n) { return correlation_to_noise_params(n.corr(), n.net().z_ref()); }

double nf_db(double t_n) {
    if (t_n < 0.0) throw Error(ErrorKind::NegativeTemperature, "noise temperature must be >= 0");
    return 10.0 * std::log10(1.0 + t_n / kT0);
}

double t_from_nf(double nf) {
    if (nf < 0.0) throw Error(ErrorKind::NegativeNF, "noise figure must be >= 0 dB");
    return kT0 * (std::pow(10.0, nf / 10.0) - 1.0);
}

Mat2 chain_to_impedance_corr(const NoisyTwoPort& n) {
    const Mat2 z = net::convert(n.net(), Repr::Z).matrix();
    const Mat2 t = mat(1.0, -z(0, 0), 0.0, -z(1, 0));
    return t * n.corr() * t.adjoint();
}

Mat2 chain_to_admittance_corr(const NoisyTwoPort& n) {
    const Mat2 y = net::convert(n.net(), Repr::Y).matrix();
    const Mat2 t = mat(-y(0, 0), 1.0, -y(1, 0), 0.0);
    return t * n.corr() * t.adjoint();
}

NoisyTwoPort from_impedance_form(double freq, const Mat2& z, const Mat2& corr_z, double z_ref) {
    TwoPort tp(freq, z, Repr::Z, z_ref);
    const Mat2 a = net::convert(tp, Repr::ABCD).matrix();
    const Mat2 t = mat(1.0, -a(0, 0), 0.0, -a(1, 0));
    return NoisyTwoPort(net::convert(tp, Repr::ABCD), t * corr_z * t.adjoint());
}

NoisyTwoPort from_admittance_form(double freq, const Mat2& y, const Mat2& corr_y, double z_ref) {
    TwoPort tp(freq, y, Repr::Y, z_ref);
    const Mat2 a = net::convert(tp, Repr::ABCD).matrix();
    const Mat2 t = mat(0.0, a(0, 1), 1.0, a(1, 1));
    return NoisyTwoPort(net::convert(tp, Repr::ABCD), t * corr_y * t.adjoint());
}

NoisyTwoPort series_feedback(const NoisyTwoPort& n, cplx z_f, double t_phys) {
    const Mat2 z = net::convert(n.net(), Repr::Z).matrix();
    const Mat2 ones = Mat2::Ones();
    const Mat2 cz = chain_to_impedance_corr(n) + 2.0 * kBoltzmann * t_phys * z_f.real() * ones;
    return from_impedance_form(n.freq(), z + z_f * ones, cz, n.net().z_ref());
}

NoisyTwoPort parallel_feedback(const NoisyTwoPort& n, cplx y_f, double t_phys) {
    const Mat2 y = net::convert(n.net(), Repr::Y).matrix();
    const Mat2 bridge = mat(1.0, -1.0, -1.0, 1.0);
    const Mat2 cy = chain_to_admittance_corr(n) + 2.0 * kBoltzmann * t_phys * y_f.real() * bridge;
    return from_admittance_form(n.freq(), y + y_f * bridge, cy, n.net().z_ref());
}

void write_noise_csv(std::ostream& os, const std::vector<NoiseParamPoint>& rows) {
    os << "freq_hz,tnmin_k,rn_ohm,re_zon_ohm,im_zon_ohm,nfmin_db\n";
    for (const auto& r : rows) {
        os << io::fmt_double(r.freq) << ',' << io::fmt_double(r.np.t_nmin) << ',' << io::fmt_double(r.np.r_n) << ','
           << io::fmt_double(r.np.z_on.real()) << ',' << io::fmt_double(r.np.z_on.imag()) << ','
           << io::fmt_double(nf_db(r.np.t_nmin)) << '\n';
    }
}

std::vector<NoiseParamPoint> read_noise_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("freq_hz,tnmin_k,rn_ohm,re_zon_ohm,im_zon_ohm,nfmin_db", 0) != 0)
        throw Error(ErrorKind::Parse, "noise CSV: unexpected header");
    std::vector<NoiseParamPoint> out;
    int line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<double> v;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) v.push_back(std::stod(cell));
        if (v.size() != 6) throw Error(ErrorKind::Parse, "noise CSV line " + std::to_string(line_no) + ": expected 6 columns");
        out.push_back({v[0], {cplx(v[3], v[4]), v[2], v[1]}});
    }
    return out;
}

}  // namespace lna::noise
