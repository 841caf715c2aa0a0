#include "lna/netcore.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "lna/io.hpp"

namespace lna::net {

namespace {

const Mat2 kI = Mat2::Identity();

Mat2 inverse_checked(const Mat2& m, const char* what) {
    const cplx det = m.determinant();
    if (std::abs(det) < kSingularTol)
        throw Error(ErrorKind::SingularMatrix, std::string(what) + ": determinant below tolerance");
    Mat2 inv;
    inv << m(1, 1), -m(0, 1), -m(1, 0), m(0, 0);
    return inv / det;
}

cplx checked_div(cplx num, cplx den, const char* what) {
    if (std::abs(den) < kSingularTol)
        throw Error(ErrorKind::SingularMatrix, std::string(what) + ": denominator below tolerance");
    return num / den;
}

Mat2 mat(cplx a, cplx b, cplx c, cplx d) {
    Mat2 m;
    m << a, b, c, d;
    return m;
}

Mat2 s_to(const Mat2& s, Repr t, double z0) {
    switch (t) {
    case Repr::S: return s;
    case Repr::Z: return z0 * (kI + s) * inverse_checked(kI - s, "S->Z");
    case Repr::Y: return (1.0 / z0) * (kI - s) * inverse_checked(kI + s, "S->Y");
    case Repr::ABCD: {
        const cplx s11 = s(0, 0), s12 = s(0, 1), s21 = s(1, 0), s22 = s(1, 1);
        const cplx den = 2.0 * s21;
        if (std::abs(den) < kSingularTol)
            throw Error(ErrorKind::SingularMatrix, "S->ABCD: S21 is zero");
        return mat(((1.0 + s11) * (1.0 - s22) + s12 * s21) / den,
                   z0 * ((1.0 + s11) * (1.0 + s22) - s12 * s21) / den,
                   ((1.0 - s11) * (1.0 - s22) - s12 * s21) / (z0 * den),
                   ((1.0 - s11) * (1.0 + s22) + s12 * s21) / den);
    }
    }
    return s;
}

Mat2 z_to(const Mat2& z, Repr t, double z0) {
    switch (t) {
    case Repr::S: return (z - z0 * kI) * inverse_checked(z + z0 * kI, "Z->S");
    case Repr::Z: return z;
    case Repr::Y: return inverse_checked(z, "Z->Y");
    case Repr::ABCD: {
        const cplx z21 = z(1, 0);
        if (std::abs(z21) < kSingularTol) throw Error(ErrorKind::SingularMatrix, "Z->ABCD: Z21 is zero");
        return mat(z(0, 0) / z21, z.determinant() / z21, 1.0 / z21, z(1, 1) / z21);
    }
    }
    return z;
}

Mat2 y_to(const Mat2& y, Repr t, double z0) {
    switch (t) {
    case Repr::S: return (kI - z0 * y) * inverse_checked(kI + z0 * y, "Y->S");
    case Repr::Z: return inverse_checked(y, "Y->Z");
    case Repr::Y: return y;
    case Repr::ABCD: {
        const cplx y21 = y(1, 0);
        if (std::abs(y21) < kSingularTol) throw Error(ErrorKind::SingularMatrix, "Y->ABCD: Y21 is zero");
        return mat(-y(1, 1) / y21, -1.0 / y21, -y.determinant() / y21, -y(0, 0) / y21);
    }
    }
    return y;
}

Mat2 abcd_to(const Mat2& t, Repr target, double z0) {
    const cplx a = t(0, 0), b = t(0, 1), c = t(1, 0), d = t(1, 1);
    switch (target) {
    case Repr::S: {
        const cplx den = a + b / z0 + c * z0 + d;
        if (std::abs(den) < kSingularTol) throw Error(ErrorKind::SingularMatrix, "ABCD->S: denominator is zero");
        return mat((a + b / z0 - c * z0 - d) / den, 2.0 * (a * d - b * c) / den, 2.0 / den,
                   (-a + b / z0 - c * z0 + d) / den);
    }
    case Repr::Z: {
        if (std::abs(c) < kSingularTol) throw Error(ErrorKind::SingularMatrix, "ABCD->Z: C is zero");
        return mat(a / c, t.determinant() / c, 1.0 / c, d / c);
    }
    case Repr::Y: {
        if (std::abs(b) < kSingularTol) throw Error(ErrorKind::SingularMatrix, "ABCD->Y: B is zero");
        return mat(d / b, -t.determinant() / b, -1.0 / b, a / b);
    }
    case Repr::ABCD: return t;
    }
    return t;
}

}  // namespace

std::string to_string(Repr r) {
    switch (r) {
    case Repr::S: return "S";
    case Repr::Z: return "Z";
    case Repr::Y: return "Y";
    case Repr::ABCD: return "ABCD";
    }
    return "?";
}

TwoPort::TwoPort(double freq, const Mat2& matrix, Repr repr, double z_ref)
    : freq_(freq), m_(matrix), repr_(repr), z_ref_(z_ref) {
    if (!(freq > 0.0) || !std::isfinite(freq))
        throw Error(ErrorKind::InvalidArgument, "frequency must be positive");
    if (!(z_ref > 0.0) || !std::isfinite(z_ref))
        throw Error(ErrorKind::InvalidArgument, "reference impedance must be positive");
}

TwoPort TwoPort::identity(double freq, double z_ref) {
    return TwoPort(freq, Mat2::Identity(), Repr::ABCD, z_ref);
}

FrequencyGrid::FrequencyGrid(std::vector<double> points) : points_(std::move(points)) {
    if (points_.empty()) throw Error(ErrorKind::InvalidArgument, "frequency grid empty");
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (!(points_[i] > 0.0) || !std::isfinite(points_[i]))
            throw Error(ErrorKind::InvalidArgument, "frequency grid points must be positive");
        if (i > 0 && !(points_[i] > points_[i - 1]))
            throw Error(ErrorKind::InvalidArgument, "frequency grid must be strictly increasing");
    }
}

FrequencyGrid FrequencyGrid::linear(double start, double stop, std::size_t n) {
    if (n == 0) throw Error(ErrorKind::InvalidArgument, "frequency grid empty");
    std::vector<double> pts(n);
    for (std::size_t i = 0; i < n; ++i)
        pts[i] = n == 1 ? start : start + (stop - start) * static_cast<double>(i) / static_cast<double>(n - 1);
    return FrequencyGrid(std::move(pts));
}

bool FrequencyGrid::contains(double f, double rel_tol) const {
    return std::any_of(points_.begin(), points_.end(),
                       [&](double p) { return std::abs(p - f) <= rel_tol * std::abs(f); });
}

TwoPort convert(const TwoPort& net, Repr target) {
    const double z0 = net.z_ref();
    Mat2 out;
    switch (net.repr()) {
    case Repr::S: out = s_to(net.matrix(), target, z0); break;
    case Repr::Z: out = z_to(net.matrix(), target, z0); break;
    case Repr::Y: out = y_to(net.matrix(), target, z0); break;
    case Repr::ABCD: out = abcd_to(net.matrix(), target, z0); break;
    }
    return TwoPort(net.freq(), out, target, z0);
}

static void require_same_freq(double fa, double fb) {
    if (std::abs(fa - fb) > 1e-9 * std::max(fa, fb))
        throw Error(ErrorKind::FrequencyMismatch, "cannot combine networks at different frequencies");
}

TwoPort cascade(const TwoPort& a, const TwoPort& b) {
    require_same_freq(a.freq(), b.freq());
    const Mat2 ta = convert(a, Repr::ABCD).matrix();
    const Mat2 tb = convert(b, Repr::ABCD).matrix();
    return TwoPort(a.freq(), ta * tb, Repr::ABCD, a.z_ref());
}

TwoPort element_twoport(Placement kind, cplx value, double freq) {
    if (!std::isfinite(value.real()) || !std::isfinite(value.imag()))
        throw Error(ErrorKind::InvalidArgument, "element value must be finite");
    return kind == Placement::Series ? TwoPort(freq, mat(1.0, value, 0.0, 1.0), Repr::ABCD)
                                     : TwoPort(freq, mat(1.0, 0.0, value, 1.0), Repr::ABCD);
}

cplx port_impedance(const TwoPort& net, cplx termination, Side side) {
    const Mat2 t = convert(net, Repr::ABCD).matrix();
    const cplx a = t(0, 0), b = t(0, 1), c = t(1, 0), d = t(1, 1);
    if (side == Side::Input) return checked_div(a * termination + b, c * termination + d, "input impedance");
    return checked_div(d * termination + b, c * termination + a, "output impedance");
}

cplx gamma_of(cplx z, double z_ref) { return (z - z_ref) / (z + z_ref); }

cplx impedance_of(cplx gamma, double z_ref) { return z_ref * (1.0 + gamma) / (1.0 - gamma); }

static void require_passive(cplx z, const char* what) {
    if (!(z.real() > 0.0))
        throw Error(ErrorKind::NonPassiveSource, std::string(what) + " must have positive real part");
}

double available_gain(const TwoPort& net, cplx z_s) {
    require_passive(z_s, "source impedance");
    const Mat2 s = convert(net, Repr::S).matrix();
    const cplx gs = gamma_of(z_s, net.z_ref());
    const cplx one_minus = 1.0 - s(0, 0) * gs;
    const cplx g_out = s(1, 1) + s(0, 1) * s(1, 0) * gs / one_minus;
    return std::norm(s(1, 0)) * (1.0 - std::norm(gs)) / (std::norm(one_minus) * (1.0 - std::norm(g_out)));
}

double transducer_gain(const TwoPort& net, cplx z_s, cplx z_l) {
    require_passive(z_s, "source impedance");
    require_passive(z_l, "load impedance");
    const Mat2 s = convert(net, Repr::S).matrix();
    const cplx gs = gamma_of(z_s, net.z_ref());
    const cplx gl = gamma_of(z_l, net.z_ref());
    const cplx den = (1.0 - s(0, 0) * gs) * (1.0 - s(1, 1) * gl) - s(0, 1) * s(1, 0) * gs * gl;
    return std::norm(s(1, 0)) * (1.0 - std::norm(gs)) * (1.0 - std::norm(gl)) / std::norm(den);
}

double max_stable_gain(const TwoPort& net) {
    const Mat2 s = convert(net, Repr::S).matrix();
    if (std::abs(s(0, 1)) < kSingularTol)
        throw Error(ErrorKind::ZeroReverseTransmission, "G_MSG undefined for |S12| = 0");
    return std::abs(s(1, 0) / s(0, 1));
}

Gains gains(const TwoPort& net, cplx z_s, cplx z_l) {
    Gains g{available_gain(net, z_s), transducer_gain(net, z_s, z_l), std::numeric_limits<double>::quiet_NaN()};
    const Mat2 s = convert(net, Repr::S).matrix();
    if (std::abs(s(0, 1)) >= kSingularTol) g.max_stable = std::abs(s(1, 0) / s(0, 1));
    return g;
}

double mu_stability(const TwoPort& net) {
    const Mat2 s = convert(net, Repr::S).matrix();
    const cplx delta = s.determinant();
    const double den = std::abs(s(1, 1) - delta * std::conj(s(0, 0))) + std::abs(s(0, 1) * s(1, 0));
    if (den < kSingularTol) return std::numeric_limits<double>::infinity();
    return (1.0 - std::norm(s(0, 0))) / den;
}

double max_singular_value_s(const TwoPort& net) {
    const Mat2 s = convert(net, Repr::S).matrix();
    Eigen::JacobiSVD<Mat2> svd(s);
    return svd.singularValues()(0);
}

void write_touchstone(std::ostream& os, const std::vector<TwoPort>& sweep) {
    const double z0 = sweep.empty() ? kDefaultZRef : sweep.front().z_ref();
    os << "! 2-port S-parameters\n";
    os << "# GHz S RI R " << io::fmt_double(z0) << "\n";
    for (const auto& tp : sweep) {
        const Mat2 s = convert(tp, Repr::S).matrix();
        os << io::fmt_double(tp.freq() / 1e9);
        for (auto [i, j] : {std::pair{0, 0}, {1, 0}, {0, 1}, {1, 1}})
            os << ' ' << io::fmt_double(s(i, j).real()) << ' ' << io::fmt_double(s(i, j).imag());
        os << '\n';
    }
}

void write_touchstone(const std::string& path, const std::vector<TwoPort>& sweep) {
    std::ostringstream ss;
    write_touchstone(ss, sweep);
    io::atomic_write(path, ss.str());
}

std::vector<TwoPort> read_touchstone(std::istream& is) {
    double f_scale = 1e9;
    std::string format = "MA";  // Touchstone default when no option line is present
    double z0 = kDefaultZRef;
    bool seen_options = false;
    std::vector<double> values;
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (auto bang = line.find('!'); bang != std::string::npos) line.erase(bang);
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok)) continue;
        if (tok == "#") {
            if (seen_options) continue;  // only the first option line counts
            seen_options = true;
            f_scale = 1e9;
            format = "MA";
            std::vector<std::string> toks;
            while (ls >> tok) {
                std::transform(tok.begin(), tok.end(), tok.begin(), [](unsigned char c) { return std::toupper(c); });
                toks.push_back(tok);
            }
            for (std::size_t i = 0; i < toks.size(); ++i) {
                const auto& t = toks[i];
                if (t == "HZ") f_scale = 1.0;
                else if (t == "KHZ") f_scale = 1e3;
                else if (t == "MHZ") f_scale = 1e6;
                else if (t == "GHZ") f_scale = 1e9;
                else if (t == "RI" || t == "MA" || t == "DB") format = t;
                else if (t == "S") continue;
                else if (t == "R" && i + 1 < toks.size()) z0 = std::stod(toks[++i]);
                else
                    throw Error(ErrorKind::Parse, "touchstone line " + std::to_string(line_no) +
                                                      ": unsupported option '" + t + "'");
            }
            continue;
        }
        ls.clear();
        ls.str(line);
        double v;
        while (ls >> v) values.push_back(v);
        if (!ls.eof())
            throw Error(ErrorKind::Parse, "touchstone line " + std::to_string(line_no) + ": non-numeric data");
    }
    if (values.size() % 9 != 0)
        throw Error(ErrorKind::Parse, "touchstone data is not a multiple of 9 values");

    auto to_c = [&](double x, double y) -> cplx {
        if (format == "RI") return {x, y};
        const double mag = format == "DB" ? std::pow(10.0, x / 20.0) : x;
        return std::polar(mag, y * kPi / 180.0);
    };
    std::vector<TwoPort> out;
    for (std::size_t k = 0; k < values.size(); k += 9) {
        Mat2 s;
        s(0, 0) = to_c(values[k + 1], values[k + 2]);
        s(1, 0) = to_c(values[k + 3], values[k + 4]);
        s(0, 1) = to_c(values[k + 5], values[k + 6]);
        s(1, 1) = to_c(values[k + 7], values[k + 8]);
        out.emplace_back(values[k] * f_scale, s, Repr::S, z0);
    }
    return out;
}

std::vector<TwoPort> read_touchstone(const std::string& path) {
    std::istringstream ss(io::read_file(path));
    return read_touchstone(ss);
}

}  // namespace lna::net
