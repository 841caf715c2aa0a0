#pragma once

// Two-port network algebra at a single frequency point.
//
// Matrices are stored per frequency, no rational fitting. Representation
// domains:
//   S     always defined for a finite network
//   Z     undefined when the network has an ideal series path (e.g. through)
//   Y     undefined when the network has an ideal shunt path
//   ABCD  undefined when there is no forward transmission (S21 == 0)
// Converting into an undefined representation raises SingularMatrix.

#include <cmath>
#include <complex>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lna/error.hpp"

namespace lna {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kDefaultZRef = 50.0;
// Denominators and determinants below this magnitude are treated as singular.
inline constexpr double kSingularTol = 1e-15;

}  // namespace lna

namespace lna::net {

enum class Repr { S, Z, Y, ABCD };

std::string to_string(Repr r);

class TwoPort {
public:
    TwoPort(double freq, const Mat2& matrix, Repr repr, double z_ref = kDefaultZRef);

    double freq() const { return freq_; }
    const Mat2& matrix() const { return m_; }
    Repr repr() const { return repr_; }
    double z_ref() const { return z_ref_; }

    cplx operator()(int i, int j) const { return m_(i, j); }

    static TwoPort identity(double freq, double z_ref = kDefaultZRef);

private:
    double freq_;
    Mat2 m_;
    Repr repr_;
    double z_ref_;
};

class FrequencyGrid {
public:
    explicit FrequencyGrid(std::vector<double> points);

    // Evenly spaced, both ends included. n == 1 yields {start}.
    static FrequencyGrid linear(double start, double stop, std::size_t n);

    const std::vector<double>& points() const { return points_; }
    std::size_t size() const { return points_.size(); }
    bool contains(double f, double rel_tol = 1e-12) const;

private:
    std::vector<double> points_;
};

TwoPort convert(const TwoPort& net, Repr target);

// ABCD product a * b; result is in ABCD with a's reference impedance.
TwoPort cascade(const TwoPort& a, const TwoPort& b);

enum class Placement { Series, Shunt };

// Series: value is an impedance. Shunt: value is an admittance.
TwoPort element_twoport(Placement kind, cplx value, double freq);

enum class Side { Input, Output };

// Input side: impedance seen at port 1 with `termination` on port 2.
// Output side: impedance seen at port 2 with `termination` on port 1.
cplx port_impedance(const TwoPort& net, cplx termination, Side side);

struct Gains {
    double available;   // G_A
    double transducer;  // G_T
    double max_stable;  // G_MSG, NaN when the network has no reverse transmission
};

// Available and transducer gain for source z_s and load z_l.
// G_MSG is NaN (not an error) when |S12| vanishes; use max_stable_gain() to get the error.
Gains gains(const TwoPort& net, cplx z_s, cplx z_l);

double available_gain(const TwoPort& net, cplx z_s);
double transducer_gain(const TwoPort& net, cplx z_s, cplx z_l);
double max_stable_gain(const TwoPort& net);

// Geometric stability factor. Unilateral networks return +inf.
double mu_stability(const TwoPort& net);

cplx gamma_of(cplx z, double z_ref);
cplx impedance_of(cplx gamma, double z_ref);

inline double db10(double ratio) { return 10.0 * std::log10(ratio); }
inline double db20(cplx v) { return 20.0 * std::log10(std::abs(v)); }

// Largest singular value of S; a passive network has this <= 1.
double max_singular_value_s(const TwoPort& net);

// Touchstone v1, 2-port, written as "# GHz S RI R <z_ref>".
void write_touchstone(std::ostream& os, const std::vector<TwoPort>& sweep);
void write_touchstone(const std::string& path, const std::vector<TwoPort>& sweep);
std::vector<TwoPort> read_touchstone(std::istream& is);
std::vector<TwoPort> read_touchstone(const std::string& path);

}  // namespace lna::net
