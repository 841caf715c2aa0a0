#pragma once

// Noisy two-ports in chain (ABCD-referenced) correlation form.
//
// Unit convention, shared by every function here: a correlation matrix entry
// is half the one-sided spectral density per hertz, so a resistor R at
// temperature T contributes 2*k*T*R to the voltage term. With that choice the
// four-parameter form reads
//
//   C_A = 2 k T0 [[ Rn,                      (Fmin-1)/2 - Rn conj(Yon) ],
//                 [ (Fmin-1)/2 - Rn Yon,      Rn |Yon|^2               ]]
//
// and the noise temperature for a source Zs is  z^H C_A z / (2 k Re Zs)
// with z = [1, conj(Zs)]^T.

#include <iosfwd>
#include <string>
#include <vector>

#include "lna/netcore.hpp"

namespace lna::noise {

inline constexpr double kBoltzmann = 1.380649e-23;
inline constexpr double kElectronCharge = 1.602176634e-19;
inline constexpr double kT0 = 290.0;

// Relative eigenvalue tolerance (w.r.t. trace) for the PSD check.
inline constexpr double kPsdTol = 1e-12;

struct NoiseParameters {
    cplx z_on;      // optimum source impedance
    double r_n;     // equivalent noise resistance
    double t_nmin;  // minimum noise temperature, kelvin

    cplx y_on() const { return 1.0 / z_on; }
    double f_min() const { return 1.0 + t_nmin / kT0; }
};

// Throws UnphysicalNoiseParameters unless Re{Z_ON} > 0, R_n >= 0, T_Nmin >= 0
// and 4 R_n Re{Y_ON} T0 >= T_Nmin.
void validate(const NoiseParameters& np);

class NoisyTwoPort {
public:
    // corr must be Hermitian PSD within tolerance; tiny negative eigenvalues
    // are clamped, anything beyond tolerance throws UnphysicalCorrelation.
    NoisyTwoPort(net::TwoPort net, const Mat2& corr);

    static NoisyTwoPort noiseless(const net::TwoPort& net);

    const net::TwoPort& net() const { return net_; }
    const Mat2& corr() const { return corr_; }
    double freq() const { return net_.freq(); }

private:
    net::TwoPort net_;
    Mat2 corr_;
};

// Hermitian-symmetrize and clamp into the PSD cone. Throws
// UnphysicalCorrelation if the most negative eigenvalue exceeds kPsdTol*trace.
Mat2 make_psd(const Mat2& corr);
bool is_hermitian_psd(const Mat2& corr, double rel_tol = kPsdTol);

Mat2 noise_params_to_correlation(const NoiseParameters& np);

// Zero matrix maps to {z_ref, 0, 0}. Throws DegenerateNetwork if the optimum
// lies at a short or open circuit (one of the generators vanishes alone).
NoiseParameters correlation_to_noise_params(const Mat2& corr, double z_ref = kDefaultZRef);

double noise_temperature(const NoiseParameters& np, cplx z_s);
double noise_temperature(const NoisyTwoPort& n, cplx z_s);
double noise_temperature(const Mat2& chain_corr, cplx z_s);

NoisyTwoPort cascade_noisy(const NoisyTwoPort& a, const NoisyTwoPort& b);

// Thermal-equilibrium noise of a passive network at physical temperature t_phys.
NoisyTwoPort passive_thermal_noise(const net::TwoPort& net, double t_phys = kT0);

struct NoiseMeasureResult {
    double mt0;  // kelvin; negative when g_a < 1
    double t_n;
    double g_a;

    bool amplifying() const { return g_a > 1.0; }
};

NoiseMeasureResult noise_measure(double t_n, double g_a);

struct MinNoiseMeasureOptions {
    int grid = 201;               // points per axis of the reflection-coefficient grid
    double max_gamma = 0.999;     // search radius on the Smith chart
    bool refine = true;           // Nelder-Mead polish from the best grid point
};

struct MinNoiseMeasure {
    double mt0;
    cplx z_s;  // source impedance attaining it
    double t_n;
    double g_a;
};

// Minimum of MT_0 over passive sources with G_A > 1.
// Throws NoAmplifyingRegion when no such source exists.
MinNoiseMeasure min_noise_measure(const NoisyTwoPort& n, const MinNoiseMeasureOptions& opts = {});

NoiseParameters tnmin_of(const NoisyTwoPort& n);

double nf_db(double t_n);
double t_from_nf(double nf_db);

// Representation changes of the correlation matrix. Each returns the
// impedance- or admittance-form matrix paired with its network matrix.
Mat2 chain_to_impedance_corr(const NoisyTwoPort& n);
Mat2 chain_to_admittance_corr(const NoisyTwoPort& n);
NoisyTwoPort from_impedance_form(double freq, const Mat2& z, const Mat2& corr_z, double z_ref = kDefaultZRef);
NoisyTwoPort from_admittance_form(double freq, const Mat2& y, const Mat2& corr_y, double z_ref = kDefaultZRef);

// Impedance z_f in the common lead (series-series interconnection).
NoisyTwoPort series_feedback(const NoisyTwoPort& n, cplx z_f, double t_phys = kT0);
// Admittance y_f bridging input and output (parallel-parallel interconnection).
NoisyTwoPort parallel_feedback(const NoisyTwoPort& n, cplx y_f, double t_phys = kT0);

struct NoiseParamPoint {
    double freq;
    NoiseParameters np;
};

// CSV: freq_hz, tnmin_k, rn_ohm, re_zon_ohm, im_zon_ohm, nfmin_db
void write_noise_csv(std::ostream& os, const std::vector<NoiseParamPoint>& rows);
std::vector<NoiseParamPoint> read_noise_csv(std::istream& is);

}  // namespace lna::noise
