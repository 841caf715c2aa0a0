#pragma once

#include <functional>
#include <vector>

namespace lna::opt {

struct NelderMeadOptions {
    int max_evals = 4000;
    double x_tol = 1e-10;  // simplex diameter
    double f_tol = 1e-14;  // spread of simplex values, relative
};

struct NelderMeadResult {
    std::vector<double> x;
    double f;
    int evals;
};

// Deterministic downhill simplex. The objective may return +inf to reject a point.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> x0, const std::vector<double>& step,
                             const NelderMeadOptions& opts = {});

// Newton iteration with a finite-difference Jacobian. With more residuals than
// unknowns the step is the least-squares (Gauss-Newton) one. Returns the final
// iterate; `residual_norm` reports max |r_i|.
struct NewtonResult {
    std::vector<double> x;
    double residual_norm;
    bool converged;
};

NewtonResult newton_solve(const std::function<std::vector<double>(const std::vector<double>&)>& residual,
                          std::vector<double> x0, double tol = 1e-12, int max_iter = 60);

}  // namespace lna::opt
