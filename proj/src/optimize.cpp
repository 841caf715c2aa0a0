#include "lna/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>

namespace lna::opt {

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> x0, const std::vector<double>& step,
                             const NelderMeadOptions& opts) {
    const std::size_t n = x0.size();
    std::vector<std::vector<double>> pts(n + 1, x0);
    std::vector<double> vals(n + 1);
    int evals = 0;
    auto eval = [&](const std::vector<double>& x) {
        ++evals;
        const double v = f(x);
        return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
    };
    for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += step[i];
    for (std::size_t i = 0; i <= n; ++i) vals[i] = eval(pts[i]);

    std::vector<std::size_t> order(n + 1);
    while (evals < opts.max_evals) {
        std::iota(order.begin(), order.end(), 0);
        // stable sort keeps ties in index order so runs are reproducible
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return vals[a] < vals[b]; });
        const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];

        double diam = 0.0;
        for (std::size_t i = 0; i <= n; ++i)
            for (std::size_t k = 0; k < n; ++k) diam = std::max(diam, std::abs(pts[i][k] - pts[best][k]));
        const double spread = std::abs(vals[worst] - vals[best]);
        if (diam < opts.x_tol ||
            (std::isfinite(vals[worst]) && spread <= opts.f_tol * std::max(1.0, std::abs(vals[best]))))
            break;

        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i <= n; ++i)
            if (i != worst)
                for (std::size_t k = 0; k < n; ++k) centroid[k] += pts[i][k] / static_cast<double>(n);

        auto along = [&](double t) {
            std::vector<double> x(n);
            for (std::size_t k = 0; k < n; ++k) x[k] = centroid[k] + t * (pts[worst][k] - centroid[k]);
            return x;
        };

        auto xr = along(-1.0);
        const double fr = eval(xr);
        if (fr < vals[best]) {
            auto xe = along(-2.0);
            const double fe = eval(xe);
            if (fe < fr) {
                pts[worst] = xe;
                vals[worst] = fe;
            } else {
                pts[worst] = xr;
                vals[worst] = fr;
            }
            continue;
        }
        if (fr < vals[second]) {
            pts[worst] = xr;
            vals[worst] = fr;
            continue;
        }
        const bool outside = fr < vals[worst];
        auto xc = along(outside ? -0.5 : 0.5);
        const double fc = eval(xc);
        if (fc < (outside ? fr : vals[worst])) {
            pts[worst] = xc;
            vals[worst] = fc;
            continue;
        }
        // shrink toward best
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == best) continue;
            for (std::size_t k = 0; k < n; ++k) pts[i][k] = pts[best][k] + 0.5 * (pts[i][k] - pts[best][k]);
            vals[i] = eval(pts[i]);
        }
    }
    const auto it = std::min_element(vals.begin(), vals.end());
    const auto idx = static_cast<std::size_t>(it - vals.begin());
    return {pts[idx], vals[idx], evals};
}

static double max_abs(const std::vector<double>& r) {
    double m = 0.0;
    for (double v : r) m = std::max(m, std::isfinite(v) ? std::abs(v) : std::numeric_limits<double>::infinity());
    return m;
}

NewtonResult newton_solve(const std::function<std::vector<double>(const std::vector<double>&)>& residual,
                          std::vector<double> x, double tol, int max_iter) {
    const auto n = static_cast<Eigen::Index>(x.size());
    std::vector<double> r = residual(x);
    const auto m = static_cast<Eigen::Index>(r.size());
    auto sumsq = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double e : v) s += e * e;
        return s;
    };
    double norm = max_abs(r);
    double ss = sumsq(r);
    if (!std::isfinite(ss)) return {x, std::numeric_limits<double>::infinity(), false};
    for (int it = 0; it < max_iter && norm > tol; ++it) {
        Eigen::MatrixXd jac(m, n);
        for (Eigen::Index k = 0; k < n; ++k) {
            const double h = 1e-7 * std::max(1.0, std::abs(x[k]));
            auto xp = x;
            xp[k] += h;
            const auto rp = residual(xp);
            for (Eigen::Index i = 0; i < m; ++i) jac(i, k) = (rp[i] - r[i]) / h;
        }
        Eigen::VectorXd rv(m);
        for (Eigen::Index i = 0; i < m; ++i) rv(i) = r[i];
        // least-squares step when m > n
        const Eigen::VectorXd dx = jac.colPivHouseholderQr().solve(-rv);
        if (!dx.allFinite()) break;

        double t = 1.0;
        bool improved = false;
        for (int ls = 0; ls < 30; ++ls, t *= 0.5) {
            auto xn = x;
            for (Eigen::Index k = 0; k < n; ++k) xn[k] += t * dx(k);
            const auto rn = residual(xn);
            const double sn = sumsq(rn);
            if (sn < ss) {
                x = std::move(xn);
                r = rn;
                ss = sn;
                norm = max_abs(r);
                improved = true;
                break;
            }
        }
        if (!improved) break;
    }
    return {x, norm, norm <= tol};
}

}  // namespace lna::opt
