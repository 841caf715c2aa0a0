#include "lna/design.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#include "lna/error.hpp"
#include "lna/io.hpp"
#include "lna/optimize.hpp"
#include "lna/parallel.hpp"

namespace lna::design {

using io::fmt_double;
using noise::NoisyTwoPort;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kMatchResidual = 1e-3;
constexpr double kPenalty = 1e6;  // K per dB^2 of S11 violation

cplx power_wave_gamma(cplx z_in, cplx z_s) { return (z_in - std::conj(z_s)) / (z_in + z_s); }

// Free sizing fields in log space.
struct FreeVars {
    std::vector<int> fields;
    std::vector<double> lo, hi;

    std::size_t size() const { return fields.size(); }

    LnaSizing apply(LnaSizing s, const std::vector<double>& x) const {
        for (std::size_t i = 0; i < fields.size(); ++i) topo::sizing_field(s, fields[i]) = std::exp(x[i]);
        return s;
    }
    std::vector<double> extract(const LnaSizing& s) const {
        std::vector<double> x;
        for (int f : fields) x.push_back(std::log(topo::sizing_field(s, f)));
        return x;
    }
    bool inside(const std::vector<double>& x) const {
        for (std::size_t i = 0; i < fields.size(); ++i)
            if (!(x[i] >= lo[i] - 1e-12 && x[i] <= hi[i] + 1e-12)) return false;
        return true;
    }
    std::vector<double> random_point(std::mt19937_64& rng) const {
        std::vector<double> x;
        for (std::size_t i = 0; i < fields.size(); ++i) x.push_back(std::uniform_real_distribution<>(lo[i], hi[i])(rng));
        return x;
    }
};

FreeVars free_vars(const DesignSpec& spec, std::initializer_list<int> candidates) {
    FreeVars fv;
    for (int f : candidates) {
        const Bounds& b = spec.bounds[f];
        if (b.fixed()) continue;
        fv.fields.push_back(f);
        fv.lo.push_back(std::log(b.min));
        fv.hi.push_back(std::log(b.max));
    }
    return fv;
}

// Fields the input-side designers vary: C_1, L_E/L_1, C_2, L_B/L_2.
constexpr int kInputFields = 4;

// Template with pinned input fields set from the bounds and the rest clamped
// into range. OMN values are taken from the template as they are.
LnaSizing pinned(const DesignSpec& spec, LnaSizing s) {
    for (int i = 0; i < kInputFields; ++i) {
        double& v = topo::sizing_field(s, i);
        const Bounds& b = spec.bounds[i];
        v = b.fixed() ? b.min : std::clamp(v, b.min, b.max);
    }
    return s;
}

double total_inductance(const LnaSizing& s) {
    double t = 0.0;
    for (int i = 0; i < topo::kSizingFields; ++i)
        if (topo::is_inductor_field(i)) t += topo::sizing_field(s, i);
    return t;
}

double total_capacitance(const LnaSizing& s) {
    double t = 0.0;
    for (int i = 0; i < topo::kSizingFields; ++i)
        if (!topo::is_inductor_field(i)) t += topo::sizing_field(s, i);
    return t;
}

// Lower objective wins; near-ties go to less inductance, then less capacitance.
bool better(double ta, const LnaSizing& a, double tb, const LnaSizing& b) {
    if (!(std::abs(ta - tb) <= 1e-9 * std::max(std::abs(ta), std::abs(tb)))) return ta < tb;
    const double la = total_inductance(a), lb = total_inductance(b);
    if (la != lb) return la < lb;
    return total_capacitance(a) < total_capacitance(b);
}

class Problem {
public:
    Problem(const DesignSpec& spec, const DeviceConfig& dc)
        : spec_(spec), dc_(dc), st_(topo::active_stages(dc, spec.f0)) {}

    DesignPoint eval(const LnaSizing& s) const {
        try {
            const auto c = topo::assemble(s, st_, dc_.passives, spec_.f0, spec_.z_source, spec_.z_load);
            const double tn = noise::noise_temperature(noise::cascade_noisy(c.imn, c.an), spec_.z_source);
            const double s11 = net::db20(match_gamma(c));
            if (!std::isfinite(tn) || std::isnan(s11)) return {kInf, kInf, false};
            return {tn, s11, s11 <= spec_.match_tolerance_db};
        } catch (const Error&) {
            return {kInf, kInf, false};
        }
    }

    cplx match_gamma(const topo::LnaCircuit& c) const {
        const auto full = net::cascade(net::cascade(c.imn.net(), c.an.net()), c.omn.net());
        return power_wave_gamma(net::port_impedance(full, spec_.z_load, net::Side::Input), spec_.z_source);
    }

    cplx match_gamma(const LnaSizing& s) const {
        return match_gamma(topo::assemble(s, st_, dc_.passives, spec_.f0, spec_.z_source, spec_.z_load));
    }

private:
    const DesignSpec& spec_;
    const DeviceConfig& dc_;
    topo::ActiveStages st_;
};

void finish(DesignOutcome& o, const DesignSpec& spec, const DeviceConfig& dc) {
    o.f0 = spec.f0;
    o.seed = spec.seed;
    const DeviceConfig d = outcome_devices(o, dc);
    const auto row = topo::analyze_point(topo::build_lna(o.sizing, d, spec.f0, spec.z_source, spec.z_load));
    o.achieved = achieved_metrics(row);
    o.cascade_tn = Problem(spec, d).eval(o.sizing).cascade_tn;
}

}  // namespace

void DesignSpec::validate() const {
    if (!(f0 > 0.0) || !std::isfinite(f0)) throw Error(ErrorKind::InvalidArgument, "design frequency must be positive");
    if (!(z_source.real() > 0.0)) throw Error(ErrorKind::NonPassiveSource, "source impedance needs Re > 0");
    if (!(z_load.real() > 0.0)) throw Error(ErrorKind::NonPassiveSource, "load impedance needs Re > 0");
    if (!(match_tolerance_db < 0.0)) throw Error(ErrorKind::InvalidArgument, "match tolerance must be below 0 dB");
    if (!(area_trim >= 1.0)) throw Error(ErrorKind::InvalidArgument, "area trim must be >= 1");
    for (int i = 0; i < topo::kSizingFields; ++i) {
        const Bounds& b = bounds[i];
        const std::string name = topo::sizing_key(i);
        if (!std::isfinite(b.min) || !std::isfinite(b.max) || b.min < 0.0 || b.max < b.min)
            throw Error(ErrorKind::InvalidArgument, "bounds for " + name + " need 0 <= min <= max");
        if (b.min == 0.0 && b.max > 0.0)
            throw Error(ErrorKind::InvalidArgument, "bounds for " + name + " need a positive minimum");
    }
}

std::string to_string(Method m) {
    switch (m) {
        case Method::MPmN: return "mpmn";
        case Method::MPmCN: return "mpmcn";
        case Method::GridOracle: return "grid";
    }
    return "?";
}

Method method_from_string(const std::string& s) {
    if (s == "mpmn") return Method::MPmN;
    if (s == "mpmcn") return Method::MPmCN;
    if (s == "grid") return Method::GridOracle;
    throw Error(ErrorKind::InvalidArgument, "unknown design method '" + s + "' (expected mpmn or mpmcn)");
}

DeviceConfig outcome_devices(const DesignOutcome& o, const DeviceConfig& base) {
    DeviceConfig d = base;
    d.hbt.emitter_area *= o.area_scale;
    return d;
}

Achieved achieved_metrics(const topo::ReportRow& r) {
    return {r.s_db(1, 0), r.nf_db, r.mt0, r.eps_gn_db, r.s_db(0, 0), r.s_db(1, 1)};
}

DesignPoint evaluate_point(const DesignSpec& spec, const DeviceConfig& dc, const LnaSizing& s) {
    return Problem(spec, dc).eval(s);
}

// ---------------------------------------------------------------------------

DesignOutcome design_mpmn(const DesignSpec& spec, const DeviceConfig& dc, const LnaSizing& tmpl) {
    spec.validate();
    if (tmpl.topology != Topology::A)
        throw Error(ErrorKind::InvalidTopologyTag, "minimum-noise match needs a topology A template");
    const LnaSizing base = pinned(spec, tmpl);
    const FreeVars fv = free_vars(spec, {2, 1, 3});  // C_2, L_E, L_B
    const double trim = std::log(spec.area_trim);
    const bool trim_free = trim > 0.0;
    const std::size_t n = fv.size() + (trim_free ? 1 : 0);

    dev::PassiveModels ideal = dc.passives;
    ideal.lossless = true;
    const double f0 = spec.f0;
    const double zs_scale = std::abs(spec.z_source);

    auto unpack = [&](const std::vector<double>& x) {
        const std::vector<double> xs(x.begin(), x.begin() + static_cast<long>(fv.size()));
        return std::make_pair(fv.apply(base, xs), trim_free ? std::exp(x.back()) : 1.0);
    };
    auto residual = [&](const std::vector<double>& x) -> std::vector<double> {
        const auto [s, scale] = unpack(x);
        try {
            DeviceConfig d = dc;
            d.hbt.emitter_area *= scale;
            const auto st = topo::active_stages(d, f0);
            const NoisyTwoPort an = topo::degenerated_an(st, s.le_or_l1, s.c2, ideal, f0);
            const auto an_omn = net::cascade(an.net(), topo::build_omn(s, ideal, f0).net());
            const auto full = net::cascade(topo::build_imn_a(s, ideal, f0).net(), an_omn);
            const cplx zin_an = net::port_impedance(an_omn, spec.z_load, net::Side::Input);
            const cplx zin = net::port_impedance(full, spec.z_load, net::Side::Input);
            const cplx z_on = noise::tnmin_of(an).z_on;
            const cplx r1 = (z_on - std::conj(zin_an)) / zs_scale;
            const cplx r2 = (zin - std::conj(spec.z_source)) / zs_scale;
            return {r1.real(), r1.imag(), r2.real(), r2.imag()};
        } catch (const Error&) {
            return {kNaN, kNaN, kNaN, kNaN};
        }
    };
    auto inside = [&](const std::vector<double>& x) {
        const std::vector<double> xs(x.begin(), x.begin() + static_cast<long>(fv.size()));
        return fv.inside(xs) && (!trim_free || std::abs(x.back()) <= trim + 1e-12);
    };

    std::vector<std::vector<double>> starts;
    {
        auto x = fv.extract(base);
        if (trim_free) x.push_back(0.0);
        starts.push_back(x);
        std::mt19937_64 rng(spec.seed);
        for (int k = 0; k < 12; ++k) {
            auto r = fv.random_point(rng);
            if (trim_free) r.push_back(0.0);
            starts.push_back(r);
        }
    }

    std::vector<double> best_x = starts.front();
    double best = kInf;
    for (const auto& x0 : starts) {
        const auto sol = n > 0 ? opt::newton_solve(residual, x0, 1e-12, 80)
                               : opt::NewtonResult{x0, 0.0, true};
        const auto r = residual(sol.x);
        double worst = 0.0;
        for (double e : r) worst = std::max(worst, std::isnan(e) ? kInf : std::abs(e));
        if (!inside(sol.x)) continue;
        if (worst < best) {
            best = worst;
            best_x = sol.x;
        }
        if (best < 1e-9) break;
    }
    if (!(best < kMatchResidual))
        throw Error(ErrorKind::Infeasible, "no sizing within bounds meets the noise and power match; best residual " +
                                               (std::isfinite(best) ? io::fmt_sig(best, 3) : std::string("none")));

    DesignOutcome o;
    o.method = Method::MPmN;
    std::tie(o.sizing, o.area_scale) = unpack(best_x);
    o.residual = best;
    finish(o, spec, dc);
    return o;
}

// ---------------------------------------------------------------------------

namespace {

// Exact conjugate match at the input by adjusting C_1 and L_2, others held.
std::optional<LnaSizing> input_match(const Problem& p, const DesignSpec& spec, LnaSizing s, double c1_0,
                                     double l2_0) {
    const Bounds& bc = spec.bounds[0];
    const Bounds& bl = spec.bounds[3];
    auto residual = [&](const std::vector<double>& x) -> std::vector<double> {
        LnaSizing t = s;
        t.c1 = std::exp(x[0]);
        t.lb_or_l2 = std::exp(x[1]);
        try {
            const cplx g = p.match_gamma(t);
            return {g.real(), g.imag()};
        } catch (const Error&) {
            return {kNaN, kNaN};
        }
    };
    const auto sol = opt::newton_solve(residual, {std::log(c1_0), std::log(l2_0)}, 1e-11, 60);
    if (!sol.converged) return std::nullopt;
    s.c1 = std::exp(sol.x[0]);
    s.lb_or_l2 = std::exp(sol.x[1]);
    if (s.c1 < bc.min * (1 - 1e-12) || s.c1 > bc.max * (1 + 1e-12) || s.lb_or_l2 < bl.min * (1 - 1e-12) ||
        s.lb_or_l2 > bl.max * (1 + 1e-12))
        return std::nullopt;
    return s;
}

struct Candidate {
    LnaSizing s;
    double tn = kInf;
};

// Outer search over the fields in `outer` (subset of {L_1, C_2}) with the
// input match solved exactly for every trial.
Candidate outer_search(const Problem& p, const DesignSpec& spec, const LnaSizing& base,
                       std::initializer_list<int> outer) {
    const FreeVars fv = free_vars(spec, outer);
    Candidate best{base, kInf};
    if (spec.bounds[0].fixed() || spec.bounds[3].fixed()) return best;

    LnaSizing warm = base;
    auto objective = [&](const std::vector<double>& x) {
        if (!fv.inside(x)) return kInf;
        const LnaSizing trial = fv.apply(base, x);
        auto m = input_match(p, spec, trial, warm.c1, warm.lb_or_l2);
        if (!m) m = input_match(p, spec, trial, base.c1, base.lb_or_l2);
        if (!m) return kInf;
        const double tn = p.eval(*m).cascade_tn;
        if (better(tn, *m, best.tn, best.s)) best = {*m, tn};
        warm = *m;
        return tn;
    };

    if (fv.size() == 0) {
        objective({});
        return best;
    }
    const int per_dim = fv.size() == 1 ? 24 : 12;
    std::vector<std::vector<double>> axes;
    for (std::size_t i = 0; i < fv.size(); ++i) {
        std::vector<double> a;
        for (int k = 0; k < per_dim; ++k) a.push_back(fv.lo[i] + (fv.hi[i] - fv.lo[i]) * (k + 0.5) / per_dim);
        axes.push_back(a);
    }
    std::vector<double> x(fv.size());
    std::vector<double> x_best;
    double f_best = kInf;
    const std::size_t total = fv.size() == 1 ? per_dim : per_dim * per_dim;
    for (std::size_t idx = 0; idx < total; ++idx) {
        x[0] = axes[0][idx % per_dim];
        if (fv.size() > 1) x[1] = axes[1][idx / per_dim];
        const double f = objective(x);
        if (f < f_best) {
            f_best = f;
            x_best = x;
        }
    }
    if (x_best.empty()) return best;
    std::vector<double> step;
    for (std::size_t i = 0; i < fv.size(); ++i) step.push_back((fv.hi[i] - fv.lo[i]) / per_dim);
    warm = best.s;
    opt::nelder_mead(objective, x_best, step, {600, 1e-9, 1e-13});
    return best;
}

}  // namespace

DesignOutcome design_mpmcn(const DesignSpec& spec, const DeviceConfig& dc, const LnaSizing& tmpl,
                           const MpmcnOptions& opts, const DesignOutcome* reference) {
    spec.validate();
    if (tmpl.topology != Topology::B)
        throw Error(ErrorKind::InvalidTopologyTag, "minimum-cascade-noise match needs a topology B template");
    const Problem prob(spec, dc);
    const LnaSizing base = pinned(spec, tmpl);
    const FreeVars fv = free_vars(spec, {0, 1, 2, 3});
    const double tol = spec.match_tolerance_db;

    const Candidate one_d = outer_search(prob, spec, base, {1});
    const Candidate two_d = outer_search(prob, spec, base, {1, 2});

    std::vector<Candidate> feasible;
    auto consider = [&](const LnaSizing& s) {
        const DesignPoint pt = prob.eval(s);
        if (pt.feasible) feasible.push_back({s, pt.cascade_tn});
    };
    if (fv.size() == 0) consider(base);

    auto penalized = [&](const std::vector<double>& x) {
        if (!fv.inside(x)) return kInf;
        const DesignPoint pt = prob.eval(fv.apply(base, x));
        const double v = std::max(0.0, pt.s11_db - tol);
        return pt.cascade_tn + kPenalty * v * v;
    };

    // Starts: exact-match results, best cells of a coarse grid, seeded random points.
    std::vector<std::vector<double>> starts;
    const Candidate& primary = opts.outer == OuterSearch::TwoD ? two_d : one_d;
    const Candidate& secondary = opts.outer == OuterSearch::TwoD ? one_d : two_d;
    for (const Candidate* c : {&primary, &secondary})
        if (std::isfinite(c->tn)) {
            consider(c->s);
            if (fv.size() > 0) starts.push_back(fv.extract(c->s));
        }
    if (fv.size() > 0) {
        const int g = std::max(1, opts.seed_grid);
        std::size_t total = 1;
        for (std::size_t i = 0; i < fv.size(); ++i) total *= static_cast<std::size_t>(g);
        std::vector<double> values(total);
        auto point = [&](std::size_t idx) {
            std::vector<double> x(fv.size());
            for (std::size_t i = 0; i < fv.size(); ++i) {
                const int k = static_cast<int>(idx % g);
                idx /= g;
                x[i] = fv.lo[i] + (fv.hi[i] - fv.lo[i]) * (k + 0.5) / g;
            }
            return x;
        };
        parallel_for(total, [&](std::size_t i) { values[i] = penalized(point(i)); });
        std::vector<std::size_t> order(total);
        for (std::size_t i = 0; i < total; ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        for (int k = 0; k < opts.polish_starts && k < static_cast<int>(total); ++k)
            if (std::isfinite(values[order[k]])) starts.push_back(point(order[k]));
        std::mt19937_64 rng(spec.seed);
        for (int k = 0; k < opts.random_starts; ++k) starts.push_back(fv.random_point(rng));
    }

    std::vector<double> step(fv.size(), 0.15);
    for (const auto& x0 : starts) {
        auto r = opt::nelder_mead(penalized, x0, step, {3000, 1e-10, 1e-14});
        r = opt::nelder_mead(penalized, r.x, step, {3000, 1e-10, 1e-14});  // restart: a collapsed simplex can stall
        LnaSizing s = fv.apply(base, r.x);
        DesignPoint pt = prob.eval(s);
        if (!pt.feasible && std::isfinite(pt.cascade_tn) && prob.eval(fv.apply(base, x0)).feasible) {
            // Penalty optimum sits just outside the constraint: pull it back
            // onto the boundary along the segment from the feasible start.
            double lo = 0.0, hi = 1.0;
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (lo + hi);
                std::vector<double> xm(fv.size());
                for (std::size_t i = 0; i < fv.size(); ++i) xm[i] = x0[i] + mid * (r.x[i] - x0[i]);
                (prob.eval(fv.apply(base, xm)).feasible ? lo : hi) = mid;
            }
            std::vector<double> xb(fv.size());
            for (std::size_t i = 0; i < fv.size(); ++i) xb[i] = x0[i] + lo * (r.x[i] - x0[i]);
            s = fv.apply(base, xb);
        }
        consider(s);
    }

    if (feasible.empty())
        throw Error(ErrorKind::Infeasible, "input match of " + io::fmt_fixed(tol, 2) + " dB is unattainable within bounds");
    Candidate best = feasible.front();
    for (const auto& c : feasible)
        if (better(c.tn, c.s, best.tn, best.s)) best = c;

    DesignOutcome o;
    o.method = Method::MPmCN;
    o.sizing = best.s;
    o.outer_1d_tn = one_d.tn;
    o.outer_2d_tn = two_d.tn;
    finish(o, spec, dc);
    if (reference) o.non_improving = o.cascade_tn > reference->cascade_tn;
    return o;
}

// ---------------------------------------------------------------------------

OmnFragment design_omn(cplx z_out_an, const DesignSpec& spec, const dev::PassiveModels& pm, const LnaSizing& tmpl,
                       OmnFree free) {
    spec.validate();
    if (!(z_out_an.real() > 0.0)) throw Error(ErrorKind::InvalidArgument, "output impedance needs Re > 0");
    const double w = 2.0 * kPi * spec.f0;
    const int free_field = free == OmnFree::InductorLC ? 4 : 5;
    const cplx target = std::conj(z_out_an);
    const double scale = std::abs(spec.z_load);
    LnaSizing s = pinned(spec, tmpl);

    auto mismatch = [&](const LnaSizing& t) {
        const auto omn = topo::build_omn(t, pm, spec.f0);
        return (net::port_impedance(omn.net(), spec.z_load, net::Side::Input) - target) / scale;
    };

    if (std::abs(z_out_an - spec.z_load) <= 1e-9 * scale) {
        // Already matched: resonate the tank and let C_O pass through at its upper bound.
        s.co = spec.bounds[6].max;
        if (free == OmnFree::InductorLC)
            s.lc = 1.0 / (w * w * s.cc);
        else
            s.cc = 1.0 / (w * w * s.lc);
        return {s.lc, s.cc, s.co, std::abs(mismatch(s))};
    }

    const Bounds& bf = spec.bounds[free_field];
    const Bounds& bo = spec.bounds[6];
    auto residual = [&](const std::vector<double>& x) -> std::vector<double> {
        LnaSizing t = s;
        topo::sizing_field(t, free_field) = std::exp(x[0]);
        t.co = std::exp(x[1]);
        try {
            const cplx r = mismatch(t);
            return {r.real(), r.imag()};
        } catch (const Error&) {
            return {kNaN, kNaN};
        }
    };
    std::vector<std::vector<double>> starts{{std::log(topo::sizing_field(s, free_field)), std::log(s.co)}};
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j)
            starts.push_back({std::log(bf.min) + (std::log(bf.max) - std::log(bf.min)) * (i + 0.5) / 6,
                              std::log(bo.min) + (std::log(bo.max) - std::log(bo.min)) * (j + 0.5) / 6});
    double best = kInf;
    LnaSizing best_s = s;
    for (const auto& x0 : starts) {
        if (bf.fixed() || bo.fixed()) break;
        const auto sol = opt::newton_solve(residual, x0, 1e-12, 60);
        const double vf = std::exp(sol.x[0]), vo = std::exp(sol.x[1]);
        if (vf < bf.min * (1 - 1e-12) || vf > bf.max * (1 + 1e-12) || vo < bo.min * (1 - 1e-12) ||
            vo > bo.max * (1 + 1e-12) || !(sol.residual_norm < best))
            continue;
        best = sol.residual_norm;
        best_s = s;
        topo::sizing_field(best_s, free_field) = vf;
        best_s.co = vo;
        if (best < 1e-11) break;
    }
    if (!(best < kMatchResidual))
        throw Error(ErrorKind::Infeasible, "output match unattainable within bounds");
    return {best_s.lc, best_s.cc, best_s.co, std::abs(mismatch(best_s))};
}

// ---------------------------------------------------------------------------

std::vector<double> grid_axis(const Bounds& b, int n) {
    if (n < 1) throw Error(ErrorKind::InvalidArgument, "grid resolution must be at least 1");
    if (b.fixed() || n == 1) return {b.fixed() ? b.min : std::sqrt(b.min * b.max)};
    std::vector<double> a;
    const double l0 = std::log(b.min), l1 = std::log(b.max);
    for (int k = 0; k < n; ++k) a.push_back(std::exp(l0 + (l1 - l0) * k / (n - 1)));
    a.front() = b.min;
    a.back() = b.max;
    return a;
}

DesignOutcome grid_oracle(const DesignSpec& spec, const DeviceConfig& dc, const LnaSizing& tmpl, int n) {
    spec.validate();
    if (n < 1) throw Error(ErrorKind::InvalidArgument, "grid resolution must be at least 1");
    const LnaSizing base = pinned(spec, tmpl);
    std::vector<int> fields;
    std::vector<std::vector<double>> axes;
    double total_d = 1.0;
    for (int i = 0; i < kInputFields; ++i) {
        if (spec.bounds[i].fixed()) continue;
        fields.push_back(i);
        axes.push_back(grid_axis(spec.bounds[i], n));
        total_d *= static_cast<double>(axes.back().size());
    }
    if (total_d > kMaxGridPoints)
        throw Error(ErrorKind::GridTooLarge, fmt_double(total_d) + " grid points exceed the limit of " +
                                                 fmt_double(kMaxGridPoints));
    const auto total = static_cast<std::size_t>(total_d);
    auto sizing_at = [&](std::size_t idx) {
        LnaSizing s = base;
        for (std::size_t d = 0; d < fields.size(); ++d) {
            topo::sizing_field(s, fields[d]) = axes[d][idx % axes[d].size()];
            idx /= axes[d].size();
        }
        return s;
    };
    const Problem prob(spec, dc);
    std::vector<double> tn(total);
    parallel_for(total, [&](std::size_t i) {
        const DesignPoint pt = prob.eval(sizing_at(i));
        tn[i] = pt.feasible ? pt.cascade_tn : kInf;
    });
    std::size_t best = total;
    LnaSizing best_s = base;
    for (std::size_t i = 0; i < total; ++i) {
        if (!std::isfinite(tn[i])) continue;
        const LnaSizing s = sizing_at(i);
        if (best == total || better(tn[i], s, tn[best], best_s)) {
            best = i;
            best_s = s;
        }
    }
    if (best == total) throw Error(ErrorKind::Infeasible, "no grid point meets the input match");
    DesignOutcome o;
    o.method = Method::GridOracle;
    o.sizing = best_s;
    finish(o, spec, dc);
    return o;
}

// ---------------------------------------------------------------------------

void write_outcome(std::ostream& os, const DesignOutcome& o) {
    os << "# lna design outcome\n";
    if (o.has_sizing) {
        os << "topology = " << topo::to_string(o.sizing.topology) << '\n';
        for (int i = 0; i < topo::kSizingFields; ++i) {
            const double v = topo::sizing_field(o.sizing, i);
            os << topo::component_key(o.sizing.topology, i) << " = " << fmt_double(v) << "  # "
               << io::fmt_component(v, topo::is_inductor_field(i)) << '\n';
        }
    }
    os << "method = " << to_string(o.method) << '\n';
    os << "f0_hz = " << fmt_double(o.f0) << '\n';
    os << "seed = " << o.seed << '\n';
    os << "area_scale = " << fmt_double(o.area_scale) << '\n';
    os << "s21_db = " << fmt_double(o.achieved.s21_db) << '\n';
    os << "nf_db = " << fmt_double(o.achieved.nf_db) << '\n';
    os << "mt0_k = " << fmt_double(o.achieved.mt0_k) << '\n';
    os << "eps_gn_db = " << fmt_double(o.achieved.eps_gn_db) << '\n';
    os << "s11_db = " << fmt_double(o.achieved.s11_db) << '\n';
    os << "s22_db = " << fmt_double(o.achieved.s22_db) << '\n';
    os << "cascade_tn_k = " << fmt_double(o.cascade_tn) << '\n';
    os << "residual = " << fmt_double(o.residual) << '\n';
    os << "non_improving = " << (o.non_improving ? "true" : "false") << '\n';
    os << "outer_1d_tn_k = " << fmt_double(o.outer_1d_tn) << '\n';
    os << "outer_2d_tn_k = " << fmt_double(o.outer_2d_tn) << '\n';
}

std::string outcome_to_string(const DesignOutcome& o) {
    std::ostringstream os;
    write_outcome(os, o);
    return os.str();
}

namespace {

std::string at_line(int line) { return "line " + std::to_string(line) + ": "; }

double number(const io::KeyValue& kv) {
    char* end = nullptr;
    const double v = std::strtod(kv.value.c_str(), &end);
    if (kv.value.empty() || *end != '\0')
        throw Error(ErrorKind::Parse, at_line(kv.line) + "bad number '" + kv.value + "' for " + kv.key);
    return v;
}

// Fills sizing fields from kvs; returns how many component keys were seen.
// Keys in `extra` are accepted and skipped; anything else is rejected.
int collect_sizing(const std::vector<io::KeyValue>& kvs, LnaSizing& s, bool& has_topology,
                   const std::vector<std::string>& extra) {
    has_topology = false;
    for (const auto& kv : kvs)
        if (kv.key == "topology") {
            try {
                s.topology = topo::topology_from_string(kv.value);
            } catch (const Error& e) {
                throw Error(ErrorKind::Parse, at_line(kv.line) + e.detail());
            }
            has_topology = true;
        }
    int seen = 0;
    for (const auto& kv : kvs) {
        if (kv.key == "topology") continue;
        int field = -1;
        for (int i = 0; i < topo::kSizingFields; ++i)
            if (kv.key == topo::component_key(s.topology, i)) field = i;
        if (field >= 0) {
            try {
                topo::sizing_field(s, field) = io::parse_quantity(kv.value);
            } catch (const Error& e) {
                throw Error(ErrorKind::Parse, at_line(kv.line) + e.detail());
            }
            ++seen;
            continue;
        }
        if (std::find(extra.begin(), extra.end(), kv.key) == extra.end())
            throw Error(ErrorKind::Parse, at_line(kv.line) + "unknown key '" + kv.key + "'");
    }
    return seen;
}

const std::vector<std::string> kOutcomeKeys{"method",    "f0_hz",        "seed",     "area_scale",    "s21_db",
                                            "nf_db",     "mt0_k",        "eps_gn_db", "s11_db",       "s22_db",
                                            "cascade_tn_k", "residual", "non_improving", "outer_1d_tn_k",
                                            "outer_2d_tn_k"};

}  // namespace

DesignOutcome read_outcome(std::istream& is) {
    const auto kvs = io::parse_key_values(is);
    DesignOutcome o;
    bool has_topology = false;
    const int seen = collect_sizing(kvs, o.sizing, has_topology, kOutcomeKeys);
    if (seen != 0 && (seen != topo::kSizingFields || !has_topology))
        throw Error(ErrorKind::Parse, "outcome has a partial sizing (needs topology and all seven components)");
    o.has_sizing = seen == topo::kSizingFields;
    bool f0 = false, s21 = false, nf = false, mt0 = false;
    o.achieved = {kNaN, kNaN, kNaN, kNaN, kNaN, kNaN};
    for (const auto& kv : kvs) {
        const std::string& k = kv.key;
        if (k == "method") {
            try {
                o.method = method_from_string(kv.value);
            } catch (const Error& e) {
                throw Error(ErrorKind::Parse, at_line(kv.line) + e.detail());
            }
        } else if (k == "f0_hz") {
            o.f0 = number(kv);
            f0 = true;
        } else if (k == "seed") {
            o.seed = static_cast<std::uint64_t>(number(kv));
        } else if (k == "area_scale") {
            o.area_scale = number(kv);
        } else if (k == "s21_db") {
            o.achieved.s21_db = number(kv);
            s21 = true;
        } else if (k == "nf_db") {
            o.achieved.nf_db = number(kv);
            nf = true;
        } else if (k == "mt0_k") {
            o.achieved.mt0_k = number(kv);
            mt0 = true;
        } else if (k == "eps_gn_db") {
            o.achieved.eps_gn_db = number(kv);
        } else if (k == "s11_db") {
            o.achieved.s11_db = number(kv);
        } else if (k == "s22_db") {
            o.achieved.s22_db = number(kv);
        } else if (k == "cascade_tn_k") {
            o.cascade_tn = number(kv);
        } else if (k == "residual") {
            o.residual = number(kv);
        } else if (k == "non_improving") {
            if (kv.value != "true" && kv.value != "false")
                throw Error(ErrorKind::Parse, at_line(kv.line) + "non_improving must be true or false");
            o.non_improving = kv.value == "true";
        } else if (k == "outer_1d_tn_k") {
            o.outer_1d_tn = number(kv);
        } else if (k == "outer_2d_tn_k") {
            o.outer_2d_tn = number(kv);
        }
    }
    if (!f0 || !s21 || !nf || !mt0) throw Error(ErrorKind::Parse, "outcome needs f0_hz, s21_db, nf_db and mt0_k");
    if (!(o.f0 > 0.0)) throw Error(ErrorKind::Parse, "f0_hz must be positive");
    return o;
}

LnaSizing read_sizing(std::istream& is) {
    const auto kvs = io::parse_key_values(is);
    LnaSizing s;
    bool has_topology = false;
    const int seen = collect_sizing(kvs, s, has_topology, kOutcomeKeys);
    if (!has_topology) throw Error(ErrorKind::Parse, "sizing needs a topology key");
    if (seen != topo::kSizingFields) throw Error(ErrorKind::Parse, "sizing needs all seven component values");
    try {
        s.validate();
    } catch (const Error& e) {
        throw Error(ErrorKind::Parse, e.detail());
    }
    return s;
}

}  // namespace lna::design
