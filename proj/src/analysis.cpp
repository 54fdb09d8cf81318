#include "crawl/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "crawl/errors.hpp"

namespace crawl {

std::string to_string(StabilityClass c) {
    switch (c) {
    case StabilityClass::Stable: return "stable";
    case StabilityClass::SemistableLeft: return "semistable-left";
    case StabilityClass::SemistableRight: return "semistable-right";
    case StabilityClass::Unstable: return "unstable";
    }
    return "?";
}

// --- attractor bracket ------------------------------------------------------------

AttractorReport attractor_bracket(const ReducedDynamics& dyn, const SolverConfig& cfg, double tol,
                                  int kmax) {
    if (!dyn.bounds().dissipative)
        throw DissipativityError("dissipativity check failed: the attractor is not certified");
    if (!(tol > 0.0) || kmax < 1) throw ConfigError("attractor tolerance and kmax must be positive");

    const PeriodMap map(dyn, cfg);
    AttractorReport rep;
    rep.tolerance = tol;

    auto iterate = [&](double start, bool increasing, std::vector<double>& log) {
        double v = start;
        log.push_back(v);
        for (int k = 0; k < kmax; ++k) {
            const double next = map.apply(v);
            log.push_back(next);
            const double drift = increasing ? v - next : next - v;
            if (drift > 1e-9) {
                std::ostringstream os;
                os << "Poincare iterates from " << start << " are not "
                   << (increasing ? "nondecreasing" : "nonincreasing") << " (step " << k
                   << ": " << v << " -> " << next << ")";
                throw NumericalError(os.str());
            }
            const bool settled = std::abs(next - v) < tol;
            v = next;
            if (settled) return true;
        }
        return false;
    };

    const bool lo_ok = iterate(dyn.bounds().v_minus, true, rep.iterates_lo);
    const bool hi_ok = iterate(dyn.bounds().v_plus, false, rep.iterates_hi);
    rep.converged = lo_ok && hi_ok;
    rep.alpha = rep.iterates_lo.back();
    rep.beta = rep.iterates_hi.back();
    rep.iterations = static_cast<int>(
        std::max(rep.iterates_lo.size(), rep.iterates_hi.size()) - 1);
    rep.bracket_width = rep.beta - rep.alpha;
    return rep;
}

// --- fixed points ------------------------------------------------------------------

namespace {

double refine_sign_change(const std::function<double(double)>& g, double a, double b, double ga,
                          double tol) {
    // g(a) and g(b) have opposite signs
    while (b - a > tol) {
        const double m = 0.5 * (a + b);
        const double gm = g(m);
        if (gm == 0.0) return m;
        if ((gm > 0.0) == (ga > 0.0))
            a = m;
        else
            b = m;
    }
    return 0.5 * (a + b);
}

double refine_plateau_edge(const std::function<double(double)>& g, double inside, double outside,
                           double tol, double run_tol) {
    while (std::abs(outside - inside) > tol) {
        const double m = 0.5 * (inside + outside);
        if (std::abs(g(m)) <= run_tol)
            inside = m;
        else
            outside = m;
    }
    return inside;
}

} // namespace

FixedPointReport fixed_points(const ReducedDynamics& dyn, const AttractorReport& report,
                              int grid_n, double tol, const SolverConfig& cfg) {
    if (!report.converged) throw ConfigError("fixed_points needs a converged attractor bracket");
    if (grid_n < 8) throw ConfigError("fixed-point grid needs at least 8 points");

    const PeriodMap map(dyn, cfg);
    auto g = [&map](double v) { return map.apply(v) - v; };

    const double lo = report.alpha - tol;
    const double hi = report.beta + tol;
    const double h = (hi - lo) / grid_n;

    FixedPointReport rep;
    rep.grid_resolution = h;
    rep.tolerance = tol;

    std::vector<double> gv(grid_n + 1);
    for (int i = 0; i <= grid_n; ++i) gv[i] = g(lo + i * h);

    const double plateau_min_width = std::max(2.0 * h, 4.0 * tol);
    std::vector<double> isolated;

    int i = 0;
    while (i <= grid_n) {
        if (std::abs(gv[i]) <= tol) {
            int j = i;
            while (j + 1 <= grid_n && std::abs(gv[j + 1]) <= tol) ++j;
            double a = lo + i * h, b = lo + j * h;
            // refine both edges against the neighbouring out-of-run points
            if (i > 0) a = refine_plateau_edge(g, a, a - h, tol, tol);
            if (j < grid_n) b = refine_plateau_edge(g, b, b + h, tol, tol);
            if (b - a >= plateau_min_width)
                rep.plateaus.push_back({a, b});
            else
                isolated.push_back(0.5 * (a + b));
            i = j + 1;
        } else {
            if (i > 0 && std::abs(gv[i - 1]) > tol && (gv[i] > 0.0) != (gv[i - 1] > 0.0))
                isolated.push_back(
                    refine_sign_change(g, lo + (i - 1) * h, lo + i * h, gv[i - 1], tol));
            ++i;
        }
    }

    // alpha and beta are fixed points of the map by construction
    isolated.push_back(report.alpha);
    isolated.push_back(report.beta);
    std::sort(isolated.begin(), isolated.end());

    auto inside_plateau = [&](double v) {
        for (const ValueInterval& p : rep.plateaus)
            if (v >= p.lo - plateau_min_width && v <= p.hi + plateau_min_width) return true;
        return false;
    };

    const double probe = std::max(2.0 * h, 16.0 * tol);
    for (double v : isolated) {
        if (inside_plateau(v)) continue;
        if (!rep.points.empty() && v - rep.points.back().v < plateau_min_width) continue;
        const double left = g(v - probe);
        const double right = g(v + probe);
        StabilityClass cls;
        if (left > 0.0 && right < 0.0)
            cls = StabilityClass::Stable;
        else if (left < 0.0 && right > 0.0)
            cls = StabilityClass::Unstable;
        else if (left > 0.0)
            cls = StabilityClass::SemistableLeft;
        else
            cls = StabilityClass::SemistableRight;
        rep.points.push_back({v, cls});
    }
    return rep;
}

// --- limit cycle ---------------------------------------------------------------------

LimitCycle limit_cycle(const ReducedDynamics& dyn, double v_star, const SolverConfig& cfg,
                       double periodicity_tol) {
    LimitCycle cycle;
    cycle.orbit = integrate(dyn, v_star, 0.0, dyn.period(), cfg);
    const double drift = std::abs(cycle.orbit.final_velocity() - v_star);
    if (drift > periodicity_tol) {
        std::ostringstream os;
        os << "starting point is not fixed: |Phi_T(v) - v| = " << drift << " > "
           << periodicity_tol;
        throw ConfigError(os.str());
    }
    cycle.gamma = cycle.orbit.final_displacement();
    cycle.average_velocity = cycle.gamma / dyn.period();
    return cycle;
}

// --- Gamma order statistics -------------------------------------------------------------

GammaDiagnostics gamma_order_stats(const std::vector<PeriodicSignal>& w, int grid_n) {
    if (w.empty()) throw ConfigError("gamma_order_stats needs at least one signal");
    const double T = w.front().period();
    GammaDiagnostics diag;
    for (size_t i = 0; i < w.size(); ++i) {
        if (w[i].period() != T) throw ConfigError("signals must share one period");
        diag.continuous_input.push_back(w[i].continuous());
        const double mean = w[i].mean();
        if (std::abs(mean) > 1e-8 * std::max(1.0, w[i].max_abs())) {
            std::ostringstream os;
            os << "input " << i << " has nonzero mean " << mean;
            diag.warnings.push_back(os.str());
        }
    }

    diag.grid.reserve(grid_n + 8);
    for (int k = 0; k < grid_n; ++k) diag.grid.push_back(k * T / grid_n);
    for (const PeriodicSignal& s : w)
        for (double bp : s.breakpoints()) diag.grid.push_back(bp);
    std::sort(diag.grid.begin(), diag.grid.end());
    diag.grid.erase(std::unique(diag.grid.begin(), diag.grid.end()), diag.grid.end());

    const size_t n = w.size();
    diag.gamma.assign(n, std::vector<double>(diag.grid.size()));
    std::vector<double> values(n);
    for (size_t k = 0; k < diag.grid.size(); ++k) {
        for (size_t i = 0; i < n; ++i) values[i] = -w[i](diag.grid[k]);
        std::sort(values.begin(), values.end());
        for (size_t j = 0; j < n; ++j) diag.gamma[j][k] = values[j];
    }
    diag.min_gap.assign(n > 1 ? n - 1 : 0, std::numeric_limits<double>::infinity());
    for (size_t j = 0; j + 1 < n; ++j)
        for (size_t k = 0; k < diag.grid.size(); ++k)
            diag.min_gap[j] = std::min(diag.min_gap[j], diag.gamma[j + 1][k] - diag.gamma[j][k]);
    return diag;
}

// --- dissipativity and classification ------------------------------------------------------

DissipativityReport dissipativity_check(const ReducedDynamics& dyn) {
    const Bounds& b = dyn.bounds();
    return {b.dissipative, b.integral_plus, b.integral_minus};
}

Classification classify_dynamics(const ReducedDynamics& dyn) {
    Classification cls;
    const bool continuous = dyn.kind() == ModelKind::Continuous;
    switch (dyn.flag()) {
    case DynamicsClass::NonMonotone:
        cls.theorem = continuous ? "Cgen" : "Dgen";
        cls.uniqueness_predicted = false;
        cls.reasons.push_back("a non-monotone perturbation is present; the dynamics is "
                              "asymptotically periodic but the limit may depend on the start");
        break;
    case DynamicsClass::StrictlyMonotone:
        cls.theorem = continuous ? "Cstrict" : "Dstrict";
        cls.uniqueness_predicted = true;
        cls.reasons.push_back("a strictly monotone friction component makes the periodic "
                              "solution unique");
        break;
    case DynamicsClass::SmoothDry:
        cls.theorem = continuous ? "Cdry" : "Dmonot_reg";
        cls.uniqueness_predicted = true;
        cls.reasons.push_back(
            continuous
                ? "dry friction with mu+ + mu- > 0 across the body: unique limit cycle"
                : "dry friction with continuous nonzero coefficients and continuous shape "
                  "velocities: unique limit cycle");
        break;
    case DynamicsClass::Monotone:
        cls.theorem = continuous ? "Cgen" : "Dmonot";
        cls.uniqueness_predicted = false;
        cls.reasons.push_back("monotone decreasing dynamics: the attractor is an interval of "
                              "periodic solutions, possibly nondegenerate");
        if (continuous)
            cls.reasons.push_back("the dry uniqueness regime does not apply (coefficients "
                                  "vanish somewhere or the dry-only dissipativity fails)");
        break;
    }
    if (!dyn.bounds().dissipative)
        cls.reasons.push_back("dissipativity fails; no attractor is certified");
    return cls;
}

} // namespace crawl
