#include "crawl/solver.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "crawl/errors.hpp"

namespace crawl {

void SolverConfig::validate() const {
    if (steps_per_period < 16) throw ConfigError("steps_per_period must be at least 16");
    if (!(resolvent_tol > 0.0)) throw ConfigError("resolvent_tol must be positive");
    if (oracle_refine < 1) throw ConfigError("oracle_refine must be at least 1");
}

namespace detail {

std::vector<double> step_times(const ReducedDynamics& dyn, double t0, double t1,
                               const SolverConfig& cfg) {
    const double T = dyn.period();
    // refine the uniform grid until the explicit part satisfies dt * L <= 0.5
    int n = cfg.steps_per_period;
    const double lip = dyn.perturbation_lipschitz();
    if (lip > 0.0) n = std::max(n, static_cast<int>(std::ceil(2.0 * lip * T)) + 1);

    std::vector<double> ts;
    const double span = t1 - t0;
    const long steps = std::lround(std::ceil(span / T * n));
    ts.reserve(steps + 16);
    for (long i = 0;; ++i) {
        const double t = t0 + static_cast<double>(i) * T / n;
        if (t >= t1) break;
        ts.push_back(t);
    }
    ts.push_back(t1);

    if (cfg.event_align) {
        const double tol = 1e-12 * std::max(1.0, T);
        for (double bp : dyn.time_breakpoints()) {
            for (double base = std::floor(t0 / T) * T; base + bp < t1; base += T) {
                const double e = base + bp;
                if (e > t0 + tol && e < t1 - tol) ts.push_back(e);
            }
        }
        std::sort(ts.begin(), ts.end());
        std::vector<double> dedup;
        dedup.reserve(ts.size());
        for (double t : ts)
            if (dedup.empty() || t - dedup.back() > tol) dedup.push_back(t);
        if (dedup.back() != t1) dedup.back() = t1;
        ts = std::move(dedup);
    }
    return ts;
}

namespace {

double proximal_solve(const FrozenDynamics& frozen, const std::vector<double>& candidates,
                      double v, double dt, double tol_rel) {
    const double rhs = v + dt * frozen.perturbation(v);
    auto map = [&frozen, dt](double x) { return dt * frozen.monotone_part(x); };
    const double tol = tol_rel * (1.0 + std::abs(rhs));
    const double halfwidth = dt * (frozen.monotone_part(rhs).max_abs() + 1.0) + tol;
    return crawl::detail::solve_shifted_monotone(map, rhs, halfwidth, candidates, tol);
}

// First kink of A(.) strictly between the step endpoints, nearest to the start.
std::optional<double> first_crossed_kink(const std::vector<double>& candidates, double from,
                                         double to) {
    std::optional<double> hit;
    for (double c : candidates) {
        if (from < to ? (c > from && c < to) : (c < from && c > to)) {
            if (!hit || std::abs(c - from) < std::abs(*hit - from)) hit = c;
        }
    }
    return hit;
}

} // namespace

double implicit_step(const FrozenDynamics& frozen, double v, double dt, double tol_rel) {
    const std::vector<double> candidates = frozen.monotone_candidates();
    double target = proximal_solve(frozen, candidates, v, dt, tol_rel);
    // A step that crosses a kink of A without resting there would smear the
    // slope change over the whole step; split it at the crossing instead. The
    // landing time comes from the implicit relation on the approach branch, so
    // the composed map stays monotone in v.
    for (int guard = 0; guard < 8; ++guard) {
        const std::optional<double> kink = first_crossed_kink(candidates, v, target);
        if (!kink) return target;
        const double c = *kink;
        const ValueInterval a_c = frozen.monotone_part(c);
        const double denom = (v > c ? a_c.hi : a_c.lo) - frozen.perturbation(v);
        const double theta = (v - c) / denom;
        if (!(theta > 0.0) || theta >= dt) return target;
        v = c;
        dt -= theta;
        target = proximal_solve(frozen, candidates, v, dt, tol_rel);
    }
    return target;
}

} // namespace detail

namespace {

void check_step_size(const ReducedDynamics& dyn, double dt) {
    const double lip = dyn.perturbation_lipschitz();
    if (dt * lip > 0.5 + 1e-12) {
        std::ostringstream os;
        os << "explicit substep too large: dt*L = " << dt * lip << " > 0.5";
        throw ConfigError(os.str());
    }
}

std::vector<int> stick_indices(const FrozenDynamics& frozen, double v, double eps) {
    std::vector<int> out;
    for (size_t i = 0; i < frozen.laws.size(); ++i)
        if (std::abs(v + frozen.laws[i].shape_velocity) < eps) out.push_back(static_cast<int>(i));
    return out;
}

// Explicit micro-stepping oracle: minimal-norm selection from G, with clamping
// onto a stiction abscissa whenever the step crosses one that admits rest.
double oracle_step(const ReducedDynamics& dyn, double t, double v, double dt) {
    const FrozenDynamics here = dyn.freeze(t, Side::Right);
    const ValueInterval g = here.dynamics(v);
    double slope = 0.0;
    if (g.lo > 0.0)
        slope = g.lo;
    else if (g.hi < 0.0)
        slope = g.hi;
    double next = v + dt * slope;
    if (slope != 0.0) {
        const FrozenDynamics there = dyn.freeze(t + dt, Side::Right);
        const double lo = std::min(v, next), hi = std::max(v, next);
        for (double b : there.velocity_breakpoints()) {
            if (b >= lo && b <= hi && there.dynamics(b).contains(0.0)) {
                next = b;
                break;
            }
        }
    }
    return next;
}

Trajectory integrate_oracle(const ReducedDynamics& dyn, double v0, double t0, double t1,
                            const SolverConfig& cfg) {
    const std::vector<double> ts = detail::step_times(dyn, t0, t1, cfg);
    Trajectory traj;
    traj.times = ts;
    traj.velocities.resize(ts.size());
    traj.displacement.resize(ts.size());
    traj.stick.resize(ts.size());
    double v = v0, x = 0.0;
    traj.velocities[0] = v;
    traj.displacement[0] = 0.0;
    traj.stick[0] = stick_indices(dyn.freeze(t0), v, cfg.stick_eps);
    for (size_t k = 1; k < ts.size(); ++k) {
        const double macro = ts[k] - ts[k - 1];
        const double micro = macro / cfg.oracle_refine;
        double tk = ts[k - 1];
        for (int j = 0; j < cfg.oracle_refine; ++j) {
            const double next = oracle_step(dyn, tk, v, micro);
            x += 0.5 * micro * (v + next);
            v = next;
            tk += micro;
        }
        traj.velocities[k] = v;
        traj.displacement[k] = x;
        traj.stick[k] = stick_indices(dyn.freeze(ts[k]), v, cfg.stick_eps);
    }
    return traj;
}

} // namespace

double step(const ReducedDynamics& dyn, double t, double v, double dt, const SolverConfig& cfg) {
    cfg.validate();
    if (!(dt > 0.0)) throw ConfigError("step size must be positive");
    check_step_size(dyn, dt);
    return detail::implicit_step(dyn.freeze(t + dt, Side::Left), v, dt, cfg.resolvent_tol);
}

Trajectory integrate(const ReducedDynamics& dyn, double v0, double t0, double t1,
                     const SolverConfig& cfg) {
    cfg.validate();
    if (!(t1 > t0)) throw ConfigError("integration window must be forward in time");
    if (cfg.oracle_mode) return integrate_oracle(dyn, v0, t0, t1, cfg);

    const std::vector<double> ts = detail::step_times(dyn, t0, t1, cfg);
    Trajectory traj;
    traj.times = ts;
    traj.velocities.resize(ts.size());
    traj.displacement.resize(ts.size());
    traj.stick.resize(ts.size());
    double v = v0, x = 0.0;
    traj.velocities[0] = v;
    traj.displacement[0] = 0.0;
    traj.stick[0] = stick_indices(dyn.freeze(t0), v, cfg.stick_eps);
    for (size_t k = 1; k < ts.size(); ++k) {
        const double dt = ts[k] - ts[k - 1];
        const FrozenDynamics frozen = dyn.freeze(ts[k], Side::Left);
        const double next = detail::implicit_step(frozen, v, dt, cfg.resolvent_tol);
        x += 0.5 * dt * (v + next);
        v = next;
        traj.velocities[k] = v;
        traj.displacement[k] = x;
        traj.stick[k] = stick_indices(dyn.freeze(ts[k]), v, cfg.stick_eps);
    }
    return traj;
}

PeriodMap::PeriodMap(const ReducedDynamics& dyn, const SolverConfig& cfg)
    : resolvent_tol_(cfg.resolvent_tol) {
    cfg.validate();
    const std::vector<double> ts = detail::step_times(dyn, 0.0, dyn.period(), cfg);
    frozen_.reserve(ts.size() - 1);
    dt_.reserve(ts.size() - 1);
    for (size_t k = 1; k < ts.size(); ++k) {
        frozen_.push_back(dyn.freeze(ts[k], Side::Left));
        dt_.push_back(ts[k] - ts[k - 1]);
        check_step_size(dyn, dt_.back());
    }
}

double PeriodMap::apply(double v) const {
    for (size_t k = 0; k < frozen_.size(); ++k)
        v = detail::implicit_step(frozen_[k], v, dt_[k], resolvent_tol_);
    return v;
}

double PeriodMap::apply(double v, int iterations) const {
    for (int i = 0; i < iterations; ++i) v = apply(v);
    return v;
}

double poincare(const ReducedDynamics& dyn, double v0, const SolverConfig& cfg) {
    if (cfg.oracle_mode) return integrate(dyn, v0, 0.0, dyn.period(), cfg).final_velocity();
    return PeriodMap(dyn, cfg).apply(v0);
}

std::vector<double> poincare_iterates(const ReducedDynamics& dyn, double v0, int k,
                                      const SolverConfig& cfg) {
    if (k < 1) throw ConfigError("iterate count must be at least 1");
    std::vector<double> out;
    out.reserve(k);
    if (cfg.oracle_mode) {
        double v = v0;
        for (int i = 0; i < k; ++i) {
            v = integrate(dyn, v, 0.0, dyn.period(), cfg).final_velocity();
            out.push_back(v);
        }
        return out;
    }
    const PeriodMap map(dyn, cfg);
    double v = v0;
    for (int i = 0; i < k; ++i) {
        v = map.apply(v);
        out.push_back(v);
    }
    return out;
}

} // namespace crawl
