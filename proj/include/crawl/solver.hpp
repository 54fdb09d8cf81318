#pragma once

#include <vector>

#include "crawl/models.hpp"

namespace crawl {

struct SolverConfig {
    int steps_per_period = 4096;
    double resolvent_tol = 1e-12; // relative to 1 + |rhs|
    bool event_align = true;      // insert grid points at all signal breakpoints
    bool oracle_mode = false;     // dense explicit micro-stepping for cross-validation
    int oracle_refine = 100;
    double stick_eps = 1e-9;

    void validate() const;
};

/// Sampled solution (t_k, v_k) with the accumulated barycentre displacement
/// (trapezoid on v) and, per sample, the contacts currently in stiction.
struct Trajectory {
    std::vector<double> times;
    std::vector<double> velocities;
    std::vector<double> displacement;
    std::vector<std::vector<int>> stick;

    double final_velocity() const { return velocities.back(); }
    double final_displacement() const { return displacement.back(); }
};

/// One proximal implicit-explicit step: v' solves
///   v' + dt * A(t + dt, v')  ∋  v + dt * p(t + dt, v)
/// with A the aggregated monotone part of -G and p the Lipschitz part. Signal
/// values at t + dt are taken from the left so an event-aligned step never
/// reads past a switch.
double step(const ReducedDynamics& dyn, double t, double v, double dt, const SolverConfig& cfg);

/// Integrates v' in G(t, v) over [t0, t1] on a uniform grid of
/// steps_per_period per period, refined with all signal breakpoints.
Trajectory integrate(const ReducedDynamics& dyn, double v0, double t0, double t1,
                     const SolverConfig& cfg);

/// The Poincare time map: value at t = T of the solution from (0, v0).
double poincare(const ReducedDynamics& dyn, double v0, const SolverConfig& cfg);

/// [Phi(v0), Phi^2(v0), ..., Phi^k(v0)] from one continuous integration.
std::vector<double> poincare_iterates(const ReducedDynamics& dyn, double v0, int k,
                                      const SolverConfig& cfg);

/// One period of stepping with all signal values frozen per grid node; apply()
/// is the Poincare map. Reusable because the dynamics is T-periodic.
class PeriodMap {
public:
    PeriodMap(const ReducedDynamics& dyn, const SolverConfig& cfg);
    double apply(double v) const;
    double apply(double v, int iterations) const;
    int steps() const { return static_cast<int>(frozen_.size()); }

private:
    std::vector<FrozenDynamics> frozen_;
    std::vector<double> dt_;
    double resolvent_tol_;
};

namespace detail {

/// Step times over [t0, t1]: uniform grid plus (optionally) every signal
/// breakpoint shifted by whole periods. Always contains t0 and t1.
std::vector<double> step_times(const ReducedDynamics& dyn, double t0, double t1,
                               const SolverConfig& cfg);

double implicit_step(const FrozenDynamics& frozen, double v, double dt, double tol_rel);

} // namespace detail

} // namespace crawl
