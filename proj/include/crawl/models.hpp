#pragma once

#include <optional>
#include <string>
#include <vector>

#include "crawl/friction.hpp"
#include "crawl/interval.hpp"
#include "crawl/signals.hpp"

namespace crawl {

enum class ModelKind { Discrete, Continuous };
enum class DynamicsClass { NonMonotone, Monotone, StrictlyMonotone, SmoothDry };

std::string to_string(DynamicsClass c);

/// Chain of point masses on a line with prescribed shape velocities w_i = dz_i/dt,
/// per-mass friction laws and an external load applied to the barycentre.
struct DiscreteCrawler {
    double period = 0.0;
    std::vector<double> masses;
    std::vector<PeriodicSignal> shape_velocities;
    std::vector<FrictionLaw> laws;
    PeriodicSignal load;
    double r_margin = 1e-6;
};

/// One-dimensional continuum on Omega = [a, b] with piecewise-constant density,
/// a prescribed deformation-rate field and a friction-density field, all given
/// per cell of a common spatial partition.
struct ContinuousCrawler {
    double period = 0.0;
    std::vector<double> partition; // cell boundaries, x0 < x1 < ... < xK
    std::vector<double> density;   // per cell
    std::vector<PeriodicSignal> deformation_rate; // phi-dot per cell
    std::vector<FrictionLaw> law_field;           // per cell
    std::vector<double> phi0;                     // phi(0, .) per cell
    PeriodicSignal load;
    int nodes_per_cell = 8;
    std::optional<std::pair<double, double>> phi_bounds;
    double r_margin = 1e-6;

    double omega_a() const { return partition.front(); }
    double omega_b() const { return partition.back(); }
};

/// Dissipativity bounds of the reduced dynamics: the velocity threshold R, the
/// per-period decay envelopes and the invariant box [v_minus, v_plus].
struct Bounds {
    double R = 0.0;
    TimeFunction ell_minus, ell_plus;
    double v_minus = 0.0, v_plus = 0.0;
    double integral_plus = 0.0;  // int_0^T (B + sum ell_i^+), must be < 0
    double integral_minus = 0.0; // int_0^T (B - sum ell_i^-), must be > 0
    bool dissipative = false;
};

/// One weighted friction contact: a discrete mass or a spatial quadrature node.
struct Contribution {
    double weight = 1.0;
    PeriodicSignal shape_velocity;
    FrictionLaw law;
    double sup_speed = 0.0; // sup_t |shape_velocity|
};

struct FrozenLaw {
    double weight;
    double shape_velocity;
    double mu_v, mu_plus, mu_minus;
    const PiecewiseLinearMonotone* extra;
    const Perturbation* psi;
};

/// Signal values of the dynamics frozen at one instant; evaluation in v is
/// pure arithmetic. G(v) = -A(v) + p(v) with A monotone increasing.
struct FrozenDynamics {
    double time = 0.0;
    double load = 0.0;
    double inv_mass = 1.0;
    std::vector<FrozenLaw> laws;

    ValueInterval monotone_part(double v) const; // A(v)
    double perturbation(double v) const;         // p(v)
    ValueInterval dynamics(double v) const;      // G(v)
    std::vector<double> velocity_breakpoints() const;
    std::vector<double> monotone_candidates() const; // all kinks of A in v
};

/// The interval-valued right-hand side G(t, v) of the reduced barycentre
/// dynamics, with its monotone decomposition, classification and bounds.
class ReducedDynamics {
public:
    double period() const { return period_; }
    double mass() const { return mass_; }
    ModelKind kind() const { return kind_; }
    DynamicsClass flag() const { return flag_; }
    const Bounds& bounds() const { return bounds_; }
    const std::vector<Contribution>& parts() const { return parts_; }
    const PeriodicSignal& load() const { return load_; }
    const std::vector<double>& time_breakpoints() const { return time_breakpoints_; }
    const std::vector<std::string>& warnings() const { return warnings_; }

    /// Aggregate Lipschitz constant of the explicit part (1/M)(B + sum psi_i).
    double perturbation_lipschitz() const { return lipschitz_p_; }

    ValueInterval operator()(double t, double v, Side side = Side::Right) const;
    FrozenDynamics freeze(double t, Side side = Side::Right) const;

    /// Sorted stiction abscissae {-w_i(t)} at time t.
    std::vector<double> velocity_breakpoints(double t, Side side = Side::Right) const;

private:
    friend ReducedDynamics reduce_discrete(const DiscreteCrawler&);
    friend ReducedDynamics reduce_continuous(const ContinuousCrawler&);

    void finalize(double u_threshold);

    double period_ = 0.0;
    double mass_ = 1.0;
    ModelKind kind_ = ModelKind::Discrete;
    DynamicsClass flag_ = DynamicsClass::Monotone;
    PeriodicSignal load_;
    std::vector<Contribution> parts_;
    Bounds bounds_;
    std::vector<double> time_breakpoints_;
    std::vector<std::string> warnings_;
    double lipschitz_p_ = 0.0;
};

/// Builds G(t,v) = (1/M)(B(t) + sum_i F_i(t, v + w_i(t))).
ReducedDynamics reduce_discrete(const DiscreteCrawler& crawler);

/// Builds G(t,v) = (1/M)(B(t) + int_Omega f(t,xi, v + zdot(t,xi)) dxi) by
/// composite two-point Gauss quadrature with cells split at the partition.
ReducedDynamics reduce_continuous(const ContinuousCrawler& crawler);

/// zdot(t, xi): relative velocity of the material point xi w.r.t. the barycentre,
/// from the closed-form double integral of the deformation rate.
double relative_velocity(const ContinuousCrawler& crawler, double t, double xi);

/// The set {v : 0 in G(t,v)} within [v_minus, v_plus]; one interval for
/// monotone flags (bisection), otherwise a grid scan of the stated resolution.
std::vector<ValueInterval> zero_set(const ReducedDynamics& dyn, double t, int grid_n = 10000);

} // namespace crawl
