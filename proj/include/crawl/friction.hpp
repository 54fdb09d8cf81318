#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "crawl/interval.hpp"
#include "crawl/signals.hpp"

namespace crawl {

enum class LawClass { DryOnly, Monotone, StrictlyMonotone, NonMonotone };

std::string to_string(LawClass c);

/// Continuous piecewise-linear nondecreasing function of the sliding velocity,
/// extrapolated with the end slopes. Normalised so that it vanishes at u = 0.
struct PiecewiseLinearMonotone {
    std::vector<double> knots;
    std::vector<double> values;

    PiecewiseLinearMonotone(std::vector<double> u, std::vector<double> y);
    double operator()(double u) const;
    bool strictly_increasing() const;
};

/// Single-valued bounded perturbation psi(t, u), Lipschitz in u. Carries its
/// declared Lipschitz constant and sup-norm bound; both are required.
struct Perturbation {
    std::function<double(double, double)> fn;
    double lipschitz = 0.0;
    double bound = 0.0;
    std::string descriptor;

    double operator()(double t, double u) const { return fn(t, u); }
};

/// Declared tail envelopes for laws whose decay cannot be derived from the
/// split fields: F(t,u) <= ell_plus(t) for u >= threshold and
/// F(t,u) >= -ell_minus(t) for u <= -threshold.
struct TailBounds {
    PeriodicSignal ell_minus;
    PeriodicSignal ell_plus;
    double threshold = 0.0;
};

/// Time-periodic set-valued friction force/velocity law stored in split form:
///   F(t,u) = -mu_v(t) u - dry(t,u) - extra(u) + psi(t,u)
/// with dry(t,u) = {mu_plus(t)} for u > 0, {-mu_minus(t)} for u < 0 and
/// [-mu_minus(t), mu_plus(t)] for u = 0. Everything except psi is maximal
/// monotone decreasing; psi is the Lipschitz perturbation.
class FrictionLaw {
public:
    static FrictionLaw dry(PeriodicSignal mu_plus, PeriodicSignal mu_minus);
    static FrictionLaw viscous(PeriodicSignal mu_v);
    static FrictionLaw bingham(PeriodicSignal mu_v, PeriodicSignal mu_plus, PeriodicSignal mu_minus);
    /// Dry friction with the sinusoidal Stribeck dip
    /// psi(u) = amplitude * sin(pi u / half_width) on (-half_width, half_width).
    static FrictionLaw stribeck(PeriodicSignal mu_plus, PeriodicSignal mu_minus, double amplitude,
                                double half_width);

    FrictionLaw& with_extra(PiecewiseLinearMonotone extra);
    FrictionLaw& with_perturbation(Perturbation psi);
    FrictionLaw& with_tail_bounds(TailBounds tails);

    /// The value set F(t, u).
    ValueInterval operator()(double t, double u) const;

    /// A(t,u) = mu_v(t) u + dry(t,u) + extra(u): the maximal monotone
    /// increasing part, so that F = -A + psi.
    ValueInterval monotone_part(double t, double u) const;

    /// The unique u with rhs in u + step * A(t, u), found by bisection on the
    /// strictly increasing interval-valued map with an exact membership test at
    /// the jump abscissae. Firmly nonexpansive in rhs.
    double resolvent(double t, double step, double rhs, double tol_rel = 1e-12) const;

    LawClass classify() const;
    bool dry_only() const;

    /// Upper bound of F(t, u) over u >= threshold.
    double tail_force_upper(double t, double threshold) const;
    /// Lower bound of F(t, u) over u <= -threshold.
    double tail_force_lower(double t, double threshold) const;

    double period() const { return mu_plus_.period(); }
    const PeriodicSignal& mu_plus() const { return mu_plus_; }
    const PeriodicSignal& mu_minus() const { return mu_minus_; }
    const PeriodicSignal& mu_viscous() const { return mu_v_; }
    const std::optional<PiecewiseLinearMonotone>& extra() const { return extra_; }
    const std::optional<Perturbation>& perturbation() const { return psi_; }
    const std::optional<TailBounds>& tail_bounds() const { return tails_; }

    /// Kinks/jumps of A(t, .) in u: 0 when a dry part is present, plus the
    /// knots of extra. Used for exact stiction landing.
    std::vector<double> monotone_breakpoints() const;

    /// Union of the time breakpoints of all coefficient signals.
    std::vector<double> time_breakpoints() const;

private:
    FrictionLaw(PeriodicSignal mu_v, PeriodicSignal mu_plus, PeriodicSignal mu_minus);

    PeriodicSignal mu_v_, mu_plus_, mu_minus_;
    std::optional<PiecewiseLinearMonotone> extra_;
    std::optional<Perturbation> psi_;
    std::optional<TailBounds> tails_;
};

namespace detail {

/// Solves rhs in v + map(v) for the unique v, where `map` is a nondecreasing
/// interval-valued function. Tests `candidates` for exact membership first,
/// then brackets (doubling, at most ten widenings) and bisects; the final
/// bracket is polished with one secant step, exact on affine pieces.
double solve_shifted_monotone(const std::function<ValueInterval(double)>& map, double rhs,
                              double initial_halfwidth, const std::vector<double>& candidates,
                              double tol);

} // namespace detail

} // namespace crawl
