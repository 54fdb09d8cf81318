#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace crawl {

/// Evaluation side at a discontinuity: Right is the canonical convention,
/// Left recovers the limit from below (used by the event-aligned stepper).
enum class Side { Right, Left };

/// Jump/kink times of a periodic signal per period, sorted, in [0, T).
struct BreakpointSet {
    std::vector<double> times;
};

namespace detail {
struct Expr;
}

/// A T-periodic scalar function of time built from a tiny expression grammar
/// (constants, t, sin, cos, square/triangle waves, +, -, *, piecewise) or from
/// a sampled table with linear interpolation. Immutable after construction;
/// safe to share across threads.
class PeriodicSignal {
public:
    /// Default-constructed signals are empty placeholders; evaluating one throws.
    PeriodicSignal() = default;

    /// Parses `text` in the grammar
    ///   expr   := ['-'] term (('+'|'-') term)*
    ///   term   := factor ('*' factor)*
    ///   factor := number | name | 't' | func '(' args ')' | '(' expr ')'
    /// with wave primitives square(t;P,amp), triangle(t;P,amp), the builtin
    /// constant `pi`, and piecewise(b0,e0,b1,e1,...) on subintervals of [0,T).
    /// Free names must appear in `bindings`. Verifies T-periodicity by sampling.
    static PeriodicSignal parse(std::string_view text, double period,
                                const std::map<std::string, double>& bindings = {});

    static PeriodicSignal constant(double value, double period);

    /// Sampled signal: knots in [0, T], linear interpolation, periodic wrap.
    static PeriodicSignal table(double period, std::vector<double> knots,
                                std::vector<double> values);

    /// sum_j coeffs[j] * parts[j]; the parts' expression trees are shared.
    static PeriodicSignal linear_combination(const std::vector<double>& coeffs,
                                             const std::vector<PeriodicSignal>& parts);

    double period() const { return period_; }

    /// Value of the right-continuous representative at t (t reduced mod T).
    double operator()(double t) const { return eval(t, Side::Right); }
    double eval(double t, Side side) const;

    const std::vector<double>& breakpoints() const { return breakpoints_; }
    BreakpointSet breakpoint_set() const { return {breakpoints_}; }

    /// (1/T) * integral over one period, split at breakpoints; abs error <= 1e-10.
    double mean() const;

    /// Integral over an arbitrary window [a, b], split at (shifted) breakpoints.
    double integral(double a, double b) const;

    double max_value() const;
    double min_value() const;
    double max_abs() const;

    /// Declared Lipschitz constant if given, otherwise an estimate from 1e4
    /// divided differences that skips breakpoint straddles. Informational only.
    double lipschitz() const;
    void declare_lipschitz(double bound);

    /// Syntactic continuity: true when the expression contains no square wave,
    /// no piecewise switch and no discontinuous table wrap. Conservative.
    bool continuous() const { return continuous_; }

    const std::string& source() const { return source_; }

private:
    void finalize();
    double eval_raw(double t, Side side) const;

    std::shared_ptr<const detail::Expr> root_;
    double period_ = 0.0;
    std::vector<double> breakpoints_;
    bool continuous_ = true;
    std::optional<double> declared_lipschitz_;
    double estimated_lipschitz_ = 0.0;
    std::string source_;
};

/// A periodic scalar function given as a callable plus its breakpoint list;
/// used for derived per-period bounds that are not parsed expressions.
struct TimeFunction {
    double period = 0.0;
    std::function<double(double)> fn;
    std::vector<double> breakpoints;

    double operator()(double t) const;
    double integral_over_period() const;
    double l1_norm_over_period() const;
};

namespace quadrature {

/// Composite Gauss-Legendre on [a, b] with panel doubling until two successive
/// estimates agree to `tol` (absolute). `splits` are additional panel seams.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const std::vector<double>& splits, double tol = 1e-12);

} // namespace quadrature

} // namespace crawl
