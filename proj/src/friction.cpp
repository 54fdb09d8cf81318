#include "crawl/friction.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "crawl/errors.hpp"

namespace crawl {

std::string to_string(LawClass c) {
    switch (c) {
    case LawClass::DryOnly: return "dry";
    case LawClass::Monotone: return "monotone";
    case LawClass::StrictlyMonotone: return "strictly-monotone";
    case LawClass::NonMonotone: return "non-monotone";
    }
    return "?";
}

// --- PiecewiseLinearMonotone ---------------------------------------------------

PiecewiseLinearMonotone::PiecewiseLinearMonotone(std::vector<double> u, std::vector<double> y)
    : knots(std::move(u)), values(std::move(y)) {
    if (knots.size() != values.size() || knots.size() < 2)
        throw ConfigError("piecewise-linear graph needs matching u/y lists with >= 2 entries");
    for (size_t i = 1; i < knots.size(); ++i) {
        if (knots[i] <= knots[i - 1]) throw ConfigError("piecewise-linear knots must be increasing");
        if (values[i] < values[i - 1])
            throw ConfigError("piecewise-linear graph must be nondecreasing");
    }
    // normalise to extra(0) = 0 so the law's stiction interval stays [-mu-, mu+]
    const double at_zero = (*this)(0.0);
    if (at_zero != 0.0)
        for (double& v : values) v -= at_zero;
}

double PiecewiseLinearMonotone::operator()(double u) const {
    const size_t n = knots.size();
    if (u <= knots.front()) {
        const double slope = (values[1] - values[0]) / (knots[1] - knots[0]);
        return values.front() + slope * (u - knots.front());
    }
    if (u >= knots.back()) {
        const double slope = (values[n - 1] - values[n - 2]) / (knots[n - 1] - knots[n - 2]);
        return values.back() + slope * (u - knots.back());
    }
    auto it = std::upper_bound(knots.begin(), knots.end(), u);
    const size_t i = static_cast<size_t>(it - knots.begin());
    const double w = (u - knots[i - 1]) / (knots[i] - knots[i - 1]);
    return values[i - 1] + w * (values[i] - values[i - 1]);
}

bool PiecewiseLinearMonotone::strictly_increasing() const {
    for (size_t i = 1; i < knots.size(); ++i)
        if (values[i] <= values[i - 1]) return false;
    return true;
}

// --- FrictionLaw ----------------------------------------------------------------

FrictionLaw::FrictionLaw(PeriodicSignal mu_v, PeriodicSignal mu_plus, PeriodicSignal mu_minus)
    : mu_v_(std::move(mu_v)), mu_plus_(std::move(mu_plus)), mu_minus_(std::move(mu_minus)) {
    const double T = mu_v_.period();
    if (mu_plus_.period() != T || mu_minus_.period() != T)
        throw ConfigError("friction coefficients must share one period");
    if (mu_v_.min_value() < 0.0 || mu_plus_.min_value() < 0.0 || mu_minus_.min_value() < 0.0)
        throw ConfigError("friction coefficients must be nonnegative");
}

FrictionLaw FrictionLaw::dry(PeriodicSignal mu_plus, PeriodicSignal mu_minus) {
    const double T = mu_plus.period();
    return FrictionLaw(PeriodicSignal::constant(0.0, T), std::move(mu_plus), std::move(mu_minus));
}

FrictionLaw FrictionLaw::viscous(PeriodicSignal mu_v) {
    const double T = mu_v.period();
    return FrictionLaw(std::move(mu_v), PeriodicSignal::constant(0.0, T),
                       PeriodicSignal::constant(0.0, T));
}

FrictionLaw FrictionLaw::bingham(PeriodicSignal mu_v, PeriodicSignal mu_plus,
                                 PeriodicSignal mu_minus) {
    return FrictionLaw(std::move(mu_v), std::move(mu_plus), std::move(mu_minus));
}

FrictionLaw FrictionLaw::stribeck(PeriodicSignal mu_plus, PeriodicSignal mu_minus,
                                  double amplitude, double half_width) {
    if (!(half_width > 0.0)) throw ConfigError("Stribeck half width must be positive");
    FrictionLaw law = dry(std::move(mu_plus), std::move(mu_minus));
    const double a = amplitude, w = half_width;
    Perturbation psi;
    psi.fn = [a, w](double, double u) {
        return std::abs(u) < w ? a * std::sin(std::numbers::pi * u / w) : 0.0;
    };
    psi.lipschitz = std::abs(a) * std::numbers::pi / w;
    psi.bound = std::abs(a);
    std::ostringstream os;
    os << "stribeck-sin(amplitude=" << a << ", half_width=" << w << ")";
    psi.descriptor = os.str();
    law.psi_ = std::move(psi);
    return law;
}

FrictionLaw& FrictionLaw::with_extra(PiecewiseLinearMonotone extra) {
    extra_ = std::move(extra);
    return *this;
}

FrictionLaw& FrictionLaw::with_perturbation(Perturbation psi) {
    if (!psi.fn) throw ConfigError("perturbation needs a callable");
    if (!(psi.lipschitz >= 0.0) || !(psi.bound >= 0.0))
        throw ConfigError("perturbation must declare a Lipschitz constant and a bound");
    psi_ = std::move(psi);
    return *this;
}

FrictionLaw& FrictionLaw::with_tail_bounds(TailBounds tails) {
    if (!(tails.threshold > 0.0)) throw ConfigError("tail bound threshold must be positive");
    if (tails.ell_minus.period() != period() || tails.ell_plus.period() != period())
        throw ConfigError("tail bound signals must share the law period");
    tails_ = std::move(tails);
    return *this;
}

ValueInterval FrictionLaw::monotone_part(double t, double u) const {
    double base = mu_v_(t) * u;
    if (extra_) base += (*extra_)(u);
    if (u > 0.0) return base + mu_plus_(t);
    if (u < 0.0) return base - mu_minus_(t);
    return {base - mu_minus_(t), base + mu_plus_(t)};
}

ValueInterval FrictionLaw::operator()(double t, double u) const {
    ValueInterval f = -monotone_part(t, u);
    if (psi_) f += (*psi_)(t, u);
    return f;
}

LawClass FrictionLaw::classify() const {
    if (psi_) return LawClass::NonMonotone;
    if (mu_v_.min_value() > 0.0) return LawClass::StrictlyMonotone;
    if (extra_ && extra_->strictly_increasing()) return LawClass::StrictlyMonotone;
    if (dry_only()) return LawClass::DryOnly;
    return LawClass::Monotone;
}

bool FrictionLaw::dry_only() const {
    return !psi_ && !extra_ && mu_v_.max_abs() == 0.0;
}

double FrictionLaw::tail_force_upper(double t, double threshold) const {
    if (tails_) return tails_->ell_plus(t);
    double f = -mu_v_(t) * threshold - mu_plus_(t);
    if (extra_) f -= (*extra_)(threshold);
    if (psi_) f += psi_->bound;
    return f;
}

double FrictionLaw::tail_force_lower(double t, double threshold) const {
    if (tails_) return -tails_->ell_minus(t);
    double f = mu_v_(t) * threshold + mu_minus_(t);
    if (extra_) f -= (*extra_)(-threshold);
    if (psi_) f -= psi_->bound;
    return f;
}

std::vector<double> FrictionLaw::monotone_breakpoints() const {
    std::vector<double> out;
    out.push_back(0.0);
    if (extra_)
        for (double k : extra_->knots) out.push_back(k);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<double> FrictionLaw::time_breakpoints() const {
    std::vector<double> out = mu_v_.breakpoints();
    for (const PeriodicSignal* s : {&mu_plus_, &mu_minus_})
        out.insert(out.end(), s->breakpoints().begin(), s->breakpoints().end());
    if (tails_) {
        out.insert(out.end(), tails_->ell_minus.breakpoints().begin(),
                   tails_->ell_minus.breakpoints().end());
        out.insert(out.end(), tails_->ell_plus.breakpoints().begin(),
                   tails_->ell_plus.breakpoints().end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

double FrictionLaw::resolvent(double t, double step, double rhs, double tol_rel) const {
    if (!(step > 0.0)) throw NumericalError("resolvent step must be positive");
    auto map = [this, t, step](double u) { return step * monotone_part(t, u); };
    const double tol = tol_rel * (1.0 + std::abs(rhs));
    const double halfwidth =
        step * (monotone_part(t, rhs).max_abs() + 1.0) + tol;
    return detail::solve_shifted_monotone(map, rhs, halfwidth, monotone_breakpoints(), tol);
}

// --- scalar monotone inclusion solve --------------------------------------------

namespace detail {

double solve_shifted_monotone(const std::function<ValueInterval(double)>& map, double rhs,
                              double initial_halfwidth, const std::vector<double>& candidates,
                              double tol) {
    auto total = [&](double v) {
        ValueInterval m = map(v);
        return ValueInterval{v + m.lo, v + m.hi};
    };

    // exact landing on the jump abscissae of the monotone part
    for (double c : candidates) {
        if (total(c).contains(rhs)) return c;
    }

    double halfwidth = std::max(initial_halfwidth, tol);
    double a = rhs - halfwidth;
    double b = rhs + halfwidth;
    int widenings = 0;
    while (true) {
        const ValueInterval fa = total(a);
        if (fa.contains(rhs)) return a;
        if (fa.hi < rhs) break;
        if (++widenings > 10) {
            std::ostringstream os;
            os << "monotone solve: no lower bracket after 10 widenings (rhs=" << rhs
               << ", halfwidth=" << halfwidth << ")";
            throw NumericalError(os.str());
        }
        halfwidth *= 2.0;
        a = rhs - halfwidth;
    }
    widenings = 0;
    while (true) {
        const ValueInterval fb = total(b);
        if (fb.contains(rhs)) return b;
        if (fb.lo > rhs) break;
        if (++widenings > 10) {
            std::ostringstream os;
            os << "monotone solve: no upper bracket after 10 widenings (rhs=" << rhs
               << ", halfwidth=" << halfwidth << ")";
            throw NumericalError(os.str());
        }
        halfwidth *= 2.0;
        b = rhs + halfwidth;
    }

    while (b - a > tol) {
        const double m = 0.5 * (a + b);
        const ValueInterval fm = total(m);
        if (fm.contains(rhs)) return m;
        if (fm.hi < rhs)
            a = m;
        else
            b = m;
    }

    // secant polish: the map is piecewise affine in v for every law class, so
    // this lands on the exact root whenever the final bracket is kink-free
    const double fa = total(a).mid();
    const double fb = total(b).mid();
    if (fb > fa) {
        const double x = a + (rhs - fa) * (b - a) / (fb - fa);
        if (x >= a && x <= b) return x;
    }
    return 0.5 * (a + b);
}

} // namespace detail

} // namespace crawl
