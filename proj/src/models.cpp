#include "crawl/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "crawl/errors.hpp"

namespace crawl {

std::string to_string(DynamicsClass c) {
    switch (c) {
    case DynamicsClass::NonMonotone: return "non-monotone";
    case DynamicsClass::Monotone: return "monotone";
    case DynamicsClass::StrictlyMonotone: return "strictly-monotone";
    case DynamicsClass::SmoothDry: return "smooth-dry";
    }
    return "?";
}

// --- FrozenDynamics -------------------------------------------------------------

ValueInterval FrozenDynamics::monotone_part(double v) const {
    ValueInterval acc{0.0, 0.0};
    for (const FrozenLaw& l : laws) {
        const double u = v + l.shape_velocity;
        double base = l.mu_v * u;
        if (l.extra) base += (*l.extra)(u);
        ValueInterval a;
        if (u > 0.0)
            a = base + l.mu_plus;
        else if (u < 0.0)
            a = base - l.mu_minus;
        else
            a = ValueInterval{base - l.mu_minus, base + l.mu_plus};
        acc += l.weight * a;
    }
    return inv_mass * acc;
}

double FrozenDynamics::perturbation(double v) const {
    double acc = load;
    for (const FrozenLaw& l : laws)
        if (l.psi) acc += l.weight * (*l.psi)(time, v + l.shape_velocity);
    return inv_mass * acc;
}

ValueInterval FrozenDynamics::dynamics(double v) const {
    return -monotone_part(v) + perturbation(v);
}

std::vector<double> FrozenDynamics::velocity_breakpoints() const {
    std::vector<double> out;
    out.reserve(laws.size());
    for (const FrozenLaw& l : laws) out.push_back(-l.shape_velocity);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<double> FrozenDynamics::monotone_candidates() const {
    std::vector<double> out;
    for (const FrozenLaw& l : laws) {
        out.push_back(-l.shape_velocity);
        if (l.extra)
            for (double k : l.extra->knots) out.push_back(k - l.shape_velocity);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// --- ReducedDynamics ------------------------------------------------------------

FrozenDynamics ReducedDynamics::freeze(double t, Side side) const {
    FrozenDynamics f;
    f.time = t;
    f.load = load_.eval(t, side);
    f.inv_mass = 1.0 / mass_;
    f.laws.reserve(parts_.size());
    for (const Contribution& c : parts_) {
        FrozenLaw l;
        l.weight = c.weight;
        l.shape_velocity = c.shape_velocity.eval(t, side);
        l.mu_v = c.law.mu_viscous().eval(t, side);
        l.mu_plus = c.law.mu_plus().eval(t, side);
        l.mu_minus = c.law.mu_minus().eval(t, side);
        l.extra = c.law.extra() ? &*c.law.extra() : nullptr;
        l.psi = c.law.perturbation() ? &*c.law.perturbation() : nullptr;
        f.laws.push_back(l);
    }
    return f;
}

ValueInterval ReducedDynamics::operator()(double t, double v, Side side) const {
    return freeze(t, side).dynamics(v);
}

std::vector<double> ReducedDynamics::velocity_breakpoints(double t, Side side) const {
    return freeze(t, side).velocity_breakpoints();
}

namespace {

std::vector<double> merged_time_breakpoints(const PeriodicSignal& load,
                                            const std::vector<Contribution>& parts) {
    std::vector<double> out = load.breakpoints();
    for (const Contribution& c : parts) {
        const auto& wb = c.shape_velocity.breakpoints();
        out.insert(out.end(), wb.begin(), wb.end());
        const auto lb = c.law.time_breakpoints();
        out.insert(out.end(), lb.begin(), lb.end());
    }
    std::sort(out.begin(), out.end());
    std::vector<double> dedup;
    for (double x : out)
        if (dedup.empty() || x - dedup.back() > 1e-12) dedup.push_back(x);
    return dedup;
}

bool law_is_smooth_dry(const FrictionLaw& law) {
    return law.dry_only() && law.mu_plus().continuous() && law.mu_minus().continuous() &&
           law.mu_plus().min_value() > 0.0 && law.mu_minus().min_value() > 0.0;
}

DynamicsClass classify_parts(const std::vector<Contribution>& parts, ModelKind kind,
                             bool c7_holds) {
    bool any_psi = false, any_strict = false, all_dry = true;
    for (const Contribution& c : parts) {
        const LawClass lc = c.law.classify();
        any_psi |= lc == LawClass::NonMonotone;
        any_strict |= lc == LawClass::StrictlyMonotone;
        all_dry &= lc == LawClass::DryOnly;
    }
    if (any_psi) return DynamicsClass::NonMonotone;
    if (any_strict) return DynamicsClass::StrictlyMonotone;
    if (kind == ModelKind::Discrete) {
        bool smooth = all_dry;
        for (const Contribution& c : parts)
            smooth = smooth && law_is_smooth_dry(c.law) && c.shape_velocity.continuous();
        if (smooth) return DynamicsClass::SmoothDry;
    } else if (c7_holds) {
        return DynamicsClass::SmoothDry;
    }
    return DynamicsClass::Monotone;
}

} // namespace

void ReducedDynamics::finalize(double u_threshold) {
    time_breakpoints_ = merged_time_breakpoints(load_, parts_);

    lipschitz_p_ = 0.0;
    for (const Contribution& c : parts_)
        if (c.law.perturbation()) lipschitz_p_ += c.weight * c.law.perturbation()->lipschitz;
    lipschitz_p_ /= mass_;

    double sup_w = 0.0;
    for (Contribution& c : parts_) {
        c.sup_speed = c.shape_velocity.max_abs();
        sup_w = std::max(sup_w, c.sup_speed);
    }

    Bounds b;
    b.R = sup_w + u_threshold;

    // snapshot the contributions so the bound callables own shared signal trees
    auto parts_copy = std::make_shared<const std::vector<Contribution>>(parts_);
    const PeriodicSignal load = load_;
    const double inv_mass = 1.0 / mass_;

    b.ell_plus.period = period_;
    b.ell_plus.breakpoints = time_breakpoints_;
    b.ell_plus.fn = [parts_copy, load, inv_mass, u_threshold](double t) {
        double acc = load(t);
        for (const Contribution& c : *parts_copy)
            acc += c.weight * c.law.tail_force_upper(t, u_threshold);
        return inv_mass * acc;
    };
    b.ell_minus.period = period_;
    b.ell_minus.breakpoints = time_breakpoints_;
    b.ell_minus.fn = [parts_copy, load, inv_mass, u_threshold](double t) {
        double acc = -load(t);
        for (const Contribution& c : *parts_copy)
            acc -= c.weight * c.law.tail_force_lower(t, u_threshold);
        return inv_mass * acc;
    };

    b.integral_plus = mass_ * b.ell_plus.integral_over_period();
    b.integral_minus = -mass_ * b.ell_minus.integral_over_period();
    b.dissipative = b.integral_plus < 0.0 && b.integral_minus > 0.0;
    b.v_plus = b.R + b.ell_plus.l1_norm_over_period();
    b.v_minus = -(b.R + b.ell_minus.l1_norm_over_period());
    bounds_ = std::move(b);
}

// --- discrete reduction ----------------------------------------------------------

ReducedDynamics reduce_discrete(const DiscreteCrawler& crawler) {
    const size_t n = crawler.masses.size();
    if (n == 0) throw ConfigError("discrete crawler needs at least one mass");
    if (crawler.shape_velocities.size() != n || crawler.laws.size() != n)
        throw ConfigError("masses, shape velocities and laws must have matching lengths");
    if (!(crawler.period > 0.0)) throw ConfigError("period must be positive");

    double total_mass = 0.0;
    for (double m : crawler.masses) {
        if (m < 0.0) throw ConfigError("masses must be nonnegative");
        total_mass += m;
    }
    if (!(total_mass > 0.0)) throw ConfigError("total mass must be positive");

    ReducedDynamics dyn;
    dyn.kind_ = ModelKind::Discrete;
    dyn.period_ = crawler.period;
    dyn.mass_ = total_mass;
    dyn.load_ = crawler.load;
    if (crawler.load.period() != crawler.period)
        throw ConfigError("load period must match the crawler period");

    double max_tail_threshold = crawler.r_margin;
    for (size_t i = 0; i < n; ++i) {
        const PeriodicSignal& w = crawler.shape_velocities[i];
        if (w.period() != crawler.period)
            throw ConfigError("shape velocity period must match the crawler period");
        if (crawler.laws[i].period() != crawler.period)
            throw ConfigError("law period must match the crawler period");
        const double mean = w.mean();
        if (std::abs(mean) > 1e-8 * std::max(1.0, w.max_abs())) {
            std::ostringstream os;
            os << "shape velocity " << i << " has nonzero mean " << mean
               << "; z_" << i << " would not be periodic";
            throw ConfigError(os.str());
        }
        if (crawler.laws[i].perturbation() && crawler.laws[i].perturbation()->bound == 0.0 &&
            crawler.laws[i].perturbation()->lipschitz == 0.0 && !crawler.laws[i].tail_bounds()) {
            // zero-declared perturbation data is treated as undeclared
            throw ConfigError("perturbation must declare a Lipschitz constant and a bound");
        }
        if (crawler.laws[i].tail_bounds())
            max_tail_threshold = std::max(max_tail_threshold, crawler.laws[i].tail_bounds()->threshold);
        dyn.parts_.push_back({1.0, w, crawler.laws[i], 0.0});
    }

    // barycentre-consistency: sum_i m_i w_i should vanish (warning only)
    double worst = 0.0, scale = 0.0;
    for (int k = 0; k < 257; ++k) {
        const double t = k * crawler.period / 257.0;
        double acc = 0.0;
        for (size_t i = 0; i < n; ++i) {
            const double wi = crawler.shape_velocities[i](t);
            acc += crawler.masses[i] * wi;
            scale = std::max(scale, std::abs(wi));
        }
        worst = std::max(worst, std::abs(acc));
    }
    if (worst > 1e-8 * total_mass * std::max(1.0, scale)) {
        std::ostringstream os;
        os << "sum_i m_i w_i(t) reaches " << worst
           << "; shape velocities are not barycentre-relative";
        dyn.warnings_.push_back(os.str());
    }

    dyn.flag_ = classify_parts(dyn.parts_, ModelKind::Discrete, false);
    dyn.finalize(max_tail_threshold);
    return dyn;
}

// --- continuous reduction ----------------------------------------------------------

namespace {

struct CellGeometry {
    std::vector<double> widths;
    std::vector<double> bary_coeffs; // coefficients of Phi-bar on the cell signals
    double total_mass = 0.0;
};

CellGeometry cell_geometry(const ContinuousCrawler& c) {
    const size_t K = c.density.size();
    CellGeometry g;
    g.widths.resize(K);
    for (size_t k = 0; k < K; ++k) g.widths[k] = c.partition[k + 1] - c.partition[k];
    for (size_t k = 0; k < K; ++k) g.total_mass += c.density[k] * g.widths[k];

    // Phi(t,x) = int_a^x phidot; Phi-bar = (1/M) int rho Phi. Both are linear in
    // the cell signals; bary_coeffs[j] is the coefficient of signal j in Phi-bar.
    g.bary_coeffs.assign(K, 0.0);
    if (g.total_mass > 0.0) {
        for (size_t j = 0; j < K; ++j) {
            double acc = c.density[j] * g.widths[j] * g.widths[j] / 2.0;
            for (size_t k = j + 1; k < K; ++k) acc += g.widths[j] * c.density[k] * g.widths[k];
            g.bary_coeffs[j] = acc / g.total_mass;
        }
    }
    return g;
}

// coefficients of zdot(t, xi) on the cell signals: Phi(t,xi) - Phi-bar(t)
std::vector<double> zdot_coefficients(const ContinuousCrawler& c, const CellGeometry& g,
                                      double xi) {
    const size_t K = c.density.size();
    size_t cell = K - 1;
    for (size_t k = 0; k < K; ++k)
        if (xi < c.partition[k + 1]) {
            cell = k;
            break;
        }
    std::vector<double> coeff(K, 0.0);
    for (size_t j = 0; j < cell; ++j) coeff[j] = g.widths[j];
    coeff[cell] = xi - c.partition[cell];
    for (size_t j = 0; j < K; ++j) coeff[j] -= g.bary_coeffs[j];
    return coeff;
}

void validate_continuous(const ContinuousCrawler& c) {
    const size_t K = c.density.size();
    if (c.partition.size() != K + 1 || K == 0)
        throw ConfigError("continuous crawler needs K cells and K+1 partition boundaries");
    for (size_t k = 0; k + 1 < c.partition.size(); ++k)
        if (c.partition[k + 1] <= c.partition[k])
            throw ConfigError("partition boundaries must be strictly increasing");
    if (c.deformation_rate.size() != K || c.law_field.size() != K)
        throw ConfigError("deformation rate and law fields must have one entry per cell");
    if (!c.phi0.empty() && c.phi0.size() != K)
        throw ConfigError("phi(0,.) must have one entry per cell when given");
    if (!(c.period > 0.0)) throw ConfigError("period must be positive");
    if (c.nodes_per_cell < 2 || c.nodes_per_cell % 2 != 0)
        throw ConfigError("nodes_per_cell must be a positive even number");
    for (double rho : c.density)
        if (rho < 0.0) throw ConfigError("density must be nonnegative");
}

void check_phi_range(const ContinuousCrawler& c, std::vector<std::string>& warnings) {
    // phi(t, cell) = phi0 + int_0^t phidot must stay positive (and inside the
    // declared bounds when present)
    const size_t K = c.density.size();
    const double lo_bound = c.phi_bounds ? c.phi_bounds->first : 0.0;
    const double hi_bound =
        c.phi_bounds ? c.phi_bounds->second : std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < K; ++k) {
        const double phi_start = c.phi0.empty() ? 1.0 : c.phi0[k];
        double phi = phi_start, lo = phi_start, hi = phi_start;
        const int steps = 256;
        double prev_t = 0.0;
        for (int i = 1; i <= steps; ++i) {
            const double t = i * c.period / steps;
            phi += c.deformation_rate[k].integral(prev_t, t);
            lo = std::min(lo, phi);
            hi = std::max(hi, phi);
            prev_t = t;
        }
        if (!(lo > 0.0)) {
            std::ostringstream os;
            os << "deformation gradient of cell " << k << " reaches " << lo
               << "; phi must stay positive";
            throw ConfigError(os.str());
        }
        if (lo < lo_bound - 1e-9 || hi > hi_bound + 1e-9) {
            std::ostringstream os;
            os << "phi of cell " << k << " spans [" << lo << ", " << hi
               << "], outside the declared bounds";
            warnings.push_back(os.str());
        }
    }
}

} // namespace

ReducedDynamics reduce_continuous(const ContinuousCrawler& crawler) {
    validate_continuous(crawler);
    const size_t K = crawler.density.size();
    const CellGeometry geom = cell_geometry(crawler);
    if (!(geom.total_mass > 0.0)) throw ConfigError("total mass must be positive");

    for (size_t k = 0; k < K; ++k) {
        if (crawler.deformation_rate[k].period() != crawler.period ||
            crawler.law_field[k].period() != crawler.period)
            throw ConfigError("cell signals must share the crawler period");
    }
    if (crawler.load.period() != crawler.period)
        throw ConfigError("load period must match the crawler period");

    ReducedDynamics dyn;
    dyn.kind_ = ModelKind::Continuous;
    dyn.period_ = crawler.period;
    dyn.mass_ = geom.total_mass;
    dyn.load_ = crawler.load;
    check_phi_range(crawler, dyn.warnings_);

    // C7: mu+ + mu- > 0 across the body (needed for the dry uniqueness regime)
    bool c7 = true;
    double max_tail_threshold = crawler.r_margin;
    for (size_t k = 0; k < K; ++k) {
        const FrictionLaw& law = crawler.law_field[k];
        const double floor = law.mu_plus().min_value() + law.mu_minus().min_value();
        c7 = c7 && floor > 0.0 && law.mu_plus().continuous() && law.mu_minus().continuous();
        if (law.tail_bounds())
            max_tail_threshold = std::max(max_tail_threshold, law.tail_bounds()->threshold);
    }

    // two-point Gauss panels per cell; each node becomes a weighted contact
    static constexpr double kGaussOffset = 0.28867513459481287; // 1/(2 sqrt 3)
    const int panels = crawler.nodes_per_cell / 2;
    for (size_t k = 0; k < K; ++k) {
        const double width = geom.widths[k] / panels;
        for (int p = 0; p < panels; ++p) {
            const double mid = crawler.partition[k] + (p + 0.5) * width;
            for (double offset : {-kGaussOffset, kGaussOffset}) {
                const double xi = mid + offset * width;
                const std::vector<double> coeff = zdot_coefficients(crawler, geom, xi);
                dyn.parts_.push_back(
                    {0.5 * width,
                     PeriodicSignal::linear_combination(coeff, crawler.deformation_rate),
                     crawler.law_field[k], 0.0});
            }
        }
    }

    // C6 for the dry regime must hold with the dry part alone, so SmoothDry
    // additionally requires the dry-only dissipativity integrals to pass
    dyn.flag_ = classify_parts(dyn.parts_, ModelKind::Continuous, c7);
    dyn.finalize(max_tail_threshold);
    if (dyn.flag_ == DynamicsClass::SmoothDry) {
        auto dry_integral = [&](bool plus) {
            std::vector<double> bps = dyn.time_breakpoints();
            auto fn = [&](double t) {
                double acc = crawler.load(t);
                for (const Contribution& c : dyn.parts_)
                    acc += plus ? -c.weight * c.law.mu_plus()(t) : c.weight * c.law.mu_minus()(t);
                return acc;
            };
            return quadrature::integrate(fn, 0.0, crawler.period, bps, 1e-10);
        };
        if (!(dry_integral(true) < 0.0 && dry_integral(false) > 0.0))
            dyn.flag_ = DynamicsClass::Monotone;
    }
    return dyn;
}

double relative_velocity(const ContinuousCrawler& crawler, double t, double xi) {
    validate_continuous(crawler);
    if (xi < crawler.omega_a() || xi > crawler.omega_b())
        throw ConfigError("material point outside the body");
    const CellGeometry geom = cell_geometry(crawler);
    const std::vector<double> coeff = zdot_coefficients(crawler, geom, xi);
    double acc = 0.0;
    for (size_t j = 0; j < coeff.size(); ++j) acc += coeff[j] * crawler.deformation_rate[j](t);
    return acc;
}

// --- zero set -----------------------------------------------------------------------

namespace {

double bisect_boundary(const std::function<bool(double)>& pred, double inside, double outside,
                       double tol) {
    // pred(inside) is true, pred(outside) false; returns the transition point
    while (std::abs(outside - inside) > tol) {
        const double m = 0.5 * (inside + outside);
        if (pred(m))
            inside = m;
        else
            outside = m;
    }
    return inside;
}

} // namespace

std::vector<ValueInterval> zero_set(const ReducedDynamics& dyn, double t, int grid_n) {
    const Bounds& b = dyn.bounds();
    const double lo = b.v_minus, hi = b.v_plus;
    const double tol = 1e-9 * std::max(1.0, std::max(std::abs(lo), std::abs(hi)));
    const FrozenDynamics frozen = dyn.freeze(t);
    auto G = [&](double v) { return frozen.dynamics(v); };

    const bool monotone = dyn.flag() != DynamicsClass::NonMonotone;
    if (monotone) {
        // G decreasing: the zero set is one interval, possibly empty or a point
        const ValueInterval g_lo = G(lo), g_hi = G(hi);
        if (g_lo.hi < 0.0 || g_hi.lo > 0.0) return {};
        double a = lo, c = hi;
        if (g_lo.lo > 0.0)
            a = bisect_boundary([&](double v) { return G(v).lo > 0.0; }, lo, hi, tol);
        if (g_hi.hi < 0.0)
            c = bisect_boundary([&](double v) { return G(v).hi >= 0.0; }, lo, hi, tol);
        if (a > c + tol) return {};
        return {ValueInterval{std::min(a, c), std::max(a, c)}};
    }

    std::vector<ValueInterval> out;
    std::vector<double> grid;
    grid.reserve(grid_n + 8);
    for (int i = 0; i <= grid_n; ++i) grid.push_back(lo + (hi - lo) * i / grid_n);
    for (double vb : frozen.velocity_breakpoints())
        if (vb > lo && vb < hi) grid.push_back(vb);
    std::sort(grid.begin(), grid.end());

    auto push_merged = [&](double a, double c) {
        if (!out.empty() && a <= out.back().hi + tol)
            out.back().hi = std::max(out.back().hi, c);
        else
            out.push_back({a, c});
    };

    std::optional<double> run_start;
    double prev_v = grid.front();
    ValueInterval prev_g = G(prev_v);
    auto contains_zero = [](const ValueInterval& g) { return g.lo <= 0.0 && g.hi >= 0.0; };
    if (contains_zero(prev_g)) run_start = prev_v;
    for (size_t i = 1; i < grid.size(); ++i) {
        const double v = grid[i];
        const ValueInterval g = G(v);
        if (contains_zero(g)) {
            if (!run_start) run_start = v;
        } else {
            if (run_start) {
                push_merged(*run_start, prev_v);
                run_start.reset();
            }
            if (!contains_zero(prev_g) && ((prev_g.lo > 0.0) != (g.lo > 0.0))) {
                // sign change without a set-valued plateau: refine the crossing
                const bool positive_left = prev_g.lo > 0.0;
                const double root = bisect_boundary(
                    [&](double x) { return (G(x).lo > 0.0) == positive_left; }, prev_v, v, tol);
                push_merged(root, root);
            }
        }
        prev_v = v;
        prev_g = g;
    }
    if (run_start) push_merged(*run_start, prev_v);
    return out;
}

} // namespace crawl
