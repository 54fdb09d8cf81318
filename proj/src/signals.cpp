#include "crawl/signals.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <sstream>

#include "crawl/errors.hpp"

namespace crawl {

namespace {

double wrap_period(double t, double period, Side side) {
    double r = std::fmod(t, period);
    if (r < 0.0) r += period;
    if (r >= period) r = 0.0;
    if (side == Side::Left && r == 0.0) r = period;
    return r;
}

} // namespace

namespace detail {

struct Expr {
    enum class Kind { Constant, Time, Sin, Cos, Add, Sub, Mul, Neg, Square, Triangle, Piecewise, Table };

    Kind kind;
    double value = 0.0;                    // Constant
    double wave_period = 0.0;              // Square/Triangle
    double amplitude = 0.0;                // Square/Triangle
    std::shared_ptr<const Expr> a, b;      // children
    std::vector<double> bounds;            // Piecewise segment starts / Table knots
    std::vector<double> table_values;      // Table
    double signal_period = 0.0;            // Piecewise/Table reduce mod this
    std::vector<std::shared_ptr<const Expr>> pieces;

    double eval(double t, Side side) const {
        switch (kind) {
        case Kind::Constant: return value;
        case Kind::Time: return t;
        case Kind::Sin: return std::sin(a->eval(t, side));
        case Kind::Cos: return std::cos(a->eval(t, side));
        case Kind::Add: return a->eval(t, side) + b->eval(t, side);
        case Kind::Sub: return a->eval(t, side) - b->eval(t, side);
        case Kind::Mul: return a->eval(t, side) * b->eval(t, side);
        case Kind::Neg: return -a->eval(t, side);
        case Kind::Square: {
            const double half = 0.5 * wave_period;
            const double local = wrap_period(t, wave_period, side);
            if (side == Side::Left) return local <= half ? amplitude : -amplitude;
            return local < half ? amplitude : -amplitude;
        }
        case Kind::Triangle: {
            const double half = 0.5 * wave_period;
            const double local = wrap_period(t, wave_period, Side::Right);
            const double rise = local <= half ? local : wave_period - local;
            return amplitude * rise / half;
        }
        case Kind::Piecewise: {
            const double local = wrap_period(t, signal_period, side);
            size_t idx = 0;
            for (size_t i = 0; i < bounds.size(); ++i) {
                const bool below = side == Side::Left ? bounds[i] < local : bounds[i] <= local;
                if (below) idx = i;
            }
            return pieces[idx]->eval(t, side);
        }
        case Kind::Table: {
            const double local = wrap_period(t, signal_period, Side::Right);
            // knots cover [0, T] with an implicit wrap segment
            const auto& ts = bounds;
            const auto& vs = table_values;
            if (local <= ts.front()) {
                // segment from (back - T) to front
                const double t0 = ts.back() - signal_period, v0 = vs.back();
                const double t1 = ts.front(), v1 = vs.front();
                return t1 == t0 ? v1 : v0 + (v1 - v0) * (local - t0) / (t1 - t0);
            }
            if (local >= ts.back()) {
                const double t0 = ts.back(), v0 = vs.back();
                const double t1 = ts.front() + signal_period, v1 = vs.front();
                return t1 == t0 ? v0 : v0 + (v1 - v0) * (local - t0) / (t1 - t0);
            }
            auto it = std::upper_bound(ts.begin(), ts.end(), local);
            const size_t i = static_cast<size_t>(it - ts.begin());
            const double t0 = ts[i - 1], t1 = ts[i];
            return vs[i - 1] + (vs[i] - vs[i - 1]) * (local - t0) / (t1 - t0);
        }
        }
        return 0.0;
    }

    void collect_breakpoints(double period, std::vector<double>& out) const {
        switch (kind) {
        case Kind::Constant:
        case Kind::Time:
            return;
        case Kind::Sin:
        case Kind::Cos:
        case Kind::Neg:
            a->collect_breakpoints(period, out);
            return;
        case Kind::Add:
        case Kind::Sub:
        case Kind::Mul:
            a->collect_breakpoints(period, out);
            b->collect_breakpoints(period, out);
            return;
        case Kind::Square:
        case Kind::Triangle: {
            const double half = 0.5 * wave_period;
            const double eps = 1e-12 * std::max(1.0, period);
            size_t count = 0;
            for (double s = 0.0;; ++count) {
                s = half * static_cast<double>(count);
                if (s >= period - eps) break;
                if (count > 1u << 20)
                    throw ConfigError("wave primitive produces too many breakpoints per period");
                out.push_back(s);
            }
            return;
        }
        case Kind::Piecewise:
            out.insert(out.end(), bounds.begin(), bounds.end());
            for (const auto& p : pieces) p->collect_breakpoints(period, out);
            return;
        case Kind::Table:
            for (double knot : bounds)
                if (knot < period) out.push_back(knot);
            out.push_back(0.0);
            return;
        }
    }

    bool continuous() const {
        switch (kind) {
        case Kind::Constant:
        case Kind::Time:
        case Kind::Triangle:
        case Kind::Table:
            return true;
        case Kind::Sin:
        case Kind::Cos:
        case Kind::Neg:
            return a->continuous();
        case Kind::Add:
        case Kind::Sub:
        case Kind::Mul:
            return a->continuous() && b->continuous();
        case Kind::Square:
        case Kind::Piecewise:
            return false; // conservative for piecewise
        }
        return false;
    }
};

} // namespace detail

namespace {

using detail::Expr;
using ExprPtr = std::shared_ptr<const Expr>;

ExprPtr make_node(Expr&& e) { return std::make_shared<const Expr>(std::move(e)); }

ExprPtr make_const(double v) {
    Expr e;
    e.kind = Expr::Kind::Constant;
    e.value = v;
    return make_node(std::move(e));
}

ExprPtr make_binary(Expr::Kind k, ExprPtr a, ExprPtr b) {
    Expr e;
    e.kind = k;
    e.a = std::move(a);
    e.b = std::move(b);
    return make_node(std::move(e));
}

ExprPtr make_unary(Expr::Kind k, ExprPtr a) {
    Expr e;
    e.kind = k;
    e.a = std::move(a);
    return make_node(std::move(e));
}

// --- recursive descent parser -----------------------------------------------

class Parser {
public:
    Parser(std::string_view text, double period, const std::map<std::string, double>& bindings)
        : text_(text), period_(period), bindings_(bindings) {}

    ExprPtr run() {
        ExprPtr e = parse_expr();
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected trailing input");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        std::ostringstream os;
        os << "syntax error at position " << pos_ << ": " << msg;
        throw ConfigError(os.str());
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool consume(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!consume(c)) fail(std::string("expected '") + c + "'");
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    ExprPtr parse_expr() {
        bool negate = false;
        skip_ws();
        if (consume('-'))
            negate = true;
        else
            consume('+');
        ExprPtr e = parse_term();
        if (negate) e = make_unary(Expr::Kind::Neg, e);
        for (;;) {
            if (consume('+'))
                e = make_binary(Expr::Kind::Add, e, parse_term());
            else if (consume('-'))
                e = make_binary(Expr::Kind::Sub, e, parse_term());
            else
                break;
        }
        return e;
    }

    ExprPtr parse_term() {
        ExprPtr e = parse_factor();
        while (consume('*')) e = make_binary(Expr::Kind::Mul, e, parse_factor());
        return e;
    }

    double parse_const_arg() {
        // wave parameters must not depend on t
        ExprPtr e = parse_expr();
        if (depends_on_time(*e)) fail("wave parameters must be constant");
        return e->eval(0.0, Side::Right);
    }

    static bool depends_on_time(const Expr& e) {
        if (e.kind == Expr::Kind::Time) return true;
        if (e.a && depends_on_time(*e.a)) return true;
        if (e.b && depends_on_time(*e.b)) return true;
        for (const auto& p : e.pieces)
            if (depends_on_time(*p)) return true;
        return false;
    }

    ExprPtr parse_factor() {
        skip_ws();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            ExprPtr e = parse_expr();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_name();
        fail("expected number, name or '('");
    }

    ExprPtr parse_number() {
        const char* begin = text_.data() + pos_;
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin) fail("bad number");
        pos_ += static_cast<size_t>(end - begin);
        return make_const(v);
    }

    ExprPtr parse_name() {
        const size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        const std::string name(text_.substr(start, pos_ - start));

        if (name == "t") {
            Expr e;
            e.kind = Expr::Kind::Time;
            return make_node(std::move(e));
        }
        if (name == "pi") return make_const(std::numbers::pi);
        if (name == "sin" || name == "cos") {
            expect('(');
            ExprPtr arg = parse_expr();
            expect(')');
            return make_unary(name == "sin" ? Expr::Kind::Sin : Expr::Kind::Cos, arg);
        }
        if (name == "square" || name == "triangle") return parse_wave(name);
        if (name == "piecewise") return parse_piecewise();

        auto it = bindings_.find(name);
        if (it == bindings_.end()) {
            pos_ = start;
            fail("unbound name '" + name + "'");
        }
        return make_const(it->second);
    }

    ExprPtr parse_wave(const std::string& name) {
        expect('(');
        skip_ws();
        if (peek() != 't') fail("wave primitives take the time variable as first argument");
        ++pos_;
        expect(';');
        const double wave_period = parse_const_arg();
        expect(',');
        const double amp = parse_const_arg();
        expect(')');
        if (!(wave_period > 0.0)) fail("wave period must be positive");
        Expr e;
        e.kind = name == "square" ? Expr::Kind::Square : Expr::Kind::Triangle;
        e.wave_period = wave_period;
        e.amplitude = amp;
        return make_node(std::move(e));
    }

    ExprPtr parse_piecewise() {
        expect('(');
        std::vector<double> bounds;
        std::vector<ExprPtr> pieces;
        for (;;) {
            bounds.push_back(parse_const_arg());
            expect(',');
            pieces.push_back(parse_expr());
            if (!consume(',')) break;
        }
        expect(')');
        if (bounds.front() != 0.0) fail("piecewise segments must start at 0");
        for (size_t i = 1; i < bounds.size(); ++i)
            if (bounds[i] <= bounds[i - 1]) fail("piecewise boundaries must be increasing");
        if (bounds.back() >= period_) fail("piecewise boundaries must lie in [0, T)");
        Expr e;
        e.kind = Expr::Kind::Piecewise;
        e.bounds = std::move(bounds);
        e.pieces = std::move(pieces);
        e.signal_period = period_;
        return make_node(std::move(e));
    }

    std::string_view text_;
    size_t pos_ = 0;
    double period_;
    const std::map<std::string, double>& bindings_;
};

void sort_dedupe(std::vector<double>& v, double tol) {
    std::sort(v.begin(), v.end());
    std::vector<double> out;
    for (double x : v) {
        if (out.empty() || x - out.back() > tol) out.push_back(x);
    }
    v = std::move(out);
}

} // namespace

// --- quadrature --------------------------------------------------------------

namespace quadrature {

namespace {

// 16-point Gauss-Legendre nodes/weights on [-1, 1] (positive half; symmetric).
constexpr double kNodes[8] = {0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
                              0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
                              0.9445750230732326, 0.9894009349916499};
constexpr double kWeights[8] = {0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
                                0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
                                0.0622535239386479, 0.0271524594117541};

double gauss16(const std::function<double(double)>& f, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double acc = 0.0;
    for (int i = 0; i < 8; ++i) {
        const double dx = half * kNodes[i];
        acc += kWeights[i] * (f(mid - dx) + f(mid + dx));
    }
    return acc * half;
}

double composite(const std::function<double(double)>& f, double a, double b, int panels) {
    const double h = (b - a) / panels;
    double acc = 0.0;
    for (int i = 0; i < panels; ++i) acc += gauss16(f, a + i * h, a + (i + 1) * h);
    return acc;
}

double adaptive_piece(const std::function<double(double)>& f, double a, double b, double tol) {
    double prev = composite(f, a, b, 1);
    for (int panels = 2; panels <= 4096; panels *= 2) {
        const double cur = composite(f, a, b, panels);
        if (std::abs(cur - prev) <= tol) return cur;
        prev = cur;
    }
    return prev;
}

} // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 const std::vector<double>& splits, double tol) {
    if (b <= a) return b == a ? 0.0 : -integrate(f, b, a, splits, tol);
    std::vector<double> seams;
    seams.push_back(a);
    for (double s : splits)
        if (s > a && s < b) seams.push_back(s);
    seams.push_back(b);
    sort_dedupe(seams, 1e-14 * std::max(1.0, std::abs(b - a)));
    double acc = 0.0;
    for (size_t i = 0; i + 1 < seams.size(); ++i)
        acc += adaptive_piece(f, seams[i], seams[i + 1], tol);
    return acc;
}

} // namespace quadrature

// --- PeriodicSignal ----------------------------------------------------------

PeriodicSignal PeriodicSignal::parse(std::string_view text, double period,
                                     const std::map<std::string, double>& bindings) {
    if (!(period > 0.0)) throw ConfigError("signal period must be positive");
    Parser parser(text, period, bindings);
    PeriodicSignal s;
    s.root_ = parser.run();
    s.period_ = period;
    s.source_ = std::string(text);
    s.finalize();
    return s;
}

PeriodicSignal PeriodicSignal::constant(double value, double period) {
    if (!(period > 0.0)) throw ConfigError("signal period must be positive");
    PeriodicSignal s;
    s.root_ = make_const(value);
    s.period_ = period;
    s.source_ = std::to_string(value);
    s.finalize();
    return s;
}

PeriodicSignal PeriodicSignal::table(double period, std::vector<double> knots,
                                     std::vector<double> values) {
    if (!(period > 0.0)) throw ConfigError("signal period must be positive");
    if (knots.size() != values.size() || knots.size() < 2)
        throw ConfigError("table signal needs matching knot/value lists with >= 2 entries");
    for (size_t i = 1; i < knots.size(); ++i)
        if (knots[i] <= knots[i - 1]) throw ConfigError("table knots must be strictly increasing");
    if (knots.front() < 0.0 || knots.back() > period)
        throw ConfigError("table knots must lie in [0, T]");
    Expr e;
    e.kind = Expr::Kind::Table;
    e.bounds = std::move(knots);
    e.table_values = std::move(values);
    e.signal_period = period;
    PeriodicSignal s;
    s.root_ = make_node(std::move(e));
    s.period_ = period;
    s.source_ = "<table>";
    s.finalize();
    return s;
}

PeriodicSignal PeriodicSignal::linear_combination(const std::vector<double>& coeffs,
                                                  const std::vector<PeriodicSignal>& parts) {
    if (coeffs.size() != parts.size() || parts.empty())
        throw ConfigError("linear_combination needs matching non-empty coefficient/signal lists");
    const double period = parts.front().period_;
    ExprPtr acc;
    for (size_t i = 0; i < parts.size(); ++i) {
        if (parts[i].period_ != period)
            throw ConfigError("linear_combination requires a common period");
        ExprPtr term = make_binary(Expr::Kind::Mul, make_const(coeffs[i]), parts[i].root_);
        acc = acc ? make_binary(Expr::Kind::Add, acc, term) : term;
    }
    PeriodicSignal s;
    s.root_ = acc;
    s.period_ = period;
    s.source_ = "<combination>";
    s.finalize();
    return s;
}

void PeriodicSignal::finalize() {
    std::vector<double> bps;
    root_->collect_breakpoints(period_, bps);
    sort_dedupe(bps, 1e-12 * std::max(1.0, period_));
    breakpoints_ = std::move(bps);
    continuous_ = root_->continuous();

    // raw-expression periodicity check: catches e.g. sin(t) declared with T=1
    for (int j = 0; j < 1000; ++j) {
        const double t = (j + 0.37) * period_ / 1000.0;
        const double v0 = eval_raw(t, Side::Right);
        const double v1 = eval_raw(t + period_, Side::Right);
        if (std::abs(v1 - v0) > 1e-12 * (1.0 + std::abs(v0)))
            throw ConfigError("expression is not periodic with the declared period");
    }

    // Lipschitz estimate from divided differences, skipping intervals whose
    // right-open hull contains a (period-shifted) breakpoint
    const int n = 10000;
    const double h = period_ / n;
    std::vector<double> seams = breakpoints_;
    for (double bp : breakpoints_) seams.push_back(bp + period_);
    std::sort(seams.begin(), seams.end());
    const double slack = 1e-12 * std::max(1.0, period_);
    double est = 0.0;
    double prev = eval(0.0, Side::Right);
    for (int i = 1; i <= n; ++i) {
        const double t = i * h;
        const double cur = eval(t, Side::Right);
        auto it = std::upper_bound(seams.begin(), seams.end(), t - h + slack);
        const bool straddles = it != seams.end() && *it <= t + slack;
        if (!straddles) est = std::max(est, std::abs(cur - prev) / h);
        prev = cur;
    }
    estimated_lipschitz_ = est;
}

double PeriodicSignal::eval(double t, Side side) const {
    if (!root_) throw NumericalError("evaluating an empty signal");
    return root_->eval(wrap_period(t, period_, side), side);
}

double PeriodicSignal::eval_raw(double t, Side side) const { return root_->eval(t, side); }

double PeriodicSignal::mean() const { return integral(0.0, period_) / period_; }

double PeriodicSignal::integral(double a, double b) const {
    std::vector<double> splits;
    if (!breakpoints_.empty() && b > a) {
        const double k0 = std::floor(a / period_);
        for (double base = k0 * period_; base < b; base += period_)
            for (double bp : breakpoints_) {
                const double s = base + bp;
                if (s > a && s < b) splits.push_back(s);
            }
    }
    auto f = [this](double t) { return eval(t, Side::Right); };
    return quadrature::integrate(f, a, b, splits, 1e-12 * std::max(1.0, b - a));
}

namespace {

template <typename F>
void scan_period(double period, const std::vector<double>& bps, F&& visit) {
    const int n = 4096;
    for (int i = 0; i < n; ++i) visit(i * period / n, Side::Right);
    for (double bp : bps) {
        visit(bp, Side::Right);
        visit(bp, Side::Left);
    }
}

} // namespace

double PeriodicSignal::max_value() const {
    double m = -std::numeric_limits<double>::infinity();
    scan_period(period_, breakpoints_,
                [&](double t, Side s) { m = std::max(m, eval(t, s)); });
    return m;
}

double PeriodicSignal::min_value() const {
    double m = std::numeric_limits<double>::infinity();
    scan_period(period_, breakpoints_,
                [&](double t, Side s) { m = std::min(m, eval(t, s)); });
    return m;
}

double PeriodicSignal::max_abs() const { return std::max(std::abs(max_value()), std::abs(min_value())); }

double PeriodicSignal::lipschitz() const {
    return declared_lipschitz_ ? *declared_lipschitz_ : estimated_lipschitz_;
}

void PeriodicSignal::declare_lipschitz(double bound) {
    if (bound < 0.0) throw ConfigError("Lipschitz bound must be nonnegative");
    declared_lipschitz_ = bound;
}

// --- TimeFunction -------------------------------------------------------------

double TimeFunction::operator()(double t) const { return fn(wrap_period(t, period, Side::Right)); }

double TimeFunction::integral_over_period() const {
    return quadrature::integrate(fn, 0.0, period, breakpoints, 1e-12 * std::max(1.0, period));
}

double TimeFunction::l1_norm_over_period() const {
    auto abs_fn = [this](double t) { return std::abs(fn(t)); };
    return quadrature::integrate(abs_fn, 0.0, period, breakpoints, 1e-11 * std::max(1.0, period));
}

} // namespace crawl
