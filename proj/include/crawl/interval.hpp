#pragma once

#include <algorithm>
#include <cmath>

namespace crawl {

/// Closed interval of admissible values. Single-valued results have lo == hi.
struct ValueInterval {
    double lo = 0.0;
    double hi = 0.0;

    ValueInterval() = default;
    ValueInterval(double v) : lo(v), hi(v) {}
    ValueInterval(double a, double b) : lo(a), hi(b) {}

    bool single_valued() const { return lo == hi; }
    bool contains(double y) const { return lo <= y && y <= hi; }
    double mid() const { return 0.5 * (lo + hi); }
    double width() const { return hi - lo; }
    double max_abs() const { return std::max(std::abs(lo), std::abs(hi)); }

    ValueInterval& operator+=(const ValueInterval& o) {
        lo += o.lo;
        hi += o.hi;
        return *this;
    }
    ValueInterval& operator+=(double c) {
        lo += c;
        hi += c;
        return *this;
    }
    friend ValueInterval operator+(ValueInterval a, const ValueInterval& b) { return a += b; }
    friend ValueInterval operator+(ValueInterval a, double c) { return a += c; }
    friend ValueInterval operator-(const ValueInterval& a) { return {-a.hi, -a.lo}; }

    /// Scale by a (possibly negative) factor, keeping lo <= hi.
    friend ValueInterval operator*(double c, const ValueInterval& a) {
        return c >= 0 ? ValueInterval{c * a.lo, c * a.hi} : ValueInterval{c * a.hi, c * a.lo};
    }
};

} // namespace crawl
