#include <doctest.h>

#include <cmath>
#include <numbers>

#include "crawl/errors.hpp"
#include "crawl/signals.hpp"

using namespace crawl;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

TEST_SUITE("signals") {

TEST_CASE("parse and evaluate basic expressions") {
    const auto s = PeriodicSignal::parse("2+cos(t)", kTwoPi);
    CHECK(s(0.0) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(s(kTwoPi) == doctest::Approx(3.0).epsilon(1e-12));

    const auto sq = PeriodicSignal::parse("square(t;1,1)", 1.0);
    CHECK(sq(0.25) == 1.0);
    CHECK(sq(0.0) == 1.0);
    CHECK(sq(0.5) == -1.0); // right limit at the jump
    CHECK(sq(0.75) == -1.0);

    // w_1 of the two-mass dry example: -alpha on the first half period
    const auto w1 = PeriodicSignal::parse("-1*square(t;1,alpha)", 1.0, {{"alpha", 1.0}});
    CHECK(w1(0.25) == -1.0);
    CHECK(w1(0.75) == 1.0);

    const auto sn = PeriodicSignal::parse("sin(t)", kTwoPi);
    CHECK(sn(std::numbers::pi / 2) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("left-sided evaluation recovers the limit from below") {
    const auto sq = PeriodicSignal::parse("square(t;1,1)", 1.0);
    CHECK(sq.eval(0.5, Side::Left) == 1.0);
    CHECK(sq.eval(0.0, Side::Left) == -1.0);
    CHECK(sq.eval(0.25, Side::Left) == 1.0);
}

TEST_CASE("breakpoints are collected and propagated through sums") {
    const auto sq = PeriodicSignal::parse("square(t;1,1)", 1.0);
    REQUIRE(sq.breakpoints().size() == 2);
    CHECK(sq.breakpoints()[0] == 0.0);
    CHECK(sq.breakpoints()[1] == 0.5);

    const auto sn = PeriodicSignal::parse("sin(t)", kTwoPi);
    CHECK(sn.breakpoints().empty());

    const auto mix = PeriodicSignal::parse("square(t;1,1)+cos(2*pi*t)", 1.0);
    REQUIRE(mix.breakpoints().size() == 2);
    CHECK(mix.breakpoints()[0] == 0.0);
    CHECK(mix.breakpoints()[1] == 0.5);
}

TEST_CASE("mean over a period") {
    CHECK(std::abs(PeriodicSignal::parse("square(t;1,1)", 1.0).mean()) <= 1e-10);
    CHECK(PeriodicSignal::constant(3.0, 1.0).mean() == doctest::Approx(3.0).epsilon(1e-14));
    // analytic: (1/2pi) integral of sin^2 over a period = 1/2
    CHECK(PeriodicSignal::parse("sin(t)*sin(t)", kTwoPi).mean() ==
          doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::abs(PeriodicSignal::parse("square(t;1,1)", 1.0).mean()) <= 1e-10);
}

TEST_CASE("parse errors are reported with a position") {
    CHECK_THROWS_AS(PeriodicSignal::parse("2+", 1.0), ConfigError);
    CHECK_THROWS_WITH_AS(PeriodicSignal::parse("2*beta", 1.0), doctest::Contains("unbound name"),
                         ConfigError);
    CHECK_THROWS_AS(PeriodicSignal::parse("sin(t", kTwoPi), ConfigError);
    CHECK_THROWS_AS(PeriodicSignal::parse("1", 0.0), ConfigError);
    CHECK_THROWS_AS(PeriodicSignal::parse("1", -2.0), ConfigError);
    // non-periodic expression under the declared period
    CHECK_THROWS_AS(PeriodicSignal::parse("sin(t)", 1.0), ConfigError);
    CHECK_THROWS_AS(PeriodicSignal::parse("t", 1.0), ConfigError);
}

TEST_CASE("periodicity holds over several periods") {
    const auto signals = {PeriodicSignal::parse("2+cos(t)", kTwoPi),
                          PeriodicSignal::parse("square(t;1,1)*triangle(t;1,2)", 1.0),
                          PeriodicSignal::parse("piecewise(0,1+sin(2*pi*t),0.5,-1)", 1.0)};
    for (const auto& s : signals) {
        for (int k : {1, 2, 5}) {
            for (int j = 0; j < 97; ++j) {
                const double t = (j + 0.171) * s.period() / 97.0;
                const double base = s(t);
                CHECK(std::abs(s(t + k * s.period()) - base) <= 1e-12 * (1.0 + std::abs(base)));
            }
        }
    }
}

TEST_CASE("triangle wave is continuous and its slope is the square wave") {
    const auto tri = PeriodicSignal::parse("triangle(t;1,1)", 1.0);
    CHECK(tri(0.0) == 0.0);
    CHECK(tri(0.5) == 1.0);
    CHECK(tri(0.25) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(tri.continuous());
    // derivative magnitude 2*amp/P matches square(t;P, 2*amp/P)
    const double h = 1e-7;
    CHECK((tri(0.2 + h) - tri(0.2)) / h == doctest::Approx(2.0).epsilon(1e-5));
    CHECK((tri(0.7 + h) - tri(0.7)) / h == doctest::Approx(-2.0).epsilon(1e-5));
}

TEST_CASE("piecewise segments select by right-continuity") {
    const auto pw = PeriodicSignal::parse("piecewise(0,1,0.5,-1)", 1.0);
    const auto sq = PeriodicSignal::parse("square(t;1,1)", 1.0);
    for (int i = 0; i < 64; ++i) {
        const double t = i / 64.0;
        CHECK(pw(t) == sq(t));
    }
    CHECK(pw(0.5) == -1.0);
    CHECK(pw.eval(0.5, Side::Left) == 1.0);
    CHECK_THROWS_AS(PeriodicSignal::parse("piecewise(0.2,1,0.5,-1)", 1.0), ConfigError);
    CHECK_THROWS_AS(PeriodicSignal::parse("piecewise(0,1,2,-1)", 1.0), ConfigError);
}

TEST_CASE("table signals interpolate linearly and wrap") {
    const auto tab = PeriodicSignal::table(2.0, {0.0, 0.5, 1.5}, {0.0, 1.0, -1.0});
    CHECK(tab(0.25) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(tab(1.0) == doctest::Approx(0.0).epsilon(1e-14));
    // wrap segment from (1.5, -1) to (2.0, 0)
    CHECK(tab(1.75) == doctest::Approx(-0.5).epsilon(1e-14));
    CHECK(tab(2.25) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(tab.continuous());
    CHECK_THROWS_AS(PeriodicSignal::table(1.0, {0.0, 2.0}, {0.0, 1.0}), ConfigError);
}

TEST_CASE("quadrature with breakpoint splitting is self-consistent") {
    const auto s = PeriodicSignal::parse("square(t;1,2)*triangle(t;1,1)+cos(2*pi*t)", 1.0);
    auto f = [&s](double t) { return s(t); };
    const double coarse = quadrature::integrate(f, 0.0, 1.0, s.breakpoints(), 1e-12);
    // 10x denser seams must agree
    std::vector<double> seams;
    for (int i = 0; i < 10; ++i)
        for (double bp : s.breakpoints()) seams.push_back(bp + i * 0.1);
    const double fine = quadrature::integrate(f, 0.0, 1.0, seams, 1e-13);
    CHECK(std::abs(coarse - fine) <= 1e-9);
}

TEST_CASE("integral over shifted windows splits at shifted breakpoints") {
    const auto sq = PeriodicSignal::parse("square(t;1,1)", 1.0);
    CHECK(sq.integral(0.0, 0.5) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(sq.integral(0.25, 1.25) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(sq.integral(0.25, 2.75) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("lipschitz estimate skips jumps and sees slopes") {
    const auto sq = PeriodicSignal::parse("square(t;1,1)", 1.0);
    CHECK(sq.lipschitz() == doctest::Approx(0.0).epsilon(1e-12));
    const auto sn = PeriodicSignal::parse("sin(t)", kTwoPi);
    CHECK(sn.lipschitz() == doctest::Approx(1.0).epsilon(1e-3));
    auto declared = PeriodicSignal::parse("sin(t)", kTwoPi);
    declared.declare_lipschitz(7.0);
    CHECK(declared.lipschitz() == 7.0);
}

TEST_CASE("linear combinations share trees and union breakpoints") {
    const auto a = PeriodicSignal::parse("square(t;1,1)", 1.0);
    const auto b = PeriodicSignal::parse("cos(2*pi*t)", 1.0);
    const auto combo = PeriodicSignal::linear_combination({2.0, -1.0}, {a, b});
    CHECK(combo(0.25) == doctest::Approx(2.0 * a(0.25) - b(0.25)).epsilon(1e-14));
    CHECK(combo.breakpoints().size() == 2);
    CHECK_FALSE(combo.continuous());
}

} // TEST_SUITE
