#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "crawl/errors.hpp"
#include "crawl/models.hpp"

using namespace crawl;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

PeriodicSignal c1(double v, double T) { return PeriodicSignal::constant(v, T); }

// two equal point masses, isotropic unit dry friction, square-wave shape rates
DiscreteCrawler two_mass_dry(double alpha = 1.0, double T = 1.0) {
    const std::map<std::string, double> b{{"P", T}, {"a", alpha}};
    DiscreteCrawler c;
    c.period = T;
    c.masses = {0.5, 0.5};
    c.shape_velocities = {PeriodicSignal::parse("-1*square(t;P,a)", T, b),
                          PeriodicSignal::parse("square(t;P,a)", T, b)};
    c.laws = {FrictionLaw::dry(c1(1.0, T), c1(1.0, T)), FrictionLaw::dry(c1(1.0, T), c1(1.0, T))};
    c.load = c1(0.0, T);
    return c;
}

DiscreteCrawler two_mass_dry_star(double alpha = 1.0, double T = 2.0) {
    DiscreteCrawler c = two_mass_dry(alpha, T);
    c.laws[0] = FrictionLaw::dry(c1(2.0, T), c1(2.0, T));
    return c;
}

// continuous body reconstructing the discrete two-mass example: friction only
// on the outer thirds, deformation concentrated in the frictionless middle
ContinuousCrawler middle_actuated_body(double alpha = 1.0, double T = 1.0) {
    const std::map<std::string, double> b{{"P", T}, {"a", alpha}};
    ContinuousCrawler c;
    c.period = T;
    c.partition = {0.0, 1.0, 2.0, 3.0};
    c.density = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    c.deformation_rate = {c1(0.0, T), PeriodicSignal::parse("2*square(t;P,a)", T, b), c1(0.0, T)};
    c.law_field = {FrictionLaw::dry(c1(1.0, T), c1(1.0, T)),
                   FrictionLaw::dry(c1(0.0, T), c1(0.0, T)),
                   FrictionLaw::dry(c1(1.0, T), c1(1.0, T))};
    c.phi0 = {1.0, 1.0, 1.0};
    c.load = c1(0.0, T);
    return c;
}

// hand-coded G of the two-mass dry example: -d/du (|u-a| + |u+a|), scaled 1/M
ValueInterval dry_G_oracle(double v, double alpha) {
    auto branch = [alpha](double u) {
        return ValueInterval{u > 0 ? -1.0 : u < 0 ? 1.0 : -1.0, u > 0 ? -1.0 : u < 0 ? 1.0 : 1.0};
    };
    return branch(v - alpha) + branch(v + alpha);
}

} // namespace

TEST_SUITE("models") {

TEST_CASE("discrete reduction reproduces the dry example values") {
    const ReducedDynamics dyn = reduce_discrete(two_mass_dry());
    const ValueInterval g0 = dyn(0.25, 0.0);
    CHECK(g0.lo == 0.0);
    CHECK(g0.hi == 0.0);
    const ValueInterval g2 = dyn(0.25, 2.0);
    CHECK(g2.lo == -2.0);
    CHECK(g2.hi == -2.0);
    // stiction interval at the kink v = 1 (second mass at rest, first sliding)
    const ValueInterval g1 = dyn(0.25, 1.0);
    CHECK(g1.lo == -2.0);
    CHECK(g1.hi == 0.0);
    CHECK(dyn.flag() == DynamicsClass::Monotone);
}

TEST_CASE("doubled front friction switches sign per half period") {
    const ReducedDynamics dyn = reduce_discrete(two_mass_dry_star());
    const ValueInterval first_half = dyn(0.5, 0.0);
    CHECK(first_half.lo == 1.0);
    CHECK(first_half.hi == 1.0);
    const ValueInterval second_half = dyn(1.5, 0.0);
    CHECK(second_half.lo == -1.0);
    CHECK(second_half.hi == -1.0);
}

TEST_CASE("model invariants reject bad inputs") {
    DiscreteCrawler c = two_mass_dry();
    c.masses = {0.0, 0.0};
    CHECK_THROWS_WITH_AS(reduce_discrete(c), doctest::Contains("total mass must be positive"),
                         ConfigError);

    DiscreteCrawler nonzero_mean = two_mass_dry();
    nonzero_mean.shape_velocities[0] = c1(0.5, 1.0);
    CHECK_THROWS_WITH_AS(reduce_discrete(nonzero_mean), doctest::Contains("nonzero mean"),
                         ConfigError);

    DiscreteCrawler lopsided = two_mass_dry();
    lopsided.masses = {0.9, 0.1};
    const ReducedDynamics dyn = reduce_discrete(lopsided);
    REQUIRE(dyn.warnings().size() == 1); // barycentre consistency is warning-level
}

TEST_CASE("velocity bounds follow the tail construction") {
    const ReducedDynamics dyn = reduce_discrete(two_mass_dry());
    const Bounds& b = dyn.bounds();
    CHECK(b.R == doctest::Approx(1.0 + 1e-6).epsilon(1e-12));
    for (double t : {0.1, 0.4, 0.9})
        CHECK(b.ell_plus(t) == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(b.v_plus == doctest::Approx(3.0).epsilon(1e-5));
    CHECK(b.v_minus == doctest::Approx(-3.0).epsilon(1e-5));
    CHECK(b.dissipative);
    CHECK(b.integral_plus == doctest::Approx(-2.0).epsilon(1e-9));
    CHECK(b.integral_minus == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("viscous tails are evaluated at the residual speed margin") {
    // the two-anchor viscous crawler: mu_v = 2 +- sin t, sup|w| = 1
    DiscreteCrawler c;
    c.period = kTwoPi;
    c.masses = {1.0, 1.0};
    c.shape_velocities = {PeriodicSignal::parse("-1*sin(t)", kTwoPi),
                          PeriodicSignal::parse("sin(t)", kTwoPi)};
    c.laws = {FrictionLaw::viscous(PeriodicSignal::parse("2+sin(t)", kTwoPi)),
              FrictionLaw::viscous(PeriodicSignal::parse("2-sin(t)", kTwoPi))};
    c.load = c1(0.0, kTwoPi);
    const ReducedDynamics dyn = reduce_discrete(c);
    const Bounds& b = dyn.bounds();
    const double threshold = b.R - 1.0; // = r_margin
    for (double t : {0.0, 1.0, 2.5})
        CHECK(b.ell_plus(t) ==
              doctest::Approx(-((2 + std::sin(t)) + (2 - std::sin(t))) * threshold / 2.0)
                  .epsilon(1e-9));
    CHECK(b.dissipative);
    CHECK(dyn.flag() == DynamicsClass::StrictlyMonotone);
}

TEST_CASE("a dominating slope load breaks dissipativity") {
    DiscreteCrawler c = two_mass_dry();
    c.load = c1(-3.0, 1.0);
    const ReducedDynamics dyn = reduce_discrete(c);
    CHECK_FALSE(dyn.bounds().dissipative);
    CHECK(dyn.bounds().integral_plus == doctest::Approx(-5.0).epsilon(1e-9));
    CHECK(dyn.bounds().integral_minus == doctest::Approx(-1.0).epsilon(1e-9));

    c.load = c1(-1.0, 1.0); // moderate slope passes
    CHECK(reduce_discrete(c).bounds().dissipative);
}

TEST_CASE("continuous reduction matches the discrete dry example") {
    const ReducedDynamics cont = reduce_continuous(middle_actuated_body());
    const ReducedDynamics disc = reduce_discrete(two_mass_dry());
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> tv(0.0, 1.0), vv(-2.5, 2.5);
    for (int k = 0; k < 1000; ++k) {
        const double t = tv(rng), v = vv(rng);
        const ValueInterval a = cont(t, v), b = disc(t, v);
        CHECK(std::abs(a.lo - b.lo) <= 1e-8);
        CHECK(std::abs(a.hi - b.hi) <= 1e-8);
    }
    CHECK(cont.mass() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(cont.flag() == DynamicsClass::Monotone); // C7 fails on the middle cell
}

TEST_CASE("uniform dry body integrates the friction density") {
    ContinuousCrawler c;
    c.period = 1.0;
    c.partition = {0.0, 3.0};
    c.density = {1.0 / 3.0};
    c.deformation_rate = {c1(0.0, 1.0)};
    c.law_field = {FrictionLaw::dry(c1(1.0, 1.0), c1(1.0, 1.0))};
    c.load = c1(0.0, 1.0);
    const ReducedDynamics dyn = reduce_continuous(c);
    const ValueInterval sliding = dyn(0.3, 1.0);
    CHECK(sliding.lo == doctest::Approx(-3.0).epsilon(1e-12));
    CHECK(sliding.hi == doctest::Approx(-3.0).epsilon(1e-12));
    const ValueInterval rest = dyn(0.3, 0.0);
    CHECK(rest.lo == doctest::Approx(-3.0).epsilon(1e-12));
    CHECK(rest.hi == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(dyn.flag() == DynamicsClass::SmoothDry); // C7 holds, coefficients constant
}

TEST_CASE("relative velocity recovers the discrete shape rates") {
    const ContinuousCrawler c = middle_actuated_body();
    CHECK(relative_velocity(c, 0.25, 0.5) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(relative_velocity(c, 0.25, 2.5) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(relative_velocity(c, 0.75, 0.5) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(relative_velocity(c, 0.25, 3.5), ConfigError);

    ContinuousCrawler frozen = c;
    frozen.deformation_rate = {c1(0.0, 1.0), c1(0.0, 1.0), c1(0.0, 1.0)};
    for (double xi : {0.0, 0.7, 1.5, 2.9})
        CHECK(relative_velocity(frozen, 0.4, xi) == 0.0);
}

TEST_CASE("the density-weighted relative velocity has zero mean") {
    const ContinuousCrawler c = middle_actuated_body();
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> tv(0.0, 1.0);
    for (int k = 0; k < 20; ++k) {
        const double t = tv(rng);
        auto f = [&](double xi) { return relative_velocity(c, t, xi) / 3.0; };
        const double integral = quadrature::integrate(f, 0.0, 3.0, {1.0, 2.0}, 1e-12);
        CHECK(std::abs(integral) <= 1e-8);
    }
}

TEST_CASE("interval width counts only contacts at rest") {
    const ReducedDynamics dyn = reduce_discrete(two_mass_dry());
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> tv(0.0, 1.0);
    for (int k = 0; k < 200; ++k) {
        const double t = tv(rng);
        const auto bps = dyn.velocity_breakpoints(t);
        for (double v : bps) {
            // exactly one contact at rest here: width (mu+ + mu-)/M = 2
            CHECK(dyn(t, v).width() == doctest::Approx(2.0).epsilon(1e-12));
        }
        CHECK(dyn(t, 0.123456).width() == 0.0);
    }
}

TEST_CASE("bounds certificate holds beyond the stiction band") {
    const std::vector<ReducedDynamics> dyns = {reduce_discrete(two_mass_dry()),
                                               reduce_continuous(middle_actuated_body())};
    std::mt19937_64 rng(13);
    for (const auto& dyn : dyns) {
        const Bounds& b = dyn.bounds();
        std::uniform_real_distribution<double> tv(0.0, dyn.period());
        std::uniform_real_distribution<double> vv(b.R, b.v_plus + 1.0);
        for (int k = 0; k < 1000; ++k) {
            const double t = tv(rng), v = vv(rng);
            CHECK(dyn(t, v).hi <= b.ell_plus(t) + 1e-10);
            CHECK(dyn(t, -v).lo >= -b.ell_minus(t) - 1e-10);
        }
    }
}

TEST_CASE("hand-coded G agreement on a dense grid") {
    const ReducedDynamics dyn = reduce_discrete(two_mass_dry());
    for (int i = 0; i < 100; ++i) {
        for (int j = 0; j < 100; ++j) {
            const double t = (i + 0.31) / 100.0;
            const double v = -2.5 + 5.0 * (j + 0.17) / 100.0;
            const ValueInterval expected = dry_G_oracle(v, 1.0);
            const ValueInterval got = dyn(t, v);
            CHECK(std::abs(got.lo - expected.lo) <= 1e-12);
            CHECK(std::abs(got.hi - expected.hi) <= 1e-12);
        }
    }
}

TEST_CASE("zero sets: plateau, point and empty cases") {
    const ReducedDynamics dry = reduce_discrete(two_mass_dry());
    for (double t : {0.1, 0.6}) {
        const auto zs = zero_set(dry, t);
        REQUIRE(zs.size() == 1);
        CHECK(zs[0].lo == doctest::Approx(-1.0).epsilon(1e-6));
        CHECK(zs[0].hi == doctest::Approx(1.0).epsilon(1e-6));
    }

    // strictly monotone with closed form: -2v + sin^2(t) = 0
    DiscreteCrawler comp;
    comp.period = kTwoPi;
    comp.masses = {1.0, 1.0};
    comp.shape_velocities = {PeriodicSignal::parse("-1*sin(t)", kTwoPi),
                             PeriodicSignal::parse("sin(t)", kTwoPi)};
    comp.laws = {FrictionLaw::viscous(PeriodicSignal::parse("2+sin(t)", kTwoPi)),
                 FrictionLaw::viscous(PeriodicSignal::parse("2-sin(t)", kTwoPi))};
    comp.load = c1(0.0, kTwoPi);
    const ReducedDynamics dyn = reduce_discrete(comp);
    const auto zs = zero_set(dyn, std::numbers::pi / 2);
    REQUIRE(zs.size() == 1);
    CHECK(zs[0].lo == doctest::Approx(0.5).epsilon(1e-7));
    CHECK(zs[0].hi == doctest::Approx(0.5).epsilon(1e-7));

    // single viscous mass at rest
    DiscreteCrawler single;
    single.period = 1.0;
    single.masses = {1.0};
    single.shape_velocities = {c1(0.0, 1.0)};
    single.laws = {FrictionLaw::viscous(c1(1.0, 1.0))};
    single.load = c1(0.0, 1.0);
    const auto z1 = zero_set(reduce_discrete(single), 0.3);
    REQUIRE(z1.size() == 1);
    CHECK(std::abs(z1[0].lo) <= 1e-7);
    CHECK(std::abs(z1[0].hi) <= 1e-7);
}

TEST_CASE("zero set of a non-monotone dynamics lists every rest state") {
    DiscreteCrawler c = two_mass_dry();
    c.laws = {FrictionLaw::stribeck(c1(1.0, 1.0), c1(1.0, 1.0), 0.5, 1.0),
              FrictionLaw::stribeck(c1(1.0, 1.0), c1(1.0, 1.0), 0.5, 1.0)};
    const ReducedDynamics dyn = reduce_discrete(c);
    REQUIRE(dyn.flag() == DynamicsClass::NonMonotone);
    const auto zs = zero_set(dyn, 0.25);
    REQUIRE(zs.size() == 3);
    CHECK(zs[0].lo == doctest::Approx(-1.0).epsilon(1e-6));
    CHECK(zs[0].hi == doctest::Approx(-1.0).epsilon(1e-6));
    CHECK(std::abs(zs[1].mid()) <= 1e-6);
    CHECK(zs[2].lo == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("monotone flags imply a decreasing interval graph") {
    std::mt19937_64 rng(17);
    const std::vector<ReducedDynamics> dyns = {reduce_discrete(two_mass_dry()),
                                               reduce_continuous(middle_actuated_body())};
    for (const auto& dyn : dyns) {
        std::uniform_real_distribution<double> tv(0.0, dyn.period()), vv(-3.0, 3.0);
        for (int k = 0; k < 300; ++k) {
            double v1 = vv(rng), v2 = vv(rng);
            if (v1 == v2) continue;
            if (v1 > v2) std::swap(v1, v2);
            const double t = tv(rng);
            CHECK(dyn(t, v2).hi <= dyn(t, v1).lo + 1e-12);
        }
    }
}

TEST_CASE("a perturbation without declared constants is rejected") {
    DiscreteCrawler c = two_mass_dry();
    Perturbation undeclared;
    undeclared.fn = [](double, double u) { return 0.1 * std::sin(u); };
    c.laws[0] = FrictionLaw::dry(c1(1.0, 1.0), c1(1.0, 1.0)).with_perturbation(undeclared);
    CHECK_THROWS_WITH_AS(reduce_discrete(c), doctest::Contains("Lipschitz"), ConfigError);
}

TEST_CASE("smooth-dry flag needs continuous shape rates") {
    DiscreteCrawler c;
    c.period = kTwoPi;
    c.masses = {0.5, 0.5};
    c.shape_velocities = {PeriodicSignal::parse("cos(t)", kTwoPi),
                          PeriodicSignal::parse("-1*cos(t)", kTwoPi)};
    c.laws = {FrictionLaw::dry(c1(1.0, kTwoPi), c1(1.0, kTwoPi)),
              FrictionLaw::dry(c1(1.0, kTwoPi), c1(1.0, kTwoPi))};
    c.load = c1(0.0, kTwoPi);
    CHECK(reduce_discrete(c).flag() == DynamicsClass::SmoothDry);

    // square-wave actuation downgrades to plain monotone
    CHECK(reduce_discrete(two_mass_dry()).flag() == DynamicsClass::Monotone);

    // vanishing coefficients downgrade as well
    DiscreteCrawler zero_mu = c;
    zero_mu.laws[0] = FrictionLaw::dry(c1(0.0, kTwoPi), c1(0.0, kTwoPi));
    CHECK(reduce_discrete(zero_mu).flag() == DynamicsClass::Monotone);
}

} // TEST_SUITE
