#pragma once

#include <string>
#include <vector>

#include "crawl/solver.hpp"

namespace crawl {

/// The attractor bracket K = [alpha, beta] obtained by iterating the Poincare
/// map from v_minus (upwards) and v_plus (downwards).
struct AttractorReport {
    double alpha = 0.0;
    double beta = 0.0;
    std::vector<double> iterates_lo;
    std::vector<double> iterates_hi;
    bool converged = false;
    int iterations = 0;
    double bracket_width = 0.0;
    double tolerance = 0.0;
};

enum class StabilityClass { Stable, SemistableLeft, SemistableRight, Unstable };

std::string to_string(StabilityClass c);

struct FixedPoint {
    double v = 0.0;
    StabilityClass stability = StabilityClass::Stable;
};

/// Isolated fixed points and fixed-point continua of the Poincare map.
struct FixedPointReport {
    std::vector<FixedPoint> points;
    std::vector<ValueInterval> plateaus;
    double grid_resolution = 0.0;
    double tolerance = 0.0;
};

/// One-period orbit from a fixed point, with the geometric phase gamma
/// (net barycentre displacement per period).
struct LimitCycle {
    Trajectory orbit;
    double gamma = 0.0;
    double average_velocity = 0.0;
};

/// Order statistics Gamma_j(t) of the negated shape velocities {-w_i(t)}.
struct GammaDiagnostics {
    std::vector<double> grid;
    std::vector<std::vector<double>> gamma; // gamma[j][k], j-th smallest at grid[k]
    std::vector<double> min_gap;            // min over grid of gamma[j+1]-gamma[j]
    std::vector<bool> continuous_input;
    std::vector<std::string> warnings;
};

struct DissipativityReport {
    bool pass = false;
    double integral_plus = 0.0;  // must be < 0
    double integral_minus = 0.0; // must be > 0
};

struct Classification {
    std::string theorem;
    bool uniqueness_predicted = false;
    std::vector<std::string> reasons;
};

/// Iterates Phi_T from v_minus and v_plus until successive iterates differ by
/// less than tol (default 1e-6) or kmax is reached. Requires dissipativity.
AttractorReport attractor_bracket(const ReducedDynamics& dyn, const SolverConfig& cfg,
                                  double tol = 1e-6, int kmax = 10000);

/// Samples g(v) = Phi_T(v) - v over the bracket, refines sign changes by
/// bisection, merges |g| < tol runs into plateaus and classifies isolated
/// points by the sign pattern of g on both sides.
FixedPointReport fixed_points(const ReducedDynamics& dyn, const AttractorReport& report,
                              int grid_n, double tol, const SolverConfig& cfg);

LimitCycle limit_cycle(const ReducedDynamics& dyn, double v_star, const SolverConfig& cfg,
                       double periodicity_tol = 1e-6);

GammaDiagnostics gamma_order_stats(const std::vector<PeriodicSignal>& w, int grid_n = 10000);

DissipativityReport dissipativity_check(const ReducedDynamics& dyn);

Classification classify_dynamics(const ReducedDynamics& dyn);

} // namespace crawl
