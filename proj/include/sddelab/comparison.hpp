#pragma once

// Freezing the delayed argument: constants a1, a2 with
// F(x, a1) <= F(x, y) <= F(x, a2) for y in the range of the initial
// segment, and a coupled run of the two bounding SDEs around the SDDE on one
// Brownian path.

#include "sddelab/core.hpp"
#include "sddelab/integrator.hpp"

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace sddelab {

/// No pair of constants bounds F(x, .) uniformly over the probe set.
class BoundConditionViolated : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct BoundConstants {
    double a1 = 0.0; ///< lower: F(x, a1) <= F(x, y)
    double a2 = 0.0; ///< upper: F(x, y) <= F(x, a2)
    /// Found by grid search rather than from declared monotonicity.
    bool heuristic = false;
};

struct ProbeSet {
    Interval x_box{-5.0, 5.0};
    std::size_t points = 41;
};

/// Declared monotonicity gives the endpoints of `range` directly. Otherwise
/// searches `grid` points of `range` for a y that minimizes (maximizes)
/// F(x, .) simultaneously for every probe x; throws BoundConditionViolated
/// when no such y exists.
BoundConstants bound_constants(const ModelSpec& model, Interval range, std::size_t grid = 200,
                               const ProbeSet& probe = {});

struct SandwichReport {
    std::uint64_t seed = 0;
    double a1 = 0.0;
    double a2 = 0.0;
    double delta = 0.0;
    /// Grid points on which all three paths were still running.
    std::size_t grid_points = 0;
    std::size_t violations_low = 0;  ///< x1(t) > x(t) + delta
    std::size_t violations_high = 0; ///< x(t) > x2(t) + delta
    /// Outcomes of x1, x and x2, in that order.
    std::array<Outcome, 3> outcomes;

    double violation_fraction() const noexcept
    {
        return grid_points == 0 ? 0.0
                                : static_cast<double>(violations_low + violations_high) /
                                      static_cast<double>(grid_points);
    }
};

/// Runs x1 (drift F(., a1)), the SDDE x, and x2 (drift F(., a2)) from phi(0)
/// on [0, min(tau, horizon)] with identical increments from
/// NoiseSource(seed, config.noise_resolution()) and a common step grid.
SandwichReport coupled_sandwich(const ModelSpec& model, const Segment& phi,
                                const IntegratorConfig& config, std::uint64_t seed,
                                double delta = 1e-6);

/// Same, with the bounding constants supplied by the caller.
SandwichReport coupled_sandwich(const ModelSpec& model, const Segment& phi,
                                const IntegratorConfig& config, std::uint64_t seed, double delta,
                                const BoundConstants& bounds);

/// `seed,a1,a2,grid_points,viol_low,viol_high,event_x1,event_x,event_x2`
std::string sandwich_csv_header();
std::string sandwich_csv_row(const SandwichReport& report);

} // namespace sddelab
