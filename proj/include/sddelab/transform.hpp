#pragma once

// Ito's formula as a map on coefficient pairs: for a C^2 bijection f, the
// process f(x) has drift f'(x) b(x) + f''(x) sigma(x)^2 / 2 and diffusion
// f'(x) sigma(x), valid up to the explosion time.

#include "sddelab/core.hpp"
#include "sddelab/integrator.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>

namespace sddelab {

/// Argument outside the image of the map.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

struct SmoothMap {
    std::string name;
    ScalarFn f;
    ScalarFn f_prime;
    ScalarFn f_double_prime;
    ScalarFn f_inverse;
    /// Open interval on which f is C^2 with f' != 0.
    Interval domain;

    /// Open image f(domain), from the endpoint values.
    Interval image() const;

    static SmoothMap identity();
    /// f(y) = -log y, (0, inf) -> R.
    static SmoothMap neg_log();
    /// f(x) = exp(-x), R -> (0, inf).
    static SmoothMap exp_neg();
};

/// Checks f_inverse(f(x)) = x to 1e-10 (relative) and f' != 0 on a grid
/// inside the domain (clipped to [-clip, clip]).
bool validate_map(const SmoothMap& map, std::size_t grid = 101, double clip = 20.0);

struct CoefficientPair {
    ScalarFn drift;
    ScalarFn diffusion;
};

/// Coefficients of y = f(x). The returned functions throw DomainError for
/// arguments outside f(domain).
CoefficientPair push_coefficients(ScalarFn drift, ScalarFn diffusion, const SmoothMap& map);

struct ConsistencyResult {
    /// sup |f_inverse(x(t)) - y(t)| over common grid points before the
    /// earlier stopping time.
    double sup_discrepancy = 0.0;
    std::size_t grid_points = 0;
    Outcome direct;
    Outcome transformed;
    bool faulted() const noexcept
    {
        return std::holds_alternative<IntegrationFault>(direct) ||
               std::holds_alternative<IntegrationFault>(transformed);
    }
};

/// Default ladder for a run transformed by `map` out of a positive state
/// space: four rungs four apart, the top one at |f(extinction_eps)|, so the
/// transformed run crosses its top rung exactly where the direct run meets
/// the extinction barrier. Falls back to decade_ladder() when that image is
/// not above 12.
std::vector<double> transformed_ladder(const SmoothMap& map, double extinction_eps);

/// Simulates y from `problem` and x = f(y) from the pushed coefficients on
/// one noise path and grid, continuing each until its own stop or the
/// horizon. `ladder` overrides the transformed run's ladder when non-empty.
ConsistencyResult pathwise_consistency(const SdeProblem& problem, const SmoothMap& map,
                                       const IntegratorConfig& config, std::uint64_t seed,
                                       std::vector<double> ladder = {});

} // namespace sddelab
