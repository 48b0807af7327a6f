#pragma once

// Euler-Maruyama integration of scalar SDEs up to blow-up, extinction or a
// horizon. Several paths can be advanced in lockstep on one shared Brownian
// path and one common time grid; the delay engine, the comparison sandwich
// and the transform check are all built on that driver.

#include "sddelab/core.hpp"
#include "sddelab/noise.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace sddelab {

enum class RecordMode {
    every_step, ///< every accepted step
    sampled,    ///< first step at or past each multiple of output_dt, plus the end
    final_only, ///< initial and final state only
};

/// Rungs 10^lo, 10^(lo+1), ..., 10^hi.
std::vector<double> decade_ladder(int lo_exponent = 1, int hi_exponent = 8);

struct IntegratorConfig {
    double dt_max = 1e-3;
    /// Resolution of the shared noise; 0 means dt_max. dt_max must be an
    /// integer multiple of it.
    double noise_dt = 0.0;
    double horizon = 1.0;
    /// Increasing thresholds n_1 < n_2 < ...; crossing the last with a
    /// positive certificate declares blow-up.
    std::vector<double> ladder = decade_ladder();
    double extinction_eps = 1e-8;
    /// Steps below this size are an integration fault.
    double dt_floor = 1e-12;
    /// Positive-state paths also keep sigma(x)^2 dt <= positivity_kappa * x^2,
    /// so one Euler step cannot jump from well above the barrier to below 0
    /// (0 disables). The bound is never pushed below positivity_dt_min.
    double positivity_kappa = 0.01;
    double positivity_dt_min = 1e-9;
    RecordMode record = RecordMode::every_step;
    double output_dt = 0.0;

    double noise_resolution() const noexcept { return noise_dt > 0.0 ? noise_dt : dt_max; }
    /// Throws std::invalid_argument on broken invariants.
    void validate() const;
};

struct SdeProblem {
    ScalarFn drift;
    ScalarFn diffusion;
    double x0 = 0.0;
    bool positive_state = false;
};

struct Crossing {
    double threshold = 0.0;
    double time = 0.0;
};

struct PathResult {
    std::vector<double> t;
    std::vector<double> x;
    /// Index into t/x of time 0 (delay runs prepend the initial segment).
    std::size_t origin = 0;
    /// Per-step logs, filled in every_step mode only: the drift and noise
    /// used by the step starting at t[origin + k], and for delay runs the
    /// delayed value fed to the drift.
    std::vector<double> drift;
    std::vector<double> dW;
    std::vector<double> delayed;
    std::vector<Crossing> crossings;
    Outcome outcome = StoppingEvent{};
    std::size_t steps = 0;

    bool faulted() const noexcept { return std::holds_alternative<IntegrationFault>(outcome); }
    /// Null when the run faulted.
    const StoppingEvent* event() const noexcept { return std::get_if<StoppingEvent>(&outcome); }
};

/// One Euler-Maruyama step: x + b dt + sigma dW.
double step(double x, double b, double sigma, double dt, double dW) noexcept;

/// Step-size policy: min(dt_max, 0.1 / (1 + |b|/s + sigma^2/s^2)) with s = 1 + |x|.
/// For |x| small this is 0.1/(1 + |b| + sigma^2); for large |x| it bounds the
/// relative change per step, so ladders up to 1e8 resolve in a few hundred steps.
double adaptive_dt(double x, double b, double sigma, double dt_max) noexcept;

/// Step bound near the boundary of a positive state space:
/// max(dt_min, kappa x^2 / sigma^2), infinite where sigma vanishes.
double positivity_dt(double x, double sigma, double kappa, double dt_min) noexcept;

/// Geometric-escape test on ladder crossings: gaps between successive
/// crossing times (the first measured from t = 0) must strictly decrease over
/// the last four. nullopt when fewer than four rungs were crossed.
std::optional<bool> blow_up_certificate(std::span<const Crossing> crossings);

/// Walks the shared noise on a grid of whole noise cells or aligned dyadic
/// sub-cells, so every path driven through it sees the same Brownian motion.
class BrownianClock {
public:
    BrownianClock(const NoiseSource& noise, double dt_max, double horizon);

    struct Tick {
        double dt;
        double dW;
        double t; ///< time after the step
    };

    /// Largest admissible step not exceeding dt_target. nullopt if that step
    /// would fall below dt_floor.
    std::optional<Tick> advance(double dt_target, double dt_floor);

    double time() const noexcept;
    bool finished() const noexcept { return cell_ >= horizon_cells_ && sub_ == 0; }
    std::uint64_t cells_per_max_step() const noexcept { return max_cells_; }

private:
    static constexpr unsigned depth = NoiseSource::max_level;
    static constexpr std::uint64_t full = std::uint64_t{1} << depth;

    const NoiseSource& noise_;
    double base_dt_;
    std::uint64_t max_cells_;
    std::uint64_t horizon_cells_;
    std::uint64_t cell_ = 0;
    std::uint64_t sub_ = 0; ///< offset inside the current cell, in units of 2^-depth
};

/// Coefficients of one path in a lockstep run.
class Dynamics {
public:
    virtual ~Dynamics() = default;
    virtual double drift(double t, double x) = 0;
    virtual double diffusion(double x) const = 0;
    /// Called after each accepted step.
    virtual void accept(double /*t*/, double /*x*/) {}
    /// Delayed value used by the last drift() call, if any.
    virtual std::optional<double> last_delayed() const { return std::nullopt; }
};

/// Dynamics of an instantaneous SDE, dx = b(x) dt + sigma(x) dW.
class SdeDynamics final : public Dynamics {
public:
    SdeDynamics(ScalarFn drift, ScalarFn diffusion)
        : drift_(std::move(drift)), diffusion_(std::move(diffusion))
    {
    }
    double drift(double, double x) override { return drift_(x); }
    double diffusion(double x) const override { return diffusion_(x); }

private:
    ScalarFn drift_;
    ScalarFn diffusion_;
};

struct Lane {
    Dynamics* dynamics = nullptr;
    double x0 = 0.0;
    bool positive_state = false;
    /// Overrides config.ladder for this lane when non-empty.
    std::vector<double> ladder;
};

/// Advances all lanes on one grid and one noise path. The step size is the
/// minimum of adaptive_dt over the lanes still running; a lane that stops
/// (or faults) freezes while the others continue. Runs until every lane has
/// stopped or the horizon is reached.
std::vector<PathResult> run_lockstep(std::span<Lane> lanes, const IntegratorConfig& config,
                                     const NoiseSource& noise);

/// Single instantaneous SDE.
PathResult simulate_sde(const SdeProblem& problem, const IntegratorConfig& config,
                        const NoiseSource& noise);

} // namespace sddelab
