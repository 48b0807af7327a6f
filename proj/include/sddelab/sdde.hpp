#pragma once

// Discrete-delay SDDEs dx = F(x(t), x(t - tau)) dt + g(x(t)) dW integrated
// step by step against an interpolated history of the path.

#include "sddelab/core.hpp"
#include "sddelab/integrator.hpp"

#include <deque>
#include <limits>

namespace sddelab {

/// Sliding window of (time, value) knots with piecewise-linear lookup.
/// Seeded from an initial segment; appended to after each accepted step.
class HistoryBuffer {
public:
    /// Knots older than (latest - retain) are dropped, keeping one knot at
    /// or before that time so lookups on [latest - retain, latest] stay valid.
    explicit HistoryBuffer(const Segment& phi,
                           double retain = std::numeric_limits<double>::infinity());

    /// t must exceed the latest stored time.
    void push(double t, double x);

    /// Value at s, exact at knots. Lookups with nondecreasing s are O(1)
    /// amortized. Throws std::out_of_range outside the stored window.
    double lookup(double s) const;

    double front_time() const noexcept { return knots_.front().t; }
    double latest_time() const noexcept { return knots_.back().t; }
    std::size_t size() const noexcept { return knots_.size(); }

private:
    struct Knot {
        double t;
        double x;
    };
    std::deque<Knot> knots_;
    double retain_;
    mutable std::size_t cursor_ = 0;
};

/// SDDE drift F(x, history(t - tau)) with diffusion g(x), for the lockstep driver.
class DelayDynamics final : public Dynamics {
public:
    DelayDynamics(const ModelSpec& model, const Segment& phi, double dt_max);

    double drift(double t, double x) override;
    double diffusion(double x) const override { return model_.diffusion(x); }
    void accept(double t, double x) override { history_.push(t, x); }
    std::optional<double> last_delayed() const override { return last_delayed_; }

private:
    const ModelSpec& model_;
    HistoryBuffer history_;
    double last_delayed_ = 0.0;
};

/// Integrates the SDDE with the same stepping, ladder and stopping rules as
/// simulate_sde. The returned trajectory starts with the knots of phi at
/// negative times; result.origin indexes t = 0.
PathResult simulate_sdde(const ModelSpec& model, const Segment& phi, const IntegratorConfig& config,
                         const NoiseSource& noise);

/// psi = a on [-tau, -eps], then linear to x0 at 0. Requires 0 < eps < tau.
Segment build_initial_from_constant(double a, double x0, double eps, double tau = 1.0);

/// The recorded path on [n - tau, n], shifted to [-tau, 0]. Throws
/// std::invalid_argument if the record does not cover the window or the
/// path stopped (other than by censoring after n) before n.
Segment build_initial_from_path(const PathResult& path, double n, double tau = 1.0);

} // namespace sddelab
