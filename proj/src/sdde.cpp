#include "sddelab/sdde.hpp"

#include <cmath>
#include <stdexcept>

namespace sddelab {

DelayDynamics::DelayDynamics(const ModelSpec& model, const Segment& phi, double dt_max)
    : model_(model), history_(phi, model.delay + dt_max)
{
    if (std::fabs(phi.tau() - model.delay) > 1e-12 * model.delay)
        throw std::invalid_argument("initial segment length does not match the model delay");
}

double DelayDynamics::drift(double t, double x)
{
    last_delayed_ = history_.lookup(t - model_.delay);
    return model_.drift(x, last_delayed_);
}

PathResult simulate_sdde(const ModelSpec& model, const Segment& phi, const IntegratorConfig& config,
                         const NoiseSource& noise)
{
    DelayDynamics dynamics(model, phi, config.dt_max);
    Lane lane{&dynamics, phi.initial_value(), model.positive_state, {}};
    auto results = run_lockstep(std::span<Lane>(&lane, 1), config, noise);
    PathResult path = std::move(results.front());

    // Prepend the initial segment; its knot at 0 is the path's first point.
    const auto ts = phi.times();
    const auto vs = phi.values();
    path.t.insert(path.t.begin(), ts.begin(), ts.end() - 1);
    path.x.insert(path.x.begin(), vs.begin(), vs.end() - 1);
    path.origin = ts.size() - 1;
    return path;
}

Segment build_initial_from_constant(double a, double x0, double eps, double tau)
{
    if (!(tau > 0.0))
        throw std::invalid_argument("build_initial_from_constant: tau must be positive");
    if (!(eps > 0.0) || !(eps < tau))
        throw std::invalid_argument("build_initial_from_constant: eps must lie in (0, tau)");
    return Segment({-tau, -eps, 0.0}, {a, a, x0});
}

Segment build_initial_from_path(const PathResult& path, double n, double tau)
{
    if (!(tau > 0.0))
        throw std::invalid_argument("build_initial_from_path: tau must be positive");
    const double start = n - tau;
    if (path.t.empty() || start < path.t.front())
        throw std::invalid_argument("build_initial_from_path: window starts before the record");

    // The window must be free of anything but censoring at or after n.
    const double stop = outcome_time(path.outcome);
    const auto* event = path.event();
    const bool censored = event != nullptr && event->kind == EventKind::censored;
    if (!censored && stop <= n)
        throw std::invalid_argument("build_initial_from_path: the path stops inside the window");
    if (path.t.back() < n)
        throw std::invalid_argument("build_initial_from_path: window ends after the record");

    const double snap = 1e-9 * std::max(1.0, std::fabs(n));
    auto value_at = [&](double s) {
        auto it = std::lower_bound(path.t.begin(), path.t.end(), s - snap);
        const std::size_t i = static_cast<std::size_t>(it - path.t.begin());
        if (i < path.t.size() && std::fabs(path.t[i] - s) <= snap)
            return path.x[i];
        return lerp_knots(path.t[i - 1], path.x[i - 1], path.t[i], path.x[i], s);
    };

    std::vector<double> times{-tau};
    std::vector<double> values{value_at(start)};
    for (std::size_t i = 0; i < path.t.size(); ++i) {
        if (path.t[i] > start + snap && path.t[i] < n - snap) {
            times.push_back(path.t[i] - n);
            values.push_back(path.x[i]);
        }
    }
    times.push_back(0.0);
    values.push_back(value_at(n));
    return Segment(std::move(times), std::move(values));
}

} // namespace sddelab
