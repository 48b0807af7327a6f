#include "sddelab/comparison.hpp"

#include "sddelab/kernels.hpp"
#include "sddelab/noise.hpp"
#include "sddelab/output.hpp"
#include "sddelab/sdde.hpp"

#include <algorithm>
#include <cmath>

namespace sddelab {

namespace {

double grid_point(Interval box, std::size_t i, std::size_t n)
{
    if (n < 2)
        return box.lo;
    return box.lo + box.width() * (static_cast<double>(i) / static_cast<double>(n - 1));
}

// First grid index c with sign * (F(x, y_c) - F(x, y_j)) <= 0 for every
// probe row and every j; -1 if there is none.
long uniform_extremum(const std::vector<std::vector<double>>& table, double sign)
{
    const std::size_t grid = table.front().size();
    for (std::size_t c = 0; c < grid; ++c) {
        bool works = true;
        for (const auto& row : table) {
            const double fc = row[c];
            works = std::all_of(row.begin(), row.end(),
                                [&](double fj) { return sign * (fc - fj) <= 0.0; });
            if (!works)
                break;
        }
        if (works)
            return static_cast<long>(c);
    }
    return -1;
}

} // namespace

BoundConstants bound_constants(const ModelSpec& model, Interval range, std::size_t grid,
                               const ProbeSet& probe)
{
    if (!std::isfinite(range.lo) || !std::isfinite(range.hi) || range.lo > range.hi)
        throw std::invalid_argument("bound_constants: range must be finite and nonempty");
    switch (model.delay_monotonicity) {
    case DelayMonotonicity::increasing:
        return {range.lo, range.hi, false};
    case DelayMonotonicity::decreasing:
        return {range.hi, range.lo, false};
    case DelayMonotonicity::unknown:
        break;
    }
    if (grid < 1 || probe.points < 1)
        throw std::invalid_argument("bound_constants: grid and probe set must be nonempty");

    std::vector<std::vector<double>> table(probe.points, std::vector<double>(grid));
    for (std::size_t p = 0; p < probe.points; ++p) {
        const double x = grid_point(probe.x_box, p, probe.points);
        for (std::size_t j = 0; j < grid; ++j)
            table[p][j] = model.drift(x, grid_point(range, j, grid));
    }
    const long lo = uniform_extremum(table, 1.0);
    const long hi = uniform_extremum(table, -1.0);
    if (lo < 0 || hi < 0)
        throw BoundConditionViolated(
            "delay-bound condition violated on probe set: no y bounds F(x, .) for every probe x");
    return {grid_point(range, static_cast<std::size_t>(lo), grid),
            grid_point(range, static_cast<std::size_t>(hi), grid), true};
}

SandwichReport coupled_sandwich(const ModelSpec& model, const Segment& phi,
                                const IntegratorConfig& config, std::uint64_t seed, double delta)
{
    return coupled_sandwich(model, phi, config, seed, delta, bound_constants(model, phi.range()));
}

SandwichReport coupled_sandwich(const ModelSpec& model, const Segment& phi,
                                const IntegratorConfig& config, std::uint64_t seed, double delta,
                                const BoundConstants& bounds)
{
    if (delta < 0.0)
        throw std::invalid_argument("coupled_sandwich: delta must be nonnegative");

    IntegratorConfig window = config;
    window.horizon = std::min(model.delay, config.horizon);
    window.record = RecordMode::every_step;

    SdeDynamics lower(model.frozen_drift(bounds.a1), model.diffusion);
    DelayDynamics middle(model, phi, window.dt_max);
    SdeDynamics upper(model.frozen_drift(bounds.a2), model.diffusion);
    const double x0 = phi.initial_value();
    std::array<Lane, 3> lanes{Lane{&lower, x0, model.positive_state, {}},
                              Lane{&middle, x0, model.positive_state, {}},
                              Lane{&upper, x0, model.positive_state, {}}};

    const NoiseSource noise(seed, window.noise_resolution());
    const auto paths = run_lockstep(lanes, window, noise);

    SandwichReport report;
    report.seed = seed;
    report.a1 = bounds.a1;
    report.a2 = bounds.a2;
    report.delta = delta;
    for (std::size_t i = 0; i < 3; ++i)
        report.outcomes[i] = paths[i].outcome;

    const std::size_t common =
        std::min({paths[0].x.size(), paths[1].x.size(), paths[2].x.size()});
    report.grid_points = common;
    const auto& k = kernels::active();
    report.violations_low = k.count_exceeding(paths[0].x.data(), paths[1].x.data(), delta, common);
    report.violations_high = k.count_exceeding(paths[1].x.data(), paths[2].x.data(), delta, common);
    return report;
}

std::string sandwich_csv_header()
{
    return "seed,a1,a2,grid_points,viol_low,viol_high,event_x1,event_x,event_x2";
}

std::string sandwich_csv_row(const SandwichReport& r)
{
    return std::to_string(r.seed) + ',' + format_double(r.a1) + ',' + format_double(r.a2) + ',' +
           std::to_string(r.grid_points) + ',' + std::to_string(r.violations_low) + ',' +
           std::to_string(r.violations_high) + ',' + outcome_label(r.outcomes[0]) + ',' +
           outcome_label(r.outcomes[1]) + ',' + outcome_label(r.outcomes[2]);
}

} // namespace sddelab
