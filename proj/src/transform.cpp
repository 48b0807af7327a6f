#include "sddelab/transform.hpp"

#include "sddelab/noise.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace sddelab {

namespace {
constexpr double inf = std::numeric_limits<double>::infinity();
}

Interval SmoothMap::image() const
{
    const double a = f(domain.lo);
    const double b = f(domain.hi);
    return {std::min(a, b), std::max(a, b)};
}

SmoothMap SmoothMap::identity()
{
    return {"identity",
            [](double x) { return x; },
            [](double) { return 1.0; },
            [](double) { return 0.0; },
            [](double y) { return y; },
            {-inf, inf}};
}

SmoothMap SmoothMap::neg_log()
{
    return {"neg_log",
            [](double y) { return -std::log(y); },
            [](double y) { return -1.0 / y; },
            [](double y) { return 1.0 / (y * y); },
            [](double x) { return std::exp(-x); },
            {0.0, inf}};
}

SmoothMap SmoothMap::exp_neg()
{
    return {"exp_neg",
            [](double x) { return std::exp(-x); },
            [](double x) { return -std::exp(-x); },
            [](double x) { return std::exp(-x); },
            [](double y) { return -std::log(y); },
            {-inf, inf}};
}

bool validate_map(const SmoothMap& map, std::size_t grid, double clip)
{
    const double lo = std::max(map.domain.lo, -clip);
    const double hi = std::min(map.domain.hi, clip);
    for (std::size_t i = 0; i < grid; ++i) {
        const double x = lo + (hi - lo) * (static_cast<double>(i + 1) / static_cast<double>(grid + 1));
        if (map.f_prime(x) == 0.0)
            return false;
        if (std::fabs(map.f_inverse(map.f(x)) - x) > 1e-10 * std::max(1.0, std::fabs(x)))
            return false;
    }
    return true;
}

CoefficientPair push_coefficients(ScalarFn drift, ScalarFn diffusion, const SmoothMap& map)
{
    const Interval image = map.image();
    auto preimage = [image, inv = map.f_inverse](double y) {
        if (!(y > image.lo && y < image.hi))
            throw DomainError("push_coefficients: argument outside the image of the map");
        return inv(y);
    };
    CoefficientPair out;
    out.drift = [=, fp = map.f_prime, fpp = map.f_double_prime](double y) {
        const double x = preimage(y);
        const double s = diffusion(x);
        return fp(x) * drift(x) + 0.5 * fpp(x) * s * s;
    };
    out.diffusion = [=, fp = map.f_prime](double y) {
        const double x = preimage(y);
        return fp(x) * diffusion(x);
    };
    return out;
}

std::vector<double> transformed_ladder(const SmoothMap& map, double extinction_eps)
{
    const double top = std::fabs(map.f(extinction_eps));
    if (!std::isfinite(top) || top <= 12.0)
        return decade_ladder();
    return {top - 12.0, top - 8.0, top - 4.0, top};
}

ConsistencyResult pathwise_consistency(const SdeProblem& problem, const SmoothMap& map,
                                       const IntegratorConfig& config, std::uint64_t seed,
                                       std::vector<double> ladder)
{
    if (!(problem.x0 > map.domain.lo && problem.x0 < map.domain.hi))
        throw DomainError("pathwise_consistency: initial value outside the map's domain");

    IntegratorConfig run = config;
    run.record = RecordMode::every_step;

    const CoefficientPair pushed = push_coefficients(problem.drift, problem.diffusion, map);
    SdeDynamics direct(problem.drift, problem.diffusion);
    SdeDynamics transformed(pushed.drift, pushed.diffusion);
    if (ladder.empty())
        ladder = problem.positive_state ? transformed_ladder(map, config.extinction_eps) : config.ladder;
    std::array<Lane, 2> lanes{Lane{&direct, problem.x0, problem.positive_state, {}},
                              Lane{&transformed, map.f(problem.x0), false, std::move(ladder)}};

    const NoiseSource noise(seed, run.noise_resolution());
    const auto paths = run_lockstep(lanes, run, noise);

    ConsistencyResult result;
    result.direct = paths[0].outcome;
    result.transformed = paths[1].outcome;
    const std::size_t common = std::min(paths[0].x.size(), paths[1].x.size());
    result.grid_points = common;
    for (std::size_t i = 0; i < common; ++i) {
        const double gap = std::fabs(map.f_inverse(paths[1].x[i]) - paths[0].x[i]);
        result.sup_discrepancy = std::max(result.sup_discrepancy, gap);
    }
    return result;
}

} // namespace sddelab
