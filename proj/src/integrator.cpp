#include "sddelab/integrator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sddelab {

std::vector<double> decade_ladder(int lo_exponent, int hi_exponent)
{
    std::vector<double> rungs;
    for (int e = lo_exponent; e <= hi_exponent; ++e)
        rungs.push_back(std::pow(10.0, e));
    return rungs;
}

void IntegratorConfig::validate() const
{
    if (!(dt_max > 0.0) || !std::isfinite(dt_max))
        throw std::invalid_argument("integrator: dt_max must be positive");
    if (noise_dt < 0.0 || (noise_dt > 0.0 && noise_dt > dt_max))
        throw std::invalid_argument("integrator: noise_dt must lie in (0, dt_max]");
    if (!(horizon > 0.0) || !std::isfinite(horizon))
        throw std::invalid_argument("integrator: horizon must be positive");
    if (ladder.empty())
        throw std::invalid_argument("integrator: ladder must not be empty");
    for (std::size_t i = 1; i < ladder.size(); ++i) {
        if (!(ladder[i] > ladder[i - 1]))
            throw std::invalid_argument("integrator: ladder must be strictly increasing");
    }
    if (!(extinction_eps > 0.0) || !(extinction_eps < ladder.front()))
        throw std::invalid_argument("integrator: extinction_eps must lie in (0, first rung)");
    if (!(dt_floor > 0.0))
        throw std::invalid_argument("integrator: dt_floor must be positive");
    if (!(positivity_kappa >= 0.0) || !(positivity_dt_min >= dt_floor))
        throw std::invalid_argument(
            "integrator: positivity_kappa must be >= 0 and positivity_dt_min >= dt_floor");
    if (record == RecordMode::sampled && !(output_dt > 0.0))
        throw std::invalid_argument("integrator: sampled recording needs output_dt > 0");
}

double step(double x, double b, double sigma, double dt, double dW) noexcept
{
    return x + b * dt + sigma * dW;
}

double adaptive_dt(double x, double b, double sigma, double dt_max) noexcept
{
    const double s = 1.0 + std::fabs(x);
    const double rate = 1.0 + std::fabs(b) / s + (sigma * sigma) / (s * s);
    return std::min(dt_max, 0.1 / rate);
}

double positivity_dt(double x, double sigma, double kappa, double dt_min) noexcept
{
    const double s2 = sigma * sigma;
    if (!(s2 > 0.0))
        return std::numeric_limits<double>::infinity();
    return std::max(dt_min, kappa * x * x / s2);
}

std::optional<bool> blow_up_certificate(std::span<const Crossing> crossings)
{
    constexpr std::size_t window = 4;
    if (crossings.size() < window)
        return std::nullopt;
    const std::size_t n = crossings.size();
    double previous_gap = std::numeric_limits<double>::infinity();
    for (std::size_t k = n - window; k < n; ++k) {
        const double before = k == 0 ? 0.0 : crossings[k - 1].time;
        const double gap = crossings[k].time - before;
        if (!(gap < previous_gap))
            return false;
        previous_gap = gap;
    }
    return true;
}

BrownianClock::BrownianClock(const NoiseSource& noise, double dt_max, double horizon)
    : noise_(noise), base_dt_(noise.base_dt())
{
    const double cells = dt_max / base_dt_;
    max_cells_ = static_cast<std::uint64_t>(std::llround(cells));
    if (max_cells_ < 1 || std::fabs(static_cast<double>(max_cells_) - cells) > 1e-9 * cells)
        throw std::invalid_argument("dt_max must be an integer multiple of the noise resolution");
    const double span = horizon / base_dt_;
    horizon_cells_ = static_cast<std::uint64_t>(std::llround(span));
    if (horizon_cells_ < 1 || std::fabs(static_cast<double>(horizon_cells_) - span) > 1e-6 * span)
        throw std::invalid_argument("horizon must be an integer multiple of the noise resolution");
}

double BrownianClock::time() const noexcept
{
    return (static_cast<double>(cell_) + std::ldexp(static_cast<double>(sub_), -static_cast<int>(depth))) *
           base_dt_;
}

std::optional<BrownianClock::Tick> BrownianClock::advance(double dt_target, double dt_floor)
{
    unsigned level = 1;
    if (sub_ == 0) {
        if (dt_target >= base_dt_) {
            const double dt_max = static_cast<double>(max_cells_) * base_dt_;
            std::uint64_t k = dt_target >= dt_max
                                  ? max_cells_
                                  : static_cast<std::uint64_t>(std::floor(dt_target / base_dt_));
            k = std::clamp<std::uint64_t>(k, 1, std::min(max_cells_, horizon_cells_ - cell_));
            const double dW = noise_.increment_sum(cell_, k);
            cell_ += k;
            return Tick{static_cast<double>(k) * base_dt_, dW, time()};
        }
    } else {
        // Largest piece aligned with the current offset.
        level = depth - static_cast<unsigned>(std::countr_zero(sub_));
    }
    while (level < depth && std::ldexp(base_dt_, -static_cast<int>(level)) > dt_target)
        ++level;
    const double dt = std::ldexp(base_dt_, -static_cast<int>(level));
    if (dt < dt_floor)
        return std::nullopt;
    const std::uint64_t piece = sub_ >> (depth - level);
    const double dW = noise_.sub_increment(cell_, level, piece);
    sub_ += std::uint64_t{1} << (depth - level);
    if (sub_ == full) {
        sub_ = 0;
        ++cell_;
    }
    return Tick{dt, dW, time()};
}

namespace {

class LaneRunner {
public:
    LaneRunner(Lane& lane, const IntegratorConfig& config)
        : dyn_(*lane.dynamics), config_(config),
          ladder_(lane.ladder.empty() ? std::span<const double>(config.ladder)
                                      : std::span<const double>(lane.ladder)),
          positive_(lane.positive_state), x_(lane.x0)
    {
        if (!std::isfinite(lane.x0))
            throw std::invalid_argument("initial value must be finite");
        if (positive_ && !(lane.x0 > 0.0))
            throw std::invalid_argument("positive-state model needs a positive initial value");
        result_.t.push_back(0.0);
        result_.x.push_back(x_);
        next_sample_ = 1;
        // Rungs already exceeded at the start count as crossed at t = 0.
        watch(0.0, x_);
    }

    bool running() const noexcept { return running_; }
    double x() const noexcept { return x_; }

    // Coefficients for the coming step; false (and a fault) if not finite.
    bool prepare(double t)
    {
        b_ = dyn_.drift(t, x_);
        sigma_ = dyn_.diffusion(x_);
        if (!std::isfinite(b_) || !std::isfinite(sigma_)) {
            stop(IntegrationFault{IntegrationFault::Reason::non_finite, t});
            return false;
        }
        return true;
    }

    double proposed_dt() const noexcept
    {
        const double dt = adaptive_dt(x_, b_, sigma_, config_.dt_max);
        if (!positive_ || config_.positivity_kappa <= 0.0)
            return dt;
        return std::min(dt, positivity_dt(x_, sigma_, config_.positivity_kappa,
                                          config_.positivity_dt_min));
    }

    void apply(const BrownianClock::Tick& tick)
    {
        const double next = step(x_, b_, sigma_, tick.dt, tick.dW);
        if (!std::isfinite(next)) {
            stop(IntegrationFault{IntegrationFault::Reason::non_finite, tick.t});
            return;
        }
        if (config_.record == RecordMode::every_step) {
            result_.drift.push_back(b_);
            result_.dW.push_back(tick.dW);
            if (auto d = dyn_.last_delayed())
                result_.delayed.push_back(*d);
        }
        x_ = next;
        ++result_.steps;
        dyn_.accept(tick.t, x_);
        record(tick.t);
        watch(tick.t, x_);
    }

    void stop(Outcome outcome)
    {
        running_ = false;
        result_.outcome = outcome;
        // The last accepted state always closes the trajectory.
        if (result_.t.back() != last_t_) {
            result_.t.push_back(last_t_);
            result_.x.push_back(x_);
        }
    }

    PathResult take() { return std::move(result_); }

private:
    void record(double t)
    {
        last_t_ = t;
        switch (config_.record) {
        case RecordMode::every_step:
            break;
        case RecordMode::sampled: {
            const double k = std::floor(t / config_.output_dt + 1e-9);
            if (k < static_cast<double>(next_sample_))
                return;
            next_sample_ = static_cast<std::uint64_t>(k) + 1;
            break;
        }
        case RecordMode::final_only:
            return;
        }
        result_.t.push_back(t);
        result_.x.push_back(x_);
    }

    void watch(double t, double x)
    {
        if (positive_ && x <= config_.extinction_eps) {
            stop(StoppingEvent{EventKind::extinction, t});
            return;
        }
        while (next_rung_ < ladder_.size() && std::fabs(x) > ladder_[next_rung_]) {
            result_.crossings.push_back({ladder_[next_rung_], t});
            ++next_rung_;
        }
        if (next_rung_ == ladder_.size()) {
            const auto certified = blow_up_certificate(result_.crossings);
            if (certified.value_or(false))
                stop(StoppingEvent{x > 0.0 ? EventKind::blow_up_plus : EventKind::blow_up_minus, t});
            else
                stop(StoppingEvent{EventKind::censored, t});
        }
    }

    Dynamics& dyn_;
    const IntegratorConfig& config_;
    std::span<const double> ladder_;
    bool positive_;
    double x_;
    double b_ = 0.0;
    double sigma_ = 0.0;
    double last_t_ = 0.0;
    bool running_ = true;
    std::size_t next_rung_ = 0;
    std::uint64_t next_sample_ = 1;
    PathResult result_;
};

} // namespace

std::vector<PathResult> run_lockstep(std::span<Lane> lanes, const IntegratorConfig& config,
                                     const NoiseSource& noise)
{
    config.validate();
    BrownianClock clock(noise, config.dt_max, config.horizon);

    std::vector<LaneRunner> runners;
    runners.reserve(lanes.size());
    for (Lane& lane : lanes) {
        if (lane.dynamics == nullptr)
            throw std::invalid_argument("lane without dynamics");
        runners.emplace_back(lane, config);
    }

    auto any_running = [&] {
        return std::any_of(runners.begin(), runners.end(), [](const LaneRunner& r) { return r.running(); });
    };

    while (any_running()) {
        if (clock.finished()) {
            for (auto& r : runners) {
                if (r.running())
                    r.stop(StoppingEvent{EventKind::censored, config.horizon});
            }
            break;
        }
        const double t = clock.time();
        double target = config.dt_max;
        for (auto& r : runners) {
            if (r.running() && r.prepare(t))
                target = std::min(target, r.proposed_dt());
        }
        if (!any_running())
            break;
        const auto tick = clock.advance(target, config.dt_floor);
        if (!tick) {
            for (auto& r : runners) {
                if (r.running())
                    r.stop(IntegrationFault{IntegrationFault::Reason::dt_underflow, t});
            }
            break;
        }
        for (auto& r : runners) {
            if (r.running())
                r.apply(*tick);
        }
    }

    std::vector<PathResult> results;
    results.reserve(runners.size());
    for (auto& r : runners)
        results.push_back(r.take());
    return results;
}

PathResult simulate_sde(const SdeProblem& problem, const IntegratorConfig& config,
                        const NoiseSource& noise)
{
    SdeDynamics dynamics(problem.drift, problem.diffusion);
    Lane lane{&dynamics, problem.x0, problem.positive_state, {}};
    auto results = run_lockstep(std::span<Lane>(&lane, 1), config, noise);
    return std::move(results.front());
}

} // namespace sddelab
