#include "sddelab/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace sddelab {

ModulusFamily ModulusFamily::power(double K, double alpha)
{
    if (!(K > 0.0))
        throw std::invalid_argument("modulus: K must be positive");
    if (!(alpha > 0.0))
        throw std::invalid_argument("modulus: power exponent must be positive");
    return ModulusFamily(Kind::power, K, alpha);
}

ModulusFamily ModulusFamily::lipschitz(double K)
{
    if (!(K > 0.0))
        throw std::invalid_argument("modulus: K must be positive");
    return ModulusFamily(Kind::lipschitz, K, 1.0);
}

ModulusFamily ModulusFamily::custom(std::vector<std::pair<double, double>> samples)
{
    if (samples.empty())
        throw std::invalid_argument("modulus: custom family needs samples");
    for (std::size_t i = 1; i < samples.size(); ++i) {
        if (!(samples[i].first > samples[i - 1].first))
            throw std::invalid_argument("modulus: custom sample abscissae must increase");
    }
    ModulusFamily m(Kind::custom, 1.0, 0.0);
    m.samples_ = std::move(samples);
    return m;
}

double ModulusFamily::operator()(double u) const
{
    switch (kind_) {
    case Kind::power:
        return K_ * std::pow(u, alpha_);
    case Kind::lipschitz:
        return K_ * u;
    case Kind::custom:
        break;
    }
    if (u <= samples_.front().first) {
        // rho(0) = 0; interpolate towards the first knot.
        const auto [u0, r0] = samples_.front();
        return u0 > 0.0 ? r0 * (u / u0) : r0;
    }
    if (u >= samples_.back().first)
        return samples_.back().second;
    auto it = std::upper_bound(samples_.begin(), samples_.end(), u,
                               [](double v, const auto& s) { return v < s.first; });
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    return lerp_knots(lo.first, lo.second, hi.first, hi.second, u);
}

std::string ModulusFamily::describe() const
{
    std::ostringstream os;
    os.precision(17);
    switch (kind_) {
    case Kind::power:
        os << "power(K=" << K_ << ",alpha=" << alpha_ << ")";
        break;
    case Kind::lipschitz:
        os << "lipschitz(K=" << K_ << ")";
        break;
    case Kind::custom:
        os << "custom(" << samples_.size() << " samples)";
        break;
    }
    return os.str();
}

std::string_view to_string(DelayMonotonicity m) noexcept
{
    switch (m) {
    case DelayMonotonicity::increasing:
        return "increasing";
    case DelayMonotonicity::decreasing:
        return "decreasing";
    case DelayMonotonicity::unknown:
        break;
    }
    return "unknown";
}

ScalarFn ModelSpec::frozen_drift(double frozen) const
{
    return [F = drift, frozen](double x) { return F(x, frozen); };
}

namespace {

double grid_point(Interval box, std::size_t i, std::size_t n)
{
    if (n < 2)
        return box.lo;
    return box.lo + box.width() * (static_cast<double>(i) / static_cast<double>(n - 1));
}

} // namespace

bool monotonicity_consistent(const ModelSpec& model, Interval x_box, Interval y_box, std::size_t grid)
{
    if (model.delay_monotonicity == DelayMonotonicity::unknown)
        return true;
    const double sign = model.delay_monotonicity == DelayMonotonicity::increasing ? 1.0 : -1.0;
    for (std::size_t i = 0; i < grid; ++i) {
        const double x = grid_point(x_box, i, grid);
        double prev = model.drift(x, grid_point(y_box, 0, grid));
        for (std::size_t j = 1; j < grid; ++j) {
            const double cur = model.drift(x, grid_point(y_box, j, grid));
            if (sign * (cur - prev) < 0.0)
                return false;
            prev = cur;
        }
    }
    return true;
}

void validate_model(const ModelSpec& model, Interval x_box, Interval y_box, std::size_t grid)
{
    if (!(model.delay > 0.0))
        throw std::invalid_argument(model.name + ": delay must be positive");
    if (!model.drift || !model.diffusion)
        throw std::invalid_argument(model.name + ": missing coefficient function");
    for (std::size_t i = 0; i < grid; ++i) {
        const double x = grid_point(x_box, i, grid);
        if (!std::isfinite(model.diffusion(x)))
            throw std::invalid_argument(model.name + ": diffusion is not finite on the box");
        for (std::size_t j = 0; j < grid; ++j) {
            if (!std::isfinite(model.drift(x, grid_point(y_box, j, grid))))
                throw std::invalid_argument(model.name + ": drift is not finite on the box");
        }
    }
    if (!monotonicity_consistent(model, x_box, y_box, grid))
        throw std::invalid_argument(model.name + ": drift is not " +
                                    std::string(to_string(model.delay_monotonicity)) +
                                    " in the delayed argument");
}

double lerp_knots(double t0, double v0, double t1, double v1, double s) noexcept
{
    if (s == t1)
        return v1;
    return v0 + (v1 - v0) * ((s - t0) / (t1 - t0));
}

Segment::Segment(std::vector<double> times, std::vector<double> values)
    : times_(std::move(times)), values_(std::move(values))
{
    if (times_.size() < 2 || times_.size() != values_.size())
        throw std::invalid_argument("Segment: need at least two knots and one value per knot");
    if (!(times_.front() < 0.0) || times_.back() != 0.0)
        throw std::invalid_argument("Segment: knots must span [-tau, 0] with tau > 0");
    for (std::size_t i = 1; i < times_.size(); ++i) {
        if (!(times_[i] > times_[i - 1]))
            throw std::invalid_argument("Segment: knot times must be strictly increasing");
    }
    for (double v : values_) {
        if (!std::isfinite(v))
            throw std::invalid_argument("Segment: values must be finite");
    }
}

Segment Segment::constant(double value, double tau)
{
    return Segment({-tau, 0.0}, {value, value});
}

Segment Segment::ramp(double start, double end, double tau)
{
    return Segment({-tau, 0.0}, {start, end});
}

double Segment::operator()(double t) const
{
    if (t < times_.front() || t > 0.0)
        throw std::out_of_range("Segment: evaluation outside [-tau, 0]");
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    if (it == times_.end())
        return values_.back();
    const std::size_t hi = static_cast<std::size_t>(it - times_.begin());
    const std::size_t lo = hi - 1;
    if (times_[lo] == t)
        return values_[lo];
    return lerp_knots(times_[lo], values_[lo], times_[hi], values_[hi], t);
}

Interval Segment::range() const noexcept
{
    const auto [lo, hi] = std::minmax_element(values_.begin(), values_.end());
    return {*lo, *hi};
}

std::string_view to_string(EventKind kind) noexcept
{
    switch (kind) {
    case EventKind::blow_up_plus:
        return "BlowUpPlus";
    case EventKind::blow_up_minus:
        return "BlowUpMinus";
    case EventKind::extinction:
        return "Extinction";
    case EventKind::censored:
        break;
    }
    return "Censored";
}

std::string_view to_string(IntegrationFault::Reason reason) noexcept
{
    return reason == IntegrationFault::Reason::non_finite ? "non_finite" : "dt_underflow";
}

std::string outcome_label(const Outcome& outcome)
{
    if (const auto* ev = std::get_if<StoppingEvent>(&outcome))
        return std::string(to_string(ev->kind));
    return "Fault";
}

double outcome_time(const Outcome& outcome) noexcept
{
    return std::visit([](const auto& o) { return o.time; }, outcome);
}

} // namespace sddelab
