#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace sddelab {

using ScalarFn = std::function<double(double)>;
/// Drift with one discrete delay: F(x(t), x(t - tau)).
using DelayedDriftFn = std::function<double(double x, double x_delayed)>;

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double width() const noexcept { return hi - lo; }
    bool contains(double v) const noexcept { return lo <= v && v <= hi; }
};

/// Modulus of continuity rho for a diffusion coefficient:
/// |g(x) - g(y)| <= rho(|x - y|).
class ModulusFamily {
public:
    enum class Kind { power, lipschitz, custom };

    /// rho(u) = K * u^alpha
    static ModulusFamily power(double K, double alpha);
    /// rho(u) = K * u
    static ModulusFamily lipschitz(double K);
    /// rho tabulated as (u, rho(u)) knots, increasing in u, interpolated
    /// linearly and held constant past the last knot.
    static ModulusFamily custom(std::vector<std::pair<double, double>> samples);

    Kind kind() const noexcept { return kind_; }
    double K() const noexcept { return K_; }
    double alpha() const noexcept { return alpha_; }
    const std::vector<std::pair<double, double>>& samples() const noexcept { return samples_; }

    double operator()(double u) const;

    std::string describe() const;

private:
    ModulusFamily(Kind kind, double K, double alpha) : kind_(kind), K_(K), alpha_(alpha) {}

    Kind kind_;
    double K_;
    double alpha_;
    std::vector<std::pair<double, double>> samples_;
};

/// Sign of y -> F(x, y).
enum class DelayMonotonicity { increasing, decreasing, unknown };

std::string_view to_string(DelayMonotonicity m) noexcept;

struct ModelSpec {
    std::string name;
    DelayedDriftFn drift;
    ScalarFn diffusion;
    double delay = 1.0;
    ModulusFamily modulus = ModulusFamily::lipschitz(1.0);
    DelayMonotonicity delay_monotonicity = DelayMonotonicity::unknown;
    /// State space is (0, inf) rather than the real line.
    bool positive_state = false;
    /// Parameters the model was instantiated with, for manifests and fingerprints.
    std::map<std::string, double> params;

    /// Drift of the instantaneous counterpart, F(x, frozen).
    ScalarFn frozen_drift(double frozen) const;
};

/// Checks the ModelSpec invariants on a sampling grid over x_box * y_box:
/// positive delay, finite coefficients, and the declared delay monotonicity.
/// Throws std::invalid_argument naming the first failure.
void validate_model(const ModelSpec& model, Interval x_box, Interval y_box, std::size_t grid = 41);

/// True if sampled finite differences of F in its second argument carry
/// the declared sign everywhere on the grid (always true for `unknown`).
bool monotonicity_consistent(const ModelSpec& model, Interval x_box, Interval y_box,
                             std::size_t grid = 41);

/// Linear interpolation between two knots, exact at both ends.
double lerp_knots(double t0, double v0, double t1, double v1, double s) noexcept;

/// Initial function on [-tau, 0], piecewise linear between knots.
class Segment {
public:
    /// Knot times must be strictly increasing, start at -tau < 0 and end
    /// at exactly 0; values must be finite.
    Segment(std::vector<double> times, std::vector<double> values);

    static Segment constant(double value, double tau);
    /// Straight line from `start` at -tau to `end` at 0.
    static Segment ramp(double start, double end, double tau);

    double tau() const noexcept { return -times_.front(); }
    std::span<const double> times() const noexcept { return times_; }
    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return times_.size(); }

    double operator()(double t) const;
    double initial_value() const noexcept { return values_.back(); }
    /// [min phi, max phi]; exact for piecewise-linear functions.
    Interval range() const noexcept;

private:
    std::vector<double> times_;
    std::vector<double> values_;
};

enum class EventKind { blow_up_plus, blow_up_minus, extinction, censored };

std::string_view to_string(EventKind kind) noexcept;

/// How a path stopped. For `censored` the time is the end of observation.
struct StoppingEvent {
    EventKind kind = EventKind::censored;
    double time = 0.0;

    bool is_blow_up() const noexcept
    {
        return kind == EventKind::blow_up_plus || kind == EventKind::blow_up_minus;
    }
    friend bool operator==(const StoppingEvent&, const StoppingEvent&) = default;
};

/// Numerical breakdown; never a property of the model.
struct IntegrationFault {
    enum class Reason { non_finite, dt_underflow };
    Reason reason = Reason::non_finite;
    double time = 0.0;

    friend bool operator==(const IntegrationFault&, const IntegrationFault&) = default;
};

std::string_view to_string(IntegrationFault::Reason reason) noexcept;

using Outcome = std::variant<StoppingEvent, IntegrationFault>;

/// Label used in CSV/JSON: the event kind, or "Fault".
std::string outcome_label(const Outcome& outcome);
double outcome_time(const Outcome& outcome) noexcept;

} // namespace sddelab
