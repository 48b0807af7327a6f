#include "sddelab/noise.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sddelab {

namespace {

constexpr std::uint64_t golden = 0x9E3779B97F4A7C15ULL;

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// (0, 1]
double open_closed_unit(std::uint64_t h) noexcept
{
    return (static_cast<double>(h >> 11) + 1.0) * 0x1.0p-53;
}

// [0, 1)
double half_open_unit(std::uint64_t h) noexcept
{
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

double box_muller(std::uint64_t h1, std::uint64_t h2) noexcept
{
    const double r = std::sqrt(-2.0 * std::log(open_closed_unit(h1)));
    return r * std::cos(2.0 * std::numbers::pi * half_open_unit(h2));
}

} // namespace

NoiseSource::NoiseSource(std::uint64_t seed, double base_dt)
    : seed_(seed), key_(mix64(seed ^ 0x6A09E667F3BCC909ULL)), base_dt_(base_dt),
      sqrt_base_dt_(std::sqrt(base_dt))
{
    if (!(base_dt > 0.0) || !std::isfinite(base_dt))
        throw std::invalid_argument("NoiseSource: base_dt must be positive and finite");
}

double NoiseSource::standard_normal(std::uint64_t i) const noexcept
{
    const std::uint64_t c = 2 * i;
    return box_muller(mix64(key_ + c * golden), mix64(key_ + (c + 1) * golden));
}

double NoiseSource::increment(std::uint64_t i) const noexcept
{
    return sqrt_base_dt_ * standard_normal(i);
}

double NoiseSource::increment_sum(std::uint64_t first, std::uint64_t count) const noexcept
{
    double sum = 0.0;
    for (std::uint64_t j = 0; j < count; ++j)
        sum += increment(first + j);
    return sum;
}

double NoiseSource::coarse_increment(std::uint64_t m, std::uint64_t factor) const noexcept
{
    return increment_sum(m * factor, factor);
}

double NoiseSource::bridge_normal(std::uint64_t i, unsigned level, std::uint64_t node) const noexcept
{
    const std::uint64_t cell = mix64(key_ ^ (i * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL));
    const std::uint64_t c = 2 * ((static_cast<std::uint64_t>(level) << 52) | node);
    return box_muller(mix64(cell + c * golden), mix64(cell + (c + 1) * golden));
}

double NoiseSource::sub_increment(std::uint64_t i, unsigned level, std::uint64_t m) const noexcept
{
    // Walk down the bridge tree from the whole cell to the requested piece,
    // tracking the Brownian values at the current interval's endpoints.
    double w_left = 0.0;
    double w_right = increment(i);
    double span = base_dt_;
    for (unsigned l = 0; l < level; ++l) {
        const std::uint64_t node = m >> (level - l); // interval index at level l
        const double mid = 0.5 * (w_left + w_right) + 0.5 * std::sqrt(span) * bridge_normal(i, l, node);
        span *= 0.5;
        if ((m >> (level - l - 1)) & 1U)
            w_left = mid;
        else
            w_right = mid;
    }
    return w_right - w_left;
}

} // namespace sddelab
