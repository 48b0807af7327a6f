#pragma once

#include <cstdint>

namespace sddelab {

/// Seeded Brownian increment stream with random access.
///
/// Cell i covers [i*base_dt, (i+1)*base_dt). Its increment is a pure function
/// of (seed, i), so replicas replay, coarsen and share one path without
/// storing it. Increments over dyadic sub-cells come from a Brownian bridge
/// whose midpoints are keyed by (seed, i, level, index); the sub-cell
/// increments of one level telescope to the cell increment.
///
/// The object is immutable and safe to share between threads.
class NoiseSource {
public:
    /// Deepest dyadic refinement of one cell.
    static constexpr unsigned max_level = 52;

    NoiseSource(std::uint64_t seed, double base_dt);

    std::uint64_t seed() const noexcept { return seed_; }
    double base_dt() const noexcept { return base_dt_; }

    /// Standard normal variate attached to cell i.
    double standard_normal(std::uint64_t i) const noexcept;

    /// Increment over cell i, distributed Normal(0, base_dt).
    double increment(std::uint64_t i) const noexcept;

    /// Sum of `count` consecutive cell increments starting at `first`,
    /// accumulated left to right.
    double increment_sum(std::uint64_t first, std::uint64_t count) const noexcept;

    /// Increment m of the stream coarsened by `factor`: the in-order sum of
    /// cells m*factor .. m*factor+factor-1.
    double coarse_increment(std::uint64_t m, std::uint64_t factor) const noexcept;

    /// Increment over sub-cell m of the 2^level equal pieces of cell i.
    /// Requires 1 <= level <= max_level and m < 2^level.
    double sub_increment(std::uint64_t i, unsigned level, std::uint64_t m) const noexcept;

private:
    double bridge_normal(std::uint64_t i, unsigned level, std::uint64_t node) const noexcept;

    std::uint64_t seed_;
    std::uint64_t key_;
    double base_dt_;
    double sqrt_base_dt_;
};

} // namespace sddelab
