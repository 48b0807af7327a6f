#pragma once

// Replicated experiments. Replica i always runs with seed base_seed + i and
// its outcome is stored at index i, so reports do not depend on how many
// workers ran them or in which order they finished.

#include "sddelab/comparison.hpp"
#include "sddelab/core.hpp"
#include "sddelab/integrator.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace sddelab {

/// One simulation, parameterized by its seed.
using ReplicaRunner = std::function<Outcome(std::uint64_t seed)>;
using EventPredicate = std::function<bool(const StoppingEvent&)>;

/// Calls body(i) for i in [0, n) on `workers` threads (0 means hardware
/// concurrency). The first exception thrown by a call is rethrown after all
/// workers have joined; indices not yet started are skipped.
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& body);

/// Runs replicas base_seed .. base_seed+n-1 through parallel_for.
std::vector<Outcome> run_replicas(const ReplicaRunner& runner, std::size_t n,
                                  std::uint64_t base_seed, unsigned workers = 0);

struct WilsonInterval {
    double low = 0.0;
    double high = 1.0;
};

inline constexpr double wilson_z95 = 1.959963984540054;

/// Wilson score interval for hits/n; exactly 0 (1) at the bottom (top)
/// when hits is 0 (n).
WilsonInterval wilson_interval(std::size_t hits, std::size_t n, double z = wilson_z95);

/// FNV-1a 64 over canonical `key=value;` text, numbers printed with %.17g.
class Fingerprint {
public:
    Fingerprint& number(std::string_view key, double value);
    Fingerprint& integer(std::string_view key, std::uint64_t value);
    Fingerprint& text(std::string_view key, std::string_view value);
    Fingerprint& config(const IntegratorConfig& config);
    Fingerprint& model(const ModelSpec& model);
    Fingerprint& segment(std::string_view key, const Segment& phi);

    const std::string& canonical() const noexcept { return canonical_; }
    std::uint64_t value() const noexcept;
    /// 16 lowercase hex digits.
    std::string hex() const;

private:
    std::string canonical_;
};

struct MCReport {
    std::size_t n_replicas = 0;
    /// Every outcome label (event kinds and "Fault"), zeros included.
    std::map<std::string, std::size_t> event_counts;
    std::size_t hits = 0;
    std::size_t faults = 0;
    /// Replicas the frequency is taken over.
    std::size_t denominator = 0;
    double estimate = 0.0;
    double ci_low = 0.0;
    double ci_high = 1.0;
    std::uint64_t base_seed = 0;
    std::string fingerprint;
    /// False when faults exceeded 0.1% of the replicas.
    bool valid = true;

    std::string to_json() const;
};

/// Fault share above which a report is invalid.
inline constexpr double fault_tolerance = 1e-3;

/// Counts and interval for a finished set of replicas. Faults up to 0.1% of
/// n count as non-hits; beyond that they leave the denominator and the
/// report is marked invalid.
MCReport summarize(const std::vector<Outcome>& outcomes, const EventPredicate& predicate,
                   std::uint64_t base_seed, std::string fingerprint);

MCReport estimate_event(const ReplicaRunner& runner, const EventPredicate& predicate,
                        std::size_t n, std::uint64_t base_seed, std::string fingerprint = {},
                        unsigned workers = 0);

/// Blow-up times binned into [k, k+1), k = 0 .. horizon-1. Extinction and
/// blow-up at or after the horizon count as censored.
struct ExplosionHistogram {
    std::vector<std::size_t> bins;
    std::size_t censored = 0;
    std::size_t faults = 0;
    std::size_t n_replicas = 0;
    std::uint64_t base_seed = 0;
    std::string fingerprint;
    bool valid = true;

    WilsonInterval bin_interval(std::size_t k) const;
    /// `bin_start,count` rows, then `# censored=...,faults=...,n=...`.
    std::string to_csv() const;
};

ExplosionHistogram histogram_from(const std::vector<Outcome>& outcomes, int horizon,
                                  std::uint64_t base_seed, std::string fingerprint);

ExplosionHistogram explosion_histogram(const ReplicaRunner& runner, int horizon, std::size_t n,
                                       std::uint64_t base_seed, std::string fingerprint = {},
                                       unsigned workers = 0);

bool is_blow_up_plus(const StoppingEvent& e) noexcept;
bool is_blow_up_minus(const StoppingEvent& e) noexcept;
bool is_extinction(const StoppingEvent& e) noexcept;

/// Blow-up frequencies of an SDDE before its delay, of the SDEs with the
/// delayed argument frozen at the bounding constants, and of the SDDE
/// restarted from constant-then-linear segments at those constants.
struct EquivalenceReport {
    BoundConstants bounds;
    MCReport sdde_plus;
    MCReport sdde_minus;
    MCReport x2_plus; ///< F(., a2) frozen
    MCReport x1_minus; ///< F(., a1) frozen
    MCReport psi_plus; ///< SDDE from build_initial_from_constant(a2, phi(0), psi_eps)
    MCReport psi_minus; ///< SDDE from build_initial_from_constant(a1, phi(0), psi_eps)

    /// SDDE frequency positive implies bounding SDE frequency positive.
    bool forward_plus() const noexcept;
    bool forward_minus() const noexcept;
    /// Bounding SDE frequency positive implies restarted SDDE frequency positive.
    bool converse_plus() const noexcept;
    bool converse_minus() const noexcept;
    bool holds() const noexcept
    {
        return forward_plus() && forward_minus() && converse_plus() && converse_minus();
    }

    std::string to_json() const;
};

/// Horizon is forced to the model's delay. Throws BoundConditionViolated
/// from bound_constants and std::invalid_argument if the diffusion's
/// modulus fails the Osgood divergence test.
EquivalenceReport equivalence_experiment(const ModelSpec& model, const Segment& phi,
                                         const IntegratorConfig& config, std::size_t n,
                                         std::uint64_t base_seed, unsigned workers = 0,
                                         double psi_eps = 0.1);

/// Extinction frequency of the population SDDE a y(t-1) - b y with noise
/// y^p before `horizon`. Requires a > 0, b >= 0, p in (0, 1) \ {1/2},
/// phi > 0.
MCReport dichotomy_experiment(double a, double b, double p, const Segment& phi, double horizon,
                              const IntegratorConfig& config, std::size_t n,
                              std::uint64_t base_seed, unsigned workers = 0);

} // namespace sddelab
