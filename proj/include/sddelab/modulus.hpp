#pragma once

#include "sddelab/core.hpp"

#include <optional>

namespace sddelab {

/// Whether the integral of rho(u)^-2 over (0, eps] diverges, which is what
/// pathwise uniqueness and the comparison argument need from the diffusion.
/// For rho(u) = K u^alpha this holds exactly when alpha >= 1/2.
/// Returns nullopt for custom families, which cannot be decided in closed form.
std::optional<bool> osgood_divergent(const ModulusFamily& family);

struct ModulusViolation {
    double x = 0.0;
    double y = 0.0;
    double lhs = 0.0; ///< |g(x) - g(y)|
    double rhs = 0.0; ///< rho(|x - y|)
};

struct ViolationReport {
    std::vector<ModulusViolation> violations;
    /// max |g(x) - g(y)| / rho(|x - y|) over the scanned pairs with rho > 0.
    double worst_ratio = 0.0;
    std::size_t pairs_checked = 0;

    bool ok() const noexcept { return violations.empty(); }
};

/// Brute-force check of |g(x) - g(y)| <= rho(|x - y|) + 1e-12 over all pairs
/// of a uniform n_samples grid on `box`. Distances use k*h for grid offset k.
ViolationReport validate_modulus(const ModelSpec& model, Interval box, std::size_t n_samples);

} // namespace sddelab
