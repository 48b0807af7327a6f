#include "sddelab/modulus.hpp"

#include "sddelab/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace sddelab {

std::optional<bool> osgood_divergent(const ModulusFamily& family)
{
    switch (family.kind()) {
    case ModulusFamily::Kind::power:
        return family.alpha() >= 0.5;
    case ModulusFamily::Kind::lipschitz:
        return true;
    case ModulusFamily::Kind::custom:
        break;
    }
    return std::nullopt;
}

ViolationReport validate_modulus(const ModelSpec& model, Interval box, std::size_t n_samples)
{
    if (n_samples < 2)
        throw std::invalid_argument("validate_modulus: need at least two samples");
    if (!(box.hi > box.lo))
        throw std::invalid_argument("validate_modulus: empty box");

    constexpr double tolerance = 1e-12;
    const double h = box.width() / static_cast<double>(n_samples - 1);

    std::vector<double> xs(n_samples);
    std::vector<double> g(n_samples);
    std::vector<double> rho(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) {
        xs[i] = box.lo + static_cast<double>(i) * h;
        g[i] = model.diffusion(xs[i]);
        rho[i] = model.modulus(static_cast<double>(i) * h);
    }

    const auto& k = kernels::active();
    std::vector<unsigned char> flags(n_samples);
    ViolationReport report;
    for (std::size_t i = 0; i + 1 < n_samples; ++i) {
        const std::size_t tail = n_samples - i - 1;
        // Row i against j = i+1..n-1; rho offset j - i starts at 1.
        const auto scan = k.modulus_row(g[i], g.data() + i + 1, rho.data() + 1, tolerance,
                                        flags.data(), tail);
        report.pairs_checked += tail;
        if (scan.worst_ratio > report.worst_ratio)
            report.worst_ratio = scan.worst_ratio;
        if (scan.violations == 0)
            continue;
        for (std::size_t off = 0; off < tail; ++off) {
            if (!flags[off])
                continue;
            const std::size_t j = i + 1 + off;
            report.violations.push_back(
                {xs[i], xs[j], std::fabs(g[i] - g[j]), rho[j - i]});
        }
    }
    return report;
}

} // namespace sddelab
