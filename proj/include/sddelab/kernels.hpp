#pragma once

// Data-parallel array kernels behind a runtime-selected dispatch table.
//
// Every variant performs the same IEEE operations per element in the same
// order as the scalar reference (no FMA, no reassociated reductions), so
// results are bitwise identical whichever ISA is active.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace sddelab::kernels {

enum class Isa { scalar, avx2, neon };

std::string_view to_string(Isa isa) noexcept;

/// Result of scanning one row i of a pairwise modulus check.
struct RowScan {
    double worst_ratio = 0.0;
    std::size_t violations = 0;
};

struct KernelTable {
    Isa isa;

    /// out[j] = a[j] * b[j]
    void (*multiply)(const double* a, const double* b, double* out, std::size_t n);
    /// out[j] = a[j] * a[j]
    void (*square)(const double* a, double* out, std::size_t n);
    /// out[j] = (s[j]*s[j] + s[j+1]*s[j+1]) * half_dt, for j < n; s has n+1 entries.
    void (*trapezoid_pieces)(const double* s, double half_dt, double* out, std::size_t n);
    /// out[j] = num[j] / sqrt(var[j])
    void (*standardize)(const double* num, const double* var, double* out, std::size_t n);
    /// Number of j with a[j] > b[j] + delta.
    std::size_t (*count_exceeding)(const double* a, const double* b, double delta, std::size_t n);
    /// For j < n: d = |gi - g[j]|, r = rho[j]; flags[j] = d > r + tol.
    /// worst_ratio is the max of d / r over entries with r > 0.
    RowScan (*modulus_row)(double gi, const double* g, const double* rho, double tol,
                           unsigned char* flags, std::size_t n);
};

/// Best ISA the running CPU supports, honouring SDDELAB_ISA=scalar|avx2|neon.
Isa detect_isa();
bool isa_available(Isa isa) noexcept;

/// Table for the detected ISA, selected once.
const KernelTable& active();
/// Table for a specific ISA; throws std::runtime_error if unavailable.
const KernelTable& table(Isa isa);

const KernelTable& scalar_table() noexcept;

} // namespace sddelab::kernels
