#include "sddelab/kernels.hpp"

#include <cmath>

namespace sddelab::kernels {

namespace {

void multiply(const double* a, const double* b, double* out, std::size_t n)
{
    for (std::size_t j = 0; j < n; ++j)
        out[j] = a[j] * b[j];
}

void square(const double* a, double* out, std::size_t n)
{
    for (std::size_t j = 0; j < n; ++j)
        out[j] = a[j] * a[j];
}

void trapezoid_pieces(const double* s, double half_dt, double* out, std::size_t n)
{
    for (std::size_t j = 0; j < n; ++j)
        out[j] = (s[j] * s[j] + s[j + 1] * s[j + 1]) * half_dt;
}

void standardize(const double* num, const double* var, double* out, std::size_t n)
{
    for (std::size_t j = 0; j < n; ++j)
        out[j] = num[j] / std::sqrt(var[j]);
}

std::size_t count_exceeding(const double* a, const double* b, double delta, std::size_t n)
{
    std::size_t count = 0;
    for (std::size_t j = 0; j < n; ++j)
        count += a[j] > b[j] + delta ? 1 : 0;
    return count;
}

RowScan modulus_row(double gi, const double* g, const double* rho, double tol,
                    unsigned char* flags, std::size_t n)
{
    RowScan scan;
    for (std::size_t j = 0; j < n; ++j) {
        const double d = std::fabs(gi - g[j]);
        const double r = rho[j];
        const bool bad = d > r + tol;
        flags[j] = bad ? 1 : 0;
        scan.violations += bad ? 1 : 0;
        if (r > 0.0) {
            const double ratio = d / r;
            if (ratio > scan.worst_ratio)
                scan.worst_ratio = ratio;
        }
    }
    return scan;
}

} // namespace

const KernelTable& scalar_table() noexcept
{
    static const KernelTable t{Isa::scalar,     multiply,        square, trapezoid_pieces,
                               standardize,     count_exceeding, modulus_row};
    return t;
}

} // namespace sddelab::kernels
