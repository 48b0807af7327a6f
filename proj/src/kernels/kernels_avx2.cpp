// AVX2 (4 x double) variants. Compiled with -mavx2 only; callers reach
// these through the dispatch table after a CPUID check.

#include "sddelab/kernels.hpp"

#include <immintrin.h>

#include <cmath>

namespace sddelab::kernels {

namespace {

constexpr std::size_t lane = 4;

void multiply(const double* a, const double* b, double* out, std::size_t n)
{
    std::size_t j = 0;
    for (; j + lane <= n; j += lane)
        _mm256_storeu_pd(out + j, _mm256_mul_pd(_mm256_loadu_pd(a + j), _mm256_loadu_pd(b + j)));
    for (; j < n; ++j)
        out[j] = a[j] * b[j];
}

void square(const double* a, double* out, std::size_t n)
{
    std::size_t j = 0;
    for (; j + lane <= n; j += lane) {
        const __m256d v = _mm256_loadu_pd(a + j);
        _mm256_storeu_pd(out + j, _mm256_mul_pd(v, v));
    }
    for (; j < n; ++j)
        out[j] = a[j] * a[j];
}

void trapezoid_pieces(const double* s, double half_dt, double* out, std::size_t n)
{
    const __m256d h = _mm256_set1_pd(half_dt);
    std::size_t j = 0;
    for (; j + lane <= n; j += lane) {
        const __m256d lo = _mm256_loadu_pd(s + j);
        const __m256d hi = _mm256_loadu_pd(s + j + 1);
        const __m256d sum = _mm256_add_pd(_mm256_mul_pd(lo, lo), _mm256_mul_pd(hi, hi));
        _mm256_storeu_pd(out + j, _mm256_mul_pd(sum, h));
    }
    for (; j < n; ++j)
        out[j] = (s[j] * s[j] + s[j + 1] * s[j + 1]) * half_dt;
}

void standardize(const double* num, const double* var, double* out, std::size_t n)
{
    std::size_t j = 0;
    for (; j + lane <= n; j += lane) {
        const __m256d root = _mm256_sqrt_pd(_mm256_loadu_pd(var + j));
        _mm256_storeu_pd(out + j, _mm256_div_pd(_mm256_loadu_pd(num + j), root));
    }
    for (; j < n; ++j)
        out[j] = num[j] / std::sqrt(var[j]);
}

std::size_t count_exceeding(const double* a, const double* b, double delta, std::size_t n)
{
    const __m256d d = _mm256_set1_pd(delta);
    std::size_t count = 0;
    std::size_t j = 0;
    for (; j + lane <= n; j += lane) {
        const __m256d bound = _mm256_add_pd(_mm256_loadu_pd(b + j), d);
        const __m256d gt = _mm256_cmp_pd(_mm256_loadu_pd(a + j), bound, _CMP_GT_OQ);
        count += static_cast<std::size_t>(__builtin_popcount(_mm256_movemask_pd(gt)));
    }
    for (; j < n; ++j)
        count += a[j] > b[j] + delta ? 1 : 0;
    return count;
}

RowScan modulus_row(double gi, const double* g, const double* rho, double tol,
                    unsigned char* flags, std::size_t n)
{
    const __m256d sign = _mm256_set1_pd(-0.0);
    const __m256d vgi = _mm256_set1_pd(gi);
    const __m256d vtol = _mm256_set1_pd(tol);
    const __m256d zero = _mm256_setzero_pd();
    __m256d worst = zero;
    RowScan scan;
    std::size_t j = 0;
    for (; j + lane <= n; j += lane) {
        const __m256d d = _mm256_andnot_pd(sign, _mm256_sub_pd(vgi, _mm256_loadu_pd(g + j)));
        const __m256d r = _mm256_loadu_pd(rho + j);
        const int bad = _mm256_movemask_pd(_mm256_cmp_pd(d, _mm256_add_pd(r, vtol), _CMP_GT_OQ));
        for (std::size_t k = 0; k < lane; ++k)
            flags[j + k] = static_cast<unsigned char>((bad >> k) & 1);
        scan.violations += static_cast<std::size_t>(__builtin_popcount(bad));
        const __m256d positive = _mm256_cmp_pd(r, zero, _CMP_GT_OQ);
        const __m256d ratio = _mm256_div_pd(d, _mm256_blendv_pd(_mm256_set1_pd(1.0), r, positive));
        const __m256d better = _mm256_and_pd(positive, _mm256_cmp_pd(ratio, worst, _CMP_GT_OQ));
        worst = _mm256_blendv_pd(worst, ratio, better);
    }
    alignas(32) double lanes[lane];
    _mm256_store_pd(lanes, worst);
    for (double v : lanes) {
        if (v > scan.worst_ratio)
            scan.worst_ratio = v;
    }
    for (; j < n; ++j) {
        const double d = std::fabs(gi - g[j]);
        const double r = rho[j];
        const bool is_bad = d > r + tol;
        flags[j] = is_bad ? 1 : 0;
        scan.violations += is_bad ? 1 : 0;
        if (r > 0.0) {
            const double ratio = d / r;
            if (ratio > scan.worst_ratio)
                scan.worst_ratio = ratio;
        }
    }
    return scan;
}

} // namespace

const KernelTable& avx2_table() noexcept
{
    static const KernelTable t{Isa::avx2,   multiply,        square, trapezoid_pieces,
                               standardize, count_exceeding, modulus_row};
    return t;
}

} // namespace sddelab::kernels
