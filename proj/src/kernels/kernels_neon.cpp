// NEON (2 x double) variants for AArch64.

#include "sddelab/kernels.hpp"

#include <arm_neon.h>

#include <cmath>

namespace sddelab::kernels {

namespace {

constexpr std::size_t lane = 2;

void multiply(const double* a, const double* b, double* out, std::size_t n)
{
    std::size_t j = 0;
    for (; j + lane <= n; j += lane)
        vst1q_f64(out + j, vmulq_f64(vld1q_f64(a + j), vld1q_f64(b + j)));
    for (; j < n; ++j)
        out[j] = a[j] * b[j];
}

void square(const double* a, double* out, std::size_t n)
{
    std::size_t j = 0;
    for (; j + lane <= n; j += lane) {
        const float64x2_t v = vld1q_f64(a + j);
        vst1q_f64(out + j, vmulq_f64(v, v));
    }
    for (; j < n; ++j)
        out[j] = a[j] * a[j];
}

void trapezoid_pieces(const double* s, double half_dt, double* out, std::size_t n)
{
    const float64x2_t h = vdupq_n_f64(half_dt);
    std::size_t j = 0;
    for (; j + lane <= n; j += lane) {
        const float64x2_t lo = vld1q_f64(s + j);
        const float64x2_t hi = vld1q_f64(s + j + 1);
        const float64x2_t sum = vaddq_f64(vmulq_f64(lo, lo), vmulq_f64(hi, hi));
        vst1q_f64(out + j, vmulq_f64(sum, h));
    }
    for (; j < n; ++j)
        out[j] = (s[j] * s[j] + s[j + 1] * s[j + 1]) * half_dt;
}

void standardize(const double* num, const double* var, double* out, std::size_t n)
{
    std::size_t j = 0;
    for (; j + lane <= n; j += lane)
        vst1q_f64(out + j, vdivq_f64(vld1q_f64(num + j), vsqrtq_f64(vld1q_f64(var + j))));
    for (; j < n; ++j)
        out[j] = num[j] / std::sqrt(var[j]);
}

std::size_t count_exceeding(const double* a, const double* b, double delta, std::size_t n)
{
    const float64x2_t d = vdupq_n_f64(delta);
    std::size_t count = 0;
    std::size_t j = 0;
    for (; j + lane <= n; j += lane) {
        const uint64x2_t gt = vcgtq_f64(vld1q_f64(a + j), vaddq_f64(vld1q_f64(b + j), d));
        count += (vgetq_lane_u64(gt, 0) & 1U) + (vgetq_lane_u64(gt, 1) & 1U);
    }
    for (; j < n; ++j)
        count += a[j] > b[j] + delta ? 1 : 0;
    return count;
}

RowScan modulus_row(double gi, const double* g, const double* rho, double tol,
                    unsigned char* flags, std::size_t n)
{
    const float64x2_t vgi = vdupq_n_f64(gi);
    const float64x2_t vtol = vdupq_n_f64(tol);
    const float64x2_t zero = vdupq_n_f64(0.0);
    const float64x2_t one = vdupq_n_f64(1.0);
    float64x2_t worst = zero;
    RowScan scan;
    std::size_t j = 0;
    for (; j + lane <= n; j += lane) {
        const float64x2_t d = vabsq_f64(vsubq_f64(vgi, vld1q_f64(g + j)));
        const float64x2_t r = vld1q_f64(rho + j);
        const uint64x2_t bad = vcgtq_f64(d, vaddq_f64(r, vtol));
        const unsigned b0 = vgetq_lane_u64(bad, 0) & 1U;
        const unsigned b1 = vgetq_lane_u64(bad, 1) & 1U;
        flags[j] = static_cast<unsigned char>(b0);
        flags[j + 1] = static_cast<unsigned char>(b1);
        scan.violations += b0 + b1;
        const uint64x2_t positive = vcgtq_f64(r, zero);
        const float64x2_t ratio = vdivq_f64(d, vbslq_f64(positive, r, one));
        const uint64x2_t better = vandq_u64(positive, vcgtq_f64(ratio, worst));
        worst = vbslq_f64(better, ratio, worst);
    }
    const double w0 = vgetq_lane_f64(worst, 0);
    const double w1 = vgetq_lane_f64(worst, 1);
    if (w0 > scan.worst_ratio)
        scan.worst_ratio = w0;
    if (w1 > scan.worst_ratio)
        scan.worst_ratio = w1;
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

const KernelTable& neon_table() noexcept
{
    static const KernelTable t{Isa::neon,   multiply,        square, trapezoid_pieces,
                               standardize, count_exceeding, modulus_row};
    return t;
}

} // namespace sddelab::kernels
