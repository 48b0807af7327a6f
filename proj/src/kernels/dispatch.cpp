#include "sddelab/kernels.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace sddelab::kernels {

#if defined(SDDELAB_HAVE_AVX2_TU)
const KernelTable& avx2_table() noexcept;
#endif
#if defined(SDDELAB_HAVE_NEON_TU)
const KernelTable& neon_table() noexcept;
#endif

std::string_view to_string(Isa isa) noexcept
{
    switch (isa) {
    case Isa::avx2:
        return "avx2";
    case Isa::neon:
        return "neon";
    case Isa::scalar:
        break;
    }
    return "scalar";
}

bool isa_available(Isa isa) noexcept
{
    switch (isa) {
    case Isa::scalar:
        return true;
    case Isa::avx2:
#if defined(SDDELAB_HAVE_AVX2_TU)
        return __builtin_cpu_supports("avx2");
#else
        return false;
#endif
    case Isa::neon:
#if defined(SDDELAB_HAVE_NEON_TU)
        return true; // mandatory on AArch64
#else
        return false;
#endif
    }
    return false;
}

Isa detect_isa()
{
    if (const char* forced = std::getenv("SDDELAB_ISA")) {
        const std::string want(forced);
        for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon}) {
            if (want == to_string(isa) && isa_available(isa))
                return isa;
        }
    }
    if (isa_available(Isa::avx2))
        return Isa::avx2;
    if (isa_available(Isa::neon))
        return Isa::neon;
    return Isa::scalar;
}

const KernelTable& table(Isa isa)
{
    if (!isa_available(isa))
        throw std::runtime_error("kernels: ISA " + std::string(to_string(isa)) + " not available");
    switch (isa) {
#if defined(SDDELAB_HAVE_AVX2_TU)
    case Isa::avx2:
        return avx2_table();
#endif
#if defined(SDDELAB_HAVE_NEON_TU)
    case Isa::neon:
        return neon_table();
#endif
    default:
        break;
    }
    return scalar_table();
}

const KernelTable& active()
{
    static const KernelTable& selected = table(detect_isa());
    return selected;
}

} // namespace sddelab::kernels
