#include <catch2/catch_amalgamated.hpp>

#include "sddelab/kernels.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <random>
#include <vector>

using namespace sddelab;
using namespace sddelab::kernels;

namespace {

std::vector<Isa> simd_isas()
{
    std::vector<Isa> out;
    for (Isa isa : {Isa::avx2, Isa::neon})
        if (isa_available(isa))
            out.push_back(isa);
    return out;
}

std::vector<double> random_values(std::size_t n, std::mt19937_64& rng, double lo, double hi)
{
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v)
        x = u(rng);
    return v;
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b)
{
    if (a.size() != b.size())
        return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::bit_cast<std::uint64_t>(a[i]) != std::bit_cast<std::uint64_t>(b[i]))
            return false;
    return true;
}

} // namespace

TEST_CASE("scalar table is always available", "[kernels]") {
    CHECK(isa_available(Isa::scalar));
    CHECK(table(Isa::scalar).isa == Isa::scalar);
    CHECK(&scalar_table() == &table(Isa::scalar));
    CHECK(isa_available(active().isa));
}

TEST_CASE("scalar kernels compute their definitions", "[kernels]") {
    const auto& k = scalar_table();
    const std::vector<double> a{1.0, -2.0, 3.0};
    const std::vector<double> b{4.0, 0.5, -1.0};
    std::vector<double> out(3);
    k.multiply(a.data(), b.data(), out.data(), 3);
    CHECK(out == std::vector<double>{4.0, -1.0, -3.0});
    k.square(a.data(), out.data(), 3);
    CHECK(out == std::vector<double>{1.0, 4.0, 9.0});
    const std::vector<double> s{1.0, 2.0, 3.0, 4.0};
    k.trapezoid_pieces(s.data(), 0.5, out.data(), 3);
    CHECK(out == std::vector<double>{2.5, 6.5, 12.5});
    const std::vector<double> var{4.0, 0.25, 1.0};
    k.standardize(a.data(), var.data(), out.data(), 3);
    CHECK(out == std::vector<double>{0.5, -4.0, 3.0});
    CHECK(k.count_exceeding(a.data(), b.data(), 0.0, 3) == 1);
    CHECK(k.count_exceeding(b.data(), a.data(), 0.0, 3) == 2);
    CHECK(k.count_exceeding(a.data(), b.data(), 4.0, 3) == 0);
    const std::vector<double> g{0.0, 1.0, 5.0};
    const std::vector<double> rho{0.0, 2.0, 3.0};
    std::vector<unsigned char> flags(3);
    const auto scan = k.modulus_row(1.0, g.data(), rho.data(), 1e-12, flags.data(), 3);
    CHECK(flags == std::vector<unsigned char>{1, 0, 1});
    CHECK(scan.violations == 2);
    CHECK(scan.worst_ratio == 4.0 / 3.0);
}

TEST_CASE("SIMD kernels match the scalar reference bit for bit", "[kernels][simd]") {
    const auto isas = simd_isas();
    if (isas.empty())
        SKIP("no SIMD variant on this machine");
    const auto& ref = scalar_table();
    std::mt19937_64 rng(2024);
    for (Isa isa : isas) {
        const auto& k = table(isa);
        INFO("isa " << to_string(isa));
        for (std::size_t n = 0; n <= 67; ++n) {
            INFO("n " << n);
            const auto a = random_values(n, rng, -3.0, 3.0);
            const auto b = random_values(n, rng, -3.0, 3.0);
            const auto s = random_values(n + 1, rng, -2.0, 2.0);
            const auto var = random_values(n, rng, 1e-6, 5.0);
            std::vector<double> x(n), y(n);

            ref.multiply(a.data(), b.data(), x.data(), n);
            k.multiply(a.data(), b.data(), y.data(), n);
            REQUIRE(same_bits(x, y));

            ref.square(a.data(), x.data(), n);
            k.square(a.data(), y.data(), n);
            REQUIRE(same_bits(x, y));

            ref.trapezoid_pieces(s.data(), 0.37e-4, x.data(), n);
            k.trapezoid_pieces(s.data(), 0.37e-4, y.data(), n);
            REQUIRE(same_bits(x, y));

            ref.standardize(a.data(), var.data(), x.data(), n);
            k.standardize(a.data(), var.data(), y.data(), n);
            REQUIRE(same_bits(x, y));

            for (double delta : {0.0, 1e-6, 0.5})
                REQUIRE(ref.count_exceeding(a.data(), b.data(), delta, n) ==
                        k.count_exceeding(a.data(), b.data(), delta, n));

            auto rho = random_values(n, rng, 0.0, 2.0);
            if (n > 2)
                rho[n / 2] = 0.0;
            std::vector<unsigned char> fx(n), fy(n);
            const auto rx = ref.modulus_row(0.3, a.data(), rho.data(), 1e-12, fx.data(), n);
            const auto ry = k.modulus_row(0.3, a.data(), rho.data(), 1e-12, fy.data(), n);
            REQUIRE(fx == fy);
            REQUIRE(rx.violations == ry.violations);
            REQUIRE(std::bit_cast<std::uint64_t>(rx.worst_ratio) ==
                    std::bit_cast<std::uint64_t>(ry.worst_ratio));
        }
    }
}

TEST_CASE("SIMD kernels agree on special values", "[kernels][simd]") {
    const auto isas = simd_isas();
    if (isas.empty())
        SKIP("no SIMD variant on this machine");
    const std::vector<double> a{0.0, -0.0, INFINITY, -INFINITY, NAN, 1e-310, -1e308, 3.0, 2.0};
    const std::vector<double> b{NAN, 1.0, 2.0, INFINITY, 0.0, 1e-310, 1e308, 3.0, -0.0};
    const std::size_t n = a.size();
    const auto& ref = scalar_table();
    for (Isa isa : isas) {
        const auto& k = table(isa);
        std::vector<double> x(n), y(n);
        ref.multiply(a.data(), b.data(), x.data(), n);
        k.multiply(a.data(), b.data(), y.data(), n);
        CHECK(same_bits(x, y));
        CHECK(ref.count_exceeding(a.data(), b.data(), 0.0, n) ==
              k.count_exceeding(a.data(), b.data(), 0.0, n));
    }
}

TEST_CASE("unavailable ISAs are refused", "[kernels]") {
    for (Isa isa : {Isa::avx2, Isa::neon})
        if (!isa_available(isa))
            CHECK_THROWS_AS(table(isa), std::runtime_error);
}

TEST_CASE("environment override selects the scalar table", "[kernels]") {
    ::setenv("SDDELAB_ISA", "scalar", 1);
    CHECK(detect_isa() == Isa::scalar);
    ::unsetenv("SDDELAB_ISA");
    if (isa_available(Isa::avx2))
        CHECK(detect_isa() == Isa::avx2);
}
