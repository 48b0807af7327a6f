#include <catch2/catch_amalgamated.hpp>

#include "sddelab/integrator.hpp"
#include "sddelab/noise.hpp"
#include "sddelab/timechange.hpp"

#include <cmath>
#include <vector>

using namespace sddelab;
using Catch::Approx;

namespace {

std::vector<double> increments(std::uint64_t seed, double dt, std::size_t n)
{
    const NoiseSource noise(seed, dt);
    std::vector<double> dW(n);
    for (std::size_t i = 0; i < n; ++i)
        dW[i] = noise.increment(i);
    return dW;
}

} // namespace

TEST_CASE("clock of a constant diffusion", "[timechange]") {
    const std::size_t n = 1000;
    const double dt = 1e-3;
    const auto dW = increments(1, dt, n);
    for (double s : {1.0, 2.0}) {
        const std::vector<double> sigma(n + 1, s);
        const auto d = diagnose_time_change(sigma, dW, dt);
        REQUIRE(d.T.size() == n + 1);
        for (std::size_t j = 0; j <= n; ++j)
            CHECK(d.T[j] == Approx(s * s * d.t[j]).margin(1e-10));
        CHECK(d.increments == n);
    }
}

TEST_CASE("quadratic variation and clock are nondecreasing", "[timechange]") {
    const std::size_t n = 500;
    std::vector<double> t(n + 1), sigma(n + 1);
    for (std::size_t j = 0; j <= n; ++j) {
        t[j] = 0.002 * static_cast<double>(j) + 1e-4 * std::sin(static_cast<double>(j));
        sigma[j] = 1.0 + 0.5 * std::cos(3.0 * t[j]);
    }
    std::vector<double> dW(n);
    const NoiseSource noise(3, 1.0);
    for (std::size_t j = 0; j < n; ++j)
        dW[j] = noise.standard_normal(j) * std::sqrt(t[j + 1] - t[j]);
    const auto d = diagnose_time_change(t, sigma, dW);
    for (std::size_t j = 1; j <= n; ++j) {
        CHECK(d.qv[j] >= d.qv[j - 1]);
        CHECK(d.T[j] > d.T[j - 1]);
    }
    CHECK(d.qv.front() == 0.0);
    CHECK(d.T.front() == 0.0);
}

TEST_CASE("degenerate and malformed input", "[timechange]") {
    const std::vector<double> dW{0.1, -0.1};
    CHECK_THROWS_AS(diagnose_time_change(std::vector<double>{1.0, 0.0, 1.0}, dW, 0.1), std::domain_error);
    CHECK_THROWS_AS(diagnose_time_change(std::vector<double>{1.0, 1.0}, dW, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(diagnose_time_change(std::vector<double>{0.0, 0.2, 0.1}, std::vector<double>{1.0, 1.0, 1.0},
                                         dW),
                    std::invalid_argument);
}

TEST_CASE("normal CDF and KS statistic against reference values", "[timechange]") {
    CHECK(standard_normal_cdf(1.0) == Approx(0.8413447460685429).epsilon(1e-14));
    CHECK(standard_normal_cdf(-2.5) == Approx(0.006209665325776132).epsilon(1e-12));
    CHECK(standard_normal_cdf(0.0) == 0.5);
    CHECK(ks_statistic_normal({0.3, -1.2, 0.05, 2.1, -0.4, 0.9, -0.7, 1.5}) ==
          Approx(0.19093987465324047).epsilon(1e-12));
    // the asymptotic critical value against the exact Kolmogorov quantile
    CHECK(ks_critical_value(10000) == Approx(0.013564202793681023).epsilon(2e-3));
    CHECK(ks_critical_value(100) == Approx(0.13402791648569778).epsilon(1e-2));
    CHECK(ks_critical_value(100, 0.05) > ks_critical_value(100, 0.1));
}

TEST_CASE("unit diffusion over 100 seeds", "[timechange][slow]") {
    const std::size_t n = 10000;
    const double dt = 1e-4;
    const std::vector<double> sigma(n + 1, 1.0);
    int within = 0;
    int accepted = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto d = diagnose_time_change(sigma, increments(seed, dt, n), dt);
        if (std::fabs(d.qv.back() - d.T.back()) <= 0.05 * d.T.back())
            ++within;
        if (d.ks_accepts())
            ++accepted;
    }
    CHECK(within >= 95);
    CHECK(accepted >= 90);
}

TEST_CASE("population noise integrand over 100 seeds", "[timechange][slow]") {
    // sigma(y) = y^0.75 along the frozen population path y' = 1 - y
    SdeProblem prob{[](double y) { return 1.0 - y; },
                    [](double y) { return std::pow(std::max(y, 0.0), 0.75); }, 1.0, true};
    IntegratorConfig cfg;
    cfg.dt_max = 1e-4;
    cfg.record = RecordMode::every_step;
    int within = 0;
    int usable = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto p = simulate_sde(prob, cfg, NoiseSource(seed, cfg.dt_max));
        if (p.faulted() || p.event()->kind != EventKind::censored)
            continue;
        ++usable;
        std::vector<double> sigma(p.t.size());
        for (std::size_t i = 0; i < p.t.size(); ++i)
            sigma[i] = prob.diffusion(p.x[i]);
        const auto d = diagnose_time_change(p.t, sigma, p.dW);
        if (std::fabs(d.qv.back() - d.T.back()) <= 0.05 * d.T.back())
            ++within;
    }
    REQUIRE(usable >= 95);
    CHECK(within >= static_cast<int>(0.95 * usable));
}

TEST_CASE("diagnostics CSV", "[timechange]") {
    const std::vector<double> sigma(3, 1.0);
    const auto d = diagnose_time_change(sigma, std::vector<double>{0.5, -0.5}, 0.25);
    const std::string csv = time_change_csv(d);
    CHECK(csv.rfind("t,qv,T\n0,0,0\n0.25,0.25,0.25\n0.5,0.5,0.5\n# ks_statistic=", 0) == 0);
    CHECK(csv.find(",n=2\n") != std::string::npos);
}
