#include <catch2/catch_amalgamated.hpp>

#include "sddelab/catalog.hpp"
#include "sddelab/core.hpp"
#include "sddelab/modulus.hpp"

#include <cmath>
#include <string>

using namespace sddelab;
using Catch::Approx;

TEST_CASE("osgood divergence of power moduli", "[core][modulus]") {
    CHECK(osgood_divergent(ModulusFamily::power(1.0, 1.0)) == true);
    CHECK(osgood_divergent(ModulusFamily::power(2.0, 0.5)) == true);
    CHECK(osgood_divergent(ModulusFamily::power(1.0, 0.4)) == false);
    CHECK(osgood_divergent(ModulusFamily::lipschitz(3.0)) == true);
    for (double K : {0.5, 1.0, 10.0}) {
        for (int k = 1; k <= 15; ++k) {
            const double alpha = 0.1 * k;
            INFO("K=" << K << " alpha=" << alpha);
            CHECK(osgood_divergent(ModulusFamily::power(K, alpha)) == (alpha >= 0.5));
        }
    }
}

TEST_CASE("custom moduli are undecidable rather than false", "[core][modulus]") {
    const auto custom = ModulusFamily::custom({{0.0, 0.0}, {1.0, 1.0}, {2.0, 1.5}});
    CHECK_FALSE(osgood_divergent(custom).has_value());
    CHECK(custom(0.5) == Approx(0.5));
    CHECK(custom(1.5) == Approx(1.25));
    CHECK(custom(10.0) == Approx(1.5));
}

TEST_CASE("modulus families reject bad constants", "[core][modulus]") {
    CHECK_THROWS_AS(ModulusFamily::power(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(ModulusFamily::power(1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(ModulusFamily::lipschitz(-1.0), std::invalid_argument);
}

namespace {

ModelSpec with_diffusion(ScalarFn g, ModulusFamily rho)
{
    ModelSpec m;
    m.name = "probe";
    m.drift = [](double, double) { return 0.0; };
    m.diffusion = std::move(g);
    m.modulus = std::move(rho);
    return m;
}

// Independent brute-force scan: every grid pair (x, y) with
// |g(x) - g(y)| > rho(|x - y|) + tol.
std::size_t brute_force_violations(const ScalarFn& g, const ScalarFn& rho, Interval box,
                                   std::size_t n, double tol = 1e-12)
{
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = box.lo + (box.hi - box.lo) * i / (n - 1.0);
        for (std::size_t j = i + 1; j < n; ++j) {
            const double y = box.lo + (box.hi - box.lo) * j / (n - 1.0);
            if (std::fabs(g(x) - g(y)) > rho(std::fabs(x - y)) + tol)
                ++count;
        }
    }
    return count;
}

} // namespace

TEST_CASE("validate_modulus on the identity", "[core][modulus]") {
    const auto m = with_diffusion([](double x) { return x; }, ModulusFamily::power(1.0, 1.0));
    const auto report = validate_modulus(m, {-5.0, 5.0}, 100);
    CHECK(report.ok());
    CHECK(report.pairs_checked > 0);
    CHECK(report.worst_ratio <= 1.0 + 1e-12);
}

TEST_CASE("validate_modulus on the square root matches a brute-force scan", "[core][modulus]") {
    const ScalarFn g = [](double x) { return std::sqrt(std::fabs(x)); };
    const auto m = with_diffusion(g, ModulusFamily::power(1.0, 0.5));
    REQUIRE(brute_force_violations(g, [](double u) { return std::sqrt(u); }, {0.0, 4.0}, 100) == 0);
    CHECK(validate_modulus(m, {0.0, 4.0}, 100).ok());
}

TEST_CASE("validate_modulus flags the square on [0, 10]", "[core][modulus]") {
    const ScalarFn g = [](double x) { return x * x; };
    const auto m = with_diffusion(g, ModulusFamily::power(1.0, 1.0));
    const auto report = validate_modulus(m, {0.0, 10.0}, 100);
    CHECK_FALSE(report.ok());
    CHECK(report.violations.size() ==
          brute_force_violations(g, [](double u) { return u; }, {0.0, 10.0}, 100));
    CHECK(report.worst_ratio > 1.0);
    for (const auto& v : report.violations)
        CHECK(v.lhs > v.rhs);
}

TEST_CASE("population diffusion satisfies its declared modulus", "[core][catalog]") {
    for (double p : {0.25, 0.5, 0.75, 1.0}) {
        const auto m = make_model("population", {{"p", p}});
        REQUIRE(m.modulus.kind() == ModulusFamily::Kind::power);
        CHECK(m.modulus.alpha() == Approx(std::min(p, 1.0)));
        const ScalarFn rho = [p](double u) { return std::pow(u, p); };
        CHECK(brute_force_violations(m.diffusion, rho, {1e-6, 10.0}, 150) == 0);
        CHECK(validate_modulus(m, {1e-6, 10.0}, 150).ok());
    }
}

TEST_CASE("catalog contents", "[core][catalog]") {
    const auto names = catalog_names();
    for (const char* n : {"population", "population-neglog", "explosive", "linear", "quadratic",
                          "ou", "population-det", "explosive-det", "quadratic-det"})
        CHECK(std::find(names.begin(), names.end(), n) != names.end());

    const auto pop = make_model("population");
    CHECK(pop.delay == 1.0);
    CHECK(pop.positive_state);
    CHECK(pop.params.at("a") == 1.0);
    CHECK(pop.drift(2.0, 3.0) == Approx(1.0 * 3.0 - 1.0 * 2.0));
    CHECK(pop.diffusion(-1.0) == 0.0);

    for (const auto& m : catalog()) {
        INFO(m.name);
        CHECK(m.delay > 0.0);
        CHECK_NOTHROW(validate_model(m, {0.1, 3.0}, {0.1, 3.0}));
    }
}

TEST_CASE("population-neglog drift matches the transformed population model", "[core][catalog]") {
    const double a = 1.3, b = 0.7, p = 0.75, C = 0.4;
    const auto m = make_model("population-neglog", {{"a", a}, {"b", b}, {"p", p}, {"C", C}});
    for (double x : {-1.0, 0.0, 1.0, 2.5}) {
        const double expected =
            -std::exp(x) * (a * std::exp(-C) - b * std::exp(-x)) + 0.5 * std::exp(2 * (1 - p) * x);
        CHECK(m.drift(x, C) == Approx(expected).epsilon(1e-12));
        CHECK(m.diffusion(x) == Approx(std::exp((1 - p) * x)).epsilon(1e-12));
    }
}

TEST_CASE("deterministic twins have zero diffusion", "[core][catalog]") {
    const auto m = make_model("explosive-det");
    CHECK(m.diffusion(3.0) == 0.0);
    CHECK(m.drift(2.0, 1.0) == 5.0);
}

TEST_CASE("unknown models and parameters are rejected", "[core][catalog]") {
    try {
        (void)make_model("populaton");
        FAIL("expected UnknownModel");
    } catch (const UnknownModel& e) {
        const std::string msg = e.what();
        CHECK(msg.find("populaton") != std::string::npos);
        CHECK(msg.find("population-neglog") != std::string::npos);
        CHECK(msg.find("explosive") != std::string::npos);
    }
    CHECK_THROWS_AS(make_model("population", {{"q", 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(make_model("population", {{"a", -1.0}}), std::invalid_argument);
}

TEST_CASE("validate_model catches wrong declared monotonicity", "[core]") {
    ModelSpec m = make_model("linear");
    m.delay_monotonicity = DelayMonotonicity::decreasing;
    CHECK_FALSE(monotonicity_consistent(m, {-1, 1}, {-1, 1}));
    CHECK_THROWS_AS(validate_model(m, {-1, 1}, {-1, 1}), std::invalid_argument);
    m.delay = 0.0;
    m.delay_monotonicity = DelayMonotonicity::increasing;
    CHECK_THROWS_AS(validate_model(m, {-1, 1}, {-1, 1}), std::invalid_argument);
}

TEST_CASE("segment interpolation is exact at knots and linear between", "[core][segment]") {
    const Segment s({-1.0, -0.5, -0.2, 0.0}, {1.0, 3.0, -1.0, 2.0});
    CHECK(s.tau() == 1.0);
    CHECK(s(-1.0) == 1.0);
    CHECK(s(-0.5) == 3.0);
    CHECK(s(-0.2) == -1.0);
    CHECK(s(0.0) == 2.0);
    CHECK(s(-0.75) == Approx(2.0));
    CHECK(s(-0.35) == Approx(1.0));
    CHECK(s(-0.1) == Approx(0.5));
    CHECK(s.range().lo == -1.0);
    CHECK(s.range().hi == 3.0);
    CHECK(s.initial_value() == 2.0);
    CHECK_THROWS_AS(s(0.1), std::out_of_range);
    CHECK_THROWS_AS(s(-1.1), std::out_of_range);
}

TEST_CASE("segment constructor validates its grid", "[core][segment]") {
    CHECK_THROWS_AS(Segment({-1.0, -0.5}, {1.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(Segment({-1.0, -1.0, 0.0}, {1.0, 2.0, 3.0}), std::invalid_argument);
    CHECK_THROWS_AS(Segment({-1.0, 0.0}, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(Segment({-1.0, 0.0}, {1.0, NAN}), std::invalid_argument);
    CHECK_THROWS_AS(Segment({0.0}, {1.0}), std::invalid_argument);
    const auto r = Segment::ramp(0.5, -0.5, 1.0);
    CHECK(r(-0.5) == Approx(0.0).margin(1e-15));
    CHECK(Segment::constant(4.0, 2.0)(-1.3) == 4.0);
}

TEST_CASE("outcome labels", "[core]") {
    CHECK(outcome_label(StoppingEvent{EventKind::blow_up_plus, 0.5}) == "BlowUpPlus");
    CHECK(outcome_label(StoppingEvent{EventKind::blow_up_minus, 0.5}) == "BlowUpMinus");
    CHECK(outcome_label(StoppingEvent{EventKind::extinction, 0.5}) == "Extinction");
    CHECK(outcome_label(StoppingEvent{EventKind::censored, 2.0}) == "Censored");
    CHECK(outcome_label(IntegrationFault{}) == "Fault");
    CHECK(outcome_time(StoppingEvent{EventKind::censored, 2.0}) == 2.0);
}
