#include "sddelab/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sddelab {

namespace {

constexpr std::string_view det_suffix = "-det";

std::vector<CatalogEntry> build_entries()
{
    std::vector<CatalogEntry> base = {
        {"population", "dy = [a y(t-1) - b y] dt + max(y,0)^p dW, y > 0",
         {{"a", 1.0}, {"b", 1.0}, {"p", 0.75}}},
        {"population-neglog",
         "dx = [-e^x (a e^{-x(t-1)} - b e^{-x}) + e^{2(1-p)x}/2] dt + e^{(1-p)x} dW;"
         " C is the frozen delayed value and default initial level",
         {{"a", 1.0}, {"b", 1.0}, {"p", 0.75}, {"C", 0.0}}},
        {"explosive", "dx = [x^2 + x(t-1)] dt + sigma x dW", {{"sigma", 0.1}}},
        {"linear", "dx = [-x + c x(t-1)] dt + sigma x dW", {{"c", 0.1}, {"sigma", 0.1}}},
        {"quadratic", "dx = x^2 dt + sigma x dW", {{"sigma", 0.0}}},
        {"ou", "dx = -theta x dt + sigma dW", {{"theta", 1.0}, {"sigma", 1.0}}},
    };
    std::vector<CatalogEntry> all = base;
    for (const auto& e : base)
        all.push_back({e.name + std::string(det_suffix), e.formula + " (g = 0)", e.defaults});
    return all;
}

ModulusFamily lipschitz_or_unit(double K)
{
    return ModulusFamily::lipschitz(K > 0.0 ? K : 1.0);
}

void require(bool ok, const std::string& model, const std::string& what)
{
    if (!ok)
        throw std::invalid_argument(model + ": " + what);
}

ModelSpec build(std::string_view base, const std::map<std::string, double>& p)
{
    ModelSpec m;
    m.delay = 1.0;
    m.params = p;
    if (base == "population") {
        const double a = p.at("a"), b = p.at("b"), e = p.at("p");
        require(a > 0.0, "population", "a must be positive");
        require(b >= 0.0, "population", "b must be nonnegative");
        require(e > 0.0, "population", "p must be positive");
        m.drift = [a, b](double y, double yd) { return a * yd - b * y; };
        m.diffusion = [e](double y) { return std::pow(std::max(y, 0.0), e); };
        // |x^p - y^p| <= |x - y|^p for p <= 1; above that, Lipschitz on (0, 10].
        m.modulus = e <= 1.0 ? ModulusFamily::power(1.0, e)
                             : ModulusFamily::lipschitz(e * std::pow(10.0, e - 1.0));
        m.delay_monotonicity = DelayMonotonicity::increasing;
        m.positive_state = true;
    } else if (base == "population-neglog") {
        const double a = p.at("a"), b = p.at("b"), e = p.at("p");
        require(a > 0.0, "population-neglog", "a must be positive");
        require(b >= 0.0, "population-neglog", "b must be nonnegative");
        require(e > 0.0, "population-neglog", "p must be positive");
        m.drift = [a, b, e](double x, double xd) {
            return -std::exp(x) * (a * std::exp(-xd) - b * std::exp(-x)) +
                   0.5 * std::exp(2.0 * (1.0 - e) * x);
        };
        m.diffusion = [e](double x) { return std::exp((1.0 - e) * x); };
        // Locally Lipschitz; constant valid on [-10, 10].
        const double k = std::fabs(1.0 - e);
        m.modulus = lipschitz_or_unit(k * std::exp(10.0 * k));
        m.delay_monotonicity = DelayMonotonicity::increasing;
    } else if (base == "explosive") {
        const double s = p.at("sigma");
        m.drift = [](double x, double xd) { return x * x + xd; };
        m.diffusion = [s](double x) { return s * x; };
        m.modulus = lipschitz_or_unit(std::fabs(s));
        m.delay_monotonicity = DelayMonotonicity::increasing;
    } else if (base == "linear") {
        const double c = p.at("c"), s = p.at("sigma");
        m.drift = [c](double x, double xd) { return -x + c * xd; };
        m.diffusion = [s](double x) { return s * x; };
        m.modulus = lipschitz_or_unit(std::fabs(s));
        m.delay_monotonicity =
            c >= 0.0 ? DelayMonotonicity::increasing : DelayMonotonicity::decreasing;
    } else if (base == "quadratic") {
        const double s = p.at("sigma");
        m.drift = [](double x, double) { return x * x; };
        m.diffusion = [s](double x) { return s * x; };
        m.modulus = lipschitz_or_unit(std::fabs(s));
        m.delay_monotonicity = DelayMonotonicity::increasing;
    } else { // ou
        const double theta = p.at("theta"), s = p.at("sigma");
        m.drift = [theta](double x, double) { return -theta * x; };
        m.diffusion = [s](double) { return s; };
        m.modulus = ModulusFamily::lipschitz(1.0);
        m.delay_monotonicity = DelayMonotonicity::increasing;
    }
    return m;
}

std::string valid_names_message(std::string_view requested)
{
    std::ostringstream os;
    os << "unknown model '" << requested << "'; valid names:";
    for (const auto& e : catalog_entries())
        os << ' ' << e.name;
    return os.str();
}

} // namespace

const std::vector<CatalogEntry>& catalog_entries()
{
    static const std::vector<CatalogEntry> entries = build_entries();
    return entries;
}

std::vector<std::string> catalog_names()
{
    std::vector<std::string> names;
    for (const auto& e : catalog_entries())
        names.push_back(e.name);
    return names;
}

const CatalogEntry& catalog_entry(std::string_view name)
{
    const auto& entries = catalog_entries();
    auto it = std::find_if(entries.begin(), entries.end(),
                           [&](const CatalogEntry& e) { return e.name == name; });
    if (it == entries.end())
        throw UnknownModel(valid_names_message(name));
    return *it;
}

ModelSpec make_model(std::string_view name, const std::map<std::string, double>& params)
{
    const CatalogEntry& entry = catalog_entry(name);
    std::map<std::string, double> resolved = entry.defaults;
    for (const auto& [key, value] : params) {
        if (!resolved.contains(key))
            throw std::invalid_argument("model " + entry.name + ": unknown parameter '" + key + "'");
        if (!std::isfinite(value))
            throw std::invalid_argument("model " + entry.name + ": parameter '" + key +
                                        "' must be finite");
        resolved[key] = value;
    }

    const bool deterministic = name.ends_with(det_suffix);
    const std::string_view base =
        deterministic ? name.substr(0, name.size() - det_suffix.size()) : name;
    ModelSpec m = build(base, resolved);
    m.name = entry.name;
    if (deterministic)
        m.diffusion = [](double) { return 0.0; };
    return m;
}

std::vector<ModelSpec> catalog()
{
    std::vector<ModelSpec> models;
    for (const auto& e : catalog_entries())
        models.push_back(make_model(e.name));
    return models;
}

} // namespace sddelab
