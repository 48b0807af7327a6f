#include "sddelab/montecarlo.hpp"

#include "sddelab/catalog.hpp"
#include "sddelab/modulus.hpp"
#include "sddelab/noise.hpp"
#include "sddelab/sdde.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace sddelab {

void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& body)
{
    if (workers == 0)
        workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto work = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
                next = n;
            }
        }
    };

    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back(work);
        for (auto& th : pool)
            th.join();
    }
    if (failure)
        std::rethrow_exception(failure);
}

std::vector<Outcome> run_replicas(const ReplicaRunner& runner, std::size_t n,
                                  std::uint64_t base_seed, unsigned workers)
{
    if (n == 0)
        throw std::invalid_argument("run_replicas: need at least one replica");
    std::vector<Outcome> outcomes(n);
    parallel_for(n, workers, [&](std::size_t i) { outcomes[i] = runner(base_seed + i); });
    return outcomes;
}

WilsonInterval wilson_interval(std::size_t hits, std::size_t n, double z)
{
    if (n == 0 || hits > n)
        throw std::invalid_argument("wilson_interval: need 0 <= hits <= n and n >= 1");
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(hits) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double centre = (p + z2 / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
    WilsonInterval ci{std::clamp(centre - half, 0.0, p), std::clamp(centre + half, p, 1.0)};
    if (hits == 0)
        ci.low = 0.0;
    if (hits == n)
        ci.high = 1.0;
    return ci;
}

// ---- fingerprint

Fingerprint& Fingerprint::number(std::string_view key, double value)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    canonical_.append(key).append("=").append(buf).append(";");
    return *this;
}

Fingerprint& Fingerprint::integer(std::string_view key, std::uint64_t value)
{
    canonical_.append(key).append("=").append(std::to_string(value)).append(";");
    return *this;
}

Fingerprint& Fingerprint::text(std::string_view key, std::string_view value)
{
    canonical_.append(key).append("=").append(value).append(";");
    return *this;
}

Fingerprint& Fingerprint::config(const IntegratorConfig& c)
{
    number("dt_max", c.dt_max);
    number("noise_dt", c.noise_resolution());
    number("horizon", c.horizon);
    for (std::size_t i = 0; i < c.ladder.size(); ++i)
        number("ladder" + std::to_string(i), c.ladder[i]);
    number("extinction_eps", c.extinction_eps);
    number("dt_floor", c.dt_floor);
    number("positivity_kappa", c.positivity_kappa);
    number("positivity_dt_min", c.positivity_dt_min);
    integer("record", static_cast<std::uint64_t>(c.record));
    return number("output_dt", c.output_dt);
}

Fingerprint& Fingerprint::model(const ModelSpec& m)
{
    text("model", m.name);
    number("delay", m.delay);
    for (const auto& [k, v] : m.params)
        number("param." + k, v);
    return *this;
}

Fingerprint& Fingerprint::segment(std::string_view key, const Segment& phi)
{
    const std::string prefix(key);
    for (std::size_t i = 0; i < phi.size(); ++i) {
        number(prefix + ".t" + std::to_string(i), phi.times()[i]);
        number(prefix + ".v" + std::to_string(i), phi.values()[i]);
    }
    return *this;
}

std::uint64_t Fingerprint::value() const noexcept
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canonical_) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string Fingerprint::hex() const
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value()));
    return buf;
}

// ---- reports

namespace {

std::map<std::string, std::size_t> empty_counts()
{
    std::map<std::string, std::size_t> counts;
    for (EventKind k : {EventKind::blow_up_plus, EventKind::blow_up_minus, EventKind::extinction,
                        EventKind::censored})
        counts[std::string(to_string(k))] = 0;
    counts["Fault"] = 0;
    return counts;
}

bool faults_tolerable(std::size_t faults, std::size_t n)
{
    return static_cast<double>(faults) <= fault_tolerance * static_cast<double>(n);
}

nlohmann::ordered_json report_json(const MCReport& r)
{
    nlohmann::ordered_json j;
    j["n_replicas"] = r.n_replicas;
    j["event_counts"] = r.event_counts;
    j["hits"] = r.hits;
    j["faults"] = r.faults;
    j["denominator"] = r.denominator;
    j["estimate"] = r.estimate;
    j["ci_low"] = r.ci_low;
    j["ci_high"] = r.ci_high;
    j["seeds"] = {{"base", r.base_seed}, {"count", r.n_replicas}};
    j["fingerprint"] = r.fingerprint;
    j["valid"] = r.valid;
    return j;
}

} // namespace

std::string MCReport::to_json() const
{
    return report_json(*this).dump(2);
}

MCReport summarize(const std::vector<Outcome>& outcomes, const EventPredicate& predicate,
                   std::uint64_t base_seed, std::string fingerprint)
{
    if (outcomes.empty())
        throw std::invalid_argument("summarize: no replicas");
    MCReport r;
    r.n_replicas = outcomes.size();
    r.base_seed = base_seed;
    r.fingerprint = std::move(fingerprint);
    r.event_counts = empty_counts();
    for (const auto& o : outcomes) {
        ++r.event_counts[outcome_label(o)];
        if (const auto* e = std::get_if<StoppingEvent>(&o)) {
            if (predicate(*e))
                ++r.hits;
        } else {
            ++r.faults;
        }
    }
    r.valid = faults_tolerable(r.faults, r.n_replicas);
    r.denominator = r.valid ? r.n_replicas : r.n_replicas - r.faults;
    if (r.denominator == 0) {
        r.estimate = 0.0;
        r.ci_low = 0.0;
        r.ci_high = 1.0;
        return r;
    }
    r.estimate = static_cast<double>(r.hits) / static_cast<double>(r.denominator);
    const auto ci = wilson_interval(r.hits, r.denominator);
    r.ci_low = ci.low;
    r.ci_high = ci.high;
    return r;
}

MCReport estimate_event(const ReplicaRunner& runner, const EventPredicate& predicate,
                        std::size_t n, std::uint64_t base_seed, std::string fingerprint,
                        unsigned workers)
{
    return summarize(run_replicas(runner, n, base_seed, workers), predicate, base_seed,
                     std::move(fingerprint));
}

// ---- histogram

WilsonInterval ExplosionHistogram::bin_interval(std::size_t k) const
{
    return wilson_interval(bins.at(k), n_replicas);
}

std::string ExplosionHistogram::to_csv() const
{
    std::string out = "bin_start,count\n";
    for (std::size_t k = 0; k < bins.size(); ++k)
        out += std::to_string(k) + ',' + std::to_string(bins[k]) + '\n';
    out += "# censored=" + std::to_string(censored) + ",faults=" + std::to_string(faults) +
           ",n=" + std::to_string(n_replicas) + '\n';
    return out;
}

ExplosionHistogram histogram_from(const std::vector<Outcome>& outcomes, int horizon,
                                  std::uint64_t base_seed, std::string fingerprint)
{
    if (horizon < 1)
        throw std::invalid_argument("explosion_histogram: horizon must be a positive integer");
    ExplosionHistogram h;
    h.bins.assign(static_cast<std::size_t>(horizon), 0);
    h.n_replicas = outcomes.size();
    h.base_seed = base_seed;
    h.fingerprint = std::move(fingerprint);
    for (const auto& o : outcomes) {
        const auto* e = std::get_if<StoppingEvent>(&o);
        if (!e) {
            ++h.faults;
            continue;
        }
        if (e->is_blow_up() && e->time >= 0.0 && e->time < static_cast<double>(horizon))
            ++h.bins[static_cast<std::size_t>(std::floor(e->time))];
        else
            ++h.censored;
    }
    h.valid = faults_tolerable(h.faults, h.n_replicas);
    return h;
}

ExplosionHistogram explosion_histogram(const ReplicaRunner& runner, int horizon, std::size_t n,
                                       std::uint64_t base_seed, std::string fingerprint,
                                       unsigned workers)
{
    if (horizon < 1)
        throw std::invalid_argument("explosion_histogram: horizon must be a positive integer");
    return histogram_from(run_replicas(runner, n, base_seed, workers), horizon, base_seed,
                          std::move(fingerprint));
}

bool is_blow_up_plus(const StoppingEvent& e) noexcept { return e.kind == EventKind::blow_up_plus; }
bool is_blow_up_minus(const StoppingEvent& e) noexcept { return e.kind == EventKind::blow_up_minus; }
bool is_extinction(const StoppingEvent& e) noexcept { return e.kind == EventKind::extinction; }

// ---- equivalence

namespace {

bool positive(const MCReport& r) { return r.valid && r.ci_low > 0.0; }

} // namespace

bool EquivalenceReport::forward_plus() const noexcept
{
    return !positive(sdde_plus) || positive(x2_plus);
}

bool EquivalenceReport::forward_minus() const noexcept
{
    return !positive(sdde_minus) || positive(x1_minus);
}

bool EquivalenceReport::converse_plus() const noexcept
{
    return !positive(x2_plus) || positive(psi_plus);
}

bool EquivalenceReport::converse_minus() const noexcept
{
    return !positive(x1_minus) || positive(psi_minus);
}

std::string EquivalenceReport::to_json() const
{
    nlohmann::ordered_json j;
    j["a1"] = bounds.a1;
    j["a2"] = bounds.a2;
    j["bounds_heuristic"] = bounds.heuristic;
    j["sdde_plus"] = report_json(sdde_plus);
    j["sdde_minus"] = report_json(sdde_minus);
    j["x2_plus"] = report_json(x2_plus);
    j["x1_minus"] = report_json(x1_minus);
    j["psi_plus"] = report_json(psi_plus);
    j["psi_minus"] = report_json(psi_minus);
    j["forward_plus"] = forward_plus();
    j["forward_minus"] = forward_minus();
    j["converse_plus"] = converse_plus();
    j["converse_minus"] = converse_minus();
    return j.dump(2);
}

EquivalenceReport equivalence_experiment(const ModelSpec& model, const Segment& phi,
                                         const IntegratorConfig& config, std::size_t n,
                                         std::uint64_t base_seed, unsigned workers,
                                         double psi_eps)
{
    EquivalenceReport out;
    out.bounds = bound_constants(model, phi.range());
    if (osgood_divergent(model.modulus) == false)
        throw std::invalid_argument("equivalence_experiment: diffusion modulus " +
                                    model.modulus.describe() + " fails the Osgood condition");

    IntegratorConfig cfg = config;
    cfg.horizon = model.delay;
    cfg.record = RecordMode::final_only;
    cfg.validate();
    const double res = cfg.noise_resolution();

    auto sdde_runner = [&](const Segment& segment) {
        return [&, segment](std::uint64_t seed) {
            return simulate_sdde(model, segment, cfg, NoiseSource(seed, res)).outcome;
        };
    };
    auto sde_runner = [&](double frozen) {
        SdeProblem problem{model.frozen_drift(frozen), model.diffusion, phi.initial_value(),
                           model.positive_state};
        return [&, problem](std::uint64_t seed) {
            return simulate_sde(problem, cfg, NoiseSource(seed, res)).outcome;
        };
    };
    auto fingerprint = [&](std::string_view lane, double frozen) {
        Fingerprint fp;
        fp.text("experiment", "equivalence").model(model).config(cfg).segment("phi", phi);
        fp.text("lane", lane).number("frozen", frozen).number("psi_eps", psi_eps);
        return fp.hex();
    };

    const auto sdde = run_replicas(sdde_runner(phi), n, base_seed, workers);
    out.sdde_plus = summarize(sdde, is_blow_up_plus, base_seed, fingerprint("sdde", 0.0));
    out.sdde_minus = summarize(sdde, is_blow_up_minus, base_seed, fingerprint("sdde", 0.0));

    const auto x2 = run_replicas(sde_runner(out.bounds.a2), n, base_seed, workers);
    out.x2_plus = summarize(x2, is_blow_up_plus, base_seed, fingerprint("sde", out.bounds.a2));
    const auto x1 = out.bounds.a1 == out.bounds.a2
                        ? x2
                        : run_replicas(sde_runner(out.bounds.a1), n, base_seed, workers);
    out.x1_minus = summarize(x1, is_blow_up_minus, base_seed, fingerprint("sde", out.bounds.a1));

    const double x0 = phi.initial_value();
    const auto psi2 = run_replicas(
        sdde_runner(build_initial_from_constant(out.bounds.a2, x0, psi_eps, model.delay)), n,
        base_seed, workers);
    out.psi_plus = summarize(psi2, is_blow_up_plus, base_seed, fingerprint("psi", out.bounds.a2));
    const auto psi1 =
        out.bounds.a1 == out.bounds.a2
            ? psi2
            : run_replicas(
                  sdde_runner(build_initial_from_constant(out.bounds.a1, x0, psi_eps, model.delay)),
                  n, base_seed, workers);
    out.psi_minus = summarize(psi1, is_blow_up_minus, base_seed, fingerprint("psi", out.bounds.a1));
    return out;
}

MCReport dichotomy_experiment(double a, double b, double p, const Segment& phi, double horizon,
                              const IntegratorConfig& config, std::size_t n,
                              std::uint64_t base_seed, unsigned workers)
{
    if (!(a > 0.0) || !(b >= 0.0))
        throw std::invalid_argument("dichotomy_experiment: need a > 0 and b >= 0");
    if (!(p > 0.0 && p < 1.0) || p == 0.5)
        throw std::invalid_argument("dichotomy_experiment: need p in (0, 1) and p != 1/2");
    if (!(phi.range().lo > 0.0))
        throw std::invalid_argument("dichotomy_experiment: initial segment must be positive");

    const ModelSpec model = make_model("population", {{"a", a}, {"b", b}, {"p", p}});
    IntegratorConfig cfg = config;
    cfg.horizon = horizon;
    cfg.record = RecordMode::final_only;
    cfg.validate();
    const double res = cfg.noise_resolution();

    Fingerprint fp;
    fp.text("experiment", "dichotomy").model(model).config(cfg).segment("phi", phi);
    return estimate_event(
        [&](std::uint64_t seed) {
            return simulate_sdde(model, phi, cfg, NoiseSource(seed, res)).outcome;
        },
        is_extinction, n, base_seed, fp.hex(), workers);
}

} // namespace sddelab
