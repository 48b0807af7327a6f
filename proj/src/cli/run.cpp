#include "sddelab/catalog.hpp"
#include "sddelab/cli.hpp"
#include "sddelab/comparison.hpp"
#include "sddelab/montecarlo.hpp"
#include "sddelab/output.hpp"
#include "sddelab/sdde.hpp"
#include "sddelab/timechange.hpp"
#include "sddelab/transform.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <ctime>
#include <fstream>
#include <ostream>

namespace sddelab::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string_view record_name(RecordMode m)
{
    switch (m) {
    case RecordMode::every_step:
        return "every_step";
    case RecordMode::sampled:
        return "sampled";
    case RecordMode::final_only:
        return "final_only";
    }
    return "every_step";
}

std::string utc_now()
{
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

ordered_json manifest(const ExperimentConfig& c, std::uint64_t seed)
{
    ordered_json m;
    m["command"] = c.command;
    m["model"] = {{"name", c.model_name}, {"params", c.model_params}};
    m["initial"] = {{"kind", c.initial.kind}, {"value", c.initial.value}, {"start", c.initial.start},
                    {"end", c.initial.end},   {"a", c.initial.a},         {"x0", c.initial.x0},
                    {"eps", c.initial.eps}};
    m["sde"] = {{"x0", c.sde_x0}, {"frozen", c.sde_frozen}};
    const auto& ic = c.integrator;
    m["integrator"] = {{"dt_max", ic.dt_max},
                       {"noise_dt", ic.noise_resolution()},
                       {"horizon", ic.horizon},
                       {"ladder", ic.ladder},
                       {"extinction_eps", ic.extinction_eps},
                       {"dt_floor", ic.dt_floor},
                       {"positivity_kappa", ic.positivity_kappa},
                       {"positivity_dt_min", ic.positivity_dt_min},
                       {"record", record_name(ic.record)},
                       {"output_dt", ic.output_dt}};
    m["monte_carlo"] = {{"n", c.n}, {"base_seed", seed}, {"delta", c.delta}};
    m["transform"] = {{"map", c.map}};
    m["timechange"] = {{"source", c.timechange_source}, {"sigma", c.timechange_sigma}};
    m["output"] = {{"dir", c.output_dir}};
    return m;
}

class Writer {
public:
    Writer(fs::path dir, bool timestamp) : dir_(std::move(dir)), timestamp_(timestamp ? utc_now() : "")
    {
        fs::create_directories(dir_);
    }

    void json(const std::string& name, const std::string& body) const { write(name, body + "\n"); }
    void manifest(ordered_json m) const
    {
        if (!timestamp_.empty())
            m["generated"] = timestamp_;
        json("manifest.json", m.dump(2));
    }
    void csv(const std::string& name, const std::string& body) const
    {
        write(name, timestamp_.empty() ? body : "# generated=" + timestamp_ + "\n" + body);
    }

private:
    void write(const std::string& name, const std::string& body) const
    {
        std::ofstream f(dir_ / name, std::ios::binary | std::ios::trunc);
        f << body;
        if (!f)
            throw std::runtime_error("cannot write " + (dir_ / name).string());
    }

    fs::path dir_;
    std::string timestamp_;
};

SmoothMap pick_map(const std::string& name)
{
    if (name == "exp_neg")
        return SmoothMap::exp_neg();
    if (name == "identity")
        return SmoothMap::identity();
    return SmoothMap::neg_log();
}

std::string path_summary(const std::string& command, const ExperimentConfig& c, const PathResult& p)
{
    return command + " model=" + c.model_name + " event=" + outcome_label(p.outcome) +
           " t=" + format_double(outcome_time(p.outcome)) + " steps=" + std::to_string(p.steps);
}

std::string report_summary(const MCReport& r)
{
    return "n=" + std::to_string(r.n_replicas) + " hits=" + std::to_string(r.hits) +
           " estimate=" + format_double(r.estimate) + " ci=[" + format_double(r.ci_low) + "," +
           format_double(r.ci_high) + "] faults=" + std::to_string(r.faults) +
           (r.valid ? "" : " INVALID");
}

int execute(const ExperimentConfig& c, const RunOptions& o, std::ostream& out)
{
    const std::uint64_t seed = o.seed.value_or(c.base_seed);
    const Writer w(c.output_dir, o.timestamp);
    w.manifest(manifest(c, seed));

    const auto& ic = c.integrator;
    const double res = ic.noise_resolution();
    const bool has_model = !c.model_name.empty();
    const ModelSpec model = has_model ? make_model(c.model_name, c.model_params) : ModelSpec{};
    const SdeProblem problem{model.frozen_drift(c.sde_frozen), model.diffusion, c.sde_x0,
                             model.positive_state};

    if (c.command == "simulate") {
        const PathResult p = simulate_sde(problem, ic, NoiseSource(seed, res));
        w.csv("trajectory.csv", trajectory_csv(p));
        out << path_summary(c.command, c, p) << '\n';
        return exit_ok;
    }

    if (c.command == "timechange") {
        TimeChangeDiagnostics d;
        if (c.timechange_source == "constant") {
            const auto steps = static_cast<std::size_t>(std::llround(ic.horizon / ic.dt_max));
            const auto factor = static_cast<std::uint64_t>(std::llround(ic.dt_max / res));
            const NoiseSource noise(seed, res);
            std::vector<double> dW(steps);
            for (std::size_t j = 0; j < steps; ++j)
                dW[j] = noise.coarse_increment(j, factor);
            const std::vector<double> sigma(steps + 1, c.timechange_sigma);
            d = diagnose_time_change(sigma, dW, ic.dt_max);
        } else {
            IntegratorConfig every = ic;
            every.record = RecordMode::every_step;
            const PathResult p = simulate_sde(problem, every, NoiseSource(seed, res));
            const std::size_t m = std::min(p.dW.size(), p.x.size() - 1);
            if (m == 0)
                throw std::runtime_error("timechange: the path stopped before its first step");
            std::vector<double> sigma(m + 1);
            for (std::size_t j = 0; j <= m; ++j)
                sigma[j] = model.diffusion(p.x[j]);
            d = diagnose_time_change(std::span(p.t).first(m + 1), sigma, std::span(p.dW).first(m));
        }
        w.csv("diagnostics.csv", time_change_csv(d));
        const double qv = d.qv.back();
        const double T = d.T.back();
        out << "timechange source=" << c.timechange_source << " t=" << format_double(d.t.back())
            << " qv=" << format_double(qv) << " T=" << format_double(T)
            << " ratio=" << format_double(qv / T) << " ks=" << format_double(d.ks_statistic)
            << " ks_critical=" << format_double(d.ks_critical) << '\n';
        return exit_ok;
    }

    if (c.command == "transform-check") {
        const SmoothMap map = pick_map(c.map);
        std::vector<ConsistencyResult> results(c.n);
        parallel_for(c.n, o.workers, [&](std::size_t i) {
            results[i] = pathwise_consistency(problem, map, ic, seed + i);
        });
        std::string csv = "seed,sup_discrepancy,grid_points,event_direct,t_direct,event_transformed,"
                          "t_transformed\n";
        double worst = 0.0;
        std::size_t faults = 0;
        for (std::size_t i = 0; i < c.n; ++i) {
            const auto& r = results[i];
            worst = std::max(worst, r.sup_discrepancy);
            faults += r.faulted() ? 1 : 0;
            csv += std::to_string(seed + i) + ',' + format_double(r.sup_discrepancy) + ',' +
                   std::to_string(r.grid_points) + ',' + outcome_label(r.direct) + ',' +
                   format_double(outcome_time(r.direct)) + ',' + outcome_label(r.transformed) +
                   ',' + format_double(outcome_time(r.transformed)) + '\n';
        }
        w.csv("transform.csv", csv);
        out << "transform-check model=" << c.model_name << " map=" << map.name << " n=" << c.n
            << " max_discrepancy=" << format_double(worst) << " faults=" << faults << '\n';
        return exit_ok;
    }

    const Segment phi = c.initial.build(model.delay);

    if (c.command == "simulate-delay") {
        const PathResult p = simulate_sdde(model, phi, ic, NoiseSource(seed, res));
        w.csv("trajectory.csv", trajectory_csv(p));
        out << path_summary(c.command, c, p) << '\n';
        return exit_ok;
    }

    if (c.command == "sandwich") {
        const BoundConstants bounds = bound_constants(model, phi.range());
        std::vector<SandwichReport> reports(c.n);
        parallel_for(c.n, o.workers, [&](std::size_t i) {
            reports[i] = coupled_sandwich(model, phi, ic, seed + i, c.delta, bounds);
        });
        std::string csv = sandwich_csv_header() + '\n';
        double sum = 0.0;
        double worst = 0.0;
        for (const auto& r : reports) {
            csv += sandwich_csv_row(r) + '\n';
            sum += r.violation_fraction();
            worst = std::max(worst, r.violation_fraction());
        }
        w.csv("sandwich.csv", csv);
        out << "sandwich model=" << c.model_name << " a1=" << format_double(bounds.a1)
            << " a2=" << format_double(bounds.a2) << " n=" << c.n
            << " mean_violation_fraction=" << format_double(sum / static_cast<double>(c.n))
            << " max_violation_fraction=" << format_double(worst) << '\n';
        return exit_ok;
    }

    if (c.command == "histogram") {
        IntegratorConfig cfg = ic;
        cfg.record = RecordMode::final_only;
        const int horizon = static_cast<int>(ic.horizon);
        Fingerprint fp;
        fp.text("experiment", "histogram").model(model).config(cfg).segment("phi", phi);
        const auto outcomes = run_replicas(
            [&](std::uint64_t s) { return simulate_sdde(model, phi, cfg, NoiseSource(s, res)).outcome; },
            c.n, seed, o.workers);
        const ExplosionHistogram h = histogram_from(outcomes, horizon, seed, fp.hex());
        const MCReport r = summarize(
            outcomes, [&](const StoppingEvent& e) { return e.is_blow_up() && e.time < ic.horizon; },
            seed, fp.hex());
        w.csv("histogram.csv", h.to_csv());
        w.json("report.json", r.to_json());
        out << "histogram model=" << c.model_name << ' ' << report_summary(r)
            << " censored=" << h.censored << '\n';
        return h.valid && r.valid ? exit_ok : exit_invalid_report;
    }

    if (c.command == "equivalence") {
        const EquivalenceReport r = equivalence_experiment(model, phi, ic, c.n, seed, o.workers);
        w.json("equivalence.json", r.to_json());
        const bool valid = r.sdde_plus.valid && r.x2_plus.valid && r.x1_minus.valid &&
                           r.psi_plus.valid && r.psi_minus.valid;
        out << "equivalence model=" << c.model_name << " sdde_plus=" << format_double(r.sdde_plus.estimate)
            << " sdde_minus=" << format_double(r.sdde_minus.estimate)
            << " x2_plus=" << format_double(r.x2_plus.estimate)
            << " x1_minus=" << format_double(r.x1_minus.estimate)
            << " psi_plus=" << format_double(r.psi_plus.estimate)
            << " psi_minus=" << format_double(r.psi_minus.estimate)
            << " pattern=" << (r.holds() ? "holds" : "broken") << (valid ? "" : " INVALID") << '\n';
        return valid ? exit_ok : exit_invalid_report;
    }

    // dichotomy
    const auto& p = c.model_params;
    const MCReport r = dichotomy_experiment(p.at("a"), p.at("b"), p.at("p"), phi, ic.horizon, ic,
                                            c.n, seed, o.workers);
    w.json("report.json", r.to_json());
    out << "dichotomy p=" << format_double(p.at("p")) << ' ' << report_summary(r) << '\n';
    return r.valid ? exit_ok : exit_invalid_report;
}

} // namespace

int run(const ExperimentConfig& config, const RunOptions& options, std::ostream& out,
        std::ostream& err)
{
    try {
        return execute(config, options, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const std::invalid_argument& e) {
        err << "invalid configuration: " << e.what() << '\n';
        return exit_config;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_failure;
    }
}

int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Simulation of stochastic delay equations up to explosion or extinction"};
    std::string config_path;
    unsigned workers = 0;
    std::uint64_t seed = 0;
    bool no_timestamp = false;
    app.add_option("--config", config_path, "experiment config file")->required();
    app.add_option("--workers", workers, "replica worker threads (default: hardware concurrency)");
    auto* seed_opt = app.add_option("--seed", seed, "base seed, overriding [monte_carlo] base_seed");
    app.add_flag("--no-timestamp", no_timestamp, "omit generation timestamps from outputs");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_config;
    }

    ExperimentConfig config;
    try {
        config = load_config(config_path);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return exit_config;
    }
    RunOptions options;
    options.workers = workers;
    if (seed_opt->count() > 0)
        options.seed = seed;
    options.timestamp = !no_timestamp;
    return run(config, options, out, err);
}

} // namespace sddelab::cli
