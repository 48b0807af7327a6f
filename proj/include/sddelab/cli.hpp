#pragma once

// Batch front end: one INI-style config file per experiment.

#include "sddelab/core.hpp"
#include "sddelab/integrator.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sddelab::cli {

/// Malformed or out-of-range config. `line` is 0 when the problem is not
/// tied to one line (a missing required key, say).
class ConfigError : public std::runtime_error {
public:
    ConfigError(int line, std::string key, const std::string& message);

    int line() const noexcept { return line_; }
    const std::string& key() const noexcept { return key_; }

private:
    int line_;
    std::string key_;
};

inline const std::vector<std::string> commands = {
    "simulate", "simulate-delay", "sandwich", "transform-check",
    "timechange", "histogram", "equivalence", "dichotomy"};

struct InitialSpec {
    /// constant | ramp | psi
    std::string kind = "constant";
    double value = 1.0;
    double start = 1.0;
    double end = 1.0;
    double a = 1.0;
    double x0 = 1.0;
    double eps = 0.1;

    Segment build(double tau) const;
};

struct ExperimentConfig {
    std::string command;
    std::string model_name;
    /// Every parameter of the model, defaults filled in.
    std::map<std::string, double> model_params;
    InitialSpec initial;
    double sde_x0 = 1.0;
    /// Delayed argument for instantaneous runs of a delay model.
    double sde_frozen = 0.0;
    IntegratorConfig integrator;
    std::size_t n = 100;
    std::uint64_t base_seed = 1;
    double delta = 1e-6;
    /// neg_log | exp_neg | identity
    std::string map = "neg_log";
    /// constant | model
    std::string timechange_source = "constant";
    double timechange_sigma = 1.0;
    std::string output_dir = "out";
};

/// Strict parse: unknown sections, unknown keys, duplicates and malformed
/// values all throw ConfigError naming the key and line.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

struct RunOptions {
    unsigned workers = 0;
    std::optional<std::uint64_t> seed;
    bool timestamp = true;
};

/// Exit statuses.
inline constexpr int exit_ok = 0;
inline constexpr int exit_failure = 1;
inline constexpr int exit_config = 2;
inline constexpr int exit_invalid_report = 3;

/// Runs the experiment, writes its files into config.output_dir and one
/// summary line to `out`. Returns an exit status; diagnostics go to `err`.
int run(const ExperimentConfig& config, const RunOptions& options, std::ostream& out,
        std::ostream& err);

/// Full command line: --config, --workers, --seed, --no-timestamp.
int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err);

} // namespace sddelab::cli
