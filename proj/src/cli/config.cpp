#include "sddelab/catalog.hpp"
#include "sddelab/cli.hpp"
#include "sddelab/sdde.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace sddelab::cli {

ConfigError::ConfigError(int line, std::string key, const std::string& message)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
      line_(line), key_(std::move(key))
{
}

Segment InitialSpec::build(double tau) const
{
    if (kind == "constant")
        return Segment::constant(value, tau);
    if (kind == "ramp")
        return Segment::ramp(start, end, tau);
    return build_initial_from_constant(a, x0, eps, tau);
}

namespace {

struct Entry {
    std::string value;
    int line;
};

// section -> key -> entry
using Raw = std::map<std::string, std::map<std::string, Entry>>;

const std::map<std::string, std::set<std::string>>& known_keys()
{
    static const std::map<std::string, std::set<std::string>> keys = {
        {"experiment", {"command"}},
        {"model", {"name"}}, // plus the model's parameters
        {"initial", {"kind", "value", "start", "end", "a", "x0", "eps"}},
        {"sde", {"x0", "frozen"}},
        {"integrator",
         {"dt_max", "noise_dt", "horizon", "ladder", "extinction_eps", "dt_floor", "positivity_kappa",
          "positivity_dt_min", "record", "output_dt"}},
        {"monte_carlo", {"n", "base_seed", "delta"}},
        {"transform", {"map"}},
        {"timechange", {"source", "sigma"}},
        {"output", {"dir"}},
    };
    return keys;
}

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

Raw tokenize(std::string_view text)
{
    Raw raw;
    std::string section;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const std::string line =
            trim(text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos));
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (line.empty() || line[0] == '#' || line[0] == ';')
            continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(line_no, line, "malformed section header '" + line + "'");
            section = trim(std::string_view(line).substr(1, line.size() - 2));
            if (!known_keys().count(section))
                throw ConfigError(line_no, section, "unknown section [" + section + "]");
            raw[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(line_no, line, "expected 'key = value', got '" + line + "'");
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        if (key.empty())
            throw ConfigError(line_no, key, "empty key");
        if (section.empty())
            throw ConfigError(line_no, key, "key '" + key + "' outside any section");
        if (section != "model" && !known_keys().at(section).count(key))
            throw ConfigError(line_no, key, "unknown key '" + key + "' in [" + section + "]");
        auto& slot = raw[section];
        if (slot.count(key))
            throw ConfigError(line_no, key, "duplicate key '" + key + "' in [" + section + "]");
        slot[key] = {value, line_no};
    }
    return raw;
}

double to_double(const std::string& key, const Entry& e)
{
    double v = 0.0;
    const char* first = e.value.data();
    const char* last = first + e.value.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last || !std::isfinite(v))
        throw ConfigError(e.line, key, "key '" + key + "': expected a number, got '" + e.value + "'");
    return v;
}

std::uint64_t to_unsigned(const std::string& key, const Entry& e)
{
    std::uint64_t v = 0;
    const char* first = e.value.data();
    const char* last = first + e.value.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last)
        throw ConfigError(e.line, key,
                          "key '" + key + "': expected a nonnegative integer, got '" + e.value + "'");
    return v;
}

class Reader {
public:
    explicit Reader(const Raw& raw) : raw_(raw) {}

    const Entry* find(const std::string& section, const std::string& key) const
    {
        const auto s = raw_.find(section);
        if (s == raw_.end())
            return nullptr;
        const auto k = s->second.find(key);
        return k == s->second.end() ? nullptr : &k->second;
    }
    void number(const std::string& section, const std::string& key, double& out) const
    {
        if (const auto* e = find(section, key))
            out = to_double(key, *e);
    }
    template <class T>
    void integer(const std::string& section, const std::string& key, T& out) const
    {
        if (const auto* e = find(section, key))
            out = static_cast<T>(to_unsigned(key, *e));
    }
    void text(const std::string& section, const std::string& key, std::string& out,
              std::initializer_list<std::string_view> allowed = {}) const
    {
        const auto* e = find(section, key);
        if (!e)
            return;
        if (allowed.size() && std::find(allowed.begin(), allowed.end(), e->value) == allowed.end()) {
            std::string list;
            for (auto a : allowed)
                list += (list.empty() ? "" : ", ") + std::string(a);
            throw ConfigError(e->line, key,
                              "key '" + key + "': '" + e->value + "' is not one of " + list);
        }
        out = e->value;
    }
    int line(const std::string& section, const std::string& key) const
    {
        const auto* e = find(section, key);
        return e ? e->line : 0;
    }

private:
    const Raw& raw_;
};

void require(bool ok, const Reader& r, const std::string& section, const std::string& key,
             const std::string& what)
{
    if (!ok)
        throw ConfigError(r.line(section, key), key, "key '" + key + "': " + what);
}

} // namespace

ExperimentConfig parse_config(std::string_view text)
{
    const Raw raw = tokenize(text);
    const Reader r(raw);
    ExperimentConfig c;

    const auto* command = r.find("experiment", "command");
    if (!command)
        throw ConfigError(0, "command", "missing required key 'command' in [experiment]");
    {
        std::string list;
        for (const auto& name : commands)
            list += (list.empty() ? "" : ", ") + name;
        if (std::find(commands.begin(), commands.end(), command->value) == commands.end())
            throw ConfigError(command->line, "command",
                              "key 'command': unknown command '" + command->value + "' (valid: " +
                                  list + ")");
        c.command = command->value;
    }

    r.text("timechange", "source", c.timechange_source, {"constant", "model"});
    r.number("timechange", "sigma", c.timechange_sigma);
    require(c.timechange_sigma != 0.0, r, "timechange", "sigma", "must be nonzero");

    const bool needs_model = !(c.command == "timechange" && c.timechange_source == "constant");
    if (const auto* name = r.find("model", "name")) {
        c.model_name = name->value;
        const CatalogEntry* entry = nullptr;
        try {
            entry = &catalog_entry(c.model_name);
        } catch (const UnknownModel& e) {
            throw ConfigError(name->line, "name", std::string("key 'name': ") + e.what());
        }
        c.model_params = entry->defaults;
        for (const auto& [key, e] : raw.at("model")) {
            if (key == "name")
                continue;
            if (!entry->defaults.count(key))
                throw ConfigError(e.line, key,
                                  "unknown key '" + key + "' in [model] (not a parameter of " +
                                      c.model_name + ")");
            c.model_params[key] = to_double(key, e);
        }
        try {
            (void)make_model(c.model_name, c.model_params);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(name->line, "name", e.what());
        }
    } else if (needs_model) {
        throw ConfigError(0, "name", "missing required key 'name' in [model]");
    } else if (raw.count("model") && !raw.at("model").empty()) {
        const auto& [key, e] = *raw.at("model").begin();
        throw ConfigError(e.line, key, "key '" + key + "' in [model] without a model name");
    }

    r.text("initial", "kind", c.initial.kind, {"constant", "ramp", "psi"});
    r.number("initial", "value", c.initial.value);
    r.number("initial", "start", c.initial.start);
    r.number("initial", "end", c.initial.end);
    r.number("initial", "a", c.initial.a);
    r.number("initial", "x0", c.initial.x0);
    r.number("initial", "eps", c.initial.eps);

    r.number("sde", "x0", c.sde_x0);
    if (c.model_params.count("C"))
        c.sde_frozen = c.model_params.at("C");
    r.number("sde", "frozen", c.sde_frozen);

    auto& ic = c.integrator;
    r.number("integrator", "dt_max", ic.dt_max);
    r.number("integrator", "noise_dt", ic.noise_dt);
    r.number("integrator", "horizon", ic.horizon);
    r.number("integrator", "extinction_eps", ic.extinction_eps);
    r.number("integrator", "dt_floor", ic.dt_floor);
    r.number("integrator", "positivity_kappa", ic.positivity_kappa);
    r.number("integrator", "positivity_dt_min", ic.positivity_dt_min);
    r.number("integrator", "output_dt", ic.output_dt);
    if (const auto* e = r.find("integrator", "ladder")) {
        ic.ladder.clear();
        std::stringstream ss(e->value);
        std::string item;
        while (std::getline(ss, item, ','))
            ic.ladder.push_back(to_double("ladder", {trim(item), e->line}));
    }
    {
        std::string record = "every_step";
        if (c.command != "simulate" && c.command != "simulate-delay")
            record = "final_only";
        r.text("integrator", "record", record, {"every_step", "sampled", "final_only"});
        ic.record = record == "every_step" ? RecordMode::every_step
                    : record == "sampled"  ? RecordMode::sampled
                                           : RecordMode::final_only;
    }
    try {
        ic.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(0, "integrator", std::string("[integrator]: ") + e.what());
    }

    r.integer("monte_carlo", "n", c.n);
    require(c.n >= 1, r, "monte_carlo", "n", "must be at least 1");
    r.integer("monte_carlo", "base_seed", c.base_seed);
    r.number("monte_carlo", "delta", c.delta);
    require(c.delta >= 0.0, r, "monte_carlo", "delta", "must be nonnegative");

    r.text("transform", "map", c.map, {"neg_log", "exp_neg", "identity"});
    r.text("output", "dir", c.output_dir);
    require(!c.output_dir.empty(), r, "output", "dir", "must not be empty");

    if (c.command == "histogram") {
        const double h = ic.horizon;
        require(h == std::floor(h) && h >= 1.0, r, "integrator", "horizon",
                "histogram needs a positive integer horizon");
    }
    if (c.command == "dichotomy") {
        require(c.model_name == "population", r, "model", "name",
                "dichotomy runs the 'population' model");
    }
    if (needs_model && c.command != "simulate" && c.command != "transform-check" &&
        c.command != "timechange") {
        try {
            (void)c.initial.build(make_model(c.model_name, c.model_params).delay);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(r.line("initial", "kind"), "initial", std::string("[initial]: ") + e.what());
        }
    }
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError(0, "config", "cannot read config file '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

} // namespace sddelab::cli
