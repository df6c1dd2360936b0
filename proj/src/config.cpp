#include "semflow/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <sstream>

#include "semflow/errors.hpp"
#include "semflow/serialize.hpp"

namespace semflow {

UevConfig RunConfig::to_uev_config() const {
    validate();
    UevConfig c;
    c.dse.steps = steps;
    switch (schedule) {
        case AlphaSchedule::Kind::uniform: c.dse.schedule = AlphaSchedule::uniform(steps); break;
        case AlphaSchedule::Kind::decayed: c.dse.schedule = AlphaSchedule::decayed(steps); break;
        case AlphaSchedule::Kind::custom:
            throw ConfigError("custom schedules cannot be expressed in a run config");
    }
    c.dse.guidance.scale_src = scale_src;
    c.dse.guidance.scale_tar = scale_tar;
    c.dse.seed = seed;
    c.verifier.threshold_sigma = sigma;
    c.verifier.patience_window = patience_window;
    c.verifier.min_improvement = min_improvement;
    c.verifier.max_rounds = max_rounds;
    c.verifier.best_pick = best_pick == "last" ? VerifierConfig::BestPick::last
                                               : VerifierConfig::BestPick::first;
    c.amplitude = amplitude;
    c.target_stddev = stddev;
    return c;
}

void RunConfig::validate() const {
    if (steps < 1) throw ConfigError("steps must be at least 1");
    if (schedule == AlphaSchedule::Kind::decayed && steps % 3 != 0)
        throw ConfigError("decayed schedule needs a step count divisible by 3");
    if (!(sigma >= 0.0 && sigma <= 10.0)) throw ConfigError("sigma must lie in [0, 10]");
    if (patience_window < 1) throw ConfigError("patience_window must be at least 1");
    if (!(min_improvement >= 0.0)) throw ConfigError("min_improvement must be non-negative");
    if (max_rounds < 1) throw ConfigError("max_rounds must be at least 1");
    if (!(amplitude > 0.0)) throw ConfigError("amplitude must be positive");
    if (!(stddev > 0.0)) throw ConfigError("stddev must be positive");
    if (best_pick != "first" && best_pick != "last")
        throw ConfigError("best_pick must be 'first' or 'last'");
}

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    try {
        // stoull would silently wrap a leading minus.
        if (value.empty() || value[0] == '-') throw std::invalid_argument(value);
        std::size_t used = 0;
        std::uint64_t v = std::stoull(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': '" + value + "' is not an unsigned integer");
    }
}

int parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        int v = std::stoi(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': '" + value + "' is not an integer");
    }
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': '" + value + "' is not a number");
    }
}

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> kKeys = {
        "seed",          "steps",           "schedule",   "scale_src",
        "scale_tar",     "sigma",           "patience_window", "min_improvement",
        "max_rounds",    "amplitude",       "stddev",     "best_pick",
    };
    return kKeys;
}

}  // namespace

void set_config_key(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "seed") cfg.seed = parse_u64(key, value);
    else if (key == "steps") cfg.steps = parse_int(key, value);
    else if (key == "schedule") cfg.schedule = schedule_kind_from_string(value);
    else if (key == "scale_src") cfg.scale_src = parse_double(key, value);
    else if (key == "scale_tar") cfg.scale_tar = parse_double(key, value);
    else if (key == "sigma") cfg.sigma = parse_double(key, value);
    else if (key == "patience_window") cfg.patience_window = parse_int(key, value);
    else if (key == "min_improvement") cfg.min_improvement = parse_double(key, value);
    else if (key == "max_rounds") cfg.max_rounds = parse_int(key, value);
    else if (key == "amplitude") cfg.amplitude = parse_double(key, value);
    else if (key == "stddev") cfg.stddev = parse_double(key, value);
    else if (key == "best_pick") cfg.best_pick = value;
    else throw ConfigError("unknown config key '" + key + "'");
}

RunConfig parse_run_config(const std::string& text, RunConfig base) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": empty key or value");
        try {
            set_config_key(base, key, value);
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    base.validate();
    return base;
}

RunConfig load_run_config(const std::filesystem::path& path, RunConfig base) {
    return parse_run_config(read_text_file(path), base);
}

RunConfig apply_env_overrides(RunConfig base) {
    for (const auto& key : config_keys()) {
        std::string env_name = "SEMFLOW_";
        for (char c : key) env_name += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        const char* value = std::getenv(env_name.c_str());
        if (value && *value) set_config_key(base, key, value);
    }
    base.validate();
    return base;
}

}  // namespace semflow
