#include "varigen/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "varigen/digest.hpp"
#include "varigen/errors.hpp"

namespace varigen {

namespace {

struct KeyDef {
    const char* key;
    const char* def;
};

// One row per run hyperparameter. Values are stored as strings and parsed on
// access; defaults follow the documented conventions of each module.
const KeyDef kSchema[] = {
    {"embedding.backend", "toy"},
    {"embedding.cache", ""},
    {"prompt.image_embedding", "mean"},
    {"prompt.t_max", "1000"},
    {"prompt.threshold", "0.5"},
    {"prompt.comparator", "greater"},
    {"prompt.fallback", "naive"},
    {"prompt.selection", "exhaustive"},
    {"prompt.lexicon", ""},
    {"generator.K", "64"},
    {"generator.latent_dim", "16"},
    {"generator.grid", "8"},
    {"generator.lambda", "1.0"},
    {"generator.beta", "0.25"},
    {"generator.lr", "0.05"},
    {"generator.sampling_mode", "mean_plus_sigma_eps"},
    {"generator.resolution", "64"},
    {"variance.scalar_per_patch", "false"},
    {"variance.post_quantization", "true"},
    {"integrator.rounds", "20"},
    {"integrator.copies", "30"},
    {"integrator.augment", "8"},
    {"integrator.steps_per_round", "1"},
    {"integrator.strategy", "random-pick"},
    {"integrator.memory_lean", "true"},
    {"detector.backbone", "toy"},
    {"detector.coreset_fraction", "1.0"},
    {"detector.smooth_sigma", "4.0"},
    {"data.scenario", "one_shot"},
    {"seed", "0"},
    {"output.root", "runs"},
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

Config::Config() {
    for (const auto& def : kSchema) values_[def.key] = def.def;
}

const std::vector<std::string>& Config::known_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k;
        for (const auto& def : kSchema) k.push_back(def.key);
        return k;
    }();
    return keys;
}

Config Config::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorCode::ConfigError, "cannot open config file: " + path.string());
    Config cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            raise(ErrorCode::ConfigError,
                  path.string() + ":" + std::to_string(lineno) + ": expected key = value");
        }
        cfg.set(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
    return cfg;
}

void Config::apply_override(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) {
        raise(ErrorCode::ConfigError, "override must be key=value: " + assignment);
    }
    set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

void Config::set(const std::string& key, const std::string& value) {
    if (values_.find(key) == values_.end()) {
        raise(ErrorCode::ConfigError, "unknown config key: " + key);
    }
    values_[key] = value;
}

bool Config::has(const std::string& key) const { return values_.count(key) != 0; }

const std::string& Config::get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) raise(ErrorCode::ConfigError, "unknown config key: " + key);
    return it->second;
}

std::string Config::get_string(const std::string& key) const { return get(key); }

int64_t Config::get_int(const std::string& key) const {
    const std::string& v = get(key);
    try {
        size_t pos = 0;
        const int64_t n = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return n;
    } catch (const std::exception&) {
        raise(ErrorCode::ConfigError, "config key " + key + " is not an integer: " + v);
    }
}

double Config::get_double(const std::string& key) const {
    const std::string& v = get(key);
    try {
        size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        raise(ErrorCode::ConfigError, "config key " + key + " is not a number: " + v);
    }
}

bool Config::get_bool(const std::string& key) const {
    const std::string& v = get(key);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    raise(ErrorCode::ConfigError, "config key " + key + " is not a boolean: " + v);
}

std::string Config::canonical_text() const {
    std::ostringstream out;
    for (const auto& [k, v] : values_) out << k << "=" << v << "\n";
    return out.str();
}

std::string Config::digest() const { return sha256_hex(canonical_text()); }

}  // namespace varigen
