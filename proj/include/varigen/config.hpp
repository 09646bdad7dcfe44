#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace varigen {

/// Flat key=value configuration with dotted section names. Every run
/// hyperparameter has exactly one home here; unknown keys are rejected and a
/// canonical digest over the effective (defaults + overrides) config is
/// stamped into every output artifact.
class Config {
public:
    Config();  // all defaults

    static Config from_file(const std::filesystem::path& path);

    /// Parse "key=value" override strings (CLI --set).
    void apply_override(const std::string& assignment);
    void set(const std::string& key, const std::string& value);

    bool has(const std::string& key) const;
    const std::string& get(const std::string& key) const;
    std::string get_string(const std::string& key) const;
    int64_t get_int(const std::string& key) const;
    double get_double(const std::string& key) const;
    bool get_bool(const std::string& key) const;

    /// Sorted "key=value\n" rendering of the effective config.
    std::string canonical_text() const;
    /// SHA-256 of canonical_text().
    std::string digest() const;

    const std::map<std::string, std::string>& values() const { return values_; }

    static const std::vector<std::string>& known_keys();

private:
    std::map<std::string, std::string> values_;
};

}  // namespace varigen
