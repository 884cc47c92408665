#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "relo/harness.hpp"

namespace relo::cfg {

// Minimal TOML subset: [tables], key = value with string/number/boolean
// values and # comments. That covers the run configuration format.
class Toml {
public:
    static Toml parse_file(const std::filesystem::path& path);
    static Toml parse(const std::string& text);

    bool has(const std::string& table, const std::string& key) const;
    std::string get_string(const std::string& table, const std::string& key,
                           const std::string& fallback) const;
    double get_number(const std::string& table, const std::string& key, double fallback) const;
    bool get_bool(const std::string& table, const std::string& key, bool fallback) const;

private:
    std::map<std::string, std::string> values_;  // "table.key" -> raw value
};

struct RunConfig {
    // data files (long-format CSV tensors)
    std::filesystem::path trips, activity, travel;
    std::filesystem::path presence;       // optional: zone_id,weight
    std::filesystem::path avail_history;  // optional: i,t,value
    std::filesystem::path events;         // optional: zone_id,epoch_seconds
    int zones = 63;
    int slots = 96;

    int horizon = 96;
    long fleet = 300;
    long staff = 7;
    double delta = 15.0;
    double mean_speed_kmh = 24.0;

    harness::PolicySpec policy;

    int scenarios = 1000;
    uint64_t seed = 1;
    int threads = 0;  // 0 = hardware concurrency
    std::filesystem::path out = "out";
};

// Throws std::runtime_error with a message suitable for exit code 2.
RunConfig load_run_config(const std::filesystem::path& path);

// Loads tensors/series from the configured files and calibrates the
// instance. Throws on missing or malformed data (exit code 3).
harness::Instance load_instance(const RunConfig& rc);

}  // namespace relo::cfg
