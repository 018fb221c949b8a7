#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qfound {

/// Flat key = value configuration text ('#' comments, one pair per line).
/// Later assignments override earlier ones.
struct KeyValueConfig {
    std::vector<std::pair<std::string, std::string>> items;

    static KeyValueConfig parse(const std::string& text);

    bool has(const std::string& key) const;
    std::string get(const std::string& key) const;  // throws if missing
    std::string get(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    std::int64_t get_int(const std::string& key) const;
    std::uint64_t get_uint(const std::string& key) const;
    void set(const std::string& key, const std::string& value);
};

/// Rectangular numeric table plus the metadata header that is echoed into the
/// CSV ('# key = value' lines reproducing the exact configuration).
struct ResultTable {
    std::vector<std::pair<std::string, std::string>> metadata;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    void add_row(std::vector<double> row);
    std::string to_csv() const;
};

struct RunResult {
    ResultTable table;
    std::string plot_script;  // gnuplot text; empty when not applicable
};

struct ConfigError : std::runtime_error {
    std::vector<std::string> violations;
    explicit ConfigError(std::vector<std::string> v);
};

/// 17-significant-digit, locale-independent float formatting (CSV contract).
std::string format_double(double v);

std::vector<std::string> experiment_names();

/// Fills in every default key of the experiment; overrides must refer to
/// known keys (unknown keys surface as validation violations).
KeyValueConfig materialize_config(const std::string& experiment,
                                  const KeyValueConfig& overrides);

/// Pure; returns every violation, not just the first.
std::vector<std::string> validate_config(const std::string& experiment,
                                         const KeyValueConfig& config);

/// Validates, runs, and returns the table (and plot script when the
/// experiment has one). Throws ConfigError with the full violation list.
RunResult run_experiment(const std::string& experiment,
                         const KeyValueConfig& overrides);

/// Recovers (experiment, config) from the '#' metadata of an emitted CSV, so
/// re-running the echoed header reproduces the table.
std::pair<std::string, KeyValueConfig> config_from_csv_metadata(
    const std::string& csv);

}  // namespace qfound
