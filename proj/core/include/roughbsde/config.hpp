#pragma once

#include "roughbsde/bdsde.hpp"
#include "roughbsde/drivers.hpp"
#include "roughbsde/experiments.hpp"
#include "roughbsde/rbsde.hpp"

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace roughbsde {

/// Flat `key = value` configuration. `#` starts a comment; lists are comma
/// separated. Reads are recorded so unused keys can be reported.
class Config {
public:
    Config() = default;
    static Config parse(std::string_view text, std::string base_dir = ".");
    static Config load(const std::string& file);

    bool has(const std::string& key) const;
    std::string get(const std::string& key) const;  ///< throws if absent
    std::string get(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<double> get_list(const std::string& key, std::vector<double> fallback = {}) const;
    /// Path relative to the configuration file's directory.
    std::string get_path(const std::string& key) const;

    void set(const std::string& key, const std::string& value);
    /// Keys present but never read.
    std::vector<std::string> unused() const;
    const std::map<std::string, std::string>& entries() const { return values_; }
    const std::string& base_dir() const { return base_dir_; }

private:
    const std::string* find(const std::string& key) const;

    std::map<std::string, std::string> values_;
    mutable std::set<std::string> read_;
    std::string base_dir_ = ".";
};

/// Driver spec from `<prefix>kind`, `<prefix>seed`, ... (prefix "driver." by
/// default). `sum` drivers read `<prefix>parts = n` and `<prefix>part<i>.*`.
DriverSpec driver_spec_from(const Config& cfg, const std::string& prefix = "driver.");

/// W from `driver.file` (path CSV) or from the inline driver spec.
GridPath driver_from(const Config& cfg, double horizon);

/// Problem keys: horizon, mode, p, q, cf, cg, xi.*, f.*, g.*, clock.file and
/// the driver block.
Problem problem_from(const Config& cfg);
TreeConfig tree_config_from(const Config& cfg);
SolverOptions solver_options_from(const Config& cfg);
StabilityConfig stability_from(const Config& cfg);
BdsdeRun bdsde_from(const Config& cfg);

}  // namespace roughbsde
