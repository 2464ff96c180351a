#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "palintoep/ensemble.hpp"
#include "palintoep/estimation.hpp"

namespace palintoep {

struct HistogramConfig {
    bool enabled = false;
    int bins = 120;
    double lo = -6.0;
    double hi = 6.0;
};

struct OutputConfig {
    std::string moments_csv;
    std::string report_json;
    std::string histogram_csv_prefix;
};

/// One reproducible experiment: the simulate command is a pure function of
/// this structure.
struct RunConfig {
    int schema = 1;
    int n = 0;
    std::vector<int> Ns;
    std::uint64_t num_matrices = 0;
    int max_moment = 10;
    EntryDistribution distribution{DistributionKind::Gaussian};
    std::uint64_t seed = 12345;
    int fit_order = 0; // 0 disables extrapolation
    MomentPath path = MomentPath::Eigenvalues;
    HistogramConfig histogram;
    OutputConfig outputs;
};

/// Strict parse: unknown keys are rejected and every semantic violation is
/// reported in one ConfigError.
RunConfig parse_run_config(const nlohmann::json& j);

/// Parse from file text; syntax errors carry line and column.
RunConfig load_run_config(const std::string& path);

/// Canonical serialization; parsing it back yields byte-identical output.
nlohmann::ordered_json canonical_config_json(const RunConfig& config);

} // namespace palintoep
