#pragma once

#include "efqs/config.hpp"
#include "efqs/result_table.hpp"

#include <filesystem>
#include <optional>
#include <vector>

namespace efqs {

inline constexpr const char* kVersion = "0.1.0";

/// Tables produced by a scenario, in the fixed order observables, correlators, entropies, variance,
/// mutual_info; families without measurements are omitted. Rows are ordered by (L, tau, item)
/// regardless of how the worker pool scheduled them.
std::vector<ResultTable> compute_scenario(const ScenarioConfig& config, int workers = 1);

struct RunOptions {
    /// Overwrite an output directory whose manifest carries a different config hash.
    bool                                 force = false;
    std::optional<int>                   workers;
    std::optional<std::filesystem::path> output_dir;
};

struct RunReport {
    std::filesystem::path              output_dir;
    std::vector<std::filesystem::path> files;
    std::string                        config_hash;
};

/// Computes the scenario and writes <name>.csv per table plus manifest.json (config hash, version,
/// UTC timestamp, file list). The CSVs carry no run-specific data, so identical configs give
/// byte-identical files. Throws ConfigError if the directory holds a manifest with another hash and
/// `force` is off.
RunReport run_scenario(const ScenarioConfig& config, const RunOptions& options = {});

} // namespace efqs
