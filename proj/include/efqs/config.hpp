#pragma once

#include "efqs/filter.hpp"
#include "efqs/pauli.hpp"
#include "efqs/region.hpp"
#include "efqs/spin_core.hpp"

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace efqs {

/// One observable sweep, e.g. "z@L/2".
struct ObservableSpec {
    Axis        axis = Axis::z;
    std::string site;
};

/// Parsed scenario file. Site and region fields keep their textual form, since expressions such as
/// L/2 resolve per system size.
///
/// File layout (INI):
///   [model]        J, hx, hz, L (comma list), boundary = open | periodic
///   [state]        pattern = neel | yplus
///   [filter]       tau_start, tau_stop, tau_steps, backend = exact | iterative | fourier,
///                  dtau, window_factor, points
///   [measurements] observables = z@L/2; x@1
///                  correlators = L/4,3L/4; 1,L      correlator_axis = z
///                  series_dt = 0.02
///                  entropy_regions = 1:L/2; 1:2,L-1:L      entropy_n = 0.5, 1, 2
///                  mutual_info = 1:2|L-1:L
///                  variance = true
///   [output]       dir, workers
struct ScenarioConfig {
    std::string source = "<memory>";

    double                J        = 1.0;
    double                hx       = 0.0;
    double                hz       = 0.0;
    std::vector<int>      Ls       = {8};
    Boundary              boundary = Boundary::open;
    std::string           pattern  = "neel";

    double        tau_start = 0.0;
    double        tau_stop  = 0.0;
    int           tau_steps = 1;
    FilterBackend backend;

    std::vector<ObservableSpec>                      observables;
    std::vector<std::pair<std::string, std::string>> correlators;
    Axis                                             correlator_axis = Axis::z;
    double                                           series_dt       = 0.02;
    std::vector<std::string>                         entropy_regions;
    std::vector<double>                              entropy_ns = {2.0};
    std::vector<std::pair<std::string, std::string>> mutual_info;
    bool                                             variance = false;

    std::filesystem::path output_dir = "out";
    int                   workers    = 1;

    std::vector<double> taus() const;
    HamiltonianSpec     hamiltonian(int L) const;
    SitePattern         site_pattern() const;
    bool                has_measurements() const;

    /// Resolves every site and region for every L; throws ConfigError naming the key.
    void validate() const;

    /// Normalized text of every field that affects results (output dir and workers excluded).
    std::string canonical() const;
    /// 16 hex digits, FNV-1a of canonical().
    std::string hash() const;
};

ScenarioConfig parse_config(const std::string& text, const std::string& origin = "<memory>");
ScenarioConfig load_config(const std::filesystem::path& path);

/// Integer, or an expression aL/b +- c such as L, L/2, 3L/4, L-1. Must evaluate to an integer in
/// [1, L].
int resolve_site(const std::string& expr, int L);

/// Comma-separated sites and a:b ranges, e.g. "1:2,L-1:L".
Region resolve_region(const std::string& expr, int L);

/// FNV-1a, 64 bit.
std::uint64_t fnv1a(const std::string& data);

} // namespace efqs
