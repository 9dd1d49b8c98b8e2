#include "efqs/scenario.hpp"

#include "efqs/dynamics.hpp"
#include "efqs/entanglement.hpp"
#include "efqs/errors.hpp"
#include "efqs/filter.hpp"
#include "efqs/quadrature.hpp"
#include "efqs/spectral.hpp"

#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fmt/chrono.h>
#include <fmt/format.h>
#include <fstream>
#include <json.hpp>
#include <mutex>
#include <spdlog/spdlog.h>
#include <thread>

namespace efqs {

namespace {

enum Family { kObservables, kCorrelators, kEntropies, kVariance, kMutualInfo, kFamilies };

const char* const kNames[kFamilies] = {"observables", "correlators", "entropies", "variance", "mutual_info"};

const std::vector<std::string> kColumns[kFamilies] = {
    {"L", "tau", "site", "axis", "value"},
    {"L", "tau", "site_x", "site_y", "connected_ed", "connected_prediction"},
    {"L", "tau", "n", "region", "entropy"},
    {"L", "tau", "variance_ed", "variance_prediction"},
    {"L", "tau", "region_a", "region_b", "mi"},
};

using Rows = std::array<std::vector<std::vector<Cell>>, kFamilies>;

/// Runs fn(i) for i in [0, count) on `workers` threads; rethrows the first failure.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
    if(workers <= 1 || count <= 1) {
        for(std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr       error;
    std::mutex               error_mutex;
    std::vector<std::thread> pool;
    for(int w = 0; w < std::min<int>(workers, static_cast<int>(count)); ++w) {
        pool.emplace_back([&] {
            for(std::size_t i = next++; i < count; i = next++) {
                try {
                    fn(i);
                } catch(...) {
                    std::lock_guard lock(error_mutex);
                    if(!error) error = std::current_exception();
                    next = count;
                }
            }
        });
    }
    for(auto& t : pool) t.join();
    if(error) std::rethrow_exception(error);
}

struct Correlator {
    int        x, y;
    TimeSeries series_x, series_y;
};

/// Unfiltered ⟨S^axis_site(t)⟩ series long enough for kernels up to tau_max.
std::vector<TimeSeries> correlator_series(const SpectralData& spec, const PureState& state0, const std::vector<HermitianOperator>& ops,
                                          double tau_max, double dt, bool even) {
    const double half  = std::max(4.0 * tau_max, dt);
    const int    steps = static_cast<int>(std::ceil(half / dt - 1e-9)) + 1;
    const double t_max = dt * (steps - 1);
    if(even) return observable_series(spec, state0, ops, t_max, steps);

    const auto              times = linspace(-t_max, t_max, 2 * steps - 1);
    std::vector<TimeSeries> out(ops.size(), TimeSeries{times, std::vector<double>(times.size()), {}});
    for_each_evolved(spec, state0, times, [&](std::size_t i, const PureState& psi) {
        for(std::size_t o = 0; o < ops.size(); ++o) out[o].values[i] = expectation(psi, ops[o]);
    });
    return out;
}

void compute_size(const ScenarioConfig& c, int L, int workers, Rows& rows) {
    const HamiltonianSpec   hs     = c.hamiltonian(L);
    const HermitianOperator H      = build_hamiltonian(hs);
    const PureState         state0 = product_state(c.site_pattern(), L);
    const SpectralData      spec   = eigendecompose(H, state0);
    const auto              taus   = c.taus();
    const bool              even   = H.is_real() && state0.is_real();
    const Symmetry          sym    = even ? Symmetry::even : Symmetry::two_sided;
    const auto              E0     = energy_moments(spec, state0, 0.0).mean;
    const double            eps2   = energy_moments(spec, state0, E0).second_moment / L;

    struct Obs {
        int               site;
        Axis              axis;
        HermitianOperator op;
    };
    std::vector<Obs> obs;
    for(const auto& o : c.observables) {
        const int s = resolve_site(o.site, L);
        obs.push_back({s, o.axis, local_observable(o.axis, s, L)});
    }

    std::vector<Correlator>         corr;
    std::vector<HermitianOperator>  corr_ops;
    for(const auto& [a, b] : c.correlators) {
        const int x = resolve_site(a, L), y = resolve_site(b, L);
        corr.push_back({x, y, {}, {}});
        corr_ops.push_back(local_observable(c.correlator_axis, x, L));
        corr_ops.push_back(local_observable(c.correlator_axis, y, L));
    }
    if(!corr.empty()) {
        const auto series = correlator_series(spec, state0, corr_ops, taus.back(), c.series_dt, even);
        for(std::size_t k = 0; k < corr.size(); ++k) {
            corr[k].series_x = series[2 * k];
            corr[k].series_y = series[2 * k + 1];
        }
    }

    std::vector<Region> regions;
    for(const auto& r : c.entropy_regions) regions.push_back(resolve_region(r, L));
    std::vector<std::pair<Region, Region>> mi;
    for(const auto& [a, b] : c.mutual_info) mi.emplace_back(resolve_region(a, L), resolve_region(b, L));

    std::vector<Rows> per_tau(taus.size());
    parallel_for(taus.size(), workers, [&](std::size_t i) {
        const double    tau = taus[i];
        const PureState psi = filter_state(spec, H, state0, tau, c.backend);
        Rows&           out = per_tau[i];
        const auto      LL  = static_cast<long long>(L);
        for(const auto& o : obs) out[kObservables].push_back({LL, tau, static_cast<long long>(o.site), std::string(1, axis_name(o.axis)), expectation(psi, o.op)});
        for(std::size_t k = 0; k < corr.size(); ++k) {
            const double ed   = connected_correlator(psi, corr_ops[2 * k], corr_ops[2 * k + 1]);
            const double pred = connected_correlator_prediction(corr[k].series_x, tau, sym, corr[k].series_y);
            out[kCorrelators].push_back({LL, tau, static_cast<long long>(corr[k].x), static_cast<long long>(corr[k].y), ed, pred});
        }
        for(const auto& r : regions) {
            const DensityMatrix rho = reduced_density_matrix(psi, r);
            for(double n : c.entropy_ns) out[kEntropies].push_back({LL, tau, n, r.to_string(), renyi_entropy(rho, n)});
        }
        if(c.variance) {
            const auto m = energy_moments(spec, psi, E0);
            out[kVariance].push_back({LL, tau, m.second_moment - (m.mean - E0) * (m.mean - E0), variance_prediction(eps2, L, tau)});
        }
        for(const auto& [a, b] : mi) out[kMutualInfo].push_back({LL, tau, a.to_string(), b.to_string(), mutual_information(psi, a, b)});
    });
    for(auto& r : per_tau)
        for(int f = 0; f < kFamilies; ++f)
            for(auto& row : r[f]) rows[f].push_back(std::move(row));
}

std::string utc_timestamp() {
    const auto now = std::chrono::time_point_cast<std::chrono::seconds>(std::chrono::system_clock::now());
    return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(std::chrono::system_clock::to_time_t(now)));
}

} // namespace

std::vector<ResultTable> compute_scenario(const ScenarioConfig& config, int workers) {
    config.validate();
    Rows rows;
    for(int L : config.Ls) {
        spdlog::info("scenario {}: L = {}", config.source, L);
        compute_size(config, L, workers, rows);
    }
    const bool wanted[kFamilies] = {!config.observables.empty(), !config.correlators.empty(), !config.entropy_regions.empty(), config.variance,
                                    !config.mutual_info.empty()};
    std::vector<ResultTable> out;
    for(int f = 0; f < kFamilies; ++f) {
        if(!wanted[f]) continue;
        ResultTable t(kNames[f], kColumns[f]);
        for(auto& row : rows[f]) t.add_row(std::move(row));
        t.metadata["config_hash"] = config.hash();
        t.metadata["version"]     = kVersion;
        out.push_back(std::move(t));
    }
    return out;
}

RunReport run_scenario(const ScenarioConfig& config, const RunOptions& options) {
    RunReport report;
    report.output_dir  = options.output_dir.value_or(config.output_dir);
    report.config_hash = config.hash();
    const auto manifest_path = report.output_dir / "manifest.json";

    if(std::filesystem::exists(manifest_path) && !options.force) {
        std::ifstream  f(manifest_path);
        nlohmann::json old;
        try {
            f >> old;
        } catch(const nlohmann::json::exception&) {
            throw ConfigError(fmt::format("{} is unreadable; pass --force to overwrite", manifest_path.string()));
        }
        const std::string old_hash = old.value("config_hash", "");
        if(old_hash != report.config_hash)
            throw ConfigError(fmt::format("{} was written by config {} (this config is {}); pass --force to overwrite", report.output_dir.string(),
                                          old_hash, report.config_hash));
    }

    const auto tables = compute_scenario(config, options.workers.value_or(config.workers));
    std::filesystem::create_directories(report.output_dir);
    nlohmann::json files = nlohmann::json::array();
    for(const auto& t : tables) {
        const auto path = report.output_dir / (t.name() + ".csv");
        t.write_csv(path);
        report.files.push_back(path);
        files.push_back(path.filename().string());
    }
    nlohmann::json manifest = {{"config_hash", report.config_hash}, {"version", kVersion},   {"timestamp", utc_timestamp()},
                               {"source", config.source},           {"files", files},         {"canonical_config", config.canonical()}};
    std::ofstream  f(manifest_path, std::ios::trunc);
    if(!f) throw ConfigError(fmt::format("cannot write {}", manifest_path.string()));
    f << manifest.dump(2) << '\n';
    return report;
}

} // namespace efqs
