// efqs: scenario runner, validation suite and closed-form replica predictions.
//
// Exit codes: 0 success, 1 validation or numerical failure, 2 usage or config error,
// 3 capacity error.

#include "efqs/config.hpp"
#include "efqs/dynamics.hpp"
#include "efqs/entanglement.hpp"
#include "efqs/errors.hpp"
#include "efqs/filter.hpp"
#include "efqs/quadrature.hpp"
#include "efqs/replica.hpp"
#include "efqs/result_table.hpp"
#include "efqs/scenario.hpp"
#include "efqs/spectral.hpp"
#include "efqs/validation.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <fmt/format.h>
#include <iostream>
#include <spdlog/spdlog.h>

using namespace efqs;

namespace {

constexpr int kExitOk         = 0;
constexpr int kExitValidation = 1;
constexpr int kExitUsage      = 2;
constexpr int kExitCapacity   = 3;

struct ModelFlags {
    int         L         = 8;
    double      J         = 1.0;
    double      hx        = 1.2;
    double      hz        = 0.8;
    std::string state     = "neel";
    std::string boundary  = "open";
    double      tau_max   = 4.0;
    int         tau_steps = 21;
    std::string backend   = "exact";
    std::string out;

    void add(CLI::App* app) {
        app->add_option("--L", L, "chain length")->capture_default_str();
        app->add_option("--J", J, "Ising coupling")->capture_default_str();
        app->add_option("--hx", hx, "longitudinal field")->capture_default_str();
        app->add_option("--hz", hz, "transverse field")->capture_default_str();
        app->add_option("--state", state, "neel | yplus")->capture_default_str();
        app->add_option("--boundary", boundary, "open | periodic")->capture_default_str();
        app->add_option("--tau-max", tau_max, "largest filter time")->capture_default_str();
        app->add_option("--tau-steps", tau_steps, "filter-time grid points")->capture_default_str();
        app->add_option("--backend", backend, "exact | iterative | fourier")->capture_default_str();
        app->add_option("--out", out, "CSV path (stdout if omitted)");
    }

    ScenarioConfig config() const {
        ScenarioConfig c;
        c.source       = "command line";
        c.J            = J;
        c.hx           = hx;
        c.hz           = hz;
        c.Ls           = {L};
        c.pattern      = state;
        c.tau_start    = 0.0;
        c.tau_stop     = tau_max;
        c.tau_steps    = tau_steps;
        c.backend.kind = parse_backend(backend);
        if(boundary == "open") c.boundary = Boundary::open;
        else if(boundary == "periodic") c.boundary = Boundary::periodic;
        else throw ConfigError(fmt::format("--boundary: '{}' (expected open | periodic)", boundary));
        c.validate();
        return c;
    }
};

void emit(const ResultTable& t, const std::string& out) {
    if(out.empty()) std::cout << t.to_csv();
    else t.write_csv(out);
}

struct Model {
    ScenarioConfig    config;
    HermitianOperator H;
    PureState         state0;
    SpectralData      spec;
};

Model build_model(const ModelFlags& f) {
    ScenarioConfig    c  = f.config();
    HermitianOperator H  = build_hamiltonian(c.hamiltonian(f.L));
    PureState         s0 = product_state(c.site_pattern(), f.L);
    SpectralData      sd = eigendecompose(H, s0);
    return {std::move(c), std::move(H), std::move(s0), std::move(sd)};
}

int filter_sweep(const ModelFlags& f) {
    const Model  m    = build_model(f);
    const double E0   = energy_moments(m.spec, m.state0, 0.0).mean;
    const double eps2 = energy_moments(m.spec, m.state0, E0).second_moment / f.L;
    ResultTable  t("filter_sweep", {"L", "tau", "mean_energy", "second_moment", "variance_ed", "variance_prediction"});
    for(double tau : m.config.taus()) {
        const PureState psi = filter_state(m.spec, m.H, m.state0, tau, m.config.backend);
        const auto      mo  = energy_moments(m.spec, psi, E0);
        t.add_row({static_cast<long long>(f.L), tau, mo.mean, mo.second_moment, mo.second_moment - (mo.mean - E0) * (mo.mean - E0),
                   variance_prediction(eps2, f.L, tau)});
    }
    emit(t, f.out);
    return kExitOk;
}

int time_sweep(const ModelFlags& f, double t_max, int t_steps, const std::string& site_expr) {
    const Model m    = build_model(f);
    const int   site = resolve_site(site_expr, f.L);
    const auto  sz   = observable_series(m.spec, m.state0, local_observable(Axis::z, site, f.L), t_max, t_steps);
    const auto  echo = log_echo_rate(m.spec, t_max, t_steps);
    ResultTable t("time_sweep", {"L", "t", "site", "sz", "echo_abs", "rate_re", "rate_im"});
    for(std::size_t i = 0; i < sz.times.size(); ++i)
        t.add_row({static_cast<long long>(f.L), sz.times[i], static_cast<long long>(site), sz.values[i], std::abs(echo.echo[i]), echo.rate[i].real(),
                   echo.rate[i].imag()});
    emit(t, f.out);
    return kExitOk;
}

int entropy_sweep_cmd(const ModelFlags& f, const std::string& region_expr, const std::vector<double>& ns) {
    const Model m = build_model(f);
    emit(entropy_sweep(m.spec, m.H, m.state0, m.config.backend, m.config.taus(), resolve_region(region_expr, f.L), ns), f.out);
    return kExitOk;
}

int replica_predict(const ReplicaParams& p, const std::optional<double>& tau, bool subleading) {
    p.validate_short_filter();
    std::vector<std::pair<std::string, std::string>> rows;
    auto add = [&](std::string k, std::string v) { rows.emplace_back(std::move(k), std::move(v)); };
    const bool integer = p.n >= 1.0 && p.n == std::round(p.n);
    add("n", format_double(p.n));
    add("f", format_double(p.f));
    add("eps2", format_double(p.eps2));
    add("tau_tilde", format_double(p.tau_tilde));
    if(integer) {
        add("det_Mn", format_double(det_Mn(p)));
        std::string ev;
        for(double e : Mn_eigenvalues(p)) ev += (ev.empty() ? "" : " ") + format_double(e);
        add("Mn_eigenvalues", ev);
        std::string nv;
        for(double e : Nn_eigenvalues(p)) nv += (nv.empty() ? "" : " ") + format_double(e);
        add("Nn_eigenvalues", nv);
    }
    add("det_Mn_continued", format_double(det_Mn_continued(p)));
    add("delta_S_n", format_double(short_filter_entropy_delta(p)));
    if(p.n == 1.0) add("note", fmt::format("n = 1 from a central difference in n with step {:g}", kReplicaLimitStep));
    add("s2_half_chain", format_double(s2_half_chain(p.tau_tilde, p.eps2)));
    if(tau) add("g_mft", format_double(gmft_asymptotic(p, *tau, subleading)));
    std::size_t width = 0;
    for(const auto& [k, v] : rows) width = std::max(width, k.size());
    for(const auto& [k, v] : rows) std::cout << fmt::format("{:<{}}  {}\n", k, width, v);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Energy-filtered quantum states of spin chains: scenarios, validation and replica predictions"};
    app.require_subcommand(1);
    bool verbose = false;
    app.add_flag("-v,--verbose", verbose, "log progress");

    auto*                 run = app.add_subcommand("run", "run a scenario config and write CSVs");
    std::string           config_path;
    bool                  force = false;
    std::optional<int>    workers;
    std::string           run_out;
    run->add_option("config", config_path, "scenario INI file")->required();
    run->add_flag("--force", force, "overwrite outputs written by a different config");
    run->add_option("--workers", workers, "worker threads (overrides [output] workers)");
    run->add_option("--out", run_out, "output directory (overrides [output] dir)");

    auto*            validate = app.add_subcommand("validate", "run the acceptance criteria");
    bool             full     = false;
    std::string      fault;
    std::vector<int> only;
    std::string      scratch;
    validate->add_flag("--full", full, "go up to L = 12 (default caps at L = 10)");
    validate->add_option("--inject-fault", fault, "deliberately break a formula (det)");
    validate->add_option("--only", only, "criterion ids to run")->delimiter(',');
    validate->add_option("--scratch", scratch, "directory for the determinism runs");

    auto*                 replica = app.add_subcommand("replica-predict", "closed-form replica quantities");
    ReplicaParams         rp;
    std::optional<double> tau;
    bool                  subleading = false;
    replica->add_option("--n", rp.n, "Renyi index")->capture_default_str();
    replica->add_option("--f", rp.f, "volume fraction V_A/V")->capture_default_str();
    replica->add_option("--eps2", rp.eps2, "variance density")->capture_default_str();
    replica->add_option("--tau-tilde", rp.tau_tilde, "sqrt(V) tau")->capture_default_str();
    replica->add_option("--V", rp.V, "total volume")->capture_default_str();
    replica->add_option("--area", rp.area, "boundary measure |dA|")->capture_default_str();
    replica->add_option("--Gamma", rp.Gamma_n, "entropy growth rate")->capture_default_str();
    replica->add_option("--t-th", rp.t_th, "thermalization time");
    replica->add_option("--tau", tau, "filter time for g_mft");
    replica->add_flag("--subleading", subleading, "add the log tau correction for n <= 1");

    ModelFlags filter_flags, time_flags, entropy_flags;
    auto*      fsweep = app.add_subcommand("filter-sweep", "energy moments of filtered states");
    filter_flags.add(fsweep);
    auto*       tsweep  = app.add_subcommand("time-sweep", "unfiltered dynamics: S^z and Loschmidt echo");
    double      t_max   = 10.0;
    int         t_steps = 201;
    std::string t_site  = "L/2";
    time_flags.add(tsweep);
    tsweep->add_option("--t-max", t_max, "final time")->capture_default_str();
    tsweep->add_option("--t-steps", t_steps, "time grid points")->capture_default_str();
    tsweep->add_option("--site", t_site, "site of S^z")->capture_default_str();
    auto*               esweep = app.add_subcommand("entropy-sweep", "Renyi entropies of filtered states");
    std::string         e_region = "1:L/2";
    std::vector<double> e_ns     = {1.0, 2.0};
    entropy_flags.add(esweep);
    esweep->add_option("--region", e_region, "sites, e.g. 1:L/2 or 1,2,L")->capture_default_str();
    esweep->add_option("--n", e_ns, "Renyi indices")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch(const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }
    spdlog::set_level(verbose ? spdlog::level::info : spdlog::level::warn);

    try {
        if(*run) {
            ScenarioConfig c = load_config(config_path);
            RunOptions     o;
            o.force   = force;
            o.workers = workers;
            if(!run_out.empty()) o.output_dir = run_out;
            const RunReport r = run_scenario(c, o);
            std::cout << fmt::format("config {} -> {} ({} tables)\n", r.config_hash, r.output_dir.string(), r.files.size());
            return kExitOk;
        }
        if(*validate) {
            ValidationOptions o;
            o.level   = full ? ValidationLevel::full : ValidationLevel::quick;
            o.fault   = fault;
            o.only    = only;
            o.scratch = scratch;
            const ValidationReport rep = run_validation(o);
            int                    failed = 0;
            for(const auto& r : rep.results) {
                std::cout << format_result(r) << '\n';
                failed += !r.passed;
            }
            std::cout << fmt::format("{} of {} criteria passed\n", rep.results.size() - failed, rep.results.size());
            return rep.all_passed() ? kExitOk : kExitValidation;
        }
        if(*replica) return replica_predict(rp, tau, subleading);
        if(*fsweep) return filter_sweep(filter_flags);
        if(*tsweep) return time_sweep(time_flags, t_max, t_steps, t_site);
        if(*esweep) return entropy_sweep_cmd(entropy_flags, e_region, e_ns);
    } catch(const CapacityError& e) {
        std::cerr << "capacity error: " << e.what() << '\n';
        return kExitCapacity;
    } catch(const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch(const DomainError& e) {
        std::cerr << "invalid parameter: " << e.what() << '\n';
        return kExitUsage;
    } catch(const ShapeError& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kExitUsage;
    } catch(const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    }
    return kExitUsage;
}
