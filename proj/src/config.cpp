#include "efqs/config.hpp"

#include "efqs/errors.hpp"
#include "efqs/quadrature.hpp"
#include "efqs/result_table.hpp"

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <fmt/format.h>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

namespace efqs {

namespace pt = boost::property_tree;

namespace {

std::string trim(std::string s) {
    boost::algorithm::trim(s);
    return s;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    boost::algorithm::split(parts, s, [sep](char c) { return c == sep; });
    std::vector<std::string> out;
    for(auto& p : parts) {
        auto t = trim(p);
        if(!t.empty()) out.push_back(std::move(t));
    }
    return out;
}

class Reader {
public:
    Reader(const pt::ptree& tree, std::string origin) : tree_(tree), origin_(std::move(origin)) {}

    [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
        throw ConfigError(fmt::format("{}: [{}]: {}", origin_, key, msg));
    }

    std::optional<std::string> raw(const std::string& section, const std::string& key) {
        used_.insert(section + "." + key);
        const auto sec = tree_.get_child_optional(section);
        if(!sec) return std::nullopt;
        const auto v = sec->get_optional<std::string>(key);
        if(!v) return std::nullopt;
        return trim(*v);
    }

    double number(const std::string& section, const std::string& key, double fallback) {
        const auto v = raw(section, key);
        if(!v) return fallback;
        return parse_double(section + "." + key, *v);
    }

    int integer(const std::string& section, const std::string& key, int fallback) {
        const auto v = raw(section, key);
        if(!v) return fallback;
        return parse_int(section + "." + key, *v);
    }

    double parse_double(const std::string& where, const std::string& s) const {
        try {
            std::size_t pos = 0;
            const double d = std::stod(s, &pos);
            if(pos != s.size()) throw std::invalid_argument(s);
            return d;
        } catch(const std::logic_error&) {
            fail(where, fmt::format("'{}' is not a number", s));
        }
    }

    int parse_int(const std::string& where, const std::string& s) const {
        int        v   = 0;
        const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if(res.ec != std::errc{} || res.ptr != s.data() + s.size()) fail(where, fmt::format("'{}' is not an integer", s));
        return v;
    }

    void reject_unknown() const {
        for(const auto& [section, body] : tree_) {
            if(body.empty() && !body.data().empty()) fail(section, "key outside any section");
            for(const auto& [key, value] : body) {
                if(!used_.count(section + "." + key)) fail(section + "." + key, "unknown key");
            }
        }
    }

    const std::string& origin() const { return origin_; }

private:
    const pt::ptree&      tree_;
    std::string           origin_;
    std::set<std::string> used_;
};

bool parse_bool(const Reader& r, const std::string& where, const std::string& s) {
    const auto l = boost::algorithm::to_lower_copy(s);
    if(l == "true" || l == "yes" || l == "1" || l == "on") return true;
    if(l == "false" || l == "no" || l == "0" || l == "off") return false;
    r.fail(where, fmt::format("'{}' is not a boolean", s));
}

std::pair<std::string, std::string> split_pair(const Reader& r, const std::string& where, const std::string& item, char sep) {
    const auto parts = split(item, sep);
    if(parts.size() != 2 || std::count(item.begin(), item.end(), sep) != 1)
        r.fail(where, fmt::format("'{}' should have the form A{}B", item, sep));
    return {parts[0], parts[1]};
}

} // namespace

// ---------------------------------------------------------------- sites and regions

int resolve_site(const std::string& expr_in, int L) {
    const std::string expr = trim(expr_in);
    static const std::regex plain(R"(^\d+$)");
    static const std::regex affine(R"(^(\d*)L(?:/(\d+))?(?:([+-])(\d+))?$)");
    long long   value = 0;
    std::smatch m;
    if(std::regex_match(expr, plain)) {
        value = std::stoll(expr);
    } else if(std::regex_match(expr, m, affine)) {
        const long long a = m[1].length() ? std::stoll(m[1].str()) : 1;
        const long long b = m[2].matched ? std::stoll(m[2].str()) : 1;
        if(b == 0) throw ConfigError(fmt::format("site '{}' divides by zero", expr));
        if((a * L) % b != 0) throw ConfigError(fmt::format("site '{}' is not an integer at L = {}", expr, L));
        value = a * L / b;
        if(m[3].matched) value += (m[3].str() == "+" ? 1 : -1) * std::stoll(m[4].str());
    } else {
        throw ConfigError(fmt::format("cannot parse site '{}' (use an integer or aL/b+-c)", expr));
    }
    if(value < 1 || value > L) throw ConfigError(fmt::format("site '{}' = {} lies outside [1, {}]", expr, value, L));
    return static_cast<int>(value);
}

Region resolve_region(const std::string& expr, int L) {
    std::vector<int> sites;
    const auto       items = split(expr, ',');
    if(items.empty()) throw ConfigError(fmt::format("empty region '{}'", expr));
    for(const auto& item : items) {
        const auto colon = item.find(':');
        if(colon == std::string::npos) {
            sites.push_back(resolve_site(item, L));
            continue;
        }
        const int a = resolve_site(item.substr(0, colon), L);
        const int b = resolve_site(item.substr(colon + 1), L);
        if(a > b) throw ConfigError(fmt::format("range '{}' is descending at L = {}", item, L));
        for(int s = a; s <= b; ++s) sites.push_back(s);
    }
    std::sort(sites.begin(), sites.end());
    if(std::adjacent_find(sites.begin(), sites.end()) != sites.end())
        throw ConfigError(fmt::format("region '{}' repeats a site at L = {}", expr, L));
    return Region(L, std::move(sites));
}

// ---------------------------------------------------------------- ScenarioConfig

std::vector<double> ScenarioConfig::taus() const { return linspace(tau_start, tau_stop, tau_steps); }

HamiltonianSpec ScenarioConfig::hamiltonian(int L) const {
    HamiltonianSpec s;
    s.J        = J;
    s.h_x      = hx;
    s.h_z      = hz;
    s.L        = L;
    s.boundary = boundary;
    return s;
}

SitePattern ScenarioConfig::site_pattern() const {
    if(pattern == "neel") return SitePattern::neel();
    if(pattern == "yplus") return SitePattern::yplus();
    throw ConfigError(fmt::format("{}: [state.pattern]: unknown pattern '{}' (expected neel | yplus)", source, pattern));
}

bool ScenarioConfig::has_measurements() const {
    return !observables.empty() || !correlators.empty() || !entropy_regions.empty() || !mutual_info.empty() || variance;
}

void ScenarioConfig::validate() const {
    auto fail = [&](const std::string& key, const std::string& msg) { throw ConfigError(fmt::format("{}: [{}]: {}", source, key, msg)); };
    if(Ls.empty()) fail("model.L", "no system sizes");
    for(int L : Ls) {
        try {
            hamiltonian(L).validate();
        } catch(const Error& e) {
            fail("model.L", e.what());
        }
    }
    site_pattern();
    if(tau_steps < 1) fail("filter.tau_steps", fmt::format("must be >= 1, got {}", tau_steps));
    if(tau_start < 0.0) fail("filter.tau_start", "must be >= 0");
    if(tau_steps > 1 && !(tau_stop > tau_start)) fail("filter.tau_stop", "tau grid must ascend");
    if(!(backend.dtau > 0.0)) fail("filter.dtau", "must be positive");
    if(backend.grid.points < 3) fail("filter.points", "need at least 3 quadrature points");
    if(!(backend.grid.window_factor > 0.0)) fail("filter.window_factor", "must be positive");
    if(!(series_dt > 0.0)) fail("measurements.series_dt", "must be positive");
    if(workers < 1) fail("output.workers", "must be >= 1");
    for(double n : entropy_ns)
        if(!(n > 0.0)) fail("measurements.entropy_n", fmt::format("Renyi index {} must be positive", n));

    for(int L : Ls) {
        auto guard = [&](const std::string& key, auto&& fn) {
            try {
                fn();
            } catch(const Error& e) {
                fail(key, e.what());
            }
        };
        for(const auto& o : observables) guard("measurements.observables", [&] { resolve_site(o.site, L); });
        for(const auto& [a, b] : correlators)
            guard("measurements.correlators", [&] {
                if(resolve_site(a, L) == resolve_site(b, L)) throw ConfigError(fmt::format("pair {},{} uses one site twice at L = {}", a, b, L));
            });
        for(const auto& r : entropy_regions) guard("measurements.entropy_regions", [&] { resolve_region(r, L); });
        for(const auto& [a, b] : mutual_info)
            guard("measurements.mutual_info", [&] {
                if(!resolve_region(a, L).disjoint(resolve_region(b, L)))
                    throw ConfigError(fmt::format("regions {} and {} overlap at L = {}", a, b, L));
            });
    }
}

std::string ScenarioConfig::canonical() const {
    std::string out;
    auto        line = [&](const std::string& k, const std::string& v) { out += k + "=" + v + "\n"; };
    line("J", format_double(J));
    line("hx", format_double(hx));
    line("hz", format_double(hz));
    std::string ls;
    for(int L : Ls) ls += std::to_string(L) + ",";
    line("L", ls);
    line("boundary", boundary == Boundary::open ? "open" : "periodic");
    line("pattern", pattern);
    line("tau", format_double(tau_start) + "," + format_double(tau_stop) + "," + std::to_string(tau_steps));
    line("backend", backend_name(backend.kind));
    line("dtau", format_double(backend.dtau));
    line("window", format_double(backend.grid.window_factor) + "," + std::to_string(backend.grid.points));
    for(const auto& o : observables) line("observable", std::string(1, axis_name(o.axis)) + "@" + o.site);
    for(const auto& [a, b] : correlators) line("correlator", a + "," + b);
    line("correlator_axis", std::string(1, axis_name(correlator_axis)));
    line("series_dt", format_double(series_dt));
    for(const auto& r : entropy_regions) line("entropy_region", r);
    std::string ns;
    for(double n : entropy_ns) ns += format_double(n) + ",";
    line("entropy_n", ns);
    for(const auto& [a, b] : mutual_info) line("mutual_info", a + "|" + b);
    line("variance", variance ? "true" : "false");
    return out;
}

std::uint64_t fnv1a(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for(unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string ScenarioConfig::hash() const { return fmt::format("{:016x}", fnv1a(canonical())); }

ScenarioConfig parse_config(const std::string& text, const std::string& origin) {
    pt::ptree tree;
    try {
        std::istringstream in(text);
        pt::read_ini(in, tree);
    } catch(const pt::ini_parser_error& e) {
        throw ConfigError(fmt::format("{}: line {}: {}", origin, e.line(), e.message()));
    }
    Reader         r(tree, origin);
    ScenarioConfig c;
    c.source = origin;

    c.J  = r.number("model", "J", c.J);
    c.hx = r.number("model", "hx", c.hx);
    c.hz = r.number("model", "hz", c.hz);
    if(const auto v = r.raw("model", "L")) {
        c.Ls.clear();
        for(const auto& item : split(*v, ',')) c.Ls.push_back(r.parse_int("model.L", item));
    }
    if(const auto v = r.raw("model", "boundary")) {
        if(*v == "open") c.boundary = Boundary::open;
        else if(*v == "periodic") c.boundary = Boundary::periodic;
        else r.fail("model.boundary", fmt::format("'{}' (expected open | periodic)", *v));
    }
    if(const auto v = r.raw("state", "pattern")) c.pattern = *v;

    c.tau_start = r.number("filter", "tau_start", c.tau_start);
    c.tau_stop  = r.number("filter", "tau_stop", c.tau_start);
    c.tau_steps = r.integer("filter", "tau_steps", c.tau_steps);
    if(const auto v = r.raw("filter", "backend")) {
        try {
            c.backend.kind = parse_backend(*v);
        } catch(const ConfigError& e) {
            r.fail("filter.backend", e.what());
        }
    }
    c.backend.dtau               = r.number("filter", "dtau", c.backend.dtau);
    c.backend.grid.window_factor = r.number("filter", "window_factor", c.backend.grid.window_factor);
    c.backend.grid.points        = r.integer("filter", "points", c.backend.grid.points);

    if(const auto v = r.raw("measurements", "observables")) {
        for(const auto& item : split(*v, ';')) {
            const auto [axis, site] = split_pair(r, "measurements.observables", item, '@');
            if(axis.size() != 1) r.fail("measurements.observables", fmt::format("axis '{}' should be x, y or z", axis));
            try {
                c.observables.push_back({parse_axis(axis[0]), site});
            } catch(const Error& e) {
                r.fail("measurements.observables", e.what());
            }
        }
    }
    if(const auto v = r.raw("measurements", "correlators"))
        for(const auto& item : split(*v, ';')) c.correlators.push_back(split_pair(r, "measurements.correlators", item, ','));
    if(const auto v = r.raw("measurements", "correlator_axis")) {
        if(v->size() != 1) r.fail("measurements.correlator_axis", fmt::format("'{}' should be x, y or z", *v));
        try {
            c.correlator_axis = parse_axis((*v)[0]);
        } catch(const Error& e) {
            r.fail("measurements.correlator_axis", e.what());
        }
    }
    c.series_dt = r.number("measurements", "series_dt", c.series_dt);
    if(const auto v = r.raw("measurements", "entropy_regions")) c.entropy_regions = split(*v, ';');
    if(const auto v = r.raw("measurements", "entropy_n")) {
        c.entropy_ns.clear();
        for(const auto& item : split(*v, ',')) c.entropy_ns.push_back(r.parse_double("measurements.entropy_n", item));
    }
    if(const auto v = r.raw("measurements", "mutual_info"))
        for(const auto& item : split(*v, ';')) c.mutual_info.push_back(split_pair(r, "measurements.mutual_info", item, '|'));
    if(const auto v = r.raw("measurements", "variance")) c.variance = parse_bool(r, "measurements.variance", *v);

    if(const auto v = r.raw("output", "dir")) c.output_dir = *v;
    c.workers = r.integer("output", "workers", c.workers);

    r.reject_unknown();
    c.validate();
    return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
    std::ifstream f(path);
    if(!f) throw ConfigError(fmt::format("cannot read config '{}'", path.string()));
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str(), path.string());
}

} // namespace efqs
