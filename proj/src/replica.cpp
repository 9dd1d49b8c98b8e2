#include "efqs/replica.hpp"

#include "efqs/errors.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <numbers>
#include <numeric>
#include <spdlog/spdlog.h>

namespace efqs {

void ReplicaParams::validate() const {
    if(!(n > 0.0) || !std::isfinite(n)) throw DomainError(fmt::format("n must be positive and finite, got {}", n));
    if(!(eps2 > 0.0) || !std::isfinite(eps2)) throw DomainError(fmt::format("eps2 must be positive, got {}", eps2));
    if(!(f >= 0.0 && f <= 1.0)) throw DomainError(fmt::format("f = V_A/V must lie in [0, 1], got {}", f));
    if(!(Gamma_n >= 0.0)) throw DomainError(fmt::format("Gamma_n must be >= 0, got {}", Gamma_n));
    if(!(V > 0.0)) throw DomainError(fmt::format("V must be positive, got {}", V));
    if(!(area >= 0.0)) throw DomainError(fmt::format("area must be >= 0, got {}", area));
}

void ReplicaParams::validate_short_filter() const {
    validate();
    if(!(tau_tilde > 0.0) || !std::isfinite(tau_tilde))
        throw DomainError(fmt::format("tau_tilde must be positive, got {}; the tau = 0 state is the unfiltered one", tau_tilde));
}

int ReplicaParams::integer_n() const {
    if(!(n >= 1.0) || n != std::round(n) || n > 1e6) throw DomainError(fmt::format("n must be an integer >= 1, got {}", n));
    return static_cast<int>(n);
}

namespace {

struct Shape {
    double a;           // 2/tt^2 + eps2
    double x_minus_y;   // det M_1
    double x_plus_y;
    double x, y;
};

Shape shape(const ReplicaParams& p) {
    const double g = 2.0 / (p.tau_tilde * p.tau_tilde);
    Shape        s{};
    s.a         = g + p.eps2;
    s.x_minus_y = g * (g + 2.0 * p.eps2);
    s.x_plus_y  = s.a * s.a - p.eps2 * p.eps2 * (1.0 - 2.0 * p.f) * (1.0 - 2.0 * p.f);
    s.x         = s.a * s.a - p.eps2 * p.eps2 * ((1.0 - p.f) * (1.0 - p.f) + p.f * p.f);
    s.y         = 2.0 * p.eps2 * p.eps2 * p.f * (1.0 - p.f);
    return s;
}

/// 1 - s_k = 2 f (1-f)(1 - cos k) = 4 f (1-f) sin^2(k/2)
double one_minus_s(double f, int j, int n) {
    const double half = std::numbers::pi * j / n;
    return 4.0 * f * (1.0 - f) * std::sin(half) * std::sin(half);
}

/// log |x1^n - sign^n y1^n| squared, with x1^2 = (x + r)/2, y1^2 = y^2 / (4 x1^2), r = sqrt((x-y)(x+y)).
double log_closed(double x, double y, double x_minus_y, double x_plus_y, double n) {
    if(x_minus_y < 0.0 || x_plus_y < 0.0) throw DomainError(fmt::format("closed-form product needs x >= |y| (x = {}, y = {})", x, y));
    if(y == 0.0) return n * std::log(x);
    if(y < 0.0 && n != std::round(n)) throw DomainError("negative y is only defined for integer n");
    const double r     = std::sqrt(x_minus_y * x_plus_y);
    const double x1sq  = 0.5 * (x + r);
    const double y1sq  = y * y / (4.0 * x1sq);
    const double z     = 0.5 * n * std::log(x1sq / y1sq);
    const bool   odd_neg = y < 0.0 && static_cast<long long>(std::round(n)) % 2 != 0;
    // x1^n -+ y1^n = y1^n (e^z -+ 1)
    double log_bracket;
    if(odd_neg) log_bracket = z + std::log1p(std::exp(-z));
    else if(z > 30.0) log_bracket = z + std::log1p(-std::exp(-z));
    else log_bracket = std::log(std::expm1(z));
    return 2.0 * (0.5 * n * std::log(y1sq) + log_bracket);
}

} // namespace

MnMatrix build_Mn(const ReplicaParams& p) {
    p.validate_short_filter();
    const int    n = p.integer_n();
    const double a = 2.0 / (p.tau_tilde * p.tau_tilde) + p.eps2;
    MnMatrix     m = MnMatrix::Identity(2 * n, 2 * n) * a;
    for(int j = 0; j < n; ++j) {
        m(j, n + j) -= p.eps2 * (1.0 - p.f);
        m(n + j, j) -= p.eps2 * (1.0 - p.f);
        const int next = (j + 1) % n;
        m(j, n + next) -= p.eps2 * p.f;
        m(n + next, j) -= p.eps2 * p.f;
    }
    return m;
}

std::vector<double> Mn_eigenvalues(const ReplicaParams& p) {
    p.validate_short_filter();
    const int           n = p.integer_n();
    const double        g = 2.0 / (p.tau_tilde * p.tau_tilde);
    std::vector<double> out;
    out.reserve(2 * static_cast<std::size_t>(n));
    for(int j = 0; j < n; ++j) {
        const double d  = one_minus_s(p.f, j, n);
        const double rs = std::sqrt(1.0 - d);
        out.push_back(g + p.eps2 + p.eps2 * rs);
        // eps2 - eps2 sqrt(s) = eps2 (1 - s) / (1 + sqrt(s))
        out.push_back(g + p.eps2 * d / (1.0 + rs));
    }
    return out;
}

double det_Mn(const ReplicaParams& p) {
    const auto ev = Mn_eigenvalues(p);
    return std::accumulate(ev.begin(), ev.end(), 1.0, std::multiplies<>());
}

double log_det_Mn_continued(const ReplicaParams& p) {
    p.validate_short_filter();
    const Shape s = shape(p);
    return log_closed(s.x, s.y, s.x_minus_y, s.x_plus_y, p.n);
}

double det_Mn_continued(const ReplicaParams& p) { return std::exp(log_det_Mn_continued(p)); }

double trig_product(double x, double y, int n) {
    if(n < 1) throw DomainError(fmt::format("trigonometric product needs n >= 1, got {}", n));
    double prod = 1.0;
    for(int q = 0; q < n; ++q) prod *= x - std::cos(2.0 * std::numbers::pi * q / n) * y;
    return prod;
}

double trig_product_closed(double x, double y, double n) {
    if(!(n > 0.0)) throw DomainError(fmt::format("trigonometric product needs n > 0, got {}", n));
    return std::exp(log_closed(x, y, x - y, x + y, n));
}

double short_filter_entropy_delta(const ReplicaParams& p) {
    p.validate_short_filter();
    const Shape s = shape(p);
    const double log_m1 = std::log(s.x_minus_y);
    if(p.n == 1.0) {
        const double h  = kReplicaLimitStep;
        const double up = log_closed(s.x, s.y, s.x_minus_y, s.x_plus_y, 1.0 + h) - (1.0 + h) * log_m1;
        const double dn = log_closed(s.x, s.y, s.x_minus_y, s.x_plus_y, 1.0 - h) - (1.0 - h) * log_m1;
        return 0.5 * (up - dn) / (2.0 * h);
    }
    double log_ratio;
    if(p.n == std::round(p.n)) {
        // det M(k) / det M_1 = 1 + eps2^2 (1 - s_k) / det M_1, each factor >= 1
        const int n = p.integer_n();
        log_ratio   = 0.0;
        for(int j = 1; j < n; ++j) log_ratio += std::log1p(p.eps2 * p.eps2 * one_minus_s(p.f, j, n) / s.x_minus_y);
    } else {
        log_ratio = log_closed(s.x, s.y, s.x_minus_y, s.x_plus_y, p.n) - p.n * log_m1;
    }
    return log_ratio / (2.0 * (p.n - 1.0));
}

double s2_half_chain(double tau_tilde, double eps2) {
    if(!(tau_tilde >= 0.0)) throw DomainError(fmt::format("tau_tilde must be >= 0, got {}", tau_tilde));
    if(!(eps2 > 0.0)) throw DomainError(fmt::format("eps2 must be positive, got {}", eps2));
    const double u = eps2 * tau_tilde * tau_tilde;
    return std::log1p(0.5 * u) - 0.5 * std::log1p(u);
}

std::vector<double> Nn_eigenvalues(const ReplicaParams& p) {
    p.validate();
    const int           n = p.integer_n();
    std::vector<double> out;
    out.reserve(2 * static_cast<std::size_t>(n) - 1);
    for(int j = 0; j < n; ++j) {
        const double d  = one_minus_s(p.f, j, n);
        const double rs = std::sqrt(1.0 - d);
        out.push_back(p.eps2 * (1.0 + rs));
        if(j > 0) out.push_back(p.eps2 * d / (1.0 + rs));
    }
    return out;
}

double medium_entropy_prediction(const ReplicaParams& p, const TimeSeries& twist, double tau, Symmetry sym) {
    p.validate();
    const int n = p.integer_n();
    if(n < 2) throw DomainError(fmt::format("medium-filter prediction needs integer n >= 2, got {}", p.n));
    if(!(p.f > 0.0 && p.f < 1.0)) throw DomainError(fmt::format("medium-filter prediction needs 0 < f < 1, got {}", p.f));
    if(!(tau > 0.0)) throw DomainError(fmt::format("medium-filter prediction needs tau > 0, got {}", tau));

    const double avg = gaussian_average(twist, tau, 0.0, static_cast<double>(n), sym);
    if(!(avg > 0.0)) throw NumericalError(fmt::format("kernel-averaged twist is {}, expected positive", avg));
    const double nn   = static_cast<double>(n);
    double       logt = std::log(avg) + std::log(tau * std::sqrt(std::numbers::pi / (2.0 * nn))) - nn * std::log(tau * std::sqrt(std::numbers::pi / 2.0));
    logt += 0.5 * (1.0 - nn) * std::log(p.V / (2.0 * std::numbers::pi));
    for(double ev : Nn_eigenvalues(p)) logt -= 0.5 * std::log(ev);
    logt += 0.5 * nn * std::log(2.0 * p.eps2);
    return logt / (1.0 - nn);
}

double gmft_asymptotic(const ReplicaParams& p, double tau, bool subleading) {
    p.validate();
    if(!(tau > 0.0)) throw DomainError(fmt::format("g_mft needs tau > 0, got {}", tau));
    if(tau < 1.0 || tau > p.t_th) spdlog::warn("g_mft asymptotics evaluated at tau = {} outside [1, t_th = {}]", tau, p.t_th);
    if(p.n > 1.0) return p.n / (p.n - 1.0) * std::log(tau);
    const double extra = subleading ? std::log(tau) : 0.0;
    if(p.n == 1.0) return p.Gamma_n * p.area * tau / std::sqrt(2.0 * std::numbers::pi) + extra;
    return (1.0 - p.n) / (8.0 * p.n) * p.Gamma_n * p.Gamma_n * p.area * p.area * tau * tau + extra;
}

GrowthFit fit_growth_rate(const TimeSeries& twist, int n, double area, double V_A) {
    twist.validate();
    if(n < 2) throw DomainError(fmt::format("growth fit needs n >= 2, got {}", n));
    if(!(area > 0.0)) throw DomainError(fmt::format("growth fit needs area > 0, got {}", area));
    if(!(V_A > 0.0)) throw DomainError(fmt::format("growth fit needs V_A > 0, got {}", V_A));
    const std::size_t N = twist.values.size();
    std::vector<double> y(N), slope(N);
    for(std::size_t i = 0; i < N; ++i) {
        if(!(twist.values[i] > 0.0)) throw DomainError(fmt::format("twist series must be positive, got {} at t = {}", twist.values[i], twist.times[i]));
        y[i] = std::log(twist.values[i]);
    }
    const double h = twist.times[1] - twist.times[0];
    slope[0]       = (y[1] - y[0]) / h;
    slope[N - 1]   = (y[N - 1] - y[N - 2]) / h;
    for(std::size_t i = 1; i + 1 < N; ++i) slope[i] = (y[i + 1] - y[i - 1]) / (2.0 * h);

    const double nm1 = static_cast<double>(n - 1);
    GrowthFit    fit;
    double       max_abs = 0.0;
    for(double s : slope) max_abs = std::max(max_abs, std::abs(s));
    if(max_abs < 1e-12) {
        fit.plateau      = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(N);
        fit.s_n          = -fit.plateau / (nm1 * V_A);
        fit.intercept    = fit.plateau;
        fit.window_begin = fit.window_end = twist.times.front();
        fit.t_th         = 0.0;
        return fit;
    }

    std::size_t best_i = 0, best_len = 0;
    for(std::size_t i = 0; i < N; ++i) {
        double sum = 0.0, lo = 0.0, hi = -std::numeric_limits<double>::infinity();
        lo         = std::numeric_limits<double>::infinity();
        for(std::size_t j = i; j < N; ++j) {
            if(!(slope[j] < 0.0)) break;
            sum += slope[j];
            lo = std::min(lo, slope[j]);
            hi = std::max(hi, slope[j]);
            const std::size_t len  = j - i + 1;
            const double      mean = sum / static_cast<double>(len);
            if(len >= 3 && len > best_len && lo >= 1.1 * mean && hi <= 0.9 * mean) {
                best_i   = i;
                best_len = len;
            }
        }
    }
    if(best_len == 0) throw FitError(fmt::format("no decaying window of >= 3 points with slope constant within 10% in '{}' ({} points)", twist.label, N));
    const std::size_t end = best_i + best_len;   // one past the window
    if(end >= N)
        throw FitError(fmt::format("linear window of '{}' runs to the end of the series (t = {}); no plateau to read", twist.label, twist.times.back()));

    double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    for(std::size_t i = best_i; i < end; ++i) {
        st += twist.times[i];
        sy += y[i];
        stt += twist.times[i] * twist.times[i];
        sty += twist.times[i] * y[i];
    }
    const double m = static_cast<double>(best_len);
    fit.slope      = (m * sty - st * sy) / (m * stt - st * st);
    fit.intercept  = (sy - fit.slope * st) / m;
    fit.window_begin = twist.times[best_i];
    fit.window_end   = twist.times[end - 1];
    fit.plateau      = std::accumulate(y.begin() + static_cast<std::ptrdiff_t>(end), y.end(), 0.0) / static_cast<double>(N - end);
    fit.Gamma_n      = -fit.slope / (nm1 * area);
    fit.s_n          = -fit.plateau / (nm1 * V_A);
    fit.t_th         = (fit.plateau - fit.intercept) / fit.slope;
    return fit;
}

} // namespace efqs
