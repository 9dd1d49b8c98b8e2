#include "efqs/dynamics.hpp"

#include "efqs/entanglement.hpp"
#include "efqs/errors.hpp"
#include "efqs/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <numbers>

namespace efqs {

namespace {

constexpr Eigen::Index kBatch = 64;

} // namespace

// ---------------------------------------------------------------- TimeSeries

void TimeSeries::validate() const {
    if(times.size() != values.size())
        throw ShapeError(fmt::format("series '{}' has {} times but {} values", label, times.size(), values.size()));
    if(times.size() < 2) throw ShapeError(fmt::format("series '{}' needs at least 2 points", label));
    const double h = times[1] - times[0];
    if(!(h > 0.0)) throw ShapeError(fmt::format("series '{}' is not ascending", label));
    for(std::size_t i = 1; i < times.size(); ++i) {
        if(std::abs((times[i] - times[i - 1]) - h) > 1e-12)
            throw ShapeError(fmt::format("series '{}' is not uniform near t = {}", label, times[i]));
    }
}

double TimeSeries::step() const {
    validate();
    return times[1] - times[0];
}

TimeSeries TimeSeries::even_extension() const {
    validate();
    if(std::abs(times.front()) > 1e-12) throw ShapeError(fmt::format("even extension of '{}' needs the grid to start at t = 0", label));
    TimeSeries  out{{}, {}, label};
    const auto  n = times.size();
    out.times.reserve(2 * n - 1);
    out.values.reserve(2 * n - 1);
    for(std::size_t i = n - 1; i >= 1; --i) {
        out.times.push_back(-times[i]);
        out.values.push_back(values[i]);
    }
    out.times.insert(out.times.end(), times.begin(), times.end());
    out.values.insert(out.values.end(), values.begin(), values.end());
    return out;
}

std::vector<double> time_grid(double t_max, int steps) {
    if(steps < 2) throw DomainError(fmt::format("time grid needs at least 2 steps, got {}", steps));
    if(!(t_max > 0.0)) throw DomainError(fmt::format("time grid needs t_max > 0, got {}", t_max));
    return linspace(0.0, t_max, steps);
}

// ---------------------------------------------------------------- evolution

PureState evolve(const SpectralData& spec, const PureState& state, double t) {
    Eigen::VectorXcd c = spec.coefficients(state);
    const auto&      e = spec.eigenvalues();
    for(Eigen::Index k = 0; k < c.size(); ++k) c[k] *= std::polar(1.0, -e[k] * t);
    return PureState::normalized(state.sites(), spec.from_eigenbasis(c));
}

void for_each_evolved(const SpectralData& spec, const PureState& state0, const std::vector<double>& times,
                      const std::function<void(std::size_t, const PureState&)>& visit) {
    const Eigen::VectorXcd c = spec.coefficients(state0);
    const auto&            e = spec.eigenvalues();
    for(std::size_t start = 0; start < times.size(); start += kBatch) {
        const auto       count = std::min<std::size_t>(kBatch, times.size() - start);
        Eigen::MatrixXcd block(c.size(), static_cast<Eigen::Index>(count));
        for(std::size_t j = 0; j < count; ++j) {
            const double t = times[start + j];
            for(Eigen::Index k = 0; k < c.size(); ++k) block(k, static_cast<Eigen::Index>(j)) = c[k] * std::polar(1.0, -e[k] * t);
        }
        const Eigen::MatrixXcd states = spec.from_eigenbasis(block);
        for(std::size_t j = 0; j < count; ++j)
            visit(start + j, PureState::normalized(state0.sites(), states.col(static_cast<Eigen::Index>(j))));
    }
}

std::vector<TimeSeries> observable_series(const SpectralData& spec, const PureState& state0, const std::vector<HermitianOperator>& ops,
                                          double t_max, int steps, const std::vector<std::string>& labels) {
    if(!labels.empty() && labels.size() != ops.size()) throw ShapeError(fmt::format("{} labels for {} observables", labels.size(), ops.size()));
    const auto              times = time_grid(t_max, steps);
    std::vector<TimeSeries> out(ops.size());
    for(std::size_t o = 0; o < ops.size(); ++o) {
        out[o].times = times;
        out[o].values.resize(times.size());
        out[o].label = labels.empty() ? fmt::format("op{}", o) : labels[o];
    }
    for_each_evolved(spec, state0, times, [&](std::size_t i, const PureState& psi) {
        for(std::size_t o = 0; o < ops.size(); ++o) out[o].values[i] = expectation(psi, ops[o]);
    });
    return out;
}

TimeSeries observable_series(const SpectralData& spec, const PureState& state0, const HermitianOperator& op, double t_max, int steps,
                             std::string label) {
    auto out = observable_series(spec, state0, std::vector<HermitianOperator>{op}, t_max, steps,
                                 label.empty() ? std::vector<std::string>{} : std::vector<std::string>{std::move(label)});
    return std::move(out.front());
}

TimeSeries twist_series(const SpectralData& spec, const PureState& state0, const Region& region, int n, double t_max, int steps) {
    TimeSeries out{time_grid(t_max, steps), {}, fmt::format("Tr rho^{}({})", n, region.to_string())};
    out.values.resize(out.times.size());
    for_each_evolved(spec, state0, out.times, [&](std::size_t i, const PureState& psi) { out.values[i] = rdm_moment(psi, region, n); });
    return out;
}

// ---------------------------------------------------------------- Loschmidt echo

cplx loschmidt_echo(const SpectralData& spec, double t) {
    const auto& c = spec.overlaps();
    const auto& e = spec.eigenvalues();
    cplx        acc{0.0, 0.0};
    for(Eigen::Index k = 0; k < c.size(); ++k) acc += std::norm(c[k]) * std::polar(1.0, -e[k] * t);
    return acc;
}

EchoRate log_echo_rate(const SpectralData& spec, double t_max, int steps) {
    const auto& c = spec.overlaps();
    const auto& e = spec.eigenvalues();
    EchoRate    out;
    out.times = time_grid(t_max, steps);
    const double h = out.times[1] - out.times[0];
    double       phase = 0.0;
    double       prev_arg = 0.0;
    for(std::size_t i = 0; i < out.times.size(); ++i) {
        const double t = out.times[i];
        cplx         echo{0.0, 0.0}, deriv{0.0, 0.0};
        for(Eigen::Index k = 0; k < c.size(); ++k) {
            const cplx term = std::norm(c[k]) * std::polar(1.0, -e[k] * t);
            echo += term;
            deriv += cplx{0.0, -e[k]} * term;
        }
        const double mod = std::abs(echo);
        if(mod < 1e-300) throw NumericalError(fmt::format("Loschmidt echo underflows at t = {}; F(t) is undefined there", t));
        const double arg = std::arg(echo);
        if(i > 0) {
            // d arg / dt = Im(echo' / echo)
            const double predicted = h * (deriv / echo).imag();
            if(std::abs(predicted) > std::numbers::pi)
                throw NumericalError(fmt::format("echo phase moves by {:.3g} near t = {}; refine the time grid", predicted, t));
            phase += std::remainder(arg - prev_arg, 2.0 * std::numbers::pi);
        }
        prev_arg = arg;
        out.echo.push_back(echo);
        out.rate.push_back(cplx{std::log(mod), phase} / static_cast<double>(spec.sites()));
    }
    return out;
}

// ---------------------------------------------------------------- kernel averages

namespace {

double interpolate(const TimeSeries& s, double t) {
    const double h = s.times[1] - s.times[0];
    const double tol = 1e-9 * std::max(1.0, std::abs(t));
    if(t < s.times.front() - tol || t > s.times.back() + tol)
        throw CoverageError(fmt::format("series '{}' covers [{}, {}], t = {} requested", s.label, s.times.front(), s.times.back(), t));
    const double x = std::clamp((t - s.times.front()) / h, 0.0, static_cast<double>(s.times.size() - 1));
    const auto   i = std::min(static_cast<std::size_t>(x), s.times.size() - 2);
    const double u = x - static_cast<double>(i);
    return (1.0 - u) * s.values[i] + u * s.values[i + 1];
}

} // namespace

double gaussian_average(const TimeSeries& series, double tau, double t, double n, Symmetry sym) {
    if(tau < 0.0) throw DomainError(fmt::format("filter time must be >= 0, got {}", tau));
    if(!(n > 0.0)) throw DomainError(fmt::format("kernel power must be > 0, got {}", n));
    const TimeSeries s = sym == Symmetry::even ? series.even_extension() : series;
    s.validate();
    if(tau == 0.0) return interpolate(s, t);

    const double half = 4.0 * tau / std::sqrt(n);
    const double tol  = 1e-9 * std::max(1.0, std::abs(t) + half);
    if(s.times.front() > t - half + tol || s.times.back() < t + half - tol)
        throw CoverageError(fmt::format("series '{}' covers [{}, {}] but the kernel at t = {}, tau = {} needs [{}, {}]", s.label, s.times.front(),
                                        s.times.back(), t, tau, t - half, t + half));
    const auto   w    = trapezoid_weights(static_cast<int>(s.times.size()), s.times[1] - s.times[0]);
    double       num = 0.0, den = 0.0;
    const double c = 2.0 * n / (tau * tau);
    for(std::size_t i = 0; i < s.times.size(); ++i) {
        const double d = s.times[i] - t;
        if(std::abs(d) > half + tol) continue;
        const double k = w[i] * std::exp(-c * d * d);
        num += k * s.values[i];
        den += k;
    }
    // kernel narrower than the grid spacing
    if(!(den > 0.0)) return interpolate(s, t);
    return num / den;
}

double filtered_expectation_prediction(const TimeSeries& series, double tau, double t, Symmetry sym) {
    return gaussian_average(series, tau, t, 1.0, sym);
}

double connected_correlator_prediction(const TimeSeries& series_x, double tau, Symmetry sym, const std::optional<TimeSeries>& series_y) {
    const TimeSeries& y = series_y ? *series_y : series_x;
    series_x.validate();
    y.validate();
    if(y.times.size() != series_x.times.size() ||
       std::abs(y.times.front() - series_x.times.front()) > 1e-12 || std::abs(y.times.back() - series_x.times.back()) > 1e-12)
        throw ShapeError(fmt::format("series '{}' and '{}' live on different grids", series_x.label, y.label));
    TimeSeries xy{series_x.times, std::vector<double>(series_x.values.size()), series_x.label + "*" + y.label};
    for(std::size_t i = 0; i < xy.values.size(); ++i) xy.values[i] = series_x.values[i] * y.values[i];
    return gaussian_average(xy, tau, 0.0, 1.0, sym) - gaussian_average(series_x, tau, 0.0, 1.0, sym) * gaussian_average(y, tau, 0.0, 1.0, sym);
}

DensityMatrix time_averaged_density_matrix(const SpectralData& spec, const PureState& state0, double tau, const Region& region,
                                           const AveragingGrid& grid) {
    if(tau < 0.0) throw DomainError(fmt::format("filter time must be >= 0, got {}", tau));
    if(tau == 0.0) return reduced_density_matrix(state0, region);
    if(grid.half_window_factor < 4.0)
        throw CoverageError(fmt::format("averaging window of {} tau does not cover the kernel (need >= 4 tau)", grid.half_window_factor));
    if(!(grid.max_spacing > 0.0)) throw DomainError("averaging grid spacing must be positive");

    const double half  = grid.half_window_factor * tau;
    int          count = static_cast<int>(std::ceil(2.0 * half / grid.max_spacing)) + 1;
    if(count % 2 == 0) ++count;
    const auto   times = linspace(-half, half, count);
    const auto   trap  = trapezoid_weights(count, times[1] - times[0]);
    std::vector<double> w(times.size());
    double               total = 0.0;
    for(std::size_t i = 0; i < times.size(); ++i) {
        w[i] = trap[i] * std::exp(-2.0 * times[i] * times[i] / (tau * tau));
        total += w[i];
    }

    const auto       dim = Eigen::Index{1} << region.size();
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(dim, dim);
    for_each_evolved(spec, state0, times, [&](std::size_t i, const PureState& psi) {
        acc += (w[i] / total) * reduced_density_matrix(psi, region).matrix();
    });
    Eigen::MatrixXcd rho = 0.5 * (acc + acc.adjoint());
    rho /= rho.trace().real();
    return DensityMatrix(region, std::move(rho));
}

// ---------------------------------------------------------------- correlators

double connected_correlator(const PureState& state, const HermitianOperator& op_x, const HermitianOperator& op_y) {
    const auto sx = op_x.support();
    const auto sy = op_y.support();
    if(sx && sy && (*sx & *sy) != 0) throw DomainError("connected correlator needs observables on disjoint sites");
    const Eigen::VectorXcd xv = op_x.apply(state.amplitudes());
    const Eigen::VectorXcd yv = op_y.apply(state.amplitudes());
    const cplx             xy = xv.dot(yv);
    return xy.real() - expectation(state, op_x) * expectation(state, op_y);
}

} // namespace efqs
