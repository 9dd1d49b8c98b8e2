#include "efqs/filter.hpp"

#include "efqs/errors.hpp"
#include "efqs/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

namespace efqs {

const char* backend_name(BackendKind k) {
    switch(k) {
        case BackendKind::exact: return "exact";
        case BackendKind::iterative: return "iterative";
        case BackendKind::fourier: return "fourier";
    }
    return "?";
}

BackendKind parse_backend(const std::string& s) {
    if(s == "exact") return BackendKind::exact;
    if(s == "iterative") return BackendKind::iterative;
    if(s == "fourier") return BackendKind::fourier;
    throw ConfigError(fmt::format("unknown filter backend '{}' (expected exact | iterative | fourier)", s));
}

namespace {

void check_tau(double tau) {
    if(!(tau >= 0.0) || !std::isfinite(tau)) throw DomainError(fmt::format("filter time must be finite and >= 0, got {}", tau));
}

double mean_energy(const Eigen::VectorXd& energies, const Eigen::VectorXcd& c) {
    return c.cwiseAbs2().dot(energies) / c.squaredNorm();
}

} // namespace

PureState apply_gaussian_filter(const SpectralData& spec, const PureState& state0, const FilterKernel& kernel) {
    check_tau(kernel.tau);
    const Eigen::VectorXcd c = spec.coefficients(state0);
    if(kernel.tau == 0.0) return state0;
    const Eigen::VectorXd& E      = spec.eigenvalues();
    const double           center = kernel.center.value_or(mean_energy(E, c));
    const double           a      = kernel.tau * kernel.tau / 4.0;
    Eigen::VectorXcd       out(c.size());
    for(Eigen::Index k = 0; k < c.size(); ++k) {
        const double d = E[k] - center;
        out[k]         = c[k] * std::exp(-a * d * d);
    }
    if(out.cwiseAbs().maxCoeff() < 1e-300)
        throw DegenerateFilterError(fmt::format("all filtered amplitudes underflow at tau = {}", kernel.tau));
    return PureState::normalized(state0.sites(), spec.from_eigenbasis(out));
}

EnergyMoments energy_moments(const SpectralData& spec, const PureState& state, double center) {
    const Eigen::VectorXd  w = spec.coefficients(state).cwiseAbs2();
    const Eigen::VectorXd& E = spec.eigenvalues();
    const double           total = w.sum();
    const double           mean  = w.dot(E) / total;
    const double           m2    = w.dot((E.array() - center).square().matrix()) / total;
    return {mean, m2};
}

double variance_prediction(double eps2, int V, double tau) {
    if(!(eps2 > 0.0)) throw DomainError(fmt::format("eps2 must be positive, got {}", eps2));
    if(V < 1) throw DomainError(fmt::format("volume must be >= 1, got {}", V));
    check_tau(tau);
    return 1.0 / (tau * tau + 1.0 / (eps2 * V));
}

double OverlapSpectrum::skewness() const {
    if(variance <= 0.0) return 0.0;
    double m3 = 0.0;
    for(std::size_t k = 0; k < energies.size(); ++k) m3 += weights[k] * std::pow(energies[k] - mean, 3);
    return m3 / std::pow(variance, 1.5);
}

double OverlapSpectrum::excess_kurtosis() const {
    if(variance <= 0.0) return 0.0;
    double m4 = 0.0;
    for(std::size_t k = 0; k < energies.size(); ++k) m4 += weights[k] * std::pow(energies[k] - mean, 4);
    return m4 / (variance * variance) - 3.0;
}

std::vector<OverlapSpectrum::Bin> OverlapSpectrum::histogram(int bins) const {
    if(bins < 1) throw DomainError("histogram needs at least one bin");
    const auto [lo_it, hi_it] = std::minmax_element(energies.begin(), energies.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    const double width = (hi > lo) ? (hi - lo) / bins : 1.0;
    std::vector<Bin> out;
    for(int b = 0; b < bins; ++b) out.push_back({lo + b * width, lo + (b + 1) * width, 0.0});
    for(std::size_t k = 0; k < energies.size(); ++k) {
        auto b = static_cast<int>((energies[k] - lo) / width);
        b      = std::clamp(b, 0, bins - 1);
        out[static_cast<std::size_t>(b)].weight += weights[k];
    }
    return out;
}

OverlapSpectrum overlap_distribution(const SpectralData& spec) {
    const Eigen::VectorXd  w = spec.overlaps().cwiseAbs2();
    const Eigen::VectorXd& E = spec.eigenvalues();
    OverlapSpectrum        out;
    out.energies.assign(E.data(), E.data() + E.size());
    out.weights.assign(w.data(), w.data() + w.size());
    out.mean     = w.dot(E);
    out.variance = w.dot(E.cwiseAbs2()) - out.mean * out.mean;
    out.eps2     = out.variance / spec.sites();
    return out;
}

namespace {

// Row-sum bound on the spectral radius of a dense operator.
double dense_norm_bound(const Eigen::MatrixXcd& m) { return m.cwiseAbs().rowwise().sum().maxCoeff(); }

} // namespace

PureState iterative_filter(const HermitianOperator& H, const PureState& state0, double tau, double dtau) {
    check_tau(tau);
    if(!(dtau > 0.0)) throw DomainError(fmt::format("dtau must be positive, got {}", dtau));
    if(tau == 0.0) return state0;

    const HermitianOperator K     = shift_hamiltonian(H, state0);
    const double            bound = K.has_pauli() ? K.pauli().coefficient_norm() : dense_norm_bound(K.dense());
    if(bound * dtau / 2.0 >= 1.0)
        throw DivergenceError(fmt::format("dtau = {} too large: |H - E0| <= {:.6g} gives |E - E0| dtau / 2 up to {:.6g} >= 1", dtau, bound,
                                          bound * dtau / 2.0));

    const double ratio = (tau / dtau) * (tau / dtau);
    auto         steps = static_cast<long>(std::llround(ratio));
    if(steps < 1) steps = 1;
    if(std::abs(static_cast<double>(steps) - ratio) > 1e-9 * std::max(1.0, ratio))
        spdlog::warn("iterative filter: (tau/dtau)^2 = {:.12g} is not an integer, using N = {} (effective tau = {:.12g})", ratio, steps,
                     dtau * std::sqrt(static_cast<double>(steps)));

    const double     a = dtau * dtau / 4.0;
    Eigen::VectorXcd v = state0.amplitudes();
    for(long s = 0; s < steps; ++s) {
        v -= a * K.apply(K.apply(v));
        v.normalize();
    }
    return PureState::normalized(state0.sites(), std::move(v));
}

PureState fourier_filter(const SpectralData& spec, const PureState& state0, const FilterKernel& kernel, const FourierGrid& grid) {
    check_tau(kernel.tau);
    if(kernel.tau == 0.0) return state0;
    if(grid.points < 2 || !(grid.window_factor > 0.0)) throw DomainError("Fourier grid needs >= 2 points and a positive window");

    const Eigen::VectorXcd c      = spec.coefficients(state0);
    const Eigen::VectorXd& E      = spec.eigenvalues();
    const double           center = kernel.center.value_or(mean_energy(E, c));
    const double           tau    = kernel.tau;
    const double           T      = grid.window_factor * tau;
    const auto             times  = linspace(-T, T, grid.points);
    const auto             w      = trapezoid_weights(grid.points, times[1] - times[0]);

    std::vector<double> kernel_w(times.size());
    for(std::size_t m = 0; m < times.size(); ++m) kernel_w[m] = w[m] * std::exp(-times[m] * times[m] / (tau * tau));

    Eigen::VectorXcd out(c.size());
    for(Eigen::Index k = 0; k < c.size(); ++k) {
        const double d = E[k] - center;
        cplx         acc{0.0, 0.0};
        for(std::size_t m = 0; m < times.size(); ++m) acc += kernel_w[m] * cplx{std::cos(d * times[m]), -std::sin(d * times[m])};
        out[k] = c[k] * acc;
    }
    PureState result = PureState::normalized(state0.sites(), spec.from_eigenbasis(out));

    const double truncation = std::exp(-grid.window_factor * grid.window_factor);
    if(truncation > 1e-8) {
        spdlog::warn("Fourier filter: window {} tau leaves kernel tail exp(-T^2/tau^2) = {:.3g}", grid.window_factor, truncation);
        const double fid = fidelity(result, apply_gaussian_filter(spec, state0, kernel));
        if(fid < 1.0 - 1e-6)
            throw CoverageError(fmt::format("Fourier window {} tau too small: fidelity with the exact filter is {:.12g}", grid.window_factor, fid));
    }
    return result;
}

PureState filter_state(const SpectralData& spec, const HermitianOperator& H, const PureState& state0, double tau,
                       const FilterBackend& backend) {
    switch(backend.kind) {
        case BackendKind::exact: return apply_gaussian_filter(spec, state0, {tau, std::nullopt});
        case BackendKind::iterative: return iterative_filter(H, state0, tau, backend.dtau);
        case BackendKind::fourier: return fourier_filter(spec, state0, {tau, std::nullopt}, backend.grid);
    }
    throw DomainError("unknown filter backend");
}

} // namespace efqs
