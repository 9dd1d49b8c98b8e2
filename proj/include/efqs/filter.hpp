#pragma once

#include "efqs/spectral.hpp"
#include "efqs/spin_core.hpp"

#include <optional>
#include <vector>

namespace efqs {

/// Gaussian filter exp(-(H - E0)^2 tau^2 / 4). `center` defaults to <H>_0 of the state it acts on.
struct FilterKernel {
    double                tau = 0.0;
    std::optional<double> center;
};

struct EnergyMoments {
    double mean;
    /// sum_k w_k (E_k - center)^2
    double second_moment;
};

/// Energy distribution |<E_k|psi_0>|^2 of the bound initial state.
struct OverlapSpectrum {
    std::vector<double> energies;
    std::vector<double> weights;
    double              mean = 0.0;
    double              variance = 0.0;
    /// variance / L
    double eps2 = 0.0;

    double skewness() const;
    double excess_kurtosis() const;

    struct Bin {
        double lo, hi, weight;
    };
    /// Weight per bin over [min E, max E].
    std::vector<Bin> histogram(int bins) const;
};

/// Trapezoid grid for the Fourier representation: t in [-window_factor * tau, window_factor * tau].
struct FourierGrid {
    double window_factor = 6.0;
    int    points        = 4001;
};

enum class BackendKind { exact, iterative, fourier };

struct FilterBackend {
    BackendKind kind  = BackendKind::exact;
    double      dtau  = 0.05;
    FourierGrid grid  = {};
};

const char* backend_name(BackendKind k);
BackendKind parse_backend(const std::string& s);

/// c_k <- c_k exp(-(E_k - E0)^2 tau^2 / 4), renormalized. Throws DegenerateFilterError if every
/// filtered amplitude is below 1e-300.
PureState apply_gaussian_filter(const SpectralData& spec, const PureState& state0, const FilterKernel& kernel);

EnergyMoments energy_moments(const SpectralData& spec, const PureState& state, double center);

/// 1 / (tau^2 + 1/(eps2 V))
double variance_prediction(double eps2, int V, double tau);

OverlapSpectrum overlap_distribution(const SpectralData& spec);

/// Applies (1 - (H - E0)^2 dtau^2 / 4) N = (tau/dtau)^2 times (rounded) with renormalization after
/// every step, E0 = <H>_0. Warns when (tau/dtau)^2 is not an integer. Throws DivergenceError when
/// the Pauli-coefficient bound on |H - E0| times dtau/2 reaches 1.
PureState iterative_filter(const HermitianOperator& H, const PureState& state0, double tau, double dtau);

/// Trapezoid evaluation of int dt exp(-t^2/tau^2) exp(-i(H - E0)t) |psi_0>, renormalized.
/// Warns when exp(-T^2/tau^2) > 1e-8 and throws CoverageError if the result then falls below
/// fidelity 1 - 1e-6 with the exact filter.
PureState fourier_filter(const SpectralData& spec, const PureState& state0, const FilterKernel& kernel, const FourierGrid& grid = {});

/// Dispatches to one of the three backends. `H` is needed by the iterative backend only.
PureState filter_state(const SpectralData& spec, const HermitianOperator& H, const PureState& state0, double tau,
                       const FilterBackend& backend);

} // namespace efqs
