#pragma once

#include "efqs/density_matrix.hpp"
#include "efqs/region.hpp"
#include "efqs/spectral.hpp"
#include "efqs/spin_core.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace efqs {

/// Real-valued samples on an ascending uniform time grid.
struct TimeSeries {
    std::vector<double> times;
    std::vector<double> values;
    std::string         label;

    /// Throws ShapeError on length mismatch, fewer than 2 points, or spacing varying by more than 1e-12.
    void   validate() const;
    double step() const;

    /// Mirrors a series that starts at t = 0 onto [-t_max, t_max] with f(-t) = f(t).
    TimeSeries even_extension() const;
};

/// How samples at negative times are obtained by the kernel averages below.
enum class Symmetry {
    /// The series already spans the needed window on both sides.
    two_sided,
    /// f(-t) = f(t). Valid when H and the initial amplitudes are both real, since then
    /// psi(-t) = conj(psi(t)) and every real expectation value is even in t.
    even,
};

std::vector<double> time_grid(double t_max, int steps);

/// c_k -> c_k exp(-i E_k t).
PureState evolve(const SpectralData& spec, const PureState& state, double t);

/// Calls visit(i, psi(times[i])) in order. States are synthesized 64 at a time with one matrix
/// product against the eigenvectors.
void for_each_evolved(const SpectralData& spec, const PureState& state0, const std::vector<double>& times,
                      const std::function<void(std::size_t, const PureState&)>& visit);

/// <psi_0(t)|op|psi_0(t)> on linspace(0, t_max, steps). Throws DomainError if steps < 2.
TimeSeries observable_series(const SpectralData& spec, const PureState& state0, const HermitianOperator& op, double t_max, int steps,
                             std::string label = {});

/// Several observables along one trajectory.
std::vector<TimeSeries> observable_series(const SpectralData& spec, const PureState& state0, const std::vector<HermitianOperator>& ops,
                                          double t_max, int steps, const std::vector<std::string>& labels = {});

/// Tr rho_A(t)^n along the unitary trajectory, computed with rdm_moment.
TimeSeries twist_series(const SpectralData& spec, const PureState& state0, const Region& region, int n, double t_max, int steps);

/// sum_k |c_k|^2 exp(-i E_k t) with the overlaps bound to `spec`.
cplx loschmidt_echo(const SpectralData& spec, double t);

struct EchoRate {
    std::vector<double> times;
    std::vector<cplx>   echo;
    /// F(t) = log(echo) / L, continuous along the grid from F(0) = 0.
    std::vector<cplx> rate;
};

/// Throws NumericalError asking for a finer grid when the phase of the echo is predicted to move by
/// more than pi between neighbouring points, or when |echo| underflows.
EchoRate log_echo_rate(const SpectralData& spec, double t_max, int steps);

/// sum_i w_i f(t_i) / sum_i w_i with w_i = trapezoid weight * exp(-2 n (t_i - t)^2 / tau^2) over
/// [t - W, t + W], W = 4 tau / sqrt(n). Throws CoverageError when the series does not reach W on
/// either side. tau = 0 interpolates linearly at t.
double gaussian_average(const TimeSeries& series, double tau, double t, double n = 1.0, Symmetry sym = Symmetry::two_sided);

/// Time-average prediction for the filtered expectation value: gaussian_average with n = 1.
double filtered_expectation_prediction(const TimeSeries& series, double tau, double t = 0.0, Symmetry sym = Symmetry::two_sided);

struct AveragingGrid {
    double half_window_factor = 4.0;
    double max_spacing        = 0.05;
};

/// Reduced state on `region` of rho(tau) ~ int dt exp(-2t^2/tau^2) |psi_0(t)><psi_0(t)| on a
/// symmetric trapezoid grid. Throws CoverageError if half_window_factor < 4.
DensityMatrix time_averaged_density_matrix(const SpectralData& spec, const PureState& state0, double tau, const Region& region,
                                           const AveragingGrid& grid = {});

/// <XY> - <X><Y>. Throws DomainError when the supports of X and Y overlap.
double connected_correlator(const PureState& state, const HermitianOperator& op_x, const HermitianOperator& op_y);

/// avg(x y) - avg(x) avg(y) with the n = 1 kernel. Without series_y the two observables are taken to
/// have equal filtered means (translation invariance) and x is used for both.
double connected_correlator_prediction(const TimeSeries& series_x, double tau, Symmetry sym = Symmetry::two_sided,
                                       const std::optional<TimeSeries>& series_y = std::nullopt);

} // namespace efqs
