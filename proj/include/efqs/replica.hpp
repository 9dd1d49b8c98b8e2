#pragma once

#include "efqs/dynamics.hpp"

#include <Eigen/Dense>
#include <limits>
#include <vector>

namespace efqs {

/// Inputs of the closed-form replica predictions. Only the fields an operation reads need to be set.
struct ReplicaParams {
    /// Renyi index.
    double n = 2.0;
    /// sqrt(V) * tau
    double tau_tilde = 1.0;
    double eps2      = 1.0;
    /// V_A / V
    double f = 0.5;
    /// Total volume.
    double V = 1.0;
    /// Boundary measure |dA|.
    double area    = 1.0;
    double Gamma_n = 0.0;
    double s_n     = 0.0;
    double t_th    = std::numeric_limits<double>::infinity();

    /// eps2 > 0, f in [0, 1], Gamma_n >= 0, n > 0. Throws DomainError naming the offending field.
    void validate() const;
    /// Also requires tau_tilde > 0.
    void validate_short_filter() const;
    /// n as an integer >= 1; throws DomainError otherwise.
    int integer_n() const;
};

using MnMatrix = Eigen::MatrixXd;

/// Ordering t_1..t_n, t~_1..t~_n. Diagonal 2/tt^2 + eps2, -eps2 (1 - f) between t_j and t~_j, and
/// -eps2 f between t_j and t~_{j+1} (cyclic).
MnMatrix build_Mn(const ReplicaParams& p);

/// For each k = 2 pi j / n the pair 2/tt^2 + eps2 +- eps2 sqrt(s_k), plus first,
/// s_k = (1-f)^2 + f^2 + 2 f (1-f) cos k.
std::vector<double> Mn_eigenvalues(const ReplicaParams& p);

/// Product over k of (2/tt^2 + eps2)^2 - eps2^2 s_k.
double det_Mn(const ReplicaParams& p);

/// [((x + r)/2)^(n/2) - ((x - r)/2)^(n/2)]^2 with r = sqrt(x^2 - y^2), for real n > 0.
double det_Mn_continued(const ReplicaParams& p);
/// log of det_Mn_continued, safe against overflow for small tau_tilde.
double log_det_Mn_continued(const ReplicaParams& p);

/// prod_{p=0}^{n-1} (x - cos(2 pi p / n) y), evaluated directly.
double trig_product(double x, double y, int n);
/// The same product in closed form, valid for real n. Throws DomainError if x < |y|.
double trig_product_closed(double x, double y, double n);

/// S_n - S_{n,0} = log(det M_n / det^n M_1) / (2 (n - 1)); n = 1 by a central difference in n
/// with step kReplicaLimitStep.
double short_filter_entropy_delta(const ReplicaParams& p);
inline constexpr double kReplicaLimitStep = 1e-5;

/// -log[2 (u + 1) / sqrt((u + 1)(u + 2)^2)], u = eps2 tt^2.
double s2_half_chain(double tau_tilde, double eps2);

/// eps2 (1 + sqrt(s_k)) for every k, then eps2 (1 - sqrt(s_k)) for k > 0, interleaved per k.
std::vector<double> Nn_eigenvalues(const ReplicaParams& p);

/// S_n on the filtered state at medium filter time from the unitary twist series Tr rho_A(t)^n:
/// Tr rho^n = [int |lambda|^{2n} twist / (int |lambda|^2)^n] (V/2pi)^{(1-n)/2} det(N_n)^{-1/2} det(N_1)^{n/2}.
/// Integer n >= 2 only; p.V, p.f, p.eps2 and p.n are read. Throws CoverageError when the series does
/// not reach 4 tau / sqrt(n).
double medium_entropy_prediction(const ReplicaParams& p, const TimeSeries& twist, double tau, Symmetry sym = Symmetry::even);

/// Leading medium-filter-time growth g_mft(tau):
///   n > 1:     n/(n-1) log tau
///   n = 1:     Gamma_1 |dA| tau / sqrt(2 pi)
///   0 < n < 1: (1-n)/(8n) Gamma_n^2 |dA|^2 tau^2
/// `subleading` adds the log tau correction of the n <= 1 cases. Logs a warning for tau outside
/// [1, t_th].
double gmft_asymptotic(const ReplicaParams& p, double tau, bool subleading = false);

struct GrowthFit {
    double Gamma_n = 0.0;
    double s_n     = 0.0;
    double t_th    = 0.0;
    /// Fitted log twist = intercept + slope * t on [window_begin, window_end].
    double slope        = 0.0;
    double intercept    = 0.0;
    double window_begin = 0.0;
    double window_end   = 0.0;
    /// Mean log twist after the window.
    double plateau = 0.0;
};

/// Fits log twist(t) ~ -(n-1) Gamma_n |dA| t on the longest run of grid points whose local slopes
/// stay within 10% of their mean, and reads -(n-1) s_n V_A from the mean after that run. t_th is
/// where the fitted line meets the plateau. Throws FitError when no decaying run of 3 or more points
/// exists or nothing follows it.
GrowthFit fit_growth_rate(const TimeSeries& twist, int n, double area, double V_A);

} // namespace efqs
