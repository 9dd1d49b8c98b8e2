#pragma once

#include "efqs/pauli.hpp"

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace efqs {

inline constexpr int kDefaultDenseCap = 14;

enum class Boundary { open, periodic };

/// H = -J sum S^x_j S^x_{j+1} + h_x sum S^x_j + h_z sum S^z_j with S = sigma/2.
struct HamiltonianSpec {
    double   J        = 1.0;
    double   h_x      = 0.0;
    double   h_z      = 0.0;
    int      L        = 2;
    Boundary boundary = Boundary::open;

    void validate() const;
};

/// Unit-norm state on the 2^L-dimensional spin-1/2 Hilbert space.
class PureState {
public:
    /// Throws ShapeError on length mismatch and NumericalError if |<psi|psi> - 1| > 1e-12.
    PureState(int L, Eigen::VectorXcd amplitudes);

    /// Rescales `amplitudes` to unit norm.
    static PureState normalized(int L, Eigen::VectorXcd amplitudes);

    int                     sites() const { return sites_; }
    Eigen::Index            dim() const { return amplitudes_.size(); }
    const Eigen::VectorXcd& amplitudes() const { return amplitudes_; }

    /// True when every amplitude has zero imaginary part.
    bool is_real() const;

private:
    int              sites_;
    Eigen::VectorXcd amplitudes_;
};

/// Hermitian operator held as a Pauli-string sum, a dense matrix, or both.
/// Immutable; copies share storage.
class HermitianOperator {
public:
    static HermitianOperator from_pauli(PauliSum sum);
    /// Throws NumericalError when m deviates from m^dagger by more than `tol` in any entry.
    static HermitianOperator from_dense(int L, Eigen::MatrixXcd m, double tol = 1e-12);

    int          sites() const { return sites_; }
    Eigen::Index dim() const { return Eigen::Index{1} << sites_; }

    bool                    has_pauli() const { return pauli_ != nullptr; }
    const PauliSum&         pauli() const;
    bool                    has_dense() const { return dense_ != nullptr; }
    const Eigen::MatrixXcd& dense() const;

    /// Matrix entries are all real.
    bool is_real() const;

    /// Sites acted on non-trivially; empty for dense-only operators.
    std::optional<std::uint64_t> support() const;

    /// Uses the Pauli form when present.
    Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const;

    Eigen::MatrixXcd to_dense() const;

    /// this - c * identity
    HermitianOperator shifted(double c) const;

private:
    HermitianOperator() = default;

    int                                     sites_ = 0;
    std::shared_ptr<const PauliSum>         pauli_;
    std::shared_ptr<const Eigen::MatrixXcd> dense_;
};

struct Spinor {
    cplx up;
    cplx down;
};

enum class PatternKind { neel, yplus, custom };

/// Per-site product-state recipe.
class SitePattern {
public:
    static SitePattern neel();
    static SitePattern yplus();
    /// Each spinor must have unit norm within 1e-10.
    static SitePattern custom(std::vector<Spinor> spinors);

    PatternKind                kind() const { return kind_; }
    const std::vector<Spinor>& spinors() const { return spinors_; }

    std::string name() const;

private:
    PatternKind         kind_ = PatternKind::neel;
    std::vector<Spinor> spinors_;
};

/// Throws CapacityError when spec.L exceeds dense_cap.
HermitianOperator build_hamiltonian(const HamiltonianSpec& spec, int dense_cap = kDefaultDenseCap);

/// Pauli-form Hamiltonian without the dense cap (matrix-free backends only).
HermitianOperator build_sparse_hamiltonian(const HamiltonianSpec& spec);

/// Neel is up-down-up-down... starting with site 1 up; Y+ is (1, i)/sqrt(2) on every site.
PureState product_state(const SitePattern& pattern, int L);

/// S^axis at `site` (1-based), identity elsewhere.
HermitianOperator local_observable(Axis axis, int site, int L);

HermitianOperator identity_operator(int L);

/// <psi|op|psi>. Throws NumericalError if the imaginary part reaches 1e-10.
double expectation(const PureState& state, const HermitianOperator& op);

/// H - <state|H|state> * identity.
HermitianOperator shift_hamiltonian(const HermitianOperator& H, const PureState& state);

/// |<a|b>|^2
double fidelity(const PureState& a, const PureState& b);

} // namespace efqs
