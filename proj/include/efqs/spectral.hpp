#pragma once

#include "efqs/spin_core.hpp"

#include <Eigen/Dense>

namespace efqs {

enum class EigenSolver {
    /// LAPACK, falling back to Eigen with a warning when the LAPACK result fails the self-check.
    automatic,
    lapack,
    eigen,
};

/// Full eigendecomposition of a Hermitian operator, optionally bound to an initial state.
///
/// Eigenvalues ascend. Real operators keep real eigenvectors, which halves storage and matrix-vector
/// cost at L = 12 (dimension 4096).
class SpectralData {
public:
    int          sites() const { return sites_; }
    Eigen::Index dim() const { return values_.size(); }
    bool         is_real() const { return real_; }

    const Eigen::VectorXd& eigenvalues() const { return values_; }

    bool has_overlaps() const { return overlaps_.size() > 0; }
    /// c_k = <E_k|psi_0>.
    const Eigen::VectorXcd& overlaps() const;

    /// V^dagger v
    Eigen::VectorXcd to_eigenbasis(const Eigen::VectorXcd& v) const;
    /// V c
    Eigen::VectorXcd from_eigenbasis(const Eigen::VectorXcd& c) const;
    /// Column-wise V C.
    Eigen::MatrixXcd from_eigenbasis(const Eigen::MatrixXcd& c) const;

    Eigen::VectorXcd eigenvector(Eigen::Index k) const;

    /// Eigenbasis coefficients of `state`.
    Eigen::VectorXcd coefficients(const PureState& state) const;

private:
    friend SpectralData eigendecompose(const HermitianOperator&, int, EigenSolver);
    friend SpectralData eigendecompose(const HermitianOperator&, const PureState&, int, EigenSolver);

    int              sites_ = 0;
    bool             real_  = true;
    Eigen::VectorXd  values_;
    Eigen::MatrixXd  real_vectors_;
    Eigen::MatrixXcd complex_vectors_;
    Eigen::VectorXcd overlaps_;
};

/// Dense diagonalization: LAPACK dsyevd for real input and zheevd otherwise, or Eigen's
/// SelfAdjointEigenSolver. Checks eigenvector orthonormality (1e-10) and the reconstruction
/// H v = V diag(E) V^dagger v (1e-8) on a few fixed pseudo-random vectors.
///
/// Some OpenBLAS builds pick kernels that return non-orthogonal eigenvectors on AVX-512 CPUs
/// (observed with the Cooperlake core type for n >= 256); OPENBLAS_CORETYPE=Haswell avoids them.
/// `automatic` detects this through the self-check and recomputes with Eigen, which is several
/// times slower at L = 12.
SpectralData eigendecompose(const HermitianOperator& H, int dense_cap = kDefaultDenseCap, EigenSolver solver = EigenSolver::automatic);

/// As above and binds the overlaps with `state0`; sum |c_k|^2 = 1 is checked to 1e-10.
SpectralData eigendecompose(const HermitianOperator& H, const PureState& state0, int dense_cap = kDefaultDenseCap,
                            EigenSolver solver = EigenSolver::automatic);

} // namespace efqs
