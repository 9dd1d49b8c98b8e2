#pragma once

#include "efqs/region.hpp"

#include <Eigen/Dense>

namespace efqs {

/// Mixed state on a region of an L-site chain; basis ordered like the full chain restricted to
/// the region (lowest region site is the most significant bit).
///
/// Construction checks Hermiticity (1e-10), unit trace (1e-10) and eigenvalues >= -1e-10.
class DensityMatrix {
public:
    DensityMatrix(Region region, Eigen::MatrixXcd matrix);

    /// Trusts `spectrum` as the eigenvalues of `matrix` (e.g. obtained from a smaller Gram matrix of
    /// a pure state) instead of diagonalizing. Still checks trace, Hermiticity and positivity.
    static DensityMatrix with_spectrum(Region region, Eigen::MatrixXcd matrix, Eigen::VectorXd spectrum);

    const Region&           region() const { return region_; }
    const Eigen::MatrixXcd& matrix() const { return matrix_; }
    Eigen::Index            dim() const { return matrix_.rows(); }

    /// Eigenvalues in ascending order.
    const Eigen::VectorXd& spectrum() const { return spectrum_; }

private:
    DensityMatrix(Region region, Eigen::MatrixXcd matrix, Eigen::VectorXd spectrum);

    Region           region_;
    Eigen::MatrixXcd matrix_;
    Eigen::VectorXd  spectrum_;
};

} // namespace efqs
