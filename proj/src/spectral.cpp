#include "efqs/spectral.hpp"

#include "efqs/errors.hpp"

#include <Eigen/Eigenvalues>
#include <atomic>
#include <fmt/format.h>
#include <lapacke.h>
#include <random>
#include <spdlog/spdlog.h>

namespace efqs {

const Eigen::VectorXcd& SpectralData::overlaps() const {
    if(!has_overlaps()) throw ShapeError("spectral data is not bound to an initial state");
    return overlaps_;
}

Eigen::VectorXcd SpectralData::to_eigenbasis(const Eigen::VectorXcd& v) const {
    if(v.size() != dim()) throw ShapeError(fmt::format("vector of length {} for spectral data of dimension {}", v.size(), dim()));
    if(real_) {
        Eigen::VectorXcd out(dim());
        out.real() = real_vectors_.transpose() * v.real();
        out.imag() = real_vectors_.transpose() * v.imag();
        return out;
    }
    return complex_vectors_.adjoint() * v;
}

Eigen::VectorXcd SpectralData::from_eigenbasis(const Eigen::VectorXcd& c) const {
    if(c.size() != dim()) throw ShapeError(fmt::format("coefficients of length {} for spectral data of dimension {}", c.size(), dim()));
    if(real_) {
        Eigen::VectorXcd out(dim());
        out.real() = real_vectors_ * c.real();
        out.imag() = real_vectors_ * c.imag();
        return out;
    }
    return complex_vectors_ * c;
}

Eigen::MatrixXcd SpectralData::from_eigenbasis(const Eigen::MatrixXcd& c) const {
    if(c.rows() != dim()) throw ShapeError(fmt::format("coefficient block with {} rows for dimension {}", c.rows(), dim()));
    if(real_) {
        Eigen::MatrixXcd out(dim(), c.cols());
        out.real() = real_vectors_ * c.real();
        out.imag() = real_vectors_ * c.imag();
        return out;
    }
    return complex_vectors_ * c;
}

Eigen::VectorXcd SpectralData::eigenvector(Eigen::Index k) const {
    if(k < 0 || k >= dim()) throw ShapeError(fmt::format("eigenvector index {} out of range", k));
    if(real_) return real_vectors_.col(k).cast<cplx>();
    return complex_vectors_.col(k);
}

Eigen::VectorXcd SpectralData::coefficients(const PureState& state) const {
    if(state.sites() != sites_) throw ShapeError(fmt::format("state on {} sites, spectrum on {}", state.sites(), sites_));
    return to_eigenbasis(state.amplitudes());
}

namespace {

void check_decomposition(const SpectralData& sd, const HermitianOperator& H) {
    std::mt19937_64                  rng(0x5eed);
    std::normal_distribution<double> gauss;
    for(int trial = 0; trial < 3; ++trial) {
        Eigen::VectorXcd x(sd.dim());
        for(Eigen::Index i = 0; i < x.size(); ++i) x[i] = cplx{gauss(rng), gauss(rng)};
        x.normalize();
        const Eigen::VectorXcd c = sd.to_eigenbasis(x);
        const double           ortho = (sd.from_eigenbasis(c) - x).norm();
        if(ortho > 1e-10) throw NumericalError(fmt::format("eigenvectors not orthonormal (residual {:.3g})", ortho));
        const Eigen::VectorXcd scaled = sd.eigenvalues().cast<cplx>().cwiseProduct(c);
        const double           recon  = (H.apply(x) - sd.from_eigenbasis(scaled)).norm();
        if(recon > 1e-8) throw NumericalError(fmt::format("eigendecomposition does not reconstruct H (residual {:.3g})", recon));
    }
}

} // namespace

namespace {

void lapack_solve(SpectralData& sd, const HermitianOperator& H, Eigen::VectorXd& values, Eigen::MatrixXd& rv, Eigen::MatrixXcd& cv) {
    const auto n    = static_cast<lapack_int>(H.dim());
    lapack_int info = 0;
    if(sd.is_real()) {
        rv   = H.has_pauli() ? H.pauli().to_dense_real() : Eigen::MatrixXd(H.dense().real());
        info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'U', n, rv.data(), n, values.data());
    } else {
        cv   = H.to_dense();
        info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'U', n, reinterpret_cast<lapack_complex_double*>(cv.data()), n, values.data());
    }
    if(info != 0) throw NumericalError(fmt::format("LAPACK eigensolver failed (info = {})", info));
}

void eigen_solve(SpectralData& sd, const HermitianOperator& H, Eigen::VectorXd& values, Eigen::MatrixXd& rv, Eigen::MatrixXcd& cv) {
    if(sd.is_real()) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H.has_pauli() ? H.pauli().to_dense_real() : Eigen::MatrixXd(H.dense().real()));
        if(es.info() != Eigen::Success) throw NumericalError("Eigen eigensolver did not converge");
        values = es.eigenvalues();
        rv     = es.eigenvectors();
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H.to_dense());
        if(es.info() != Eigen::Success) throw NumericalError("Eigen eigensolver did not converge");
        values = es.eigenvalues();
        cv     = es.eigenvectors();
    }
}

std::atomic<bool> fallback_warned{false};

} // namespace

SpectralData eigendecompose(const HermitianOperator& H, int dense_cap, EigenSolver solver) {
    if(H.sites() > dense_cap) throw CapacityError(fmt::format("L = {} exceeds the dense cap of {} sites", H.sites(), dense_cap));
    SpectralData sd;
    sd.sites_ = H.sites();
    sd.values_.resize(H.dim());
    if(H.has_dense()) {
        const double dev = (H.dense() - H.dense().adjoint()).cwiseAbs().maxCoeff();
        if(dev > 1e-12) throw NumericalError(fmt::format("operator is not Hermitian (max deviation {:.3g})", dev));
    }
    // Pauli sums have real coefficients, hence are Hermitian by construction
    sd.real_ = H.is_real();
    if(solver == EigenSolver::eigen) {
        eigen_solve(sd, H, sd.values_, sd.real_vectors_, sd.complex_vectors_);
        check_decomposition(sd, H);
        return sd;
    }
    lapack_solve(sd, H, sd.values_, sd.real_vectors_, sd.complex_vectors_);
    if(solver == EigenSolver::lapack) {
        check_decomposition(sd, H);
        return sd;
    }
    try {
        check_decomposition(sd, H);
    } catch(const NumericalError& e) {
        if(!fallback_warned.exchange(true))
            spdlog::warn("LAPACK eigendecomposition failed its self-check ({}); recomputing with Eigen. "
                         "With OpenBLAS, OPENBLAS_CORETYPE=Haswell usually avoids this",
                         e.what());
        eigen_solve(sd, H, sd.values_, sd.real_vectors_, sd.complex_vectors_);
        check_decomposition(sd, H);
    }
    return sd;
}

SpectralData eigendecompose(const HermitianOperator& H, const PureState& state0, int dense_cap, EigenSolver solver) {
    if(state0.sites() != H.sites()) throw ShapeError(fmt::format("state on {} sites, operator on {}", state0.sites(), H.sites()));
    SpectralData sd   = eigendecompose(H, dense_cap, solver);
    sd.overlaps_      = sd.to_eigenbasis(state0.amplitudes());
    const double mass = sd.overlaps_.squaredNorm();
    if(std::abs(mass - 1.0) > 1e-10) throw NumericalError(fmt::format("overlap weights sum to {:.17g}", mass));
    return sd;
}

} // namespace efqs
