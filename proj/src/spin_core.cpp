#include "efqs/spin_core.hpp"

#include "efqs/errors.hpp"

#include <cmath>
#include <fmt/format.h>

namespace efqs {

void HamiltonianSpec::validate() const {
    if(L < 2) throw DomainError(fmt::format("chain needs L >= 2 sites, got {}", L));
    if(!std::isfinite(J) || !std::isfinite(h_x) || !std::isfinite(h_z)) throw DomainError("non-finite Hamiltonian coupling");
}

PureState::PureState(int L, Eigen::VectorXcd amplitudes) : sites_(L), amplitudes_(std::move(amplitudes)) {
    if(L < 1 || L > 30) throw ShapeError(fmt::format("unsupported site count {}", L));
    if(amplitudes_.size() != (Eigen::Index{1} << L))
        throw ShapeError(fmt::format("state of length {} for L = {} (expected {})", amplitudes_.size(), L, Eigen::Index{1} << L));
    const double n2 = amplitudes_.squaredNorm();
    if(std::abs(n2 - 1.0) > 1e-12) throw NumericalError(fmt::format("state not normalized: |psi|^2 = {:.17g}", n2));
}

PureState PureState::normalized(int L, Eigen::VectorXcd amplitudes) {
    const double n = amplitudes.norm();
    if(!(n > 0.0) || !std::isfinite(n)) throw NumericalError("cannot normalize a zero or non-finite vector");
    amplitudes /= n;
    return PureState(L, std::move(amplitudes));
}

bool PureState::is_real() const { return amplitudes_.imag().isZero(0.0); }

HermitianOperator HermitianOperator::from_pauli(PauliSum sum) {
    HermitianOperator op;
    op.sites_ = sum.sites();
    op.pauli_ = std::make_shared<const PauliSum>(std::move(sum));
    return op;
}

HermitianOperator HermitianOperator::from_dense(int L, Eigen::MatrixXcd m, double tol) {
    if(L < 1 || L > 30) throw ShapeError(fmt::format("unsupported site count {}", L));
    const Eigen::Index d = Eigen::Index{1} << L;
    if(m.rows() != d || m.cols() != d) throw ShapeError(fmt::format("{}x{} matrix for L = {}", m.rows(), m.cols(), L));
    const double dev = (m - m.adjoint()).cwiseAbs().maxCoeff();
    if(dev > tol) throw NumericalError(fmt::format("matrix is not Hermitian (max |A - A^dagger| = {:.3g})", dev));
    HermitianOperator op;
    op.sites_ = L;
    op.dense_ = std::make_shared<const Eigen::MatrixXcd>(std::move(m));
    return op;
}

const PauliSum& HermitianOperator::pauli() const {
    if(!pauli_) throw ShapeError("operator has no Pauli representation");
    return *pauli_;
}

const Eigen::MatrixXcd& HermitianOperator::dense() const {
    if(!dense_) throw ShapeError("operator has no dense representation");
    return *dense_;
}

bool HermitianOperator::is_real() const {
    if(pauli_) return pauli_->is_real();
    return dense_->imag().isZero(0.0);
}

std::optional<std::uint64_t> HermitianOperator::support() const {
    if(pauli_) return pauli_->support();
    return std::nullopt;
}

Eigen::VectorXcd HermitianOperator::apply(const Eigen::VectorXcd& v) const {
    if(pauli_) return pauli_->apply(v);
    if(v.size() != dim()) throw ShapeError(fmt::format("vector of length {} for a {}-site operator", v.size(), sites_));
    return (*dense_) * v;
}

Eigen::MatrixXcd HermitianOperator::to_dense() const {
    if(dense_) return *dense_;
    return pauli_->to_dense();
}

HermitianOperator HermitianOperator::shifted(double c) const {
    HermitianOperator op;
    op.sites_ = sites_;
    if(pauli_) {
        PauliSum s = *pauli_;
        s.add_identity(-c);
        op.pauli_ = std::make_shared<const PauliSum>(std::move(s));
    }
    if(dense_) {
        Eigen::MatrixXcd m = *dense_;
        m.diagonal().array() -= c;
        op.dense_ = std::make_shared<const Eigen::MatrixXcd>(std::move(m));
    }
    return op;
}

SitePattern SitePattern::neel() { return SitePattern{}; }

SitePattern SitePattern::yplus() {
    SitePattern p;
    p.kind_ = PatternKind::yplus;
    return p;
}

SitePattern SitePattern::custom(std::vector<Spinor> spinors) {
    for(std::size_t i = 0; i < spinors.size(); ++i) {
        const double n2 = std::norm(spinors[i].up) + std::norm(spinors[i].down);
        if(std::abs(n2 - 1.0) > 1e-10) throw DomainError(fmt::format("spinor for site {} has squared norm {:.12g}", i + 1, n2));
    }
    SitePattern p;
    p.kind_    = PatternKind::custom;
    p.spinors_ = std::move(spinors);
    return p;
}

std::string SitePattern::name() const {
    switch(kind_) {
        case PatternKind::neel: return "neel";
        case PatternKind::yplus: return "yplus";
        case PatternKind::custom: return "custom";
    }
    return "?";
}

namespace {

PauliSum hamiltonian_terms(const HamiltonianSpec& spec) {
    spec.validate();
    const int L = spec.L;
    PauliSum  h(L);
    // S = sigma / 2
    const int bonds = spec.boundary == Boundary::open ? L - 1 : L;
    for(int j = 1; j <= bonds; ++j) h.add(-spec.J / 4.0, {{j, Axis::x}, {j % L + 1, Axis::x}});
    for(int j = 1; j <= L; ++j) h.add(spec.h_x / 2.0, {{j, Axis::x}});
    for(int j = 1; j <= L; ++j) h.add(spec.h_z / 2.0, {{j, Axis::z}});
    return h;
}

} // namespace

HermitianOperator build_hamiltonian(const HamiltonianSpec& spec, int dense_cap) {
    if(spec.L > dense_cap) throw CapacityError(fmt::format("L = {} exceeds the dense cap of {} sites", spec.L, dense_cap));
    return HermitianOperator::from_pauli(hamiltonian_terms(spec));
}

HermitianOperator build_sparse_hamiltonian(const HamiltonianSpec& spec) {
    if(spec.L > 26) throw CapacityError(fmt::format("L = {} exceeds the state-vector limit of 26 sites", spec.L));
    return HermitianOperator::from_pauli(hamiltonian_terms(spec));
}

PureState product_state(const SitePattern& pattern, int L) {
    if(L < 1 || L > 26) throw ShapeError(fmt::format("unsupported site count {}", L));
    std::vector<Spinor> local;
    switch(pattern.kind()) {
        case PatternKind::neel:
            for(int j = 1; j <= L; ++j) local.push_back(j % 2 == 1 ? Spinor{1.0, 0.0} : Spinor{0.0, 1.0});
            break;
        case PatternKind::yplus: {
            const double r = 1.0 / std::sqrt(2.0);
            local.assign(static_cast<std::size_t>(L), Spinor{r, cplx{0.0, r}});
            break;
        }
        case PatternKind::custom:
            if(static_cast<int>(pattern.spinors().size()) != L)
                throw ShapeError(fmt::format("custom pattern has {} spinors for L = {}", pattern.spinors().size(), L));
            local = pattern.spinors();
            break;
    }
    // site 1 is the most significant bit, so fold sites left to right
    Eigen::VectorXcd amps(1);
    amps[0] = 1.0;
    for(const auto& s : local) {
        Eigen::VectorXcd next(2 * amps.size());
        for(Eigen::Index i = 0; i < amps.size(); ++i) {
            next[2 * i]     = amps[i] * s.up;
            next[2 * i + 1] = amps[i] * s.down;
        }
        amps = std::move(next);
    }
    return PureState::normalized(L, std::move(amps));
}

HermitianOperator local_observable(Axis axis, int site, int L) {
    if(site < 1 || site > L) throw ShapeError(fmt::format("site {} outside [1, {}]", site, L));
    PauliSum s(L);
    s.add(0.5, {{site, axis}});
    return HermitianOperator::from_pauli(std::move(s));
}

HermitianOperator identity_operator(int L) {
    PauliSum s(L);
    s.add_identity(1.0);
    return HermitianOperator::from_pauli(std::move(s));
}

double expectation(const PureState& state, const HermitianOperator& op) {
    if(state.sites() != op.sites()) throw ShapeError(fmt::format("state on {} sites, operator on {}", state.sites(), op.sites()));
    const cplx v = state.amplitudes().dot(op.apply(state.amplitudes()));
    if(std::abs(v.imag()) >= 1e-10) throw NumericalError(fmt::format("expectation value has imaginary part {:.3g}", v.imag()));
    return v.real();
}

HermitianOperator shift_hamiltonian(const HermitianOperator& H, const PureState& state) {
    return H.shifted(expectation(state, H));
}

double fidelity(const PureState& a, const PureState& b) {
    if(a.dim() != b.dim()) throw ShapeError("fidelity between states of different dimension");
    return std::norm(a.amplitudes().dot(b.amplitudes()));
}

} // namespace efqs
