#include "efqs/pauli.hpp"

#include "efqs/errors.hpp"

#include <bit>
#include <cmath>
#include <fmt/format.h>

namespace efqs {

char axis_name(Axis a) {
    switch(a) {
        case Axis::x: return 'x';
        case Axis::y: return 'y';
        case Axis::z: return 'z';
    }
    return '?';
}

Axis parse_axis(char c) {
    switch(c) {
        case 'x': case 'X': return Axis::x;
        case 'y': case 'Y': return Axis::y;
        case 'z': case 'Z': return Axis::z;
        default: throw DomainError(fmt::format("unknown spin axis '{}'", c));
    }
}

int PauliTerm::y_count() const { return std::popcount(x_mask & z_mask); }

namespace {

// i^k for integer k
cplx i_power(int k) {
    switch(k & 3) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
    }
}

double parity_sign(std::uint64_t bits) { return (std::popcount(bits) & 1) ? -1.0 : 1.0; }

} // namespace

PauliSum::PauliSum(int L) : sites_(L) {
    if(L < 1 || L > 62) throw ShapeError(fmt::format("Pauli sums support 1..62 sites, got {}", L));
}

void PauliSum::add(double coeff, std::initializer_list<std::pair<int, Axis>> factors) {
    add(coeff, std::vector<std::pair<int, Axis>>(factors));
}

void PauliSum::add(double coeff, const std::vector<std::pair<int, Axis>>& factors) {
    PauliTerm term{coeff, 0, 0};
    for(const auto& [site, axis] : factors) {
        if(site < 1 || site > sites_) throw ShapeError(fmt::format("site {} outside [1, {}]", site, sites_));
        const auto bit = site_bit(site, sites_);
        if((term.x_mask | term.z_mask) & bit) throw ShapeError(fmt::format("site {} repeated in a Pauli string", site));
        if(axis != Axis::z) term.x_mask |= bit;
        if(axis != Axis::x) term.z_mask |= bit;
    }
    terms_.push_back(term);
}

void PauliSum::add_identity(double coeff) { terms_.push_back({coeff, 0, 0}); }

bool PauliSum::is_real() const {
    for(const auto& t : terms_)
        if(t.y_count() & 1) return false;
    return true;
}

double PauliSum::coefficient_norm() const {
    double s = 0.0;
    for(const auto& t : terms_) s += std::abs(t.coeff);
    return s;
}

std::uint64_t PauliSum::support() const {
    std::uint64_t s = 0;
    for(const auto& t : terms_) s |= t.x_mask | t.z_mask;
    return s;
}

Eigen::VectorXcd PauliSum::apply(const Eigen::VectorXcd& v) const {
    if(v.size() != dim()) throw ShapeError(fmt::format("vector of length {} for a {}-site operator", v.size(), sites_));
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(v.size());
    const auto       n   = static_cast<std::uint64_t>(v.size());
    for(const auto& t : terms_) {
        const cplx phase = t.coeff * i_power(t.y_count());
        if(t.z_mask == 0) {
            for(std::uint64_t i = 0; i < n; ++i) out[static_cast<Eigen::Index>(i ^ t.x_mask)] += phase * v[static_cast<Eigen::Index>(i)];
        } else {
            for(std::uint64_t i = 0; i < n; ++i)
                out[static_cast<Eigen::Index>(i ^ t.x_mask)] += phase * parity_sign(i & t.z_mask) * v[static_cast<Eigen::Index>(i)];
        }
    }
    return out;
}

Eigen::MatrixXcd PauliSum::to_dense() const {
    const auto       n = static_cast<std::uint64_t>(dim());
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim(), dim());
    for(const auto& t : terms_) {
        const cplx phase = t.coeff * i_power(t.y_count());
        for(std::uint64_t i = 0; i < n; ++i)
            m(static_cast<Eigen::Index>(i ^ t.x_mask), static_cast<Eigen::Index>(i)) += phase * parity_sign(i & t.z_mask);
    }
    return m;
}

Eigen::MatrixXd PauliSum::to_dense_real() const {
    if(!is_real()) throw NumericalError("to_dense_real on a Pauli sum with complex matrix elements");
    const auto      n = static_cast<std::uint64_t>(dim());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim(), dim());
    for(const auto& t : terms_) {
        // even #Y: i^{#Y} = +-1
        const double phase = t.coeff * i_power(t.y_count()).real();
        for(std::uint64_t i = 0; i < n; ++i)
            m(static_cast<Eigen::Index>(i ^ t.x_mask), static_cast<Eigen::Index>(i)) += phase * parity_sign(i & t.z_mask);
    }
    return m;
}

} // namespace efqs
