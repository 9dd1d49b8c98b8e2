#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <utility>
#include <vector>

namespace efqs {

using cplx = std::complex<double>;

enum class Axis { x, y, z };

char axis_name(Axis a);
Axis parse_axis(char c);

/// Bit of the computational-basis index that carries site `site` (1-based) of an L-site chain.
/// Site 1 is the most significant bit; a set bit means spin down.
constexpr std::uint64_t site_bit(int site, int L) { return std::uint64_t{1} << (L - site); }

/// One weighted Pauli string. `x_mask` marks sites carrying X or Y, `z_mask` sites carrying Z or Y.
struct PauliTerm {
    double        coeff  = 0.0;
    std::uint64_t x_mask = 0;
    std::uint64_t z_mask = 0;

    int y_count() const;
};

/// Real-weighted sum of Pauli strings on L sites. Hermitian by construction.
///
/// Acting on a basis state |i>, a term multiplies by i^{#Y} (-1)^{popcount(i & z_mask)} and maps
/// the index to i ^ x_mask.
class PauliSum {
public:
    PauliSum() = default;
    explicit PauliSum(int L);

    /// Adds coeff * prod_k sigma^{axis_k}_{site_k}. Sites must be distinct and within [1, L].
    void add(double coeff, std::initializer_list<std::pair<int, Axis>> factors);
    void add(double coeff, const std::vector<std::pair<int, Axis>>& factors);
    void add_identity(double coeff);

    int sites() const { return sites_; }
    Eigen::Index dim() const { return Eigen::Index{1} << sites_; }
    const std::vector<PauliTerm>& terms() const { return terms_; }

    /// True when every string has an even number of Y factors, i.e. the matrix is real.
    bool is_real() const;

    /// Sum of |coeff|; an upper bound on the spectral radius.
    double coefficient_norm() const;

    /// Sites touched by any non-identity factor, as basis-index bits.
    std::uint64_t support() const;

    Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const;

    Eigen::MatrixXcd to_dense() const;
    /// Requires is_real().
    Eigen::MatrixXd to_dense_real() const;

private:
    int                    sites_ = 0;
    std::vector<PauliTerm> terms_;
};

} // namespace efqs
