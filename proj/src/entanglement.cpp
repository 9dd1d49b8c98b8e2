#include "efqs/entanglement.hpp"

#include "efqs/errors.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <spdlog/spdlog.h>

namespace efqs {

// ---------------------------------------------------------------- Region

Region::Region(int L, std::vector<int> sites, bool allow_empty) : total_(L), sites_(std::move(sites)) {
    if(L < 1) throw ShapeError(fmt::format("region on a chain of {} sites", L));
    std::sort(sites_.begin(), sites_.end());
    if(std::adjacent_find(sites_.begin(), sites_.end()) != sites_.end()) throw ShapeError("region lists a site twice");
    for(int s : sites_)
        if(s < 1 || s > L) throw ShapeError(fmt::format("region site {} outside [1, {}]", s, L));
    if(sites_.empty() && !allow_empty) throw ShapeError("empty region");
}

Region Region::range(int L, int first, int last) {
    if(first > last) throw ShapeError(fmt::format("empty range {}:{}", first, last));
    std::vector<int> s;
    for(int i = first; i <= last; ++i) s.push_back(i);
    return Region(L, std::move(s));
}

Region Region::all(int L) { return range(L, 1, L); }

std::uint64_t Region::mask() const {
    std::uint64_t m = 0;
    for(int s : sites_) m |= std::uint64_t{1} << (total_ - s);
    return m;
}

Region Region::complement() const {
    std::vector<int> out;
    for(int s = 1; s <= total_; ++s)
        if(!std::binary_search(sites_.begin(), sites_.end(), s)) out.push_back(s);
    return Region(total_, std::move(out), true);
}

Region Region::united(const Region& other) const {
    if(other.total_ != total_) throw ShapeError("union of regions on different chains");
    std::vector<int> out;
    std::set_union(sites_.begin(), sites_.end(), other.sites_.begin(), other.sites_.end(), std::back_inserter(out));
    return Region(total_, std::move(out), true);
}

bool Region::disjoint(const Region& other) const { return (mask() & other.mask()) == 0; }

std::string Region::to_string() const {
    std::string out;
    for(std::size_t i = 0; i < sites_.size();) {
        std::size_t j = i;
        while(j + 1 < sites_.size() && sites_[j + 1] == sites_[j] + 1) ++j;
        if(!out.empty()) out += ',';
        out += j > i ? fmt::format("{}:{}", sites_[i], sites_[j]) : std::to_string(sites_[i]);
        i = j + 1;
    }
    return out;
}

// ---------------------------------------------------------------- DensityMatrix

namespace {

void check_density_matrix(const Eigen::MatrixXcd& m, const Eigen::VectorXd& spectrum, const Region& region) {
    const Eigen::Index expected = Eigen::Index{1} << region.size();
    if(m.rows() != expected || m.cols() != expected)
        throw ShapeError(fmt::format("{}x{} density matrix for a {}-site region", m.rows(), m.cols(), region.size()));
    const double herm = (m - m.adjoint()).cwiseAbs().maxCoeff();
    if(herm > 1e-10) throw NumericalError(fmt::format("density matrix not Hermitian (deviation {:.3g})", herm));
    const cplx tr = m.trace();
    if(std::abs(tr - 1.0) > 1e-10) throw NumericalError(fmt::format("density matrix trace {:.17g}", tr.real()));
    if(spectrum.size() > 0 && spectrum.minCoeff() < -1e-10)
        throw NumericalError(fmt::format("density matrix has eigenvalue {:.3g}", spectrum.minCoeff()));
}

Eigen::VectorXd hermitian_eigenvalues(const Eigen::MatrixXcd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
    if(es.info() != Eigen::Success) throw NumericalError("eigenvalue solver failed on a density matrix");
    return es.eigenvalues();
}

} // namespace

DensityMatrix::DensityMatrix(Region region, Eigen::MatrixXcd matrix, Eigen::VectorXd spectrum)
    : region_(std::move(region)), matrix_(std::move(matrix)), spectrum_(std::move(spectrum)) {
    check_density_matrix(matrix_, spectrum_, region_);
}

DensityMatrix::DensityMatrix(Region region, Eigen::MatrixXcd matrix) : region_(std::move(region)), matrix_(std::move(matrix)) {
    spectrum_ = hermitian_eigenvalues(matrix_);
    check_density_matrix(matrix_, spectrum_, region_);
}

DensityMatrix DensityMatrix::with_spectrum(Region region, Eigen::MatrixXcd matrix, Eigen::VectorXd spectrum) {
    if(spectrum.size() != matrix.rows()) throw ShapeError("spectrum length differs from the matrix dimension");
    return DensityMatrix(std::move(region), std::move(matrix), std::move(spectrum));
}

// ---------------------------------------------------------------- partial traces

namespace {

/// Compresses the bits of `index` selected by `bits` (listed most significant first) into a
/// contiguous integer.
std::uint64_t gather(std::uint64_t index, const std::vector<std::uint64_t>& bits) {
    std::uint64_t out = 0;
    for(auto b : bits) out = (out << 1) | ((index & b) ? 1u : 0u);
    return out;
}

std::vector<std::uint64_t> site_bits(const std::vector<int>& sites, int L) {
    std::vector<std::uint64_t> out;
    for(int s : sites) out.push_back(std::uint64_t{1} << (L - s));
    return out;
}

/// State reshaped as (region) x (complement).
Eigen::MatrixXcd bipartite_matrix(const PureState& state, const Region& region) {
    if(region.total_sites() != state.sites()) throw ShapeError(fmt::format("region on {} sites, state on {}", region.total_sites(), state.sites()));
    const Region complement = region.complement();
    const auto   a_bits     = site_bits(region.sites(), state.sites());
    const auto   b_bits     = site_bits(complement.sites(), state.sites());
    Eigen::MatrixXcd m(Eigen::Index{1} << region.size(), Eigen::Index{1} << complement.size());
    const auto&      amps = state.amplitudes();
    for(Eigen::Index i = 0; i < amps.size(); ++i) {
        const auto u = static_cast<std::uint64_t>(i);
        m(static_cast<Eigen::Index>(gather(u, a_bits)), static_cast<Eigen::Index>(gather(u, b_bits))) = amps[i];
    }
    return m;
}

/// Gram matrix of the smaller side; its spectrum is the nonzero spectrum of both reduced states.
Eigen::MatrixXcd small_gram(const Eigen::MatrixXcd& m) {
    if(m.rows() <= m.cols()) return m * m.adjoint();
    return m.adjoint() * m;
}

} // namespace

DensityMatrix reduced_density_matrix(const PureState& state, const Region& region) {
    const Eigen::MatrixXcd m   = bipartite_matrix(state, region);
    Eigen::MatrixXcd       rho = m * m.adjoint();
    Eigen::VectorXd        spectrum;
    if(m.rows() <= m.cols()) {
        spectrum = hermitian_eigenvalues(rho);
    } else {
        const Eigen::VectorXd nonzero = hermitian_eigenvalues(m.adjoint() * m);
        spectrum                      = Eigen::VectorXd::Zero(rho.rows());
        spectrum.tail(nonzero.size()) = nonzero;
        std::sort(spectrum.data(), spectrum.data() + spectrum.size());
    }
    return DensityMatrix::with_spectrum(region, std::move(rho), std::move(spectrum));
}

DensityMatrix reduced_density_matrix(const DensityMatrix& rho, const Region& region) {
    const Region& parent = rho.region();
    if(region.total_sites() != parent.total_sites()) throw ShapeError("region and density matrix live on different chains");
    if((region.mask() & ~parent.mask()) != 0)
        throw ShapeError(fmt::format("region {} is not contained in {}", region.to_string(), parent.to_string()));
    if(region == parent) return rho;

    // positions inside the parent's local basis
    const int        k = parent.size();
    std::vector<int> rest;
    for(int s : parent.sites())
        if(!std::binary_search(region.sites().begin(), region.sites().end(), s)) rest.push_back(s);
    auto local_bits = [&](const std::vector<int>& sites) {
        std::vector<std::uint64_t> out;
        for(int s : sites) {
            const auto pos = std::lower_bound(parent.sites().begin(), parent.sites().end(), s) - parent.sites().begin();
            out.push_back(std::uint64_t{1} << (k - 1 - pos));
        }
        return out;
    };
    const auto a_bits = local_bits(region.sites());
    const auto b_bits = local_bits(rest);
    const auto dim_a  = Eigen::Index{1} << a_bits.size();
    const auto dim_b  = Eigen::Index{1} << b_bits.size();

    // full local index for each (a, b)
    Eigen::Matrix<Eigen::Index, Eigen::Dynamic, Eigen::Dynamic> index(dim_a, dim_b);
    for(Eigen::Index i = 0; i < rho.dim(); ++i) {
        const auto u = static_cast<std::uint64_t>(i);
        index(static_cast<Eigen::Index>(gather(u, a_bits)), static_cast<Eigen::Index>(gather(u, b_bits))) = i;
    }
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim_a, dim_a);
    const auto&      m   = rho.matrix();
    for(Eigen::Index a = 0; a < dim_a; ++a)
        for(Eigen::Index ap = 0; ap < dim_a; ++ap) {
            cplx acc{0.0, 0.0};
            for(Eigen::Index b = 0; b < dim_b; ++b) acc += m(index(a, b), index(ap, b));
            out(a, ap) = acc;
        }
    return DensityMatrix(region, std::move(out));
}

// ---------------------------------------------------------------- entropies

double renyi_entropy(const DensityMatrix& rho, double n) {
    if(!(n > 0.0) || !std::isfinite(n)) throw DomainError(fmt::format("Renyi index must be positive and finite, got {}", n));
    const double floor = 64.0 * std::numeric_limits<double>::epsilon();
    const auto&  spec  = rho.spectrum();
    if(spec.size() > 0 && spec.minCoeff() < -1e-8)
        spdlog::warn("density matrix eigenvalue {:.3g} below -1e-8 clipped to zero", spec.minCoeff());
    double s = 0.0;
    if(n == 1.0) {
        for(double p : spec)
            if(p > floor) s -= p * std::log(p);
        return std::max(s, 0.0);
    }
    double moment = 0.0;
    for(double p : spec)
        if(p > floor) moment += std::pow(p, n);
    s = std::log(moment) / (1.0 - n);
    return std::max(s, 0.0);
}

double rdm_moment(const PureState& state, const Region& region, int n) {
    if(n < 1) throw DomainError(fmt::format("moment order must be >= 1, got {}", n));
    const Eigen::MatrixXcd g = small_gram(bipartite_matrix(state, region));
    Eigen::MatrixXcd       p = g;
    for(int k = 1; k < n; ++k) p = (p * g).eval();
    return p.trace().real();
}

double mutual_information(const PureState& state, const Region& a, const Region& b) {
    if(!a.disjoint(b)) throw DomainError(fmt::format("regions {} and {} overlap", a.to_string(), b.to_string()));
    return renyi_entropy(reduced_density_matrix(state, a), 1.0) + renyi_entropy(reduced_density_matrix(state, b), 1.0) -
           renyi_entropy(reduced_density_matrix(state, a.united(b)), 1.0);
}

double mutual_information(const DensityMatrix& rho, const Region& a, const Region& b) {
    if(!a.disjoint(b)) throw DomainError(fmt::format("regions {} and {} overlap", a.to_string(), b.to_string()));
    return renyi_entropy(reduced_density_matrix(rho, a), 1.0) + renyi_entropy(reduced_density_matrix(rho, b), 1.0) -
           renyi_entropy(reduced_density_matrix(rho, a.united(b)), 1.0);
}

ResultTable entropy_sweep(const SpectralData& spec, const HermitianOperator& H, const PureState& state0, const FilterBackend& backend,
                          const std::vector<double>& taus, const Region& region, const std::vector<double>& ns) {
    ResultTable table("entropies", {"L", "tau", "n", "region", "entropy"});
    for(double tau : taus) {
        const PureState     psi = filter_state(spec, H, state0, tau, backend);
        const DensityMatrix rho = reduced_density_matrix(psi, region);
        for(double n : ns) table.add_row({static_cast<long long>(state0.sites()), tau, n, region.to_string(), renyi_entropy(rho, n)});
    }
    return table;
}

} // namespace efqs
