#pragma once

#include "efqs/density_matrix.hpp"
#include "efqs/filter.hpp"
#include "efqs/region.hpp"
#include "efqs/result_table.hpp"
#include "efqs/spin_core.hpp"

#include <vector>

namespace efqs {

/// Partial trace over the complement of `region`. Region sites need not be contiguous.
DensityMatrix reduced_density_matrix(const PureState& state, const Region& region);

/// `region` must be a subset of rho.region().
DensityMatrix reduced_density_matrix(const DensityMatrix& rho, const Region& region);

/// S_n = log Tr rho^n / (1 - n); n == 1 gives -Tr rho log rho. Eigenvalues below 64 eps are taken as
/// zero, and a warning is logged for any eigenvalue below -1e-8. Throws DomainError for n <= 0.
double renyi_entropy(const DensityMatrix& rho, double n);

/// Tr rho_A^n as Tr (G^n) with G the smaller of M M^dagger and M^dagger M, where M is the state
/// reshaped to region x complement. No diagonalization is involved.
double rdm_moment(const PureState& state, const Region& region, int n);

/// S_1(A) + S_1(B) - S_1(A u B). Throws DomainError when A and B overlap.
double mutual_information(const PureState& state, const Region& a, const Region& b);
double mutual_information(const DensityMatrix& rho, const Region& a, const Region& b);

/// Rényi entropies of `region` on filtered states; columns L,tau,n,region,entropy.
ResultTable entropy_sweep(const SpectralData& spec, const HermitianOperator& H, const PureState& state0, const FilterBackend& backend,
                          const std::vector<double>& taus, const Region& region, const std::vector<double>& ns);

} // namespace efqs
