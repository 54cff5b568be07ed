#pragma once

#include <cstdint>
#include <vector>

#include "eqlab/matrix.hpp"

namespace eqlab {

// Spin-1/2 chain with nearest and next-nearest couplings, restricted to a
// fixed total-S^Z sector. Convention: S^+- = sigma^+- (hop amplitude 1),
// S^Z = sigma^Z / 2.
struct SpinChainSpec {
    int L = 0;
    double J1 = 0.0, g1 = 0.0;  // nearest-neighbour hop / ZZ
    double J2 = 0.0, g2 = 0.0;  // next-nearest hop / ZZ
    bool periodic = true;
    int n_up = 0;
};

// Sector basis: bit patterns with popcount == n_up, ascending; bit j <-> site
// j+1, set bit = up spin. This ordering is what every CSV dump uses.
std::vector<std::uint64_t> sector_configs(int L, int n_up);

std::uint64_t binomial(int n, int k);

HermitianOperator build_spin_chain(const SpinChainSpec& spec);

enum class StateKind { neel, neel_symmetric, domainwall_translated };

BasisState build_state(StateKind kind, int L, int n_up);

// sigma^Z on `site` (1-based), diagonal +-1 in the sector basis.
HermitianOperator site_observable(int site, int L, int n_up);

// GUE draw: off-diagonal entries complex gaussian with unit second moment,
// real gaussian diagonal. Deterministic per seed.
HermitianOperator random_hermitian(int D, std::uint64_t seed);

// Haar-like random state: normalized complex gaussian vector.
BasisState random_state(int D, std::uint64_t seed);

}  // namespace eqlab
