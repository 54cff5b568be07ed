#include "eqlab/lattice.hpp"

#include <bit>
#include <cmath>
#include <unordered_map>

#include "eqlab/rng.hpp"

namespace eqlab {

std::uint64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    std::uint64_t r = 1;
    for (int i = 0; i < std::min(k, n - k); ++i) r = r * (n - i) / (i + 1);
    return r;
}

std::vector<std::uint64_t> sector_configs(int L, int n_up) {
    require(L >= 1 && L <= 28, "sector_configs: L must be in [1, 28] (dense enumeration)");
    std::vector<std::uint64_t> out;
    out.reserve(binomial(L, n_up));
    for (std::uint64_t b = 0; b < (1ULL << L); ++b)
        if (std::popcount(b) == n_up) out.push_back(b);
    return out;
}

HermitianOperator build_spin_chain(const SpinChainSpec& spec) {
    require(spec.L >= 2, "build_spin_chain: L must be >= 2");
    require(spec.n_up >= 0 && spec.n_up <= spec.L, "build_spin_chain: empty sector (n_up out of range)");
    require(!(spec.L < 3 && spec.periodic && spec.J2 != 0.0),
            "build_spin_chain: degenerate geometry (L < 3 with J2 != 0)");

    const auto configs = sector_configs(spec.L, spec.n_up);
    const int D = static_cast<int>(configs.size());
    std::unordered_map<std::uint64_t, int> index;
    index.reserve(configs.size());
    for (int i = 0; i < D; ++i) index[configs[i]] = i;

    HermitianOperator H(D);
    const int L = spec.L;
    for (int i = 0; i < D; ++i) {
        const std::uint64_t b = configs[i];
        double diag = 0.0;
        for (int j = 0; j < L; ++j) {
            const struct {
                double J, g;
                int d;
            } terms[2] = {{spec.J1, spec.g1, 1}, {spec.J2, spec.g2, 2}};
            for (const auto& t : terms) {
                if (!spec.periodic && j + t.d >= L) continue;  // open chain: drop wrapped bonds
                const int k = (j + t.d) % L;
                const int zj = (b >> j) & 1 ? 1 : -1;
                const int zk = (b >> k) & 1 ? 1 : -1;
                diag += t.g * 0.25 * zj * zk;  // S^Z S^Z with S^Z = sigma^Z/2
                if (t.J != 0.0 && zj != zk) {
                    const std::uint64_t b2 = b ^ (1ULL << j) ^ (1ULL << k);
                    H.at(index.at(b2), i) += t.J;  // S+S- + S-S+ hop
                }
            }
        }
        H.at(i, i) += diag;
    }
    return H;
}

namespace {

std::uint64_t neel_pattern(int L) {
    std::uint64_t b = 0;
    for (int j = 0; j < L; j += 2) b |= 1ULL << j;  // sites 1,3,5,... up
    return b;
}

std::uint64_t rotl_bits(std::uint64_t b, int r, int L) {
    r %= L;
    if (r == 0) return b;
    const std::uint64_t mask = (1ULL << L) - 1;
    return ((b << r) | (b >> (L - r))) & mask;
}

int config_index(const std::vector<std::uint64_t>& configs, std::uint64_t b) {
    const auto it = std::lower_bound(configs.begin(), configs.end(), b);
    require(it != configs.end() && *it == b, "state pattern not in sector");
    return static_cast<int>(it - configs.begin());
}

}  // namespace

BasisState build_state(StateKind kind, int L, int n_up) {
    require(L >= 2, "build_state: L must be >= 2");
    require(n_up >= 0 && n_up <= L, "build_state: n_up out of range");
    if (kind == StateKind::neel || kind == StateKind::neel_symmetric) {
        require(L % 2 == 0, "build_state: Neel states require even L");
        require(n_up == L / 2, "build_state: Neel states live in the n_up = L/2 sector");
    }

    const auto configs = sector_configs(L, n_up);
    BasisState psi;
    psi.dim = static_cast<int>(configs.size());
    psi.amp.assign(psi.dim, cplx(0.0, 0.0));

    switch (kind) {
        case StateKind::neel:
            psi.amp[config_index(configs, neel_pattern(L))] = 1.0;
            break;
        case StateKind::neel_symmetric: {
            const std::uint64_t a = neel_pattern(L);
            const std::uint64_t mask = (1ULL << L) - 1;
            const double w = 1.0 / std::sqrt(2.0);
            psi.amp[config_index(configs, a)] += w;
            psi.amp[config_index(configs, a ^ mask)] += w;
            break;
        }
        case StateKind::domainwall_translated: {
            const std::uint64_t dw = (1ULL << n_up) - 1;
            const double w = 1.0 / std::sqrt(double(L));
            for (int r = 0; r < L; ++r) psi.amp[config_index(configs, rotl_bits(dw, r, L))] += w;
            double n2 = psi.norm2();
            const double inv = 1.0 / std::sqrt(n2);
            for (cplx& z : psi.amp) z *= inv;
            break;
        }
    }
    return psi;
}

HermitianOperator site_observable(int site, int L, int n_up) {
    require(site >= 1 && site <= L, "site_observable: site out of range");
    const auto configs = sector_configs(L, n_up);
    const int D = static_cast<int>(configs.size());
    HermitianOperator A(D);
    for (int i = 0; i < D; ++i)
        A.at(i, i) = ((configs[i] >> (site - 1)) & 1) ? 1.0 : -1.0;
    return A;
}

HermitianOperator random_hermitian(int D, std::uint64_t seed) {
    require(D >= 1, "random_hermitian: D must be >= 1");
    HermitianOperator H(D);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (int i = 0; i < D; ++i) {
        for (int j = i; j < D; ++j) {
            double z0, z1;
            rng::counter_gauss_pair(seed, static_cast<std::uint64_t>(i) * D + j, z0, z1);
            if (i == j) {
                H.at(i, i) = z0;
            } else {
                const cplx z(z0 * inv_sqrt2, z1 * inv_sqrt2);
                H.at(i, j) = z;
                H.at(j, i) = std::conj(z);
            }
        }
    }
    return H;
}

BasisState random_state(int D, std::uint64_t seed) {
    require(D >= 1, "random_state: D must be >= 1");
    BasisState psi;
    psi.dim = D;
    psi.amp.resize(D);
    for (int i = 0; i < D; ++i) {
        double z0, z1;
        rng::counter_gauss_pair(seed ^ 0xABCDEF0123456789ULL, i, z0, z1);
        psi.amp[i] = cplx(z0, z1);
    }
    const double inv = 1.0 / std::sqrt(psi.norm2());
    for (cplx& z : psi.amp) z *= inv;
    return psi;
}

}  // namespace eqlab
