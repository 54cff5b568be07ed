#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "eqlab/quench.hpp"

namespace eqlab {

// One Bohr-frequency term of f(t) - f̄ = sum_e w_e exp(i g_e t).
struct GapEntry {
    double gap;
    cplx w;
};

// Flattened oscillating part of the dynamics. Entries with |gap| <= tol are
// folded into fbar instead (that is what makes degenerate spectra exact).
struct GapTable {
    std::vector<GapEntry> entries;
    cplx fbar = 0.0;     // complex only for fermionic cross correlators
    double tol = 0.0;    // resonance tolerance the table was built with
    double scale = 1.0;  // ~ 2||A||, used for residue thresholds
};

struct GenericityViolation {
    int q;
    std::vector<int> set_a, set_b;
    double sum_a, sum_b;
};

struct GenericityReport {
    int q_checked = 0;
    double tol = 0.0;
    std::vector<GenericityViolation> violations;
    std::vector<std::pair<int, int>> degenerate_levels;
    bool passed = false;
};

struct MomentReport {
    int q = 0;
    double mu_exact = 0.0;
    double mu_sampled = 0.0;
    double sampled_stderr = 0.0;
    bool has_sampled = false;
    double bound = 0.0;
    bool bound_applicable = false;
    bool bound_satisfied = false;
};

// Enumeration cost envelope: the join stores N^floor(q/2) tuples and streams
// N^ceil(q/2). Exceeding it raises CostEnvelopeError instead of thrashing.
struct MomentEngineLimits {
    std::size_t max_stored = 40'000'000;
    std::size_t max_streamed = 200'000'000;
};

struct CostEnvelopeError : std::runtime_error {
    double stored_estimate, streamed_estimate;
    CostEnvelopeError(const std::string& msg, double stored, double streamed)
        : std::runtime_error(msg), stored_estimate(stored), streamed_estimate(streamed) {}
};

GapTable gap_table(const QuenchSetup& setup, Quantity q, double tol = -1.0);

// Definition-1 style spectrum check. q=1 (always on): non-degenerate levels.
// q=2: all pairwise sums E_i + E_j (i<=j) distinct, which is equivalent to the
// non-degenerate-gaps condition. q=3: sums over 3-element subsets distinct.
GenericityReport check_genericity(const std::vector<double>& eigenvalues, int q_max, double tol);

// Exact infinite-time central moment mu_q = sum over ordered q-tuples of
// entries whose gaps sum to zero within q*tol, of the product of weights.
// Pure enumeration: valid for resonant and degenerate spectra alike.
// `enforce_real` checks the imaginary residue against 1e-8 * scale^q (only
// meaningful for conjugate-symmetric tables).
double exact_moment(const GapTable& table, int q, const MomentEngineLimits& limits = {},
                    bool enforce_real = true);

// Absolute central moment avg |f - f̄|^q for even q: the conjugate factors are
// drawn from the negated-gap conjugated table. Equals exact_moment for real
// series; required for the complex fermionic cross correlators.
double exact_abs_moment(const GapTable& table, int q, const MomentEngineLimits& limits = {});

// Brute-force O(N^q) nested-loop enumerator. Serial reference for tests and
// the kernel benchmark; do not use beyond toy tables.
cplx exact_moment_reference(const GapTable& table, int q);

std::pair<double, double> sampled_moment(const QuenchSetup& setup, Quantity quantity, int q, double T,
                                         std::uint64_t n_samples, std::uint64_t seed);

// !q with !0 = 1, via the recurrence !q = (q-1)(!(q-1) + !(q-2)).
std::uint64_t derangement_count(int q);

// Theorem bounds: observable (q ||A|| sqrt(purity))^q, fidelity (q purity)^q.
double moment_bound(Quantity kind, double obs_norm, double purity, int q);

struct TracePowerCheck {
    double lhs = 0.0;  // |tr (A omega)^q|
    double rhs = 0.0;  // (||A|| sqrt(tr omega^2))^q
    bool ok = false;
};

TracePowerCheck trace_power_check(const QuenchSetup& setup, int q);

// Shared engine entry point (exposed for the fermion module and the bench):
// sum over (a+b)-tuples, a factors from `left`, b from `right`, with total gap
// in the half-open window [-window, +window).
cplx tuple_resonance_sum(const std::vector<GapEntry>& left, int a, const std::vector<GapEntry>& right,
                         int b, double window, const MomentEngineLimits& limits);

}  // namespace eqlab
