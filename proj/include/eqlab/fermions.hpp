#pragma once

#include <cstdint>
#include <vector>

#include "eqlab/moments.hpp"

namespace eqlab {

struct ExtensivityCheck {
    double constant = 0.0;  // measured sqrt(L) * max |O_jk|
    double threshold = 4.0;
    bool passed = false;
};

// Quadratic fermion Hamiltonian H = sum M_mn f†_m f_n in its diagonal frame:
// M = O diag(eps) O^T with O real orthogonal, mode k = column k of O.
struct FreeFermionModel {
    int L = 0;
    std::vector<double> M;    // L x L row-major
    std::vector<double> O;    // L x L row-major
    std::vector<double> eps;  // ascending
    GenericityReport genericity;
    ExtensivityCheck extensivity;

    double o(int j, int k) const { return O[static_cast<std::size_t>(j) * L + k]; }
    double m(int i, int j) const { return M[static_cast<std::size_t>(i) * L + j]; }
};

// Gaussian state described by the mode-space correlation matrix
// Lambda_kl = <d†_k d_l> (Hermitian, eigenvalues in [0,1]).
struct ModeState {
    int L = 0;
    std::vector<cplx> lambda;  // L x L row-major
    double particle_number = 0.0;
    double filling = 0.0;

    cplx lam(int k, int l) const { return lambda[static_cast<std::size_t>(k) * L + l]; }
};

struct PropagatorStats {
    int m = 0, n = 0;
    double omega_mn = 0.0;  // sum_k O_mk^2 O_nk^2
    double c_const = 0.0;   // sqrt(L) max_k {|O_mk|, |O_nk|}
};

FreeFermionModel build_free_model(std::vector<double> M, int L, double ext_threshold = 4.0);

// Real Fourier mode matrix (|O_jk| <= sqrt(2/L)) with i.i.d. uniform [-1,1]
// eigenmodes, redrawn until the q<=3 genericity check passes.
FreeFermionModel generic_extended_model(int L, std::uint64_t seed, double ext_threshold = 4.0);

// Slater determinant occupying the given modes: Lambda diagonal 0/1.
ModeState slater_state(const FreeFermionModel& model, const std::vector<int>& occupied_modes);

// Real-space product state prod f†_m|0> rotated to mode space:
// Lambda = sum_{m in sites} O_m O_m^T (coherent in mode space).
ModeState site_slater_state(const FreeFermionModel& model, const std::vector<int>& occupied_sites);

// Validating constructor for a caller-supplied correlation matrix.
ModeState mode_state_from_matrix(const FreeFermionModel& model, std::vector<cplx> lambda);

// <f†_m f_n(t)> = sum_{k,l} O_mk O_nl Lambda_kl exp(i(eps_k - eps_l) t)
cplx correlator_at(const FreeFermionModel& model, const ModeState& state, int m, int n, double t);

// a_mn(t) = {f†_m(t), f_n} = sum_k O_mk O_nk exp(i eps_k t)
cplx propagator_at(const FreeFermionModel& model, int m, int n, double t);

PropagatorStats propagator_stats(const FreeFermionModel& model, int m, int n);

// Gap tables in the L x L single-particle space (shared moment engine input).
GapTable correlator_gap_table(const FreeFermionModel& model, const ModeState& state, int m, int n,
                              double tol = -1.0);
GapTable propagator_sq_gap_table(const FreeFermionModel& model, int m, int n, double tol = -1.0);

// Exact moments with the applicable theorem bound:
//  - correlator, even q: mu_q = avg |f - f̄|^q <= (q c^2 sqrt(nu/L))^q
//  - correlator, odd q:  Re avg (f - f̄)^q, no bound
//  - |a_mn|^2, any q:    plain central moment, bound (q c^4 / L)^q
MomentReport free_moment_exact_correlator(const FreeFermionModel& model, const ModeState& state, int m,
                                          int n, int q, double tol = -1.0,
                                          const MomentEngineLimits& limits = {});
MomentReport free_moment_exact_propagator(const FreeFermionModel& model, int m, int n, int q,
                                          double tol = -1.0, const MomentEngineLimits& limits = {});

// Monte Carlo estimates matching the definitions above: (mean, stderr).
std::pair<double, double> free_sampled_moment_correlator(const FreeFermionModel& model,
                                                         const ModeState& state, int m, int n, int q,
                                                         double T, std::uint64_t n_samples,
                                                         std::uint64_t seed, double tol = -1.0);
std::pair<double, double> free_sampled_moment_propagator(const FreeFermionModel& model, int m, int n,
                                                         int q, double T, std::uint64_t n_samples,
                                                         std::uint64_t seed, double tol = -1.0);

double fermion_resonance_tol(const FreeFermionModel& model);

}  // namespace eqlab
