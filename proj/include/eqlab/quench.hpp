#pragma once

#include <cstdint>
#include <vector>

#include "eqlab/eigensolve.hpp"
#include "eqlab/matrix.hpp"

namespace eqlab {

enum class Quantity { observable, fidelity };

// Everything needed to evaluate f(t) = <A(t)> and F(t): state coefficients
// and the observable, both in the energy eigenbasis.
struct QuenchSetup {
    Spectrum spectrum;
    std::vector<cplx> coeffs;  // c_m = <E_m|Psi>
    std::vector<cplx> obs;     // A_mn = <E_m|A|E_n>, row-major
    double obs_norm = 0.0;

    int dim() const { return spectrum.dim; }
};

struct DiagonalEnsemble {
    std::vector<double> populations;  // p_m = |c_m|^2
    double purity = 0.0;              // tr omega^2
    double effective_dimension = 0.0;
    double energy_mean = 0.0;
    double energy_variance = 0.0;
};

struct SampledHistogram {
    std::vector<double> edges;    // n_bins + 1
    std::vector<double> density;  // normalized: sum density*width = 1
    double T = 0.0;
    std::uint64_t n_samples = 0;
    std::uint64_t seed = 0;
    double sample_mean = 0.0;
    double sample_variance = 0.0;
};

// Default resonance tolerance: 1e-10 * ||H|| (configurable everywhere it is used).
double default_resonance_tol(const Spectrum& s);

// Smallest |E_m - E_n| above the resonance tolerance; 0 if none.
double min_nonzero_gap(const Spectrum& s, double tol);

// Default sampling horizon T = 1e4 * 2pi / g_min.
double default_horizon(const Spectrum& s, double tol);

QuenchSetup make_setup(const Spectrum& spectrum, const BasisState& psi, const HermitianOperator& A);

DiagonalEnsemble diagonal_ensemble(const QuenchSetup& setup);
// Purity et al. need only the coefficients; this avoids rotating an observable.
DiagonalEnsemble diagonal_ensemble(const Spectrum& spectrum, const BasisState& psi);

double expectation_at(const QuenchSetup& setup, double t);
double fidelity_at(const QuenchSetup& setup, double t);

// Infinite-time average. Degenerate spectra are handled by summing every
// resonant pair |E_m - E_n| <= tol, not just m = n.
double time_average(const QuenchSetup& setup, double tol = -1.0);
double time_average(const QuenchSetup& setup, Quantity q, double tol = -1.0);

// f(t_i) or F(t_i) at n seeded uniform times in [0, T]. Counter-based RNG:
// the result is bit-identical for any OpenMP thread count.
std::vector<double> sample_values(const QuenchSetup& setup, Quantity q, double T, std::uint64_t n,
                                  std::uint64_t seed);

SampledHistogram sample_histogram(const QuenchSetup& setup, Quantity q, double T, std::uint64_t n_samples,
                                  int n_bins, std::uint64_t seed);

}  // namespace eqlab
