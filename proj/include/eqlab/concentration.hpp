#pragma once

#include <cstdint>
#include <vector>

#include "eqlab/quench.hpp"

namespace eqlab {

struct TailReport {
    Quantity quantity = Quantity::observable;
    double g = 0.0;  // concentration scale: ||A|| sqrt(tr w^2) or tr w^2
    double fbar = 0.0;
    std::vector<double> delta_grid;
    std::vector<double> empirical;
    std::vector<double> bound;
};

// Pr[|f - f̄| >= delta] <= 2e exp(-delta/(e g)).
double tail_bound(double g, double delta);

TailReport empirical_tail(const QuenchSetup& setup, Quantity quantity,
                          std::vector<double> delta_grid, double T, std::uint64_t n_samples,
                          std::uint64_t seed);

struct RecurrenceEvent {
    double t_start;
    double duration;
};

struct RecurrenceScan {
    Quantity quantity = Quantity::observable;
    double u = 0.0;
    double delta = 0.0;
    double dt = 0.0;  // effective step after the pi/(10 ||H||) cap
    double t_max = 0.0;
    double c_A = 0.0;  // (f(0) - f̄)/||A|| for observables, 1 - F̄ for fidelity
    std::vector<RecurrenceEvent> events;
    bool never_leaves = false;  // closeness condition held on the whole grid
    bool empirical_T_defined = false;
    double empirical_T = 0.0;  // t_start of last event / event count
    bool lower_bound_defined = false;
    double lower_bound = 0.0;  // from the applicable corollary, when hypotheses hold
};

// Grid scan for Definition-3 recurrences. Maximal satisfied runs of span >=
// delta become events; the run containing t=0 is excluded (initial residence)
// and runs clipped by the horizon are not counted.
RecurrenceScan recurrence_scan(const QuenchSetup& setup, Quantity quantity, double u, double delta,
                               double dt, double t_max, double tol = -1.0);

// Corollary lower bounds on the average recurrence time.
// observable: (Delta/2e)  exp((c_A - u)/(e sqrt(purity))), requires u <= c_A
// fidelity:   (Delta/2e^2) exp((1 - u)/(e purity))         (prefactor as printed)
double recurrence_lower_bound(Quantity kind, double c_A, double u, double delta, double purity);

enum class FermionRecurrenceKind { correlator, fidelity };

// correlator: (Delta/2e) exp((c_f - u)/(e c^2) sqrt(L/nu)), requires u <= c_f
// fidelity:   (Delta/2e) exp((1 - u) L/(e c^4))
double fermion_recurrence_lower_bound(FermionRecurrenceKind kind, double c_f, double u, double delta,
                                      double c_const, double nu, int L);

}  // namespace eqlab
