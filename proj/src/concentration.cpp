#include "eqlab/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace eqlab {

namespace {
constexpr double kE = std::numbers::e;
}

double tail_bound(double g, double delta) {
    require(g > 0.0, "tail_bound: g must be positive");
    require(delta >= 0.0, "tail_bound: delta must be non-negative");
    return 2.0 * kE * std::exp(-delta / (kE * g));
}

TailReport empirical_tail(const QuenchSetup& setup, Quantity quantity, std::vector<double> delta_grid,
                          double T, std::uint64_t n_samples, std::uint64_t seed) {
    std::sort(delta_grid.begin(), delta_grid.end());
    TailReport rep;
    rep.quantity = quantity;
    const DiagonalEnsemble de = diagonal_ensemble(setup);
    rep.g = (quantity == Quantity::observable) ? setup.obs_norm * std::sqrt(de.purity) : de.purity;
    rep.fbar = time_average(setup, quantity);
    rep.delta_grid = delta_grid;

    const std::vector<double> vals = sample_values(setup, quantity, T, n_samples, seed);
    rep.empirical.resize(delta_grid.size());
    rep.bound.resize(delta_grid.size());
    // one pass: sort |f - fbar| once, tails are suffix counts
    std::vector<double> dev(vals.size());
    for (std::size_t i = 0; i < vals.size(); ++i) dev[i] = std::abs(vals[i] - rep.fbar);
    std::sort(dev.begin(), dev.end());
    for (std::size_t k = 0; k < delta_grid.size(); ++k) {
        const auto it = std::lower_bound(dev.begin(), dev.end(), delta_grid[k]);
        rep.empirical[k] = double(dev.end() - it) / double(n_samples);
        rep.bound[k] = tail_bound(rep.g, delta_grid[k]);
    }
    return rep;
}

RecurrenceScan recurrence_scan(const QuenchSetup& setup, Quantity quantity, double u, double delta,
                               double dt, double t_max, double tol) {
    if (quantity == Quantity::observable)
        require(u > 0.0 && u <= 2.0, "recurrence_scan: observable u must be in (0, 2]");
    else
        require(u > 0.0 && u <= 1.0, "recurrence_scan: fidelity u must be in (0, 1]");
    require(delta > 0.0 && dt > 0.0 && t_max > delta, "recurrence_scan: invalid grid parameters");

    RecurrenceScan scan;
    scan.quantity = quantity;
    scan.u = u;
    scan.delta = delta;
    scan.t_max = t_max;

    const double hnorm = setup.spectrum.max_abs_eigenvalue();
    const double dt_cap = std::numbers::pi / (10.0 * std::max(hnorm, 1e-300));
    scan.dt = std::min(dt, dt_cap);

    const double fbar = time_average(setup, quantity, tol);
    const DiagonalEnsemble de = diagonal_ensemble(setup);

    double f0, threshold;
    if (quantity == Quantity::observable) {
        f0 = expectation_at(setup, 0.0);
        threshold = u * setup.obs_norm;
        scan.c_A = (f0 - fbar) / std::max(setup.obs_norm, 1e-300);
    } else {
        f0 = 1.0;  // F(0) = 1
        threshold = u;
        scan.c_A = 1.0 - fbar;
    }

    const std::uint64_t n_grid = static_cast<std::uint64_t>(std::floor(t_max / scan.dt)) + 1;
    require(n_grid <= 200'000'000ULL, "recurrence_scan: grid too large; raise dt or lower t_max");

    std::vector<unsigned char> ok(n_grid);
    const std::int64_t ng = static_cast<std::int64_t>(n_grid);
    if (quantity == Quantity::observable) {
#pragma omp parallel
        {
            std::vector<cplx> ubuf(setup.dim()), vbuf(setup.dim());
#pragma omp for schedule(static)
            for (std::int64_t i = 0; i < ng; ++i) {
                const double t = double(i) * scan.dt;
                double f;
                {
                    // inline of expectation_at with scratch
                    const int n = setup.dim();
                    for (int m = 0; m < n; ++m) {
                        const double ph = -setup.spectrum.eigenvalues[m] * t;
                        ubuf[m] = setup.coeffs[m] * cplx(std::cos(ph), std::sin(ph));
                    }
                    cplx acc(0.0, 0.0);
                    for (int m = 0; m < n; ++m) {
                        const cplx* row = setup.obs.data() + static_cast<std::size_t>(m) * n;
                        cplx s(0.0, 0.0);
                        for (int j = 0; j < n; ++j) s += row[j] * ubuf[j];
                        acc += std::conj(ubuf[m]) * s;
                    }
                    f = acc.real();
                }
                ok[static_cast<std::size_t>(i)] = std::abs(f - f0) <= threshold ? 1 : 0;
            }
        }
    } else {
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < ng; ++i) {
            const double t = double(i) * scan.dt;
            ok[static_cast<std::size_t>(i)] = (1.0 - fidelity_at(setup, t)) <= u ? 1 : 0;
        }
    }

    // maximal satisfied runs -> events
    std::uint64_t i = 0;
    while (i < n_grid) {
        if (!ok[i]) {
            ++i;
            continue;
        }
        std::uint64_t j = i;
        while (j + 1 < n_grid && ok[j + 1]) ++j;
        const bool contains_t0 = (i == 0);
        const bool clipped = (j == n_grid - 1);
        const double span = double(j - i) * scan.dt;
        if (contains_t0 && clipped) scan.never_leaves = true;
        if (!contains_t0 && !clipped && span >= delta)
            scan.events.push_back({double(i) * scan.dt, span});
        i = j + 1;
    }

    if (!scan.events.empty()) {
        scan.empirical_T_defined = true;
        scan.empirical_T = scan.events.back().t_start / double(scan.events.size());
    }

    // corollary bound when its hypotheses hold
    if (quantity == Quantity::observable) {
        if (scan.c_A >= 0.0 && u <= scan.c_A) {
            scan.lower_bound = recurrence_lower_bound(quantity, scan.c_A, u, delta, de.purity);
            scan.lower_bound_defined = true;
        }
    } else if (u < 1.0) {
        scan.lower_bound = recurrence_lower_bound(quantity, 1.0, u, delta, de.purity);
        scan.lower_bound_defined = true;
    }
    return scan;
}

double recurrence_lower_bound(Quantity kind, double c_A, double u, double delta, double purity) {
    require(delta > 0.0, "recurrence_lower_bound: delta must be positive");
    require(purity > 0.0 && purity <= 1.0 + 1e-12, "recurrence_lower_bound: purity must be in (0,1]");
    if (kind == Quantity::observable) {
        require(u > 0.0 && u <= c_A, "recurrence_lower_bound: requires 0 < u <= c_A");
        return delta / (2.0 * kE) * std::exp((c_A - u) / (kE * std::sqrt(purity)));
    }
    require(u > 0.0 && u < 1.0, "recurrence_lower_bound: fidelity u must be in (0,1)");
    return delta / (2.0 * kE * kE) * std::exp((1.0 - u) / (kE * purity));
}

double fermion_recurrence_lower_bound(FermionRecurrenceKind kind, double c_f, double u, double delta,
                                      double c_const, double nu, int L) {
    require(delta > 0.0 && c_const > 0.0 && L >= 1, "fermion_recurrence_lower_bound: bad parameters");
    if (kind == FermionRecurrenceKind::correlator) {
        require(nu > 0.0, "fermion_recurrence_lower_bound: filling must be positive");
        require(u > 0.0 && u <= c_f, "fermion_recurrence_lower_bound: requires 0 < u <= c_f");
        return delta / (2.0 * kE) *
               std::exp((c_f - u) / (kE * c_const * c_const) * std::sqrt(double(L) / nu));
    }
    require(u > 0.0 && u < 1.0, "fermion_recurrence_lower_bound: fidelity u must be in (0,1)");
    const double c4 = c_const * c_const * c_const * c_const;
    return delta / (2.0 * kE) * std::exp((1.0 - u) * double(L) / (kE * c4));
}

}  // namespace eqlab
