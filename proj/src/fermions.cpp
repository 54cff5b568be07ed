#include "eqlab/fermions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "eqlab/eigensolve.hpp"
#include "eqlab/rng.hpp"

namespace eqlab {

namespace {

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

ExtensivityCheck extensivity_check(const std::vector<double>& O, int L, double threshold) {
    ExtensivityCheck c;
    c.threshold = threshold;
    c.constant = std::sqrt(double(L)) * max_abs(O);
    c.passed = c.constant <= threshold;
    return c;
}

GenericityReport mode_genericity(const std::vector<double>& eps) {
    const double scale = std::max(max_abs(eps), 1e-300);
    return check_genericity(eps, 3, 1e-10 * scale);
}

}  // namespace

double fermion_resonance_tol(const FreeFermionModel& model) {
    double m = 0.0;
    for (double e : model.eps) m = std::max(m, std::abs(e));
    return 1e-10 * (m > 0.0 ? m : 1.0);
}

FreeFermionModel build_free_model(std::vector<double> M, int L, double ext_threshold) {
    require(L >= 2, "build_free_model: L must be >= 2");
    require(M.size() == static_cast<std::size_t>(L) * L, "build_free_model: M must be L x L");
    const double mscale = std::max(1.0, max_abs(M));
    for (int i = 0; i < L; ++i)
        for (int j = i + 1; j < L; ++j)
            require(std::abs(M[static_cast<std::size_t>(i) * L + j] -
                             M[static_cast<std::size_t>(j) * L + i]) <= 1e-12 * mscale,
                    "build_free_model: M must be symmetric");

    FreeFermionModel model;
    model.L = L;
    model.M = M;

    std::vector<double> A = M, V;
    jacobi_tournament(A, V, L);
    std::vector<int> order(L);
    for (int k = 0; k < L; ++k) order[k] = k;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return A[static_cast<std::size_t>(a) * L + a] < A[static_cast<std::size_t>(b) * L + b];
    });
    model.eps.resize(L);
    model.O.resize(static_cast<std::size_t>(L) * L);
    for (int k = 0; k < L; ++k) {
        const int src = order[k];
        model.eps[k] = A[static_cast<std::size_t>(src) * L + src];
        // sign convention: leading component positive
        int imax = 0;
        double amax = -1.0;
        for (int i = 0; i < L; ++i) {
            const double v = std::abs(V[static_cast<std::size_t>(i) * L + src]);
            if (v > amax) {
                amax = v;
                imax = i;
            }
        }
        const double sgn = V[static_cast<std::size_t>(imax) * L + src] < 0.0 ? -1.0 : 1.0;
        for (int i = 0; i < L; ++i)
            model.O[static_cast<std::size_t>(i) * L + k] = sgn * V[static_cast<std::size_t>(i) * L + src];
    }
    model.genericity = mode_genericity(model.eps);
    model.extensivity = extensivity_check(model.O, L, ext_threshold);
    return model;
}

FreeFermionModel generic_extended_model(int L, std::uint64_t seed, double ext_threshold) {
    require(L >= 2, "generic_extended_model: L must be >= 2");

    // real Fourier basis: constant, cos/sin pairs, and (even L) alternating
    std::vector<double> O(static_cast<std::size_t>(L) * L, 0.0);
    int col = 0;
    const double invs = 1.0 / std::sqrt(double(L));
    for (int j = 0; j < L; ++j) O[static_cast<std::size_t>(j) * L + col] = invs;
    ++col;
    const double amp = std::sqrt(2.0 / double(L));
    for (int k = 1; 2 * k < L; ++k) {
        for (int j = 0; j < L; ++j) {
            const double arg = 2.0 * std::numbers::pi * double(k) * double(j) / double(L);
            O[static_cast<std::size_t>(j) * L + col] = amp * std::cos(arg);
            O[static_cast<std::size_t>(j) * L + col + 1] = amp * std::sin(arg);
        }
        col += 2;
    }
    if (L % 2 == 0) {
        for (int j = 0; j < L; ++j)
            O[static_cast<std::size_t>(j) * L + col] = (j % 2 == 0 ? invs : -invs);
        ++col;
    }
    require(col == L, "generic_extended_model: internal mode count mismatch");

    FreeFermionModel model;
    model.L = L;
    for (int attempt = 0; attempt < 100; ++attempt) {
        rng::Sequence rs(seed + 0x9E3779B9ULL * static_cast<std::uint64_t>(attempt));
        std::vector<double> eps(L);
        for (int k = 0; k < L; ++k) eps[k] = rs.uniform(-1.0, 1.0);
        GenericityReport rep = mode_genericity(eps);
        if (!rep.passed) continue;

        // order modes by ascending energy, permuting the fixed Fourier columns
        std::vector<int> order(L);
        for (int k = 0; k < L; ++k) order[k] = k;
        std::sort(order.begin(), order.end(), [&](int a, int b) { return eps[a] < eps[b]; });
        model.eps.resize(L);
        model.O.assign(static_cast<std::size_t>(L) * L, 0.0);
        for (int k = 0; k < L; ++k) {
            model.eps[k] = eps[order[k]];
            for (int j = 0; j < L; ++j)
                model.O[static_cast<std::size_t>(j) * L + k] = O[static_cast<std::size_t>(j) * L + order[k]];
        }
        model.genericity = mode_genericity(model.eps);
        // M = O diag(eps) O^T
        model.M.assign(static_cast<std::size_t>(L) * L, 0.0);
        for (int i = 0; i < L; ++i)
            for (int j = 0; j < L; ++j) {
                double s = 0.0;
                for (int k = 0; k < L; ++k) s += model.o(i, k) * model.eps[k] * model.o(j, k);
                model.M[static_cast<std::size_t>(i) * L + j] = s;
            }
        model.extensivity = extensivity_check(model.O, L, ext_threshold);
        return model;
    }
    throw std::runtime_error("generic_extended_model: 100 redraws failed the genericity check");
}

ModeState slater_state(const FreeFermionModel& model, const std::vector<int>& occupied_modes) {
    ModeState s;
    s.L = model.L;
    s.lambda.assign(static_cast<std::size_t>(model.L) * model.L, cplx(0.0, 0.0));
    std::vector<char> seen(model.L, 0);
    for (int k : occupied_modes) {
        require(k >= 0 && k < model.L, "slater_state: mode index out of range");
        require(!seen[k], "slater_state: repeated mode index");
        seen[k] = 1;
        s.lambda[static_cast<std::size_t>(k) * model.L + k] = 1.0;
    }
    s.particle_number = double(occupied_modes.size());
    s.filling = s.particle_number / double(model.L);
    return s;
}

ModeState site_slater_state(const FreeFermionModel& model, const std::vector<int>& occupied_sites) {
    ModeState s;
    s.L = model.L;
    const int L = model.L;
    s.lambda.assign(static_cast<std::size_t>(L) * L, cplx(0.0, 0.0));
    std::vector<char> seen(L, 0);
    for (int m : occupied_sites) {
        require(m >= 0 && m < L, "site_slater_state: site index out of range");
        require(!seen[m], "site_slater_state: repeated site index");
        seen[m] = 1;
        for (int k = 0; k < L; ++k)
            for (int l = 0; l < L; ++l)
                s.lambda[static_cast<std::size_t>(k) * L + l] += model.o(m, k) * model.o(m, l);
    }
    s.particle_number = double(occupied_sites.size());
    s.filling = s.particle_number / double(L);
    return s;
}

ModeState mode_state_from_matrix(const FreeFermionModel& model, std::vector<cplx> lambda) {
    const int L = model.L;
    require(lambda.size() == static_cast<std::size_t>(L) * L, "mode_state_from_matrix: wrong size");
    HermitianOperator lam(L);
    lam.a = lambda;
    require(lam.is_hermitian(1e-10), "mode_state_from_matrix: Lambda must be Hermitian");
    const Spectrum sp = diagonalize(lam);
    for (double ev : sp.eigenvalues)
        require(ev >= -1e-10 && ev <= 1.0 + 1e-10,
                "mode_state_from_matrix: Lambda eigenvalues must lie in [0,1]");
    ModeState s;
    s.L = L;
    s.lambda = std::move(lambda);
    cplx tr(0.0, 0.0);
    for (int k = 0; k < L; ++k) tr += s.lam(k, k);
    s.particle_number = tr.real();
    s.filling = s.particle_number / double(L);
    return s;
}

cplx correlator_at(const FreeFermionModel& model, const ModeState& state, int m, int n, double t) {
    const int L = model.L;
    require(m >= 0 && m < L && n >= 0 && n < L, "correlator_at: site out of range");
    cplx acc(0.0, 0.0);
    for (int k = 0; k < L; ++k) {
        for (int l = 0; l < L; ++l) {
            const cplx lam = state.lam(k, l);
            if (lam == cplx(0.0, 0.0)) continue;
            const double ph = (model.eps[k] - model.eps[l]) * t;
            acc += model.o(m, k) * model.o(n, l) * lam * cplx(std::cos(ph), std::sin(ph));
        }
    }
    return acc;
}

cplx propagator_at(const FreeFermionModel& model, int m, int n, double t) {
    const int L = model.L;
    require(m >= 0 && m < L && n >= 0 && n < L, "propagator_at: site out of range");
    cplx acc(0.0, 0.0);
    for (int k = 0; k < L; ++k) {
        const double ph = model.eps[k] * t;
        acc += model.o(m, k) * model.o(n, k) * cplx(std::cos(ph), std::sin(ph));
    }
    return acc;
}

PropagatorStats propagator_stats(const FreeFermionModel& model, int m, int n) {
    const int L = model.L;
    require(m >= 0 && m < L && n >= 0 && n < L, "propagator_stats: site out of range");
    PropagatorStats st;
    st.m = m;
    st.n = n;
    double omega = 0.0, cmax = 0.0;
    for (int k = 0; k < L; ++k) {
        const double om = model.o(m, k), on = model.o(n, k);
        omega += om * om * on * on;
        cmax = std::max(cmax, std::max(std::abs(om), std::abs(on)));
    }
    st.omega_mn = omega;
    st.c_const = std::sqrt(double(L)) * cmax;
    return st;
}

GapTable correlator_gap_table(const FreeFermionModel& model, const ModeState& state, int m, int n,
                              double tol) {
    if (tol < 0.0) tol = fermion_resonance_tol(model);
    const int L = model.L;
    GapTable t;
    t.tol = tol;
    t.scale = 2.0;  // ||f†_m f_n|| = 1
    cplx fbar(0.0, 0.0);
    for (int k = 0; k < L; ++k) {
        for (int l = 0; l < L; ++l) {
            const cplx w = model.o(m, k) * model.o(n, l) * state.lam(k, l);
            const double gap = model.eps[k] - model.eps[l];
            if (k == l || std::abs(gap) <= tol) {
                fbar += w;
            } else if (w != cplx(0.0, 0.0)) {
                t.entries.push_back({gap, w});
            }
        }
    }
    t.fbar = fbar;
    return t;
}

GapTable propagator_sq_gap_table(const FreeFermionModel& model, int m, int n, double tol) {
    if (tol < 0.0) tol = fermion_resonance_tol(model);
    const int L = model.L;
    GapTable t;
    t.tol = tol;
    t.scale = 2.0;  // |a_mn|^2 in [0,1]
    double fbar = 0.0;
    for (int k = 0; k < L; ++k) {
        for (int l = 0; l < L; ++l) {
            const double w = model.o(m, k) * model.o(n, k) * model.o(m, l) * model.o(n, l);
            const double gap = model.eps[k] - model.eps[l];
            if (k == l || std::abs(gap) <= tol) {
                fbar += w;
            } else if (w != 0.0) {
                t.entries.push_back({gap, cplx(w, 0.0)});
            }
        }
    }
    t.fbar = fbar;
    return t;
}

namespace {

MomentReport make_fermion_report(double mu, int q, double bound, bool applicable) {
    MomentReport rep;
    rep.q = q;
    rep.mu_exact = mu;
    rep.bound = bound;
    rep.bound_applicable = applicable;
    if (applicable) rep.bound_satisfied = (q % 2 == 0 ? mu : std::abs(mu)) <= bound;
    return rep;
}

}  // namespace

MomentReport free_moment_exact_correlator(const FreeFermionModel& model, const ModeState& state, int m,
                                          int n, int q, double tol, const MomentEngineLimits& limits) {
    require(q >= 2 && q <= 4, "free_moment_exact_correlator: q must be in {2,3,4}");
    const GapTable t = correlator_gap_table(model, state, m, n, tol);
    const PropagatorStats st = propagator_stats(model, m, n);
    if (q % 2 == 0) {
        const double mu = exact_abs_moment(t, q, limits);
        const double bound =
            std::pow(double(q) * st.c_const * st.c_const * std::sqrt(state.filling / double(model.L)), q);
        return make_fermion_report(mu, q, bound, true);
    }
    const double mu = exact_moment(t, q, limits, /*enforce_real=*/false);
    return make_fermion_report(mu, q, 0.0, false);
}

MomentReport free_moment_exact_propagator(const FreeFermionModel& model, int m, int n, int q, double tol,
                                          const MomentEngineLimits& limits) {
    require(q >= 2 && q <= 4, "free_moment_exact_propagator: q must be in {2,3,4}");
    const GapTable t = propagator_sq_gap_table(model, m, n, tol);
    const PropagatorStats st = propagator_stats(model, m, n);
    const double c4 = std::pow(st.c_const, 4);
    const double mu = exact_moment(t, q, limits);
    const double bound = std::pow(double(q) * c4 / double(model.L), q);
    return make_fermion_report(mu, q, bound, true);
}

namespace {

std::pair<double, double> moment_from_samples(const std::vector<double>& vals) {
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= double(vals.size());
    double var = 0.0;
    for (double v : vals) var += (v - mean) * (v - mean);
    var /= std::max<double>(1.0, double(vals.size()) - 1.0);
    return {mean, std::sqrt(var / double(vals.size()))};
}

}  // namespace

std::pair<double, double> free_sampled_moment_correlator(const FreeFermionModel& model,
                                                         const ModeState& state, int m, int n, int q,
                                                         double T, std::uint64_t n_samples,
                                                         std::uint64_t seed, double tol) {
    const GapTable t = correlator_gap_table(model, state, m, n, tol);
    std::vector<double> vals(n_samples);
    const std::int64_t nn = static_cast<std::int64_t>(n_samples);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < nn; ++i) {
        const double tt = T * rng::counter_uniform01(seed, static_cast<std::uint64_t>(i));
        const cplx d = correlator_at(model, state, m, n, tt) - t.fbar;
        if (q % 2 == 0) {
            vals[static_cast<std::size_t>(i)] = std::pow(std::abs(d), q);
        } else {
            cplx p(1.0, 0.0);
            for (int k = 0; k < q; ++k) p *= d;
            vals[static_cast<std::size_t>(i)] = p.real();
        }
    }
    return moment_from_samples(vals);
}

std::pair<double, double> free_sampled_moment_propagator(const FreeFermionModel& model, int m, int n,
                                                         int q, double T, std::uint64_t n_samples,
                                                         std::uint64_t seed, double tol) {
    const GapTable t = propagator_sq_gap_table(model, m, n, tol);
    const double fbar = t.fbar.real();
    std::vector<double> vals(n_samples);
    const std::int64_t nn = static_cast<std::int64_t>(n_samples);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < nn; ++i) {
        const double tt = T * rng::counter_uniform01(seed, static_cast<std::uint64_t>(i));
        const double d = std::norm(propagator_at(model, m, n, tt)) - fbar;
        double p = 1.0;
        for (int k = 0; k < q; ++k) p *= d;
        vals[static_cast<std::size_t>(i)] = p;
    }
    return moment_from_samples(vals);
}

}  // namespace eqlab
