#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <numbers>

#include "eqlab/fermions.hpp"
#include "eqlab/rng.hpp"
#include "fock_oracle.hpp"

using namespace eqlab;

namespace {

FreeFermionModel two_site(double J = 1.0) {
    return build_free_model({0.0, J, J, 0.0}, 2);
}

}  // namespace

TEST_CASE("L=2 hopping model: modes and closed forms") {
    const FreeFermionModel m = two_site();
    CHECK(m.eps[0] == doctest::Approx(-1.0));
    CHECK(m.eps[1] == doctest::Approx(1.0));
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(m.o(0, 0)) == doctest::Approx(r));
    CHECK(std::abs(m.o(1, 0)) == doctest::Approx(r));
    CHECK(m.o(0, 0) * m.o(1, 0) < 0.0);  // antisymmetric mode at -J
    CHECK(m.o(0, 1) * m.o(1, 1) > 0.0);

    for (double t : {0.0, 0.7, 2.9}) {
        CHECK(std::abs(propagator_at(m, 0, 0, t)) ==
              doctest::Approx(std::abs(std::cos(t))).epsilon(1e-12));
        CHECK(std::norm(propagator_at(m, 0, 0, t)) ==
              doctest::Approx(std::cos(t) * std::cos(t)).epsilon(1e-12));
    }
    const PropagatorStats st = propagator_stats(m, 0, 0);
    CHECK(st.omega_mn == doctest::Approx(0.5));
    CHECK(st.c_const == doctest::Approx(1.0));

    const MomentReport rep = free_moment_exact_propagator(m, 0, 0, 2);
    CHECK(rep.mu_exact == doctest::Approx(0.125).epsilon(1e-12));
    CHECK(rep.bound == doctest::Approx(1.0));
    CHECK(rep.bound_satisfied);
}

TEST_CASE("model reconstruction and orthogonality invariants") {
    const FreeFermionModel m = generic_extended_model(24, 5);
    double worst = 0.0, orth = 0.0, mscale = 0.0;
    for (int i = 0; i < 24; ++i)
        for (int j = 0; j < 24; ++j) {
            double s = 0.0, oij = 0.0;
            for (int k = 0; k < 24; ++k) {
                s += m.o(i, k) * m.eps[k] * m.o(j, k);
                oij += m.o(k, i) * m.o(k, j);
            }
            worst = std::max(worst, std::abs(s - m.m(i, j)));
            orth = std::max(orth, std::abs(oij - (i == j ? 1.0 : 0.0)));
            mscale = std::max(mscale, std::abs(m.m(i, j)));
        }
    CHECK(worst <= 1e-10 * std::max(mscale, 1.0));
    CHECK(orth <= 1e-10);
}

TEST_CASE("generic extended model: Fourier extensivity and genericity") {
    for (int L : {16, 33, 64}) {
        const FreeFermionModel m = generic_extended_model(L, 7);
        double omax = 0.0;
        for (double v : m.O) omax = std::max(omax, std::abs(v));
        CHECK(omax <= std::sqrt(2.0 / L) + 1e-12);
        CHECK(m.extensivity.constant <= std::numbers::sqrt2 + 1e-12);
        CHECK(m.extensivity.passed);
        CHECK(m.genericity.passed);
        for (int k = 0; k + 1 < L; ++k) CHECK(m.eps[k] <= m.eps[k + 1]);
    }
}

TEST_CASE("diagonal M is localized: extensivity check fails at large L") {
    std::vector<double> M(25 * 25, 0.0);
    rng::Sequence rs(11);
    for (int i = 0; i < 25; ++i) M[i * 25 + i] = rs.uniform(-1.0, 1.0);
    const FreeFermionModel m = build_free_model(M, 25);
    CHECK(m.extensivity.constant == doctest::Approx(5.0));  // sqrt(L) * 1
    CHECK(!m.extensivity.passed);
}

TEST_CASE("open uniform chain: sine modes match the closed form") {
    const int L = 12;
    const double J = 1.0;
    std::vector<double> M(L * L, 0.0);
    for (int i = 0; i + 1 < L; ++i) M[i * L + i + 1] = M[(i + 1) * L + i] = J;
    const FreeFermionModel m = build_free_model(M, L);
    std::vector<double> expect;
    for (int k = 1; k <= L; ++k) expect.push_back(2.0 * J * std::cos(k * std::numbers::pi / (L + 1)));
    std::sort(expect.begin(), expect.end());
    for (int k = 0; k < L; ++k) CHECK(m.eps[k] == doctest::Approx(expect[k]).epsilon(1e-10));
    double omax = 0.0;
    for (double v : m.O) omax = std::max(omax, std::abs(v));
    CHECK(omax <= std::sqrt(2.0 / (L + 1)) + 1e-10);
    CHECK(m.extensivity.constant <= std::numbers::sqrt2 * std::sqrt(double(L) / (L + 1)) + 1e-10);
    CHECK(m.extensivity.passed);
}

TEST_CASE("slater and site states") {
    const FreeFermionModel m = generic_extended_model(10, 3);
    // ground state occupies the negative modes
    std::vector<int> neg;
    for (int k = 0; k < 10; ++k)
        if (m.eps[k] < 0.0) neg.push_back(k);
    const ModeState gs = slater_state(m, neg);
    CHECK(gs.particle_number == doctest::Approx(double(neg.size())));

    const ModeState empty = slater_state(m, {});
    for (double t : {0.0, 1.3})
        CHECK(std::abs(correlator_at(m, empty, 2, 5, t)) == doctest::Approx(0.0));

    // completely filled: delta_mn at all times
    std::vector<int> all;
    for (int k = 0; k < 10; ++k) all.push_back(k);
    const ModeState full = slater_state(m, all);
    for (double t : {0.0, 0.9}) {
        CHECK(correlator_at(m, full, 3, 3, t).real() == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(std::abs(correlator_at(m, full, 3, 7, t)) <= 1e-10);
    }

    // single-site state: Lambda_kl = O_mk O_ml
    const ModeState one = site_slater_state(m, {4});
    for (int k = 0; k < 10; ++k)
        for (int l = 0; l < 10; ++l)
            CHECK(one.lam(k, l).real() == doctest::Approx(m.o(4, k) * m.o(4, l)).epsilon(1e-12));
    CHECK(one.particle_number == doctest::Approx(1.0));

    CHECK_THROWS_AS(slater_state(m, {0, 0}), std::invalid_argument);
    CHECK_THROWS_AS(slater_state(m, {10}), std::invalid_argument);
}

TEST_CASE("mode_state_from_matrix validates the eigenvalue window") {
    const FreeFermionModel m = two_site();
    std::vector<cplx> bad = {cplx(1.5, 0.0), 0.0, 0.0, 0.0};
    CHECK_THROWS_AS(mode_state_from_matrix(m, bad), std::invalid_argument);
    std::vector<cplx> good = {cplx(0.5, 0.0), cplx(0.0, 0.25), cplx(0.0, -0.25), cplx(0.5, 0.0)};
    const ModeState s = mode_state_from_matrix(m, good);
    CHECK(s.particle_number == doctest::Approx(1.0));
}

TEST_CASE("correlator at t=0 is the rotated density, and is stationary for diagonal Lambda") {
    const FreeFermionModel m = generic_extended_model(8, 21);
    const ModeState st = site_slater_state(m, {0, 3, 5});
    for (int a : {0, 2})
        for (int b : {1, 6}) {
            cplx direct(0.0, 0.0);
            for (int k = 0; k < 8; ++k)
                for (int l = 0; l < 8; ++l) direct += m.o(a, k) * st.lam(k, l) * m.o(b, l);
            CHECK(std::abs(correlator_at(m, st, a, b, 0.0) - direct) <= 1e-12);
        }
    // diagonal Lambda: constant correlator, all moments zero
    const ModeState diag = slater_state(m, {1, 4});
    const cplx c0 = correlator_at(m, diag, 2, 2, 0.0);
    for (double t : {0.5, 4.2}) CHECK(std::abs(correlator_at(m, diag, 2, 2, t) - c0) <= 1e-12);
    CHECK(free_moment_exact_correlator(m, diag, 2, 2, 2).mu_exact == doctest::Approx(0.0));
}

TEST_CASE("single-particle unitarity and omega row sums") {
    const FreeFermionModel m = generic_extended_model(16, 9);
    rng::Sequence rs(33);
    for (int rep = 0; rep < 20; ++rep) {
        const double t = rs.uniform(0.0, 200.0);
        const int a = int(rs.uniform(0.0, 16.0));
        double sum = 0.0;
        for (int n = 0; n < 16; ++n) sum += std::norm(propagator_at(m, a, n, t));
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-10));
    }
    for (int a : {0, 7, 15}) {
        double sum = 0.0;
        for (int n = 0; n < 16; ++n) sum += propagator_stats(m, a, n).omega_mn;
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("propagator time average matches omega_mn") {
    const FreeFermionModel m = generic_extended_model(12, 13);
    const GapTable t = propagator_sq_gap_table(m, 1, 4);
    const PropagatorStats st = propagator_stats(m, 1, 4);
    CHECK(t.fbar.real() == doctest::Approx(st.omega_mn).epsilon(1e-12));
    // long-horizon sampled average
    double gmin = 1e300;
    for (const auto& e : t.entries) gmin = std::min(gmin, std::abs(e.gap));
    const double T = 1e4 * 2.0 * std::numbers::pi / gmin;
    rng::Sequence rs(77);
    double mean = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) mean += std::norm(propagator_at(m, 1, 4, rs.uniform(0.0, T)));
    mean /= n;
    CHECK(mean == doctest::Approx(st.omega_mn).epsilon(0.05));
}

TEST_CASE("theorem bounds on a moderate extended model") {
    const FreeFermionModel m = generic_extended_model(32, 17);
    rng::Sequence rs(55);
    std::vector<int> sites;
    for (int s = 0; s < 32; ++s) sites.push_back(s);
    rs.shuffle_prefix(sites, 16);
    const ModeState st = site_slater_state(m, std::vector<int>(sites.begin(), sites.begin() + 16));
    for (int rep = 0; rep < 5; ++rep) {
        const int a = int(rs.uniform(0.0, 32.0)), b = int(rs.uniform(0.0, 32.0));
        for (int q : {2, 4}) {
            const MomentReport rc = free_moment_exact_correlator(m, st, a, b, q);
            CHECK(rc.bound_applicable);
            CHECK(rc.bound_satisfied);
            const MomentReport rp = free_moment_exact_propagator(m, a, b, q);
            CHECK(rp.bound_satisfied);
        }
    }
}

TEST_CASE("exact fermion moments agree with sampling") {
    const FreeFermionModel m = generic_extended_model(12, 29);
    rng::Sequence rs(66);
    std::vector<int> sites;
    for (int s = 0; s < 12; ++s) sites.push_back(s);
    rs.shuffle_prefix(sites, 6);
    const ModeState st = site_slater_state(m, std::vector<int>(sites.begin(), sites.begin() + 6));
    const GapTable tc = correlator_gap_table(m, st, 2, 7);
    double gmin = 1e300;
    for (const auto& e : tc.entries) gmin = std::min(gmin, std::abs(e.gap));
    const double T = 1e4 * 2.0 * std::numbers::pi / gmin;
    for (int q : {2, 3, 4}) {
        const MomentReport rep = free_moment_exact_correlator(m, st, 2, 7, q);
        const auto [ms, se] = free_sampled_moment_correlator(m, st, 2, 7, q, T, 60000, 123 + q);
        CHECK(std::abs(rep.mu_exact - ms) <= 4.0 * se + 1e-12);
    }
    for (int q : {2, 3}) {
        const MomentReport rep = free_moment_exact_propagator(m, 3, 3, q);
        const auto [ms, se] = free_sampled_moment_propagator(m, 3, 3, q, T, 60000, 321 + q);
        CHECK(std::abs(rep.mu_exact - ms) <= 4.0 * se + 1e-12);
    }
}

TEST_CASE("Fock-space lift reproduces the single-particle correlator") {
    const int L = 4;
    const FreeFermionModel m = generic_extended_model(L, 41);
    const HermitianOperator HF = oracle::fock_quadratic(m.M, L);
    CHECK(HF.is_hermitian());
    const Spectrum sp = diagonalize(HF);

    const std::vector<int> occ = {0, 2};
    const BasisState psi = oracle::fock_site_state(L, occ);
    const ModeState st = site_slater_state(m, occ);

    for (int a : {0, 1, 3})
        for (int b : {0, 2}) {
            // Hermitian split: <f†_a f_b> = (<X> + i <Y>)/2
            HermitianOperator fab = oracle::fock_number_op(L, a, b);
            HermitianOperator fba = oracle::fock_number_op(L, b, a);
            HermitianOperator X(1 << L), Y(1 << L);
            for (int i = 0; i < (1 << L); ++i)
                for (int j = 0; j < (1 << L); ++j) {
                    X.at(i, j) = fab.at(i, j) + fba.at(i, j);
                    Y.at(i, j) = cplx(0.0, -1.0) * (fab.at(i, j) - fba.at(i, j));
                }
            const QuenchSetup sx = make_setup(sp, psi, X);
            const QuenchSetup sy = make_setup(sp, psi, Y);
            for (double t : {0.0, 0.37, 1.9, 6.4}) {
                const cplx many(0.5 * expectation_at(sx, t), 0.5 * expectation_at(sy, t));
                const cplx single = correlator_at(m, st, a, b, t);
                CHECK(std::abs(many - single) <= 1e-8);
            }
        }
}

TEST_CASE("fidelity of a single injected particle is the squared propagator") {
    const int L = 4;
    const FreeFermionModel m = generic_extended_model(L, 43);
    const HermitianOperator HF = oracle::fock_quadratic(m.M, L);
    const Spectrum sp = diagonalize(HF);
    const BasisState psi = oracle::fock_site_state(L, {1});
    const QuenchSetup s = make_setup(sp, psi, HermitianOperator::identity(1 << L));
    for (double t : {0.0, 0.8, 3.1})
        CHECK(fidelity_at(s, t) == doctest::Approx(std::norm(propagator_at(m, 1, 1, t))).epsilon(1e-8));
}
