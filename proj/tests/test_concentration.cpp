#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <numbers>

#include "eqlab/concentration.hpp"
#include "eqlab/lattice.hpp"
#include "eqlab/moments.hpp"

using namespace eqlab;

namespace {

constexpr double kE = std::numbers::e;

QuenchSetup two_level() {
    Spectrum sp;
    sp.dim = 2;
    sp.eigenvalues = {0.0, 1.0};
    sp.eigenvectors = {1.0, 0.0, 0.0, 1.0};
    QuenchSetup s;
    s.spectrum = sp;
    const double r = 1.0 / std::sqrt(2.0);
    s.coeffs = {r, r};
    s.obs = {0.0, 0.5, 0.5, 0.0};
    s.obs_norm = 0.5;
    return s;
}

QuenchSetup three_level_uniform() {
    Spectrum sp;
    sp.dim = 3;
    sp.eigenvalues = {0.0, 1.0, std::numbers::sqrt2};
    sp.eigenvectors = {1, 0, 0, 0, 1, 0, 0, 0, 1};
    QuenchSetup s;
    s.spectrum = sp;
    const double r = 1.0 / std::sqrt(3.0);
    s.coeffs = {r, r, r};
    s.obs.assign(9, cplx(0.0, 0.0));
    s.obs_norm = 1.0;
    return s;
}

}  // namespace

TEST_CASE("tail_bound closed-form values") {
    CHECK(tail_bound(1.0, kE * 1.0) == doctest::Approx(2.0));
    CHECK(tail_bound(0.5, 0.0) == doctest::Approx(2.0 * kE));
    CHECK(tail_bound(0.01, 0.3) == doctest::Approx(2.0 * kE * std::exp(-30.0 / kE)));
    CHECK(tail_bound(0.01, 0.3) == doctest::Approx(8.7e-5).epsilon(0.02));
    CHECK_THROWS_AS(tail_bound(0.0, 1.0), std::invalid_argument);
}

TEST_CASE("empirical_tail: identity observable has zero tails") {
    QuenchSetup id = two_level();
    id.obs = {1.0, 0.0, 0.0, 1.0};
    id.obs_norm = 1.0;
    const TailReport r = empirical_tail(id, Quantity::observable, {0.01, 0.1, 0.5}, 100.0, 5000, 3);
    for (double e : r.empirical) CHECK(e == 0.0);
}

TEST_CASE("empirical_tail: 2-level arcsine law at delta = 1/4") {
    // |cos t| >= 1/2 on two thirds of the phase circle
    const QuenchSetup s = two_level();
    const double T = 1e4 * 2.0 * std::numbers::pi;
    const TailReport r = empirical_tail(s, Quantity::observable, {0.25}, T, 200000, 17);
    CHECK(r.fbar == doctest::Approx(0.0));
    CHECK(r.empirical[0] == doctest::Approx(2.0 / 3.0).epsilon(0.01));
}

TEST_CASE("tail report is monotone and bounded") {
    const QuenchSetup s = two_level();
    std::vector<double> grid;
    for (int k = 0; k < 12; ++k) grid.push_back(0.05 * k);
    const TailReport r = empirical_tail(s, Quantity::observable, grid, 1000.0, 20000, 5);
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
        CHECK(r.bound[k + 1] <= r.bound[k]);
        CHECK(r.empirical[k + 1] <= r.empirical[k]);
        CHECK(r.empirical[k] >= 0.0);
        CHECK(r.empirical[k] <= 1.0);
    }
}

TEST_CASE("recurrence scan on the 2-level system finds 2*pi returns") {
    const QuenchSetup s = two_level();
    const RecurrenceScan scan =
        recurrence_scan(s, Quantity::observable, 0.1, 0.05, 0.05, 1000.0);
    REQUIRE(!scan.events.empty());
    CHECK(scan.c_A == doctest::Approx(1.0));
    // events sit at 2 pi n with width ~0.9
    const double period = 2.0 * std::numbers::pi;
    for (std::size_t k = 0; k < scan.events.size(); ++k) {
        const double n = std::round((scan.events[k].t_start + 0.4510) / period);
        CHECK(std::abs(scan.events[k].t_start + 0.4510 - n * period) <= 2 * scan.dt + 1e-9);
        CHECK(scan.events[k].duration >= 0.05);
    }
    REQUIRE(scan.empirical_T_defined);
    CHECK(scan.empirical_T == doctest::Approx(period).epsilon(scan.dt / period * 3 + 0.01));
    REQUIRE(scan.lower_bound_defined);
    CHECK(scan.empirical_T >= scan.lower_bound);
    // event starts strictly increasing
    for (std::size_t k = 0; k + 1 < scan.events.size(); ++k)
        CHECK(scan.events[k].t_start < scan.events[k + 1].t_start);
}

TEST_CASE("events re-verified on a 10x finer grid") {
    const QuenchSetup s = two_level();
    const RecurrenceScan scan = recurrence_scan(s, Quantity::observable, 0.1, 0.05, 0.05, 200.0);
    const double f0 = expectation_at(s, 0.0);
    for (const auto& ev : scan.events) {
        const double fine = scan.dt / 10.0;
        for (double t = ev.t_start; t <= ev.t_start + ev.duration + 1e-12; t += fine)
            CHECK(std::abs(expectation_at(s, t) - f0) <= scan.u * s.obs_norm + 1e-9);
    }
}

TEST_CASE("single eigenstate never leaves equilibrium") {
    QuenchSetup e = two_level();
    e.coeffs = {1.0, 0.0};
    const RecurrenceScan scan = recurrence_scan(e, Quantity::fidelity, 0.3, 0.1, 0.05, 50.0);
    CHECK(scan.never_leaves);
    CHECK(scan.events.empty());
    CHECK(!scan.empirical_T_defined);
}

TEST_CASE("3-level two-frequency torus has near-returns") {
    const QuenchSetup s = three_level_uniform();
    const RecurrenceScan scan = recurrence_scan(s, Quantity::fidelity, 0.2, 0.1, 0.2, 1000.0);
    REQUIRE(!scan.events.empty());
    // the first good simultaneous return is near 2 pi * 5
    CHECK(scan.events.front().t_start <= 2.0 * std::numbers::pi * 12.5);
    REQUIRE(scan.lower_bound_defined);
    REQUIRE(scan.empirical_T_defined);
    CHECK(scan.empirical_T >= scan.lower_bound);
}

TEST_CASE("monotonicity: larger u or smaller delta never loses events") {
    const QuenchSetup s = three_level_uniform();
    const auto base = recurrence_scan(s, Quantity::fidelity, 0.2, 0.2, 0.2, 2000.0);
    const auto wider = recurrence_scan(s, Quantity::fidelity, 0.3, 0.2, 0.2, 2000.0);
    const auto shorter = recurrence_scan(s, Quantity::fidelity, 0.2, 0.05, 0.2, 2000.0);
    CHECK(wider.events.size() >= base.events.size());
    CHECK(shorter.events.size() >= base.events.size());
}

TEST_CASE("dt cap pi/(10 ||H||) is enforced") {
    const QuenchSetup s = two_level();  // ||H|| = 1
    const RecurrenceScan scan = recurrence_scan(s, Quantity::observable, 0.5, 0.1, 5.0, 100.0);
    CHECK(scan.dt == doctest::Approx(std::numbers::pi / 10.0));
}

TEST_CASE("recurrence_lower_bound closed forms") {
    // purity 1, c_A = u: bound is Delta/(2e)
    CHECK(recurrence_lower_bound(Quantity::observable, 0.3, 0.3, 0.1, 1.0) ==
          doctest::Approx(0.1 / (2.0 * kE)));
    // Delta -> 0 vanishes
    CHECK(recurrence_lower_bound(Quantity::observable, 0.5, 0.1, 1e-12, 0.5) <= 1e-10);
    // fidelity prefactor is Delta/(2e^2), as printed
    CHECK(recurrence_lower_bound(Quantity::fidelity, 1.0, 0.5, 0.2, 0.25) ==
          doctest::Approx(0.2 / (2.0 * kE * kE) * std::exp(0.5 / (kE * 0.25))));
    CHECK_THROWS_AS(recurrence_lower_bound(Quantity::observable, 0.1, 0.5, 0.1, 0.5),
                    std::invalid_argument);
}

TEST_CASE("fermion recurrence bounds") {
    // L=2, c=1, nu=1/2, Delta=0.1, c_f - u = 0.5: (0.1/2e) exp(0.5 * 2 / e)
    const double v = fermion_recurrence_lower_bound(FermionRecurrenceKind::correlator, 0.6, 0.1, 0.1,
                                                    1.0, 0.5, 2);
    CHECK(v == doctest::Approx(0.1 / (2.0 * kE) * std::exp(0.5 * 2.0 / kE)));
    CHECK(v == doctest::Approx(0.0266).epsilon(0.01));
    // fidelity kind, u -> 1 collapses to Delta/(2e)
    CHECK(fermion_recurrence_lower_bound(FermionRecurrenceKind::fidelity, 1.0, 1.0 - 1e-12, 0.1, 1.0,
                                         0.5, 8) == doctest::Approx(0.1 / (2.0 * kE)));
    CHECK_THROWS_AS(fermion_recurrence_lower_bound(FermionRecurrenceKind::correlator, 0.1, 0.5, 0.1,
                                                   1.0, 0.5, 2),
                    std::invalid_argument);
}

TEST_CASE("L=2 fermion fidelity: scan beats the Corollary 4 bound") {
    // F(t) = |a_11(t)|^2 = cos^2(t) for the two-site hopping model; the same
    // function is produced by a two-level quench with p = (1/2, 1/2)
    Spectrum sp;
    sp.dim = 2;
    sp.eigenvalues = {-1.0, 1.0};
    sp.eigenvectors = {1.0, 0.0, 0.0, 1.0};
    QuenchSetup s;
    s.spectrum = sp;
    const double r = 1.0 / std::sqrt(2.0);
    s.coeffs = {r, r};
    s.obs.assign(4, cplx(0.0, 0.0));
    s.obs_norm = 1.0;
    const RecurrenceScan scan = recurrence_scan(s, Quantity::fidelity, 0.1, 0.05, 0.05, 500.0);
    REQUIRE(scan.empirical_T_defined);
    CHECK(scan.empirical_T == doctest::Approx(std::numbers::pi).epsilon(0.02));
    const double bound = fermion_recurrence_lower_bound(FermionRecurrenceKind::fidelity, 1.0, 0.1,
                                                        0.05, 1.0, 0.5, 2);
    CHECK(scan.empirical_T >= bound);
}

TEST_CASE("tails stay under the bound on a generic setup") {
    const HermitianOperator H = random_hermitian(12, 2024);
    const Spectrum sp = diagonalize(H);
    const QuenchSetup s = make_setup(sp, random_state(12, 2025), random_hermitian(12, 2026));
    const double T = default_horizon(sp, default_resonance_tol(sp));
    for (Quantity q : {Quantity::observable, Quantity::fidelity}) {
        std::vector<double> grid;
        const double top = (q == Quantity::observable) ? 2.0 * s.obs_norm : 1.0;
        for (int k = 1; k <= 20; ++k) grid.push_back(top * k / 20.0);
        const TailReport r = empirical_tail(s, q, grid, T, 30000, 99);
        for (std::size_t k = 0; k < grid.size(); ++k) CHECK(r.empirical[k] <= r.bound[k]);
    }
}
