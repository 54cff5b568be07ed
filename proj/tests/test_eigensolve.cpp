#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <omp.h>

#include "eqlab/eigensolve.hpp"
#include "eqlab/lattice.hpp"

using namespace eqlab;

namespace {

HermitianOperator real_symmetric(int n, std::uint64_t seed) {
    HermitianOperator h = random_hermitian(n, seed);
    for (auto& z : h.a) z = cplx(z.real(), 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < i; ++j) h.at(i, j) = h.at(j, i);
    return h;
}

}  // namespace

TEST_CASE("diagonal matrix sorts to ascending eigenvalues") {
    HermitianOperator h(3);
    h.at(0, 0) = 3.0;
    h.at(1, 1) = 1.0;
    h.at(2, 2) = 2.0;
    const Spectrum s = diagonalize(h);
    CHECK(s.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(s.eigenvalues[1] == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(s.eigenvalues[2] == doctest::Approx(3.0).epsilon(1e-14));
    // permutation eigenvectors with positive leading component
    CHECK(std::abs(s.vec(1, 0)) == doctest::Approx(1.0));
    CHECK(std::abs(s.vec(2, 1)) == doctest::Approx(1.0));
    CHECK(std::abs(s.vec(0, 2)) == doctest::Approx(1.0));
    CHECK(s.vec(1, 0).real() > 0.0);
}

TEST_CASE("2x2 off-diagonal: eigenpairs and phase convention") {
    HermitianOperator h(2);
    h.at(0, 1) = 1.0;
    h.at(1, 0) = 1.0;
    const Spectrum s = diagonalize(h);
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(s.eigenvalues[0] == doctest::Approx(-1.0));
    CHECK(s.eigenvalues[1] == doctest::Approx(1.0));
    CHECK(s.vec(0, 0).real() == doctest::Approx(r));
    CHECK(s.vec(1, 0).real() == doctest::Approx(-r));
    CHECK(s.vec(0, 1).real() == doctest::Approx(r));
    CHECK(s.vec(1, 1).real() == doctest::Approx(r));
}

TEST_CASE("random real symmetric: invariants") {
    const HermitianOperator h = real_symmetric(64, 11);
    const Spectrum s = diagonalize(h);
    const double scale = s.max_abs_eigenvalue();
    CHECK(max_residual(h, s) <= 1e-10 * scale);
    CHECK(orthonormality_defect(s) <= 1e-10);
    for (int k = 0; k + 1 < 64; ++k) CHECK(s.eigenvalues[k] <= s.eigenvalues[k + 1]);
}

TEST_CASE("GUE 64x64 via real embedding: invariants") {
    const HermitianOperator h = random_hermitian(64, 42);
    const Spectrum s = diagonalize(h);
    REQUIRE(int(s.eigenvalues.size()) == 64);
    CHECK(max_residual(h, s) <= 1e-10 * s.max_abs_eigenvalue());
    CHECK(orthonormality_defect(s) <= 1e-10);
}

TEST_CASE("complex identity: deflation handles full degeneracy") {
    HermitianOperator h(5);
    for (int i = 0; i < 5; ++i) h.at(i, i) = 1.0;
    h.at(0, 1) = cplx(0.0, 1e-30);  // force the complex path
    h.at(1, 0) = cplx(0.0, -1e-30);
    const Spectrum s = diagonalize(h);
    REQUIRE(int(s.eigenvalues.size()) == 5);
    CHECK(orthonormality_defect(s) <= 1e-10);
    for (double e : s.eigenvalues) CHECK(e == doctest::Approx(1.0));
}

TEST_CASE("determinism: identical input bits give identical output bits") {
    const HermitianOperator h = random_hermitian(32, 7);
    const Spectrum a = diagonalize(h);
    const Spectrum b = diagonalize(h);
    CHECK(a.eigenvalues == b.eigenvalues);
    REQUIRE(a.eigenvectors.size() == b.eigenvectors.size());
    for (std::size_t i = 0; i < a.eigenvectors.size(); ++i) CHECK(a.eigenvectors[i] == b.eigenvectors[i]);
}

TEST_CASE("thread count does not change results") {
    const HermitianOperator h = real_symmetric(48, 3);
    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    const Spectrum a = diagonalize(h);
    omp_set_num_threads(2);
    const Spectrum b = diagonalize(h);
    omp_set_num_threads(saved);
    CHECK(a.eigenvalues == b.eigenvalues);
    for (std::size_t i = 0; i < a.eigenvectors.size(); ++i) CHECK(a.eigenvectors[i] == b.eigenvectors[i]);
}

TEST_CASE("serial cyclic reference agrees with the tournament kernel") {
    const int n = 40;
    const HermitianOperator h = real_symmetric(n, 5);
    std::vector<double> A1(n * n), A2(n * n), V1, V2;
    for (int i = 0; i < n * n; ++i) A1[i] = A2[i] = h.a[i].real();
    jacobi_tournament(A1, V1, n);
    jacobi_cyclic_serial(A2, V2, n);
    std::vector<double> e1, e2;
    for (int i = 0; i < n; ++i) {
        e1.push_back(A1[i * n + i]);
        e2.push_back(A2[i * n + i]);
    }
    std::sort(e1.begin(), e1.end());
    std::sort(e2.begin(), e2.end());
    double scale = 0.0;
    for (double e : e1) scale = std::max(scale, std::abs(e));
    for (int i = 0; i < n; ++i) CHECK(std::abs(e1[i] - e2[i]) <= 1e-11 * scale);
}

TEST_CASE("reconstruction: V E V^dag recovers H") {
    const int n = 24;
    const HermitianOperator h = random_hermitian(n, 99);
    const Spectrum s = diagonalize(h);
    double scale = s.max_abs_eigenvalue();
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            cplx acc(0.0, 0.0);
            for (int k = 0; k < n; ++k) acc += s.vec(i, k) * s.eigenvalues[k] * std::conj(s.vec(j, k));
            worst = std::max(worst, std::abs(acc - h.at(i, j)));
        }
    CHECK(worst <= 1e-9 * scale);
}

TEST_CASE("operator_norm") {
    HermitianOperator zero(4);
    CHECK(operator_norm(zero) == 0.0);

    HermitianOperator diag(3);
    diag.at(0, 0) = -5.0;
    diag.at(1, 1) = 2.0;
    diag.at(2, 2) = 1.0;
    CHECK(operator_norm(diag) == 5.0);

    // rank-1 projector has norm 1
    const BasisState psi = random_state(6, 13);
    HermitianOperator proj(6);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) proj.at(i, j) = psi.amp[i] * std::conj(psi.amp[j]);
    CHECK(operator_norm(proj) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("rank-1 complex projector: 31-fold degenerate eigenspace deflates fully") {
    const BasisState psi = random_state(32, 77);
    HermitianOperator proj(32);
    for (int i = 0; i < 32; ++i)
        for (int j = 0; j < 32; ++j) proj.at(i, j) = psi.amp[i] * std::conj(psi.amp[j]);
    const Spectrum s = diagonalize(proj);
    REQUIRE(int(s.eigenvalues.size()) == 32);
    CHECK(orthonormality_defect(s) <= 1e-10);
    CHECK(max_residual(proj, s) <= 1e-10);
    CHECK(s.eigenvalues.back() == doctest::Approx(1.0).epsilon(1e-10));
    for (int k = 0; k + 1 < 32; ++k) CHECK(std::abs(s.eigenvalues[k]) <= 1e-10);
}

TEST_CASE("non-Hermitian input is rejected") {
    HermitianOperator h(2);
    h.at(0, 1) = 1.0;
    h.at(1, 0) = 2.0;
    CHECK_THROWS_AS(diagonalize(h), std::invalid_argument);
}
