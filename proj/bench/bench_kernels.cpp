// Kernel benchmark: OpenMP production paths against their serial references.
//   - Jacobi eigensolver: tournament (1 and N threads) vs row-cyclic serial
//   - moment engine: meet-in-the-middle join vs brute-force enumeration
//   - Monte Carlo sampling: threaded vs single-threaded evaluation
// Also asserts that the parallel results match the deterministic contract.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstring>
#include <vector>

#include "eqlab/eigensolve.hpp"
#include "eqlab/lattice.hpp"
#include "eqlab/moments.hpp"
#include "eqlab/quench.hpp"
#include "eqlab/rng.hpp"

using namespace eqlab;
using clock_type = std::chrono::steady_clock;

namespace {

double secs_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

std::vector<double> real_sym(int n, std::uint64_t seed) {
    const HermitianOperator h = random_hermitian(n, seed);
    std::vector<double> a(std::size_t(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a[std::size_t(i) * n + j] = 0.5 * (h.at(i, j).real() + h.at(j, i).real());
    return a;
}

void bench_jacobi(int n) {
    const std::vector<double> base = real_sym(n, 1);
    std::vector<double> A, V;
    const int max_threads = omp_get_max_threads();

    A = base;
    omp_set_num_threads(1);
    auto t0 = clock_type::now();
    jacobi_tournament(A, V, n);
    const double tour1 = secs_since(t0);
    std::vector<double> diag1(n);
    for (int i = 0; i < n; ++i) diag1[i] = A[std::size_t(i) * n + i];

    A = base;
    omp_set_num_threads(max_threads);
    t0 = clock_type::now();
    jacobi_tournament(A, V, n);
    const double tourN = secs_since(t0);
    std::vector<double> diagN(n);
    for (int i = 0; i < n; ++i) diagN[i] = A[std::size_t(i) * n + i];
    const bool identical = std::memcmp(diag1.data(), diagN.data(), n * sizeof(double)) == 0;

    A = base;
    t0 = clock_type::now();
    jacobi_cyclic_serial(A, V, n);
    const double serial = secs_since(t0);

    std::printf("jacobi %4dx%-4d  serial-cyclic %7.3fs   tournament(1t) %7.3fs   tournament(%dt) %7.3fs"
                "   speedup %.2fx   bit-identical across threads: %s\n",
                n, n, serial, tour1, max_threads, tourN, tour1 / tourN, identical ? "yes" : "NO");
}

GapTable toy_table(int N, std::uint64_t seed) {
    rng::Sequence rs(seed);
    GapTable t;
    t.tol = 1e-9;
    t.scale = 2.0;
    for (int i = 0; i < N / 2; ++i) {
        const double g = rs.uniform(0.05, 3.0);
        const cplx w(rs.uniform(-0.3, 0.3), rs.uniform(-0.3, 0.3));
        t.entries.push_back({g, w});
        t.entries.push_back({-g, std::conj(w)});
    }
    return t;
}

void bench_moments() {
    // brute force is O(N^q): keep its table tiny, the join table realistic
    const GapTable small = toy_table(24, 3);
    auto t0 = clock_type::now();
    const cplx ref = exact_moment_reference(small, 4);
    const double brute = secs_since(t0);
    t0 = clock_type::now();
    const double mitm_small = exact_moment(small, 4, {}, false);
    const double joined = secs_since(t0);
    std::printf("moment q=4 N=%-6zu brute-force %7.3fs   meet-in-middle %7.3fs   agree: %s\n",
                small.entries.size(), brute, joined,
                std::abs(ref.real() - mitm_small) < 1e-10 ? "yes" : "NO");

    const GapTable big = toy_table(4000, 5);
    const int max_threads = omp_get_max_threads();
    omp_set_num_threads(1);
    t0 = clock_type::now();
    const double m1 = exact_moment(big, 4, {}, false);
    const double one = secs_since(t0);
    omp_set_num_threads(max_threads);
    t0 = clock_type::now();
    const double mN = exact_moment(big, 4, {}, false);
    const double many = secs_since(t0);
    std::printf("moment q=4 N=%-6zu join(1t) %7.3fs   join(%dt) %7.3fs   speedup %.2fx   "
                "bit-identical: %s\n",
                big.entries.size(), one, max_threads, many, one / many, m1 == mN ? "yes" : "NO");
}

void bench_sampling() {
    const Spectrum sp = diagonalize(build_spin_chain({10, -1.0, 1.0, -0.2, 0.5, true, 5}));
    const QuenchSetup s =
        make_setup(sp, build_state(StateKind::neel, 10, 5), site_observable(1, 10, 5));
    const std::uint64_t n = 20000;
    const int max_threads = omp_get_max_threads();
    omp_set_num_threads(1);
    auto t0 = clock_type::now();
    const auto v1 = sample_values(s, Quantity::observable, 1e6, n, 9);
    const double one = secs_since(t0);
    omp_set_num_threads(max_threads);
    t0 = clock_type::now();
    const auto vN = sample_values(s, Quantity::observable, 1e6, n, 9);
    const double many = secs_since(t0);
    std::printf("sampling D=252 n=%-6llu serial %7.3fs   omp(%dt) %7.3fs   speedup %.2fx   "
                "bit-identical: %s\n",
                static_cast<unsigned long long>(n), one, max_threads, many, one / many,
                v1 == vN ? "yes" : "NO");
}

}  // namespace

int main(int argc, char** argv) {
    int jacobi_n = 512;
    if (argc > 1) jacobi_n = std::atoi(argv[1]);
    std::printf("threads available: %d\n", omp_get_max_threads());
    bench_jacobi(jacobi_n);
    bench_moments();
    bench_sampling();
    return 0;
}
