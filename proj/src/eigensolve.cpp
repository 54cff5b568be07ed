#include "eqlab/eigensolve.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace eqlab {

namespace {

double frobenius(const std::vector<double>& A) {
    double s = 0.0;
    for (double x : A) s += x * x;
    return std::sqrt(s);
}

double off_frobenius(const std::vector<double>& A, int n) {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) s += A[static_cast<std::size_t>(i) * n + j] * A[static_cast<std::size_t>(i) * n + j];
    return std::sqrt(s);
}

struct Rotation {
    int p, q;
    double c, s;
    bool active;
};

// c,s zeroing A[p][q] (Golub & Van Loan sec. 8.5 formulas).
inline void rotation_params(double app, double aqq, double apq, double& c, double& s) {
    const double tau = (aqq - app) / (2.0 * apq);
    const double t = (tau >= 0.0) ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                  : 1.0 / (tau - std::sqrt(1.0 + tau * tau));
    c = 1.0 / std::sqrt(1.0 + t * t);
    s = t * c;
}

}  // namespace

JacobiResult jacobi_tournament(std::vector<double>& A, std::vector<double>& V, int n,
                               const JacobiOptions& opts) {
    const std::size_t N = static_cast<std::size_t>(n);
    V.assign(N * N, 0.0);
    for (int i = 0; i < n; ++i) V[static_cast<std::size_t>(i) * n + i] = 1.0;
    if (n < 2) return {0, 0.0};

    const double target = opts.threshold_factor * frobenius(A);

    // round-robin schedule: slot 0 fixed, the rest rotate
    const int m = (n % 2 == 0) ? n : n + 1;  // pad odd n with a dummy
    std::vector<int> players(m);
    std::iota(players.begin(), players.end(), 0);

    std::vector<Rotation> rots(m / 2);

    JacobiResult res;
    for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
        for (int round = 0; round < m - 1; ++round) {
            // pair up from the current schedule; read the frozen matrix
            for (int i = 0; i < m / 2; ++i) {
                int p = players[i], q = players[m - 1 - i];
                if (p > q) std::swap(p, q);
                Rotation& r = rots[i];
                r.p = p;
                r.q = q;
                if (q >= n) {  // dummy slot
                    r.active = false;
                    continue;
                }
                const double apq = A[static_cast<std::size_t>(p) * n + q];
                if (std::abs(apq) < 1e-300) {
                    r.active = false;
                    continue;
                }
                rotation_params(A[static_cast<std::size_t>(p) * n + p],
                                A[static_cast<std::size_t>(q) * n + q], apq, r.c, r.s);
                r.active = true;
            }

            // row phase: pair (p,q) owns rows p and q
#pragma omp parallel for schedule(static)
            for (int i = 0; i < m / 2; ++i) {
                const Rotation& r = rots[i];
                if (!r.active) continue;
                double* rp = A.data() + static_cast<std::size_t>(r.p) * n;
                double* rq = A.data() + static_cast<std::size_t>(r.q) * n;
                for (int j = 0; j < n; ++j) {
                    const double x = rp[j], y = rq[j];
                    rp[j] = r.c * x - r.s * y;
                    rq[j] = r.s * x + r.c * y;
                }
            }

            // column phase: row-block parallel, each row applies every
            // rotation (disjoint column pairs, so per-row order is free)
#pragma omp parallel for schedule(static)
            for (int i = 0; i < n; ++i) {
                double* row = A.data() + static_cast<std::size_t>(i) * n;
                double* vrow = V.data() + static_cast<std::size_t>(i) * n;
                for (const Rotation& r : rots) {
                    if (!r.active) continue;
                    double x = row[r.p], y = row[r.q];
                    row[r.p] = r.c * x - r.s * y;
                    row[r.q] = r.s * x + r.c * y;
                    x = vrow[r.p];
                    y = vrow[r.q];
                    vrow[r.p] = r.c * x - r.s * y;
                    vrow[r.q] = r.s * x + r.c * y;
                }
            }

            // advance the schedule: rotate players[1..m-1] right by one
            const int last = players[m - 1];
            for (int i = m - 1; i >= 2; --i) players[i] = players[i - 1];
            players[1] = last;
        }

        res.sweeps = sweep + 1;
        res.off_norm = off_frobenius(A, n);
        if (res.off_norm <= target) return res;
    }
    throw ConvergenceError("jacobi_tournament: no convergence after " +
                               std::to_string(opts.max_sweeps) +
                               " sweeps, off-diagonal norm " + std::to_string(res.off_norm),
                           res.off_norm);
}

JacobiResult jacobi_cyclic_serial(std::vector<double>& A, std::vector<double>& V, int n,
                                  const JacobiOptions& opts) {
    const std::size_t N = static_cast<std::size_t>(n);
    V.assign(N * N, 0.0);
    for (int i = 0; i < n; ++i) V[static_cast<std::size_t>(i) * n + i] = 1.0;
    if (n < 2) return {0, 0.0};

    const double target = opts.threshold_factor * frobenius(A);
    JacobiResult res;
    for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = A[static_cast<std::size_t>(p) * n + q];
                if (std::abs(apq) < 1e-300) continue;
                double c, s;
                rotation_params(A[static_cast<std::size_t>(p) * n + p],
                                A[static_cast<std::size_t>(q) * n + q], apq, c, s);
                double* rp = A.data() + static_cast<std::size_t>(p) * n;
                double* rq = A.data() + static_cast<std::size_t>(q) * n;
                for (int j = 0; j < n; ++j) {
                    const double x = rp[j], y = rq[j];
                    rp[j] = c * x - s * y;
                    rq[j] = s * x + c * y;
                }
                for (int i = 0; i < n; ++i) {
                    double* row = A.data() + static_cast<std::size_t>(i) * n;
                    double* vrow = V.data() + static_cast<std::size_t>(i) * n;
                    double x = row[p], y = row[q];
                    row[p] = c * x - s * y;
                    row[q] = s * x + c * y;
                    x = vrow[p];
                    y = vrow[q];
                    vrow[p] = c * x - s * y;
                    vrow[q] = s * x + c * y;
                }
            }
        }
        res.sweeps = sweep + 1;
        res.off_norm = off_frobenius(A, n);
        if (res.off_norm <= target) return res;
    }
    throw ConvergenceError("jacobi_cyclic_serial: no convergence after " +
                               std::to_string(opts.max_sweeps) +
                               " sweeps, off-diagonal norm " + std::to_string(res.off_norm),
                           res.off_norm);
}

namespace {

// sort eigenpairs ascending (stable on ties) and apply the phase convention
Spectrum assemble_real(std::vector<double>& A, std::vector<double>& V, int n, JacobiResult jr) {
    Spectrum s;
    s.dim = n;
    s.sweeps = jr.sweeps;
    s.off_norm = jr.off_norm;
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        const double ea = A[static_cast<std::size_t>(a) * n + a];
        const double eb = A[static_cast<std::size_t>(b) * n + b];
        return ea < eb;
    });
    s.eigenvalues.resize(n);
    s.eigenvectors.assign(static_cast<std::size_t>(n) * n, cplx(0.0, 0.0));
    for (int k = 0; k < n; ++k) {
        const int src = order[k];
        s.eigenvalues[k] = A[static_cast<std::size_t>(src) * n + src];
        // find the leading component
        int imax = 0;
        double amax = -1.0;
        for (int i = 0; i < n; ++i) {
            const double v = std::abs(V[static_cast<std::size_t>(i) * n + src]);
            if (v > amax) {
                amax = v;
                imax = i;
            }
        }
        const double sign = (V[static_cast<std::size_t>(imax) * n + src] < 0.0) ? -1.0 : 1.0;
        for (int i = 0; i < n; ++i)
            s.eigenvectors[static_cast<std::size_t>(k) * n + i] =
                sign * V[static_cast<std::size_t>(i) * n + src];
    }
    return s;
}

void phase_fix(std::vector<cplx>& v) {
    int imax = 0;
    double amax = -1.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double a = std::abs(v[i]);
        if (a > amax) {
            amax = a;
            imax = static_cast<int>(i);
        }
    }
    if (amax <= 0.0) return;
    const cplx ph = std::conj(v[imax]) / amax;
    for (cplx& z : v) z *= ph;
}

}  // namespace

Spectrum diagonalize(const HermitianOperator& H, const JacobiOptions& opts) {
    require(H.dim >= 1, "diagonalize: dimension must be >= 1");
    require(H.is_hermitian(), "diagonalize: matrix is not Hermitian");
    const int n = H.dim;

    if (H.is_real()) {
        std::vector<double> A(static_cast<std::size_t>(n) * n);
        for (std::size_t i = 0; i < A.size(); ++i) A[i] = H.a[i].real();
        std::vector<double> V;
        JacobiResult jr = jacobi_tournament(A, V, n, opts);
        return assemble_real(A, V, n, jr);
    }

    // complex Hermitian via the 2n x 2n real-symmetric embedding
    // [[Re H, -Im H], [Im H, Re H]]; each eigenvalue shows up twice.
    const int n2 = 2 * n;
    std::vector<double> A(static_cast<std::size_t>(n2) * n2);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const cplx z = H.at(i, j);
            A[static_cast<std::size_t>(i) * n2 + j] = z.real();
            A[static_cast<std::size_t>(i) * n2 + (n + j)] = -z.imag();
            A[static_cast<std::size_t>(n + i) * n2 + j] = z.imag();
            A[static_cast<std::size_t>(n + i) * n2 + (n + j)] = z.real();
        }
    }
    std::vector<double> V;
    JacobiResult jr = jacobi_tournament(A, V, n2, opts);

    std::vector<int> order(n2);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return A[static_cast<std::size_t>(a) * n2 + a] < A[static_cast<std::size_t>(b) * n2 + b];
    });

    Spectrum s;
    s.dim = n;
    s.sweeps = jr.sweeps;
    s.off_norm = jr.off_norm;
    s.eigenvectors.reserve(static_cast<std::size_t>(n) * n);
    std::vector<cplx> cand(n);
    for (int kk = 0; kk < n2 && static_cast<int>(s.eigenvalues.size()) < n; ++kk) {
        const int src = order[kk];
        const double ev = A[static_cast<std::size_t>(src) * n2 + src];
        for (int i = 0; i < n; ++i)
            cand[i] = cplx(V[static_cast<std::size_t>(i) * n2 + src],
                           V[static_cast<std::size_t>(n + i) * n2 + src]);
        // Gram-Schmidt against everything accepted so far (twice, so the
        // residue stays at rounding level). The i*v partner copy of an
        // accepted vector collapses to ~0 here; within a degenerate cluster
        // the surviving remainder can be small but is far above rounding.
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t k = 0; k < s.eigenvalues.size(); ++k) {
                const cplx* u = s.eigenvectors.data() + k * n;
                cplx ip(0.0, 0.0);
                for (int i = 0; i < n; ++i) ip += std::conj(u[i]) * cand[i];
                for (int i = 0; i < n; ++i) cand[i] -= ip * u[i];
            }
        }
        double nr2 = 0.0;
        for (int i = 0; i < n; ++i) nr2 += std::norm(cand[i]);
        if (nr2 < 1e-10) continue;  // duplicate copy
        const double inv = 1.0 / std::sqrt(nr2);
        for (int i = 0; i < n; ++i) cand[i] *= inv;
        phase_fix(cand);
        s.eigenvalues.push_back(ev);
        s.eigenvectors.insert(s.eigenvectors.end(), cand.begin(), cand.end());
    }
    if (static_cast<int>(s.eigenvalues.size()) != n)
        throw ConvergenceError("diagonalize: embedding deflation yielded " +
                                   std::to_string(s.eigenvalues.size()) + " of " +
                                   std::to_string(n) + " eigenpairs",
                               jr.off_norm);
    return s;
}

double operator_norm(const HermitianOperator& A) {
    require(A.dim >= 1, "operator_norm: empty matrix");
    if (A.is_diagonal()) {
        double m = 0.0;
        for (int i = 0; i < A.dim; ++i) m = std::max(m, std::abs(A.at(i, i)));
        return m;
    }
    const Spectrum s = diagonalize(A);
    return s.max_abs_eigenvalue();
}

double max_residual(const HermitianOperator& H, const Spectrum& s) {
    const int n = H.dim;
    double worst = 0.0;
    std::vector<cplx> hv(n);
    for (int k = 0; k < n; ++k) {
        const cplx* v = s.eigenvectors.data() + static_cast<std::size_t>(k) * n;
        for (int i = 0; i < n; ++i) {
            cplx acc(0.0, 0.0);
            for (int j = 0; j < n; ++j) acc += H.at(i, j) * v[j];
            hv[i] = acc - s.eigenvalues[k] * v[i];
        }
        double r2 = 0.0;
        for (int i = 0; i < n; ++i) r2 += std::norm(hv[i]);
        worst = std::max(worst, std::sqrt(r2));
    }
    return worst;
}

double orthonormality_defect(const Spectrum& s) {
    const int n = s.dim;
    double worst = 0.0;
    for (int k = 0; k < n; ++k) {
        for (int l = k; l < n; ++l) {
            cplx ip(0.0, 0.0);
            const cplx* vk = s.eigenvectors.data() + static_cast<std::size_t>(k) * n;
            const cplx* vl = s.eigenvectors.data() + static_cast<std::size_t>(l) * n;
            for (int i = 0; i < n; ++i) ip += std::conj(vk[i]) * vl[i];
            if (k == l) ip -= 1.0;
            worst = std::max(worst, std::abs(ip));
        }
    }
    return worst;
}

}  // namespace eqlab
