#pragma once

#include <stdexcept>
#include <vector>

#include "eqlab/matrix.hpp"

namespace eqlab {

struct JacobiOptions {
    double threshold_factor = 1e-13;  // stop when off-diag Frobenius <= factor * ||A||_F
    int max_sweeps = 100;
};

struct ConvergenceError : std::runtime_error {
    double off_norm;
    explicit ConvergenceError(const std::string& msg, double off) : std::runtime_error(msg), off_norm(off) {}
};

// Eigendecomposition of a Hermitian matrix. Columns of `eigenvectors` are the
// eigenstates, eigenvalues ascending. Phase convention: in each column the
// largest-magnitude component is real and positive.
struct Spectrum {
    int dim = 0;
    std::vector<double> eigenvalues;
    std::vector<cplx> eigenvectors;  // column-major: [k*dim + i] = <i|E_k>
    int sweeps = 0;
    double off_norm = 0.0;  // achieved off-diagonal Frobenius norm

    cplx vec(int i, int k) const { return eigenvectors[static_cast<std::size_t>(k) * dim + i]; }

    double max_abs_eigenvalue() const {
        double m = 0.0;
        for (double e : eigenvalues) m = std::max(m, std::abs(e));
        return m;
    }
};

struct JacobiResult {
    int sweeps = 0;
    double off_norm = 0.0;
};

// Production kernel: tournament (round-robin) ordering, rotation phases run
// under OpenMP. Disjoint writes per phase make the result bit-identical for
// any thread count. A is destroyed (driven to diagonal), V accumulates the
// rotations (V starts as identity inside).
JacobiResult jacobi_tournament(std::vector<double>& A, std::vector<double>& V, int n,
                               const JacobiOptions& opts = {});

// Serial reference: classic row-cyclic Jacobi, rotations applied one at a
// time. Kept for tests and the kernel benchmark.
JacobiResult jacobi_cyclic_serial(std::vector<double>& A, std::vector<double>& V, int n,
                                  const JacobiOptions& opts = {});

Spectrum diagonalize(const HermitianOperator& H, const JacobiOptions& opts = {});

// ||A|| (largest singular value = max |eigenvalue| for Hermitian A).
double operator_norm(const HermitianOperator& A);

// Diagnostics used by tests: max ||H v_k - E_k v_k||_2 and max |V^dag V - I|.
double max_residual(const HermitianOperator& H, const Spectrum& s);
double orthonormality_defect(const Spectrum& s);

}  // namespace eqlab
