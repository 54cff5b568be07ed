#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace eqlab {

using cplx = std::complex<double>;

// Dense Hermitian matrix, row-major. Hermiticity is a validated invariant,
// not a storage property: both triangles are kept.
struct HermitianOperator {
    int dim = 0;
    std::vector<cplx> a;  // dim x dim, row-major

    HermitianOperator() = default;
    explicit HermitianOperator(int d) : dim(d), a(static_cast<std::size_t>(d) * d) {}

    cplx& at(int i, int j) { return a[static_cast<std::size_t>(i) * dim + j]; }
    const cplx& at(int i, int j) const { return a[static_cast<std::size_t>(i) * dim + j]; }

    double max_abs() const {
        double m = 0.0;
        for (const cplx& z : a) m = std::max(m, std::abs(z));
        return m;
    }

    // max |A - A^dagger| entrywise
    double hermiticity_defect() const {
        double d = 0.0;
        for (int i = 0; i < dim; ++i)
            for (int j = i; j < dim; ++j)
                d = std::max(d, std::abs(at(i, j) - std::conj(at(j, i))));
        return d;
    }

    bool is_hermitian(double rel_tol = 1e-12) const {
        const double scale = max_abs();
        return hermiticity_defect() <= rel_tol * (scale > 0 ? scale : 1.0);
    }

    bool is_real() const {
        for (const cplx& z : a)
            if (z.imag() != 0.0) return false;
        return true;
    }

    bool is_diagonal() const {
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j)
                if (i != j && at(i, j) != cplx(0.0, 0.0)) return false;
        return true;
    }

    static HermitianOperator identity(int d) {
        HermitianOperator m(d);
        for (int i = 0; i < d; ++i) m.at(i, i) = 1.0;
        return m;
    }
};

// Normalized state vector in some orthonormal basis of dimension dim.
struct BasisState {
    int dim = 0;
    std::vector<cplx> amp;

    double norm2() const {
        double s = 0.0;
        for (const cplx& z : amp) s += std::norm(z);
        return s;
    }
};

void require(bool cond, const std::string& msg);

// C = A * B, square complex matrices (row-major), OpenMP over rows.
void matmul(const std::vector<cplx>& A, const std::vector<cplx>& B, std::vector<cplx>& C, int n);

// y = A * x
void matvec(const std::vector<cplx>& A, const std::vector<cplx>& x, std::vector<cplx>& y, int n);

}  // namespace eqlab
