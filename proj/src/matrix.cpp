#include "eqlab/matrix.hpp"

namespace eqlab {

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

void matmul(const std::vector<cplx>& A, const std::vector<cplx>& B, std::vector<cplx>& C, int n) {
    C.assign(static_cast<std::size_t>(n) * n, cplx(0.0, 0.0));
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        cplx* ci = C.data() + static_cast<std::size_t>(i) * n;
        const cplx* ai = A.data() + static_cast<std::size_t>(i) * n;
        for (int k = 0; k < n; ++k) {
            const cplx aik = ai[k];
            if (aik == cplx(0.0, 0.0)) continue;
            const cplx* bk = B.data() + static_cast<std::size_t>(k) * n;
            for (int j = 0; j < n; ++j) ci[j] += aik * bk[j];
        }
    }
}

void matvec(const std::vector<cplx>& A, const std::vector<cplx>& x, std::vector<cplx>& y, int n) {
    y.assign(n, cplx(0.0, 0.0));
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        const cplx* ai = A.data() + static_cast<std::size_t>(i) * n;
        cplx s(0.0, 0.0);
        for (int j = 0; j < n; ++j) s += ai[j] * x[j];
        y[i] = s;
    }
}

}  // namespace eqlab
