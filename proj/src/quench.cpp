#include "eqlab/quench.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "eqlab/rng.hpp"

namespace eqlab {

double default_resonance_tol(const Spectrum& s) {
    const double scale = s.max_abs_eigenvalue();
    return 1e-10 * (scale > 0.0 ? scale : 1.0);
}

double min_nonzero_gap(const Spectrum& s, double tol) {
    // eigenvalues are sorted; the smallest distinct-level spacing is attained
    // between the closest non-resonant neighbours after collapsing clusters
    double best = std::numeric_limits<double>::infinity();
    const auto& e = s.eigenvalues;
    for (std::size_t i = 0; i + 1 < e.size(); ++i) {
        // skip forward over the resonance cluster of level i
        for (std::size_t j = i + 1; j < e.size(); ++j) {
            const double g = e[j] - e[i];
            if (g > tol) {
                best = std::min(best, g);
                break;
            }
        }
    }
    return std::isfinite(best) ? best : 0.0;
}

double default_horizon(const Spectrum& s, double tol) {
    const double gmin = min_nonzero_gap(s, tol);
    require(gmin > 0.0, "default_horizon: spectrum has no nonzero gap");
    return 1e4 * 2.0 * std::numbers::pi / gmin;
}

QuenchSetup make_setup(const Spectrum& spectrum, const BasisState& psi, const HermitianOperator& A) {
    const int n = spectrum.dim;
    require(psi.dim == n && A.dim == n, "make_setup: dimension mismatch");
    require(std::abs(psi.norm2() - 1.0) <= 1e-10, "make_setup: state is not normalized");
    require(A.is_hermitian(1e-10), "make_setup: observable is not Hermitian");

    QuenchSetup s;
    s.spectrum = spectrum;
    const std::size_t N = static_cast<std::size_t>(n);

    // CV = V^dag as a row-major matrix: CV[k][i] = conj(<i|E_k>)
    std::vector<cplx> CV(N * N);
    for (std::size_t idx = 0; idx < N * N; ++idx) CV[idx] = std::conj(spectrum.eigenvectors[idx]);

    matvec(CV, psi.amp, s.coeffs, n);

    // obs = V^dag A V
    std::vector<cplx> VM(N * N);  // VM[j][l] = <j|E_l>
    for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) VM[static_cast<std::size_t>(j) * n + l] = spectrum.vec(j, l);
    std::vector<cplx> W;
    matmul(CV, A.a, W, n);
    matmul(W, VM, s.obs, n);

    s.obs_norm = operator_norm(A);

    double c2 = 0.0;
    for (const cplx& z : s.coeffs) c2 += std::norm(z);
    require(std::abs(c2 - 1.0) <= 1e-10, "make_setup: rotated coefficients lost normalization");
    return s;
}

DiagonalEnsemble diagonal_ensemble(const QuenchSetup& setup) {
    DiagonalEnsemble d;
    const int n = setup.dim();
    d.populations.resize(n);
    double purity = 0.0, em = 0.0, e2 = 0.0;
    for (int m = 0; m < n; ++m) {
        const double p = std::norm(setup.coeffs[m]);
        d.populations[m] = p;
        purity += p * p;
        em += p * setup.spectrum.eigenvalues[m];
        e2 += p * setup.spectrum.eigenvalues[m] * setup.spectrum.eigenvalues[m];
    }
    d.purity = purity;
    d.effective_dimension = 1.0 / purity;
    d.energy_mean = em;
    d.energy_variance = e2 - em * em;
    return d;
}

DiagonalEnsemble diagonal_ensemble(const Spectrum& spectrum, const BasisState& psi) {
    QuenchSetup s;
    s.spectrum = spectrum;
    const int n = spectrum.dim;
    require(psi.dim == n, "diagonal_ensemble: dimension mismatch");
    s.coeffs.assign(n, cplx(0.0, 0.0));
    for (int k = 0; k < n; ++k) {
        cplx acc(0.0, 0.0);
        for (int i = 0; i < n; ++i) acc += std::conj(spectrum.vec(i, k)) * psi.amp[i];
        s.coeffs[k] = acc;
    }
    return diagonal_ensemble(s);
}

namespace {

// f(t) with caller-provided scratch, so sampling loops do not allocate
double eval_observable(const QuenchSetup& s, double t, std::vector<cplx>& u, std::vector<cplx>& v) {
    const int n = s.dim();
    for (int m = 0; m < n; ++m) {
        const double ph = -s.spectrum.eigenvalues[m] * t;
        u[m] = s.coeffs[m] * cplx(std::cos(ph), std::sin(ph));
    }
    for (int m = 0; m < n; ++m) {
        const cplx* row = s.obs.data() + static_cast<std::size_t>(m) * n;
        cplx acc(0.0, 0.0);
        for (int j = 0; j < n; ++j) acc += row[j] * u[j];
        v[m] = acc;
    }
    cplx f(0.0, 0.0);
    for (int m = 0; m < n; ++m) f += std::conj(u[m]) * v[m];
    if (std::abs(f.imag()) > 1e-6 * std::max(s.obs_norm, 1e-30))
        throw std::runtime_error("expectation_at: imaginary residue " + std::to_string(f.imag()) +
                                 " exceeds 1e-6*||A||; setup is corrupted");
    return f.real();
}

double eval_fidelity(const QuenchSetup& s, double t) {
    const int n = s.dim();
    cplx amp(0.0, 0.0);
    for (int m = 0; m < n; ++m) {
        const double ph = -s.spectrum.eigenvalues[m] * t;
        amp += std::norm(s.coeffs[m]) * cplx(std::cos(ph), std::sin(ph));
    }
    return std::norm(amp);
}

}  // namespace

double expectation_at(const QuenchSetup& setup, double t) {
    std::vector<cplx> u(setup.dim()), v(setup.dim());
    return eval_observable(setup, t, u, v);
}

double fidelity_at(const QuenchSetup& setup, double t) { return eval_fidelity(setup, t); }

double time_average(const QuenchSetup& setup, double tol) {
    return time_average(setup, Quantity::observable, tol);
}

double time_average(const QuenchSetup& setup, Quantity q, double tol) {
    if (tol < 0.0) tol = default_resonance_tol(setup.spectrum);
    const int n = setup.dim();
    const auto& E = setup.spectrum.eigenvalues;
    cplx acc(0.0, 0.0);
    for (int m = 0; m < n; ++m) {
        const double pm = std::norm(setup.coeffs[m]);
        if (q == Quantity::observable)
            acc += std::conj(setup.coeffs[m]) * setup.coeffs[m] *
                   setup.obs[static_cast<std::size_t>(m) * n + m];
        else
            acc += pm * pm;
        // resonant partners (eigenvalues sorted: scan the cluster around m)
        for (int d : {-1, +1}) {
            for (int k = m + d; k >= 0 && k < n; k += d) {
                if (std::abs(E[k] - E[m]) > tol) break;
                if (q == Quantity::observable)
                    acc += std::conj(setup.coeffs[m]) * setup.coeffs[k] *
                           setup.obs[static_cast<std::size_t>(m) * n + k];
                else
                    acc += std::norm(setup.coeffs[m]) * std::norm(setup.coeffs[k]);
            }
        }
    }
    return acc.real();
}

std::vector<double> sample_values(const QuenchSetup& setup, Quantity q, double T, std::uint64_t n,
                                  std::uint64_t seed) {
    require(T > 0.0, "sample_values: T must be positive");
    require(n >= 1, "sample_values: need at least one sample");
    std::vector<double> out(n);
    const std::int64_t nn = static_cast<std::int64_t>(n);
    if (q == Quantity::observable) {
        std::exception_ptr err;  // exceptions must not escape the parallel region
#pragma omp parallel
        {
            std::vector<cplx> u(setup.dim()), v(setup.dim());
#pragma omp for schedule(static)
            for (std::int64_t i = 0; i < nn; ++i) {
                try {
                    const double t = T * rng::counter_uniform01(seed, static_cast<std::uint64_t>(i));
                    out[static_cast<std::size_t>(i)] = eval_observable(setup, t, u, v);
                } catch (...) {
#pragma omp critical
                    if (!err) err = std::current_exception();
                }
            }
        }
        if (err) std::rethrow_exception(err);
    } else {
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < nn; ++i) {
            const double t = T * rng::counter_uniform01(seed, static_cast<std::uint64_t>(i));
            out[static_cast<std::size_t>(i)] = eval_fidelity(setup, t);
        }
    }
    return out;
}

SampledHistogram sample_histogram(const QuenchSetup& setup, Quantity q, double T,
                                  std::uint64_t n_samples, int n_bins, std::uint64_t seed) {
    require(n_bins >= 1, "sample_histogram: need at least one bin");
    const std::vector<double> vals = sample_values(setup, q, T, n_samples, seed);

    SampledHistogram h;
    h.T = T;
    h.n_samples = n_samples;
    h.seed = seed;

    double lo = vals[0], hi = vals[0], mean = 0.0;
    for (double v : vals) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        mean += v;
    }
    mean /= double(n_samples);
    double var = 0.0;
    for (double v : vals) var += (v - mean) * (v - mean);
    var /= double(n_samples);
    h.sample_mean = mean;
    h.sample_variance = var;

    if (hi - lo <= 1e-12 * std::max({1.0, std::abs(lo), std::abs(hi)})) {
        // constant dynamics (up to rounding): one nominal-width bin
        const double w = std::max(std::abs(lo), 1.0) * 1e-9;
        h.edges = {lo - w, lo + w};
        h.density = {1.0 / (2.0 * w)};
        return h;
    }

    h.edges.resize(n_bins + 1);
    for (int b = 0; b <= n_bins; ++b) h.edges[b] = lo + (hi - lo) * double(b) / double(n_bins);
    std::vector<std::uint64_t> counts(n_bins, 0);
    const double invw = double(n_bins) / (hi - lo);
    for (double v : vals) {
        int b = static_cast<int>((v - lo) * invw);
        b = std::clamp(b, 0, n_bins - 1);
        ++counts[b];
    }
    h.density.resize(n_bins);
    const double binw = (hi - lo) / double(n_bins);
    for (int b = 0; b < n_bins; ++b)
        h.density[b] = double(counts[b]) / (double(n_samples) * binw);
    return h;
}

}  // namespace eqlab
