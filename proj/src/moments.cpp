#include "eqlab/moments.hpp"

#include <algorithm>
#include <cmath>

#if defined(_OPENMP) && defined(__GNUC__) && !defined(__clang__)
#include <parallel/algorithm>
// total-order comparators make the sorted sequence unique, so the parallel
// sort is byte-identical to the serial one
#define EQLAB_SORT(b, e, cmp) __gnu_parallel::sort(b, e, cmp)
#else
#define EQLAB_SORT(b, e, cmp) std::sort(b, e, cmp)
#endif

namespace eqlab {

GapTable gap_table(const QuenchSetup& setup, Quantity q, double tol) {
    if (tol < 0.0) tol = default_resonance_tol(setup.spectrum);
    require(tol > 0.0, "gap_table: tolerance must be positive");
    const int n = setup.dim();
    const auto& E = setup.spectrum.eigenvalues;

    GapTable t;
    t.tol = tol;
    t.scale = (q == Quantity::observable) ? 2.0 * setup.obs_norm : 2.0;
    t.fbar = time_average(setup, q, tol);
    for (int m = 0; m < n; ++m) {
        for (int k = 0; k < n; ++k) {
            if (m == k) continue;
            const double gap = E[m] - E[k];
            if (std::abs(gap) <= tol) continue;  // resonant: lives in fbar
            cplx w;
            if (q == Quantity::observable)
                w = std::conj(setup.coeffs[m]) * setup.coeffs[k] *
                    setup.obs[static_cast<std::size_t>(m) * n + k];
            else
                w = std::norm(setup.coeffs[m]) * std::norm(setup.coeffs[k]);
            if (w == cplx(0.0, 0.0)) continue;
            t.entries.push_back({gap, w});
        }
    }
    return t;
}

namespace {

constexpr std::size_t kMaxPairSums = 20'000'000;   // q=2 sum list guard
constexpr std::size_t kMaxTripleSums = 5'000'000;  // q=3 sum list guard
constexpr std::size_t kMaxViolations = 100;

struct IndexedSum {
    double sum;
    int i, j, k;  // unused slots = -1
};

void collect_collisions(std::vector<IndexedSum>& sums, int q, double tol, GenericityReport& rep) {
    std::sort(sums.begin(), sums.end(), [](const IndexedSum& a, const IndexedSum& b) {
        return a.sum < b.sum;
    });
    for (std::size_t i = 0; i + 1 < sums.size(); ++i) {
        if (sums[i + 1].sum - sums[i].sum > tol) continue;
        if (rep.violations.size() >= kMaxViolations) return;
        GenericityViolation v;
        v.q = q;
        v.sum_a = sums[i].sum;
        v.sum_b = sums[i + 1].sum;
        for (int idx : {sums[i].i, sums[i].j, sums[i].k})
            if (idx >= 0) v.set_a.push_back(idx);
        for (int idx : {sums[i + 1].i, sums[i + 1].j, sums[i + 1].k})
            if (idx >= 0) v.set_b.push_back(idx);
        rep.violations.push_back(std::move(v));
    }
}

}  // namespace

GenericityReport check_genericity(const std::vector<double>& E, int q_max, double tol) {
    require(q_max == 2 || q_max == 3,
            "check_genericity: q_max must be 2 or 3 (larger is combinatorially explosive)");
    require(tol > 0.0, "check_genericity: tolerance must be positive");
    const int D = static_cast<int>(E.size());
    GenericityReport rep;
    rep.q_checked = q_max;
    rep.tol = tol;

    // q = 1: non-degenerate levels
    std::vector<int> order(D);
    for (int i = 0; i < D; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) { return E[a] < E[b]; });
    for (int i = 0; i + 1 < D; ++i)
        if (E[order[i + 1]] - E[order[i]] <= tol)
            rep.degenerate_levels.emplace_back(order[i], order[i + 1]);

    // q = 2: pairwise sums over i <= j (covers sum and gap collisions)
    {
        const std::size_t count = static_cast<std::size_t>(D) * (D + 1) / 2;
        require(count <= kMaxPairSums, "check_genericity: q=2 sum list too large");
        std::vector<IndexedSum> sums;
        sums.reserve(count);
        for (int i = 0; i < D; ++i)
            for (int j = i; j < D; ++j) sums.push_back({E[i] + E[j], i, j, -1});
        collect_collisions(sums, 2, tol, rep);
    }

    if (q_max >= 3 && D >= 3) {
        const double triples = double(D) * (D - 1) * (D - 2) / 6.0;
        require(triples <= double(kMaxTripleSums),
                "check_genericity: q=3 needs C(D,3) <= 5e6 (D <= ~310)");
        std::vector<IndexedSum> sums;
        sums.reserve(static_cast<std::size_t>(triples));
        for (int i = 0; i < D; ++i)
            for (int j = i + 1; j < D; ++j)
                for (int k = j + 1; k < D; ++k) sums.push_back({E[i] + E[j] + E[k], i, j, k});
        collect_collisions(sums, 3, tol, rep);
    }

    rep.passed = rep.violations.empty() && rep.degenerate_levels.empty();
    return rep;
}

namespace {

struct SumW {
    double s;
    cplx w;
};

// total order so the sorted sequence is unique as a multiset (equal-key order
// then cannot depend on the sort algorithm or its parallelism)
inline bool sumw_less(const SumW& x, const SumW& y) {
    if (x.s != y.s) return x.s < y.s;
    if (x.w.real() != y.w.real()) return x.w.real() < y.w.real();
    return x.w.imag() < y.w.imag();
}

// ordered b-tuples of `base` as (sum, weight product), b in {1, 2}
std::vector<SumW> stored_tuples(const std::vector<GapEntry>& base, int b) {
    const std::size_t N = base.size();
    std::vector<SumW> out;
    if (b == 1) {
        out.resize(N);
        for (std::size_t i = 0; i < N; ++i) out[i] = {base[i].gap, base[i].w};
    } else {
        out.resize(N * N);
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(N); ++i) {
            SumW* row = out.data() + static_cast<std::size_t>(i) * N;
            const double gi = base[i].gap;
            const cplx wi = base[i].w;
            for (std::size_t j = 0; j < N; ++j) row[j] = {gi + base[j].gap, wi * base[j].w};
        }
    }
    EQLAB_SORT(out.begin(), out.end(), sumw_less);
    return out;
}

struct Kahan {
    cplx sum{0.0, 0.0}, c{0.0, 0.0};
    void add(cplx x) {
        const cplx y = x - c;
        const cplx t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
};

std::vector<cplx> prefix_weights(const std::vector<SumW>& v) {
    std::vector<cplx> cum(v.size() + 1);
    cum[0] = cplx(0.0, 0.0);
    Kahan acc;
    for (std::size_t i = 0; i < v.size(); ++i) {
        acc.add(v[i].w);
        cum[i + 1] = acc.sum;
    }
    return cum;
}

inline std::size_t first_at_least(const std::vector<SumW>& v, double x) {
    return static_cast<std::size_t>(
        std::lower_bound(v.begin(), v.end(), x, [](const SumW& e, double t) { return e.s < t; }) -
        v.begin());
}

}  // namespace

cplx tuple_resonance_sum(const std::vector<GapEntry>& left, int a, const std::vector<GapEntry>& right,
                         int b, double window, const MomentEngineLimits& limits) {
    require(a >= 1 && a <= 2 && b >= 1 && b <= 2 && a >= b, "tuple_resonance_sum: supports q in 2..4");
    if (left.empty() || right.empty()) return {0.0, 0.0};

    const double nL = static_cast<double>(left.size());
    const double nR = static_cast<double>(right.size());
    const double stored =
        std::pow(nR, b) + (a == 2 && b == 2 && &left != &right ? std::pow(nL, 2) : 0.0);
    const double streamed = std::pow(nL, a);
    if (stored > double(limits.max_stored) || streamed > double(limits.max_streamed))
        throw CostEnvelopeError(
            "tuple enumeration refused: would store ~" + std::to_string(std::llround(stored)) +
                " and stream ~" + std::to_string(std::llround(streamed)) + " tuples (limits " +
                std::to_string(limits.max_stored) + " / " + std::to_string(limits.max_streamed) + ")",
            stored, streamed);

    const std::vector<SumW> rhs = stored_tuples(right, b);
    const std::vector<cplx> cum = prefix_weights(rhs);
    const auto window_sum = [&](double target) {
        const std::size_t lo = first_at_least(rhs, target - window);
        const std::size_t hi = first_at_least(rhs, target + window);
        return cum[hi] - cum[lo];  // half-open [target-window, target+window)
    };

    // left side streamed in fixed chunks; per-chunk Kahan partials reduced in
    // chunk order, so the result is independent of the OpenMP thread count
    const std::size_t NL = left.size();
    std::vector<cplx> partial;
    if (a == 1) {
        const std::size_t chunk = 1 << 14;
        const std::size_t nchunks = (NL + chunk - 1) / chunk;
        partial.assign(nchunks, cplx(0.0, 0.0));
#pragma omp parallel for schedule(dynamic)
        for (std::int64_t ci = 0; ci < static_cast<std::int64_t>(nchunks); ++ci) {
            Kahan acc;
            const std::size_t beg = static_cast<std::size_t>(ci) * chunk;
            const std::size_t end = std::min(beg + chunk, NL);
            for (std::size_t i = beg; i < end; ++i)
                acc.add(left[i].w * window_sum(-left[i].gap));
            partial[static_cast<std::size_t>(ci)] = acc.sum;
        }
    } else if (b == 1) {  // q = 3: stream ordered pairs, rhs is small and cached
        partial.assign(NL, cplx(0.0, 0.0));
#pragma omp parallel for schedule(dynamic, 8)
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(NL); ++i) {
            Kahan acc;
            const double gi = left[static_cast<std::size_t>(i)].gap;
            const cplx wi = left[static_cast<std::size_t>(i)].w;
            for (std::size_t j = 0; j < NL; ++j)
                acc.add(wi * left[j].w * window_sum(-(gi + left[j].gap)));
            partial[static_cast<std::size_t>(i)] = acc.sum;
        }
    } else {
        // q = 4: stream the left pair list in sorted order; targets are then
        // monotone and the window bounds sweep linearly instead of bisecting
        const std::vector<SumW> lhs =
            (&left == &right) ? std::vector<SumW>() : stored_tuples(left, 2);
        const std::vector<SumW>& lref = (&left == &right) ? rhs : lhs;
        const std::size_t NP = lref.size();
        const std::size_t chunk = 1 << 16;
        const std::size_t nchunks = (NP + chunk - 1) / chunk;
        partial.assign(nchunks, cplx(0.0, 0.0));
#pragma omp parallel for schedule(dynamic)
        for (std::int64_t ci = 0; ci < static_cast<std::int64_t>(nchunks); ++ci) {
            const std::size_t beg = static_cast<std::size_t>(ci) * chunk;
            const std::size_t end = std::min(beg + chunk, NP);
            // targets -s descend as s ascends: bounds only ever move left
            std::size_t lo = first_at_least(rhs, -lref[beg].s - window);
            std::size_t hi = first_at_least(rhs, -lref[beg].s + window);
            Kahan acc;
            for (std::size_t i = beg; i < end; ++i) {
                const double target = -lref[i].s;
                while (lo > 0 && rhs[lo - 1].s >= target - window) --lo;
                while (hi > 0 && rhs[hi - 1].s >= target + window) --hi;
                acc.add(lref[i].w * (cum[hi] - cum[lo]));
            }
            partial[static_cast<std::size_t>(ci)] = acc.sum;
        }
    }
    Kahan total;
    for (const cplx& p : partial) total.add(p);
    return total.sum;
}

namespace {

std::vector<GapEntry> conjugated_negated(const std::vector<GapEntry>& t) {
    std::vector<GapEntry> out(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) out[i] = {-t[i].gap, std::conj(t[i].w)};
    return out;
}

double finish_moment(cplx mu, const GapTable& table, int q, bool enforce_real) {
    if (enforce_real) {
        const double thresh = 1e-8 * std::pow(std::max(table.scale, 1e-12), q);
        if (std::abs(mu.imag()) > thresh)
            throw std::runtime_error("exact moment: imaginary residue " + std::to_string(mu.imag()) +
                                     " exceeds threshold " + std::to_string(thresh));
    }
    return mu.real();
}

}  // namespace

double exact_moment(const GapTable& table, int q, const MomentEngineLimits& limits, bool enforce_real) {
    require(q >= 2 && q <= 4, "exact_moment: q must be in {2,3,4}");
    if (table.entries.empty()) return 0.0;
    const int a = (q + 1) / 2, b = q / 2;
    const cplx mu = tuple_resonance_sum(table.entries, a, table.entries, b, q * table.tol, limits);
    return finish_moment(mu, table, q, enforce_real);
}

double exact_abs_moment(const GapTable& table, int q, const MomentEngineLimits& limits) {
    require(q >= 2 && q <= 4 && q % 2 == 0, "exact_abs_moment: q must be even and in {2,4}");
    if (table.entries.empty()) return 0.0;
    const int half = q / 2;
    const std::vector<GapEntry> conj = conjugated_negated(table.entries);
    const cplx mu = tuple_resonance_sum(table.entries, half, conj, half, q * table.tol, limits);
    return finish_moment(mu, table, q, true);
}

cplx exact_moment_reference(const GapTable& table, int q) {
    require(q >= 1 && q <= 6, "exact_moment_reference: q out of range");
    const auto& e = table.entries;
    const std::size_t N = e.size();
    if (N == 0) return {0.0, 0.0};
    require(std::pow(double(N), q) <= 2e8, "exact_moment_reference: table too large for brute force");
    const double window = q * table.tol;
    std::vector<std::size_t> idx(q, 0);
    cplx total(0.0, 0.0);
    while (true) {
        double gsum = 0.0;
        cplx w(1.0, 0.0);
        for (int i = 0; i < q; ++i) {
            gsum += e[idx[i]].gap;
            w *= e[idx[i]].w;
        }
        if (gsum >= -window && gsum < window) total += w;
        int pos = q - 1;
        while (pos >= 0 && ++idx[pos] == N) idx[pos--] = 0;
        if (pos < 0) break;
    }
    return total;
}

std::pair<double, double> sampled_moment(const QuenchSetup& setup, Quantity quantity, int q, double T,
                                         std::uint64_t n_samples, std::uint64_t seed) {
    require(q >= 1, "sampled_moment: q must be >= 1");
    const double fbar = time_average(setup, quantity);
    const std::vector<double> vals = sample_values(setup, quantity, T, n_samples, seed);
    double mean = 0.0;
    std::vector<double> powd(vals.size());
    for (std::size_t i = 0; i < vals.size(); ++i) {
        double d = vals[i] - fbar, p = 1.0;
        for (int k = 0; k < q; ++k) p *= d;
        powd[i] = p;
        mean += p;
    }
    mean /= double(n_samples);
    double var = 0.0;
    for (double p : powd) var += (p - mean) * (p - mean);
    var /= std::max<double>(1.0, double(n_samples) - 1.0);
    return {mean, std::sqrt(var / double(n_samples))};
}

std::uint64_t derangement_count(int q) {
    require(q >= 0 && q <= 20, "derangement_count: q must be in [0, 20]");
    if (q == 0) return 1;
    if (q == 1) return 0;
    std::uint64_t a = 1, b = 0;  // !0, !1
    for (int k = 2; k <= q; ++k) {
        const std::uint64_t c = static_cast<std::uint64_t>(k - 1) * (a + b);
        a = b;
        b = c;
    }
    return b;
}

double moment_bound(Quantity kind, double obs_norm, double purity, int q) {
    require(purity > 0.0 && purity <= 1.0 + 1e-12, "moment_bound: purity must be in (0,1]");
    require(q >= 1, "moment_bound: q must be >= 1");
    const double g = (kind == Quantity::observable) ? obs_norm * std::sqrt(purity) : purity;
    return std::pow(double(q) * g, q);
}

TracePowerCheck trace_power_check(const QuenchSetup& setup, int q) {
    require(q >= 1, "trace_power_check: q must be >= 1");
    const int n = setup.dim();
    const std::size_t N = static_cast<std::size_t>(n);

    // B = A omega in the eigenbasis: scale column k of obs by p_k
    std::vector<cplx> B(N * N);
    std::vector<double> p(n);
    double purity = 0.0;
    for (int k = 0; k < n; ++k) {
        p[k] = std::norm(setup.coeffs[k]);
        purity += p[k] * p[k];
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) B[N * i + j] = setup.obs[N * i + j] * p[j];

    std::vector<cplx> P = B, tmp;
    for (int k = 2; k <= q; ++k) {
        matmul(P, B, tmp, n);
        P.swap(tmp);
    }
    cplx tr(0.0, 0.0);
    for (int i = 0; i < n; ++i) tr += P[N * i + i];

    TracePowerCheck out;
    out.lhs = std::abs(tr);
    out.rhs = std::pow(setup.obs_norm * std::sqrt(purity), q);
    out.ok = out.lhs <= out.rhs * (1.0 + 1e-9);  // relative slack for exact-equality cases
    return out;
}

}  // namespace eqlab
