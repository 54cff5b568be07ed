// Experiment runner: wires JSON configs to the library modules and emits
// CSV/JSON data plus self-contained SVG plots.
//
// Exit codes: 0 success, 1 rigorous bound violated, 2 config/usage error.

#include <omp.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "eqlab/concentration.hpp"
#include "eqlab/fermions.hpp"
#include "eqlab/io.hpp"
#include "eqlab/lattice.hpp"
#include "eqlab/moments.hpp"
#include "eqlab/quench.hpp"
#include "eqlab/rng.hpp"

using json = nlohmann::json;
using namespace eqlab;
namespace fs = std::filesystem;

namespace {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config is not valid JSON: " + std::string(e.what()));
    }
}

const json& section(const json& cfg, const std::string& name) {
    if (!cfg.contains(name))
        throw ConfigError("config is missing the required section \"" + name + "\"");
    return cfg.at(name);
}

template <typename T>
T field(const json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key)) throw ConfigError("missing field \"" + key + "\" in " + where);
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("field \"" + key + "\" in " + where + " has the wrong type");
    }
}

template <typename T>
T field_or(const json& j, const std::string& key, T def) {
    if (!j.contains(key)) return def;
    return j.at(key).get<T>();
}

SpinChainSpec parse_chain(const json& m) {
    SpinChainSpec spec;
    spec.L = field<int>(m, "L", "model");
    spec.n_up = field<int>(m, "n_up", "model");
    spec.J1 = field<double>(m, "J1", "model");
    spec.g1 = field<double>(m, "g1", "model");
    spec.J2 = field_or(m, "J2", 0.0);
    spec.g2 = field_or(m, "g2", 0.0);
    const std::string b = field_or<std::string>(m, "boundary", "periodic");
    if (b != "periodic" && b != "open") throw ConfigError("model.boundary must be periodic|open");
    spec.periodic = (b == "periodic");
    return spec;
}

StateKind parse_state_kind(const std::string& s) {
    if (s == "neel") return StateKind::neel;
    if (s == "neel_symmetric") return StateKind::neel_symmetric;
    if (s == "domainwall_translated") return StateKind::domainwall_translated;
    throw ConfigError("state.kind must be neel|neel_symmetric|domainwall_translated");
}

Quantity parse_quantity(const std::string& s) {
    if (s == "observable") return Quantity::observable;
    if (s == "fidelity") return Quantity::fidelity;
    throw ConfigError("quantity must be observable|fidelity");
}

struct SetupBundle {
    Spectrum spectrum;
    QuenchSetup setup;
    SpinChainSpec spec;
};

SetupBundle build_setup(const json& cfg) {
    const SpinChainSpec spec = parse_chain(section(cfg, "model"));
    const json& st = section(cfg, "state");
    const json& ob = section(cfg, "observable");
    if (field_or<std::string>(ob, "kind", "sigma_z") != "sigma_z")
        throw ConfigError("observable.kind must be sigma_z");
    const int site = field_or(ob, "site", 1);

    SetupBundle out;
    out.spec = spec;
    const HermitianOperator H = build_spin_chain(spec);
    out.spectrum = diagonalize(H);
    const BasisState psi =
        build_state(parse_state_kind(field<std::string>(st, "kind", "state")), spec.L, spec.n_up);
    out.setup = make_setup(out.spectrum, psi, site_observable(site, spec.L, spec.n_up));
    return out;
}

double resolve_T(const json& sampling, const Spectrum& sp) {
    const double T = field_or(sampling, "T", 0.0);
    if (T > 0.0) return T;
    return default_horizon(sp, default_resonance_tol(sp));
}

json report_to_json(const MomentReport& r) {
    json j{{"q", r.q}, {"mu_exact", r.mu_exact}};
    if (r.has_sampled) {
        j["mu_sampled"] = r.mu_sampled;
        j["sampled_stderr"] = r.sampled_stderr;
    }
    if (r.bound_applicable) {
        j["bound"] = r.bound;
        j["bound_satisfied"] = r.bound_satisfied;
    }
    return j;
}

void write_json(const fs::path& path, const json& j) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path);
    out << j.dump(2) << '\n';
}

// ---------------------------------------------------------------- pipelines

int run_model(const json& cfg, const fs::path& out) {
    const SpinChainSpec spec = parse_chain(section(cfg, "model"));
    const HermitianOperator H = build_spin_chain(spec);
    const Spectrum sp = diagonalize(H);
    io::write_matrix_csv(out / "hamiltonian.csv", H);
    io::write_spectrum_csv(out / "spectrum.csv", sp);
    if (field_or(cfg, "dump_eigenvectors", false))
        io::write_eigenvectors_csv(out / "eigenvectors.csv", sp);
    json meta{{"dim", H.dim},
              {"norm", sp.max_abs_eigenvalue()},
              {"sweeps", sp.sweeps},
              {"off_norm", sp.off_norm}};
    write_json(out / "model.json", meta);
    std::printf("model: dim=%d written to %s\n", H.dim, out.string().c_str());
    return 0;
}

int run_genericity(const json& cfg, const fs::path& out) {
    json meta;
    GenericityReport rep;
    if (cfg.contains("ensemble")) {
        const json& en = section(cfg, "ensemble");
        const int count = field<int>(en, "count", "ensemble");
        const int D = field<int>(en, "D", "ensemble");
        const std::uint64_t seed = field_or<std::uint64_t>(en, "seed", 1);
        const int q_max = field_or(en, "q_max", 3);
        int passed = 0;
        json fails = json::array();
        for (int i = 0; i < count; ++i) {
            const Spectrum sp = diagonalize(random_hermitian(D, seed + std::uint64_t(i)));
            rep = check_genericity(sp.eigenvalues, q_max, 1e-10 * sp.max_abs_eigenvalue());
            if (rep.passed)
                ++passed;
            else
                fails.push_back(int(i));
        }
        meta = json{{"mode", "gue_ensemble"}, {"count", count},     {"D", D},
                    {"passed", passed},       {"failed_draws", fails}, {"q_max", q_max}};
        std::printf("genericity: %d/%d GUE draws passed (D=%d)\n", passed, count, D);
    } else {
        const SpinChainSpec spec = parse_chain(section(cfg, "model"));
        const Spectrum sp = diagonalize(build_spin_chain(spec));
        const int q_max = field_or(cfg, "q_max", 2);
        rep = check_genericity(sp.eigenvalues, q_max, 1e-10 * sp.max_abs_eigenvalue());
        io::write_violations_csv(out / "violations.csv", rep);
        meta = json{{"mode", "model"},
                    {"q_checked", rep.q_checked},
                    {"passed", rep.passed},
                    {"violations", rep.violations.size()},
                    {"degenerate_level_pairs", rep.degenerate_levels.size()},
                    {"tol", rep.tol}};
        std::printf("genericity: passed=%s violations=%zu degenerate_pairs=%zu\n",
                    rep.passed ? "yes" : "no", rep.violations.size(), rep.degenerate_levels.size());
    }
    write_json(out / "genericity.json", meta);
    return 0;
}

int run_quench(const json& cfg, const fs::path& out) {
    const SetupBundle b = build_setup(cfg);
    const DiagonalEnsemble de = diagonal_ensemble(b.setup);
    json meta{{"dim", b.setup.dim()},
              {"purity", de.purity},
              {"effective_dimension", de.effective_dimension},
              {"energy_mean", de.energy_mean},
              {"energy_variance", de.energy_variance},
              {"obs_norm", b.setup.obs_norm},
              {"fbar_observable", time_average(b.setup, Quantity::observable)},
              {"fbar_fidelity", time_average(b.setup, Quantity::fidelity)}};
    if (cfg.contains("timeseries")) {
        const json& ts = cfg.at("timeseries");
        const double t_max = field<double>(ts, "t_max", "timeseries");
        const double dt = field<double>(ts, "dt", "timeseries");
        std::vector<io::TimePoint> fpts, Fpts;
        for (double t = 0.0; t <= t_max; t += dt) {
            fpts.push_back({t, cplx(expectation_at(b.setup, t), 0.0)});
            Fpts.push_back({t, cplx(fidelity_at(b.setup, t), 0.0)});
        }
        io::write_timeseries_csv(out / "observable_t.csv", fpts);
        io::write_timeseries_csv(out / "fidelity_t.csv", Fpts);
    }
    write_json(out / "quench.json", meta);
    std::printf("quench: purity=%.6g effective_dimension=%.6g\n", de.purity, de.effective_dimension);
    return 0;
}

int run_moments(const json& cfg, const fs::path& out) {
    json rows = json::array();
    bool violated = false;

    if (cfg.contains("ensemble")) {
        const json& en = section(cfg, "ensemble");
        const int count = field<int>(en, "count", "ensemble");
        const std::vector<int> dims = field<std::vector<int>>(en, "dims", "ensemble");
        const std::uint64_t seed = field_or<std::uint64_t>(en, "seed", 1);
        const std::vector<int> qs = field_or(en, "q", std::vector<int>{2, 4});
        const std::string obs_kind = field_or<std::string>(en, "observable", "gue");
        for (int i = 0; i < count; ++i) {
            const int D = dims[std::size_t(i) % dims.size()];
            const std::uint64_t s0 = seed + 1000ULL * std::uint64_t(i);
            const Spectrum sp = diagonalize(random_hermitian(D, s0));
            const BasisState psi = random_state(D, s0 + 1);
            HermitianOperator A(D);
            if (obs_kind == "gue") {
                A = random_hermitian(D, s0 + 2);
            } else if (obs_kind == "projector") {
                for (int r = 0; r < D; ++r)
                    for (int c = 0; c < D; ++c) A.at(r, c) = psi.amp[r] * std::conj(psi.amp[c]);
            } else {
                throw ConfigError("ensemble.observable must be gue|projector");
            }
            const QuenchSetup setup = make_setup(sp, psi, A);
            const double purity = diagonal_ensemble(setup).purity;
            const Quantity qty =
                obs_kind == "projector" ? Quantity::fidelity : Quantity::observable;
            const GapTable table = gap_table(setup, qty);
            for (int q : qs) {
                const double mu = exact_moment(table, q);
                const double bound = moment_bound(qty, setup.obs_norm, purity, q);
                const bool ok = (q % 2 == 1) || mu <= bound;
                violated |= !ok;
                rows.push_back(json{{"draw", i},
                                    {"D", D},
                                    {"q", q},
                                    {"quantity", qty == Quantity::fidelity ? "fidelity" : "observable"},
                                    {"mu_exact", mu},
                                    {"bound", bound},
                                    {"satisfied", ok}});
            }
        }
    } else {
        const SetupBundle b = build_setup(cfg);
        const json mc = cfg.contains("moments") ? cfg.at("moments") : json::object();
        const std::vector<int> qs = field_or(mc, "q", std::vector<int>{2, 3, 4});
        const Quantity qty = parse_quantity(field_or<std::string>(mc, "quantity", "observable"));
        const double tolf = field_or(mc, "tolerance_factor", 1e-10);
        const double tol = tolf * b.spectrum.max_abs_eigenvalue();
        const double purity = diagonal_ensemble(b.setup).purity;
        const GapTable table = gap_table(b.setup, qty, tol);
        const bool sampled = field_or(mc, "sampled", false);
        const json sc = cfg.contains("sampling") ? cfg.at("sampling") : json::object();
        for (int q : qs) {
            MomentReport r;
            r.q = q;
            r.mu_exact = exact_moment(table, q);
            if (q % 2 == 0) {
                r.bound = moment_bound(qty, b.setup.obs_norm, purity, q);
                r.bound_applicable = true;
                r.bound_satisfied = r.mu_exact <= r.bound;
                violated |= !r.bound_satisfied;
            }
            if (sampled) {
                const double T = resolve_T(sc, b.spectrum);
                const auto [ms, se] =
                    sampled_moment(b.setup, qty, q, T, field_or<std::uint64_t>(sc, "n_samples", 100000),
                                   field_or<std::uint64_t>(sc, "seed", 1));
                r.mu_sampled = ms;
                r.sampled_stderr = se;
                r.has_sampled = true;
            }
            rows.push_back(report_to_json(r));
        }
    }
    write_json(out / "moments.json", json{{"reports", rows}, {"violated", violated}});
    std::printf("moments: %zu reports, %s\n", rows.size(),
                violated ? "BOUND VIOLATION" : "all bounds satisfied");
    return violated ? 1 : 0;
}

int run_tails(const json& cfg, const fs::path& out) {
    const SetupBundle b = build_setup(cfg);
    const json tc = cfg.contains("tails") ? cfg.at("tails") : json::object();
    const int n_deltas = field_or(tc, "n_deltas", 20);
    const std::uint64_t n_samples = field_or<std::uint64_t>(tc, "n_samples", 40000);
    const std::uint64_t seed = field_or<std::uint64_t>(tc, "seed", 1);
    const double T = resolve_T(tc, b.spectrum);
    bool violated = false;
    json meta;
    for (Quantity q : {Quantity::observable, Quantity::fidelity}) {
        const double top = (q == Quantity::observable) ? 2.0 * b.setup.obs_norm : 1.0;
        std::vector<double> grid;
        for (int k = 1; k <= n_deltas; ++k) grid.push_back(top * double(k) / n_deltas);
        const TailReport rep = empirical_tail(b.setup, q, grid, T, n_samples, seed);
        const char* name = q == Quantity::observable ? "observable" : "fidelity";
        io::write_tail_csv(out / (std::string("tails_") + name + ".csv"), rep);
        int bad = 0;
        for (std::size_t k = 0; k < grid.size(); ++k)
            if (rep.empirical[k] > rep.bound[k]) ++bad;
        violated |= bad > 0;
        meta[name] = json{{"g", rep.g}, {"fbar", rep.fbar}, {"violations", bad}, {"T", T}};
    }
    write_json(out / "tails.json", meta);
    std::printf("tails: %s\n", violated ? "BOUND VIOLATION" : "all grid points under the bound");
    return violated ? 1 : 0;
}

int run_recur(const json& cfg, const fs::path& out, double u_cli, double delta_cli, double dt_cli,
              double tmax_cli) {
    const SetupBundle b = build_setup(cfg);
    const json rc = cfg.contains("recurrence") ? cfg.at("recurrence") : json::object();
    const Quantity qty = parse_quantity(field_or<std::string>(rc, "quantity", "observable"));
    const double u = u_cli > 0 ? u_cli : field<double>(rc, "u", "recurrence");
    const double delta = delta_cli > 0 ? delta_cli : field<double>(rc, "delta", "recurrence");
    const double dt = dt_cli > 0 ? dt_cli : field<double>(rc, "dt", "recurrence");
    const double tmax = tmax_cli > 0 ? tmax_cli : field<double>(rc, "t_max", "recurrence");

    const RecurrenceScan scan = recurrence_scan(b.setup, qty, u, delta, dt, tmax);
    io::write_scan_csv(out / "scan.csv", scan);
    json meta{{"u", scan.u},
              {"delta", scan.delta},
              {"dt", scan.dt},
              {"t_max", scan.t_max},
              {"c_A", scan.c_A},
              {"events", scan.events.size()},
              {"never_leaves", scan.never_leaves}};
    if (scan.empirical_T_defined) meta["empirical_T"] = scan.empirical_T;
    if (scan.lower_bound_defined) meta["lower_bound"] = scan.lower_bound;
    bool violated = false;
    if (scan.empirical_T_defined && scan.lower_bound_defined)
        violated = scan.empirical_T < scan.lower_bound;
    meta["bound_satisfied"] = !violated;
    write_json(out / "recur.json", meta);
    std::printf("recur: %zu events%s\n", scan.events.size(),
                scan.never_leaves ? " (never leaves equilibrium)" : "");
    return violated ? 1 : 0;
}

int run_fermion(const json& cfg, const fs::path& out) {
    const json& fc = section(cfg, "fermion");
    FreeFermionModel model;
    if (fc.contains("M")) {
        const auto rows = field<std::vector<std::vector<double>>>(fc, "M", "fermion");
        const int L = int(rows.size());
        std::vector<double> M;
        for (const auto& r : rows) {
            if (int(r.size()) != L) throw ConfigError("fermion.M must be square");
            M.insert(M.end(), r.begin(), r.end());
        }
        model = build_free_model(M, L);
    } else {
        if (field_or<std::string>(fc, "type", "generic_extended") != "generic_extended")
            throw ConfigError("fermion.type must be generic_extended (or provide M)");
        model = generic_extended_model(field<int>(fc, "L", "fermion"),
                                       field_or<std::uint64_t>(fc, "seed", 1));
    }
    const int L = model.L;

    // unitarity spot check
    rng::Sequence rs(field_or<std::uint64_t>(fc, "seed", 1) ^ 0xF00DULL);
    double worst_unitarity = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        const double t = rs.uniform(0.0, 100.0);
        const int m = int(rs.uniform(0.0, double(L)));
        double sum = 0.0;
        for (int n = 0; n < L; ++n) sum += std::norm(propagator_at(model, m, n, t));
        worst_unitarity = std::max(worst_unitarity, std::abs(sum - 1.0));
    }

    const std::vector<int> qs = field_or(fc, "q", std::vector<int>{2, 4});
    bool violated = false;
    json reports = json::array();

    std::vector<std::pair<int, int>> pairs;
    if (fc.contains("pairs"))
        for (const auto& p : fc.at("pairs")) pairs.emplace_back(p.at(0).get<int>(), p.at(1).get<int>());
    else
        pairs = {{0, std::min(1, L - 1)}};

    for (const auto& [m, n] : pairs) {
        for (int q : qs) {
            const MomentReport r = free_moment_exact_propagator(model, m, n, q);
            violated |= (r.bound_applicable && !r.bound_satisfied);
            json j = report_to_json(r);
            j["target"] = "propagator_sq";
            j["m"] = m;
            j["n"] = n;
            reports.push_back(j);
        }
    }

    if (fc.contains("state_sites")) {
        const auto sites = field<std::vector<int>>(fc, "state_sites", "fermion");
        const ModeState st = site_slater_state(model, sites);
        for (const auto& [m, n] : pairs) {
            for (int q : qs) {
                const MomentReport r = free_moment_exact_correlator(model, st, m, n, q);
                violated |= (r.bound_applicable && !r.bound_satisfied);
                json j = report_to_json(r);
                j["target"] = "correlator";
                j["m"] = m;
                j["n"] = n;
                j["filling"] = st.filling;
                reports.push_back(j);
            }
        }
        if (fc.contains("timeseries")) {
            const json& ts = fc.at("timeseries");
            const double t_max = field<double>(ts, "t_max", "fermion.timeseries");
            const double dt = field<double>(ts, "dt", "fermion.timeseries");
            std::vector<io::TimePoint> cpts, apts;
            const auto [m, n] = pairs.front();
            for (double t = 0.0; t <= t_max; t += dt) {
                cpts.push_back({t, correlator_at(model, st, m, n, t)});
                apts.push_back({t, propagator_at(model, m, n, t)});
            }
            io::write_timeseries_csv(out / "correlator_t.csv", cpts);
            io::write_timeseries_csv(out / "propagator_t.csv", apts);
        }
    }

    json meta{{"L", L},
              {"genericity_passed", model.genericity.passed},
              {"extensivity_constant", model.extensivity.constant},
              {"extensivity_passed", model.extensivity.passed},
              {"unitarity_max_deviation", worst_unitarity},
              {"reports", reports},
              {"violated", violated}};
    write_json(out / "fermion.json", meta);
    std::printf("fermion: L=%d unitarity_dev=%.2e %s\n", L, worst_unitarity,
                violated ? "BOUND VIOLATION" : "bounds satisfied");
    return violated ? 1 : 0;
}

int run_fig1(const json& cfg, const fs::path& out) {
    const SetupBundle b = build_setup(cfg);
    const json sc = cfg.contains("sampling") ? cfg.at("sampling") : json::object();
    std::vector<double> t_list = field_or(sc, "T_list", std::vector<double>{1.0, 10.0, 100.0, 0.0});
    const int bins = field_or(sc, "bins", 1000);
    const std::uint64_t n_samples = field_or<std::uint64_t>(sc, "n_samples", 100000);
    const std::uint64_t seed = field_or<std::uint64_t>(sc, "seed", 1);

    const GapTable table = gap_table(b.setup, Quantity::observable);
    const double mu2 = exact_moment(table, 2);

    std::vector<io::PlotSeries> series;
    const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"};
    json hists = json::array();
    for (std::size_t i = 0; i < t_list.size(); ++i) {
        const double T = t_list[i] > 0 ? t_list[i]
                                       : default_horizon(b.spectrum, default_resonance_tol(b.spectrum));
        const SampledHistogram h =
            sample_histogram(b.setup, Quantity::observable, T, n_samples, bins, seed + i);
        char name[64];
        std::snprintf(name, sizeof(name), "histogram_T%zu.csv", i);
        io::write_histogram_csv(out / name, h);
        io::PlotSeries s;
        s.color = colors[i % 6];
        char lbl[64];
        std::snprintf(lbl, sizeof(lbl), "T=%.3g", T);
        s.label = lbl;
        for (std::size_t k = 0; k < h.density.size(); ++k)
            s.points.emplace_back(0.5 * (h.edges[k] + h.edges[k + 1]), h.density[k]);
        series.push_back(std::move(s));
        hists.push_back(json{{"T", T},
                             {"file", name},
                             {"sample_mean", h.sample_mean},
                             {"sample_variance", h.sample_variance}});
    }
    io::PlotOptions po;
    po.title = "Sampled distribution of <A(t)> for increasing horizons";
    po.xlabel = "x";
    po.ylabel = "density";
    io::write_svg_plot(out / "fig1.svg", series, po);
    write_json(out / "fig1.json", json{{"mu2_exact", mu2},
                                       {"fbar", table.fbar.real()},
                                       {"n_samples", n_samples},
                                       {"seed", seed},
                                       {"bins", bins},
                                       {"histograms", hists}});
    std::printf("fig1: %zu histograms, exact mu2=%.6g\n", t_list.size(), mu2);
    return 0;
}

int run_fig2(const json& cfg, const fs::path& out) {
    const json& fc = section(cfg, "fig2");
    const std::vector<int> Ls = field<std::vector<int>>(fc, "L_list", "fig2");
    const std::vector<std::string> state_names = field_or(
        fc, "states",
        std::vector<std::string>{"neel", "neel_symmetric", "domainwall_translated"});
    const json mj = cfg.contains("model") ? cfg.at("model") : json::object();
    const double J1 = field_or(mj, "J1", -1.0), g1 = field_or(mj, "g1", 1.0);
    const double J2 = field_or(mj, "J2", -0.2), g2 = field_or(mj, "g2", 0.5);

    fs::create_directories(out);
    std::ofstream csv(out / "fig2.csv");
    csv << "L,state,purity\n";

    std::map<std::string, std::vector<std::pair<double, double>>> curves;
    for (int L : Ls) {
        const bool even = (L % 2 == 0);
        if (!even) std::printf("fig2: odd L=%d skipped for Neel kinds\n", L);
        const int n_up = L / 2;
        const Spectrum sp = diagonalize(build_spin_chain({L, J1, g1, J2, g2, true, n_up}));
        for (const std::string& name : state_names) {
            const StateKind kind = parse_state_kind(name);
            if (!even && kind != StateKind::domainwall_translated) continue;
            const BasisState psi = build_state(kind, L, n_up);
            const double purity = diagonal_ensemble(sp, psi).purity;
            csv << L << ',' << name << ',' << io::fmt(purity) << '\n';
            curves[name].emplace_back(double(L), purity);
        }
    }
    csv.close();

    json fits = json::object();
    std::vector<io::PlotSeries> series;
    const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c"};
    int ci = 0;
    for (const std::string& name : state_names) {
        const auto& pts = curves[name];
        if (pts.size() >= 2) {
            // least squares on (L, log purity)
            double sx = 0, sy = 0, sxx = 0, sxy = 0;
            const double n = double(pts.size());
            for (const auto& [x, y] : pts) {
                const double ly = std::log(y);
                sx += x;
                sy += ly;
                sxx += x * x;
                sxy += x * ly;
            }
            const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
            const double icept = (sy - slope * sx) / n;
            double ssr = 0, sst = 0;
            for (const auto& [x, y] : pts) {
                const double ly = std::log(y);
                ssr += (ly - (slope * x + icept)) * (ly - (slope * x + icept));
                sst += (ly - sy / n) * (ly - sy / n);
            }
            fits[name] = json{{"slope", slope}, {"r2", 1.0 - ssr / sst}};
        }
        io::PlotSeries s;
        s.label = name;
        s.color = colors[ci++ % 3];
        s.points = pts;
        series.push_back(std::move(s));
    }
    io::PlotOptions po;
    po.title = "Diagonal-ensemble purity vs system size";
    po.xlabel = "L";
    po.ylabel = "tr w^2";
    po.logy = true;
    io::write_svg_plot(out / "fig2.svg", series, po);
    write_json(out / "fig2.json", json{{"fits", fits}});
    std::printf("fig2: wrote %zu states x %zu sizes\n", state_names.size(), Ls.size());
    return 0;
}

const char* kSchema = R"(Config schema (single JSON document). Sections used per subcommand.

"model":       {"L":8,"n_up":4,"J1":-1,"g1":1,"J2":-0.2,"g2":0.5,"boundary":"periodic|open"}
"state":       {"kind":"neel|neel_symmetric|domainwall_translated"}
"observable":  {"kind":"sigma_z","site":1}
"sampling":    {"T":0 (0=auto 1e4*2pi/g_min),"n_samples":100000,"seed":1,
                "bins":1000,"T_list":[1,10,100,0]}
"moments":     {"q":[2,3,4],"quantity":"observable|fidelity",
                "tolerance_factor":1e-10,"sampled":false}
"ensemble":    {"count":30,"dims":[4,8,16,32],"seed":7,
                "observable":"gue|projector","q":[2,4]}        (moments subcommand)
               {"count":1000,"D":16,"seed":1,"q_max":3}        (genericity subcommand)
"tails":       {"n_deltas":20,"n_samples":40000,"seed":1,"T":0}
"recurrence":  {"quantity":"observable|fidelity","u":0.1,"delta":0.05,
                "dt":0.05,"t_max":1000}
"fermion":     {"type":"generic_extended","L":64,"seed":7} or {"M":[[...],...]},
                plus "pairs":[[0,1],...], "state_sites":[0,2,...], "q":[2,4],
                "timeseries":{"t_max":50,"dt":0.1}
"fig2":        {"L_list":[6,8,10,12],"states":[...]}
"timeseries":  {"t_max":50,"dt":0.1}                           (quench subcommand)
"dump_eigenvectors": false                                     (model subcommand)

Subcommands: model quench moments genericity tails recur fermion fig1 fig2.
Flags: --config PATH --out DIR --threads N --seed S; recur also takes
--u --delta --dt --tmax. Exit codes: 0 ok, 1 bound violation, 2 config error.
)";

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"equilibration-concentration laboratory"};
    app.require_subcommand(0, 1);

    std::string config_path, out_dir = "out";
    int threads = 0;
    std::int64_t seed_override = -1;
    bool print_schema = false;
    double u_cli = 0, delta_cli = 0, dt_cli = 0, tmax_cli = 0;

    app.add_option("--config", config_path, "JSON config file");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--threads", threads, "OpenMP worker count");
    app.add_option("--seed", seed_override, "override sampling seeds");
    app.add_flag("--print-schema", print_schema, "print the config schema and exit");

    CLI::App* recur_cmd = nullptr;
    for (const char* name : {"model", "quench", "moments", "genericity", "tails", "recur",
                             "fermion", "fig1", "fig2"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->fallthrough();
        if (std::string(name) == "recur") {
            recur_cmd = sub;
            sub->add_option("--u", u_cli, "closeness parameter");
            sub->add_option("--delta", delta_cli, "minimum recurrence duration");
            sub->add_option("--dt", dt_cli, "scan step");
            sub->add_option("--tmax", tmax_cli, "scan horizon");
        }
    }
    (void)recur_cmd;

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (print_schema) {
        std::fputs(kSchema, stdout);
        return 0;
    }
    if (app.get_subcommands().empty()) {
        std::fputs(app.help().c_str(), stdout);
        return 2;
    }
    if (threads > 0) omp_set_num_threads(threads);

    try {
        if (config_path.empty()) throw ConfigError("--config is required");
        json cfg = load_config(config_path);
        if (seed_override >= 0) {
            for (const char* sec : {"sampling", "tails", "ensemble", "fermion"})
                if (cfg.contains(sec)) cfg[sec]["seed"] = std::uint64_t(seed_override);
        }
        const fs::path out(out_dir);
        const std::string cmd = app.get_subcommands().front()->get_name();
        if (cmd == "model") return run_model(cfg, out);
        if (cmd == "quench") return run_quench(cfg, out);
        if (cmd == "moments") return run_moments(cfg, out);
        if (cmd == "genericity") return run_genericity(cfg, out);
        if (cmd == "tails") return run_tails(cfg, out);
        if (cmd == "recur") return run_recur(cfg, out, u_cli, delta_cli, dt_cli, tmax_cli);
        if (cmd == "fermion") return run_fermion(cfg, out);
        if (cmd == "fig1") return run_fig1(cfg, out);
        if (cmd == "fig2") return run_fig2(cfg, out);
        return 2;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
