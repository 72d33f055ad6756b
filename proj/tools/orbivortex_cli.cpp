#include "orbivortex/moduli.hpp"
#include "orbivortex/report.hpp"
#include "orbivortex/run_config.hpp"
#include "orbivortex/sampling.hpp"
#include "orbivortex/seifert.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

namespace {

using namespace orbivortex;
using cli::ConfigError;
using cli::RunConfig;
using nlohmann::json;
using solver::SolveStatus;

std::string status_string(SolveStatus s) {
    switch (s) {
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Converged: return "converged";
    case SolveStatus::MaxIterations: return "max_iterations";
    case SolveStatus::Diverged: return "diverged";
    }
    return "unknown";
}

std::string kind_name(const Surface& S) {
    return S.kind() == SurfaceKind::football ? "football" : "torus";
}

std::string provenance(const Surface& S) {
    return kind_name(S) + "," + std::to_string(S.n1()) + "," + std::to_string(S.n2());
}

/** Flags shared by the config-driven subcommands; flag values override the
 * corresponding config keys. */
struct Common {
    CLI::App* sub = nullptr;
    std::string config_path;
    std::string output;
    std::string csv_output;
    int threads = 0;
    std::uint64_t seed = 0;
    double tau = 0, eps = 0, tol = 0;

    void attach(CLI::App* s, bool wants_tau = true) {
        sub = s;
        s->add_option("config", config_path, "JSON run configuration")->required();
        s->add_option("--output", output, "write the JSON report here instead of stdout");
        s->add_option("--csv-output", csv_output, "also dump a CSV table here");
        s->add_option("--threads", threads, "worker thread cap")->check(CLI::PositiveNumber);
        s->add_option("--seed", seed, "override the config seed");
        if (wants_tau) s->add_option("--tau", tau, "override action.tau");
        s->add_option("--eps", eps, "override the length-scale parameter");
        s->add_option("--tol", tol, "override solver.tol");
    }

    bool has_flag(const char* name) const {
        const CLI::Option* o = sub->get_option_no_throw(name);
        return o != nullptr && o->count() > 0;
    }

    RunConfig load() const {
        RunConfig cfg = cli::parse_config_file(config_path);
        if (!output.empty()) cfg.output = output;
        if (!csv_output.empty()) cfg.csv_output = csv_output;
        if (threads > 0) cfg.threads = threads;
        if (has_flag("--seed")) cfg.seed = seed;
        if (has_flag("--tau")) {
            if (!(tau > 0)) throw ConfigError("--tau must be positive");
            cfg.tau = tau;
            cfg.has_tau = true;
        }
        if (has_flag("--eps")) {
            if (!(eps > 0)) throw ConfigError("--eps must be positive");
            cfg.eps = eps;
        }
        if (has_flag("--tol")) {
            if (!(tol > 0)) throw ConfigError("--tol must be positive");
            cfg.solver_opts.tol = tol;
        }
        return cfg;
    }
};

json feasibility_json(const solver::Feasibility& f) {
    return {{"feasible", f.feasible},
            {"threshold", f.threshold},
            {"margin", f.margin},
            {"boundary", f.boundary}};
}

json divisor_json(const Surface& S, const solver::Divisor& D) {
    json pts = json::array();
    for (const auto& p : D.points)
        pts.push_back({{"node", p.node},
                       {"c1", S.coord1(p.node)},
                       {"c2", S.coord2(p.node)},
                       {"mult", p.mult}});
    return {{"degree", D.degree}, {"max_snap_distance", D.max_snap_distance}, {"points", pts}};
}

int finish(const std::string& command, const RunConfig& cfg, int threads, const json& result,
           int exit_code) {
    json rep = cli::make_report(command, cli::config_json(cfg, threads), result);
    cli::emit_report(rep, cfg.output);
    return exit_code;
}

int cmd_solve(const Common& flags) {
    RunConfig cfg = flags.load();
    cfg.require_tau();
    cfg.require_divisor();
    int threads = cli::resolve_threads(0, cfg);
    Surface S = cli::make_surface(cfg);
    solver::Divisor D = cli::make_divisor(S, cfg);
    fields::ActionData act{int(cfg.weight_a), cfg.tau};

    auto [sol, rep] = solver::solve_taubes(S, D, act, cfg.solver_opts, cfg.eps);

    json result{{"status", status_string(rep.status)},
                {"boundary", rep.boundary},
                {"feasibility", feasibility_json(rep.feas)},
                {"iterations", rep.iterations},
                {"pde_residual", rep.pde_residual},
                {"constraint_defect", rep.constraint_defect},
                {"equivariance_defect", sol.equivariance_defect},
                {"max_fsq_ratio", rep.max_fsq_ratio},
                {"divisor", divisor_json(S, D)}};
    if (rep.status == SolveStatus::Converged) {
        solver::Observables obs = solver::reconstruct_observables(S, sol, act);
        solver::ResidualReport rc = solver::residual_check(S, sol, act, 20, cfg.seed);
        result["degree"] = obs.degree;
        result["energies"] = {{"total", rep.energies.total},
                              {"bogomolny", rep.energies.bogomolny},
                              {"r_term", rep.energies.r_term}};
        result["residuals"] = {{"pde_l2", rc.pde_l2},
                               {"weak_max", rc.weak_max},
                               {"algebraic_max", rc.algebraic_max},
                               {"constraint_rel", rc.constraint_rel},
                               {"degree_error", rc.degree_error}};
        if (!cfg.csv_output.empty()) {
            std::vector<std::string> rows;
            rows.reserve(S.size());
            for (int i = 0; i < S.size(); ++i)
                rows.push_back(std::to_string(i / S.n2()) + "," + std::to_string(i % S.n2()) +
                               "," + cli::format_real(S.coord1(i)) + "," +
                               cli::format_real(S.coord2(i)) + "," +
                               cli::format_real(sol.fsq[i]) + "," +
                               cli::format_real(sol.phi[i]));
            cli::write_csv(cfg.csv_output, provenance(S), "i1,i2,c1,c2,fsq,phi", rows);
        }
    }

    int code = 1;
    if (rep.status == SolveStatus::Converged) code = 0;
    if (rep.status == SolveStatus::Infeasible) {
        code = 2;
        std::fprintf(stderr,
                     "infeasible: tau=%g is %s the existence threshold tau*=%g (boundary: %s)\n",
                     cfg.tau, rep.feas.boundary ? "at" : "below", rep.feas.threshold,
                     rep.feas.boundary ? "yes" : "no");
    }
    return finish("solve", cfg, threads, result, code);
}

int cmd_energy_check(const Common& flags) {
    RunConfig cfg = flags.load();
    cfg.require_tau();
    int threads = cli::resolve_threads(0, cfg);
    Surface S = cli::make_surface(cfg);
    fields::ActionData act{int(cfg.weight_a), cfg.tau};

    auto row_json = [](const std::string& kind, long long index, std::uint64_t seed,
                       const fields::EnergyIdentity& ei) {
        double rel = ei.discrepancy == 0
                         ? 0.0
                         : std::fabs(ei.discrepancy) / std::max(1e-300, std::fabs(ei.lhs));
        return json{{"kind", kind},        {"index", index},
                    {"seed", seed},        {"lhs", ei.lhs},
                    {"bogomolny", ei.bogomolny}, {"r_term", ei.R},
                    {"discrepancy", ei.discrepancy}, {"relative", rel}};
    };

    json rows = json::array();
    fields::GaugeConfig trivial;
    trivial.alpha.c1 = S.zeros();
    trivial.alpha.c2 = S.zeros();
    trivial.u = ComplexField(S.size(), 0.0);
    rows.push_back(row_json("trivial", -1, 0, fields::energy_identity(S, trivial, act)));

    const sampling::FieldSpec section_spec{0.8, 0, 3.0, false};
    const sampling::FieldSpec connection_spec{0.6, 0, 3.0, true};
    double max_rel = 0;
    for (int k = 0; k < cfg.samples; ++k) {
        std::uint64_t seed = cfg.seed + std::uint64_t(k);
        fields::GaugeConfig c = sampling::random_config(S, seed, connection_spec, section_spec);
        json row = row_json("random", k, seed, fields::energy_identity(S, c, act));
        max_rel = std::max(max_rel, row["relative"].get<double>());
        rows.push_back(row);
    }
    json result{{"rows", rows}, {"max_relative", max_rel}};

    if (!cfg.csv_output.empty()) {
        std::vector<std::string> lines;
        for (const auto& r : rows)
            lines.push_back(r["kind"].get<std::string>() + "," +
                            std::to_string(r["index"].get<long long>()) + "," +
                            cli::format_real(r["lhs"].get<double>()) + "," +
                            cli::format_real(r["bogomolny"].get<double>()) + "," +
                            cli::format_real(r["r_term"].get<double>()) + "," +
                            cli::format_real(r["discrepancy"].get<double>()) + "," +
                            cli::format_real(r["relative"].get<double>()));
        cli::write_csv(cfg.csv_output, provenance(S),
                       "kind,index,lhs,bogomolny,r_term,discrepancy,relative", lines);
    }
    return finish("energy-check", cfg, threads, result, 0);
}

int cmd_adiabatic(const Common& flags) {
    RunConfig cfg = flags.load();
    cfg.require_tau();
    cfg.require_divisor();
    cfg.require_eps_list();
    int threads = cli::resolve_threads(0, cfg);
    Surface S = cli::make_surface(cfg);
    solver::Divisor D = cli::make_divisor(S, cfg);
    fields::ActionData act{int(cfg.weight_a), cfg.tau};

    for (double e : cfg.eps_list) {
        solver::Feasibility f = solver::feasibility(act, D.degree, S.vol(), e);
        if (!f.feasible) {
            std::fprintf(stderr, "infeasible family member eps=%g (threshold tau*=%g, boundary: %s)\n",
                         e, f.threshold, f.boundary ? "yes" : "no");
            json result{{"status", "infeasible"},
                        {"eps", e},
                        {"feasibility", feasibility_json(f)}};
            return finish("adiabatic", cfg, threads, result, 2);
        }
    }

    auto rows = solver::adiabatic_family(S, D, act, cfg.eps_list, cfg.solver_opts,
                                         cfg.exclusion_radius, threads);
    json jrows = json::array();
    bool all_converged = true, sup_monotone = true, mu_monotone = true;
    for (size_t k = 0; k < rows.size(); ++k) {
        const auto& r = rows[k];
        if (r.status != SolveStatus::Converged) all_converged = false;
        if (k > 0 && !(r.sup_dev < rows[k - 1].sup_dev)) sup_monotone = false;
        if (k > 0 && !(r.mu_norm < rows[k - 1].mu_norm)) mu_monotone = false;
        jrows.push_back({{"eps", r.eps},
                         {"status", status_string(r.status)},
                         {"sup_deviation", r.sup_dev},
                         {"mu_norm", r.mu_norm},
                         {"iterations", r.iterations},
                         {"pde_residual", r.pde_residual}});
    }
    json result{{"rows", jrows},
                {"exclusion_radius", cfg.exclusion_radius},
                {"sup_monotone", sup_monotone},
                {"mu_monotone", mu_monotone}};

    if (!cfg.csv_output.empty()) {
        std::vector<std::string> lines;
        for (const auto& r : rows)
            lines.push_back(cli::format_real(r.eps) + "," + status_string(r.status) + "," +
                            cli::format_real(r.sup_dev) + "," + cli::format_real(r.mu_norm) +
                            "," + std::to_string(r.iterations) + "," +
                            cli::format_real(r.pde_residual));
        cli::write_csv(cfg.csv_output, provenance(S),
                       "eps,status,sup_deviation,mu_norm,iterations,pde_residual", lines);
    }
    return finish("adiabatic", cfg, threads, result, all_converged ? 0 : 1);
}

int cmd_scan(const Common& flags) {
    RunConfig cfg = flags.load();
    cfg.require_tau_grid();
    cfg.require_degree();
    int threads = cli::resolve_threads(0, cfg);
    Surface S = cli::make_surface(cfg);
    fields::ActionData act{int(cfg.weight_a), cfg.tau_grid.front()};

    solver::Divisor D = cfg.has_divisor ? cli::make_divisor(S, cfg)
                                        : moduli::canonical_divisor(S, cfg.degree_n);
    auto rows = moduli::threshold_scan(S, D, act, cfg.tau_grid, cfg.solver_opts, threads);

    json jrows = json::array();
    int flips = 0;
    double bracket_lo = 0, bracket_hi = 0;
    for (size_t k = 0; k < rows.size(); ++k) {
        const auto& r = rows[k];
        if (k > 0 && r.status != rows[k - 1].status) {
            ++flips;
            bracket_lo = rows[k - 1].tau;
            bracket_hi = r.tau;
        }
        jrows.push_back(
            {{"tau", r.tau}, {"status", status_string(r.status)}, {"residual", r.residual}});
    }
    json result{{"rows", jrows}, {"flips", flips}, {"divisor", divisor_json(S, D)}};
    if (flips == 1) result["threshold_bracket"] = {bracket_lo, bracket_hi};

    if (!cfg.csv_output.empty()) {
        std::vector<std::string> lines;
        for (const auto& r : rows)
            lines.push_back(cli::format_real(r.tau) + "," + status_string(r.status) + "," +
                            cli::format_real(r.residual));
        cli::write_csv(cfg.csv_output, provenance(S), "tau,status,residual", lines);
    }
    return finish("scan", cfg, threads, result, 0);
}

int cmd_probe(const Common& flags) {
    RunConfig cfg = flags.load();
    cfg.require_tau();
    if (!cfg.has_degree_n)
        cfg.fail("surface", "this command needs \"n\" (the sampled bundle degree)");
    int threads = cli::resolve_threads(0, cfg);
    Surface S = cli::make_surface(cfg);
    fields::ActionData act{int(cfg.weight_a), cfg.tau};

    moduli::ProbeSummary p = moduli::symmetric_product_probe(
        S, act, cfg.degree_n, cfg.samples, cfg.seed, cfg.solver_opts, threads);

    json result{{"samples", p.samples},
                {"solved", p.solved},
                {"matched", p.matched},
                {"all_infeasible", p.all_infeasible},
                {"success_rate", p.all_infeasible ? json(nullptr) : json(p.success_rate)},
                {"max_position_error_h", p.max_position_error_h},
                {"max_mass_defect", p.max_mass_defect}};
    return finish("probe", cfg, threads, result, 0);
}

struct SeifertFlags {
    CLI::App* sub = nullptr;
    long long b = 0;
    std::vector<long long> beta;
    std::vector<long long> mult;
    long long a = 1;
    std::string d;
    double tau = 0, vol = 0;
    std::string output;
};

int cmd_seifert(const SeifertFlags& f) {
    json result;
    seifert::SeifertData data;
    long long a = f.a;

    if (f.sub->count("--d")) {
        // associated-bundle mode: build the weight-a bundle over a degree-d fibration
        if (!f.sub->count("--a") || !f.sub->count("--m"))
            throw ConfigError("seifert: --d needs --a and --m");
        if (f.sub->count("--b") || f.sub->count("--beta"))
            throw ConfigError("seifert: give either --d (associated bundle) or --b/--beta "
                              "(explicit invariants), not both");
        long long p = 0, q = 1;
        size_t slash = f.d.find('/');
        try {
            p = std::stoll(f.d.substr(0, slash));
            if (slash != std::string::npos) q = std::stoll(f.d.substr(slash + 1));
        } catch (const std::exception&) {
            throw ConfigError("seifert: --d must be an integer or \"p/q\"");
        }
        if (q <= 0) throw ConfigError("seifert: --d denominator must be positive");
        data = seifert::associated_bundle(a, seifert::rational_of(p, q), f.mult);
        seifert::Cokernel ck = seifert::lifting_cokernel(0, a);
        json factors = json::array();
        for (long long c : ck.cyclic_factors) factors.push_back(c);
        result["mode"] = "associated_bundle";
        result["a"] = a;
        result["d"] = seifert::to_string(seifert::rational_of(p, q));
        result["lifting_cokernel"] = {{"cyclic_factors", factors},
                                      {"order", ck.order.str()},
                                      {"trivial", ck.cyclic_factors.empty()},
                                      {"lemma_backed", ck.lemma_backed}};
    } else {
        if (!f.sub->count("--beta") || !f.sub->count("--m"))
            throw ConfigError("seifert: need --beta and --m (or --a/--d/--m)");
        data.b = f.b;
        data.beta = f.beta;
        data.mult = f.mult;
        result["mode"] = "invariant";
    }

    seifert::Rational deg = seifert::orbifold_degree(data);
    json jbeta = json::array(), jmult = json::array();
    for (long long x : data.beta) jbeta.push_back(x);
    for (long long x : data.mult) jmult.push_back(x);
    result["b"] = data.b;
    result["beta"] = jbeta;
    result["m"] = jmult;
    result["degree"] = seifert::to_string(deg);
    result["degree_real"] =
        deg.numerator().convert_to<double>() / deg.denominator().convert_to<double>();

    if (f.sub->count("--tau") && f.sub->count("--vol")) {
        if (!(f.tau > 0) || !(f.vol > 0))
            throw ConfigError("seifert: --tau and --vol must be positive");
        seifert::ModuliStatus ms = seifert::moduli_status(a, deg, f.tau, f.vol);
        result["moduli"] = {{"nonempty", ms.nonempty},
                            {"dimension", ms.dimension},
                            {"threshold", ms.threshold},
                            {"boundary", ms.boundary}};
    }

    json rep = cli::make_report("seifert", json::object(), result);
    cli::emit_report(rep, f.output);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"abelian vortex equations on compact orbifold surfaces"};
    app.set_version_flag("--version", std::string(cli::kToolVersion));
    app.require_subcommand(1);

    Common solve_flags, energy_flags, adiabatic_flags, scan_flags, probe_flags;
    solve_flags.attach(app.add_subcommand(
        "solve", "solve the vortex equations for a prescribed zero divisor"));
    energy_flags.attach(app.add_subcommand(
        "energy-check", "verify the energy split on random configurations"));
    adiabatic_flags.attach(app.add_subcommand(
        "adiabatic", "solve a family with shrinking length scale"));
    scan_flags.attach(app.add_subcommand(
                          "scan", "tabulate solvability across a tau grid"),
                      /*wants_tau=*/false);
    probe_flags.attach(app.add_subcommand(
        "probe", "round-trip random divisors through the solver"));

    SeifertFlags sf;
    sf.sub = app.add_subcommand("seifert", "exact circle-bundle invariant arithmetic");
    sf.sub->add_option("--b", sf.b, "integer part of the invariant");
    sf.sub->add_option("--beta", sf.beta, "cone-point numerators, comma separated")
        ->delimiter(',');
    sf.sub->add_option("--m", sf.mult, "cone orders, comma separated")->delimiter(',');
    sf.sub->add_option("--a", sf.a, "circle-action weight");
    sf.sub->add_option("--d", sf.d, "base fibration degree, integer or p/q");
    sf.sub->add_option("--tau", sf.tau, "moment-map level for the moduli status");
    sf.sub->add_option("--vol", sf.vol, "orbifold volume for the moduli status");
    sf.sub->add_option("--output", sf.output, "write the JSON report here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 64;
    }

    try {
        if (solve_flags.sub->parsed()) return cmd_solve(solve_flags);
        if (energy_flags.sub->parsed()) return cmd_energy_check(energy_flags);
        if (adiabatic_flags.sub->parsed()) return cmd_adiabatic(adiabatic_flags);
        if (scan_flags.sub->parsed()) return cmd_scan(scan_flags);
        if (probe_flags.sub->parsed()) return cmd_probe(probe_flags);
        if (sf.sub->parsed()) return cmd_seifert(sf);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 64;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 64;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 64;
}
