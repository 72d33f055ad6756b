#include "orbivortex/solver.hpp"

#include "orbivortex/sampling.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace orbivortex::solver {

namespace {

constexpr double kPi = std::numbers::pi;

void check_action(const ActionData& act) {
    if (act.a < 1) throw std::invalid_argument("solver: weight a must be a positive integer");
    if (!(act.tau > 0)) throw std::invalid_argument("solver: tau must be positive");
}

} // namespace

std::string status_name(SolveStatus s) {
    switch (s) {
    case SolveStatus::Infeasible: return "Infeasible";
    case SolveStatus::Converged: return "Converged";
    case SolveStatus::MaxIterations: return "MaxIterations";
    case SolveStatus::Diverged: return "Diverged";
    }
    return "Unknown";
}

Divisor make_divisor(const Surface& S, const std::vector<DivisorInput>& pts) {
    Divisor D;
    std::vector<int> mult(S.size(), 0);
    for (const auto& p : pts) {
        if (p.mult < 1)
            throw std::invalid_argument("make_divisor: multiplicities must be >= 1");
        double snap = 0;
        int node = S.nearest_node(p.c1, p.c2, &snap);
        D.max_snap_distance = std::max(D.max_snap_distance, snap);
        for (int q : S.orbit_nodes(node)) mult[q] += p.mult;
    }
    for (int q = 0; q < S.size(); ++q)
        if (mult[q] > 0) {
            D.points.push_back({q, mult[q]});
            D.degree += mult[q];
        }
    return D;
}

Weight build_weight(const Surface& S, const Divisor& D) {
    if (D.degree < 1) throw std::invalid_argument("build_weight: divisor degree must be >= 1");
    ScalarField w0 = S.zeros();
    std::vector<char> done(S.size(), 0);
    for (const auto& p : D.points) {
        if (p.node < 0 || p.node >= S.size())
            throw std::invalid_argument("build_weight: divisor node off the surface");
        if (done[p.node]) continue;
        // one Green solve per orbit: green() already spreads mass 1/m over
        // the orbit members, so m * green(rep) puts unit mass on each
        for (int q : S.orbit_nodes(p.node)) done[q] = 1;
        ScalarField g = S.green(p.node);
        double amp = 4.0 * kPi * p.mult * S.cone_order();
        for (int i = 0; i < S.size(); ++i) w0[i] += amp * g[i];
    }
    Weight w;
    w.W.resize(S.size());
    for (int i = 0; i < S.size(); ++i) w.W[i] = std::exp(w0[i]);
    w.w0 = std::move(w0);
    return w;
}

Feasibility feasibility(const ActionData& act, long long N, double vol, double eps) {
    check_action(act);
    if (N < 0) throw std::invalid_argument("feasibility: N must be >= 0");
    if (!(vol > 0)) throw std::invalid_argument("feasibility: volume must be positive");
    if (!(eps > 0)) throw std::invalid_argument("feasibility: eps must be positive");
    Feasibility f;
    double need = 4.0 * kPi * eps * eps * double(N);
    f.threshold = need / (act.a * vol);
    f.margin = act.a * act.tau * vol - need;
    f.boundary = std::fabs(f.margin) <= 1e-12 * std::max(act.a * act.tau * vol, need);
    f.feasible = f.margin > 0 && !f.boundary;
    return f;
}

void refresh_derived(const Surface& S, VortexSolution& sol, const ActionData& act) {
    check_action(act);
    int n = S.size();
    if (static_cast<int>(sol.u.size()) != n || static_cast<int>(sol.w0.size()) != n)
        throw std::invalid_argument("refresh_derived: field size mismatch");
    double inv_e2 = 1.0 / (sol.eps * sol.eps);
    double a2 = double(act.a) * act.a;
    sol.h.resize(n);
    sol.fsq.resize(n);
    sol.phi.resize(n);
    for (int i = 0; i < n; ++i) {
        sol.h[i] = sol.w0[i] + sol.u[i] + sol.c;
        double eh = std::exp(sol.h[i]);
        sol.fsq[i] = eh / a2;
        sol.phi[i] = 0.5 * inv_e2 * (act.a * act.tau - eh);
    }
}

namespace {

struct Work {
    const Surface& S;
    const ActionData& act;
    const Weight& wt;
    double eps;
    long long N;
    double M; // target of the integral constraint: a tau Vol - 4 pi eps^2 N

    // pins c so that int W e^{u+c} = M exactly, returns c
    double pin_constant(const ScalarField& u) const {
        ScalarField we(S.size());
        for (int i = 0; i < S.size(); ++i) we[i] = wt.W[i] * std::exp(u[i]);
        return std::log(M / S.integrate(we));
    }

    // v = eps^-2 W e^{u+c}; also the PDE residual G(u)
    void assemble(const ScalarField& u, double c, ScalarField& v, ScalarField& G) const {
        double inv_e2 = 1.0 / (eps * eps);
        v.resize(S.size());
        for (int i = 0; i < S.size(); ++i) v[i] = inv_e2 * wt.W[i] * std::exp(u[i] + c);
        G = S.laplacian(u);
        double back = inv_e2 * act.a * act.tau - 4.0 * kPi * double(N) / S.vol();
        for (int i = 0; i < S.size(); ++i) G[i] -= v[i] - back;
    }

    double residual_norm(const ScalarField& u, double c) const {
        ScalarField v, G;
        assemble(u, c, v, G);
        return S.norm_l2(G);
    }

    // A delta = -J delta = -Delta delta + v delta - v <v, delta>/<v, 1>
    ScalarField apply(const ScalarField& v, double v_total, const ScalarField& d) const {
        ScalarField out = S.laplacian(d);
        ScalarField vd(S.size());
        for (int i = 0; i < S.size(); ++i) vd[i] = v[i] * d[i];
        double proj = S.integrate(vd) / v_total;
        for (int i = 0; i < S.size(); ++i) out[i] = -out[i] + vd[i] - v[i] * proj;
        return out;
    }
};

/** Preconditioned CG for the (symmetric positive definite on mean-zero
 * fields) linearization; preconditioner is the exact constant-coefficient
 * inverse (sigma - Delta)^-1 with sigma = mean(v). Aims for relative
 * tolerance rtol but, because the requested tolerance can sit below the
 * rounding floor of the spectral operator applications, tracks the best
 * iterate seen and returns it once the residual stops improving. */
ScalarField solve_newton_step(const Work& wk, const ScalarField& v, const ScalarField& b,
                              double rtol, int max_cg) {
    const Surface& S = wk.S;
    double v_total = S.integrate(v);
    double sigma = v_total / S.vol();

    auto precond = [&](const ScalarField& r) {
        ScalarField z = S.helmholtz_inverse(r, sigma);
        for (double& x : z) x = -x; // (sigma - Delta)^-1, positive definite
        return z;
    };

    auto inner = [&](const ScalarField& f, const ScalarField& g) {
        ScalarField t(S.size());
        for (int i = 0; i < S.size(); ++i) t[i] = f[i] * g[i];
        return S.integrate(t);
    };

    ScalarField x = S.zeros();
    ScalarField r = b;
    double b_norm = S.norm_l2(b);
    if (b_norm == 0) return x;
    ScalarField z = precond(r);
    ScalarField p = z;
    double rz = inner(r, z);
    ScalarField best = x;
    double best_norm = b_norm;
    int since_best = 0;
    for (int it = 0; it < max_cg; ++it) {
        ScalarField Ap = wk.apply(v, v_total, p);
        double pAp = inner(p, Ap);
        if (!(pAp > 0)) break; // numerical loss of definiteness: accept best
        double alpha = rz / pAp;
        for (int i = 0; i < S.size(); ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * Ap[i];
        }
        double r_norm = S.norm_l2(r);
        if (r_norm < best_norm) {
            best_norm = r_norm;
            best = x;
            since_best = 0;
        } else if (++since_best >= 40) {
            break; // rounding floor reached: no progress in 40 iterations
        }
        if (r_norm <= rtol * b_norm) break;
        z = precond(r);
        double rz_new = inner(r, z);
        double beta = rz_new / rz;
        rz = rz_new;
        for (int i = 0; i < S.size(); ++i) p[i] = z[i] + beta * p[i];
    }
    double xm = S.mean(best);
    for (double& e : best) e -= xm; // keep u's mean pinned to the start value
    return best;
}

Energies solution_energies(const Surface& S, const VortexSolution& sol,
                           const ActionData& act) {
    // Gauge-invariant evaluation on the reconstructed pair, using the
    // saturation of both first-order equations:
    //   |d_A u|^2 = e^h |grad h|^2 / (2 a^2),  curvature = phi/a,
    //   moment map = -eps^2 phi / a.
    ScalarField d1, d2;
    S.grad(sol.h, d1, d2);
    ScalarField dens(S.size()), fsq2(S.size());
    for (int i = 0; i < S.size(); ++i) {
        double eh = std::exp(sol.h[i]);
        dens[i] = eh * (d1[i] * d1[i] + d2[i] * d2[i]);
        fsq2[i] = sol.phi[i] * sol.phi[i];
    }
    double a2 = double(act.a) * act.a;
    Energies e;
    e.total = S.integrate(dens) / (4 * a2) + sol.eps * sol.eps / a2 * S.integrate(fsq2);
    e.r_term = e.total;
    e.bogomolny = e.total - e.r_term;
    return e;
}

} // namespace

std::pair<VortexSolution, SolveReport> solve_taubes(const Surface& S, const Divisor& D,
                                                    const ActionData& act,
                                                    const SolveOptions& opts, double eps) {
    check_action(act);
    if (!(opts.tol > 0) || opts.max_newton < 1 || !(opts.cg_tol_factor > 0))
        throw std::invalid_argument("solve_taubes: bad options");

    VortexSolution sol;
    SolveReport rep;
    sol.eps = eps;
    sol.divisor = D;
    rep.feas = feasibility(act, D.degree, S.vol(), eps);
    rep.boundary = rep.feas.boundary;
    if (!rep.feas.feasible) {
        rep.status = SolveStatus::Infeasible;
        return {std::move(sol), rep};
    }

    Weight wt = D.degree > 0 ? build_weight(S, D)
                             : Weight{S.zeros(), ScalarField(S.size(), 1.0)};
    sol.w0 = wt.w0;
    const double M = act.a * act.tau * S.vol() - 4.0 * kPi * eps * eps * double(D.degree);
    Work wk{S, act, wt, eps, D.degree, M};
    const bool invariant = S.kind() == SurfaceKind::football;

    // constant start matching the integral constraint exactly
    sol.u.assign(S.size(), std::log(M / S.integrate(wt.W)));
    sol.c = 0.0;

    ScalarField v, G;
    wk.assemble(sol.u, sol.c, v, G);
    double res = S.norm_l2(G);
    sol.residual_history.push_back(res);

    int growths = 0;
    while (res > opts.tol && sol.newton_iters < opts.max_newton) {
        double rtol = std::clamp(opts.cg_tol_factor * std::min(1.0, res), 1e-12,
                                 opts.cg_tol_factor);
        ScalarField step = solve_newton_step(wk, v, G, rtol, opts.max_cg);

        double lambda = 1.0;
        ScalarField u_try(S.size());
        double c_try = 0, res_try = 0;
        bool improved = false;
        for (int bt = 0; bt < 25; ++bt) {
            for (int i = 0; i < S.size(); ++i) u_try[i] = sol.u[i] + lambda * step[i];
            if (invariant) {
                double defect = S.equivariance_defect(u_try);
                sol.equivariance_defect = std::max(sol.equivariance_defect, defect);
                u_try = S.project_invariant(u_try);
            }
            c_try = wk.pin_constant(u_try);
            res_try = wk.residual_norm(u_try, c_try);
            if (res_try < res) {
                improved = true;
                break;
            }
            lambda *= 0.5;
        }
        if (improved) {
            sol.u = u_try;
            sol.c = c_try;
            wk.assemble(sol.u, sol.c, v, G);
            res = res_try;
            growths = 0;
        } else {
            ++growths; // keep the current iterate; retry from a fresh linearization
        }
        sol.residual_history.push_back(res);
        ++sol.newton_iters;
        if (growths >= 3) {
            rep.status = SolveStatus::Diverged;
            break;
        }
    }

    refresh_derived(S, sol, act);
    sol.pde_residual = res;
    {
        ScalarField we(S.size());
        for (int i = 0; i < S.size(); ++i) we[i] = wt.W[i] * std::exp(sol.u[i] + sol.c);
        sol.constraint_defect = std::fabs(S.integrate(we) - M) / M;
    }

    rep.iterations = sol.newton_iters;
    rep.pde_residual = res;
    rep.constraint_defect = sol.constraint_defect;
    for (int i = 0; i < S.size(); ++i)
        rep.max_fsq_ratio = std::max(rep.max_fsq_ratio, act.a * sol.fsq[i] / act.tau);
    if (rep.status != SolveStatus::Diverged)
        rep.status = res <= opts.tol ? SolveStatus::Converged : SolveStatus::MaxIterations;
    if (rep.status == SolveStatus::Converged) rep.energies = solution_energies(S, sol, act);
    return {std::move(sol), rep};
}

Observables reconstruct_observables(const Surface& S, const VortexSolution& sol,
                                    const ActionData& act) {
    check_action(act);
    Observables obs;
    obs.fsq = sol.fsq;
    obs.curvature_density.coeff = sol.phi;
    obs.degree = S.integrate(sol.phi) / (2 * kPi);
    if (std::fabs(obs.degree - double(sol.divisor.degree)) > 1e-4)
        throw std::logic_error("reconstruct_observables: degree quantization failed "
                               "(sign/convention fault)");
    return obs;
}

ResidualReport residual_check(const Surface& S, const VortexSolution& sol,
                              const ActionData& act, int n_tests, std::uint64_t seed) {
    check_action(act);
    ResidualReport r;
    double inv_e2 = 1.0 / (sol.eps * sol.eps);
    double a2 = double(act.a) * act.a;

    Weight wt = sol.divisor.degree > 0 ? build_weight(S, sol.divisor)
                                       : Weight{S.zeros(), ScalarField(S.size(), 1.0)};
    ScalarField G = S.laplacian(sol.u);
    double back = inv_e2 * act.a * act.tau - 4.0 * kPi * double(sol.divisor.degree) / S.vol();
    ScalarField we(S.size());
    for (int i = 0; i < S.size(); ++i) {
        we[i] = wt.W[i] * std::exp(sol.u[i] + sol.c);
        G[i] -= inv_e2 * we[i] - back;
    }
    r.pde_l2 = S.norm_l2(G);

    double M = act.a * act.tau * S.vol() - 4.0 * kPi * sol.eps * sol.eps * double(sol.divisor.degree);
    r.constraint_rel = std::fabs(S.integrate(we) - M) / M;

    for (int i = 0; i < S.size(); ++i) {
        double alg = sol.phi[i] - 0.5 * inv_e2 * (act.a * act.tau - a2 * sol.fsq[i]);
        r.algebraic_max = std::max(r.algebraic_max, std::fabs(alg));
    }

    // weak form of Delta h = eps^-2 (e^h - a tau) + 4 pi sum n_j delta_j
    // against bumps that vanish near (and exactly at) the divisor nodes
    ScalarField strong = S.laplacian(sol.h);
    for (int i = 0; i < S.size(); ++i)
        strong[i] -= inv_e2 * (std::exp(sol.h[i]) - act.a * act.tau);
    double r0 = std::max(3 * S.spacing(), 0.15);
    double r1 = r0 + std::max(4 * S.spacing(), 0.2);
    sampling::FieldSpec bump{1.0, 4, 0.0, false};
    for (int t = 0; t < n_tests; ++t) {
        ScalarField chi = sampling::random_scalar(S, seed + 1000 * t, bump);
        for (const auto& p : sol.divisor.points) {
            double pc1 = S.coord1(p.node), pc2 = S.coord2(p.node);
            for (int i = 0; i < S.size(); ++i) {
                if (chi[i] == 0) continue;
                double d = S.distance(i, pc1, pc2);
                if (d <= r0)
                    chi[i] = 0;
                else if (d < r1)
                    chi[i] *= 0.5 * (1 - std::cos(kPi * (d - r0) / (r1 - r0)));
            }
        }
        double nc = S.norm_l2(chi);
        if (nc == 0) continue;
        ScalarField prod(S.size());
        for (int i = 0; i < S.size(); ++i) prod[i] = strong[i] * chi[i];
        r.weak_max = std::max(r.weak_max, std::fabs(S.integrate(prod)) / nc);
    }

    r.degree_error = std::fabs(S.integrate(sol.phi) / (2 * kPi) - double(sol.divisor.degree));
    return r;
}

std::vector<AdiabaticRow> adiabatic_family(const Surface& S, const Divisor& D,
                                           const ActionData& act,
                                           const std::vector<double>& eps_list,
                                           const SolveOptions& opts,
                                           double exclusion_radius, int threads) {
    check_action(act);
    if (eps_list.empty()) return {};
    for (size_t i = 0; i < eps_list.size(); ++i) {
        if (!(eps_list[i] > 0))
            throw std::invalid_argument("adiabatic_family: eps values must be positive");
        if (i > 0 && !(eps_list[i] < eps_list[i - 1]))
            throw std::invalid_argument("adiabatic_family: eps_list must be strictly decreasing");
        if (!feasibility(act, D.degree, S.vol(), eps_list[i]).feasible)
            throw std::invalid_argument("adiabatic_family: infeasible member at eps = " +
                                        std::to_string(eps_list[i]));
    }

    std::vector<AdiabaticRow> rows(eps_list.size());
    std::atomic<size_t> next{0};
    auto run_member = [&](size_t k) {
        auto [sol, rep] = solve_taubes(S, D, act, opts, eps_list[k]);
        AdiabaticRow row;
        row.eps = eps_list[k];
        row.status = rep.status;
        row.iterations = rep.iterations;
        row.pde_residual = rep.pde_residual;
        double target = act.tau / act.a;
        for (int i = 0; i < S.size(); ++i) {
            bool excluded = false;
            for (const auto& p : sol.divisor.points)
                if (S.distance(i, S.coord1(p.node), S.coord2(p.node)) < exclusion_radius) {
                    excluded = true;
                    break;
                }
            if (!excluded) row.sup_dev = std::max(row.sup_dev, std::fabs(sol.fsq[i] - target));
        }
        fields::GaugeConfig cfg;
        cfg.alpha.c1 = S.zeros();
        cfg.alpha.c2 = S.zeros();
        cfg.u.resize(S.size());
        for (int i = 0; i < S.size(); ++i) cfg.u[i] = std::sqrt(std::max(0.0, sol.fsq[i]));
        cfg.N = D.degree;
        row.mu_norm = fields::pseudoholomorphic_residual(S, cfg, act).mu_norm;
        rows[k] = row;
    };

    int nt = std::max(1, std::min<int>(threads, int(eps_list.size())));
    if (nt == 1) {
        for (size_t k = 0; k < eps_list.size(); ++k) run_member(k);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(nt);
        for (int t = 0; t < nt; ++t)
            pool.emplace_back([&] {
                for (size_t k = next.fetch_add(1); k < rows.size(); k = next.fetch_add(1))
                    run_member(k);
            });
        for (auto& th : pool) th.join();
    }
    return rows;
}

} // namespace orbivortex::solver
