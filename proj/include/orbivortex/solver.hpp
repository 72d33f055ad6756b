#pragma once

#include "orbivortex/fields.hpp"
#include "orbivortex/surface.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace orbivortex::solver {

using fields::ActionData;

/** One prescribed zero: chart coordinates and a positive multiplicity. */
struct DivisorInput {
    double c1 = 0, c2 = 0;
    int mult = 1;
};

/** Effective divisor snapped to grid nodes. On footballs every input point
 * is expanded to its full deck-rotation orbit (each member with the input
 * multiplicity), so the quotient divisor is well defined; coincident nodes
 * are merged by adding multiplicities. `degree` is the total zero count
 * N = sum of multiplicities over the listed nodes. */
struct Divisor {
    struct Point {
        int node = 0;
        int mult = 0;
    };
    std::vector<Point> points;
    long long degree = 0;
    double max_snap_distance = 0;
};

Divisor make_divisor(const Surface& S, const std::vector<DivisorInput>& pts);

/** Reduction weight: w0 = 4*pi * sum_j n_j G_{p_j} (unit Green mass at every
 * listed node, mean-zero), W = exp(w0). W vanishes to grid accuracy at the
 * divisor nodes with local order 2 n_j in distance. */
struct Weight {
    ScalarField w0;
    ScalarField W;
};

Weight build_weight(const Surface& S, const Divisor& D);

/** Bradlow-type solvability test: margin = a*tau*vol - 4*pi*eps^2*N must be
 * strictly positive. Exact or near-exact equality (relative 1e-12) reports
 * the boundary case, which is still infeasible. */
struct Feasibility {
    bool feasible = false;
    bool boundary = false;
    double threshold = 0; // critical tau = 4*pi*eps^2*N / (a*vol)
    double margin = 0;    // a*tau*vol - 4*pi*eps^2*N
};

Feasibility feasibility(const ActionData& act, long long N, double vol, double eps = 1.0);

struct SolveOptions {
    double tol = 1e-8;         // L2 norm of the scalar PDE residual
    int max_newton = 50;
    double cg_tol_factor = 1e-2; // inexact-Newton forcing factor
    int max_cg = 5000;
};

enum class SolveStatus { Infeasible, Converged, MaxIterations, Diverged };

std::string status_name(SolveStatus s);

/** Converged data of the scalar reduction
 *     Delta u = eps^-2 (W e^{u+c} - a tau) + 4 pi N / Vol,
 * with c chosen every iteration so that int W e^{u+c} = a tau Vol - 4 pi
 * eps^2 N holds exactly. Derived fields: h = w0 + u + c (the log of the
 * squared section modulus in the vacuum normalization a*tau), fsq = e^h/a^2
 * (so the vacuum value is tau/a), phi = eps^-2 (a tau - e^h)/2 (curvature
 * density; integrates to 2 pi N by construction). */
struct VortexSolution {
    ScalarField u, w0, h, fsq, phi;
    double c = 0;
    double eps = 1;
    Divisor divisor;
    int newton_iters = 0;
    std::vector<double> residual_history; // ||G||_L2 incl. the initial guess
    double pde_residual = 0;              // final ||G||_L2
    double constraint_defect = 0;         // relative, checked by quadrature
    double equivariance_defect = 0;       // max pre-projection drift of u
};

/** Gauge-invariant energies of the reconstructed pair. At an exact solution
 * the Bogomolny term vanishes identically (the reconstruction imposes both
 * first-order equations), so `bogomolny` here is:  total - r_term, an
 * algebraic zero; convergence evidence lives in the residual report, not in
 * this number. */
struct Energies {
    double total = 0;
    double bogomolny = 0;
    double r_term = 0;
};

struct SolveReport {
    SolveStatus status = SolveStatus::Infeasible;
    bool boundary = false;
    int iterations = 0;
    double pde_residual = 0;
    double constraint_defect = 0;
    double max_fsq_ratio = 0; // max over nodes of a*fsq/tau (maximum principle)
    Energies energies;
    Feasibility feas;
};

/** Projected-Newton solve of the scalar reduction. Infeasible parameters
 * short-circuit (no iteration); the empty divisor returns the exact vacuum.
 * Football solves are restricted to the declared invariant subspace by
 * projection after every update; the largest pre-projection drift is
 * recorded. */
std::pair<VortexSolution, SolveReport> solve_taubes(const Surface& S, const Divisor& D,
                                                    const ActionData& act,
                                                    const SolveOptions& opts = {},
                                                    double eps = 1.0);

/** Recompute h, fsq, phi from (w0, u, c, eps); used after any manual edit of
 * u (perturbation studies) and internally after every accepted Newton step. */
void refresh_derived(const Surface& S, VortexSolution& sol, const ActionData& act);

struct Observables {
    ScalarField fsq;
    TwoFormDensity curvature_density;
    double degree = 0;
};

/** Degree quantization gate: throws std::logic_error when the quadrature
 * degree differs from the divisor degree by more than 1e-4 (a sign or
 * convention fault, never a tolerance issue). */
Observables reconstruct_observables(const Surface& S, const VortexSolution& sol,
                                    const ActionData& act);

struct ResidualReport {
    double pde_l2 = 0;        // strong residual of the scalar reduction
    double weak_max = 0;      // worst off-divisor weak residual of Delta h
    double algebraic_max = 0; // sup |phi - eps^-2 (a tau - a^2 fsq)/2|
    double constraint_rel = 0;
    double degree_error = 0;
};

/** Independent verification of a (possibly perturbed) solution: the strong
 * scalar residual, the first-order system in gauge-invariant weak form
 * (tested against `n_tests` random bumps supported away from the divisor),
 * the curvature/modulus algebraic identity, the integral constraint, and
 * degree quantization. */
ResidualReport residual_check(const Surface& S, const VortexSolution& sol,
                              const ActionData& act, int n_tests = 20,
                              std::uint64_t seed = 1);

struct AdiabaticRow {
    double eps = 1;
    SolveStatus status = SolveStatus::Infeasible;
    double sup_dev = 0; // off-divisor sup of |fsq - tau/a|
    double mu_norm = 0; // moment-map L2 defect of the reconstructed pair
    int iterations = 0;
    double pde_residual = 0;
};

/** Solve the family eps_list (positive, strictly decreasing) and tabulate
 * the concentration diagnostics: sup of |fsq - tau/a| over nodes at distance
 * >= exclusion_radius from every divisor node, and the moment-map defect
 * norm. Members are independent solves and run concurrently when threads >
 * 1; the table order and every entry are thread-count independent. Throws
 * if any member is infeasible. */
std::vector<AdiabaticRow> adiabatic_family(const Surface& S, const Divisor& D,
                                           const ActionData& act,
                                           const std::vector<double>& eps_list,
                                           const SolveOptions& opts = {},
                                           double exclusion_radius = 0.5,
                                           int threads = 1);

} // namespace orbivortex::solver
