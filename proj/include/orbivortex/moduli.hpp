#pragma once

#include "orbivortex/solver.hpp"

#include <cstdint>
#include <vector>

namespace orbivortex::moduli {

using fields::ActionData;

/** One located zero of the section modulus. Multiplicity comes from the
 * curvature mass of the zero's Voronoi cell (gauge-invariant; no phase
 * winding is ever reconstructed); `mass_defect` is the distance of that
 * cell integral (in units of 2*pi) from the rounded integer, and
 * `position_blur` is a sub-grid localization estimate in grid spacings. */
struct Zero {
    int node = 0;
    double c1 = 0, c2 = 0;
    int mult = 0;
    double mass_defect = 0;
    double position_blur = 0;
};

struct ZeroSet {
    std::vector<Zero> zeros; // ordered by node index
    long long total_multiplicity = 0;
    bool consistent = true; // total matches the divisor degree
    double max_mass_defect = 0;
};

/** Locate zeros of a converged solution: local minima of fsq under the
 * threshold 1e-3 * tau/a, merged when closer than two grid spacings, with
 * Voronoi-cell curvature integrals fixing multiplicities. A multiplicity
 * sum that misses the divisor degree marks the set inconsistent (typical
 * under-resolution signal) instead of throwing. */
ZeroSet locate_zeros(const Surface& S, const solver::VortexSolution& sol,
                     const ActionData& act);

struct RoundTrip {
    solver::SolveStatus status = solver::SolveStatus::Infeasible;
    bool multiplicity_match = false;
    double max_position_error = 0;   // chart distance, greedy multiset matching
    double max_position_error_h = 0; // same in grid spacings
    ZeroSet zeros;
};

/** Solve for the prescribed divisor, locate the zeros of the solution, and
 * match the two multisets (greedy nearest-neighbor, index-order tie-break,
 * deterministic). */
RoundTrip divisor_roundtrip(const Surface& S, const solver::Divisor& D,
                            const ActionData& act, const solver::SolveOptions& opts = {});

struct ScanRow {
    double tau = 0;
    solver::SolveStatus status = solver::SolveStatus::Infeasible;
    double residual = 0;
};

/** Solve at every tau of the ascending grid (act.tau is ignored) and
 * tabulate statuses; members run concurrently when threads > 1 and the
 * table is thread-count independent. */
std::vector<ScanRow> threshold_scan(const Surface& S, const solver::Divisor& D,
                                    const ActionData& act,
                                    const std::vector<double>& tau_grid,
                                    const solver::SolveOptions& opts = {}, int threads = 1);

/** Same scan over the canonical degree-N divisor. */
std::vector<ScanRow> threshold_scan(const Surface& S, long long N, const ActionData& act,
                                    const std::vector<double>& tau_grid,
                                    const solver::SolveOptions& opts = {}, int threads = 1);

/** Canonical degree-N divisor: multiplicity N at the central node of a
 * torus; on footballs, the orbit of a fixed equatorial node with
 * multiplicity N/m per member (N must be divisible by the cone order). */
solver::Divisor canonical_divisor(const Surface& S, long long N);

/** Deterministic random degree-N divisor: a hashed-seed partition of N into
 * well-separated points (full orbits on footballs, where m must divide N). */
solver::Divisor random_divisor(const Surface& S, long long N, std::uint64_t seed);

struct ProbeSummary {
    int samples = 0;
    int solved = 0;  // converged members
    int matched = 0; // multiplicities exact and position error <= 2 spacings
    bool all_infeasible = false;
    double success_rate = 0; // matched/solved; meaningless when all_infeasible
    double max_position_error_h = 0;
    double max_mass_defect = 0;
};

/** Sample `samples` random degree-N divisors, round-trip each, and
 * aggregate. Deterministic for a fixed seed, regardless of thread count. */
ProbeSummary symmetric_product_probe(const Surface& S, const ActionData& act, long long N,
                                     int samples, std::uint64_t seed,
                                     const solver::SolveOptions& opts = {}, int threads = 1);

} // namespace orbivortex::moduli
