#include "orbivortex/moduli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace orbivortex::moduli {

namespace {

constexpr double kPi = std::numbers::pi;

std::uint64_t splitmix(std::uint64_t& s) {
    std::uint64_t z = (s += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

double u01(std::uint64_t& s) {
    return double(splitmix(s) >> 11) * 0x1.0p-53;
}

/** Parabolic sub-grid offset (in units of one step) from three samples. */
double parabolic_offset(double fm, double f0, double fp) {
    double denom = fm - 2 * f0 + fp;
    if (denom <= 0) return 0.5;
    return std::clamp(0.5 * (fm - fp) / denom, -0.5, 0.5);
}

void run_indexed(int count, int threads, const std::function<void(int)>& body) {
    int nt = std::max(1, std::min(threads, count));
    if (nt == 1) {
        for (int k = 0; k < count; ++k) body(k);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (int t = 0; t < nt; ++t)
        pool.emplace_back([&] {
            for (int k = next.fetch_add(1); k < count; k = next.fetch_add(1)) body(k);
        });
    for (auto& th : pool) th.join();
}

} // namespace

ZeroSet locate_zeros(const Surface& S, const solver::VortexSolution& sol,
                     const ActionData& act) {
    if (act.a < 1 || !(act.tau > 0))
        throw std::invalid_argument("locate_zeros: bad action data");
    if (static_cast<int>(sol.fsq.size()) != S.size())
        throw std::invalid_argument("locate_zeros: solution/surface mismatch");

    const double threshold = 1e-3 * act.tau / act.a;
    const int n1 = S.n1(), n2 = S.n2();
    const bool wrap1 = S.kind() == SurfaceKind::torus;

    // candidates: sub-threshold local minima of fsq over the 8-neighborhood
    std::vector<int> cand;
    for (int i1 = 0; i1 < n1; ++i1)
        for (int i2 = 0; i2 < n2; ++i2) {
            int i = S.index(i1, i2);
            double f0 = sol.fsq[i];
            if (!(f0 < threshold)) continue;
            bool is_min = true;
            for (int d1 = -1; d1 <= 1 && is_min; ++d1)
                for (int d2 = -1; d2 <= 1 && is_min; ++d2) {
                    if (d1 == 0 && d2 == 0) continue;
                    int j1 = i1 + d1;
                    if (j1 < 0 || j1 >= n1) {
                        if (!wrap1) continue; // football rows end at the poles
                        j1 = (j1 + n1) % n1;
                    }
                    int j2 = (i2 + d2 + n2) % n2;
                    if (sol.fsq[S.index(j1, j2)] < f0) is_min = false;
                }
            if (is_min) cand.push_back(i);
        }

    // merge candidates closer than two grid spacings; keep the deepest
    double merge_radius = 2.0 * S.spacing();
    std::vector<int> rep(cand.size());
    for (size_t k = 0; k < cand.size(); ++k) rep[k] = int(k);
    auto find = [&](int k) {
        while (rep[k] != k) k = rep[k] = rep[rep[k]];
        return k;
    };
    for (size_t p = 0; p < cand.size(); ++p)
        for (size_t q = p + 1; q < cand.size(); ++q)
            if (S.distance(cand[p], S.coord1(cand[q]), S.coord2(cand[q])) < merge_radius) {
                int rp = find(int(p)), rq = find(int(q));
                if (rp != rq) rep[std::max(rp, rq)] = std::min(rp, rq);
            }
    std::vector<int> centers;
    for (size_t k = 0; k < cand.size(); ++k)
        if (find(int(k)) == int(k)) {
            int best = cand[k];
            for (size_t q = 0; q < cand.size(); ++q)
                if (find(int(q)) == int(k) && sol.fsq[cand[q]] < sol.fsq[best])
                    best = cand[q];
            centers.push_back(best);
        }
    std::sort(centers.begin(), centers.end());

    ZeroSet zs;
    if (centers.empty()) {
        zs.consistent = sol.divisor.degree == 0;
        return zs;
    }

    // Voronoi-style split of the curvature mass among the centers. A plain
    // nearest-center split leaks tail mass between zeros of unequal charge
    // (the far field of a charge-n zero scales like n K0(d/l) with healing
    // length l), so rerun with each bisector moved to the tail-balance locus
    // argmin_k (d_k - l log n_k), using provisional charges from pass one.
    std::vector<double> mass(centers.size(), 0.0);
    std::vector<double> shift(centers.size(), 0.0);
    auto accumulate = [&] {
        std::fill(mass.begin(), mass.end(), 0.0);
        for (int i = 0; i < S.size(); ++i) {
            size_t best = 0;
            double best_d = std::numeric_limits<double>::max();
            for (size_t k = 0; k < centers.size(); ++k) {
                double d =
                    S.distance(i, S.coord1(centers[k]), S.coord2(centers[k])) - shift[k];
                if (d < best_d) {
                    best_d = d;
                    best = k;
                }
            }
            mass[best] += sol.phi[i] * S.weight(i);
        }
    };
    accumulate();
    if (centers.size() > 1) {
        double ell = sol.eps / std::sqrt(double(act.a) * act.tau);
        bool uneven = false;
        for (size_t k = 0; k < centers.size(); ++k) {
            double units = std::max(1.0, std::round(mass[k] / (2 * kPi)));
            shift[k] = ell * std::log(units);
            if (shift[k] != shift[0]) uneven = true;
        }
        if (uneven) accumulate();
    }

    for (size_t k = 0; k < centers.size(); ++k) {
        Zero z;
        z.node = centers[k];
        z.c1 = S.coord1(z.node);
        z.c2 = S.coord2(z.node);
        double units = mass[k] / (2 * kPi);
        z.mult = int(std::llround(units));
        z.mass_defect = std::fabs(units - z.mult);
        int i1 = z.node / n2, i2 = z.node % n2;
        double blur = 0;
        if (wrap1 || (i1 > 0 && i1 + 1 < n1)) {
            int up = wrap1 ? (i1 + 1) % n1 : i1 + 1;
            int dn = wrap1 ? (i1 + n1 - 1) % n1 : i1 - 1;
            blur = std::fabs(parabolic_offset(sol.fsq[S.index(dn, i2)], sol.fsq[z.node],
                                              sol.fsq[S.index(up, i2)]));
        }
        blur = std::max(blur, std::fabs(parabolic_offset(
                                  sol.fsq[S.index(i1, (i2 + n2 - 1) % n2)], sol.fsq[z.node],
                                  sol.fsq[S.index(i1, (i2 + 1) % n2)])));
        z.position_blur = blur;
        zs.max_mass_defect = std::max(zs.max_mass_defect, z.mass_defect);
        zs.total_multiplicity += z.mult;
        zs.zeros.push_back(z);
    }
    zs.consistent = zs.total_multiplicity == sol.divisor.degree;
    return zs;
}

RoundTrip divisor_roundtrip(const Surface& S, const solver::Divisor& D,
                            const ActionData& act, const solver::SolveOptions& opts) {
    RoundTrip rt;
    auto [sol, rep] = solver::solve_taubes(S, D, act, opts);
    rt.status = rep.status;
    if (rep.status != solver::SolveStatus::Converged) return rt;

    rt.zeros = locate_zeros(S, sol, act);
    bool ok = rt.zeros.consistent && rt.zeros.zeros.size() == D.points.size();

    std::vector<char> used(rt.zeros.zeros.size(), 0);
    size_t pairs = 0;
    for (const auto& p : D.points) {
        double pc1 = S.coord1(p.node), pc2 = S.coord2(p.node);
        int best = -1;
        double best_d = std::numeric_limits<double>::max();
        for (size_t k = 0; k < rt.zeros.zeros.size(); ++k) {
            if (used[k]) continue;
            double d = S.distance(rt.zeros.zeros[k].node, pc1, pc2);
            if (d < best_d) {
                best_d = d;
                best = int(k);
            }
        }
        if (best < 0) {
            ok = false;
            break;
        }
        used[best] = 1;
        ++pairs;
        rt.max_position_error = std::max(rt.max_position_error, best_d);
        if (rt.zeros.zeros[best].mult != p.mult) ok = false;
    }
    rt.multiplicity_match = ok && pairs == D.points.size();
    rt.max_position_error_h = rt.max_position_error / S.spacing();
    return rt;
}

std::vector<ScanRow> threshold_scan(const Surface& S, const solver::Divisor& D,
                                    const ActionData& act,
                                    const std::vector<double>& tau_grid,
                                    const solver::SolveOptions& opts, int threads) {
    for (size_t i = 0; i + 1 < tau_grid.size(); ++i)
        if (!(tau_grid[i] < tau_grid[i + 1]))
            throw std::invalid_argument("threshold_scan: tau grid must be ascending");
    std::vector<ScanRow> rows(tau_grid.size());
    run_indexed(int(tau_grid.size()), threads, [&](int k) {
        ActionData a{act.a, tau_grid[k]};
        auto [sol, rep] = solver::solve_taubes(S, D, a, opts);
        rows[k] = {tau_grid[k], rep.status, rep.pde_residual};
    });
    return rows;
}

solver::Divisor canonical_divisor(const Surface& S, long long N) {
    if (N < 0) throw std::invalid_argument("canonical_divisor: N must be >= 0");
    if (N == 0) return {};
    if (S.kind() == SurfaceKind::football) {
        int m = S.cone_order();
        if (N % m != 0)
            throw std::invalid_argument(
                "canonical_divisor: football degree must be divisible by the cone order");
        int node = S.nearest_node(kPi / 2, kPi / double(S.n2()));
        return solver::make_divisor(
            S, {{S.coord1(node), S.coord2(node), int(N / m)}});
    }
    int node = S.index(S.n1() / 2, S.n2() / 2);
    return solver::make_divisor(S, {{S.coord1(node), S.coord2(node), int(N)}});
}

std::vector<ScanRow> threshold_scan(const Surface& S, long long N, const ActionData& act,
                                    const std::vector<double>& tau_grid,
                                    const solver::SolveOptions& opts, int threads) {
    return threshold_scan(S, canonical_divisor(S, N), act, tau_grid, opts, threads);
}

solver::Divisor random_divisor(const Surface& S, long long N, std::uint64_t seed) {
    if (N < 1) throw std::invalid_argument("random_divisor: N must be >= 1");
    std::uint64_t st = seed * 0x9e3779b97f4a7c15ull + 0x1234;

    const bool football = S.kind() == SurfaceKind::football;
    const int m = S.cone_order();
    long long orbits = N;
    if (football) {
        if (N % m != 0)
            throw std::invalid_argument(
                "random_divisor: football degree must be divisible by the cone order");
        orbits = N / m;
    }

    // partition `orbits` units into 1..orbits points
    int k = 1 + int(splitmix(st) % std::uint64_t(orbits));
    std::vector<int> mult(k, 1);
    for (long long extra = orbits - k; extra > 0; --extra)
        ++mult[splitmix(st) % std::uint64_t(k)];

    double L1 = football ? kPi : S.coord1(S.index(1, 0)) * S.n1();
    double L2 = football ? 2 * kPi : S.coord2(S.index(0, 1)) * S.n2();
    double min_sep = football ? 0.45 : 0.45 * std::min(L1, L2);
    std::vector<solver::DivisorInput> pts;
    for (int attempt_sep = 0; attempt_sep < 6; ++attempt_sep) {
        pts.clear();
        int tries = 0;
        while (int(pts.size()) < k && tries < 5000) {
            ++tries;
            double c1, c2;
            if (football) {
                c1 = 0.6 + u01(st) * (kPi - 1.2); // keep orbits off the poles
                c2 = u01(st) * 2 * kPi / m;
            } else {
                c1 = u01(st) * L1;
                c2 = u01(st) * L2;
            }
            int node = S.nearest_node(c1, c2);
            bool ok = true;
            for (const auto& q : pts) {
                int qnode = S.nearest_node(q.c1, q.c2);
                for (int a1 : S.orbit_nodes(node))
                    for (int b1 : S.orbit_nodes(qnode))
                        if (S.distance(a1, S.coord1(b1), S.coord2(b1)) < min_sep) ok = false;
            }
            if (football) {
                // orbit self-separation
                auto orb = S.orbit_nodes(node);
                for (size_t a = 0; a < orb.size() && ok; ++a)
                    for (size_t b = a + 1; b < orb.size(); ++b)
                        if (S.distance(orb[a], S.coord1(orb[b]), S.coord2(orb[b])) < min_sep)
                            ok = false;
            }
            if (ok) pts.push_back({c1, c2, mult[pts.size()]});
        }
        if (int(pts.size()) == k) break;
        min_sep *= 0.8; // deterministic fallback for crowded requests
    }
    if (int(pts.size()) != k)
        throw std::runtime_error("random_divisor: could not place separated points");
    return solver::make_divisor(S, pts);
}

ProbeSummary symmetric_product_probe(const Surface& S, const ActionData& act, long long N,
                                     int samples, std::uint64_t seed,
                                     const solver::SolveOptions& opts, int threads) {
    if (samples < 0) throw std::invalid_argument("symmetric_product_probe: samples < 0");
    ProbeSummary sum;
    sum.samples = samples;
    if (samples == 0) return sum;

    std::vector<RoundTrip> rts(samples);
    run_indexed(samples, threads, [&](int k) {
        solver::Divisor D = random_divisor(S, N, seed + std::uint64_t(k));
        rts[k] = divisor_roundtrip(S, D, act, opts);
    });

    sum.all_infeasible = true;
    for (const auto& rt : rts) {
        if (rt.status != solver::SolveStatus::Infeasible) sum.all_infeasible = false;
        if (rt.status == solver::SolveStatus::Converged) {
            ++sum.solved;
            bool good = rt.multiplicity_match && rt.max_position_error_h <= 2.0;
            if (good) ++sum.matched;
            sum.max_position_error_h =
                std::max(sum.max_position_error_h, rt.max_position_error_h);
            sum.max_mass_defect = std::max(sum.max_mass_defect, rt.zeros.max_mass_defect);
        }
    }
    sum.success_rate = sum.solved > 0 ? double(sum.matched) / sum.solved : 0.0;
    return sum;
}

} // namespace orbivortex::moduli
