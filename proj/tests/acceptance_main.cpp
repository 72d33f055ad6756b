// Acceptance gate: every criterion below is exercised end to end and
// reported as a single PASS/FAIL line with its measured margins; the binary
// exits nonzero when any criterion fails.
#include "orbivortex/fields.hpp"
#include "orbivortex/moduli.hpp"
#include "orbivortex/sampling.hpp"
#include "orbivortex/seifert.hpp"
#include "orbivortex/solver.hpp"
#include "orbivortex/surface.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

namespace {

using namespace orbivortex;
using fields::ActionData;
using fields::GaugeConfig;
using fields::GaugeTransform;
using sampling::FieldSpec;
using solver::SolveStatus;

constexpr double pi = std::numbers::pi;

// field families shared with the unit suites: full-spectrum decaying tails
// (rough but resolution-consistent) and band-limited smooth fields
const FieldSpec kTailU{0.8, 0, 3.0, false};
const FieldSpec kTailA{0.6, 0, 3.0, true};
const FieldSpec kBandU{0.5, 5, 0.0, false};
const FieldSpec kBandA{0.4, 5, 0.0, true};
const FieldSpec kBandPsi{0.8, 4, 0.0, false};

std::uint64_t splitmix(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

/// Every converged solve performed by the gate lands here so the final
/// criterion can audit its Newton tail, integral constraint, and maximum
/// principle.
struct RunRecord {
    std::string label;
    std::vector<double> history;
    double constraint_defect = 0;
    double max_fsq_ratio = 0;
};
std::vector<RunRecord> g_runs;

void record(const std::string& label, const solver::VortexSolution& sol,
            const solver::SolveReport& rep) {
    if (rep.status == SolveStatus::Converged)
        g_runs.push_back({label, sol.residual_history, rep.constraint_defect,
                          rep.max_fsq_ratio});
}

char status_letter(SolveStatus s) {
    switch (s) {
    case SolveStatus::Infeasible: return 'I';
    case SolveStatus::Converged: return 'C';
    case SolveStatus::MaxIterations: return 'M';
    case SolveStatus::Diverged: return 'D';
    }
    return '?';
}

struct Verdict {
    bool ok = true;
    std::string detail;
};

// 1. Existence dichotomy across the critical level on the flat torus:
//    tau in {0.8, 0.9, 1.1, 1.2} * tau_star gives I, I, C, C with converged
//    residuals at most 1e-8 and the whole sweep inside a 60 s budget.
Verdict criterion_1() {
    Surface S = Surface::torus(2 * pi, 2 * pi, 128);
    solver::Divisor D = moduli::canonical_divisor(S, 1);
    solver::SolveOptions opts;
    opts.tol = 1e-9;
    const double tau_star = 1.0 / pi;
    const double factors[4] = {0.8, 0.9, 1.1, 1.2};
    const SolveStatus want[4] = {SolveStatus::Infeasible, SolveStatus::Infeasible,
                                 SolveStatus::Converged, SolveStatus::Converged};

    Verdict v;
    std::string letters;
    double worst_res = 0;
    auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < 4; ++i) {
        ActionData act{1, factors[i] * tau_star};
        auto [sol, rep] = solver::solve_taubes(S, D, act, opts);
        record(fmt("dichotomy tau=%.3f", act.tau), sol, rep);
        letters += status_letter(rep.status);
        if (rep.status != want[i]) v.ok = false;
        if (rep.status == SolveStatus::Converged) {
            worst_res = std::max(worst_res, rep.pde_residual);
            if (!(rep.pde_residual <= 1e-8)) v.ok = false;
        }
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!(secs <= 60.0)) v.ok = false;
    v.detail = fmt("statuses %s, worst converged residual %.2e, %.2f s of 60 s budget",
                   letters.c_str(), worst_res, secs);
    return v;
}

// 2. Cone surface with a weight-3 action: tau = 2 infeasible, tau = 4
//    converged with quantized degree 3 (within 1e-5) and the solution pinned
//    to the invariant subspace (drift at most 1e-10).
Verdict criterion_2() {
    Surface F = Surface::football(3, 96, 192);
    solver::Divisor D = moduli::canonical_divisor(F, 3);

    Verdict v;
    auto [s2, r2] = solver::solve_taubes(F, D, ActionData{3, 2.0});
    if (r2.status != SolveStatus::Infeasible) v.ok = false;

    ActionData act{3, 4.0};
    auto [s4, r4] = solver::solve_taubes(F, D, act);
    record("cone tau=4", s4, r4);
    double deg_defect = -1, equiv = -1;
    if (r4.status != SolveStatus::Converged) {
        v.ok = false;
    } else {
        solver::Observables obs = solver::reconstruct_observables(F, s4, act);
        deg_defect = std::fabs(obs.degree - 3.0);
        equiv = s4.equivariance_defect;
        if (!(deg_defect <= 1e-5)) v.ok = false;
        if (!(equiv <= 1e-10)) v.ok = false;
    }
    v.detail = fmt("tau=2 %c, tau=4 %c, degree defect %.2e, invariance drift %.2e",
                   status_letter(r2.status), status_letter(r4.status), deg_defect, equiv);
    return v;
}

// 3. Energy split on 50 random smooth pairs (128^2 torus, no background
//    flux): relative discrepancy at most 1e-6 each, and the discrepancy of a
//    fixed pair decays at order >= 2 through 64 -> 128 -> 256.
Verdict criterion_3() {
    ActionData act{2, 1.3};
    Verdict v;
    double worst = 0;
    {
        Surface S = Surface::torus(2 * pi, 2 * pi, 128);
        for (std::uint64_t seed = 1; seed <= 50; ++seed) {
            GaugeConfig cfg = sampling::random_config(S, seed, kTailA, kTailU, 0);
            fields::EnergyIdentity ei = fields::energy_identity(S, cfg, act);
            double rel = std::fabs(ei.discrepancy) / std::max(1e-300, std::fabs(ei.lhs));
            worst = std::max(worst, rel);
            if (!(rel <= 1e-6)) v.ok = false;
        }
    }
    double min_ratio = 1e300;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        double disc[3];
        int idx = 0;
        for (int n : {64, 128, 256}) {
            Surface S = Surface::torus(2 * pi, 2 * pi, n);
            GaugeConfig cfg = sampling::random_config(S, seed, kTailA, kTailU, 0);
            disc[idx++] = std::fabs(fields::energy_identity(S, cfg, act).discrepancy);
        }
        min_ratio = std::min({min_ratio, disc[0] / disc[1], disc[1] / disc[2]});
    }
    if (!(min_ratio >= 4.0)) v.ok = false; // halving h at order 2 quarters the defect
    v.detail = fmt("worst relative discrepancy %.2e, refinement order >= %.2f",
                   worst, std::log2(min_ratio));
    return v;
}

// 4. Gauge invariance of the energy: 20 random unit-circle transforms on
//    random smooth pairs move the energy by at most 1e-8 relatively.
Verdict criterion_4() {
    Surface S = Surface::torus(2 * pi, 2 * pi, 128);
    ActionData act{2, 1.3};
    Verdict v;
    double worst = 0;
    for (std::uint64_t s = 0; s < 20; ++s) {
        GaugeConfig cfg = sampling::random_config(S, 7 + s, kBandA, kBandU, 0);
        double E = fields::energy(S, cfg, act);
        GaugeTransform g = sampling::random_transform(S, 100 + s, kBandPsi);
        double Eg = fields::energy(S, fields::gauge_apply(S, g, cfg, act), act);
        worst = std::max(worst, std::fabs(Eg - E) / std::max(1.0, E));
    }
    if (!(worst <= 1e-8)) v.ok = false;
    v.detail = fmt("worst relative drift %.2e over 20 transforms", worst);
    return v;
}

// 5. The curvature pairing term of the energy split is a topological
//    quantity: evaluated through its defining integrand (covariant
//    derivatives and curvature of the actual connection), replacing the
//    connection wholesale moves it by at most 1e-6 relatively. The drift
//    must also be nonzero: a route that never touches the connection would
//    make this check vacuous.
Verdict criterion_5() {
    Surface S = Surface::torus(2 * pi, 2 * pi, 128);
    ActionData act{2, 1.3};
    Verdict v;
    double worst = 0;
    for (std::uint64_t s = 0; s < 10; ++s) {
        GaugeConfig c1 = sampling::random_config(S, 40 + s, kTailA, kTailU, 1);
        double R1 = fields::topological_R(S, c1, act);
        GaugeConfig c2 = c1;
        c2.alpha.c1 = sampling::random_scalar(S, 900 + s, kTailA);
        c2.alpha.c2 = sampling::random_scalar(S, 950 + s, kTailA);
        double R2 = fields::topological_R(S, c2, act);
        worst = std::max(worst, std::fabs(R2 - R1) / std::max(1.0, std::fabs(R1)));
    }
    if (!(worst <= 1e-6) || !(worst > 0.0)) v.ok = false;
    v.detail = fmt("worst relative drift %.2e over 10 connection replacements", worst);
    return v;
}

// 6. The correspondence map intertwines the gauge actions with the inverse
//    a-th power, node-exactly (20 random triples, all weights).
Verdict criterion_6() {
    Surface S = Surface::torus(2 * pi, 2 * pi, 128);
    Verdict v;
    double worst = 0;
    for (std::uint64_t s = 0; s < 20; ++s) {
        ActionData act{1 + int(s % 3), 1.1};
        GaugeConfig cfg = sampling::random_config(S, s, kBandA, kBandU, 1);
        GaugeTransform g = sampling::random_transform(S, 700 + s, FieldSpec{1.1, 4, 0.0, false});
        GaugeConfig lhs = fields::psi_map(fields::gauge_apply(S, g, cfg, act), act);
        GaugeConfig rhs = fields::kahler_gauge_apply(S, g.power(-act.a), fields::psi_map(cfg, act));
        if (lhs.N != rhs.N) v.ok = false;
        for (int i = 0; i < S.size(); ++i) {
            worst = std::max(worst, std::abs(lhs.u[i] - rhs.u[i]));
            worst = std::max(worst, std::fabs(lhs.alpha.c1[i] - rhs.alpha.c1[i]));
            worst = std::max(worst, std::fabs(lhs.alpha.c2[i] - rhs.alpha.c2[i]));
        }
    }
    if (!(worst <= 1e-12)) v.ok = false;
    v.detail = fmt("worst node defect %.2e over 20 triples", worst);
    return v;
}

// 7. Divisor round-trip: 20 random divisors of degree 1..3 are recovered
//    from the solved field with exact multiplicity multisets and zero
//    positions within two grid spacings.
Verdict criterion_7() {
    Surface S = Surface::torus(2 * pi, 2 * pi, 128);
    ActionData act{1, 4.0};
    Verdict v;
    int matched = 0;
    double worst_pos = 0, worst_defect = 0;
    for (std::uint64_t s = 0; s < 20; ++s) {
        long long N = 1 + (long long)(s % 3);
        solver::Divisor D = moduli::random_divisor(S, N, 1000 + s);
        moduli::RoundTrip rt = moduli::divisor_roundtrip(S, D, act);
        bool good = rt.status == SolveStatus::Converged && rt.multiplicity_match &&
                    rt.max_position_error_h <= 2.0;
        if (good) ++matched;
        else v.ok = false;
        worst_pos = std::max(worst_pos, rt.max_position_error_h);
        worst_defect = std::max(worst_defect, rt.zeros.max_mass_defect);

        auto [sol, rep] = solver::solve_taubes(S, D, act);
        record(fmt("roundtrip seed=%llu", (unsigned long long)(1000 + s)), sol, rep);
    }
    v.detail = fmt("%d/20 recovered, worst position error %.3f spacings, "
                   "worst mass defect %.3f",
                   matched, worst_pos, worst_defect);
    return v;
}

// 8. Adiabatic concentration: shrinking the length scale through 1, 1/2,
//    1/4, 1/8 drives both the off-core deviation from the vacuum level and
//    the moment-map defect strictly down. The grid is sized for the smallest
//    member: at eps = 1/8 the solution sits within ~1e-10 of the vacuum
//    level far from the core, so the far-field discretization wiggle of the
//    grid charge (order h^2) must be pushed under the 1e-6 maximum-principle
//    budget audited by the last criterion.
Verdict criterion_8() {
    Surface S = Surface::torus(2 * pi, 2 * pi, 2048);
    ActionData act{1, 1.2 / pi};
    solver::Divisor D = moduli::canonical_divisor(S, 1);
    const std::vector<double> eps = {1.0, 0.5, 0.25, 0.125};

    Verdict v;
    auto rows = solver::adiabatic_family(S, D, act, eps, {}, 0.5, 2);
    std::string sup_list, mu_list;
    for (size_t k = 0; k < rows.size(); ++k) {
        if (rows[k].status != SolveStatus::Converged) v.ok = false;
        if (k > 0 && !(rows[k].sup_dev < rows[k - 1].sup_dev)) v.ok = false;
        if (k > 0 && !(rows[k].mu_norm < rows[k - 1].mu_norm)) v.ok = false;
        sup_list += fmt(k ? " %.3f" : "%.3f", rows[k].sup_dev);
        mu_list += fmt(k ? " %.3f" : "%.3f", rows[k].mu_norm);
    }
    for (double e : eps) {
        auto [sol, rep] = solver::solve_taubes(S, D, act, {}, e);
        record(fmt("adiabatic eps=%.3f", e), sol, rep);
    }
    v.detail = fmt("sup deviation %s, mu defect %s", sup_list.c_str(), mu_list.c_str());
    return v;
}

// 9. Exact invariant arithmetic: 1000 random normalized invariant sets give
//    the exact rational degree (independent common-denominator oracle), the
//    weight-a bundle degree is exactly a*d, and the genus-0 lifting
//    obstruction vanishes for all weights up to 50.
Verdict criterion_9() {
    Verdict v;
    std::uint64_t state = 2026;
    int degree_checked = 0, bundle_checked = 0;
    for (int k = 0; k < 1000; ++k) {
        seifert::SeifertData d;
        d.b = (long long)(splitmix(state) % 41) - 20;
        int npts = int(splitmix(state) % 7);
        for (int i = 0; i < npts; ++i) {
            long long m = 2 + (long long)(splitmix(state) % 14);
            d.mult.push_back(m);
            d.beta.push_back((long long)(splitmix(state) % m));
        }
        seifert::Rational got = seifert::orbifold_degree(d);
        seifert::Integer den = 1;
        for (long long m : d.mult) den *= m;
        seifert::Integer num = seifert::Integer(d.b) * den;
        for (size_t i = 0; i < d.mult.size(); ++i)
            num += seifert::Integer(d.beta[i]) * (den / d.mult[i]);
        if (got != seifert::Rational(num, den)) v.ok = false;
        else ++degree_checked;
    }
    for (int k = 0; k < 200; ++k) {
        long long a = 1 + (long long)(splitmix(state) % 8);
        std::vector<long long> divs;
        for (long long q = 1; q <= a; ++q)
            if (a % q == 0) divs.push_back(q);
        long long q = divs[splitmix(state) % divs.size()];
        long long p = (long long)(splitmix(state) % 21) - 10;
        std::vector<long long> mult;
        int npts = int(splitmix(state) % 4);
        for (int i = 0; i < npts; ++i) mult.push_back(2 + (long long)(splitmix(state) % 8));
        seifert::Rational d = seifert::rational_of(p, q);
        seifert::SeifertData bundle = seifert::associated_bundle(a, d, mult);
        if (seifert::orbifold_degree(bundle) != seifert::rational_of(a) * d) v.ok = false;
        else ++bundle_checked;
    }
    bool coker_ok = true;
    for (long long a = 1; a <= 50; ++a) {
        seifert::Cokernel ck = seifert::lifting_cokernel(0, a);
        if (!ck.cyclic_factors.empty() || ck.order != 1) coker_ok = false;
    }
    if (!coker_ok) v.ok = false;
    v.detail = fmt("%d/1000 exact degrees, %d/200 exact bundle degrees, "
                   "genus-0 obstruction trivial for a <= 50: %s",
                   degree_checked, bundle_checked, coker_ok ? "yes" : "no");
    return v;
}

// 10. Solver audit over every converged run of this gate: the final three
//     residuals fit r_{k+1} <= C * r_k^2 with C at most 1e4 (the last step
//     may bottom out on the rounding floor, so the best-supported of the
//     final two transitions carries the evidence), the mass constraint is
//     enforced to 1e-10 relative, and the maximum principle holds with at
//     most 1e-6 relative overshoot.
Verdict criterion_10() {
    Verdict v;
    if (g_runs.empty()) {
        v.ok = false;
        v.detail = "no converged runs were recorded";
        return v;
    }
    double worst_tail = -1, worst_constraint = 0, worst_over = -1;
    std::string worst_label = "-";
    int tails = 0;
    for (const RunRecord& r : g_runs) {
        if (!(r.constraint_defect <= 1e-10)) v.ok = false;
        worst_constraint = std::max(worst_constraint, r.constraint_defect);
        if (!(r.max_fsq_ratio <= 1.0 + 1e-6)) v.ok = false;
        worst_over = std::max(worst_over, r.max_fsq_ratio - 1.0);
        const std::vector<double>& h = r.history;
        double fit = -1;
        for (size_t k = (h.size() >= 3 ? h.size() - 3 : 0); k + 1 < h.size(); ++k) {
            if (h[k + 1] < 1e-13 || h[k] <= 0) continue;
            double c = h[k + 1] / (h[k] * h[k]);
            if (fit < 0 || c < fit) fit = c;
        }
        if (fit >= 0) {
            ++tails;
            if (!(fit <= 1e4)) v.ok = false;
            if (fit > worst_tail) {
                worst_tail = fit;
                worst_label = r.label;
            }
        }
    }
    if (tails == 0) v.ok = false;
    v.detail = fmt("%zu converged runs (%d tails fitted), worst tail constant %.3g "
                   "(at %s), worst constraint defect %.2e, worst overshoot %+.2e",
                   g_runs.size(), tails, worst_tail, worst_label.c_str(),
                   worst_constraint, worst_over);
    return v;
}

const char* kNames[10] = {
    "existence dichotomy across the critical level (torus, 128^2, 60 s budget)",
    "cone surface dichotomy with quantized degree and invariant solutions",
    "energy split on random smooth pairs with order-2 refinement decay",
    "gauge invariance of the energy under random circle transforms",
    "topological stability of the curvature pairing term",
    "correspondence map intertwines the gauge actions node-exactly",
    "divisor round-trip through solve and zero location",
    "adiabatic concentration under a shrinking length scale",
    "exact circle-bundle invariant arithmetic and lifting obstruction",
    "solver audit: quadratic tails, mass constraint, maximum principle",
};

} // namespace

int main() {
    Verdict (*criteria[10])() = {criterion_1, criterion_2, criterion_3, criterion_4,
                                 criterion_5, criterion_6, criterion_7, criterion_8,
                                 criterion_9, criterion_10};
    int failed = 0;
    for (int i = 0; i < 10; ++i) {
        Verdict v = criteria[i]();
        std::printf("%s %2d: %s\n        %s\n", v.ok ? "PASS" : "FAIL", i + 1, kNames[i],
                    v.detail.c_str());
        std::fflush(stdout);
        if (!v.ok) ++failed;
    }
    std::printf("acceptance: %d/10 criteria passed\n", 10 - failed);
    return failed == 0 ? 0 : 1;
}
