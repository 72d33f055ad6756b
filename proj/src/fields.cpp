#include "orbivortex/fields.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace orbivortex::fields {

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;

void check_action(const ActionData& act) {
    if (act.a < 1) throw std::invalid_argument("action: weight a must be >= 1");
    if (!(act.tau > 0)) throw std::invalid_argument("action: tau must be positive");
}

void check_config(const Surface& S, const GaugeConfig& cfg, const char* who) {
    auto n = static_cast<std::size_t>(S.size());
    if (cfg.alpha.c1.size() != n || cfg.alpha.c2.size() != n || cfg.u.size() != n)
        throw std::invalid_argument(std::string(who) + ": configuration size mismatch");
}
} // namespace

GaugeTransform GaugeTransform::power(long long k) const {
    GaugeTransform g;
    g.psi.resize(psi.size());
    double kk = static_cast<double>(k);
    for (std::size_t i = 0; i < psi.size(); ++i) g.psi[i] = kk * psi[i];
    return g;
}

ComplexField GaugeTransform::values() const {
    ComplexField g(psi.size());
    for (std::size_t i = 0; i < psi.size(); ++i) g[i] = std::polar(1.0, psi[i]);
    return g;
}

std::complex<double> moment_map(std::complex<double> z, const ActionData& act) {
    check_action(act);
    return {0.0, 0.5 * (act.a * std::norm(z) - act.tau)};
}

ScalarField moment_map_coeff(const Surface& S, const ComplexField& u, const ActionData& act) {
    check_action(act);
    if (static_cast<int>(u.size()) != S.size())
        throw std::invalid_argument("moment_map_coeff: field size mismatch");
    ScalarField m(u.size());
    for (std::size_t i = 0; i < u.size(); ++i)
        m[i] = 0.5 * (act.a * std::norm(u[i]) - act.tau);
    return m;
}

ComplexOneForm covariant_derivative(const Surface& S, const GaugeConfig& cfg,
                                    const ActionData& act) {
    check_action(act);
    check_config(S, cfg, "covariant_derivative");
    ComplexOneForm d;
    S.grad(cfg.u, d.c1, d.c2);
    double a = act.a;
    const std::complex<double> mi(0.0, -1.0);
    for (int i = 0; i < S.size(); ++i) {
        d.c1[i] += mi * (a * cfg.alpha.c1[i]) * cfg.u[i];
        d.c2[i] += mi * (a * cfg.alpha.c2[i]) * cfg.u[i];
    }
    return d;
}

namespace {
/** Split d into its J-(anti)linear parts: sign = +1 gives the
 * antiholomorphic projection, whose first component is (D1 + i D2)/2. */
ComplexOneForm j_split(const ComplexOneForm& d, double sign) {
    ComplexOneForm out;
    std::size_t n = d.c1.size();
    out.c1.resize(n);
    out.c2.resize(n);
    const std::complex<double> i1(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        std::complex<double> w = 0.5 * (d.c1[i] + sign * i1 * d.c2[i]);
        out.c1[i] = w;
        out.c2[i] = -sign * i1 * w;
    }
    return out;
}
} // namespace

ComplexOneForm dbar(const Surface& S, const GaugeConfig& cfg, const ActionData& act) {
    return j_split(covariant_derivative(S, cfg, act), +1.0);
}

ComplexOneForm del(const Surface& S, const GaugeConfig& cfg, const ActionData& act) {
    return j_split(covariant_derivative(S, cfg, act), -1.0);
}

ScalarField curvature(const Surface& S, const GaugeConfig& cfg) {
    auto n = static_cast<std::size_t>(S.size());
    if (cfg.alpha.c1.size() != n || cfg.alpha.c2.size() != n)
        throw std::invalid_argument("curvature: connection size mismatch");
    ScalarField phi = S.star_curl(cfg.alpha);
    double bg = two_pi * static_cast<double>(cfg.N) / S.vol();
    for (auto& v : phi) v += bg;
    return phi;
}

double degree(const Surface& S, const GaugeConfig& cfg) {
    return S.integrate(curvature(S, cfg)) / two_pi;
}

double line_degree(const Surface& S, const GaugeConfig& cfg, const ActionData& act) {
    check_action(act);
    return degree(S, cfg) / act.a;
}

double energy(const Surface& S, const GaugeConfig& cfg, const ActionData& act, double eps) {
    check_action(act);
    check_config(S, cfg, "energy");
    if (!(eps > 0)) throw std::invalid_argument("energy: eps must be positive");
    ComplexOneForm d = covariant_derivative(S, cfg, act);
    ScalarField phi = curvature(S, cfg);
    ScalarField m = moment_map_coeff(S, cfg.u, act);
    ScalarField dens(S.size());
    double e2 = eps * eps;
    for (int i = 0; i < S.size(); ++i)
        dens[i] = 0.5 * (std::norm(d.c1[i]) + std::norm(d.c2[i]) + e2 * phi[i] * phi[i] +
                         m[i] * m[i] / e2);
    return S.integrate(dens);
}

EnergyIdentity energy_identity(const Surface& S, const GaugeConfig& cfg, const ActionData& act) {
    check_action(act);
    check_config(S, cfg, "energy_identity");
    ComplexOneForm d = covariant_derivative(S, cfg, act);
    ScalarField phi = curvature(S, cfg);
    ScalarField m = moment_map_coeff(S, cfg.u, act);

    ScalarField lhs_d(S.size()), bog_d(S.size());
    for (int i = 0; i < S.size(); ++i) {
        double dsq = std::norm(d.c1[i]) + std::norm(d.c2[i]);
        double fm = phi[i] + m[i];
        lhs_d[i] = 0.5 * (dsq + phi[i] * phi[i] + m[i] * m[i]);
        bog_d[i] = 0.5 * std::norm(d.c1[i] + std::complex<double>(0, 1) * d.c2[i]) +
                   0.5 * fm * fm;
    }

    // connection-free evaluation of the topological term: the minimal
    // coupling and curl contributions cancel after integration by parts,
    // leaving bare derivatives of u plus the background-flux pairing
    ComplexField g1, g2;
    S.grad(cfg.u, g1, g2);
    ScalarField r_d(S.size());
    for (int i = 0; i < S.size(); ++i)
        r_d[i] = std::imag(std::conj(g1[i]) * g2[i]);
    double R = S.integrate(r_d) -
               two_pi * static_cast<double>(cfg.N) / S.vol() * S.integrate(m);

    EnergyIdentity out;
    out.lhs = S.integrate(lhs_d);
    out.bogomolny = S.integrate(bog_d);
    out.R = R;
    out.discrepancy = out.lhs - out.bogomolny - out.R;
    return out;
}

double topological_R(const Surface& S, const GaugeConfig& cfg, const ActionData& act) {
    check_action(act);
    check_config(S, cfg, "topological_R");
    ComplexOneForm d = covariant_derivative(S, cfg, act);
    ScalarField phi = curvature(S, cfg);
    ScalarField m = moment_map_coeff(S, cfg.u, act);
    ScalarField dens(S.size());
    for (int i = 0; i < S.size(); ++i)
        dens[i] = std::imag(std::conj(d.c1[i]) * d.c2[i]) - m[i] * phi[i];
    return S.integrate(dens);
}

GaugeConfig gauge_apply(const Surface& S, const GaugeTransform& g, const GaugeConfig& cfg,
                        const ActionData& act) {
    check_action(act);
    check_config(S, cfg, "gauge_apply");
    if (static_cast<int>(g.psi.size()) != S.size())
        throw std::invalid_argument("gauge_apply: transform size mismatch");
    GaugeConfig out;
    out.N = cfg.N;
    ScalarField d1, d2;
    S.grad(g.psi, d1, d2);
    out.alpha.c1.resize(S.size());
    out.alpha.c2.resize(S.size());
    out.u.resize(S.size());
    double a = act.a;
    for (int i = 0; i < S.size(); ++i) {
        out.alpha.c1[i] = cfg.alpha.c1[i] + d1[i];
        out.alpha.c2[i] = cfg.alpha.c2[i] + d2[i];
        out.u[i] = std::polar(1.0, a * g.psi[i]) * cfg.u[i];
    }
    return out;
}

GaugeConfig psi_map(const GaugeConfig& cfg, const ActionData& act) {
    check_action(act);
    GaugeConfig out;
    double a = act.a;
    out.N = -static_cast<long long>(act.a) * cfg.N;
    out.alpha.c1.resize(cfg.alpha.c1.size());
    out.alpha.c2.resize(cfg.alpha.c2.size());
    out.u.resize(cfg.u.size());
    for (std::size_t i = 0; i < cfg.u.size(); ++i) {
        out.alpha.c1[i] = -a * cfg.alpha.c1[i];
        out.alpha.c2[i] = -a * cfg.alpha.c2[i];
        out.u[i] = a * cfg.u[i];
    }
    return out;
}

GaugeConfig kahler_gauge_apply(const Surface& S, const GaugeTransform& g, const GaugeConfig& cfg) {
    check_config(S, cfg, "kahler_gauge_apply");
    if (static_cast<int>(g.psi.size()) != S.size())
        throw std::invalid_argument("kahler_gauge_apply: transform size mismatch");
    GaugeConfig out;
    out.N = cfg.N;
    ScalarField d1, d2;
    S.grad(g.psi, d1, d2);
    out.alpha.c1.resize(S.size());
    out.alpha.c2.resize(S.size());
    out.u.resize(S.size());
    for (int i = 0; i < S.size(); ++i) {
        out.alpha.c1[i] = cfg.alpha.c1[i] + d1[i];
        out.alpha.c2[i] = cfg.alpha.c2[i] + d2[i];
        out.u[i] = std::polar(1.0, -g.psi[i]) * cfg.u[i];
    }
    return out;
}

namespace {
Residual finish_residual(const Surface& S, ComplexField r1, ScalarField r2) {
    Residual r;
    r.r1 = std::move(r1);
    r.r2 = std::move(r2);
    // form norm of the antiholomorphic derivative: both frame components
    // carry the component field, so the density is 2|r1|^2
    ScalarField d(S.size());
    for (int i = 0; i < S.size(); ++i) d[i] = 2.0 * std::norm(r.r1[i]);
    r.r1_l2 = std::sqrt(S.integrate(d));
    r.r2_l2 = S.norm_l2(r.r2);
    for (int i = 0; i < S.size(); ++i) {
        r.r1_sup = std::max(r.r1_sup, std::abs(r.r1[i]));
        r.r2_sup = std::max(r.r2_sup, std::abs(r.r2[i]));
    }
    return r;
}
} // namespace

Residual sve_residual(const Surface& S, const GaugeConfig& cfg, const ActionData& act,
                      double eps) {
    if (!(eps > 0)) throw std::invalid_argument("sve_residual: eps must be positive");
    ComplexOneForm db = dbar(S, cfg, act);
    ScalarField phi = curvature(S, cfg);
    ScalarField m = moment_map_coeff(S, cfg.u, act);
    ScalarField r2(S.size());
    double ie2 = 1.0 / (eps * eps);
    for (int i = 0; i < S.size(); ++i) r2[i] = phi[i] + ie2 * m[i];
    return finish_residual(S, std::move(db.c1), std::move(r2));
}

Residual kahler_residual(const Surface& S, const GaugeConfig& cfg, const ActionData& act,
                         double eps) {
    check_action(act);
    check_config(S, cfg, "kahler_residual");
    if (!(eps > 0)) throw std::invalid_argument("kahler_residual: eps must be positive");
    ComplexField d1, d2;
    S.grad(cfg.u, d1, d2);
    const std::complex<double> i1(0.0, 1.0);
    ComplexField r1(S.size());
    for (int i = 0; i < S.size(); ++i) {
        std::complex<double> D1 = d1[i] + i1 * cfg.alpha.c1[i] * cfg.u[i];
        std::complex<double> D2 = d2[i] + i1 * cfg.alpha.c2[i] * cfg.u[i];
        r1[i] = 0.5 * (D1 + i1 * D2);
    }
    ScalarField phi = curvature(S, cfg);
    ScalarField r2(S.size());
    double ie2 = 1.0 / (eps * eps);
    for (int i = 0; i < S.size(); ++i)
        r2[i] = phi[i] + ie2 * 0.5 * (act.a * act.tau - std::norm(cfg.u[i]));
    return finish_residual(S, std::move(r1), std::move(r2));
}

HolomorphicDefect pseudoholomorphic_residual(const Surface& S, const GaugeConfig& cfg,
                                             const ActionData& act) {
    ComplexOneForm db = dbar(S, cfg, act);
    ScalarField m = moment_map_coeff(S, cfg.u, act);
    ScalarField d(S.size());
    for (int i = 0; i < S.size(); ++i) d[i] = 2.0 * std::norm(db.c1[i]);
    HolomorphicDefect out;
    out.dbar_norm = std::sqrt(S.integrate(d));
    out.mu_norm = S.norm_l2(m);
    return out;
}

} // namespace orbivortex::fields
