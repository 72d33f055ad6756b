#pragma once

#include "orbivortex/surface.hpp"

#include <complex>

namespace orbivortex::fields {

/** Weighted circle action data: S^1 acts on C with integer weight a >= 1,
 *  and the moment map is shifted by the level tau > 0. */
struct ActionData {
    int a = 1;
    double tau = 1.0;
};

/** A gauge configuration in the global chart model.
 *
 *  The connection is A = A0 + i(alpha.c1 e^1 + alpha.c2 e^2), where A0 is a
 *  background connection of constant curvature carrying the full bundle
 *  degree N: F_{A0} = (2 pi i N / Vol) dvol.  The stored one-form `alpha`
 *  holds the two real coefficient fields; `u` is the section in the chart.
 */
struct GaugeConfig {
    OneForm alpha;
    ComplexField u;
    long long N = 0;
};

/** A gauge transformation gamma = exp(i psi), stored by its phase field so
 *  that integer powers and inverses act linearly on the stored data (this
 *  makes the Psi equivariance identity hold to rounding at every node). */
struct GaugeTransform {
    ScalarField psi;

    GaugeTransform power(long long k) const;
    GaugeTransform inverse() const { return power(-1); }
    /** Node values of gamma = exp(i psi); unit modulus by construction. */
    ComplexField values() const;
};

/** The moment map mu(z) = (i/2)(a |z|^2 - tau), a purely imaginary number. */
std::complex<double> moment_map(std::complex<double> z, const ActionData& act);

/** Real coefficient field m with mu(u) = i m, i.e. m = (a|u|^2 - tau)/2. */
ScalarField moment_map_coeff(const Surface& S, const ComplexField& u, const ActionData& act);

/** d_A u = du - a * alpha * u, returned as frame components (D1 u, D2 u). */
ComplexOneForm covariant_derivative(const Surface& S, const GaugeConfig& cfg, const ActionData& act);

/** Antiholomorphic part dbar_A u = (d_A u + J d_A u j)/2.  Its second frame
 *  component is always -i times the first. */
ComplexOneForm dbar(const Surface& S, const GaugeConfig& cfg, const ActionData& act);

/** Holomorphic part del_A u = (d_A u - J d_A u j)/2; dbar + del = d_A u. */
ComplexOneForm del(const Surface& S, const GaugeConfig& cfg, const ActionData& act);

/** Curvature coefficient field phi with F_A = i * phi * dvol:
 *  phi = curl(alpha) + 2 pi N / Vol. */
ScalarField curvature(const Surface& S, const GaugeConfig& cfg);

/** (1/2pi) Integral of the curvature coefficient; equals N up to rounding
 *  (orientation fixed so the result is +N). */
double degree(const Surface& S, const GaugeConfig& cfg);

/** Degree of the underlying orbifold line bundle, degree(cfg)/a. */
double line_degree(const Surface& S, const GaugeConfig& cfg, const ActionData& act);

/** E = (1/2) Integral( |d_A u|^2 + eps^2 |F_A|^2 + eps^{-2} |mu(u)|^2 ),
 *  with |i x|^2 = x^2 on the Lie algebra. */
double energy(const Surface& S, const GaugeConfig& cfg, const ActionData& act, double eps = 1.0);

struct EnergyIdentity {
    double lhs = 0;         // the energy at eps = 1
    double bogomolny = 0;   // Integral( |dbar_A u|^2 + (1/2)|*F_A + mu(u)|^2 )
    double R = 0;           // topological term, evaluated connection-free
    double discrepancy = 0; // lhs - bogomolny - R
};

/** Split the eps = 1 energy into Bogomolny plus topological parts.  The R
 *  reported here is evaluated in its manifestly connection-independent form
 *  (bare derivatives of u plus the background flux pairing); the discrepancy
 *  is then a genuine discretization defect that decays under refinement. */
EnergyIdentity energy_identity(const Surface& S, const GaugeConfig& cfg, const ActionData& act);

/** The topological term from its defining integrand,
 *  R = Integral( (d_A u)^* omega - <mu(u), F_A> )
 *    = Integral( Im(conj(D1 u) D2 u) - m * phi ) dvol.
 *  Depends on the connection only through discretization defects. */
double topological_R(const Surface& S, const GaugeConfig& cfg, const ActionData& act);

/** Gauge action gamma * (A, u) = (A + gamma^{-1} d gamma, gamma^a u):
 *  alpha' = alpha + d psi, u' = exp(i a psi) u, N unchanged. */
GaugeConfig gauge_apply(const Surface& S, const GaugeTransform& g, const GaugeConfig& cfg,
                        const ActionData& act);

/** The correspondence (theta, f) -> (-a theta, a f) onto the associated
 *  line-bundle picture; the background degree maps N -> -a N. */
GaugeConfig psi_map(const GaugeConfig& cfg, const ActionData& act);

/** Gauge action on the associated-bundle side: (B, f) * g =
 *  (B + g^{-1} dg, g^{-1} f), i.e. alpha' = alpha + d psi, f' = exp(-i psi) f. */
GaugeConfig kahler_gauge_apply(const Surface& S, const GaugeTransform& g, const GaugeConfig& cfg);

/** First-order residuals with norms.  r1 is the component field of the
 *  antiholomorphic derivative (second frame component omitted, it is -i r1);
 *  r2 is the real coefficient of the imaginary-valued curvature equation. */
struct Residual {
    ComplexField r1;
    ScalarField r2;
    double r1_l2 = 0, r1_sup = 0;
    double r2_l2 = 0, r2_sup = 0;
};

/** r1 = dbar_A u,  r2 = *F_A + eps^{-2} (i/2)(a|u|^2 - tau), as the real
 *  field phi + eps^{-2} m. */
Residual sve_residual(const Surface& S, const GaugeConfig& cfg, const ActionData& act,
                      double eps = 1.0);

/** Residuals of the associated-bundle system for a configuration (B, f, N):
 *  r1 = dbar_B f with d_B f = df + B f,  r2 = *F_B + eps^{-2} (i/2)(a tau - |f|^2).
 *  Under psi_map these transport exactly: r1 -> a r1, r2 -> -a r2. */
Residual kahler_residual(const Surface& S, const GaugeConfig& cfg, const ActionData& act,
                         double eps = 1.0);

struct HolomorphicDefect {
    double dbar_norm = 0; // L2 norm of dbar_A u (form norm)
    double mu_norm = 0;   // L2 norm of mu(u)
};

/** Defect norms of the limiting system dbar_A u = 0, mu(u) = 0. */
HolomorphicDefect pseudoholomorphic_residual(const Surface& S, const GaugeConfig& cfg,
                                             const ActionData& act);

} // namespace orbivortex::fields
