#pragma once

#include <complex>
#include <memory>
#include <string>
#include <vector>

namespace orbivortex {

using ScalarField = std::vector<double>;
using ComplexField = std::vector<std::complex<double>>;

/** Real 1-form given by its components against the oriented orthonormal
 * frame (e1, e2) of the surface. Imaginary-valued forms (connections) are
 * stored by their imaginary parts, i.e. alpha = i*(c1 e^1 + c2 e^2). */
struct OneForm {
    ScalarField c1, c2;
};

struct ComplexOneForm {
    ComplexField c1, c2;
};

/** 2-form written as coeff * dvol. Imaginary-valued densities (curvature)
 * are stored by the imaginary part of the coefficient. */
struct TwoFormDensity {
    ScalarField coeff;
};

enum class SurfaceKind { torus, football };

/** Discretized compact surface: a flat torus R^2/(L1 Z x L2 Z) on a uniform
 * n x n grid with spectral calculus, or a football orbifold S^2(m,m) =
 * [S^2/(Z/m)] stored on the covering sphere's latitude-longitude grid
 * (cell-centered in colatitude, no pole nodes). Quadrature weights are exact
 * cell areas divided by m, so they sum to the orbifold volume exactly.
 * All operations are const and safe to call concurrently. */
class Surface {
  public:
    /** Flat torus with periods (L1, L2); n nodes per direction, n a power of
     * two >= 16. Node (i1, i2) sits at (i1*L1/n, i2*L2/n). */
    static Surface torus(double L1, double L2, int n);

    /** Football with cone order m >= 1 (m = 1 is the smooth round sphere).
     * n_theta colatitude rows at theta_i = (i+1/2)*pi/n_theta, n_phi
     * azimuthal columns; n_phi must be even and divisible by m. */
    static Surface football(int m, int n_theta, int n_phi);

    SurfaceKind kind() const { return kind_; }
    int cone_order() const { return m_; }
    int n1() const { return n1_; }
    int n2() const { return n2_; }
    int size() const { return n1_ * n2_; }
    double vol() const { return vol_; }
    /** Representative grid spacing (max of the two directions' node
     * spacings; the colatitude spacing for footballs). */
    double spacing() const { return h_; }

    int index(int i1, int i2) const { return i1 * n2_ + i2; }
    /** First chart coordinate of a node: x on the torus, colatitude theta
     * on the football covering sphere. */
    double coord1(int node) const;
    /** Second chart coordinate: y, or azimuth phi. */
    double coord2(int node) const;
    double weight(int node) const;
    const ScalarField& weights() const { return w_; }

    ScalarField zeros() const { return ScalarField(size(), 0.0); }
    ComplexField czeros() const { return ComplexField(size(), 0.0); }

    /** Quadrature of f against the orbifold volume form. Throws on
     * non-finite entries or size mismatch. */
    double integrate(const ScalarField& f) const;
    std::complex<double> integrate(const ComplexField& f) const;
    double mean(const ScalarField& f) const { return integrate(f) / vol_; }
    /** L2 norm sqrt(integral of f^2). */
    double norm_l2(const ScalarField& f) const;
    double norm_l2(const ComplexField& f) const;

    /** Laplace-Beltrami operator, geometer's sign (int f*lap(f) <= 0).
     * Torus: exact Fourier symbol -|k|^2. Football: conservative
     * second-order colatitude differences (pole fluxes vanish structurally)
     * with spectral azimuthal derivatives. Exactly self-adjoint in the
     * quadrature inner product; integrates to zero exactly. */
    ScalarField laplacian(const ScalarField& f) const;

    /** Discrete Green function: lap(G_p) = delta_p - 1/vol in the weak
     * sense, int G_p = 0. On footballs delta_p is the orbifold delta, so
     * G_p is the Z/m-orbit sum of covering Green functions. */
    ScalarField green(int node) const;

    /** Solves (lap - sigma) g = f exactly for the discrete operator,
     * sigma >= 0. For sigma = 0, f is projected onto mean zero and the
     * mean-zero solution is returned. */
    ScalarField helmholtz_inverse(const ScalarField& f, double sigma) const;

    /** Gradient components against the orthonormal frame (e1, e2):
     * (d/dx, d/dy) spectral on the torus; (d/dtheta, (1/sin)d/dphi) on the
     * football, centered colatitude differences closed through the poles. */
    void grad(const ScalarField& f, ScalarField& d1, ScalarField& d2) const;
    void grad(const ComplexField& f, ComplexField& d1, ComplexField& d2) const;

    /** Hodge dual of the exterior derivative of a real 1-form, *(d a).
     * Conservative: the quadrature sum of the result vanishes exactly. */
    ScalarField star_curl(const OneForm& a) const;

    /** Torus only: evaluate sum_k hat[k] exp(i k.x) at the nodes, with hat
     * in FFT index layout (row-major; frequency idx, or idx - n past the
     * Nyquist index). Used for resolution-consistent field synthesis. */
    ComplexField torus_synthesis(const ComplexField& hat) const;

    /** Projector onto declared Z/m-equivariant fields: azimuthal Fourier
     * support on m*Z. Identity on the torus and for m = 1. Idempotent and
     * integral-preserving. */
    ScalarField project_invariant(const ScalarField& f) const;
    ComplexField project_invariant(const ComplexField& f) const;
    /** sup norm of f minus its equivariant projection. */
    double equivariance_defect(const ScalarField& f) const;
    double equivariance_defect(const ComplexField& f) const;

    /** Nearest grid node to a chart point; optionally reports the snap
     * distance (periodic metric on the torus, central angle on spheres). */
    int nearest_node(double c1, double c2, double* snap_dist = nullptr) const;
    /** Geodesic-type distance from a node to a chart point. */
    double distance(int node, double c1, double c2) const;
    /** Z/m orbit of a node under the deck rotation (m nodes, possibly with
     * repeats at nothing; the torus orbit is the node itself). */
    std::vector<int> orbit_nodes(int node) const;

  private:
    Surface() = default;
    struct Engine;

    SurfaceKind kind_ = SurfaceKind::torus;
    int m_ = 1;
    int n1_ = 0, n2_ = 0;
    double L1_ = 0, L2_ = 0; // torus periods
    double vol_ = 0, h_ = 0;
    ScalarField w_;              // orbifold quadrature weights per node
    std::vector<double> theta_;  // row colatitudes (football)
    std::vector<double> sin_c_;  // sin(theta) at centers
    std::vector<double> sin_e_;  // sin at edges, size n1+1 (0 at poles)
    std::vector<double> mcell_;  // cos(edge_i) - cos(edge_{i+1})
    std::vector<double> k1_, k2_; // torus wavenumbers / azimuthal symbols
    std::shared_ptr<const Engine> eng_;

    void check(const ScalarField& f, const char* who) const;
    void check(const ComplexField& f, const char* who) const;
    ComplexField fft2(const ComplexField& f, bool forward) const;
    void row_fft(std::complex<double>* row, bool forward) const;
    ComplexField to_modes_rows(const ComplexField& f) const;
    ComplexField from_modes_rows(const ComplexField& f) const;
    ScalarField sphere_mode_solve(const ScalarField& rhs, double sigma) const;
    ScalarField sphere_laplacian(const ScalarField& f) const;
};

std::string kind_name(SurfaceKind k);

} // namespace orbivortex
