#include "orbivortex/surface.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace orbivortex {

namespace {
constexpr double pi = std::numbers::pi;

// FFTW's planner is not thread safe; executing a plan on fresh arrays is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

fftw_complex* fc(std::complex<double>* p) { return reinterpret_cast<fftw_complex*>(p); }

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }
} // namespace

struct Surface::Engine {
    fftw_plan p2f = nullptr, p2b = nullptr; // torus 2d transforms
    fftw_plan p1f = nullptr, p1b = nullptr; // sphere azimuthal rows
    ~Engine() {
        std::lock_guard<std::mutex> lk(planner_mutex());
        for (fftw_plan p : {p2f, p2b, p1f, p1b})
            if (p) fftw_destroy_plan(p);
    }
};

std::string kind_name(SurfaceKind k) {
    return k == SurfaceKind::torus ? "torus" : "football";
}

Surface Surface::torus(double L1, double L2, int n) {
    if (!(L1 > 0) || !(L2 > 0))
        throw std::invalid_argument("torus: periods must be positive");
    if (!power_of_two(n) || n < 16)
        throw std::invalid_argument("torus: resolution must be a power of two >= 16");
    Surface s;
    s.kind_ = SurfaceKind::torus;
    s.m_ = 1;
    s.n1_ = s.n2_ = n;
    s.L1_ = L1;
    s.L2_ = L2;
    s.vol_ = L1 * L2;
    s.h_ = std::max(L1, L2) / n;
    s.w_.assign(static_cast<size_t>(n) * n, L1 * L2 / (double(n) * n));
    s.k1_.resize(n);
    s.k2_.resize(n);
    for (int i = 0; i < n; ++i) {
        int f = i <= n / 2 ? i : i - n;
        s.k1_[i] = 2 * pi * f / L1;
        s.k2_[i] = 2 * pi * f / L2;
    }
    auto eng = std::make_shared<Engine>();
    {
        std::lock_guard<std::mutex> lk(planner_mutex());
        ComplexField a(s.size()), b(s.size());
        unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        eng->p2f = fftw_plan_dft_2d(n, n, fc(a.data()), fc(b.data()), FFTW_FORWARD, flags);
        eng->p2b = fftw_plan_dft_2d(n, n, fc(a.data()), fc(b.data()), FFTW_BACKWARD, flags);
    }
    s.eng_ = std::move(eng);
    return s;
}

Surface Surface::football(int m, int n_theta, int n_phi) {
    if (m < 1) throw std::invalid_argument("football: cone order must be >= 1");
    if (n_theta < 8 || n_phi < 8)
        throw std::invalid_argument("football: grid must be at least 8 x 8");
    if (n_phi % m != 0)
        throw std::invalid_argument("football: n_phi must be divisible by m");
    if (n_phi % 2 != 0)
        throw std::invalid_argument("football: n_phi must be even");
    Surface s;
    s.kind_ = SurfaceKind::football;
    s.m_ = m;
    s.n1_ = n_theta;
    s.n2_ = n_phi;
    s.vol_ = 4 * pi / m;
    double dth = pi / n_theta, dph = 2 * pi / n_phi;
    s.h_ = std::max(dth, dph);
    s.theta_.resize(n_theta);
    s.sin_c_.resize(n_theta);
    s.sin_e_.resize(n_theta + 1);
    s.mcell_.resize(n_theta);
    for (int i = 0; i <= n_theta; ++i) s.sin_e_[i] = std::sin(i * dth);
    s.sin_e_[0] = s.sin_e_[n_theta] = 0.0;
    for (int i = 0; i < n_theta; ++i) {
        s.theta_[i] = (i + 0.5) * dth;
        s.sin_c_[i] = std::sin(s.theta_[i]);
        s.mcell_[i] = std::cos(i * dth) - std::cos((i + 1) * dth);
    }
    s.w_.resize(s.size());
    for (int i = 0; i < n_theta; ++i)
        for (int j = 0; j < n_phi; ++j)
            s.w_[s.index(i, j)] = s.mcell_[i] * dph / m;
    s.k2_.resize(n_phi);
    for (int j = 0; j < n_phi; ++j)
        s.k2_[j] = j <= n_phi / 2 ? j : j - n_phi;
    auto eng = std::make_shared<Engine>();
    {
        std::lock_guard<std::mutex> lk(planner_mutex());
        ComplexField a(n_phi), b(n_phi);
        unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        eng->p1f = fftw_plan_dft_1d(n_phi, fc(a.data()), fc(b.data()), FFTW_FORWARD, flags);
        eng->p1b = fftw_plan_dft_1d(n_phi, fc(a.data()), fc(b.data()), FFTW_BACKWARD, flags);
    }
    s.eng_ = std::move(eng);
    return s;
}

double Surface::coord1(int node) const {
    int i = node / n2_;
    return kind_ == SurfaceKind::torus ? i * L1_ / n1_ : theta_[i];
}

double Surface::coord2(int node) const {
    int j = node % n2_;
    return kind_ == SurfaceKind::torus ? j * L2_ / n2_ : j * 2 * pi / n2_;
}

double Surface::weight(int node) const { return w_[node]; }

void Surface::check(const ScalarField& f, const char* who) const {
    if (static_cast<int>(f.size()) != size())
        throw std::invalid_argument(std::string(who) + ": field size mismatch");
    for (double v : f)
        if (!std::isfinite(v))
            throw std::invalid_argument(std::string(who) + ": non-finite field value");
}

void Surface::check(const ComplexField& f, const char* who) const {
    if (static_cast<int>(f.size()) != size())
        throw std::invalid_argument(std::string(who) + ": field size mismatch");
    for (const auto& v : f)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw std::invalid_argument(std::string(who) + ": non-finite field value");
}

double Surface::integrate(const ScalarField& f) const {
    check(f, "integrate");
    double s = 0;
    for (int i = 0; i < size(); ++i) s += w_[i] * f[i];
    return s;
}

std::complex<double> Surface::integrate(const ComplexField& f) const {
    check(f, "integrate");
    std::complex<double> s = 0;
    for (int i = 0; i < size(); ++i) s += w_[i] * f[i];
    return s;
}

double Surface::norm_l2(const ScalarField& f) const {
    double s = 0;
    for (int i = 0; i < size(); ++i) s += w_[i] * f[i] * f[i];
    return std::sqrt(s);
}

double Surface::norm_l2(const ComplexField& f) const {
    double s = 0;
    for (int i = 0; i < size(); ++i) s += w_[i] * std::norm(f[i]);
    return std::sqrt(s);
}

ComplexField Surface::fft2(const ComplexField& f, bool forward) const {
    ComplexField in(f), out(f.size());
    fftw_execute_dft(forward ? eng_->p2f : eng_->p2b,
                     fc(in.data()), fc(out.data()));
    if (!forward) {
        double s = 1.0 / size();
        for (auto& v : out) v *= s;
    }
    return out;
}

void Surface::row_fft(std::complex<double>* row, bool forward) const {
    ComplexField tmp(n2_);
    fftw_execute_dft(forward ? eng_->p1f : eng_->p1b, fc(row), fc(tmp.data()));
    if (!forward) {
        double s = 1.0 / n2_;
        for (auto& v : tmp) v *= s;
    }
    std::copy(tmp.begin(), tmp.end(), row);
}

ComplexField Surface::to_modes_rows(const ComplexField& f) const {
    ComplexField g(f);
    for (int i = 0; i < n1_; ++i) row_fft(g.data() + index(i, 0), true);
    return g;
}

ComplexField Surface::from_modes_rows(const ComplexField& f) const {
    ComplexField g(f);
    for (int i = 0; i < n1_; ++i) row_fft(g.data() + index(i, 0), false);
    return g;
}

ComplexField Surface::torus_synthesis(const ComplexField& hat) const {
    if (kind_ != SurfaceKind::torus)
        throw std::invalid_argument("torus_synthesis: torus surfaces only");
    check(hat, "torus_synthesis");
    ComplexField out = fft2(hat, false);
    for (auto& v : out) v *= static_cast<double>(size());
    return out;
}

ScalarField Surface::sphere_laplacian(const ScalarField& f) const {
    int nt = n1_, np = n2_;
    double dth = pi / nt;
    ScalarField out(size(), 0.0);
    // conservative colatitude part; pole fluxes vanish with sin_e_
    for (int i = 0; i < nt; ++i) {
        double up = sin_e_[i + 1] / (mcell_[i] * dth);
        double dn = sin_e_[i] / (mcell_[i] * dth);
        for (int j = 0; j < np; ++j) {
            double fu = i + 1 < nt ? f[index(i + 1, j)] : f[index(i, j)];
            double fd = i > 0 ? f[index(i - 1, j)] : f[index(i, j)];
            double fc_ = f[index(i, j)];
            out[index(i, j)] = up * (fu - fc_) - dn * (fc_ - fd);
        }
    }
    // spectral azimuthal part
    ComplexField g(size());
    for (int i = 0; i < size(); ++i) g[i] = f[i];
    g = to_modes_rows(g);
    for (int i = 0; i < nt; ++i) {
        double is2 = 1.0 / (sin_c_[i] * sin_c_[i]);
        for (int j = 0; j < np; ++j)
            g[index(i, j)] *= -k2_[j] * k2_[j] * is2;
    }
    g = from_modes_rows(g);
    for (int i = 0; i < size(); ++i) out[i] += g[i].real();
    return out;
}

ScalarField Surface::laplacian(const ScalarField& f) const {
    if (static_cast<int>(f.size()) != size())
        throw std::invalid_argument("laplacian: field size mismatch");
    if (kind_ == SurfaceKind::football) return sphere_laplacian(f);
    ComplexField g(size());
    for (int i = 0; i < size(); ++i) g[i] = f[i];
    g = fft2(g, true);
    for (int i1 = 0; i1 < n1_; ++i1)
        for (int i2 = 0; i2 < n2_; ++i2)
            g[index(i1, i2)] *= -(k1_[i1] * k1_[i1] + k2_[i2] * k2_[i2]);
    g = fft2(g, false);
    ScalarField out(size());
    for (int i = 0; i < size(); ++i) out[i] = g[i].real();
    return out;
}

/** Symmetric tridiagonal solve of the colatitude operator for one azimuthal
 * mode. Rows are scaled by the cell measure M_i, which makes the matrix
 * symmetric; for the singular (k = 0, sigma = 0) mode the solution is pinned
 * at the first row after projecting the rhs onto mean zero. */
ScalarField Surface::sphere_mode_solve(const ScalarField& rhs, double sigma) const {
    int nt = n1_, np = n2_;
    double dth = pi / nt;
    ComplexField g(size());
    for (int i = 0; i < size(); ++i) g[i] = rhs[i];
    g = to_modes_rows(g);

    std::vector<double> diag(nt), sub(nt);
    ComplexField r(nt), x(nt);
    for (int j = 0; j < np; ++j) {
        double kk = k2_[j] * k2_[j];
        bool singular = (k2_[j] == 0 && sigma == 0.0);
        for (int i = 0; i < nt; ++i) {
            double is2 = kk / (sin_c_[i] * sin_c_[i]);
            diag[i] = -(sin_e_[i] + sin_e_[i + 1]) / dth - mcell_[i] * (is2 + sigma);
            sub[i] = sin_e_[i] / dth; // couples rows i-1 and i
            r[i] = mcell_[i] * g[index(i, j)];
        }
        int lo = 0;
        if (singular) {
            // remove the weighted mean, then pin x[0] = 0
            std::complex<double> mn = 0;
            for (int i = 0; i < nt; ++i) mn += r[i];
            mn /= 2.0; // sum of mcell_ = 2
            for (int i = 0; i < nt; ++i) r[i] -= mcell_[i] * mn;
            x[0] = 0;
            lo = 1;
        }
        // Thomas elimination on rows [lo, nt)
        std::vector<double> cp(nt);
        ComplexField dp(nt);
        double b0 = diag[lo];
        cp[lo] = sub[lo + 1] / b0;
        dp[lo] = r[lo] / b0;
        for (int i = lo + 1; i < nt; ++i) {
            double a = sub[i];
            double den = diag[i] - a * cp[i - 1];
            if (i + 1 < nt) cp[i] = sub[i + 1] / den;
            dp[i] = (r[i] - a * dp[i - 1]) / den;
        }
        x[nt - 1] = dp[nt - 1];
        for (int i = nt - 2; i >= lo; --i) x[i] = dp[i] - cp[i] * x[i + 1];
        for (int i = 0; i < nt; ++i) g[index(i, j)] = x[i];
    }
    g = from_modes_rows(g);
    ScalarField out(size());
    for (int i = 0; i < size(); ++i) out[i] = g[i].real();
    if (sigma == 0.0) {
        double mn = mean(out);
        for (auto& v : out) v -= mn;
    }
    return out;
}

ScalarField Surface::helmholtz_inverse(const ScalarField& f, double sigma) const {
    if (static_cast<int>(f.size()) != size())
        throw std::invalid_argument("helmholtz_inverse: field size mismatch");
    if (sigma < 0) throw std::invalid_argument("helmholtz_inverse: sigma must be >= 0");
    if (kind_ == SurfaceKind::football) return sphere_mode_solve(f, sigma);
    ComplexField g(size());
    for (int i = 0; i < size(); ++i) g[i] = f[i];
    g = fft2(g, true);
    for (int i1 = 0; i1 < n1_; ++i1)
        for (int i2 = 0; i2 < n2_; ++i2) {
            double den = -(k1_[i1] * k1_[i1] + k2_[i2] * k2_[i2]) - sigma;
            auto& v = g[index(i1, i2)];
            v = den == 0.0 ? 0.0 : v / den;
        }
    g = fft2(g, false);
    ScalarField out(size());
    for (int i = 0; i < size(); ++i) out[i] = g[i].real();
    return out;
}

ScalarField Surface::green(int node) const {
    if (node < 0 || node >= size()) throw std::invalid_argument("green: bad node");
    ScalarField rhs(size(), -1.0 / vol_);
    for (int q : orbit_nodes(node)) rhs[q] += 1.0 / (m_ * w_[q]);
    return helmholtz_inverse(rhs, 0.0);
}

namespace {
/** Torus spectral first derivative along one axis; the Nyquist mode is
 * zeroed so real fields keep real derivatives. */
void torus_derivative_modes(ComplexField& g, const Surface& s, int axis,
                            const std::vector<double>& k, int n) {
    for (int i1 = 0; i1 < s.n1(); ++i1)
        for (int i2 = 0; i2 < s.n2(); ++i2) {
            int idx = axis == 0 ? i1 : i2;
            double kk = (idx == n / 2) ? 0.0 : k[idx];
            g[s.index(i1, i2)] *= std::complex<double>(0.0, kk);
        }
}
} // namespace

void Surface::grad(const ComplexField& f, ComplexField& d1, ComplexField& d2) const {
    if (static_cast<int>(f.size()) != size())
        throw std::invalid_argument("grad: field size mismatch");
    if (kind_ == SurfaceKind::torus) {
        ComplexField g = fft2(f, true);
        ComplexField g1(g), g2(g);
        torus_derivative_modes(g1, *this, 0, k1_, n1_);
        torus_derivative_modes(g2, *this, 1, k2_, n2_);
        d1 = fft2(g1, false);
        d2 = fft2(g2, false);
        return;
    }
    int nt = n1_, np = n2_, half = np / 2;
    double dth = pi / nt;
    d1.assign(size(), 0.0);
    d2.assign(size(), 0.0);
    // centered colatitude differences, closed through the poles by the
    // smooth continuation f(-theta, phi) = f(theta, phi + pi)
    for (int i = 0; i < nt; ++i)
        for (int j = 0; j < np; ++j) {
            std::complex<double> fu = i + 1 < nt ? f[index(i + 1, j)]
                                                 : f[index(nt - 1, (j + half) % np)];
            std::complex<double> fd = i > 0 ? f[index(i - 1, j)]
                                            : f[index(0, (j + half) % np)];
            d1[index(i, j)] = (fu - fd) / (2 * dth);
        }
    ComplexField g = to_modes_rows(f);
    for (int i = 0; i < nt; ++i)
        for (int j = 0; j < np; ++j) {
            double kk = (j == half) ? 0.0 : k2_[j];
            g[index(i, j)] *= std::complex<double>(0.0, kk);
        }
    g = from_modes_rows(g);
    for (int i = 0; i < nt; ++i) {
        double is = 1.0 / sin_c_[i];
        for (int j = 0; j < np; ++j) d2[index(i, j)] = g[index(i, j)] * is;
    }
}

void Surface::grad(const ScalarField& f, ScalarField& d1, ScalarField& d2) const {
    ComplexField g(size()), g1, g2;
    for (int i = 0; i < size(); ++i) g[i] = f[i];
    grad(g, g1, g2);
    d1.resize(size());
    d2.resize(size());
    for (int i = 0; i < size(); ++i) {
        d1[i] = g1[i].real();
        d2[i] = g2[i].real();
    }
}

ScalarField Surface::star_curl(const OneForm& a) const {
    if (static_cast<int>(a.c1.size()) != size() ||
        static_cast<int>(a.c2.size()) != size())
        throw std::invalid_argument("star_curl: component size mismatch");
    if (kind_ == SurfaceKind::torus) {
        ScalarField d11, d12, d21, d22;
        grad(a.c2, d21, d22);
        grad(a.c1, d11, d12);
        ScalarField out(size());
        for (int i = 0; i < size(); ++i) out[i] = d21[i] - d12[i];
        return out;
    }
    int nt = n1_, np = n2_;
    double dth = pi / nt;
    // flux form: *(da) integrates to zero exactly (poles carry no flux)
    ScalarField out(size(), 0.0);
    for (int i = 0; i < nt; ++i)
        for (int j = 0; j < np; ++j) {
            double fu = i + 1 < nt
                            ? sin_e_[i + 1] * 0.5 * (a.c2[index(i, j)] + a.c2[index(i + 1, j)])
                            : 0.0;
            double fd = i > 0
                            ? sin_e_[i] * 0.5 * (a.c2[index(i - 1, j)] + a.c2[index(i, j)])
                            : 0.0;
            out[index(i, j)] = (fu - fd) / mcell_[i];
        }
    ComplexField g(size());
    for (int i = 0; i < size(); ++i) g[i] = a.c1[i];
    g = to_modes_rows(g);
    for (int i = 0; i < nt; ++i)
        for (int j = 0; j < np; ++j) {
            double kk = (j == np / 2) ? 0.0 : k2_[j];
            g[index(i, j)] *= std::complex<double>(0.0, kk);
        }
    g = from_modes_rows(g);
    for (int i = 0; i < nt; ++i)
        for (int j = 0; j < np; ++j)
            out[index(i, j)] -= dth / mcell_[i] * g[index(i, j)].real();
    return out;
}

ComplexField Surface::project_invariant(const ComplexField& f) const {
    if (static_cast<int>(f.size()) != size())
        throw std::invalid_argument("project_invariant: field size mismatch");
    if (kind_ == SurfaceKind::torus || m_ == 1) return f;
    ComplexField g = to_modes_rows(f);
    for (int i = 0; i < n1_; ++i)
        for (int j = 0; j < n2_; ++j)
            if (j % m_ != 0) g[index(i, j)] = 0.0;
    return from_modes_rows(g);
}

ScalarField Surface::project_invariant(const ScalarField& f) const {
    if (kind_ == SurfaceKind::torus || m_ == 1) {
        if (static_cast<int>(f.size()) != size())
            throw std::invalid_argument("project_invariant: field size mismatch");
        return f;
    }
    ComplexField g(size());
    for (int i = 0; i < size(); ++i) g[i] = f[i];
    g = project_invariant(g);
    ScalarField out(size());
    for (int i = 0; i < size(); ++i) out[i] = g[i].real();
    return out;
}

double Surface::equivariance_defect(const ScalarField& f) const {
    ScalarField p = project_invariant(f);
    double d = 0;
    for (int i = 0; i < size(); ++i) d = std::max(d, std::abs(f[i] - p[i]));
    return d;
}

double Surface::equivariance_defect(const ComplexField& f) const {
    ComplexField p = project_invariant(f);
    double d = 0;
    for (int i = 0; i < size(); ++i) d = std::max(d, std::abs(f[i] - p[i]));
    return d;
}

int Surface::nearest_node(double c1, double c2, double* snap_dist) const {
    int i, j;
    if (kind_ == SurfaceKind::torus) {
        double x = c1 - L1_ * std::floor(c1 / L1_);
        double y = c2 - L2_ * std::floor(c2 / L2_);
        i = static_cast<int>(std::lround(x / L1_ * n1_)) % n1_;
        j = static_cast<int>(std::lround(y / L2_ * n2_)) % n2_;
    } else {
        if (!(c1 >= 0 && c1 <= pi))
            throw std::invalid_argument("nearest_node: colatitude outside [0, pi]");
        double dth = pi / n1_;
        i = std::clamp(static_cast<int>(std::lround(c1 / dth - 0.5)), 0, n1_ - 1);
        double p = c2 - 2 * pi * std::floor(c2 / (2 * pi));
        j = static_cast<int>(std::lround(p / (2 * pi) * n2_)) % n2_;
    }
    int node = index(i, j);
    if (snap_dist) *snap_dist = distance(node, c1, c2);
    return node;
}

double Surface::distance(int node, double c1, double c2) const {
    if (kind_ == SurfaceKind::torus) {
        double dx = std::remainder(coord1(node) - c1, L1_);
        double dy = std::remainder(coord2(node) - c2, L2_);
        return std::hypot(dx, dy);
    }
    double t1 = coord1(node), p1 = coord2(node);
    double dot = std::sin(t1) * std::sin(c1) * std::cos(p1 - c2) +
                 std::cos(t1) * std::cos(c1);
    return std::acos(std::clamp(dot, -1.0, 1.0));
}

std::vector<int> Surface::orbit_nodes(int node) const {
    if (kind_ == SurfaceKind::torus || m_ == 1) return {node};
    int i = node / n2_, j = node % n2_, step = n2_ / m_;
    std::vector<int> out(m_);
    for (int k = 0; k < m_; ++k) out[k] = index(i, (j + k * step) % n2_);
    return out;
}

} // namespace orbivortex
