#include "orbivortex/sampling.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace orbivortex::sampling {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double u01(std::uint64_t h) { return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53; }

std::uint64_t mode_key(std::uint64_t seed, int f1, int f2, std::uint64_t channel) {
    std::uint64_t h = splitmix(seed ^ 0x6f72626976ULL);
    h = splitmix(h ^ static_cast<std::uint64_t>(static_cast<std::int64_t>(f1) + (1 << 24)));
    h = splitmix(h ^ static_cast<std::uint64_t>(static_cast<std::int64_t>(f2) + (1 << 25)));
    return splitmix(h ^ channel);
}

/** Standard normal pair hashed from a key. */
void gauss_pair(std::uint64_t key, double& z1, double& z2) {
    double a = u01(splitmix(key ^ 0x11)), b = u01(splitmix(key ^ 0x22));
    double r = std::sqrt(-2.0 * std::log(a));
    z1 = r * std::cos(2.0 * std::numbers::pi * b);
    z2 = r * std::sin(2.0 * std::numbers::pi * b);
}

ComplexField torus_field(const Surface& S, std::uint64_t seed, const FieldSpec& spec,
                         bool real_valued, std::uint64_t channel) {
    int n1 = S.n1(), n2 = S.n2();
    int kmax1 = spec.tail_power > 0 ? n1 / 2 - 1 : std::min(spec.max_mode, n1 / 2 - 1);
    int kmax2 = spec.tail_power > 0 ? n2 / 2 - 1 : std::min(spec.max_mode, n2 / 2 - 1);
    ComplexField hat(static_cast<std::size_t>(n1) * n2, 0.0);
    auto slot = [&](int f1, int f2) -> std::complex<double>& {
        int i1 = f1 >= 0 ? f1 : f1 + n1;
        int i2 = f2 >= 0 ? f2 : f2 + n2;
        return hat[static_cast<std::size_t>(S.index(i1, i2))];
    };
    auto decay = [&](int f1, int f2) {
        return spec.tail_power > 0
                   ? std::pow(1.0 + double(f1) * f1 + double(f2) * f2,
                              -0.5 * spec.tail_power)
                   : 1.0;
    };
    // normalize so the field's expected node variance is amplitude^2; the
    // normalization must not depend on the grid's Nyquist, or refinement
    // would rescale the underlying field, so sum the decay profile over a
    // fixed resolution-independent window
    double var = 0.0;
    for (int f1 = -512; f1 <= 512; ++f1)
        for (int f2 = -512; f2 <= 512; ++f2) {
            if (spec.zero_mean && f1 == 0 && f2 == 0) continue;
            if (spec.tail_power <= 0 &&
                (std::abs(f1) > spec.max_mode || std::abs(f2) > spec.max_mode))
                continue;
            double d = decay(f1, f2);
            var += d * d;
        }
    double scale = var > 0 ? spec.amplitude / std::sqrt(var) : 0.0;
    for (int f1 = -kmax1; f1 <= kmax1; ++f1)
        for (int f2 = -kmax2; f2 <= kmax2; ++f2) {
            if (spec.zero_mean && f1 == 0 && f2 == 0) continue;
            if (real_valued) {
                // populate the canonical half plane; mirror by conjugation
                bool canonical = f1 > 0 || (f1 == 0 && f2 > 0) || (f1 == 0 && f2 == 0);
                if (!canonical) continue;
            }
            double prof = scale * decay(f1, f2);
            double z1, z2;
            gauss_pair(mode_key(seed, f1, f2, channel), z1, z2);
            if (real_valued && f1 == 0 && f2 == 0) {
                slot(0, 0) = prof * z1;
            } else if (real_valued) {
                std::complex<double> c(0.5 * prof * z1, 0.5 * prof * z2);
                slot(f1, f2) = c;
                slot(-f1, -f2) = std::conj(c);
            } else {
                slot(f1, f2) = std::complex<double>(prof * z1, prof * z2) / std::sqrt(2.0);
            }
        }
    return S.torus_synthesis(hat);
}

/** Smooth deterministic fields on the covering sphere, built from the
 *  polynomial basis (sin th)^{|k|} (cos th)^j e^{i k phi} (restrictions of
 *  polynomials on R^3, hence smooth across the poles).  On a football only
 *  azimuthal modes divisible by the cone order are used, so samples are
 *  exactly equivariant. */
ComplexField sphere_field(const Surface& S, std::uint64_t seed, const FieldSpec& spec,
                          bool real_valued, std::uint64_t channel) {
    int m = S.cone_order();
    int kmax = std::max(1, spec.max_mode);
    int jmax = kmax;
    ComplexField out(S.size(), 0.0);
    double var = 0.0;
    for (int k = -kmax; k <= kmax; ++k) {
        if (k % m != 0) continue;
        for (int j = 0; j <= jmax; ++j) {
            if (spec.zero_mean && k == 0 && j == 0) continue;
            if (real_valued && k < 0) continue;
            double d = 1.0 / ((1.0 + std::abs(k) + j) * (1.0 + std::abs(k) + j));
            var += d * d;
        }
    }
    double norm = var > 0 ? spec.amplitude / std::sqrt(var) : 0.0;
    for (int k = -kmax; k <= kmax; ++k) {
        if (k % m != 0) continue;
        for (int j = 0; j <= jmax; ++j) {
            if (spec.zero_mean && k == 0 && j == 0) continue;
            if (real_valued && !(k > 0 || (k == 0))) continue;
            double prof = norm /
                          ((1.0 + std::abs(k) + j) * (1.0 + std::abs(k) + j));
            double z1, z2;
            gauss_pair(mode_key(seed, j, k, channel), z1, z2);
            std::complex<double> c(prof * z1, prof * z2);
            if (real_valued && k == 0) c = std::complex<double>(prof * z1, 0.0);
            for (int node = 0; node < S.size(); ++node) {
                double th = S.coord1(node), ph = S.coord2(node);
                double shape = std::pow(std::sin(th), std::abs(k)) *
                               std::pow(std::cos(th), j);
                std::complex<double> term =
                    c * std::polar(shape, k * ph);
                // real fields pair +k with its conjugate mode
                if (real_valued && k > 0) term += std::conj(term);
                out[node] += term;
            }
        }
    }
    if (real_valued)
        for (auto& v : out) v = std::complex<double>(v.real(), 0.0);
    return out;
}

ComplexField sample(const Surface& S, std::uint64_t seed, const FieldSpec& spec,
                    bool real_valued, std::uint64_t channel) {
    if (!(spec.amplitude >= 0) || spec.max_mode < 0)
        throw std::invalid_argument("sampling: bad field spec");
    if (S.kind() == SurfaceKind::torus)
        return torus_field(S, seed, spec, real_valued, channel);
    return sphere_field(S, seed, spec, real_valued, channel);
}

} // namespace

ScalarField random_scalar(const Surface& S, std::uint64_t seed, const FieldSpec& spec) {
    ComplexField c = sample(S, seed, spec, true, 0x5ca1a5ULL);
    ScalarField f(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) f[i] = c[i].real();
    return f;
}

ComplexField random_complex(const Surface& S, std::uint64_t seed, const FieldSpec& spec) {
    return sample(S, seed, spec, false, 0xc0331ULL);
}

fields::GaugeConfig random_config(const Surface& S, std::uint64_t seed, const FieldSpec& conn,
                                  const FieldSpec& sect, long long N) {
    fields::GaugeConfig cfg;
    cfg.alpha.c1 = random_scalar(S, splitmix(seed ^ 0xa1), conn);
    cfg.alpha.c2 = random_scalar(S, splitmix(seed ^ 0xa2), conn);
    cfg.u = random_complex(S, splitmix(seed ^ 0x5e), sect);
    cfg.N = N;
    return cfg;
}

fields::GaugeTransform random_transform(const Surface& S, std::uint64_t seed,
                                        const FieldSpec& spec) {
    fields::GaugeTransform g;
    g.psi = random_scalar(S, splitmix(seed ^ 0x9a), spec);
    return g;
}

} // namespace orbivortex::sampling
