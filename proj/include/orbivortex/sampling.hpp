#pragma once

#include "orbivortex/fields.hpp"

#include <cstdint>

namespace orbivortex::sampling {

/** Recipe for a deterministic random field.  Mode coefficients are hashed
 *  from (seed, mode index), never drawn sequentially, so the same seed
 *  yields nested truncations of one underlying field across resolutions.
 *
 *  tail_power = 0: hard band limit at |f_i| <= max_mode (spectrally clean;
 *  products stay below Nyquist on fine grids).
 *  tail_power = p > 0: coefficients decay like (1 + |f|^2)^{-p/2} and run up
 *  to the grid's Nyquist, so nonlinear identities acquire a small aliasing
 *  defect that decays at a measurable rate under refinement. */
struct FieldSpec {
    double amplitude = 1.0;
    int max_mode = 6;
    double tail_power = 0.0;
    bool zero_mean = false;
};

ScalarField random_scalar(const Surface& S, std::uint64_t seed, const FieldSpec& spec);
ComplexField random_complex(const Surface& S, std::uint64_t seed, const FieldSpec& spec);

fields::GaugeConfig random_config(const Surface& S, std::uint64_t seed, const FieldSpec& conn,
                                  const FieldSpec& sect, long long N = 0);

fields::GaugeTransform random_transform(const Surface& S, std::uint64_t seed,
                                        const FieldSpec& spec);

} // namespace orbivortex::sampling
