#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>

#include <string>
#include <vector>

namespace orbivortex::seifert {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::rational<Integer>;

/** Normalized Seifert invariants (b, beta_1..beta_k) of a circle bundle over
 * an orbifold with cone orders mult_1..mult_k, 0 <= beta_i < mult_i. */
struct SeifertData {
    long long b = 0;
    std::vector<long long> beta;
    std::vector<long long> mult;
};

Rational rational_of(long long p, long long q = 1);
std::string to_string(const Rational& r);

/** Orbifold degree b + sum beta_i / mult_i, exact. Rejects unnormalized
 * invariants (beta outside [0, mult) or mult < 1). */
Rational orbifold_degree(const SeifertData& s);

/** True when a >= 1 is a common multiple of every cone order. */
bool check_common_multiple(long long a, const std::vector<long long>& mult);

/** Seifert invariants of the line bundle associated to the weight-a circle
 * action over a degree-d Seifert fibration: (a*d, 0, ..., 0). Requires a*d
 * integral. */
SeifertData associated_bundle(long long a, const Rational& d,
                              const std::vector<long long>& mult);

/** Vortex moduli dichotomy at volume `vol` and level `tau`: empty above the
 * degree threshold tau*vol/4pi, a symmetric product of complex dimension a*d
 * below it. Equality (within a 1e-12 guard band) reports empty with the
 * boundary flag set. */
struct ModuliStatus {
    bool nonempty = false;
    long long dimension = -1; // complex dimension when nonempty
    double threshold = 0;
    bool boundary = false;
};
ModuliStatus moduli_status(long long a, const Rational& d, double tau, double vol);

/** Cokernel of the winding-number map induced by lifting gauge
 * transformations through the weight-a cover. Genus 0 is backed by the
 * lifting lemma (trivial cokernel); positive genus is the (Z/a)^{2g}
 * model. */
struct Cokernel {
    std::vector<long long> cyclic_factors;
    bool lemma_backed = false;
    Integer order = 1;
};
Cokernel lifting_cokernel(long long genus, long long a);

} // namespace orbivortex::seifert
