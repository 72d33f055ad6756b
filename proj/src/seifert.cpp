#include "orbivortex/seifert.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace orbivortex::seifert {

Rational rational_of(long long p, long long q) {
    if (q == 0) throw std::invalid_argument("rational_of: zero denominator");
    return Rational(Integer(p), Integer(q));
}

std::string to_string(const Rational& r) {
    std::string s = r.numerator().str();
    if (r.denominator() != 1) s += "/" + r.denominator().str();
    return s;
}

static void validate(const SeifertData& s) {
    if (s.beta.size() != s.mult.size())
        throw std::invalid_argument("seifert: beta/mult length mismatch");
    for (size_t i = 0; i < s.mult.size(); ++i) {
        if (s.mult[i] < 1)
            throw std::invalid_argument("seifert: cone orders must be >= 1");
        if (s.beta[i] < 0 || s.beta[i] >= s.mult[i])
            throw std::invalid_argument("seifert: invariants not normalized (0 <= beta < mult)");
    }
}

Rational orbifold_degree(const SeifertData& s) {
    validate(s);
    Rational d(Integer(s.b), Integer(1));
    for (size_t i = 0; i < s.mult.size(); ++i)
        d += Rational(Integer(s.beta[i]), Integer(s.mult[i]));
    return d;
}

bool check_common_multiple(long long a, const std::vector<long long>& mult) {
    if (a < 1) return false;
    for (long long m : mult) {
        if (m < 1) throw std::invalid_argument("check_common_multiple: cone order < 1");
        if (a % m != 0) return false;
    }
    return true;
}

SeifertData associated_bundle(long long a, const Rational& d,
                              const std::vector<long long>& mult) {
    if (a < 1) throw std::invalid_argument("associated_bundle: weight must be >= 1");
    Rational ad = Rational(Integer(a), Integer(1)) * d;
    if (ad.denominator() != 1)
        throw std::invalid_argument("associated_bundle: a*d is not an integer");
    SeifertData out;
    out.b = ad.numerator().convert_to<long long>();
    out.beta.assign(mult.size(), 0);
    out.mult = mult;
    validate(out);
    return out;
}

ModuliStatus moduli_status(long long a, const Rational& d, double tau, double vol) {
    if (a < 1) throw std::invalid_argument("moduli_status: weight must be >= 1");
    if (!(tau > 0) || !(vol > 0))
        throw std::invalid_argument("moduli_status: tau and vol must be positive");
    ModuliStatus st;
    st.threshold = tau * vol / (4 * std::numbers::pi);
    double dd = boost::rational_cast<double>(d);
    double guard = 1e-12 * std::max(1.0, std::abs(st.threshold));
    if (std::abs(dd - st.threshold) <= guard) {
        st.boundary = true;
        return st; // boundary counts as empty
    }
    if (dd > st.threshold) return st;
    Rational ad = Rational(Integer(a), Integer(1)) * d;
    if (ad.denominator() != 1)
        throw std::invalid_argument("moduli_status: a*d is not an integer below threshold");
    st.nonempty = true;
    st.dimension = ad.numerator().convert_to<long long>();
    return st;
}

Cokernel lifting_cokernel(long long genus, long long a) {
    if (genus < 0 || a < 1)
        throw std::invalid_argument("lifting_cokernel: need genus >= 0, a >= 1");
    Cokernel c;
    c.lemma_backed = (genus == 0);
    if (genus == 0 || a == 1) return c;
    c.cyclic_factors.assign(2 * genus, a);
    c.order = 1;
    for (long long i = 0; i < 2 * genus; ++i) c.order *= a;
    return c;
}

} // namespace orbivortex::seifert
