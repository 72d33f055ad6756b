#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "orbivortex/seifert.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <set>

using namespace orbivortex::seifert;
constexpr double pi = std::numbers::pi;

TEST_CASE("orbifold degree: exact rational arithmetic") {
    CHECK(to_string(orbifold_degree({2, {1, 1}, {2, 3}})) == "17/6");
    CHECK(to_string(orbifold_degree({5, {}, {}})) == "5");
    CHECK(to_string(orbifold_degree({-1, {1, 2}, {2, 3}})) == "1/6");
    CHECK_THROWS(orbifold_degree({0, {2}, {2}}));   // beta not normalized
    CHECK_THROWS(orbifold_degree({0, {-1}, {2}}));  // negative beta
    CHECK_THROWS(orbifold_degree({0, {0}, {0}}));   // cone order < 1
}

TEST_CASE("orbifold degree: common-denominator oracle over random data") {
    // independent exact evaluation with a shared denominator prod(mult)
    std::mt19937_64 rng(20260814);
    for (int trial = 0; trial < 500; ++trial) {
        SeifertData s;
        s.b = static_cast<long long>(rng() % 41) - 20;
        int k = static_cast<int>(rng() % 7);
        for (int i = 0; i < k; ++i) {
            long long m = 1 + static_cast<long long>(rng() % 48);
            s.mult.push_back(m);
            s.beta.push_back(static_cast<long long>(rng() % m));
        }
        __int128 den = 1;
        for (long long m : s.mult) den *= m;
        __int128 num = s.b * den;
        for (size_t i = 0; i < s.mult.size(); ++i)
            num += static_cast<__int128>(s.beta[i]) * (den / s.mult[i]);
        Rational got = orbifold_degree(s);
        Rational want(Integer(static_cast<long long>(num)),
                      Integer(static_cast<long long>(den)));
        CHECK(got == want);
    }
}

TEST_CASE("common multiple check") {
    CHECK(check_common_multiple(6, {2, 3}));
    CHECK(check_common_multiple(1, {}));
    CHECK_FALSE(check_common_multiple(4, {3}));
    CHECK_FALSE(check_common_multiple(0, {2}));
}

TEST_CASE("associated bundle carries (a*d, 0, ..., 0)") {
    SeifertData s = associated_bundle(3, rational_of(1), {3, 3});
    CHECK(s.b == 3);
    CHECK(s.beta == std::vector<long long>{0, 0});
    CHECK(orbifold_degree(s) == rational_of(3));

    SeifertData t = associated_bundle(2, rational_of(1, 2), {2});
    CHECK(t.b == 1);
    CHECK(t.beta == std::vector<long long>{0});

    CHECK_THROWS(associated_bundle(2, rational_of(1, 3), {2})); // a*d not integral
}

TEST_CASE("moduli dichotomy with boundary guard") {
    ModuliStatus st = moduli_status(1, rational_of(1), 1.0, 4 * pi * pi);
    CHECK(st.nonempty);
    CHECK(st.dimension == 1);
    CHECK(st.threshold == doctest::Approx(pi).epsilon(1e-14));
    CHECK_FALSE(st.boundary);

    ModuliStatus em = moduli_status(3, rational_of(1), 2.0, 4 * pi / 3);
    CHECK_FALSE(em.nonempty);
    CHECK(em.threshold == doctest::Approx(2.0 / 3).epsilon(1e-14));
    CHECK_FALSE(em.boundary);

    // exact threshold hit: tau*vol/4pi == d
    ModuliStatus bd = moduli_status(1, rational_of(1), 1.0, 4 * pi);
    CHECK_FALSE(bd.nonempty);
    CHECK(bd.boundary);

    CHECK_THROWS(moduli_status(1, rational_of(1), -1.0, 1.0));
}

TEST_CASE("lifting cokernel: genus-0 trivial, model (Z/a)^{2g} elsewhere") {
    Cokernel g0 = lifting_cokernel(0, 5);
    CHECK(g0.lemma_backed);
    CHECK(g0.cyclic_factors.empty());
    CHECK(g0.order == 1);

    Cokernel triv = lifting_cokernel(3, 1);
    CHECK_FALSE(triv.lemma_backed);
    CHECK(triv.order == 1);

    Cokernel c = lifting_cokernel(1, 2);
    CHECK_FALSE(c.lemma_backed);
    CHECK(c.cyclic_factors == std::vector<long long>{2, 2});
    CHECK(c.order == 4);

    // oracle: enumerate winding pairs (w1, w2) modulo the image of
    // multiplication by a on Z^2
    for (long long a : {2, 3, 4}) {
        std::set<std::pair<long long, long long>> cosets;
        for (long long w1 = 0; w1 < 6 * a; ++w1)
            for (long long w2 = 0; w2 < 6 * a; ++w2)
                cosets.insert({((w1 % a) + a) % a, ((w2 % a) + a) % a});
        CHECK(lifting_cokernel(1, a).order == Integer(cosets.size()));
    }

    Cokernel big = lifting_cokernel(2, 3);
    CHECK(big.cyclic_factors.size() == 4);
    CHECK(big.order == 81);
}
