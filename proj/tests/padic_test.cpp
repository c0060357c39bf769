#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "pmzv/padic.hpp"
#include "pmzv/rational.hpp"

using namespace pmzv;

namespace {

PadicNumber rnd_value(std::mt19937_64& rng, int32_t p, int64_t prec) {
    std::uniform_int_distribution<int64_t> num(-50000, 50000);
    std::uniform_int_distribution<int64_t> den(1, 5000);
    int64_t n = num(rng);
    if (n == 0) n = 7;
    return PadicNumber::from_rational(n, den(rng), p, prec);
}

}  // namespace

TEST_CASE("valuation additivity under multiplication") {
    // p=5: (v=0,u=2) * (v=1,u=3) -> (v=1, u=6)
    auto a = PadicNumber::from_int(2, 5, 12);
    auto b = PadicNumber::from_int(15, 5, 12);
    auto c = a * b;
    CHECK(c.valuation() == 1);
    CHECK(PadicNumber::equal_mod_prec(c, PadicNumber::from_int(30, 5, 12)));
}

TEST_CASE("additive inverse gives exact zero at precision") {
    auto a = PadicNumber::from_rational(7, 3, 5, 12);
    auto z = a + (-a);
    CHECK(z.is_zero());
    CHECK(z.precision() == 12);
}

TEST_CASE("inverse of 2 mod 3^4 is 41") {
    auto a = PadicNumber::from_int(2, 3, 4);
    auto i = a.inv();
    CHECK(i.valuation() == 0);
    auto prod = a * i;
    CHECK(PadicNumber::equal_mod_prec(prod, PadicNumber::from_int(1, 3, 4)));
    CHECK(i.to_int64() == 41 - 81);  // 41 = -40 mod 81; small representative is -40
}

TEST_CASE("from_rational examples") {
    auto a = PadicNumber::from_rational(1, 54, 3, 6);
    CHECK(a.valuation() == -3);
    auto two_a = a * PadicNumber::from_int(54, 3, 6);
    CHECK(PadicNumber::equal_mod_prec(two_a, PadicNumber::from_int(1, 3, 6)));

    auto z = PadicNumber::from_rational(0, 7, 5, 8);
    CHECK(z.is_zero());

    auto b = PadicNumber::from_rational(25, 2, 5, 6);
    CHECK(b.valuation() == 2);
    auto back = b * PadicNumber::from_rational(2, 25, 5, 6);
    CHECK(PadicNumber::equal_mod_prec(back, PadicNumber::from_int(1, 5, 6)));
}

TEST_CASE("errors") {
    CHECK_THROWS_AS(PadicNumber::from_rational(1, 0, 5, 8), std::domain_error);
    CHECK_THROWS_AS(PadicNumber::zero(5, 8).inv(), std::domain_error);
    CHECK_THROWS_AS(PadicNumber::from_rational(125, 1, 5, 2), precision_exhausted);
}

TEST_CASE("ring laws on random triples") {
    for (int32_t p : {3, 5, 11}) {
        std::mt19937_64 rng(42 + p);
        for (int iter = 0; iter < 1000; ++iter) {
            auto a = rnd_value(rng, p, 14);
            auto b = rnd_value(rng, p, 14);
            auto c = rnd_value(rng, p, 14);
            CHECK(PadicNumber::equal_mod_prec((a + b) + c, a + (b + c)));
            CHECK(PadicNumber::equal_mod_prec(a + b, b + a));
            CHECK(PadicNumber::equal_mod_prec((a * b) * c, a * (b * c)));
            CHECK(PadicNumber::equal_mod_prec(a * b, b * a));
            CHECK(PadicNumber::equal_mod_prec(a * (b + c), a * b + a * c));
            if (!a.is_zero() && !b.is_zero())
                CHECK((a * b).valuation() == a.valuation() + b.valuation());
        }
    }
}

TEST_CASE("from_rational round trip") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int64_t> d(1, 2000);
    for (int iter = 0; iter < 200; ++iter) {
        int64_t n = d(rng), m = d(rng);
        auto a = PadicNumber::from_rational(n, m, 7, 10);
        auto b = PadicNumber::from_rational(m, n, 7, 10);
        CHECK(PadicNumber::equal_mod_prec(a * b, PadicNumber::from_int(1, 7, 10)));
    }
}

TEST_CASE("shift and truncate") {
    auto a = PadicNumber::from_int(6, 5, 10);
    auto b = a.shift_p(-3);
    CHECK(b.valuation() == -3);
    CHECK(b.precision() == 7);
    auto t = a.truncated(4);
    CHECK(t.precision() == 4);
    CHECK(PadicNumber::equal_mod_prec(t, a));
    // truncating below the valuation yields a flagged zero
    auto z = PadicNumber::from_int(125, 5, 10).truncated(2);
    CHECK(z.is_zero());
}

TEST_CASE("digit strings are little-endian base p") {
    auto a = PadicNumber::from_int(2 + 3 * 5 + 4 * 25, 5, 6);
    CHECK(a.unit_digits() == "234000");
}

TEST_CASE("precision budget sums logged losses") {
    PrecisionBudget b(12);
    b.charge("fit", 3);
    b.charge("fit", 2);
    b.charge("ode", 4);
    CHECK(b.total() == 9);
    CHECK(b.snapshot().at("fit") == 5);
}

TEST_CASE("bernoulli and faulhaber against direct sums") {
    CHECK(bernoulli(2) == Rational(__int128(1), 6));
    CHECK(bernoulli(4) == Rational(__int128(-1), 30));
    CHECK(bernoulli(12) == Rational(__int128(-691), 2730));
    for (int d = 0; d <= 9; ++d) {
        auto c = faulhaber_poly(d);
        for (int64_t n : {1, 2, 3, 10, 37}) {
            Rational direct(0);
            for (int64_t k = 1; k <= n; ++k) {
                __int128 pw = 1;
                for (int e = 0; e < d; ++e) pw *= k;
                direct = direct + Rational(pw, 1);
            }
            Rational poly(0);
            __int128 npow = 1;
            for (size_t j = 0; j < c.size(); ++j) {
                poly = poly + c[j] * Rational(npow, 1);
                npow *= n;
            }
            CHECK(direct == poly);
        }
    }
}
