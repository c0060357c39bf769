#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "pmzv/word.hpp"

using namespace pmzv;

namespace {
const int32_t P = 5;
const int64_t PREC = 20;

PadicNumber num(int64_t n, int64_t d = 1) { return PadicNumber::from_rational(n, d, P, PREC); }

NCSeries random_grouplike(std::mt19937_64& rng, int W) {
    // exp of a random Lie-like primitive: exp(sum c_w w) for single letters
    // plus a random commutator-flavored element, via the series exponential.
    NCSeries x{P, PREC, W, {}};
    std::uniform_int_distribution<int64_t> d(-20, 20);
    x.set(Word::from_string("0"), num(d(rng)));
    x.set(Word::from_string("1"), num(d(rng)));
    // [e0,e1] = e0e1 - e1e0 is primitive
    int64_t c = d(rng);
    x.set(Word::from_string("01"), num(c));
    x.set(Word::from_string("10"), num(-c));
    NCSeries e = NCSeries::one(P, PREC, W);
    NCSeries term = NCSeries::one(P, PREC, W);
    for (int k = 1; k <= W; ++k) {
        term = concat_mul(term, x);
        NCSeries scaled{P, PREC, W, {}};
        PadicNumber inv_fact = num(1);
        for (int j = 2; j <= k; ++j) inv_fact = inv_fact * num(1, j);
        for (auto& [w, cw] : term.c) scaled.set(w, cw * inv_fact);
        for (auto& [w, cw] : scaled.c) e.set(w, e.at(w) + cw);
    }
    return e;
}

}  // namespace

TEST_CASE("word basics") {
    Word w = Word::from_string("011");
    CHECK(w.weight() == 3);
    CHECK(w.depth() == 1);
    CHECK(w.to_string() == "011");
    CHECK(w.first() == 0);
    CHECK(w.last() == 1);
    CHECK(w.tail().to_string() == "11");
    CHECK(w.init().to_string() == "01");
    CHECK(w.reversed().to_string() == "110");
    CHECK(Word::from_string("10110").depth() == 2);
    CHECK(Word::from_zeta_indices({3, 2}).to_string() == "00101");
    CHECK(all_words(3).size() == 15);
}

TEST_CASE("concat examples") {
    NCSeries a = NCSeries::one(P, PREC, 4);
    a.set(Word::from_string("0"), num(1));
    NCSeries b = NCSeries::one(P, PREC, 4);
    b.set(Word::from_string("1"), num(1));
    auto ab = concat_mul(a, b);
    CHECK(PadicNumber::equal_mod_prec(ab.at(Word{}), num(1)));
    CHECK(PadicNumber::equal_mod_prec(ab.at(Word::from_string("0")), num(1)));
    CHECK(PadicNumber::equal_mod_prec(ab.at(Word::from_string("1")), num(1)));
    CHECK(PadicNumber::equal_mod_prec(ab.at(Word::from_string("01")), num(1)));
    CHECK(ab.at(Word::from_string("10")).is_zero());
}

TEST_CASE("concat associativity on random series") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int64_t> d(-9, 9);
    for (int iter = 0; iter < 20; ++iter) {
        NCSeries a{P, PREC, 4, {}}, b{P, PREC, 4, {}}, c{P, PREC, 4, {}};
        for (auto& w : all_words(4)) {
            a.set(w, num(d(rng)));
            b.set(w, num(d(rng)));
            c.set(w, num(d(rng)));
        }
        auto l = concat_mul(concat_mul(a, b), c);
        auto r = concat_mul(a, concat_mul(b, c));
        for (auto& w : all_words(4)) CHECK(PadicNumber::equal_mod_prec(l.at(w), r.at(w)));
    }
}

TEST_CASE("series inverse") {
    NCSeries a = NCSeries::one(P, PREC, 5);
    a.set(Word::from_string("0"), num(1));
    auto b = series_inverse(a);
    // 1 - e0 + e0^2 - ...
    CHECK(PadicNumber::equal_mod_prec(b.at(Word::from_string("0")), num(-1)));
    CHECK(PadicNumber::equal_mod_prec(b.at(Word::from_string("00")), num(1)));
    CHECK(PadicNumber::equal_mod_prec(b.at(Word::from_string("000")), num(-1)));
    auto prod = concat_mul(a, b);
    for (auto& w : all_words(5)) {
        if (w.empty())
            CHECK(PadicNumber::equal_mod_prec(prod.at(w), num(1)));
        else
            CHECK(prod.at(w).is_zero());
    }
    NCSeries bad{P, PREC, 3, {}};
    bad.set(Word{}, num(2));
    CHECK_THROWS(series_inverse(bad));
}

TEST_CASE("shuffle examples and algebra laws") {
    auto& s = shuffle_mul(Word::from_string("0"), Word::from_string("1"));
    CHECK(s.size() == 2);
    CHECK(s.at(Word::from_string("01")) == 1);
    CHECK(s.at(Word::from_string("10")) == 1);

    // commutativity and multiplicity count on all pairs of weight <= 5
    for (auto& u : all_words(3)) {
        for (auto& v : all_words(2)) {
            if (u.empty() && v.empty()) continue;
            auto& uv = shuffle_mul(u, v);
            auto& vu = shuffle_mul(v, u);
            CHECK(uv == vu);
            int64_t total = 0;
            for (auto& [w, c] : uv) total += c;
            // number of interleavings is binom(|u|+|v|, |u|)
            int64_t expect = 1;
            for (int i = 1; i <= v.weight(); ++i)
                expect = expect * (u.weight() + i) / i;
            CHECK(total == expect);
        }
    }
}

TEST_CASE("exponentials of primitives are group-like, antipode identity") {
    std::mt19937_64 rng(17);
    for (int iter = 0; iter < 6; ++iter) {
        auto g = random_grouplike(rng, 4);
        for (auto& [pr, res] : grouplike_residual(g)) CHECK(res.is_zero());
        // antipode: g^{-1}[w] = (-1)^{|w|} g[reverse(w)]
        auto gi = series_inverse(g);
        for (auto& w : all_words(4)) {
            PadicNumber expect = g.at(w.reversed());
            if (w.weight() % 2 == 1) expect = -expect;
            CHECK(PadicNumber::equal_mod_prec(gi.at(w), expect));
        }
    }
}

TEST_CASE("conjugate of e1 against a brute double loop") {
    std::mt19937_64 rng(23);
    auto g = random_grouplike(rng, 4);
    auto conj = conjugate_e1(g);
    auto gi = series_inverse(g);
    for (auto& w : all_words(4)) {
        // sum over splittings w = A e1 B of gi[A] g[B]
        PadicNumber acc = PadicNumber::zero(P, PREC);
        for (int cut = 0; cut < w.weight(); ++cut) {
            if (w.letter(cut) != 1) continue;
            Word A{}, B{};
            for (int t = 0; t < cut; ++t) A = A.appended(w.letter(t));
            for (int t = cut + 1; t < w.weight(); ++t) B = B.appended(w.letter(t));
            acc = acc + gi.at(A) * g.at(B);
        }
        CHECK(PadicNumber::equal_mod_prec(conj.at(w), acc));
    }
    // only the A = empty split survives for e_1 e_0
    CHECK(PadicNumber::equal_mod_prec(conj.at(Word::from_string("10")),
                                      g.at(Word::from_string("0"))));
}
