#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "pmzv/mzv.hpp"

using namespace pmzv;

namespace {

struct Rig {
    PrecisionBudget budget{12};
    SigmaContext sig;
    MzvEngine eng;

    explicit Rig(int32_t p, int W)
        : sig(make_params(p), &budget), eng(make_mzv(p, W), sig, &budget) {}

    static SigmaContext::Params make_params(int32_t p) {
        SigmaContext::Params prm;
        prm.p = p;
        prm.n_max = 64 * p;
        prm.work_prec = 72;
        prm.degree = 24;  // limit resolution at j_max = 6 needs deep tails
        prm.holdout = 3;
        prm.fit_threshold = 1;
        prm.memo_depth = 3;
        return prm;
    }
    static MzvParams make_mzv(int32_t p, int W) {
        MzvParams m;
        m.p = p;
        m.target_prec = 12;
        m.W = W;
        m.j_max = 6;
        m.cauchy_tol = 6;
        m.cancel_tol = 6;
        return m;
    }
};

PadicNumber rat(int64_t n, int64_t d, int32_t p) {
    return PadicNumber::from_rational(n, d, p, 30);
}

// z-series integration of df = omega * sum gamma(n) z^n, straight from the
// brute table of the input; independent of the index-surgery path.
Table integrate_form(char omega, const Table& gam, int32_t p, int64_t prec) {
    int64_t n_max = static_cast<int64_t>(gam.size()) - 1;
    Table out(gam.size(), PadicNumber::exact_zero(p));
    PadicNumber run = PadicNumber::exact_zero(p);
    std::vector<PadicNumber> runp(p, PadicNumber::exact_zero(p));
    for (int64_t n = 1; n <= n_max; ++n) {
        PadicNumber na;
        if (omega == '0') {
            na = gam[n];
        } else if (omega == '1') {
            na = -run;
        } else {
            na = -(PadicNumber::from_int(p, p, prec) * runp[n % p]);
        }
        out[n] = na * PadicNumber::from_int(n, p, prec).inv();
        run = run + gam[n];
        runp[n % p] = runp[n % p] + gam[n];
    }
    return out;
}

}  // namespace

TEST_CASE("antiderivative rules: index surgery equals z-series integration") {
    const int32_t p = 3;
    OracleCtx ctx{p, 40, nullptr};
    std::mt19937_64 rng(71);
    std::uniform_int_distribution<int> sdist(1, 2), mdist(0, p - 1), ddist(1, 2);
    for (int iter = 0; iter < 6; ++iter) {
        Exponents s, m;
        for (int i = 0, d = ddist(rng); i < d; ++i) {
            s.push_back(sdist(rng));
            m.push_back(mdist(rng));
        }
        Composition c(s, m);
        Table gam = brute_gamma_table(c, 120, ctx);

        // omega_0: gamma((s', s_k+1); m)
        {
            Composition c2 = c;
            c2.s.back() += 1;
            Table expect = brute_gamma_table(c2, 120, ctx);
            Table got = integrate_form('0', gam, p, 40);
            for (int64_t n = 1; n <= 120; ++n)
                CHECK(PadicNumber::equal_mod_prec(expect[n], got[n]));
        }
        // omega_1: -sum_i gamma((s,1);(m,i))
        {
            Table got = integrate_form('1', gam, p, 40);
            for (int64_t n = 1; n <= 120; ++n) {
                PadicNumber expect = PadicNumber::exact_zero(p);
                for (int32_t i = 0; i < p; ++i)
                    expect = expect - brute_gamma_at(c.appended(1, i), n, ctx);
                CHECK(PadicNumber::equal_mod_prec(expect, got[n]));
            }
        }
        // omega_p: -p gamma((s,1);(m,m_k))
        {
            Table got = integrate_form('p', gam, p, 40);
            Table app = brute_gamma_table(c.appended(1, c.last_m()), 120, ctx);
            PadicNumber mp = PadicNumber::from_int(p, p, 40);
            for (int64_t n = 1; n <= 120; ++n)
                CHECK(PadicNumber::equal_mod_prec(-(mp * app[n]), got[n]));
        }
    }
}

TEST_CASE("engine at weight 3, p=5") {
    Rig rig(5, 3);
    rig.eng.solve();
    auto& eng = rig.eng;
    const int32_t p = 5;

    SUBCASE("depth-1 seed tables: gfrak{e_0^{s-1}e_1}(n) = p^s/n^s off the zero class") {
        for (int s = 1; s <= 3; ++s) {
            std::vector<int> idx = {s};
            Word w = Word::from_zeta_indices(idx);
            for (int64_t n = 1; n <= 60; ++n) {
                PadicNumber v = eng.gfrak_at(w, n);
                if (n % p == 0) {
                    CHECK(v.is_zero());
                } else {
                    __int128 ppow = 1, npow = 1;
                    for (int e = 0; e < s; ++e) {
                        ppow *= p;
                        npow *= n;
                    }
                    CHECK(PadicNumber::equal_mod_prec(
                        v, PadicNumber::from_rational128(ppow, npow, p, 24)));
                }
            }
        }
    }

    SUBCASE("pure e_0 words vanish") {
        CHECK(eng.gfrak_of(Word::from_string("0")).empty());
        CHECK(eng.gfrak_of(Word::from_string("00")).empty());
        CHECK(eng.h_of(Word::from_string("0")).v.is_zero());
    }

    SUBCASE("depth-2 closed form as grid tables") {
        // gfrak{e_1 e_0^{s-1} e_1} = p^{s+1}((-1)^{s+1} sum_{i!=0, all j}
        // gamma(s,1;i,j) - sum_{i!=0} gamma(s,1;i,i)), s <= 2 at W=3
        OracleCtx ctx{p, 40, nullptr};
        for (int s = 1; s <= 2; ++s) {
            Word w = Word::from_string("1" + std::string(s - 1, '0') + "1");
            __int128 ppow = 1;
            for (int e = 0; e <= s; ++e) ppow *= p;
            for (int64_t n = 1; n <= 40; ++n) {
                PadicNumber expect = PadicNumber::exact_zero(p);
                for (int32_t i = 1; i < p; ++i) {
                    for (int32_t j = 0; j < p; ++j) {
                        PadicNumber t = brute_gamma_at(Composition({s, 1}, {i, j}), n, ctx);
                        if ((s + 1) % 2 == 1) t = -t;
                        expect = expect + t;
                    }
                    expect = expect - brute_gamma_at(Composition({s, 1}, {i, i}), n, ctx);
                }
                expect = mul_rational(expect, Rational(ppow, 1), p);
                CHECK(PadicNumber::residual_valuation(eng.gfrak_at(w, n), expect) >= 8);
            }
        }
    }

    SUBCASE("oracle equivalence on the grid") {
        OracleCtx ctx{p, 40, &rig.budget};
        auto tables = ode_integrate_gfrak(3, 200, eng.g_scalars(2), ctx);
        for (auto& [w, tab] : tables) {
            for (int64_t n = 1; n <= 200; ++n)
                CHECK(PadicNumber::equal_mod_prec(tab[n], eng.gfrak_at(w, n)));
        }
    }

    SUBCASE("g normalization and group-likeness") {
        CHECK(eng.g_of(Word::from_string("0")).v.is_zero());
        CHECK(eng.g_of(Word::from_string("1")).v.is_zero());
        NCSeries gs{p, 30, 3, {}};
        gs.set(Word{}, rat(1, 1, p));
        for (auto& [w, x] : eng.g_map())
            if (w.weight() >= 1) gs.set(w, x.v);
        for (auto& [pr, res] : grouplike_residual(gs)) CHECK(res.valuation() >= 6);
        NCSeries hs{p, 30, 3, {}};
        hs.set(Word{}, rat(1, 1, p));
        for (auto& [w, x] : eng.h_map())
            if (w.weight() >= 1) hs.set(w, x.v);
        for (auto& [pr, res] : grouplike_residual(hs)) CHECK(res.valuation() >= 6);
    }

    SUBCASE("fundamental identity residual") {
        for (auto& [w, r] : eng.fundamental_residual()) CHECK(r.valuation() >= 6);
    }

    SUBCASE("seed two-path agreement and zeta values") {
        for (int s = 2; s <= 3; ++s) {
            Traced seed = eng.seed_g_depth1(s);
            Word w = Word::from_zeta_indices({s});
            CHECK(PadicNumber::residual_valuation(seed.v, eng.g_of(w).v) >= 6);
        }
        auto z1 = eng.zeta({1});
        CHECK(z1.value.is_zero());
        auto z3 = eng.zeta({3});
        CHECK(PadicNumber::equal_mod_prec(
            z3.g_coefficient, z3.value.shift_p(3)));
        CHECK_THROWS(eng.zeta({4}));  // exceeds W
    }

    SUBCASE("traces re-evaluate and are weight-homogeneous") {
        for (auto& [w, x] : eng.g_map()) {
            if (w.empty()) continue;
            CHECK(x.t.homogeneous_of_weight(eng.registry(), w.weight()));
            PadicNumber re = x.t.evaluate(eng.registry(), p, 30);
            CHECK(PadicNumber::residual_valuation(re, x.v) >= 6);
        }
    }

    SUBCASE("limit reports pass") {
        for (auto& rep : eng.limit_reports()) CHECK(rep.pass);
        for (auto& rep : eng.solve_reports()) CHECK(rep.residual_valuation >= 6);
    }
}
