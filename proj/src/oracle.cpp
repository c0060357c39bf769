#include "pmzv/oracle.hpp"

namespace pmzv {

Table brute_sigma_table(const Composition& c, int64_t n_max, const OracleCtx& ctx) {
    const int k = c.depth();
    const int32_t p = ctx.p;
    // dp[j] = sigma over the first j indices constrained below the current a.
    std::vector<PadicNumber> dp(k + 1);
    dp[0] = PadicNumber::from_int(1, p, ctx.work_prec);
    for (int j = 1; j <= k; ++j) dp[j] = PadicNumber::exact_zero(p);
    Table out(static_cast<size_t>(n_max) + 1);
    out[0] = PadicNumber::exact_zero(p);
    for (int64_t n = 1; n <= n_max; ++n) {
        out[n] = dp[k];
        // Admit a = n as a new inner index for the next rows of the table.
        int64_t a = n;
        for (int j = k; j >= 1; --j) {
            if ((a - c.m[j - 1]) % p != 0) continue;
            PadicNumber term =
                dp[j - 1] * PadicNumber::from_int(a, p, ctx.work_prec).pow(-c.s[j - 1]);
            dp[j] = dp[j] + term;
        }
    }
    return out;
}

PadicNumber brute_sigma_at(const Composition& c, int64_t n, const OracleCtx& ctx) {
    return brute_sigma_table(c, n, ctx)[n];
}

PadicNumber brute_gamma_at(const Composition& c, int64_t n, const OracleCtx& ctx) {
    if (c.empty()) throw std::invalid_argument("gamma needs depth >= 1");
    const int32_t p = ctx.p;
    if ((n - c.last_m()) % p != 0) return PadicNumber::exact_zero(p);
    PadicNumber s = brute_sigma_at(c.prefix(), n, ctx);
    return s * PadicNumber::from_int(n, p, ctx.work_prec).pow(-c.last_s());
}

Table brute_gamma_table(const Composition& c, int64_t n_max, const OracleCtx& ctx) {
    if (c.empty()) throw std::invalid_argument("gamma needs depth >= 1");
    Table pre = brute_sigma_table(c.prefix(), n_max, ctx);
    Table out(static_cast<size_t>(n_max) + 1, PadicNumber::exact_zero(ctx.p));
    for (int64_t n = 1; n <= n_max; ++n) {
        if ((n - c.last_m()) % ctx.p != 0) continue;
        out[n] = pre[n] * PadicNumber::from_int(n, ctx.p, ctx.work_prec).pow(-c.last_s());
    }
    return out;
}

Rational brute_sigma_rational(const Composition& c, int64_t n, int32_t p) {
    const int k = c.depth();
    std::vector<Rational> dp(k + 1, Rational(0));
    dp[0] = Rational(1);
    for (int64_t a = 1; a < n; ++a) {
        for (int j = k; j >= 1; --j) {
            if ((a - c.m[j - 1]) % p != 0) continue;
            if (dp[j - 1].is_zero()) continue;
            __int128 pw = 1;
            for (int32_t e = 0; e < c.s[j - 1]; ++e) pw *= a;
            dp[j] = dp[j] + dp[j - 1] / Rational(pw, 1);
        }
    }
    return dp[k];
}

std::map<Word, Table> ode_integrate_gfrak(int W, int64_t n_max,
                                          const std::map<Word, PadicNumber>& g_scalars,
                                          const OracleCtx& ctx) {
    const int32_t p = ctx.p;
    NCSeries gs{p, ctx.work_prec, W, {}};
    gs.set(Word{}, PadicNumber::from_int(1, p, ctx.work_prec));
    for (auto& [w, v] : g_scalars)
        if (w.weight() >= 1 && w.weight() <= W) gs.set(w, v);
    NCSeries conj = conjugate_e1(gs);

    // d gfrak[I] = omega_0 B + omega_1 C + omega_p D with
    //   B_n = p (gfrak{tail}(n) - gfrak{init}(n))     for leading/trailing e_0
    //   C   = -p ( conj[I] + sum_{U,V nonempty} gfrak{U} conj[V] )
    //   D   = gfrak{tail}  (leading e_1), constant term 1 when I = e_1
    // and n a_n = B_n - (C_0 + sum_{k<n} C_k) - p (D_0 [p|n] + sum_{k<n, k=n mod p} D_k).
    std::map<Word, Table> out;
    const Table empty_table;
    auto table_of = [&](const Word& w) -> const Table& {
        auto it = out.find(w);
        if (it == out.end()) return empty_table;
        return it->second;
    };
    int64_t worst_div = 0;
    PadicNumber pnum = PadicNumber::from_int(p, p, ctx.work_prec);
    for (int wgt = 1; wgt <= W; ++wgt) {
        for (auto& I : all_words(wgt)) {
            if (I.weight() != wgt) continue;
            Table a(static_cast<size_t>(n_max) + 1, PadicNumber::exact_zero(p));
            const Table* beta_pos =
                (I.first() == 0 && I.weight() >= 2) ? &table_of(I.tail()) : nullptr;
            const Table* beta_neg =
                (I.last() == 0 && I.weight() >= 2) ? &table_of(I.init()) : nullptr;
            const Table* del =
                (I.first() == 1 && I.weight() >= 2) ? &table_of(I.tail()) : nullptr;
            PadicNumber d0 = (I.first() == 1 && I.weight() == 1)
                                 ? PadicNumber::from_int(1, p, ctx.work_prec)
                                 : PadicNumber::exact_zero(p);
            std::vector<std::pair<const Table*, PadicNumber>> gam_parts;
            for (int cut = 1; cut < I.weight(); ++cut) {
                Word U{}, V{};
                for (int t = 0; t < cut; ++t) U = U.appended(I.letter(t));
                for (int t = cut; t < I.weight(); ++t) V = V.appended(I.letter(t));
                gam_parts.emplace_back(&table_of(U), conj.at(V));
            }
            PadicNumber c0 = -(pnum * conj.at(I));

            PadicNumber run1 = PadicNumber::exact_zero(p);
            std::vector<PadicNumber> runp(p, PadicNumber::exact_zero(p));
            for (int64_t n = 1; n <= n_max; ++n) {
                PadicNumber na = PadicNumber::exact_zero(p);
                if (beta_pos && !beta_pos->empty()) na = na + pnum * (*beta_pos)[n];
                if (beta_neg && !beta_neg->empty()) na = na - pnum * (*beta_neg)[n];
                na = na - (c0 + run1);
                PadicNumber omp = runp[n % p];
                if (n % p == 0) omp = omp + d0;
                na = na - pnum * omp;
                PadicNumber nv = PadicNumber::from_int(n, p, ctx.work_prec);
                a[n] = na * nv.inv();
                int64_t vp = 0;
                for (int64_t q = n; q % p == 0; q /= p) ++vp;
                worst_div = std::max(worst_div, vp);
                // advance running sums with this n's source values
                PadicNumber cn = PadicNumber::exact_zero(p);
                for (auto& [tab, scal] : gam_parts)
                    if (!tab->empty()) cn = cn + (*tab)[n] * scal;
                run1 = run1 - pnum * cn;
                if (del && !del->empty()) runp[n % p] = runp[n % p] + (*del)[n];
            }
            out.emplace(I, std::move(a));
        }
    }
    if (ctx.budget) ctx.budget->charge("ode-div", worst_div);
    return out;
}

}  // namespace pmzv
