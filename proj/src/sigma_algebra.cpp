#include "pmzv/sigma_algebra.hpp"

#include <algorithm>
#include <cassert>

#include "pmzv/rational.hpp"

namespace pmzv {

namespace {

Table make_table(int32_t p, int64_t n_max) {
    return Table(static_cast<size_t>(n_max) + 1, PadicNumber::exact_zero(p));
}

PadicNumber horner(const std::vector<PadicNumber>& c, const PadicNumber& x) {
    PadicNumber acc = c.back();
    for (size_t j = c.size() - 1; j-- > 0;) acc = acc * x + c[j];
    return acc;
}

}  // namespace

SigmaContext::SigmaContext(const Params& prm, PrecisionBudget* budget)
    : prm_(prm), budget_(budget) {
    if (prm_.n_max < prm_.p * (prm_.degree + prm_.holdout + 3))
        throw std::invalid_argument("grid too short for the configured fit degree");
}

Table SigmaContext::zero_table() const { return make_table(prm_.p, prm_.n_max); }

const Table& SigmaContext::basis_table(const Exponents& t) {
    {
        std::lock_guard<std::mutex> lk(mu_);
        auto it = basis_cache_.find(t);
        if (it != basis_cache_.end()) return it->second;
    }
    Composition c(t, Exponents(t.size(), 0));
    Table tab = brute_sigma_table(c, prm_.n_max, oracle_ctx());
    std::lock_guard<std::mutex> lk(mu_);
    return basis_cache_.emplace(t, std::move(tab)).first->second;
}

const Table& SigmaContext::brute_table(const Composition& c) {
    {
        std::lock_guard<std::mutex> lk(mu_);
        auto it = brute_cache_.find(c);
        if (it != brute_cache_.end()) return it->second;
    }
    Table tab = brute_sigma_table(c, prm_.n_max, oracle_ctx());
    std::lock_guard<std::mutex> lk(mu_);
    return brute_cache_.emplace(c, std::move(tab)).first->second;
}

SigmaExpr SigmaContext::expand(const Composition& c) {
    if (c.depth() <= prm_.memo_depth) {
        {
            std::lock_guard<std::mutex> lk(mu_);
            auto it = expand_cache_.find(c);
            if (it != expand_cache_.end()) return it->second;
        }
        SigmaExpr e = expand_uncached(c);
        std::lock_guard<std::mutex> lk(mu_);
        return expand_cache_.emplace(c, std::move(e)).first->second;
    }
    return expand_uncached(c);
}

SigmaExpr SigmaContext::expand_uncached(const Composition& c) {
    SigmaExpr out;
    out.p = prm_.p;
    out.n_max = prm_.n_max;
    if (c.empty()) {
        Table ones = make_table(prm_.p, prm_.n_max);
        PadicNumber one = PadicNumber::from_int(1, prm_.p, prm_.work_prec);
        for (int64_t n = 1; n <= prm_.n_max; ++n) ones[n] = one;
        out.terms[{}] = std::move(ones);
        return out;
    }
    SigmaExpr inner = expand(c.prefix());
    for (auto& [t, f] : inner.terms) accumulate_outer(out, f, c.last_s(), c.last_m(), t, +1);
    return out;
}

void SigmaContext::add_to_term(SigmaExpr& out, const Exponents& t, const Table& tab, int sign) {
    auto it = out.terms.find(t);
    if (it == out.terms.end()) it = out.terms.emplace(t, zero_table()).first;
    for (int64_t n = 1; n <= prm_.n_max; ++n)
        it->second[n] = sign > 0 ? it->second[n] + tab[n] : it->second[n] - tab[n];
}

std::vector<PadicNumber> SigmaContext::taylor_split(const Table& f, int32_t s) {
    const int D = prm_.degree;
    auto poly = fit_branch_poly(f, prm_.p, 0, D, 1, budget_);
    // Validate on held-out class members; a bad residual here means the
    // expansion produced a coefficient that is not series-like, which is an
    // implementation bug, not a math failure. The peeled coefficients keep
    // their full arithmetic precision: the split identity is exact for
    // whatever values are peeled, the validation only gates series-likeness.
    int64_t tail = INT64_MAX;
    for (int h = 1; h <= prm_.holdout; ++h) {
        int64_t n = static_cast<int64_t>(D + 1 + h) * prm_.p;
        if (n > prm_.n_max) break;
        PadicNumber pred = horner(poly, PadicNumber::from_int(n, prm_.p, prm_.work_prec));
        tail = std::min(tail, PadicNumber::residual_valuation(f[n], pred));
    }
    if (tail < prm_.fit_threshold)
        throw std::runtime_error("expansion inconsistency: branch-0 split residual valuation " +
                                 std::to_string(tail));
    return std::vector<PadicNumber>(poly.begin(), poly.begin() + s);
}

void SigmaContext::accumulate_outer(SigmaExpr& out, const Table& f, int32_t s, int32_t m,
                                    const Exponents& t, int sign) {
    const int32_t p = prm_.p;
    if (m != 0 || s == 0) {
        Table u = zero_table();
        for (int64_t a = 1; a <= prm_.n_max; ++a) {
            if ((a - m) % p != 0) continue;
            u[a] = s == 0 ? f[a]
                          : f[a] * PadicNumber::from_int(a, p, prm_.work_prec).pow(-s);
        }
        g_mechanism(out, u, t, sign);
        return;
    }
    // m == 0, s >= 1: peel the polynomial head of the branch-0 series so the
    // remainder divides exactly by a^s; the peeled heads are constant
    // coefficients on the extended basis tuples.
    auto b = taylor_split(f, s);
    for (int32_t j = 0; j < s; ++j) {
        if (b[j].is_zero()) continue;
        Exponents ext = t;
        ext.push_back(s - j);
        Table ct = zero_table();
        for (int64_t n = 1; n <= prm_.n_max; ++n) ct[n] = b[j];
        add_to_term(out, ext, ct, sign);
    }
    Table ubar = zero_table();
    for (int64_t a = p; a <= prm_.n_max; a += p) {
        PadicNumber head = PadicNumber::exact_zero(p);
        PadicNumber apow = PadicNumber::from_int(1, p, prm_.work_prec);
        PadicNumber av = PadicNumber::from_int(a, p, prm_.work_prec);
        for (int32_t j = 0; j < s; ++j) {
            head = head + b[j] * apow;
            apow = apow * av;
        }
        ubar[a] = (f[a] - head) * av.pow(-s);
    }
    g_mechanism(out, ubar, t, sign);
}

void SigmaContext::g_mechanism(SigmaExpr& out, const Table& u, const Exponents& t, int sign) {
    // S(n) = sum_{0<a<n} u(a) sigma_p(t)(a)
    //      = U(n-1) sigma_p(t)(n) - sum_{0<b<n, p|b} U(b)/b^{t_l} sigma_p(t')(b)
    Table U = zero_table();
    Table shifted = zero_table();
    PadicNumber acc = PadicNumber::exact_zero(prm_.p);
    for (int64_t a = 1; a <= prm_.n_max; ++a) {
        shifted[a] = acc;  // U(a-1)
        acc = acc + u[a];
        U[a] = acc;
    }
    add_to_term(out, t, shifted, sign);
    if (t.empty()) return;
    Exponents tp(t.begin(), t.end() - 1);
    accumulate_outer(out, U, t.back(), 0, tp, -sign);
}

PadicNumber SigmaContext::eval(const SigmaExpr& e, int64_t n) {
    PadicNumber acc = PadicNumber::exact_zero(prm_.p);
    for (auto& [t, ct] : e.terms)
        acc = t.empty() ? acc + ct[n] : acc + ct[n] * basis_table(t)[n];
    return acc;
}

SigmaExpr SigmaContext::delta(const SigmaExpr& e) {
    const int32_t p = prm_.p;
    if (e.n_max < p + 1) throw std::runtime_error("grid exhausted");
    SigmaExpr out;
    out.p = p;
    out.n_max = e.n_max - p;
    out.laurent_order = e.laurent_order;
    auto touch = [&](const Exponents& t) -> Table& {
        auto it = out.terms.find(t);
        if (it == out.terms.end())
            it = out.terms.emplace(t, make_table(p, out.n_max)).first;
        return it->second;
    };
    for (auto& [t, ct] : e.terms) {
        Table& dt = touch(t);
        for (int64_t n = 1; n <= out.n_max; ++n) dt[n] = dt[n] + (ct[n + p] - ct[n]);
        if (t.empty()) continue;
        Exponents tp(t.begin(), t.end() - 1);
        Table& jt = touch(tp);
        for (int64_t n = 1; n <= out.n_max; ++n) {
            // sigma_p(t)(n+p) - sigma_p(t)(n) = sigma_p(t')(n) / ahat^{t_l},
            // ahat the unique multiple of p in [n, n+p)
            int64_t ahat = n + ((p - (n % p)) % p);
            jt[n] = jt[n] + ct[n + p] * PadicNumber::from_int(ahat, p, prm_.work_prec)
                                            .pow(-t.back());
        }
    }
    return out;
}

RegularizeResult SigmaContext::regularize_r(const SigmaExpr& e) {
    RegularizeResult r;
    for (auto& [t, ct] : e.terms)
        if (!t.empty()) r.discarded.emplace(t, ct);
    Table empty_coeff =
        e.has_term({}) ? e.terms.at({}) : make_table(prm_.p, e.n_max);
    FitParams fp;
    fp.degree = prm_.degree;
    fp.holdout = prm_.holdout;
    fp.reject_threshold = prm_.fit_threshold;
    fp.tag = "regularize";
    try {
        r.value = psf_fit_laurent(empty_coeff, prm_.p, e.laurent_order, fp, budget_);
    } catch (const fit_rejected& e) {
        throw std::runtime_error(std::string("regularization failed: empty-basis coefficient "
                                             "is not a PSF (") +
                                 e.what() + ")");
    }
    return r;
}

Psf SigmaContext::sigma_tilde(const Composition& c) {
    {
        std::lock_guard<std::mutex> lk(mu_);
        auto it = tilde_cache_.find(c);
        if (it != tilde_cache_.end()) return it->second;
    }
    SigmaExpr e = expand(c);
    Psf f = regularize_r(e).value.psf;
    std::lock_guard<std::mutex> lk(mu_);
    return tilde_cache_.emplace(c, std::move(f)).first->second;
}

PadicNumber SigmaContext::sigma_bar(const Composition& c) {
    return psf_value_at_zero(sigma_tilde(c));
}

PadicNumber SigmaContext::gamma_bar(const Composition& c) {
    if (c.empty()) throw std::invalid_argument("gamma needs depth >= 1");
    if (c.last_m() != 0) return PadicNumber::zero(prm_.p, prm_.work_prec);
    return psf_taylor(sigma_tilde(c.prefix()), c.last_s());
}

SigmaExpr SigmaContext::sigma_mul(const SigmaExpr& a, const SigmaExpr& b) {
    SigmaExpr out;
    out.p = prm_.p;
    out.n_max = std::min(a.n_max, b.n_max);
    out.laurent_order = a.laurent_order + b.laurent_order;
    for (auto& [t1, c1] : a.terms) {
        for (auto& [t2, c2] : b.terms) {
            Table prod = make_table(prm_.p, out.n_max);
            for (int64_t n = 1; n <= out.n_max; ++n) prod[n] = c1[n] * c2[n];
            for (auto& [u, mult] : quasi_shuffle(t1, t2)) {
                auto it = out.terms.find(u);
                if (it == out.terms.end())
                    it = out.terms.emplace(u, make_table(prm_.p, out.n_max))
                             .first;
                PadicNumber mc = PadicNumber::from_int(mult, prm_.p, prm_.work_prec);
                for (int64_t n = 1; n <= out.n_max; ++n)
                    it->second[n] = it->second[n] + mc * prod[n];
            }
        }
    }
    return out;
}

SigmaExpr SigmaContext::gamma_expr(const Composition& c) {
    if (c.empty()) throw std::invalid_argument("gamma needs depth >= 1");
    const int32_t p = prm_.p;
    SigmaExpr inner = expand(c.prefix());
    SigmaExpr out;
    out.p = p;
    out.n_max = prm_.n_max;
    out.laurent_order = c.last_m() == 0 ? c.last_s() : 0;
    for (auto& [t, ct] : inner.terms) {
        Table masked = zero_table();
        for (int64_t n = 1; n <= prm_.n_max; ++n) {
            if ((n - c.last_m()) % p != 0) continue;
            masked[n] = ct[n] * PadicNumber::from_int(n, p, prm_.work_prec).pow(-c.last_s());
        }
        out.terms.emplace(t, std::move(masked));
    }
    return out;
}

SigmaExpr expr_scaled_sum(const std::vector<std::pair<PadicNumber, const SigmaExpr*>>& parts) {
    if (parts.empty()) throw std::invalid_argument("empty combination");
    SigmaExpr out;
    out.p = parts[0].second->p;
    out.n_max = parts[0].second->n_max;
    for (auto& [c, e] : parts) {
        out.laurent_order = std::max(out.laurent_order, e->laurent_order);
        for (auto& [t, ct] : e->terms) {
            auto it = out.terms.find(t);
            if (it == out.terms.end())
                it = out.terms
                         .emplace(t, Table(static_cast<size_t>(out.n_max) + 1,
                                           PadicNumber::exact_zero(out.p)))
                         .first;
            for (int64_t n = 1; n <= out.n_max; ++n) it->second[n] = it->second[n] + c * ct[n];
        }
    }
    return out;
}

void expr_axpy(SigmaExpr& acc, const PadicNumber& c, const SigmaExpr& e) {
    acc.laurent_order = std::max(acc.laurent_order, e.laurent_order);
    for (auto& [t, ct] : e.terms) {
        auto it = acc.terms.find(t);
        if (it == acc.terms.end())
            it = acc.terms
                     .emplace(t, Table(static_cast<size_t>(acc.n_max) + 1,
                                       PadicNumber::exact_zero(acc.p)))
                     .first;
        for (int64_t n = 1; n <= acc.n_max; ++n) it->second[n] = it->second[n] + c * ct[n];
    }
}

std::set<Exponents> SigmaContext::support_of(const Composition& c) {
    if (c.empty()) return {Exponents{}};
    std::set<Exponents> inner = support_of(c.prefix());
    std::set<Exponents> out;
    // mirrors the expansion mechanisms, keys only
    std::function<void(const Exponents&)> gset = [&](const Exponents& u) {
        out.insert(u);
        if (u.empty()) return;
        Exponents up(u.begin(), u.end() - 1);
        for (int32_t e = 1; e <= u.back(); ++e) {
            Exponents ext = up;
            ext.push_back(e);
            out.insert(ext);
        }
        gset(up);
    };
    for (const Exponents& u : inner) {
        if (c.last_m() != 0 || c.last_s() == 0) {
            gset(u);
        } else {
            for (int32_t e = 1; e <= c.last_s(); ++e) {
                Exponents ext = u;
                ext.push_back(e);
                out.insert(ext);
            }
            gset(u);
        }
    }
    return out;
}

SigmaExpr SigmaContext::delta_descent_expand(const Composition& c) {
    {
        std::lock_guard<std::mutex> lk(mu_);
        auto it = descent_cache_.find(c);
        if (it != descent_cache_.end()) return it->second;
    }
    SigmaExpr e = delta_descent_uncached(c);
    std::lock_guard<std::mutex> lk(mu_);
    return descent_cache_.emplace(c, std::move(e)).first->second;
}

SigmaExpr SigmaContext::delta_descent_uncached(const Composition& c) {
    const int32_t p = prm_.p;
    SigmaExpr out;
    out.p = p;
    out.n_max = prm_.n_max;
    if (c.empty()) {
        Table ones = zero_table();
        PadicNumber one = PadicNumber::from_int(1, p, prm_.work_prec);
        for (int64_t n = 1; n <= prm_.n_max; ++n) ones[n] = one;
        out.terms[{}] = std::move(ones);
        return out;
    }
    SigmaExpr inner = delta_descent_expand(c.prefix());
    const int32_t s = c.last_s(), m = c.last_m();
    std::vector<Exponents> T;
    for (auto& t : support_of(c)) T.push_back(t);
    std::sort(T.begin(), T.end(), [](const Exponents& a, const Exponents& b) {
        if (a.size() != b.size()) return a.size() > b.size();
        return a < b;
    });
    std::map<Exponents, size_t> index;
    for (size_t i = 0; i < T.size(); ++i) index[T[i]] = i;
    for (auto& t : T) out.terms.emplace(t, zero_table());
    const Table& F = brute_table(c);

    for (int32_t r = 0; r < p; ++r) {
        int64_t n0 = r == 0 ? p : r;
        std::vector<int64_t> pts;
        for (int64_t n = n0; n <= prm_.n_max; n += p) pts.push_back(n);
        const size_t NP = pts.size();
        if (NP < T.size() + 6) throw std::runtime_error("delta-descent: grid too short");

        // source_y(idx) over y in T (plus possibly stripped tuples of inner
        // support, which are contained in T by construction)
        std::map<Exponents, std::vector<PadicNumber>> source;
        auto src = [&](const Exponents& y) -> std::vector<PadicNumber>& {
            auto it = source.find(y);
            if (it == source.end())
                it = source
                         .emplace(y, std::vector<PadicNumber>(NP,
                                                              PadicNumber::exact_zero(p)))
                         .first;
            return it->second;
        };
        for (size_t i = 0; i + 1 < NP; ++i) {
            int64_t n = pts[i];
            int64_t adeg = n + (((m - r) % p + p) % p);   // index admitted in [n, n+p)
            int64_t ahat = n + ((p - r % p) % p);          // multiple of p in [n, n+p)
            PadicNumber lead = PadicNumber::from_int(adeg, p, prm_.work_prec).pow(-s);
            for (auto& [u, cu] : inner.terms) {
                PadicNumber v = cu[adeg] * lead;
                src(u)[i] = src(u)[i] + v;
                if (!u.empty() && ahat < adeg) {
                    Exponents up(u.begin(), u.end() - 1);
                    src(up)[i] =
                        src(up)[i] +
                        v * PadicNumber::from_int(ahat, p, prm_.work_prec).pow(-u.back());
                }
            }
        }

        // Affine solve: w_x = kappa_x + W_x + sum_z A_{x,z} kappa_z, telescoped
        // from the per-symbol difference equations, deepest layer first.
        std::vector<std::vector<PadicNumber>> W(
            T.size(), std::vector<PadicNumber>(NP, PadicNumber::exact_zero(p)));
        std::vector<std::map<size_t, std::vector<PadicNumber>>> A(T.size());
        for (size_t yi = 0; yi < T.size(); ++yi) {
            const Exponents& y = T[yi];
            std::vector<size_t> exts;
            std::vector<int32_t> extj;
            for (auto& [t, idx] : index) {
                if (t.size() == y.size() + 1 &&
                    std::equal(y.begin(), y.end(), t.begin())) {
                    exts.push_back(idx);
                    extj.push_back(t.back());
                }
            }
            auto arow = [&](size_t zi) -> std::vector<PadicNumber>& {
                auto it = A[yi].find(zi);
                if (it == A[yi].end())
                    it = A[yi]
                             .emplace(zi, std::vector<PadicNumber>(
                                              NP, PadicNumber::exact_zero(p)))
                             .first;
                return it->second;
            };
            const std::vector<PadicNumber>& sy = src(y);
            for (size_t i = 0; i + 1 < NP; ++i) {
                int64_t n = pts[i];
                int64_t ahat = n + ((p - r % p) % p);
                PadicNumber B = sy[i];
                for (size_t k = 0; k < exts.size(); ++k) {
                    PadicNumber f =
                        PadicNumber::from_int(ahat, p, prm_.work_prec).pow(-extj[k]);
                    B = B - W[exts[k]][i + 1] * f;
                    // kappa of the extension enters w_ext directly...
                    auto& ak = arow(exts[k]);
                    ak[i + 1] = ak[i + 1] - f;  // marker added below when telescoping
                }
                W[yi][i + 1] = W[yi][i] + B;
            }
            // telescope the kappa-coefficient rows: each step's contribution
            // includes the deeper rows' own A entries
            for (size_t k = 0; k < exts.size(); ++k) {
                for (auto& [zi, aext] : A[exts[k]]) {
                    auto& ay = arow(zi);
                    for (size_t i = 0; i + 1 < NP; ++i) {
                        int64_t n = pts[i];
                        int64_t ahat = n + ((p - r % p) % p);
                        PadicNumber f =
                            PadicNumber::from_int(ahat, p, prm_.work_prec).pow(-extj[k]);
                        ay[i + 1] = ay[i + 1] - aext[i + 1] * f;
                    }
                }
            }
            // prefix-sum the accumulated per-step contributions into A_{y,z}
            for (auto& [zi, ay] : A[yi])
                for (size_t i = 1; i < NP; ++i) ay[i] = ay[i] + ay[i - 1];
        }

        // The difference equations leave a gauge freedom: shifting the kappa
        // of a deep coefficient while absorbing the matching divergent
        // partial sum into a shallower one preserves every delta relation
        // and every pointwise value. Analyticity is what kills it (that is
        // the content of freeness), so the anchor rows are augmented with
        // smoothness rows: a branch polynomial of degree <= D has vanishing
        // (D+1)-st difference along the class, the divergent gauge
        // directions do not.
        size_t M = T.size(), K = M + 4;
        std::vector<std::vector<PadicNumber>> rows;
        std::vector<PadicNumber> rhs;
        size_t stride = std::max<size_t>(1, (NP - 1) / K);
        for (size_t a = 0; a < K; ++a) {
            size_t i = NP - 1 - a * stride;
            int64_t n = pts[i];
            std::vector<PadicNumber> row(M, PadicNumber::exact_zero(p));
            PadicNumber b = F[n];
            for (size_t xi = 0; xi < M; ++xi) {
                PadicNumber sx = T[xi].empty() ? PadicNumber::from_int(1, p, prm_.work_prec)
                                               : basis_table(T[xi])[n];
                row[xi] = row[xi] + sx;  // kappa_x itself
                for (auto& [zi, ax] : A[xi]) row[zi] = row[zi] + ax[i] * sx;
                b = b - W[xi][i] * sx;
            }
            rows.push_back(std::move(row));
            rhs.push_back(b);
        }
        {
            const int dord = prm_.degree + 1;
            auto diff_at = [&](const std::vector<PadicNumber>& v, size_t i0) {
                // (D+1)-st forward difference of the class sequence at i0
                PadicNumber acc = PadicNumber::exact_zero(p);
                for (int k = 0; k <= dord; ++k) {
                    __int128 bin = binom128(dord, k);
                    if ((dord - k) % 2 == 1) bin = -bin;
                    acc = acc + PadicNumber::from_rational128(bin, 1, p, prm_.work_prec) *
                                    v[i0 + k];
                }
                return acc;
            };
            std::vector<size_t> offsets;
            for (int k = 0; k < 5; ++k)
                offsets.push_back(static_cast<size_t>(k) * (NP - dord - 1) / 4);
            for (size_t xi = 0; xi < M; ++xi) {
                for (size_t off : offsets) {
                    std::vector<PadicNumber> row(M, PadicNumber::exact_zero(p));
                    bool nontrivial = false;
                    for (auto& [zi, ax] : A[xi]) {
                        row[zi] = diff_at(ax, off);
                        if (!row[zi].is_zero()) nontrivial = true;
                    }
                    if (!nontrivial) continue;
                    rows.push_back(std::move(row));
                    rhs.push_back(-diff_at(W[xi], off));
                }
            }
        }
        std::vector<PadicNumber> kappa;
        try {
            kappa = padic_solve(rows, rhs);
        } catch (const std::exception& e) {
            throw std::runtime_error(
                std::string("delta-descent: singular anchor system (freeness shadow): ") +
                e.what());
        }
        for (size_t xi = 0; xi < M; ++xi) {
            Table& wt = out.terms[T[xi]];
            for (size_t i = 0; i < NP; ++i) {
                PadicNumber v = W[xi][i] + kappa[xi];
                for (auto& [zi, ax] : A[xi]) v = v + ax[i] * kappa[zi];
                wt[pts[i]] = v;
            }
        }
        for (size_t i = 0; i < NP; ++i) {
            PadicNumber resid = F[pts[i]];
            for (size_t xi = 0; xi < M; ++xi) {
                PadicNumber sx = T[xi].empty()
                                     ? PadicNumber::from_int(1, p, prm_.work_prec)
                                     : basis_table(T[xi])[pts[i]];
                resid = resid - out.terms[T[xi]][pts[i]] * sx;
            }
            if (!resid.is_zero())
                throw std::runtime_error(
                    "delta-descent: grid verification failed at n=" + std::to_string(pts[i]) +
                    " (residual valuation " + std::to_string(resid.valuation()) + ")");
        }
    }
    return out;
}

std::vector<PadicNumber> padic_solve(std::vector<std::vector<PadicNumber>> M,
                                     std::vector<PadicNumber> rhs, int64_t* out_residual_val) {
    const size_t R = M.size();
    if (R == 0) throw std::invalid_argument("empty system");
    const size_t C = M[0].size();
    if (R < C) throw std::invalid_argument("underdetermined system");
    std::vector<size_t> pivot_row(C);
    size_t row = 0;
    for (size_t col = 0; col < C; ++col) {
        size_t best = SIZE_MAX;
        int64_t best_val = INT64_MAX;
        for (size_t r = row; r < R; ++r) {
            if (M[r][col].is_zero()) continue;
            if (M[r][col].valuation() < best_val) {
                best_val = M[r][col].valuation();
                best = r;
            }
        }
        if (best == SIZE_MAX) throw std::runtime_error("singular p-adic system");
        std::swap(M[best], M[row]);
        std::swap(rhs[best], rhs[row]);
        PadicNumber inv = M[row][col].inv();
        for (size_t j = col; j < C; ++j) M[row][j] = M[row][j] * inv;
        rhs[row] = rhs[row] * inv;
        for (size_t r = 0; r < R; ++r) {
            if (r == row) continue;
            PadicNumber f = M[r][col];
            for (size_t j = col; j < C; ++j) M[r][j] = M[r][j] - f * M[row][j];
            rhs[r] = rhs[r] - f * rhs[row];
        }
        pivot_row[col] = row;
        ++row;
    }
    if (out_residual_val) {
        int64_t rv = INT64_MAX;
        for (size_t r = row; r < R; ++r) rv = std::min(rv, rhs[r].valuation());
        *out_residual_val = rv;
    }
    std::vector<PadicNumber> x(C);
    for (size_t col = 0; col < C; ++col) x[col] = rhs[pivot_row[col]];
    return x;
}

}  // namespace pmzv
