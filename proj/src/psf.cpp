#include "pmzv/psf.hpp"

#include <cassert>

#include "pmzv/rational.hpp"

namespace pmzv {

namespace {

std::vector<PadicNumber> zero_poly(int32_t p, int degree) {
    return std::vector<PadicNumber>(degree + 1, PadicNumber::exact_zero(p));
}

PadicNumber poly_eval(const std::vector<PadicNumber>& c, const PadicNumber& x) {
    PadicNumber acc = c.back();
    for (size_t j = c.size() - 1; j-- > 0;) acc = acc * x + c[j];
    return acc;
}

}  // namespace

Psf::Psf(int32_t p, int degree, int64_t domain_start)
    : p_(p), degree_(degree), domain_start_(domain_start), branches_(p) {}

Psf Psf::constant(const PadicNumber& c, int32_t p, int degree) {
    Psf f(p, degree);
    for (int i = 0; i < p; ++i) {
        f.branches_[i] = zero_poly(p, degree);
        f.branches_[i][0] = c;
    }
    return f;
}

Psf Psf::iota(int32_t p, int degree, int64_t prec) {
    Psf f(p, degree);
    for (int i = 0; i < p; ++i) {
        f.branches_[i] = zero_poly(p, degree);
        f.branches_[i][0] = PadicNumber::from_int(i, p, prec);
        if (degree >= 1) f.branches_[i][1] = PadicNumber::from_int(1, p, prec);
    }
    return f;
}

Psf Psf::power_mask(int32_t p, int s, int degree, int64_t prec) {
    Psf f(p, degree);
    f.branches_[0] = zero_poly(p, degree);
    for (int i = 1; i < p; ++i) {
        f.branches_[i] = zero_poly(p, degree);
        for (int j = 0; j <= degree; ++j) {
            // coefficient of x^j in (x+i)^s around x=0
            if (s >= 0 && j > s) break;
            __int128 num, den = 1;
            if (s >= 0) {
                num = binom128(s, j);
                for (int e = 0; e < s - j; ++e) num *= i;
            } else {
                num = binom128(-s + j - 1, j);
                if (j % 2 == 1) num = -num;
                for (int e = 0; e < j - s; ++e) den *= i;
            }
            f.branches_[i][j] = PadicNumber::from_rational128(num, den, p, prec);
        }
    }
    return f;
}

Psf Psf::indicator(int32_t p, int residue, int degree, int64_t prec) {
    Psf f(p, degree);
    for (int i = 0; i < p; ++i) f.branches_[i] = zero_poly(p, degree);
    f.branches_[residue][0] = PadicNumber::from_int(1, p, prec);
    return f;
}

PadicNumber Psf::eval(int64_t n) const {
    int i = static_cast<int>(((n % p_) + p_) % p_);
    return poly_eval(branches_[i], PadicNumber::from_int(n - i, p_, 64));
}

std::string Psf::to_string() const {
    std::string s = "psf(p=" + std::to_string(p_) + ", D=" + std::to_string(degree_) + ")";
    return s;
}

Psf psf_add(const Psf& f, const Psf& g) {
    assert(f.prime() == g.prime());
    int d = std::min(f.degree(), g.degree());
    Psf r(f.prime(), d, std::max(f.domain_start(), g.domain_start()));
    for (int i = 0; i < f.prime(); ++i) {
        r.branch(i).reserve(d + 1);
        for (int j = 0; j <= d; ++j) r.branch(i).push_back(f.branch(i)[j] + g.branch(i)[j]);
    }
    return r;
}

Psf psf_mul(const Psf& f, const Psf& g) {
    assert(f.prime() == g.prime());
    int32_t p = f.prime();
    int d = std::min(f.degree(), g.degree());
    Psf r(p, d, std::max(f.domain_start(), g.domain_start()));
    for (int i = 0; i < p; ++i) {
        auto& out = r.branch(i);
        out = zero_poly(p, d);
        for (int j = 0; j <= d; ++j) {
            PadicNumber acc = f.branch(i)[0] * g.branch(i)[j];
            for (int k = 1; k <= j; ++k) acc = acc + f.branch(i)[k] * g.branch(i)[j - k];
            out[j] = acc;
        }
    }
    return r;
}

Psf psf_scale(const Psf& f, const PadicNumber& c) {
    Psf r(f.prime(), f.degree(), f.domain_start());
    for (int i = 0; i < f.prime(); ++i) {
        r.branch(i).reserve(f.degree() + 1);
        for (auto& a : f.branch(i)) r.branch(i).push_back(a * c);
    }
    return r;
}

namespace {

Psf div_by_n(const Psf& f, bool zero_off_class) {
    int32_t p = f.prime();
    int d = f.degree() - 1;
    if (d < 0) throw std::invalid_argument("degree too small for difference quotient");
    Psf r(p, d, f.domain_start());
    // branch 0: (p_0(x) - p_0(0))/x
    r.branch(0).assign(f.branch(0).begin() + 1, f.branch(0).end());
    for (int i = 1; i < p; ++i) {
        if (zero_off_class) {
            r.branch(i) = zero_poly(p, d);
            continue;
        }
        // synthetic division: q with (x+i) q(x) = p_i(x), truncated
        auto& q = r.branch(i);
        q = zero_poly(p, d);
        PadicNumber inv_i = PadicNumber::from_int(i, p, 64).inv();
        q[0] = f.branch(i)[0] * inv_i;
        for (int j = 1; j <= d; ++j) q[j] = (f.branch(i)[j] - q[j - 1]) * inv_i;
    }
    return r;
}

}  // namespace

Psf psf_round1(const Psf& f) { return div_by_n(f, false); }
Psf psf_sharp1(const Psf& f) { return div_by_n(f, true); }

Psf psf_prefix_sum(const Psf& f, int64_t n0, PrecisionBudget* budget) {
    int32_t p = f.prime();
    int d_out = f.degree() + 1;
    Psf g(p, d_out, n0);
    for (int r = 0; r < p; ++r) g.branch(r) = zero_poly(p, d_out);
    for (int r = 0; r < p; ++r) {
        for (int i = 0; i < p; ++i) {
            int rho = ((r - i) % p + p) % p;
            int64_t delta = r - i - rho;  // y = x + delta where y = n - i - rho = p*J
            int64_t j0 = 0;
            if (i < n0) j0 = (n0 - i + p - 1) / p;
            for (int d = 0; d <= f.degree(); ++d) {
                const PadicNumber& c = f.branch(i)[d];
                if (c.is_zero() && c.precision() >= PadicNumber::kPrecInf / 2) continue;
                auto fh = faulhaber_poly(d);
                // Q(x) = p^d (S_d((x+delta)/p) - S_d(j0-1) + [j0==0 && d==0])
                std::vector<Rational> q(d_out + 1, Rational(0));
                Rational pd(1);
                for (int e = 0; e < d; ++e) pd = pd * Rational(p);
                for (size_t v = 0; v < fh.size(); ++v) {
                    if (fh[v].is_zero()) continue;
                    Rational pv(1);
                    for (size_t e = 0; e < v; ++e) pv = pv / Rational(p);
                    // (x+delta)^v expanded
                    for (size_t u = 0; u <= v; ++u) {
                        __int128 dpow = 1;
                        for (size_t e = 0; e < v - u; ++e) dpow *= delta;
                        q[u] = q[u] + fh[v] * pv * Rational(binom128(static_cast<int>(v),
                                                                    static_cast<int>(u)), 1) *
                                          Rational(dpow, 1);
                    }
                }
                Rational base(0);
                if (j0 == 0) {
                    if (d == 0) base = Rational(1);
                } else {
                    // -S_d(j0-1)
                    __int128 jp = 1;
                    Rational sj(0);
                    for (size_t v = 0; v < fh.size(); ++v) {
                        sj = sj + fh[v] * Rational(jp, 1);
                        jp *= (j0 - 1);
                    }
                    base = -sj;
                }
                q[0] = q[0] + base;
                for (int u = 0; u <= d_out; ++u) {
                    if (q[u].is_zero()) continue;
                    Rational qq = q[u] * pd;
                    if (budget && !qq.is_zero() && qq.vp(p) < 0)
                        budget->charge("faulhaber-vsc", -qq.vp(p));
                    g.branch(r)[u] = g.branch(r)[u] + mul_rational(c, qq, p);
                }
            }
        }
    }
    return g;
}

PadicNumber psf_value_at_zero(const Psf& f) { return f.branch(0)[0]; }

PadicNumber psf_taylor(const Psf& f, int j) {
    if (j > f.degree()) throw std::out_of_range("degree exceeded");
    return f.branch(0)[j];
}

namespace {

std::vector<int64_t> branch_nodes(int32_t p, int residue, int count, int64_t domain_start) {
    int64_t first = residue == 0 ? p : residue;
    while (first < domain_start) first += p;
    std::vector<int64_t> nodes(count);
    for (int j = 0; j < count; ++j) nodes[j] = first + static_cast<int64_t>(j) * p;
    return nodes;
}

}  // namespace

std::vector<PadicNumber> fit_branch_poly(const Table& tab, int32_t p, int residue, int degree,
                                         int64_t domain_start, PrecisionBudget* budget) {
    auto nodes = branch_nodes(p, residue, degree + 1, domain_start);
    if (nodes.back() >= static_cast<int64_t>(tab.size()))
        throw std::invalid_argument("table too short for fit nodes");
    std::vector<PadicNumber> dd(degree + 1);
    for (int j = 0; j <= degree; ++j) dd[j] = tab[nodes[j]];
    int64_t prec_guess = 0;
    for (auto& v : dd)
        if (v.precision() < PadicNumber::kPrecInf / 2)
            prec_guess = std::max(prec_guess, v.precision());
    prec_guess = (prec_guess == 0 ? 80 : prec_guess + 64);
    for (int k = 1; k <= degree; ++k) {
        PadicNumber step = PadicNumber::from_int(static_cast<int64_t>(k) * p, p, prec_guess);
        PadicNumber inv = step.inv();
        for (int j = degree; j >= k; --j) dd[j] = (dd[j] - dd[j - 1]) * inv;
    }
    if (budget) {
        int64_t loss = degree;
        for (int k = 2; k <= degree; ++k)
            for (int64_t q = k; q % p == 0; q /= p) ++loss;
        budget->charge("fit-divdiff", loss);
    }
    // Newton form -> monomial coefficients in x = n - residue.
    std::vector<PadicNumber> res{dd[degree]};
    for (int k = degree - 1; k >= 0; --k) {
        std::vector<PadicNumber> nxt(res.size() + 1, PadicNumber::zero(p, prec_guess));
        PadicNumber xk = PadicNumber::from_int(nodes[k] - residue, p, prec_guess);
        for (size_t j = 0; j < res.size(); ++j) {
            nxt[j + 1] = nxt[j + 1] + res[j];
            nxt[j] = nxt[j] - res[j] * xk;
        }
        nxt[0] = nxt[0] + dd[k];
        res = std::move(nxt);
    }
    res.resize(degree + 1, PadicNumber::zero(p, prec_guess));
    return res;
}

Psf psf_fit(const Table& tab, int32_t p, const FitParams& fp, PrecisionBudget* budget) {
    Psf f(p, fp.degree, fp.domain_start);
    int64_t tail = INT64_MAX;
    for (int i = 0; i < p; ++i) {
        f.branch(i) = fit_branch_poly(tab, p, i, fp.degree, fp.domain_start, budget);
        auto nodes = branch_nodes(p, i, fp.degree + 1, fp.domain_start);
        for (int h = 1; h <= fp.holdout; ++h) {
            int64_t n = nodes.back() + static_cast<int64_t>(h) * p;
            if (n >= static_cast<int64_t>(tab.size())) break;
            PadicNumber pred = poly_eval(f.branch(i), PadicNumber::from_int(n - i, p, 64));
            tail = std::min(tail, PadicNumber::residual_valuation(tab[n], pred));
        }
    }
    if (tail == INT64_MAX) throw std::invalid_argument("no held-out samples available");
    if (tail < fp.reject_threshold)
        throw fit_rejected("fit rejected: function not PSF-like at degree " +
                           std::to_string(fp.degree) + " (residual valuation " +
                           std::to_string(tail) + " < threshold " +
                           std::to_string(fp.reject_threshold) + ", " + fp.tag + ")");
    f.set_tail_valuation_bound(tail);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j <= fp.degree; ++j)
            f.branch(i)[j] = f.branch(i)[j].truncated(
                std::min(f.branch(i)[j].precision(), tail - j));
    return f;
}

PadicNumber LaurentPsf::eval(int64_t n) const {
    PadicNumber v = psf.eval(n);
    if (n % psf.prime() == 0 && !principal.empty()) {
        PadicNumber ninv = PadicNumber::from_int(n, psf.prime(), 64).inv();
        PadicNumber acc = PadicNumber::zero(psf.prime(), principal[0].precision());
        for (size_t j = principal.size(); j-- > 0;) acc = (acc + principal[j]) * ninv;
        v = v + acc;
    }
    return v;
}

bool LaurentPsf::has_principal_part() const {
    for (auto& c : principal)
        if (!c.is_zero()) return true;
    return false;
}

LaurentPsf psf_fit_laurent(const Table& tab, int32_t p, int laurent_order, const FitParams& fp,
                           PrecisionBudget* budget) {
    if (laurent_order == 0) return LaurentPsf{psf_fit(tab, p, fp, budget), {}};
    const int L = laurent_order;
    // Branch 0 is fitted as x^L * f; the low coefficients are the principal part.
    Table shifted(tab.size());
    for (int64_t n = 0; n < static_cast<int64_t>(tab.size()); ++n) {
        if (n == 0 || n % p != 0) continue;
        shifted[n] = tab[n] * PadicNumber::from_int(n, p, 64).pow(L);
    }
    auto raw = fit_branch_poly(shifted, p, 0, fp.degree + L, fp.domain_start, budget);
    // Held-out validation on the shifted branch.
    auto nodes = branch_nodes(p, 0, fp.degree + L + 1, fp.domain_start);
    int64_t tail = INT64_MAX;
    for (int h = 1; h <= fp.holdout; ++h) {
        int64_t n = nodes.back() + static_cast<int64_t>(h) * p;
        if (n >= static_cast<int64_t>(tab.size())) break;
        PadicNumber pred = poly_eval(raw, PadicNumber::from_int(n, p, 64));
        tail = std::min(tail, PadicNumber::residual_valuation(shifted[n], pred));
    }
    if (tail == INT64_MAX) throw std::invalid_argument("no held-out samples available");
    if (tail < fp.reject_threshold)
        throw fit_rejected("fit rejected: function not PSF-like at degree " +
                           std::to_string(fp.degree) + " (Laurent residual valuation " +
                           std::to_string(tail) + ", " + fp.tag + ")");
    for (size_t t = 0; t < raw.size(); ++t)
        raw[t] = raw[t].truncated(std::min(raw[t].precision(), tail - static_cast<int64_t>(t)));

    LaurentPsf out;
    out.psf = Psf(p, fp.degree, fp.domain_start);
    out.psf.set_tail_valuation_bound(tail);
    out.principal.resize(L);
    for (int j = 1; j <= L; ++j) out.principal[j - 1] = raw[L - j];
    out.psf.branch(0).assign(raw.begin() + L, raw.end());
    FitParams rest = fp;
    for (int i = 1; i < p; ++i) {
        out.psf.branch(i) = fit_branch_poly(tab, p, i, fp.degree, fp.domain_start, budget);
        auto ni = branch_nodes(p, i, fp.degree + 1, fp.domain_start);
        int64_t tail_i = INT64_MAX;
        for (int h = 1; h <= rest.holdout; ++h) {
            int64_t n = ni.back() + static_cast<int64_t>(h) * p;
            if (n >= static_cast<int64_t>(tab.size())) break;
            PadicNumber pred = poly_eval(out.psf.branch(i), PadicNumber::from_int(n - i, p, 64));
            tail_i = std::min(tail_i, PadicNumber::residual_valuation(tab[n], pred));
        }
        if (tail_i < fp.reject_threshold)
            throw fit_rejected("fit rejected: function not PSF-like at degree " +
                               std::to_string(fp.degree) + " (branch " + std::to_string(i) +
                               ", " + fp.tag + ")");
        for (int j = 0; j <= fp.degree; ++j)
            out.psf.branch(i)[j] =
                out.psf.branch(i)[j].truncated(std::min(out.psf.branch(i)[j].precision(),
                                                        tail_i - j));
    }
    return out;
}

Psf psf_project_principal(const LaurentPsf& f) { return f.psf; }

}  // namespace pmzv
