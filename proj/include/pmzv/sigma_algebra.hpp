#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <set>
#include <vector>

#include "pmzv/composition.hpp"
#include "pmzv/oracle.hpp"
#include "pmzv/padic.hpp"
#include "pmzv/psf.hpp"

namespace pmzv {

/**
 * Element of the module generated by the divergent basis sums sigma_p(t)
 * over piecewise-series coefficients: a finite map basis tuple -> coefficient
 * table. The evaluation contract is
 *     eval(expr, n) = sum_t  coeff_t(n) * sigma_p(t)(n)
 * exactly at tracked precision for every grid point n. Coefficient tables
 * are exact; fits of coefficients happen lazily and only for limits and
 * Taylor data. laurent_order bounds the negative n-powers carried by the
 * empty-basis coefficient on the zero class.
 */
struct SigmaExpr {
    int32_t p = 0;
    int64_t n_max = 0;
    int laurent_order = 0;
    std::map<Exponents, Table> terms;

    bool has_term(const Exponents& t) const { return terms.count(t) > 0; }
};

SigmaExpr expr_scaled_sum(const std::vector<std::pair<PadicNumber, const SigmaExpr*>>& parts);

/// acc += c * e, termwise on coefficient tables.
void expr_axpy(SigmaExpr& acc, const PadicNumber& c, const SigmaExpr& e);

struct RegularizeResult {
    LaurentPsf value;
    /// Coefficients of the discarded (nonempty-basis) terms, for diagnostics.
    std::map<Exponents, Table> discarded;
};

/**
 * Shared caches and the expansion / regularization calculus for one prime
 * and one grid. Expansions are memoized per composition; all public methods
 * are safe to call from several threads.
 */
class SigmaContext {
public:
    struct Params {
        int32_t p = 5;
        int64_t n_max = 0;
        int64_t work_prec = 0;
        int degree = 8;
        int holdout = 3;
        int64_t fit_threshold = 0;  // reject fits with held-out residual below this
        int memo_depth = 2;         // expansions of deeper compositions are not cached
    };

    SigmaContext(const Params& prm, PrecisionBudget* budget);

    const Params& params() const { return prm_; }
    PrecisionBudget* budget() const { return budget_; }
    OracleCtx oracle_ctx() const { return {prm_.p, prm_.work_prec, budget_}; }

    /// Brute table of the basis function sigma_p(t), memoized.
    const Table& basis_table(const Exponents& t);
    /// Brute table of sigma(c), memoized.
    const Table& brute_table(const Composition& c);

    /// Constructive expansion of sigma(c) into the basis (Abel summation
    /// plus branch-0 Taylor splitting), exact on the grid.
    SigmaExpr expand(const Composition& c);

    PadicNumber eval(const SigmaExpr& e, int64_t n);

    /// Termwise finite difference with step p: the result represents
    /// n -> e(n+p) - e(n) on 1..n_max-p.
    SigmaExpr delta(const SigmaExpr& e);

    /// Projection onto the empty-basis coefficient, fitted.
    RegularizeResult regularize_r(const SigmaExpr& e);

    /// Regularization of sigma(c): fitted empty-basis coefficient of expand(c).
    Psf sigma_tilde(const Composition& c);
    /// Regularized value: sigma_tilde at 0.
    PadicNumber sigma_bar(const Composition& c);
    /// Regularized gamma value: 0 when the last residue is nonzero, else the
    /// s_k-th branch-0 Taylor coefficient of sigma_tilde(prefix).
    PadicNumber gamma_bar(const Composition& c);

    /// Product in the basis via the quasi-shuffle table, coefficients pointwise.
    SigmaExpr sigma_mul(const SigmaExpr& a, const SigmaExpr& b);

    /// gamma(c) as an expression: mask to the last residue class, divide by
    /// n^{s_k}, against the expansion of the prefix.
    SigmaExpr gamma_expr(const Composition& c);

    /**
     * Independent second route to the expansion coefficients ("delta
     * stripping"): solve the step-p difference equations that the basis
     * identity delta sigma_p(..., j)(n) = n^{-j} sigma_p(...)(n) forces on
     * the coefficients, layer by layer from the deepest basis element, then
     * pin the telescoping constants per residue class by a small anchor
     * solve and verify the result against the brute table on the whole
     * grid. Freeness of the basis is what makes the answer unique; a
     * singular anchor system or a failed grid verification is a hard error.
     */
    SigmaExpr delta_descent_expand(const Composition& c);

    /// Structural basis support of expand(c) (keys only, no values).
    std::set<Exponents> support_of(const Composition& c);

    Table zero_table() const;

private:
    Params prm_;
    PrecisionBudget* budget_;
    std::mutex mu_;
    std::map<Exponents, Table> basis_cache_;
    std::map<Composition, Table> brute_cache_;
    std::map<Composition, SigmaExpr> expand_cache_;
    std::map<Composition, SigmaExpr> descent_cache_;
    std::map<Composition, Psf> tilde_cache_;

    SigmaExpr expand_uncached(const Composition& c);
    void accumulate_outer(SigmaExpr& out, const Table& f, int32_t s, int32_t m,
                          const Exponents& t, int sign);
    void g_mechanism(SigmaExpr& out, const Table& u, const Exponents& t, int sign);
    std::vector<PadicNumber> taylor_split(const Table& f, int32_t s);
    void add_to_term(SigmaExpr& out, const Exponents& t, const Table& tab, int sign);
    SigmaExpr delta_descent_uncached(const Composition& c);
};

/// Gaussian elimination over Q_p with valuation pivoting; M is row-major,
/// rows >= cols required. Extra rows are consistency-checked; their residual
/// valuation floor is written to out_residual_val when given.
std::vector<PadicNumber> padic_solve(std::vector<std::vector<PadicNumber>> M,
                                     std::vector<PadicNumber> rhs,
                                     int64_t* out_residual_val = nullptr);

}  // namespace pmzv
