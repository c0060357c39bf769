#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pmzv/oracle.hpp"
#include "pmzv/padic.hpp"

namespace pmzv {

/// A held-out validation residual fell below the configured threshold: the
/// sampled function is not series-like at this degree. Load-bearing error;
/// it is how non-membership in the power-series-function algebra shows up.
struct fit_rejected : std::runtime_error {
    explicit fit_rejected(const std::string& what) : std::runtime_error(what) {}
};

/**
 * Piecewise series function: one truncated power series per residue class
 * mod p. Branch i holds coefficients of a series in x = n - i, valid on
 * n == i (mod p), n >= domain_start. The value "at zero" is the constant
 * term of branch 0 (the p-adic limit along n -> 0).
 */
class Psf {
public:
    Psf() = default;
    Psf(int32_t p, int degree, int64_t domain_start = 1);

    static Psf constant(const PadicNumber& c, int32_t p, int degree);
    /// The identity function n |-> n.
    static Psf iota(int32_t p, int degree, int64_t prec);
    /// n^s off the zero class, 0 on it (s may be negative).
    static Psf power_mask(int32_t p, int s, int degree, int64_t prec);
    /// 1 on class `residue`, 0 elsewhere.
    static Psf indicator(int32_t p, int residue, int degree, int64_t prec);

    int32_t prime() const { return p_; }
    int degree() const { return degree_; }
    int64_t domain_start() const { return domain_start_; }
    const std::vector<PadicNumber>& branch(int i) const { return branches_[i]; }
    std::vector<PadicNumber>& branch(int i) { return branches_[i]; }
    std::optional<int64_t> tail_valuation_bound() const { return tail_bound_; }
    void set_tail_valuation_bound(int64_t b) { tail_bound_ = b; }

    PadicNumber eval(int64_t n) const;

    std::string to_string() const;

private:
    int32_t p_ = 0;
    int degree_ = 0;
    int64_t domain_start_ = 1;
    std::optional<int64_t> tail_bound_;
    std::vector<std::vector<PadicNumber>> branches_;
};

Psf psf_add(const Psf& f, const Psf& g);
Psf psf_mul(const Psf& f, const Psf& g);
Psf psf_scale(const Psf& f, const PadicNumber& c);

/// f^(1): (f(n) - f(0))/n on the zero class, f(n)/n off it. Degree drops by 1.
Psf psf_round1(const Psf& f);
/// f^[1]: (f(n) - f(0))/n on the zero class, 0 off it. Degree drops by 1.
Psf psf_sharp1(const Psf& f);

/// G(n) = sum_{n0 <= k <= n} f(k), via exact-rational Faulhaber polynomials
/// per residue-class progression. Degree grows by 1. Denominators divisible
/// by p (von Staudt-Clausen) are logged to the budget.
Psf psf_prefix_sum(const Psf& f, int64_t n0, PrecisionBudget* budget = nullptr);

PadicNumber psf_value_at_zero(const Psf& f);
/// Raw branch-0 coefficient a_{0,j}; the j-th derivative at 0 is j! times it.
PadicNumber psf_taylor(const Psf& f, int j);

struct FitParams {
    int degree = 8;
    int64_t domain_start = 1;
    int holdout = 3;
    // Reject when the held-out residual valuation drops below this.
    int64_t reject_threshold = 0;
    std::string tag = "fit";
};

/// Newton-divided-difference branch fit through the first degree+1 class
/// members, raw (no validation). Nodes for class 0 start at p.
std::vector<PadicNumber> fit_branch_poly(const Table& tab, int32_t p, int residue,
                                         int degree, int64_t domain_start = 1,
                                         PrecisionBudget* budget = nullptr);

/// Full fit of all branches with held-out validation; coefficient precisions
/// are capped by the observed residual (coefficient j at residual_val - j).
/// Throws fit_rejected when held-out residuals fail the threshold.
Psf psf_fit(const Table& tab, int32_t p, const FitParams& fp, PrecisionBudget* budget = nullptr);

/**
 * Psf together with a principal part on the zero class: on p | n the value
 * is Psf(n) + sum_j principal[j-1] n^{-j}; other classes are untouched
 * (n is already invertible there so no principal part is needed).
 */
struct LaurentPsf {
    Psf psf;
    std::vector<PadicNumber> principal;

    PadicNumber eval(int64_t n) const;
    bool has_principal_part() const;
};

/// Fit a table carrying up to `laurent_order` negative powers on the zero
/// class: branch 0 is fitted as x^L * f, then split into principal + series.
LaurentPsf psf_fit_laurent(const Table& tab, int32_t p, int laurent_order, const FitParams& fp,
                           PrecisionBudget* budget = nullptr);

/// Drop the principal part on the zero class (the projection "s" of the
/// regularization calculus); identity on the other classes.
Psf psf_project_principal(const LaurentPsf& f);

}  // namespace pmzv
