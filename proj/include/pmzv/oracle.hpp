#pragma once

#include <cstdint>
#include <vector>

#include "pmzv/composition.hpp"
#include "pmzv/padic.hpp"
#include "pmzv/rational.hpp"
#include "pmzv/word.hpp"

namespace pmzv {

/**
 * Function table on the integer grid: entry n lives at index n, so tables
 * are sized n_max+1 and index 0 is unused. All entries are exact modulo
 * their own tracked precision.
 */
using Table = std::vector<PadicNumber>;

struct OracleCtx {
    int32_t p;
    int64_t work_prec;  // absolute precision for freshly constructed values
    PrecisionBudget* budget = nullptr;
};

/**
 * Brute-force ground truth. Definitionally dumb by design: these routines
 * evaluate the defining nested sums directly (streamed so cost is linear in
 * the grid bound, not n^depth) and are never allowed shortcuts.
 */

/// Table of sigma(c)(n) for n = 1..n_max: nested sum over
/// 0 < n_1 < ... < n_k < n with p | (n_i - m_i) of 1/(n_1^{s_1}...n_k^{s_k}).
Table brute_sigma_table(const Composition& c, int64_t n_max, const OracleCtx& ctx);

PadicNumber brute_sigma_at(const Composition& c, int64_t n, const OracleCtx& ctx);

/// gamma(c)(n) = n^{-s_k} sigma(prefix)(n) when p | (n - m_k), else exact 0.
PadicNumber brute_gamma_at(const Composition& c, int64_t n, const OracleCtx& ctx);

Table brute_gamma_table(const Composition& c, int64_t n_max, const OracleCtx& ctx);

/// Exact-rational second oracle for small arguments (throws overflow_error
/// when the fraction leaves __int128 range).
Rational brute_sigma_rational(const Composition& c, int64_t n, int32_t p);

/// Numeric integration of the Frobenius differential equation: for every
/// word of weight <= W, the z-power-series coefficients on 1..n_max obtained
/// by multiplying out the right side against the three dlog forms and
/// integrating term by term. g_scalars supplies the series coefficients for
/// words of weight < W. The worst division loss is logged to the budget.
std::map<Word, Table> ode_integrate_gfrak(int W, int64_t n_max,
                                          const std::map<Word, PadicNumber>& g_scalars,
                                          const OracleCtx& ctx);

}  // namespace pmzv
