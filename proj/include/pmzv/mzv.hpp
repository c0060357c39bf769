#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pmzv/oracle.hpp"
#include "pmzv/sigma_algebra.hpp"
#include "pmzv/trace.hpp"
#include "pmzv/word.hpp"

namespace pmzv {

/**
 * Coefficient object of one word of the Frobenius series: a finite linear
 * combination of gamma-composition symbols with traced scalar coefficients.
 * The sequence it denotes is n -> sum of coef * gamma(comp)(n).
 */
struct GammaCombo {
    std::map<Composition, Traced> terms;

    bool empty() const { return terms.empty(); }
    void add(const Composition& c, const Traced& x);
};

struct MzvParams {
    int32_t p = 5;
    int64_t target_prec = 12;  // reporting precision N
    int W = 4;
    int j_max = 6;             // limits probed at n = p^j, j <= j_max
    int64_t cauchy_tol = 6;    // final Cauchy increment valuation >= this
    int64_t cancel_tol = 6;    // divergent-part cancellation tolerance
    int64_t point_prec = 0;    // working precision for p^j point evaluation
};

/**
 * The weight-major solver: per weight, the differential-equation recursion
 * for the word coefficients (exact index surgery on gamma symbols through
 * the three dlog channels), then limits to h, then the linear solve of the
 * fundamental identity for g. Every h and g coefficient carries a trace: an
 * explicit rational combination of products of regularized values whose
 * re-evaluation must reproduce the number.
 */
class MzvEngine {
public:
    MzvEngine(const MzvParams& prm, SigmaContext& sig, PrecisionBudget* budget);

    void solve();

    const MzvParams& params() const { return prm_; }
    TraceRegistry& registry() { return reg_; }
    const std::map<Word, GammaCombo>& gfrak() const { return gfrak_; }
    const GammaCombo& gfrak_of(const Word& w) const;
    const std::map<Word, Traced>& g_map() const { return g_; }
    const std::map<Word, Traced>& h_map() const { return h_; }
    Traced g_of(const Word& w) const;
    Traced h_of(const Word& w) const;

    /// Pointwise value of the word coefficient sequence via the brute oracle.
    PadicNumber gfrak_at(const Word& w, int64_t n);

    /// Scalar g-coefficients (values only), for the ODE oracle and reports.
    std::map<Word, PadicNumber> g_scalars(int max_weight) const;

    struct LimitReport {
        Word w;
        std::vector<int64_t> increment_valuations;  // j = 1..j_max-1
        int64_t cancel_floor;                       // divergent-part residual valuation
        bool pass;
    };
    const std::vector<LimitReport>& limit_reports() const { return limits_; }

    struct SolveReport {
        int weight;
        int64_t residual_valuation;  // extra-equation floor from the linear solve
    };
    const std::vector<SolveReport>& solve_reports() const { return solves_; }

    /// Closed-form seed for g[e_0^{s-1} e_1], s >= 2 (depth-1 formula).
    Traced seed_g_depth1(int s);

    /// Coefficients of (e_0+e_1) h - h(e_0 + g^{-1} e_1 g) for words of
    /// weight <= W+1 (they must vanish at precision).
    std::map<Word, PadicNumber> fundamental_residual();

    struct Zeta {
        std::vector<int> indices;  // (s_k, ..., s_1)
        Word word;
        PadicNumber value;
        TraceExpr trace;           // certificate for g[word], weight = sum s_i
        PadicNumber g_coefficient;
    };
    Zeta zeta(const std::vector<int>& indices);

private:
    MzvParams prm_;
    SigmaContext& sig_;
    PrecisionBudget* budget_;
    TraceRegistry reg_;
    std::map<Word, GammaCombo> gfrak_;
    std::map<Word, Traced> g_, h_;
    std::vector<LimitReport> limits_;
    std::vector<SolveReport> solves_;
    std::map<std::pair<Composition, int64_t>, PadicNumber> point_cache_;

    PadicNumber point_gamma(const Composition& c, int64_t n);

    GammaCombo surgery_omega0(const GammaCombo& in) const;
    GammaCombo surgery_omega1(const GammaCombo& in, const Traced& hook) const;
    GammaCombo surgery_omegap(const GammaCombo& in, const Traced& hook) const;

    /// Traced series of g filled to weight < w (higher coefficients zero).
    std::map<Word, Traced> g_partial(int below_weight) const;
    std::map<Word, Traced> traced_concat(const std::map<Word, Traced>& a,
                                         const std::map<Word, Traced>& b, int W) const;
    std::map<Word, Traced> traced_inverse(const std::map<Word, Traced>& a, int W) const;
    std::map<Word, Traced> traced_conj_e1(const std::map<Word, Traced>& g, int W) const;

    void solve_gfrak_weight(int w);
    void compute_h_weight(int w);
    void solve_g_weight(int w);

    Traced h_from_combo(const Word& word, const GammaCombo& combo);
    Traced trace_atom_combo(const GammaCombo& combo);
};

}  // namespace pmzv
