#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pmzv/composition.hpp"
#include "pmzv/padic.hpp"
#include "pmzv/rational.hpp"

namespace pmzv {

/**
 * Interned regularized values: each atom is a sigma-bar or gamma-bar value
 * of a specific composition, with its weight. Traces are rational linear
 * combinations of products of atoms; re-evaluating a trace against the
 * registry must reproduce the traced number.
 */
class TraceRegistry {
public:
    struct Atom {
        char kind;  // 's' = sigma_bar, 'g' = gamma_bar
        Composition c;
        int64_t weight;
        PadicNumber value;
    };

    int32_t intern(char kind, const Composition& c, const PadicNumber& value);
    const Atom& atom(int32_t id) const { return atoms_[id]; }
    size_t size() const { return atoms_.size(); }

private:
    std::vector<Atom> atoms_;
    std::map<std::pair<char, Composition>, int32_t> index_;
};

/**
 * Q-linear combination of monomials in registry atoms. Multiplication
 * merges monomials, so a trace built alongside a computation is an explicit
 * membership certificate in the algebra spanned by products of regularized
 * values.
 */
class TraceExpr {
public:
    using Monomial = std::vector<int32_t>;  // sorted atom ids

    TraceExpr() = default;
    static TraceExpr constant(const Rational& q);
    static TraceExpr atom(int32_t id);

    bool empty() const { return mono_.empty(); }
    const std::map<Monomial, Rational>& monomials() const { return mono_; }

    TraceExpr operator+(const TraceExpr& o) const;
    TraceExpr operator-(const TraceExpr& o) const;
    TraceExpr operator*(const TraceExpr& o) const;
    TraceExpr scaled(const Rational& q) const;

    PadicNumber evaluate(const TraceRegistry& reg, int32_t p, int64_t prec) const;
    /// True when every monomial's total atom weight equals w (constants count
    /// only with weight 0, i.e. only for w == 0).
    bool homogeneous_of_weight(const TraceRegistry& reg, int64_t w) const;
    std::string to_string(const TraceRegistry& reg) const;

private:
    std::map<Monomial, Rational> mono_;
    void add_in(const Monomial& m, const Rational& q);
};

/// A number carried together with its membership certificate.
struct Traced {
    PadicNumber v;
    TraceExpr t;

    static Traced zero(int32_t p) { return {PadicNumber::exact_zero(p), TraceExpr()}; }
    static Traced one(int32_t p, int64_t prec) {
        return {PadicNumber::from_int(1, p, prec), TraceExpr::constant(Rational(1))};
    }

    Traced operator+(const Traced& o) const { return {v + o.v, t + o.t}; }
    Traced operator-(const Traced& o) const { return {v - o.v, t - o.t}; }
    Traced operator*(const Traced& o) const { return {v * o.v, t * o.t}; }
    Traced scaled(const Rational& q, int32_t p) const {
        return {mul_rational(v, q, p), t.scaled(q)};
    }
};

}  // namespace pmzv
