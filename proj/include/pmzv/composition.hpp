#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace pmzv {

using Exponents = std::vector<int32_t>;  // basis index tuple, entries >= 0

/**
 * Index tuple s = (s_1,...,s_k) with residue tuple m = (m_1,...,m_k),
 * 0 <= m_i < p. Depth is k, weight is sum of the s_i. The residues select
 * which congruence class each nested summation index runs over.
 */
struct Composition {
    Exponents s;
    Exponents m;

    Composition() = default;
    Composition(Exponents s_, Exponents m_) : s(std::move(s_)), m(std::move(m_)) {}

    int depth() const { return static_cast<int>(s.size()); }
    int64_t weight() const {
        int64_t w = 0;
        for (auto v : s) w += v;
        return w;
    }
    bool empty() const { return s.empty(); }

    Composition prefix() const {
        Composition c(*this);
        c.s.pop_back();
        c.m.pop_back();
        return c;
    }
    Composition appended(int32_t sk, int32_t mk) const {
        Composition c(*this);
        c.s.push_back(sk);
        c.m.push_back(mk);
        return c;
    }
    int32_t last_s() const { return s.back(); }
    int32_t last_m() const { return m.back(); }

    bool operator<(const Composition& o) const {
        if (s != o.s) return s < o.s;
        return m < o.m;
    }
    bool operator==(const Composition& o) const { return s == o.s && m == o.m; }

    std::string to_string() const;
    /// Parses "(2,1);(0,1)" or "(2,1)" (residues default to 0).
    static Composition parse(const std::string& text, int32_t p);
};

/// t <= s in the dominance order: an increasing embedding j with t_i <= s_{j(i)}.
bool dominated_by(const Exponents& t, const Exponents& s);

/// All t <= s with positive entries, plus the empty tuple.
std::vector<Exponents> dominance_set(const Exponents& s);

/// Quasi-shuffle of two basis tuples: tuple -> multiplicity. Memoized.
const std::map<Exponents, int64_t>& quasi_shuffle(const Exponents& a, const Exponents& b);

std::string exponents_to_string(const Exponents& e);

}  // namespace pmzv
