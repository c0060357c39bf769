#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pmzv/padic.hpp"

namespace pmzv {

/**
 * Word over the alphabet {e_0, e_1}, stored as a bitstring: bit t is the
 * letter at position t, position 0 leftmost. Weight is the length; depth is
 * the number of maximal e_1 blocks.
 */
struct Word {
    uint8_t len = 0;
    uint32_t bits = 0;

    static Word from_string(const std::string& s);
    /// Indices (s_k,...,s_1) -> e_0^{s_k-1} e_1 ... e_0^{s_1-1} e_1.
    static Word from_zeta_indices(const std::vector<int>& idx);

    bool empty() const { return len == 0; }
    int weight() const { return len; }
    int depth() const;
    int letter(int t) const { return (bits >> t) & 1; }
    int first() const { return letter(0); }
    int last() const { return letter(len - 1); }

    Word tail() const;      // drop first letter
    Word init() const;      // drop last letter
    Word prepended(int letter) const;
    Word appended(int letter) const;
    Word concat(const Word& o) const;
    Word reversed() const;

    bool operator<(const Word& o) const {
        if (len != o.len) return len < o.len;
        return bits < o.bits;
    }
    bool operator==(const Word& o) const { return len == o.len && bits == o.bits; }

    std::string to_string() const;  // "011" = e_0 e_1 e_1, "" for the empty word
};

/// All words of weight <= W, ordered by (weight, bits).
std::vector<Word> all_words(int W);

/**
 * Noncommutative series truncated by weight, scalar coefficients. Missing
 * words read as exact zero.
 */
struct NCSeries {
    int32_t p = 0;
    int64_t prec = 0;
    int W = 0;
    std::map<Word, PadicNumber> c;

    static NCSeries one(int32_t p, int64_t prec, int W);
    PadicNumber at(const Word& w) const;
    void set(const Word& w, const PadicNumber& v) { c[w] = v; }
};

NCSeries concat_mul(const NCSeries& a, const NCSeries& b);
/// Inverse of a series with a[empty] = 1, by the geometric series.
NCSeries series_inverse(const NCSeries& a);
/// g^{-1} e_1 g.
NCSeries conjugate_e1(const NCSeries& g);

/// Shuffle product of two words: word -> multiplicity. Memoized.
const std::map<Word, int64_t>& shuffle_mul(const Word& u, const Word& v);

/// a[u sh v] - a[u] a[v] for all nonempty u, v with combined weight <= W.
std::map<std::pair<Word, Word>, PadicNumber> grouplike_residual(const NCSeries& a);

}  // namespace pmzv
