#include "pmzv/word.hpp"

#include <functional>
#include <mutex>
#include <stdexcept>

namespace pmzv {

Word Word::from_string(const std::string& s) {
    Word w;
    for (char ch : s) {
        if (ch != '0' && ch != '1') throw std::invalid_argument("word letters must be 0/1");
        w = w.appended(ch - '0');
    }
    return w;
}

Word Word::from_zeta_indices(const std::vector<int>& idx) {
    Word w;
    for (int s : idx) {
        if (s < 1) throw std::invalid_argument("zeta indices must be >= 1");
        for (int i = 0; i < s - 1; ++i) w = w.appended(0);
        w = w.appended(1);
    }
    return w;
}

int Word::depth() const {
    int d = 0;
    for (int t = 0; t < len; ++t)
        if (letter(t) == 1 && (t == 0 || letter(t - 1) == 0)) ++d;
    return d;
}

Word Word::tail() const {
    Word w;
    w.len = len - 1;
    w.bits = bits >> 1;
    return w;
}

Word Word::init() const {
    Word w;
    w.len = len - 1;
    w.bits = bits & ((1u << (len - 1)) - 1);
    return w;
}

Word Word::prepended(int letter) const {
    Word w;
    w.len = len + 1;
    w.bits = (bits << 1) | static_cast<uint32_t>(letter);
    return w;
}

Word Word::appended(int letter) const {
    Word w;
    w.len = len + 1;
    w.bits = bits | (static_cast<uint32_t>(letter) << len);
    return w;
}

Word Word::concat(const Word& o) const {
    Word w;
    w.len = len + o.len;
    w.bits = bits | (o.bits << len);
    return w;
}

Word Word::reversed() const {
    Word w;
    for (int t = len - 1; t >= 0; --t) w = w.appended(letter(t));
    return w;
}

std::string Word::to_string() const {
    std::string s;
    for (int t = 0; t < len; ++t) s.push_back(static_cast<char>('0' + letter(t)));
    return s;
}

std::vector<Word> all_words(int W) {
    std::vector<Word> out;
    for (int l = 0; l <= W; ++l)
        for (uint32_t b = 0; b < (1u << l); ++b)
            out.push_back(Word{static_cast<uint8_t>(l), b});
    return out;
}

NCSeries NCSeries::one(int32_t p, int64_t prec, int W) {
    NCSeries s{p, prec, W, {}};
    s.c[Word{}] = PadicNumber::from_int(1, p, prec);
    return s;
}

PadicNumber NCSeries::at(const Word& w) const {
    auto it = c.find(w);
    if (it != c.end()) return it->second;
    return PadicNumber::exact_zero(p);
}

NCSeries concat_mul(const NCSeries& a, const NCSeries& b) {
    NCSeries r{a.p, std::min(a.prec, b.prec), std::min(a.W, b.W), {}};
    for (auto& [u, cu] : a.c) {
        for (auto& [v, cv] : b.c) {
            if (u.len + v.len > r.W) continue;
            Word w = u.concat(v);
            auto it = r.c.find(w);
            if (it == r.c.end()) r.c.emplace(w, cu * cv);
            else it->second = it->second + cu * cv;
        }
    }
    return r;
}

NCSeries series_inverse(const NCSeries& a) {
    PadicNumber a0 = a.at(Word{});
    if (a0.is_zero() ||
        !PadicNumber::equal_mod_prec(a0, PadicNumber::from_int(1, a.p, a.prec)))
        throw std::invalid_argument("series_inverse requires unit constant term");
    // b = sum_k (1-a)^k, iterated as b <- 1 + (1-a) b
    NCSeries one = NCSeries::one(a.p, a.prec, a.W);
    NCSeries m = one;  // m = 1 - a
    for (auto& [w, cw] : a.c) {
        auto it = m.c.find(w);
        if (it == m.c.end()) m.c.emplace(w, -cw);
        else it->second = it->second - cw;
    }
    NCSeries b = one;
    for (int k = 0; k < a.W; ++k) {
        b = concat_mul(m, b);
        auto it = b.c.find(Word{});
        PadicNumber unit = PadicNumber::from_int(1, a.p, a.prec);
        if (it == b.c.end()) b.c.emplace(Word{}, unit);
        else it->second = it->second + unit;
    }
    return b;
}

NCSeries conjugate_e1(const NCSeries& g) {
    NCSeries e1{g.p, g.prec, g.W, {}};
    e1.c[Word::from_string("1")] = PadicNumber::from_int(1, g.p, g.prec);
    return concat_mul(concat_mul(series_inverse(g), e1), g);
}

const std::map<Word, int64_t>& shuffle_mul(const Word& u, const Word& v) {
    static std::map<std::pair<Word, Word>, std::map<Word, int64_t>> memo;
    static std::mutex mu;
    std::lock_guard<std::mutex> lk(mu);
    std::function<const std::map<Word, int64_t>&(const Word&, const Word&)> go =
        [&](const Word& x, const Word& y) -> const std::map<Word, int64_t>& {
        auto key = std::make_pair(x, y);
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
        std::map<Word, int64_t> r;
        if (x.empty()) {
            r[y] = 1;
        } else if (y.empty()) {
            r[x] = 1;
        } else {
            for (auto& [w, c] : go(x.tail(), y)) r[w.prepended(x.first())] += c;
            for (auto& [w, c] : go(x, y.tail())) r[w.prepended(y.first())] += c;
        }
        return memo.emplace(key, std::move(r)).first->second;
    };
    return go(u, v);
}

std::map<std::pair<Word, Word>, PadicNumber> grouplike_residual(const NCSeries& a) {
    std::map<std::pair<Word, Word>, PadicNumber> out;
    auto words = all_words(a.W);
    for (auto& u : words) {
        if (u.empty()) continue;
        for (auto& v : words) {
            if (v.empty() || u.len + v.len > a.W) continue;
            PadicNumber lhs = PadicNumber::exact_zero(a.p);
            for (auto& [w, c] : shuffle_mul(u, v))
                lhs = lhs + PadicNumber::from_int(c, a.p, a.prec) * a.at(w);
            out[{u, v}] = lhs - a.at(u) * a.at(v);
        }
    }
    return out;
}

}  // namespace pmzv
