#include "pmzv/composition.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <mutex>
#include <set>
#include <stdexcept>

namespace pmzv {

std::string exponents_to_string(const Exponents& e) {
    std::string s = "(";
    for (size_t i = 0; i < e.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(e[i]);
    }
    return s + ")";
}

std::string Composition::to_string() const {
    return exponents_to_string(s) + ";" + exponents_to_string(m);
}

static Exponents parse_tuple(const std::string& t) {
    Exponents e;
    size_t i = 0;
    auto skip = [&](char c) {
        if (i >= t.size() || t[i] != c) throw std::invalid_argument("bad composition syntax: " + t);
        ++i;
    };
    skip('(');
    while (i < t.size() && t[i] != ')') {
        size_t j = i;
        while (j < t.size() && (isdigit(t[j]) || t[j] == '-')) ++j;
        if (j == i) throw std::invalid_argument("bad composition syntax: " + t);
        e.push_back(static_cast<int32_t>(std::stol(t.substr(i, j - i))));
        i = j;
        if (i < t.size() && t[i] == ',') ++i;
    }
    skip(')');
    return e;
}

Composition Composition::parse(const std::string& text, int32_t p) {
    std::string cleaned;
    for (char c : text)
        if (!isspace(static_cast<unsigned char>(c))) cleaned.push_back(c);
    Composition c;
    auto semi = cleaned.find(';');
    if (semi == std::string::npos) {
        c.s = parse_tuple(cleaned);
        c.m.assign(c.s.size(), 0);
    } else {
        c.s = parse_tuple(cleaned.substr(0, semi));
        c.m = parse_tuple(cleaned.substr(semi + 1));
    }
    if (c.s.size() != c.m.size()) throw std::invalid_argument("exponent/residue length mismatch");
    for (auto v : c.s)
        if (v < 0) throw std::invalid_argument("negative exponent");
    for (auto v : c.m)
        if (v < 0 || v >= p) throw std::invalid_argument("residue out of range");
    return c;
}

bool dominated_by(const Exponents& t, const Exponents& s) {
    // Greedy embedding works because entries only need t_i <= s_{j(i)}.
    size_t j = 0;
    for (size_t i = 0; i < t.size(); ++i) {
        while (j < s.size() && s[j] < t[i]) ++j;
        if (j == s.size()) return false;
        ++j;
    }
    return true;
}

static void dominance_rec(const Exponents& s, size_t from, Exponents& cur,
                          std::set<Exponents>& out) {
    out.insert(cur);
    for (size_t j = from; j < s.size(); ++j) {
        for (int32_t v = 1; v <= s[j]; ++v) {
            cur.push_back(v);
            dominance_rec(s, j + 1, cur, out);
            cur.pop_back();
        }
    }
}

std::vector<Exponents> dominance_set(const Exponents& s) {
    std::set<Exponents> out;
    Exponents cur;
    dominance_rec(s, 0, cur, out);
    return {out.begin(), out.end()};
}

const std::map<Exponents, int64_t>& quasi_shuffle(const Exponents& a, const Exponents& b) {
    static std::map<std::pair<Exponents, Exponents>, std::map<Exponents, int64_t>> memo;
    static std::mutex mu;
    std::lock_guard<std::mutex> lk(mu);

    std::function<const std::map<Exponents, int64_t>&(const Exponents&, const Exponents&)> go =
        [&](const Exponents& x, const Exponents& y) -> const std::map<Exponents, int64_t>& {
        auto key = std::make_pair(x, y);
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
        std::map<Exponents, int64_t> r;
        if (x.empty()) {
            r[y] = 1;
        } else if (y.empty()) {
            r[x] = 1;
        } else {
            Exponents xp(x.begin(), x.end() - 1), yp(y.begin(), y.end() - 1);
            int32_t xl = x.back(), yl = y.back();
            for (auto& [t, c] : go(xp, y)) {
                Exponents u = t;
                u.push_back(xl);
                r[u] += c;
            }
            for (auto& [t, c] : go(x, yp)) {
                Exponents u = t;
                u.push_back(yl);
                r[u] += c;
            }
            for (auto& [t, c] : go(xp, yp)) {
                Exponents u = t;
                u.push_back(xl + yl);
                r[u] += c;
            }
        }
        return memo.emplace(key, std::move(r)).first->second;
    };
    return go(a, b);
}

}  // namespace pmzv
