#include "pmzv/trace.hpp"

#include <algorithm>

namespace pmzv {

int32_t TraceRegistry::intern(char kind, const Composition& c, const PadicNumber& value) {
    auto key = std::make_pair(kind, c);
    auto it = index_.find(key);
    if (it != index_.end()) return it->second;
    int32_t id = static_cast<int32_t>(atoms_.size());
    atoms_.push_back(Atom{kind, c, c.weight(), value});
    index_.emplace(key, id);
    return id;
}

TraceExpr TraceExpr::constant(const Rational& q) {
    TraceExpr e;
    if (!q.is_zero()) e.mono_[{}] = q;
    return e;
}

TraceExpr TraceExpr::atom(int32_t id) {
    TraceExpr e;
    e.mono_[{id}] = Rational(1);
    return e;
}

void TraceExpr::add_in(const Monomial& m, const Rational& q) {
    auto it = mono_.find(m);
    if (it == mono_.end()) {
        if (!q.is_zero()) mono_.emplace(m, q);
        return;
    }
    it->second = it->second + q;
    if (it->second.is_zero()) mono_.erase(it);
}

TraceExpr TraceExpr::operator+(const TraceExpr& o) const {
    TraceExpr r = *this;
    for (auto& [m, q] : o.mono_) r.add_in(m, q);
    return r;
}

TraceExpr TraceExpr::operator-(const TraceExpr& o) const {
    TraceExpr r = *this;
    for (auto& [m, q] : o.mono_) r.add_in(m, -q);
    return r;
}

TraceExpr TraceExpr::operator*(const TraceExpr& o) const {
    TraceExpr r;
    for (auto& [m1, q1] : mono_) {
        for (auto& [m2, q2] : o.mono_) {
            Monomial m = m1;
            m.insert(m.end(), m2.begin(), m2.end());
            std::sort(m.begin(), m.end());
            r.add_in(m, q1 * q2);
        }
    }
    return r;
}

TraceExpr TraceExpr::scaled(const Rational& q) const {
    TraceExpr r;
    if (q.is_zero()) return r;
    for (auto& [m, c] : mono_) r.mono_[m] = c * q;
    return r;
}

PadicNumber TraceExpr::evaluate(const TraceRegistry& reg, int32_t p, int64_t prec) const {
    PadicNumber acc = PadicNumber::exact_zero(p);
    for (auto& [m, q] : mono_) {
        PadicNumber term = PadicNumber::from_int(1, p, prec);
        for (int32_t id : m) term = term * reg.atom(id).value;
        acc = acc + mul_rational(term, q, p);
    }
    return acc;
}

bool TraceExpr::homogeneous_of_weight(const TraceRegistry& reg, int64_t w) const {
    for (auto& [m, q] : mono_) {
        int64_t total = 0;
        for (int32_t id : m) total += reg.atom(id).weight;
        if (total != w) return false;
    }
    return true;
}

std::string TraceExpr::to_string(const TraceRegistry& reg) const {
    if (mono_.empty()) return "0";
    std::string s;
    bool first = true;
    for (auto& [m, q] : mono_) {
        if (!first) s += " + ";
        first = false;
        s += q.to_string();
        for (int32_t id : m) {
            const auto& a = reg.atom(id);
            s += std::string("*") + (a.kind == 's' ? "sigma_bar" : "gamma_bar") +
                 a.c.to_string();
        }
    }
    return s;
}

}  // namespace pmzv
