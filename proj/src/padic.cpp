#include "pmzv/padic.hpp"

#include <algorithm>
#include <array>
#include <cassert>

namespace pmzv {
namespace detail {

const PBase& PBase::for_prime(int32_t p) {
    static std::array<PBase, 64> cache{};
    static std::mutex mu;
    if (p < 2 || p >= 64) throw std::invalid_argument("prime out of supported range");
    std::lock_guard<std::mutex> lk(mu);
    PBase& b = cache[p];
    if (b.p == 0) {
        b.p = p;
        uint64_t acc = 1;
        int k = 0;
        b.p_pow[0] = 1;
        while (acc * p <= (1u << 15)) {
            acc *= p;
            ++k;
            b.p_pow[k] = static_cast<uint32_t>(acc);
        }
        b.digits_per_limb = k;
        b.limb_base = static_cast<uint32_t>(acc);
    }
    return b;
}

static void nat_normalize(Nat& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

Nat nat_from_u64(const PBase& b, uint64_t v) {
    Nat r;
    while (v) {
        r.push_back(static_cast<uint32_t>(v % b.limb_base));
        v /= b.limb_base;
    }
    return r;
}

bool nat_is_zero(const Nat& a) { return a.empty(); }

int nat_cmp(const Nat& a, const Nat& b) {
    if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
    for (size_t i = a.size(); i-- > 0;)
        if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
    return 0;
}

Nat nat_add(const PBase& b, const Nat& x, const Nat& y) {
    Nat r(std::max(x.size(), y.size()) + 1, 0);
    uint32_t carry = 0;
    for (size_t i = 0; i < r.size(); ++i) {
        uint32_t s = carry;
        if (i < x.size()) s += x[i];
        if (i < y.size()) s += y[i];
        r[i] = s % b.limb_base;
        carry = s / b.limb_base;
    }
    nat_normalize(r);
    return r;
}

Nat nat_sub(const PBase& b, const Nat& x, const Nat& y) {
    assert(nat_cmp(x, y) >= 0);
    Nat r(x.size(), 0);
    int32_t borrow = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        int64_t s = static_cast<int64_t>(x[i]) - borrow - (i < y.size() ? y[i] : 0);
        if (s < 0) {
            s += b.limb_base;
            borrow = 1;
        } else {
            borrow = 0;
        }
        r[i] = static_cast<uint32_t>(s);
    }
    nat_normalize(r);
    return r;
}

Nat nat_mul(const PBase& b, const Nat& x, const Nat& y) {
    if (x.empty() || y.empty()) return {};
    std::vector<uint64_t> acc(x.size() + y.size(), 0);
    for (size_t i = 0; i < x.size(); ++i) {
        uint64_t xi = x[i];
        if (!xi) continue;
        for (size_t j = 0; j < y.size(); ++j) acc[i + j] += xi * y[j];
        // Limb products are < 2^30; flush before ~2^34 accumulated terms.
        if ((i & 0xff) == 0xff) {
            uint64_t carry = 0;
            for (auto& a : acc) {
                a += carry;
                carry = a / b.limb_base;
                a %= b.limb_base;
            }
            assert(carry == 0);
        }
    }
    uint64_t carry = 0;
    Nat r(acc.size(), 0);
    for (size_t i = 0; i < acc.size(); ++i) {
        uint64_t s = acc[i] + carry;
        r[i] = static_cast<uint32_t>(s % b.limb_base);
        carry = s / b.limb_base;
    }
    while (carry) {
        r.push_back(static_cast<uint32_t>(carry % b.limb_base));
        carry /= b.limb_base;
    }
    nat_normalize(r);
    return r;
}

Nat nat_pow_digits(const PBase& b, int64_t d) {
    assert(d >= 0);
    Nat r(static_cast<size_t>(d / b.digits_per_limb) + 1, 0);
    r.back() = b.p_pow[d % b.digits_per_limb];
    return r;
}

Nat nat_trunc_digits(const PBase& b, const Nat& x, int64_t d) {
    if (d <= 0) return {};
    size_t full = static_cast<size_t>(d / b.digits_per_limb);
    int part = static_cast<int>(d % b.digits_per_limb);
    Nat r(x.begin(), x.begin() + std::min(x.size(), full + (part ? 1 : 0)));
    if (part && full < r.size()) r[full] %= b.p_pow[part];
    nat_normalize(r);
    return r;
}

Nat nat_shift_up(const PBase& b, const Nat& x, int64_t d) {
    if (x.empty() || d == 0) return x;
    size_t limbs = static_cast<size_t>(d / b.digits_per_limb);
    int part = static_cast<int>(d % b.digits_per_limb);
    Nat r(limbs, 0);
    r.insert(r.end(), x.begin(), x.end());
    if (part) {
        uint64_t mul = b.p_pow[part], carry = 0;
        for (size_t i = limbs; i < r.size(); ++i) {
            uint64_t s = r[i] * mul + carry;
            r[i] = static_cast<uint32_t>(s % b.limb_base);
            carry = s / b.limb_base;
        }
        while (carry) {
            r.push_back(static_cast<uint32_t>(carry % b.limb_base));
            carry /= b.limb_base;
        }
    }
    nat_normalize(r);
    return r;
}

Nat nat_shift_down(const PBase& b, const Nat& x, int64_t d) {
    if (x.empty() || d == 0) return x;
    size_t limbs = static_cast<size_t>(d / b.digits_per_limb);
    int part = static_cast<int>(d % b.digits_per_limb);
    if (limbs >= x.size()) return {};
    Nat r(x.begin() + limbs, x.end());
    if (part) {
        // Short division by p^part; must be exact for a valid shift.
        uint64_t div = b.p_pow[part], rem = 0;
        for (size_t i = r.size(); i-- > 0;) {
            uint64_t cur = rem * b.limb_base + r[i];
            r[i] = static_cast<uint32_t>(cur / div);
            rem = cur % div;
        }
        assert(rem == 0);
    }
    nat_normalize(r);
    return r;
}

int nat_digit(const PBase& b, const Nat& x, int64_t i) {
    size_t limb = static_cast<size_t>(i / b.digits_per_limb);
    if (limb >= x.size()) return 0;
    return static_cast<int>((x[limb] / b.p_pow[i % b.digits_per_limb]) % b.p);
}

int64_t nat_vp(const PBase& b, const Nat& x, int64_t scan_limit) {
    for (int64_t i = 0; i < scan_limit; ++i)
        if (nat_digit(b, x, i) != 0) return i;
    return scan_limit;
}

Nat nat_inv_mod(const PBase& b, const Nat& u, int64_t rel) {
    int d0 = nat_digit(b, u, 0);
    assert(d0 != 0);
    Nat x = nat_from_u64(b, static_cast<uint64_t>(modinv_i64(d0, b.p)));
    int64_t t = 1;
    Nat two = nat_from_u64(b, 2);
    while (t < rel) {
        t = std::min(t * 2, rel);
        Nat ux = nat_trunc_digits(b, nat_mul(b, nat_trunc_digits(b, u, t), x), t);
        // x <- x * (2 - u*x) mod p^t
        Nat diff = nat_trunc_digits(b, nat_add(b, nat_sub(b, nat_pow_digits(b, t), ux), two), t);
        x = nat_trunc_digits(b, nat_mul(b, x, diff), t);
    }
    return x;
}

std::string nat_digit_string(const PBase& b, const Nat& x, int64_t digits) {
    static const char* sym = "0123456789ab";
    std::string s;
    s.reserve(static_cast<size_t>(digits));
    for (int64_t i = 0; i < digits; ++i) s.push_back(sym[nat_digit(b, x, i)]);
    return s;
}

int64_t modinv_i64(int64_t a, int64_t m) {
    int64_t g = m, x = 0, x1 = 1, a1 = ((a % m) + m) % m;
    while (a1) {
        int64_t q = g / a1;
        g -= q * a1;
        std::swap(g, a1);
        x -= q * x1;
        std::swap(x, x1);
    }
    if (g != 1) throw std::domain_error("modular inverse does not exist");
    return ((x % m) + m) % m;
}

}  // namespace detail

using detail::Nat;
using detail::PBase;

namespace {
int64_t clamp_prec(int64_t a, int64_t b) {
    if (a >= PadicNumber::kPrecInf / 2 || b >= PadicNumber::kPrecInf / 2)
        return PadicNumber::kPrecInf;
    return a + b;
}
}  // namespace

PadicNumber PadicNumber::zero(int32_t p, int64_t prec) {
    PadicNumber r;
    r.p_ = p;
    r.zero_ = true;
    r.val_ = 0;
    r.prec_ = prec;
    return r;
}

void PadicNumber::normalize_from_rep(Nat rep, int64_t rep_val, int64_t prec) {
    const PBase& b = PBase::for_prime(p_);
    int64_t d = prec - rep_val;
    if (d <= 0) {
        zero_ = true;
        prec_ = prec;
        unit_.clear();
        return;
    }
    rep = detail::nat_trunc_digits(b, rep, d);
    int64_t v = detail::nat_vp(b, rep, d);
    if (v == d) {
        zero_ = true;
        prec_ = prec;
        unit_.clear();
        return;
    }
    zero_ = false;
    unit_ = detail::nat_shift_down(b, rep, v);
    val_ = rep_val + v;
    prec_ = prec;
}

PadicNumber PadicNumber::from_int(int64_t v, int32_t p, int64_t prec) {
    return from_rational(v, 1, p, prec);
}

PadicNumber PadicNumber::from_rational(int64_t num, int64_t den, int32_t p, int64_t prec) {
    return from_rational128(num, den, p, prec);
}

PadicNumber PadicNumber::from_rational128(__int128 num, __int128 den, int32_t p, int64_t prec) {
    if (den == 0) throw std::domain_error("division by zero");
    if (prec >= kPrecInf / 2) throw std::invalid_argument("finite precision required");
    const PBase& b = PBase::for_prime(p);
    PadicNumber r;
    r.p_ = p;
    if (num == 0) return exact_zero(p);
    bool neg = (num < 0) != (den < 0);
    if (num < 0) num = -num;
    if (den < 0) den = -den;
    int64_t v = 0;
    while (num % p == 0) {
        num /= p;
        ++v;
    }
    while (den % p == 0) {
        den /= p;
        --v;
    }
    int64_t rel = prec - v;
    if (rel <= 0) throw precision_exhausted();
    // Reduce the stripped parts mod p^rel, then divide.
    auto to_nat = [&](__int128 x) {
        Nat n;
        while (x) {
            n.push_back(static_cast<uint32_t>(x % b.limb_base));
            x /= b.limb_base;
        }
        return detail::nat_trunc_digits(b, n, rel);
    };
    Nat nu = to_nat(num);
    Nat de = to_nat(den);
    Nat u = detail::nat_trunc_digits(b, detail::nat_mul(b, nu, detail::nat_inv_mod(b, de, rel)), rel);
    if (neg) u = detail::nat_sub(b, detail::nat_pow_digits(b, rel), u);
    r.zero_ = false;
    r.val_ = v;
    r.prec_ = prec;
    r.unit_ = u;
    return r;
}

PadicNumber PadicNumber::operator-() const {
    assert(valid());
    if (zero_) return *this;
    const PBase& b = PBase::for_prime(p_);
    PadicNumber r = *this;
    int64_t rel = prec_ - val_;
    r.unit_ = detail::nat_sub(b, detail::nat_pow_digits(b, rel),
                              detail::nat_trunc_digits(b, unit_, rel));
    return r;
}

PadicNumber PadicNumber::operator+(const PadicNumber& o) const {
    assert(valid() && o.valid() && p_ == o.p_);
    int64_t prec = std::min(prec_, o.prec_);
    if (zero_ && o.zero_) return zero(p_, prec);
    if (zero_) return o.truncated(prec);
    if (o.zero_) return truncated(prec);
    const PBase& b = PBase::for_prime(p_);
    int64_t v0 = std::min(val_, o.val_);
    int64_t d = prec - v0;
    if (d <= 0) return zero(p_, prec);
    Nat ra = detail::nat_trunc_digits(b, detail::nat_shift_up(b, unit_, val_ - v0), d);
    Nat rb = detail::nat_trunc_digits(b, detail::nat_shift_up(b, o.unit_, o.val_ - v0), d);
    Nat sum = detail::nat_trunc_digits(b, detail::nat_add(b, ra, rb), d);
    PadicNumber r;
    r.p_ = p_;
    r.normalize_from_rep(std::move(sum), v0, prec);
    return r;
}

PadicNumber PadicNumber::operator-(const PadicNumber& o) const { return *this + (-o); }

PadicNumber PadicNumber::operator*(const PadicNumber& o) const {
    assert(valid() && o.valid() && p_ == o.p_);
    if (zero_ || o.zero_) {
        if (zero_ && o.zero_) return zero(p_, clamp_prec(prec_, o.prec_));
        if (zero_) return zero(p_, clamp_prec(prec_, o.val_));
        return zero(p_, clamp_prec(o.prec_, val_));
    }
    const PBase& b = PBase::for_prime(p_);
    int64_t rel = std::min(prec_ - val_, o.prec_ - o.val_);
    PadicNumber r;
    r.p_ = p_;
    r.zero_ = false;
    r.val_ = val_ + o.val_;
    r.prec_ = r.val_ + rel;
    r.unit_ = detail::nat_trunc_digits(b, detail::nat_mul(b, unit_, o.unit_), rel);
    return r;
}

PadicNumber PadicNumber::inv() const {
    assert(valid());
    if (zero_) throw std::domain_error("division by zero");
    const PBase& b = PBase::for_prime(p_);
    int64_t rel = prec_ - val_;
    PadicNumber r;
    r.p_ = p_;
    r.zero_ = false;
    r.val_ = -val_;
    r.prec_ = rel - val_;
    r.unit_ = detail::nat_inv_mod(b, detail::nat_trunc_digits(b, unit_, rel), rel);
    return r;
}

PadicNumber PadicNumber::operator/(const PadicNumber& o) const { return *this * o.inv(); }

PadicNumber PadicNumber::pow(int64_t e) const {
    assert(valid());
    if (zero_) {
        if (e <= 0) throw std::domain_error("division by zero");
        int64_t prec = prec_;
        for (int64_t i = 1; i < e && prec < kPrecInf / 2; ++i) prec = clamp_prec(prec, prec_);
        return zero(p_, prec);
    }
    if (e < 0) return inv().pow(-e);
    PadicNumber acc = from_int(1, p_, prec_ - val_);
    PadicNumber base = *this;
    while (e) {
        if (e & 1) acc = acc * base;
        base = base * base;
        e >>= 1;
    }
    return acc;
}

PadicNumber PadicNumber::shift_p(int64_t k) const {
    assert(valid());
    PadicNumber r = *this;
    r.prec_ = clamp_prec(r.prec_, k);
    if (!zero_) r.val_ += k;
    return r;
}

PadicNumber PadicNumber::truncated(int64_t P) const {
    assert(valid());
    if (P >= prec_) return *this;
    if (zero_ || val_ >= P) return zero(p_, P);
    const PBase& b = PBase::for_prime(p_);
    PadicNumber r = *this;
    r.prec_ = P;
    r.unit_ = detail::nat_trunc_digits(b, unit_, P - val_);
    return r;
}

bool PadicNumber::equal_mod_prec(const PadicNumber& a, const PadicNumber& b) {
    return (a - b).is_zero();
}

int64_t PadicNumber::residual_valuation(const PadicNumber& a, const PadicNumber& b) {
    return (a - b).valuation();
}

std::string PadicNumber::unit_digits() const {
    if (zero_) return "0";
    const PBase& b = PBase::for_prime(p_);
    return detail::nat_digit_string(b, unit_, prec_ - val_);
}

std::string PadicNumber::to_string() const {
    if (!valid()) return "<invalid>";
    if (zero_) {
        if (prec_ >= kPrecInf / 2) return "0";
        return "O(p^" + std::to_string(prec_) + ")";
    }
    return "p^" + std::to_string(val_) + "*[" + unit_digits() + "] + O(p^" +
           std::to_string(prec_) + ")";
}

int64_t PadicNumber::to_int64() const {
    if (zero_) return 0;
    if (val_ < 0) throw std::domain_error("not an integer at this precision");
    const PBase& b = PBase::for_prime(p_);
    int64_t rel = prec_ - val_;
    // Try the value and its negative; pick the small-magnitude representative.
    auto decode = [&](const Nat& n) -> __int128 {
        __int128 acc = 0, scale = 1;
        for (size_t i = 0; i < n.size(); ++i) {
            acc += scale * n[i];
            scale *= b.limb_base;
            if (acc > (__int128(1) << 90)) return -1;
        }
        return acc;
    };
    __int128 pos = decode(unit_);
    Nat negn = detail::nat_sub(b, detail::nat_pow_digits(b, rel), unit_);
    __int128 neg = decode(negn);
    __int128 best;
    if (pos >= 0 && (neg < 0 || pos <= neg)) best = pos;
    else if (neg >= 0) best = -neg;
    else throw std::domain_error("value too large for int64");
    for (int64_t i = 0; i < val_; ++i) best *= p_;
    if (best > INT64_MAX || best < INT64_MIN) throw std::domain_error("value too large for int64");
    return static_cast<int64_t>(best);
}

}  // namespace pmzv
