#include "pmzv/rational.hpp"

#include <algorithm>
#include <mutex>

namespace pmzv {

namespace {

__int128 abs128(__int128 x) { return x < 0 ? -x : x; }

__int128 gcd128(__int128 a, __int128 b) {
    a = abs128(a);
    b = abs128(b);
    while (b) {
        __int128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

const __int128 kMulGuard = (__int128(1) << 96);

__int128 checked_mul(__int128 a, __int128 b) {
    if (abs128(a) > kMulGuard / (abs128(b) + 1)) throw std::overflow_error("rational overflow");
    return a * b;
}

}  // namespace

Rational::Rational(__int128 n, __int128 d) {
    if (d == 0) throw std::domain_error("division by zero");
    if (d < 0) {
        n = -n;
        d = -d;
    }
    __int128 g = gcd128(n, d);
    if (g > 1) {
        n /= g;
        d /= g;
    }
    num = n;
    den = d;
}

Rational Rational::operator-() const {
    Rational r;
    r.num = -num;
    r.den = den;
    return r;
}

Rational Rational::operator+(const Rational& o) const {
    __int128 g = gcd128(den, o.den);
    __int128 l = checked_mul(den / g, o.den);
    __int128 n = checked_mul(num, o.den / g) + checked_mul(o.num, den / g);
    return Rational(n, l);
}

Rational Rational::operator-(const Rational& o) const { return *this + (-o); }

Rational Rational::operator*(const Rational& o) const {
    __int128 g1 = gcd128(num, o.den);
    __int128 g2 = gcd128(o.num, den);
    return Rational(checked_mul(num / g1, o.num / g2), checked_mul(den / g2, o.den / g1));
}

Rational Rational::operator/(const Rational& o) const {
    if (o.num == 0) throw std::domain_error("division by zero");
    Rational inv;
    inv.num = o.den;
    inv.den = o.num;
    if (inv.den < 0) {
        inv.num = -inv.num;
        inv.den = -inv.den;
    }
    return *this * inv;
}

int64_t Rational::vp(int32_t p) const {
    if (num == 0) throw std::domain_error("v_p of zero");
    int64_t v = 0;
    __int128 n = num, d = den;
    while (n % p == 0) {
        n /= p;
        ++v;
    }
    while (d % p == 0) {
        d /= p;
        --v;
    }
    return v;
}

PadicNumber Rational::to_padic(int32_t p, int64_t prec) const {
    return PadicNumber::from_rational128(num, den, p, prec);
}

std::string Rational::to_string() const {
    auto s128 = [](__int128 x) {
        if (x == 0) return std::string("0");
        bool neg = x < 0;
        if (neg) x = -x;
        std::string s;
        while (x) {
            s.push_back(static_cast<char>('0' + static_cast<int>(x % 10)));
            x /= 10;
        }
        if (neg) s.push_back('-');
        std::reverse(s.begin(), s.end());
        return s;
    };
    if (den == 1) return s128(num);
    return s128(num) + "/" + s128(den);
}

PadicNumber mul_rational(const PadicNumber& c, const Rational& q, int32_t p) {
    if (q.is_zero()) return PadicNumber::exact_zero(p);
    int64_t v = q.vp(p);
    if (c.is_zero()) return c * q.to_padic(p, v + 2);
    return c * q.to_padic(p, v + c.rel_precision() + 2);
}

__int128 binom128(int n, int k) {
    if (k < 0 || k > n) return 0;
    if (k > n - k) k = n - k;
    __int128 r = 1;
    for (int i = 1; i <= k; ++i) {
        r = checked_mul(r, n - k + i);
        r /= i;
    }
    return r;
}

const Rational& bernoulli(int m) {
    static std::vector<Rational> cache = {Rational(1), Rational(__int128(-1), 2)};
    static std::mutex mu;
    std::lock_guard<std::mutex> lk(mu);
    while (static_cast<int>(cache.size()) <= m) {
        int n = static_cast<int>(cache.size());
        if (n % 2 == 1) {
            cache.push_back(Rational(0));
            continue;
        }
        // B_n = -1/(n+1) * sum_{j<n} binom(n+1, j) B_j
        Rational s(0);
        for (int j = 0; j < n; ++j)
            s = s + Rational(binom128(n + 1, j), 1) * cache[j];
        cache.push_back(s / Rational(-(n + 1)));
    }
    return cache[m];
}

std::vector<Rational> faulhaber_poly(int d) {
    // sum_{k=1}^{X} k^d = 1/(d+1) sum_{j=0}^{d} binom(d+1,j) B_j^+ X^{d+1-j},
    // with B^+_j = (-1)^j B_j.
    std::vector<Rational> c(d + 2, Rational(0));
    for (int j = 0; j <= d; ++j) {
        Rational bj = bernoulli(j);
        if (j % 2 == 1) bj = -bj;
        c[d + 1 - j] = Rational(binom128(d + 1, j), d + 1) * bj;
    }
    return c;
}

}  // namespace pmzv
