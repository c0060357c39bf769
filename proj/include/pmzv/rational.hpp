#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "pmzv/padic.hpp"

namespace pmzv {

/**
 * Exact rational on __int128 with eager reduction. Sized for Bernoulli /
 * Faulhaber work at small degree and for tiny brute-force cross sums; ops
 * throw overflow_error instead of wrapping.
 */
struct Rational {
    __int128 num = 0;
    __int128 den = 1;

    Rational() = default;
    Rational(int64_t n) : num(n), den(1) {}
    Rational(__int128 n, __int128 d);

    bool is_zero() const { return num == 0; }
    Rational operator-() const;
    Rational operator+(const Rational& o) const;
    Rational operator-(const Rational& o) const;
    Rational operator*(const Rational& o) const;
    Rational operator/(const Rational& o) const;
    bool operator==(const Rational& o) const { return num == o.num && den == o.den; }

    /// v_p of the rational (0 must not be asked).
    int64_t vp(int32_t p) const;
    PadicNumber to_padic(int32_t p, int64_t prec) const;
    std::string to_string() const;
};

__int128 binom128(int n, int k);

/// c * q for an exact rational q, preserving c's relative precision.
PadicNumber mul_rational(const PadicNumber& c, const Rational& q, int32_t p);

/// Bernoulli number B_m with the B_1 = -1/2 convention, memoized.
const Rational& bernoulli(int m);

/// Coefficients c[0..d+1] with sum_{k=1}^{X} k^d = sum_j c[j] X^j, exact.
std::vector<Rational> faulhaber_poly(int d);

}  // namespace pmzv
