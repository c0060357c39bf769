#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

namespace pmzv {

/// Thrown when an operation would need digits below the tracked precision.
struct precision_exhausted : std::runtime_error {
    precision_exhausted() : std::runtime_error("precision exhausted") {}
};

namespace detail {

// Limb layout for base-p digit vectors: limbs hold `digits_per_limb` base-p
// digits each, so truncation mod p^r and v_p extraction are digit operations.
struct PBase {
    int32_t p = 0;
    int digits_per_limb = 0;
    uint32_t limb_base = 0;         // p^digits_per_limb, <= 2^15
    uint32_t p_pow[16] = {0};       // p^0 .. p^digits_per_limb

    static const PBase& for_prime(int32_t p);
};

// Little-endian limb vector, normalized (no high zero limbs).
using Nat = std::vector<uint32_t>;

Nat nat_from_u64(const PBase& b, uint64_t v);
bool nat_is_zero(const Nat& a);
int nat_cmp(const Nat& a, const Nat& b);
Nat nat_add(const PBase& b, const Nat& x, const Nat& y);
Nat nat_sub(const PBase& b, const Nat& x, const Nat& y);  // requires x >= y
Nat nat_mul(const PBase& b, const Nat& x, const Nat& y);
Nat nat_pow_digits(const PBase& b, int64_t d);            // p^d as a Nat
Nat nat_trunc_digits(const PBase& b, const Nat& x, int64_t d);  // x mod p^d
Nat nat_shift_up(const PBase& b, const Nat& x, int64_t d);      // x * p^d
Nat nat_shift_down(const PBase& b, const Nat& x, int64_t d);    // x / p^d, exact
int nat_digit(const PBase& b, const Nat& x, int64_t i);         // base-p digit i
int64_t nat_vp(const PBase& b, const Nat& x, int64_t scan_limit);
Nat nat_inv_mod(const PBase& b, const Nat& u, int64_t rel);     // Hensel lifting
std::string nat_digit_string(const PBase& b, const Nat& x, int64_t digits);

int64_t modinv_i64(int64_t a, int64_t m);

}  // namespace detail

/**
 * Element of Q_p at a fixed absolute precision: value = unit * p^valuation,
 * known modulo p^precision. A flagged zero means the value is congruent to 0
 * modulo p^precision and nothing more is known. Relative precision of a
 * nonzero element is precision - valuation >= 1; the unit digit vector keeps
 * at least that many base-p digits and its lowest digit is nonzero.
 *
 * Values are immutable after construction; all operations return new values.
 */
class PadicNumber {
public:
    /// Precision sentinel for exact zeros (empty sums, masked-out entries).
    static constexpr int64_t kPrecInf = INT64_MAX / 4;

    PadicNumber() = default;

    static PadicNumber zero(int32_t p, int64_t prec);
    /// The exact zero: known to be 0 at every precision.
    static PadicNumber exact_zero(int32_t p) { return zero(p, kPrecInf); }
    static PadicNumber from_int(int64_t v, int32_t p, int64_t prec);
    static PadicNumber from_rational(int64_t num, int64_t den, int32_t p, int64_t prec);
    static PadicNumber from_rational128(__int128 num, __int128 den, int32_t p, int64_t prec);

    bool valid() const { return p_ != 0; }
    int32_t prime() const { return p_; }
    bool is_zero() const { return zero_; }
    /// For a flagged zero this is a lower bound (the tracked precision).
    int64_t valuation() const { return zero_ ? prec_ : val_; }
    int64_t precision() const { return prec_; }
    int64_t rel_precision() const { return zero_ ? 0 : prec_ - val_; }

    PadicNumber operator-() const;
    PadicNumber operator+(const PadicNumber& o) const;
    PadicNumber operator-(const PadicNumber& o) const;
    PadicNumber operator*(const PadicNumber& o) const;
    PadicNumber inv() const;
    PadicNumber operator/(const PadicNumber& o) const;

    PadicNumber pow(int64_t e) const;
    /// Multiply by the exact power p^k (k may be negative).
    PadicNumber shift_p(int64_t k) const;
    /// Same value re-truncated to absolute precision P (no-op if P >= precision()).
    PadicNumber truncated(int64_t P) const;

    /// a and b agree modulo p^min(precision): the tracked-precision equality.
    static bool equal_mod_prec(const PadicNumber& a, const PadicNumber& b);
    /// Valuation of a-b; >= min precision when the difference vanishes.
    static int64_t residual_valuation(const PadicNumber& a, const PadicNumber& b);

    /// Little-endian base-p digits of the unit part (rel_precision digits).
    std::string unit_digits() const;
    std::string to_string() const;

    /// Exact small-integer view for tests; throws unless the value is an
    /// integer with magnitude < 2^63 at full tracked precision.
    int64_t to_int64() const;

private:
    int32_t p_ = 0;
    bool zero_ = true;
    int64_t val_ = 0;
    int64_t prec_ = 0;
    detail::Nat unit_;

    void normalize_from_rep(detail::Nat rep, int64_t rep_val, int64_t prec);
    friend class PadicOps;
};

/**
 * Loss accounting for a run: the working precision plus a tag -> digits-lost
 * ledger. Total reported loss is the sum of logged losses.
 */
class PrecisionBudget {
public:
    explicit PrecisionBudget(int64_t working_precision = 0)
        : working_precision_(working_precision) {}

    void charge(const std::string& tag, int64_t digits) {
        if (digits <= 0) return;
        std::lock_guard<std::mutex> lk(mu_);
        losses_[tag] += digits;
    }
    int64_t total() const {
        std::lock_guard<std::mutex> lk(mu_);
        int64_t t = 0;
        for (auto& [k, v] : losses_) t += v;
        return t;
    }
    int64_t working_precision() const { return working_precision_; }
    std::map<std::string, int64_t> snapshot() const {
        std::lock_guard<std::mutex> lk(mu_);
        return losses_;
    }

private:
    int64_t working_precision_;
    mutable std::mutex mu_;
    std::map<std::string, int64_t> losses_;
};

}  // namespace pmzv
