#pragma once

#include <gmpxx.h>

#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>

namespace meadowprob {

/// Exact rational in canonical form: positive denominator, coprime parts,
/// zero uniquely represented as 0/1. Arithmetic follows the totalized
/// calculus in which the inverse of zero is zero, so every operation is
/// defined on every input.
class Stalk {
public:
    Stalk() : v_(0) {}
    Stalk(long n) : v_(n) {}
    Stalk(long num, long den);
    explicit Stalk(mpz_class n) : v_(std::move(n)) {}
    explicit Stalk(mpq_class v);

    /// Accepts "7", "-3/4", "0.25"; decimal literals convert exactly.
    static Stalk from_string(std::string_view text);

    const mpz_class& num() const { return v_.get_num(); }
    const mpz_class& den() const { return v_.get_den(); }
    const mpq_class& raw() const { return v_; }

    bool is_zero() const { return sgn(v_) == 0; }
    int signum() const { return sgn(v_); }

    /// "num/den", with the denominator omitted when it is 1.
    std::string str() const;

    friend Stalk operator+(const Stalk& a, const Stalk& b) { return Stalk(mpq_class(a.v_ + b.v_)); }
    friend Stalk operator-(const Stalk& a, const Stalk& b) { return Stalk(mpq_class(a.v_ - b.v_)); }
    friend Stalk operator*(const Stalk& a, const Stalk& b) { return Stalk(mpq_class(a.v_ * b.v_)); }
    friend Stalk operator-(const Stalk& a) { return Stalk(mpq_class(-a.v_)); }

    Stalk& operator+=(const Stalk& o) { v_ += o.v_; return *this; }
    Stalk& operator-=(const Stalk& o) { v_ -= o.v_; return *this; }
    Stalk& operator*=(const Stalk& o) { v_ *= o.v_; return *this; }

    friend bool operator==(const Stalk& a, const Stalk& b) { return a.v_ == b.v_; }
    friend bool operator!=(const Stalk& a, const Stalk& b) { return a.v_ != b.v_; }

private:
    mpq_class v_;
};

inline Stalk add(const Stalk& a, const Stalk& b) { return a + b; }
inline Stalk sub(const Stalk& a, const Stalk& b) { return a - b; }
inline Stalk mul(const Stalk& a, const Stalk& b) { return a * b; }
inline Stalk neg(const Stalk& a) { return -a; }

/// Totalized inverse: inv(0) = 0, otherwise 1/a.
Stalk inv(const Stalk& a);

/// a * inv(b); in particular div(a, 0) = 0.
Stalk div(const Stalk& a, const Stalk& b);

/// -1, 0, or 1 as a Stalk, so sign laws can be stated as stalk equations.
Stalk sign(const Stalk& a);

/// 1_x = x * inv(x): 0 at zero, 1 elsewhere.
Stalk one_ind(const Stalk& a);

/// 0_x = 1 - 1_x.
Stalk zero_ind(const Stalk& a);

/// Order through the sign operator: a <= b iff s(s(b-a)+1) = 1.
bool le(const Stalk& a, const Stalk& b);

/// Strict order: a < b iff s(b-a) = 1.
bool lt(const Stalk& a, const Stalk& b);

std::ostream& operator<<(std::ostream& os, const Stalk& s);

} // namespace meadowprob
