#pragma once

#include <gmpxx.h>

#include <iosfwd>
#include <string>

namespace palmlab {

// Element of the field Q(r2), r2 = sqrt(2), stored as rat + irr*r2 with
// exact rational components. Every operation is exact; there is no rounding
// anywhere in this type. Ordering is the real-number order, decided from
// component signs and the comparison rat^2 vs 2*irr^2 (equality of the two
// squares is impossible for nonzero components since r2 is irrational).
class Scalar {
public:
    Scalar() : a_(0), b_(0) {}
    Scalar(long n) : a_(n), b_(0) {}  // NOLINT: implicit on purpose

    static Scalar rational(long num, long den);
    static Scalar rational(const mpq_class& q) { return Scalar(q, mpq_class(0)); }
    static Scalar root_two() { return Scalar(mpq_class(0), mpq_class(1)); }
    static Scalar make(const mpq_class& rat, const mpq_class& irr) { return Scalar(rat, irr); }

    const mpq_class& rat_part() const { return a_; }
    const mpq_class& irr_part() const { return b_; }

    bool is_zero() const { return sgn(a_) == 0 && sgn(b_) == 0; }
    bool is_rational() const { return sgn(b_) == 0; }

    // Sign of the real number a + b*r2: -1, 0, or +1.
    int sign() const;

    Scalar operator-() const { return Scalar(-a_, -b_); }
    Scalar& operator+=(const Scalar& o) { a_ += o.a_; b_ += o.b_; return *this; }
    Scalar& operator-=(const Scalar& o) { a_ -= o.a_; b_ -= o.b_; return *this; }
    Scalar& operator*=(const Scalar& o);
    Scalar& operator/=(const Scalar& o);

    friend Scalar operator+(Scalar l, const Scalar& r) { l += r; return l; }
    friend Scalar operator-(Scalar l, const Scalar& r) { l -= r; return l; }
    friend Scalar operator*(Scalar l, const Scalar& r) { l *= r; return l; }
    friend Scalar operator/(Scalar l, const Scalar& r) { l /= r; return l; }

    Scalar inverse() const;

    friend bool operator==(const Scalar& l, const Scalar& r) { return l.a_ == r.a_ && l.b_ == r.b_; }
    friend bool operator!=(const Scalar& l, const Scalar& r) { return !(l == r); }
    friend bool operator<(const Scalar& l, const Scalar& r) { return (l - r).sign() < 0; }
    friend bool operator>(const Scalar& l, const Scalar& r) { return (l - r).sign() > 0; }
    friend bool operator<=(const Scalar& l, const Scalar& r) { return (l - r).sign() <= 0; }
    friend bool operator>=(const Scalar& l, const Scalar& r) { return (l - r).sign() >= 0; }

    // Canonical text form "a/b+c/d*r2", both components always written,
    // lowest terms, positive denominators, sign on the numerator.
    std::string str() const;
    static Scalar parse(const std::string& text);

    // Display / Monte-Carlo use only. The exact engine never calls this.
    double approx() const;

private:
    Scalar(mpq_class a, mpq_class b) : a_(std::move(a)), b_(std::move(b)) {}
    mpq_class a_;  // rational part
    mpq_class b_;  // coefficient of r2
};

std::ostream& operator<<(std::ostream& os, const Scalar& s);

}  // namespace palmlab
