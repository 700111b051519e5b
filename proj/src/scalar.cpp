#include "palmlab/scalar.hpp"

#include <ostream>

#include "palmlab/util.hpp"

namespace palmlab {

Scalar Scalar::rational(long num, long den) {
    if (den == 0) throw InvalidInput("rational with zero denominator");
    mpq_class q(num, den);
    q.canonicalize();
    return Scalar(q, mpq_class(0));
}

int Scalar::sign() const {
    const int sa = sgn(a_);
    const int sb = sgn(b_);
    if (sb == 0) return sa;
    if (sa == 0) return sb;
    if (sa == sb) return sa;
    // Opposite component signs: |a| vs |b|*r2 decides, i.e. a^2 vs 2 b^2.
    mpq_class a2 = a_ * a_;
    mpq_class b2 = 2 * b_ * b_;
    const int c = cmp(a2, b2);
    if (c == 0) throw InternalDefect("a^2 == 2 b^2 with nonzero components");
    return c > 0 ? sa : sb;
}

Scalar& Scalar::operator*=(const Scalar& o) {
    // (a + b r2)(c + d r2) = (ac + 2bd) + (ad + bc) r2
    mpq_class na = a_ * o.a_ + 2 * b_ * o.b_;
    mpq_class nb = a_ * o.b_ + b_ * o.a_;
    a_ = std::move(na);
    b_ = std::move(nb);
    return *this;
}

Scalar Scalar::inverse() const {
    if (is_zero()) throw InvalidInput("inverse of zero scalar");
    // 1/(a + b r2) = (a - b r2) / (a^2 - 2 b^2); the norm is nonzero for
    // nonzero elements because r2 is irrational.
    mpq_class norm = a_ * a_ - 2 * b_ * b_;
    if (sgn(norm) == 0) throw InternalDefect("zero norm for nonzero scalar");
    return Scalar(a_ / norm, -b_ / norm);
}

Scalar& Scalar::operator/=(const Scalar& o) {
    *this *= o.inverse();
    return *this;
}

namespace {

std::string rat_text(const mpq_class& q) {
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

mpq_class parse_rat(const std::string& text) {
    const auto slash = text.find('/');
    if (slash == std::string::npos || slash == 0 || slash + 1 == text.size())
        throw InvalidInput("malformed rational '" + text + "'");
    const std::string num = text.substr(0, slash);
    const std::string den = text.substr(slash + 1);
    auto digits = [](const std::string& s, bool allow_sign) {
        if (s.empty()) return false;
        std::size_t i = 0;
        if (allow_sign && (s[0] == '-')) i = 1;
        if (i == s.size()) return false;
        for (; i < s.size(); ++i)
            if (s[i] < '0' || s[i] > '9') return false;
        return true;
    };
    if (!digits(num, true) || !digits(den, false))
        throw InvalidInput("malformed rational '" + text + "'");
    mpq_class q;
    if (mpq_set_str(q.get_mpq_t(), (num + "/" + den).c_str(), 10) != 0)
        throw InvalidInput("malformed rational '" + text + "'");
    if (sgn(mpq_class(q.get_den())) == 0) throw InvalidInput("zero denominator in '" + text + "'");
    q.canonicalize();
    return q;
}

}  // namespace

std::string Scalar::str() const {
    return rat_text(a_) + "+" + rat_text(b_) + "*r2";
}

Scalar Scalar::parse(const std::string& text) {
    static const std::string suffix = "*r2";
    if (text.size() < suffix.size() || text.compare(text.size() - suffix.size(), suffix.size(), suffix) != 0)
        throw InvalidInput("scalar text missing '*r2' suffix: '" + text + "'");
    const std::string body = text.substr(0, text.size() - suffix.size());
    // The separating '+' is the last '+' in the body; component numerators
    // may carry '-' but never '+'.
    const auto plus = body.rfind('+');
    if (plus == std::string::npos || plus == 0 || plus + 1 == body.size())
        throw InvalidInput("malformed scalar '" + text + "'");
    mpq_class a = parse_rat(body.substr(0, plus));
    mpq_class b = parse_rat(body.substr(plus + 1));
    return Scalar(std::move(a), std::move(b));
}

double Scalar::approx() const {
    return a_.get_d() + b_.get_d() * 1.4142135623730951;
}

std::ostream& operator<<(std::ostream& os, const Scalar& s) { return os << s.str(); }

}  // namespace palmlab
