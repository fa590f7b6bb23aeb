#include "dioph/surd.hpp"

#include "dioph/error.hpp"

namespace dioph {

bool is_square(const mpz_class& n) { return n >= 0 && mpz_perfect_square_p(n.get_mpz_t()) != 0; }

QuadSurd::QuadSurd(mpz_class a, mpz_class b, mpz_class d, mpz_class c)
    : a_(std::move(a)), b_(std::move(b)), d_(std::move(d)), c_(std::move(c)) {
    if (c_ == 0) throw Error(ErrorKind::Domain, "surd denominator is zero");
    if (d_ <= 0 || is_square(d_)) throw Error(ErrorKind::Domain, "surd radicand " + d_.get_str() + " is not a positive nonsquare");
    normalize();
}

QuadSurd QuadSurd::rational(const mpq_class& r, const mpz_class& d) {
    return QuadSurd(r.get_num(), 0, d, r.get_den());
}

void QuadSurd::normalize() {
    if (c_ < 0) {
        a_ = -a_;
        b_ = -b_;
        c_ = -c_;
    }
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), a_.get_mpz_t(), b_.get_mpz_t());
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c_.get_mpz_t());
    if (g > 1) {
        a_ /= g;
        b_ /= g;
        c_ /= g;
    }
}

int QuadSurd::sign() const {
    int sa = sgn(a_), sb = sgn(b_);
    if (sb == 0) return sa;
    if (sa == 0 || sa == sb) return sb;
    // opposite signs: compare a^2 with b^2 d
    mpz_class lhs = a_ * a_, rhs = b_ * b_ * d_;
    int cmp = ::cmp(lhs, rhs);
    return cmp > 0 ? sa : sb;
}

mpz_class QuadSurd::floor() const {
    mpz_class m;
    if (b_ == 0) {
        m = a_;
    } else {
        mpz_class r = b_ * b_ * d_;
        mpz_class s;
        mpz_sqrt(s.get_mpz_t(), r.get_mpz_t());
        // b*sqrt(d) lies strictly inside (s, s+1) or (-s-1, -s)
        m = b_ > 0 ? mpz_class(a_ + s) : mpz_class(a_ - s - 1);
    }
    mpz_class q;
    mpz_fdiv_q(q.get_mpz_t(), m.get_mpz_t(), c_.get_mpz_t());
    return q;
}

Enclosure QuadSurd::enclose(long bits) const {
    if (b_ == 0) {
        mpq_class v(a_, c_);
        v.canonicalize();
        return {v, v};
    }
    mpz_class scaled_a = a_;
    mpz_mul_2exp(scaled_a.get_mpz_t(), scaled_a.get_mpz_t(), bits);
    mpz_class r = b_ * b_ * d_;
    mpz_mul_2exp(r.get_mpz_t(), r.get_mpz_t(), 2 * bits);
    mpz_class s;
    mpz_sqrt(s.get_mpz_t(), r.get_mpz_t());
    mpz_class lo_num = b_ > 0 ? mpz_class(scaled_a + s) : mpz_class(scaled_a - s - 1);
    mpz_class den = c_;
    mpz_mul_2exp(den.get_mpz_t(), den.get_mpz_t(), bits);
    mpq_class lo(lo_num, den), hi(lo_num + 1, den);
    lo.canonicalize();
    hi.canonicalize();
    return {lo, hi};
}

Interval QuadSurd::interval(long prec) const { return Interval(enclose(prec + 2), prec); }

QuadSurd QuadSurd::operator-() const { return QuadSurd(-a_, -b_, d_, c_); }

QuadSurd QuadSurd::operator+(const QuadSurd& o) const {
    if (o.d_ != d_) throw Error(ErrorKind::Internal, "surd arithmetic across different radicands");
    return QuadSurd(a_ * o.c_ + o.a_ * c_, b_ * o.c_ + o.b_ * c_, d_, c_ * o.c_);
}

QuadSurd QuadSurd::operator-(const QuadSurd& o) const { return *this + (-o); }

QuadSurd QuadSurd::operator*(const QuadSurd& o) const {
    if (o.d_ != d_) throw Error(ErrorKind::Internal, "surd arithmetic across different radicands");
    return QuadSurd(a_ * o.a_ + b_ * o.b_ * d_, a_ * o.b_ + b_ * o.a_, d_, c_ * o.c_);
}

QuadSurd QuadSurd::reciprocal() const {
    // c / (a + b sqrt d) = c (a - b sqrt d) / (a^2 - b^2 d)
    mpz_class den = a_ * a_ - b_ * b_ * d_;
    if (den == 0) throw Error(ErrorKind::Domain, "reciprocal of zero surd");
    return QuadSurd(c_ * a_, -c_ * b_, d_, den);
}

QuadSurd QuadSurd::operator/(const QuadSurd& o) const { return *this * o.reciprocal(); }

QuadSurd QuadSurd::operator+(const mpq_class& r) const { return *this + rational(r, d_); }
QuadSurd QuadSurd::operator-(const mpq_class& r) const { return *this + rational(-r, d_); }
QuadSurd QuadSurd::operator*(const mpq_class& r) const {
    return QuadSurd(a_ * r.get_num(), b_ * r.get_num(), d_, c_ * r.get_den());
}

bool QuadSurd::operator==(const QuadSurd& o) const {
    return a_ == o.a_ && b_ == o.b_ && d_ == o.d_ && c_ == o.c_;
}

std::string QuadSurd::str() const {
    return "(" + a_.get_str() + (b_ < 0 ? "-" : "+") + mpz_class(::abs(b_)).get_str() + "*sqrt" + d_.get_str() + ")/" +
           c_.get_str();
}

}  // namespace dioph
