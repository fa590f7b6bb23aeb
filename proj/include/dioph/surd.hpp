#pragma once

#include <gmpxx.h>

#include <string>

#include "dioph/interval.hpp"

namespace dioph {

// Exact value (a + b*sqrt(d)) / c with d a positive nonsquare, c > 0, gcd(a,b,c) = 1.
class QuadSurd {
public:
    QuadSurd(mpz_class a, mpz_class b, mpz_class d, mpz_class c);
    static QuadSurd rational(const mpq_class& r, const mpz_class& d);

    const mpz_class& a() const { return a_; }
    const mpz_class& b() const { return b_; }
    const mpz_class& d() const { return d_; }
    const mpz_class& c() const { return c_; }
    bool is_rational() const { return b_ == 0; }

    int sign() const;
    mpz_class floor() const;
    Enclosure enclose(long bits) const;
    Interval interval(long prec) const;

    QuadSurd operator-() const;
    QuadSurd operator+(const QuadSurd& o) const;
    QuadSurd operator-(const QuadSurd& o) const;
    QuadSurd operator*(const QuadSurd& o) const;
    QuadSurd operator/(const QuadSurd& o) const;
    QuadSurd operator+(const mpq_class& r) const;
    QuadSurd operator-(const mpq_class& r) const;
    QuadSurd operator*(const mpq_class& r) const;
    QuadSurd reciprocal() const;
    QuadSurd abs() const { return sign() < 0 ? -*this : *this; }

    int compare(const QuadSurd& o) const { return (*this - o).sign(); }
    bool operator==(const QuadSurd& o) const;

    std::string str() const;

private:
    mpz_class a_, b_, d_, c_;
    void normalize();
};

// Whether n is a perfect square (n >= 0).
bool is_square(const mpz_class& n);

}  // namespace dioph
