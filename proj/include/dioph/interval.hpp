#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <string>

namespace dioph {

// Closed interval with exact rational endpoints.
struct Enclosure {
    mpq_class lo;
    mpq_class hi;

    mpq_class width() const { return hi - lo; }
    bool contains(const mpq_class& x) const { return lo <= x && x <= hi; }
    bool contains(const Enclosure& o) const { return lo <= o.lo && o.hi <= hi; }
    bool overlaps(const Enclosure& o) const { return lo <= o.hi && o.lo <= hi; }
};

// Refinement cap in bits; DIOPH_PRECISION_CAP overrides the default of 4096.
long precision_cap();

// Closed interval with MPFR endpoints and outward rounding on every operation.
// Endpoints are dyadic, so they convert to rationals exactly.
class Interval {
public:
    explicit Interval(long prec = 128);
    Interval(long v, long prec);
    Interval(const mpz_class& v, long prec);
    Interval(const mpq_class& v, long prec);
    Interval(const mpq_class& lo, const mpq_class& hi, long prec);
    Interval(const Enclosure& e, long prec);
    Interval(const Interval& o);
    Interval(Interval&& o) noexcept;
    Interval& operator=(const Interval& o);
    Interval& operator=(Interval&& o) noexcept;
    ~Interval();

    long prec() const { return prec_; }
    mpq_class lo() const;
    mpq_class hi() const;
    Enclosure enclosure() const { return {lo(), hi()}; }
    double lo_d() const;
    double hi_d() const;
    double mid_d() const;
    mpq_class width() const { return hi() - lo(); }
    // log2 of the width, or a large negative number for a point.
    long width_exp() const;

    bool positive() const;      // lo > 0
    bool negative() const;      // hi < 0
    bool nonnegative() const;   // lo >= 0
    bool contains_zero() const { return !positive() && !negative(); }
    bool contains(const mpq_class& x) const;
    bool overlaps(const Interval& o) const;
    bool certainly_lt(const Interval& o) const;   // hi < o.lo
    bool certainly_le(const Interval& o) const;   // hi <= o.lo
    bool certainly_lt(const mpq_class& x) const;
    bool certainly_gt(const mpq_class& x) const;

    Interval operator-() const;
    friend Interval operator+(const Interval& a, const Interval& b);
    friend Interval operator-(const Interval& a, const Interval& b);
    friend Interval operator*(const Interval& a, const Interval& b);
    friend Interval operator/(const Interval& a, const Interval& b);
    Interval& operator+=(const Interval& b) { return *this = *this + b; }
    Interval& operator-=(const Interval& b) { return *this = *this - b; }

    Interval abs() const;
    Interval hull(const Interval& o) const;
    Interval intersect(const Interval& o) const;
    Interval min(const Interval& o) const;
    Interval max(const Interval& o) const;

    static Interval log(const Interval& x);
    static Interval exp(const Interval& x);
    static Interval sqrt(const Interval& x);
    static Interval log2const(long prec);

    std::string str(int digits = 20) const;

    mpfr_srcptr lo_ptr() const { return lo_; }
    mpfr_srcptr hi_ptr() const { return hi_; }

private:
    long prec_;
    mpfr_t lo_;
    mpfr_t hi_;
    void init(long prec);
};

// Rational → dyadic floor/ceil at 2^-bits.
mpz_class floor_scaled(const mpq_class& x, long bits);
mpz_class ceil_scaled(const mpq_class& x, long bits);
mpz_class floor_q(const mpq_class& x);
mpz_class ceil_q(const mpq_class& x);
// Decimal rendering rounded down / up / to nearest.
std::string dec_down(const mpq_class& x, int digits = 17);
std::string dec_up(const mpq_class& x, int digits = 17);
std::string dec_near(const mpq_class& x, int digits = 17);
// Number of bits of |x| (0 for 0).
long bitlen(const mpz_class& x);

}  // namespace dioph
