#include "dioph/interval.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

#include "dioph/error.hpp"

namespace dioph {

long precision_cap() {
    static const long cap = [] {
        if (const char* env = std::getenv("DIOPH_PRECISION_CAP")) {
            long v = std::strtol(env, nullptr, 10);
            if (v >= 64) return v;
        }
        return 4096L;
    }();
    return cap;
}

namespace {

mpq_class to_q(mpfr_srcptr x) {
    mpq_class r;
    mpfr_get_q(r.get_mpq_t(), x);
    return r;
}

}  // namespace

void Interval::init(long prec) {
    prec_ = std::max<long>(prec, MPFR_PREC_MIN);
    mpfr_init2(lo_, prec_);
    mpfr_init2(hi_, prec_);
}

Interval::Interval(long prec) {
    init(prec);
    mpfr_set_zero(lo_, 1);
    mpfr_set_zero(hi_, 1);
}

Interval::Interval(long v, long prec) {
    init(prec);
    mpfr_set_si(lo_, v, MPFR_RNDD);
    mpfr_set_si(hi_, v, MPFR_RNDU);
}

Interval::Interval(const mpz_class& v, long prec) {
    init(prec);
    mpfr_set_z(lo_, v.get_mpz_t(), MPFR_RNDD);
    mpfr_set_z(hi_, v.get_mpz_t(), MPFR_RNDU);
}

Interval::Interval(const mpq_class& v, long prec) {
    init(prec);
    mpfr_set_q(lo_, v.get_mpq_t(), MPFR_RNDD);
    mpfr_set_q(hi_, v.get_mpq_t(), MPFR_RNDU);
}

Interval::Interval(const mpq_class& lo, const mpq_class& hi, long prec) {
    init(prec);
    if (lo > hi) throw Error(ErrorKind::Internal, "interval with lo > hi");
    mpfr_set_q(lo_, lo.get_mpq_t(), MPFR_RNDD);
    mpfr_set_q(hi_, hi.get_mpq_t(), MPFR_RNDU);
}

Interval::Interval(const Enclosure& e, long prec) : Interval(e.lo, e.hi, prec) {}

Interval::Interval(const Interval& o) {
    init(o.prec_);
    mpfr_set(lo_, o.lo_, MPFR_RNDD);
    mpfr_set(hi_, o.hi_, MPFR_RNDU);
}

Interval::Interval(Interval&& o) noexcept {
    init(o.prec_);
    mpfr_swap(lo_, o.lo_);
    mpfr_swap(hi_, o.hi_);
}

Interval& Interval::operator=(const Interval& o) {
    if (this != &o) {
        prec_ = o.prec_;
        mpfr_set_prec(lo_, prec_);
        mpfr_set_prec(hi_, prec_);
        mpfr_set(lo_, o.lo_, MPFR_RNDD);
        mpfr_set(hi_, o.hi_, MPFR_RNDU);
    }
    return *this;
}

Interval& Interval::operator=(Interval&& o) noexcept {
    std::swap(prec_, o.prec_);
    mpfr_swap(lo_, o.lo_);
    mpfr_swap(hi_, o.hi_);
    return *this;
}

Interval::~Interval() {
    mpfr_clear(lo_);
    mpfr_clear(hi_);
}

mpq_class Interval::lo() const { return to_q(lo_); }
mpq_class Interval::hi() const { return to_q(hi_); }
double Interval::lo_d() const { return mpfr_get_d(lo_, MPFR_RNDD); }
double Interval::hi_d() const { return mpfr_get_d(hi_, MPFR_RNDU); }
double Interval::mid_d() const { return 0.5 * (lo_d() + hi_d()); }

long Interval::width_exp() const {
    mpfr_t w;
    mpfr_init2(w, 64);
    mpfr_sub(w, hi_, lo_, MPFR_RNDU);
    long e = mpfr_zero_p(w) ? -(1L << 40) : static_cast<long>(mpfr_get_exp(w));
    mpfr_clear(w);
    return e;
}

bool Interval::positive() const { return mpfr_sgn(lo_) > 0; }
bool Interval::negative() const { return mpfr_sgn(hi_) < 0; }
bool Interval::nonnegative() const { return mpfr_sgn(lo_) >= 0; }

bool Interval::contains(const mpq_class& x) const {
    return mpfr_cmp_q(lo_, x.get_mpq_t()) <= 0 && mpfr_cmp_q(hi_, x.get_mpq_t()) >= 0;
}

bool Interval::overlaps(const Interval& o) const {
    return mpfr_lessequal_p(lo_, o.hi_) && mpfr_lessequal_p(o.lo_, hi_);
}

bool Interval::certainly_lt(const Interval& o) const { return mpfr_less_p(hi_, o.lo_); }
bool Interval::certainly_le(const Interval& o) const { return mpfr_lessequal_p(hi_, o.lo_); }
bool Interval::certainly_lt(const mpq_class& x) const { return mpfr_cmp_q(hi_, x.get_mpq_t()) < 0; }
bool Interval::certainly_gt(const mpq_class& x) const { return mpfr_cmp_q(lo_, x.get_mpq_t()) > 0; }

Interval Interval::operator-() const {
    Interval r(prec_);
    mpfr_neg(r.lo_, hi_, MPFR_RNDD);
    mpfr_neg(r.hi_, lo_, MPFR_RNDU);
    return r;
}

Interval operator+(const Interval& a, const Interval& b) {
    Interval r(std::max(a.prec_, b.prec_));
    mpfr_add(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
    mpfr_add(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
    return r;
}

Interval operator-(const Interval& a, const Interval& b) {
    Interval r(std::max(a.prec_, b.prec_));
    mpfr_sub(r.lo_, a.lo_, b.hi_, MPFR_RNDD);
    mpfr_sub(r.hi_, a.hi_, b.lo_, MPFR_RNDU);
    return r;
}

Interval operator*(const Interval& a, const Interval& b) {
    long p = std::max(a.prec_, b.prec_);
    Interval r(p);
    mpfr_t t;
    mpfr_init2(t, p);
    mpfr_srcptr al[2] = {a.lo_, a.hi_};
    mpfr_srcptr bl[2] = {b.lo_, b.hi_};
    bool first = true;
    for (auto x : al) {
        for (auto y : bl) {
            mpfr_mul(t, x, y, MPFR_RNDD);
            if (first || mpfr_less_p(t, r.lo_)) mpfr_set(r.lo_, t, MPFR_RNDD);
            mpfr_mul(t, x, y, MPFR_RNDU);
            if (first || mpfr_greater_p(t, r.hi_)) mpfr_set(r.hi_, t, MPFR_RNDU);
            first = false;
        }
    }
    mpfr_clear(t);
    return r;
}

Interval operator/(const Interval& a, const Interval& b) {
    if (b.contains_zero()) throw Error(ErrorKind::Precision, "interval division by an enclosure of zero");
    long p = std::max(a.prec_, b.prec_);
    Interval r(p);
    mpfr_t t;
    mpfr_init2(t, p);
    mpfr_srcptr al[2] = {a.lo_, a.hi_};
    mpfr_srcptr bl[2] = {b.lo_, b.hi_};
    bool first = true;
    for (auto x : al) {
        for (auto y : bl) {
            mpfr_div(t, x, y, MPFR_RNDD);
            if (first || mpfr_less_p(t, r.lo_)) mpfr_set(r.lo_, t, MPFR_RNDD);
            mpfr_div(t, x, y, MPFR_RNDU);
            if (first || mpfr_greater_p(t, r.hi_)) mpfr_set(r.hi_, t, MPFR_RNDU);
            first = false;
        }
    }
    mpfr_clear(t);
    return r;
}

Interval Interval::abs() const {
    if (nonnegative()) return *this;
    if (negative()) return -*this;
    Interval r(prec_);
    mpfr_set_zero(r.lo_, 1);
    if (mpfr_cmpabs(lo_, hi_) > 0)
        mpfr_neg(r.hi_, lo_, MPFR_RNDU);
    else
        mpfr_set(r.hi_, hi_, MPFR_RNDU);
    return r;
}

Interval Interval::hull(const Interval& o) const {
    Interval r(std::max(prec_, o.prec_));
    mpfr_min(r.lo_, lo_, o.lo_, MPFR_RNDD);
    mpfr_max(r.hi_, hi_, o.hi_, MPFR_RNDU);
    return r;
}

Interval Interval::intersect(const Interval& o) const {
    if (!overlaps(o)) throw Error(ErrorKind::Internal, "intersection of disjoint intervals");
    Interval r(std::max(prec_, o.prec_));
    mpfr_max(r.lo_, lo_, o.lo_, MPFR_RNDD);
    mpfr_min(r.hi_, hi_, o.hi_, MPFR_RNDU);
    return r;
}

Interval Interval::min(const Interval& o) const {
    Interval r(std::max(prec_, o.prec_));
    mpfr_min(r.lo_, lo_, o.lo_, MPFR_RNDD);
    mpfr_min(r.hi_, hi_, o.hi_, MPFR_RNDU);
    return r;
}

Interval Interval::max(const Interval& o) const {
    Interval r(std::max(prec_, o.prec_));
    mpfr_max(r.lo_, lo_, o.lo_, MPFR_RNDD);
    mpfr_max(r.hi_, hi_, o.hi_, MPFR_RNDU);
    return r;
}

Interval Interval::log(const Interval& x) {
    if (!x.positive()) throw Error(ErrorKind::Precision, "log of an enclosure touching zero");
    Interval r(x.prec_);
    mpfr_log(r.lo_, x.lo_, MPFR_RNDD);
    mpfr_log(r.hi_, x.hi_, MPFR_RNDU);
    return r;
}

Interval Interval::exp(const Interval& x) {
    Interval r(x.prec_);
    mpfr_exp(r.lo_, x.lo_, MPFR_RNDD);
    mpfr_exp(r.hi_, x.hi_, MPFR_RNDU);
    return r;
}

Interval Interval::sqrt(const Interval& x) {
    if (!x.nonnegative()) throw Error(ErrorKind::Precision, "sqrt of an enclosure with negative part");
    Interval r(x.prec_);
    mpfr_sqrt(r.lo_, x.lo_, MPFR_RNDD);
    mpfr_sqrt(r.hi_, x.hi_, MPFR_RNDU);
    return r;
}

Interval Interval::log2const(long prec) {
    Interval r(prec);
    mpfr_const_log2(r.lo_, MPFR_RNDD);
    mpfr_const_log2(r.hi_, MPFR_RNDU);
    return r;
}

std::string Interval::str(int digits) const {
    char* a = nullptr;
    char* b = nullptr;
    mpfr_asprintf(&a, "%.*RDe", digits, lo_);
    mpfr_asprintf(&b, "%.*RUe", digits, hi_);
    std::string s = std::string("[") + a + ", " + b + "]";
    mpfr_free_str(a);
    mpfr_free_str(b);
    return s;
}

mpz_class floor_q(const mpq_class& x) {
    mpz_class r;
    mpz_fdiv_q(r.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
    return r;
}

mpz_class ceil_q(const mpq_class& x) {
    mpz_class r;
    mpz_cdiv_q(r.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
    return r;
}

mpz_class floor_scaled(const mpq_class& x, long bits) {
    mpz_class num = x.get_num();
    mpz_mul_2exp(num.get_mpz_t(), num.get_mpz_t(), bits);
    mpz_class r;
    mpz_fdiv_q(r.get_mpz_t(), num.get_mpz_t(), x.get_den_mpz_t());
    return r;
}

mpz_class ceil_scaled(const mpq_class& x, long bits) {
    mpz_class num = x.get_num();
    mpz_mul_2exp(num.get_mpz_t(), num.get_mpz_t(), bits);
    mpz_class r;
    mpz_cdiv_q(r.get_mpz_t(), num.get_mpz_t(), x.get_den_mpz_t());
    return r;
}

namespace {

std::string dec(const mpq_class& x, int digits, mpfr_rnd_t rnd) {
    mpfr_t t;
    mpfr_init2(t, 256);
    mpfr_set_q(t, x.get_mpq_t(), rnd);
    char* buf = nullptr;
    const char* fmt = rnd == MPFR_RNDD ? "%.*RDe" : rnd == MPFR_RNDU ? "%.*RUe" : "%.*RNe";
    mpfr_asprintf(&buf, fmt, digits - 1, t);
    std::string s(buf);
    mpfr_free_str(buf);
    mpfr_clear(t);
    return s;
}

}  // namespace

std::string dec_down(const mpq_class& x, int digits) { return dec(x, digits, MPFR_RNDD); }
std::string dec_up(const mpq_class& x, int digits) { return dec(x, digits, MPFR_RNDU); }
std::string dec_near(const mpq_class& x, int digits) { return dec(x, digits, MPFR_RNDN); }

long bitlen(const mpz_class& x) {
    return x == 0 ? 0 : static_cast<long>(mpz_sizeinbase(x.get_mpz_t(), 2));
}

}  // namespace dioph
