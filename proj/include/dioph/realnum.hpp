#pragma once

#include <gmpxx.h>

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dioph/interval.hpp"
#include "dioph/surd.hpp"

namespace dioph {

// Default size budget for rule streams: q_k <= 2^20000.
constexpr long kDefaultBudgetBits = 20000;

struct RealSpec {
    enum class Kind { QuadraticSurd, ExplicitQuotients, PeriodicQuotients, RuleStream, LiteralEnclosure };
    Kind kind = Kind::QuadraticSurd;

    // QuadraticSurd: (a + b sqrt d) / c
    mpz_class a, b, d, c;
    // ExplicitQuotients and PeriodicQuotients: a0, then tail (explicit) or preamble + period
    mpz_class a0;
    std::vector<mpz_class> tail;
    std::vector<mpz_class> period;
    // RuleStream: "e", "liouville-qk", "liouville-qpow", "liouville-one"; prefix holds a0,a1,...
    std::string rule;
    std::vector<mpz_class> prefix;
    long exponent = 1;
    long budget_bits = kDefaultBudgetBits;
    // LiteralEnclosure
    mpq_class lo, hi;
};

RealSpec parse_real(const std::string& text);
std::string to_string(const RealSpec& spec);

RealSpec surd_spec(long a, long b, long d, long c);
RealSpec quotients_spec(const std::vector<long>& a);   // a[0] = a0
RealSpec periodic_spec(long a0, const std::vector<long>& pre, const std::vector<long>& period);

// Exact value u*x + v for a fixed real x.
struct Affine {
    mpq_class u, v;

    Affine operator+(const Affine& o) const { return {u + o.u, v + o.v}; }
    Affine operator-(const Affine& o) const { return {u - o.u, v - o.v}; }
    Affine operator-() const { return {-u, -v}; }
    Affine operator*(const mpq_class& s) const { return {u * s, v * s}; }
    Affine& operator+=(const Affine& o) { u += o.u; v += o.v; return *this; }
    bool is_zero() const { return u == 0 && v == 0; }
    bool operator==(const Affine& o) const { return u == o.u && v == o.v; }
};

// Shared handle to a real number with a memoized, append-only partial-quotient prefix.
// Copies share the memo; all methods are safe to call concurrently.
class Real {
public:
    explicit Real(const RealSpec& spec);
    static Real parse(const std::string& text) { return Real(parse_real(text)); }
    static Real rational(const mpq_class& v);

    const RealSpec& spec() const;
    std::string str() const { return to_string(spec()); }

    bool is_rational() const;
    std::optional<mpq_class> rational_value() const;
    std::optional<QuadSurd> surd() const;
    bool is_stream() const;

    // Partial quotient a_k; throws a Depth error once the stream is exhausted.
    mpz_class quotient(long k) const;
    // Whether a_k is available without error.
    bool has_quotient(long k) const;
    mpz_class p(long k) const;
    mpz_class q(long k) const;

    // Classical sandwich between p_k/q_k and p_{k+1}/q_{k+1}.
    Enclosure sandwich(long k) const;
    // Exact-rational enclosure of width <= 2^-bits, nested across calls.
    Enclosure enclose(long bits) const;
    Interval interval(long prec) const { return Interval(enclose(prec + 2), prec); }

    // Exact sign of u*x + v. Refines stream enclosures up to the precision cap.
    int sign_affine(const mpq_class& u, const mpq_class& v) const;
    int sign(const Affine& f) const { return sign_affine(f.u, f.v); }
    // Exact-rational enclosure of u*x + v with width <= 2^-bits.
    Enclosure enclose(const Affine& f, long bits) const;
    Interval interval(const Affine& f, long prec) const { return Interval(enclose(f, prec + 2), prec); }

private:
    struct Impl;
    std::shared_ptr<Impl> impl_;
};

}  // namespace dioph
