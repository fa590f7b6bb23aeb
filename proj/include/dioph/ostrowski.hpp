#pragma once

#include <gmpxx.h>

#include <map>
#include <optional>
#include <string>

#include "dioph/contfrac.hpp"

namespace dioph {

using DigitMap = std::map<long, mpz_class>;   // k -> digit at position k+1 (sparse, nonzero only)

// A shift gamma: exact affine form f(alpha) + tail with |tail| <= radius, or a general real.
class Gamma {
public:
    static Gamma zero() { return affine({0, 0}, "0"); }
    static Gamma affine(Affine f, std::string label, mpq_class radius = 0);
    static Gamma real(const Real& r);

    bool is_exact() const { return !real_ && radius_ == 0; }
    bool has_form() const { return !real_.has_value(); }
    const Affine& form() const { return form_; }
    const mpq_class& radius() const { return radius_; }
    const std::optional<Real>& general() const { return real_; }
    const std::string& label() const { return label_; }

    // Enclosure of gamma; width is at most 2^-bits plus twice the tail radius.
    Enclosure enclose(const Real& alpha, long bits) const;

private:
    Affine form_{0, 0};
    mpq_class radius_{0};
    std::optional<Real> real_;
    std::string label_;
};

// Value f(alpha) + g * (gamma - gamma.form()); g is kept at 0 when gamma is exact, so
// identities between Lins are exact coefficient identities.
struct Lin {
    Affine f{0, 0};
    int g = 0;

    Lin operator+(const Lin& o) const { return {f + o.f, g + o.g}; }
    Lin operator-(const Lin& o) const { return {f - o.f, g - o.g}; }
    Lin operator-() const { return {-f, -g}; }
    Lin operator*(long s) const { return {f * mpq_class(s), g * static_cast<int>(s)}; }
    // g is only ever scaled by small factors; exact forms carry g = 0.
    Lin operator*(const mpz_class& s) const { return {f * mpq_class(s), g == 0 ? 0 : g * static_cast<int>(s.get_si())}; }
    bool operator==(const Lin& o) const { return f == o.f && g == o.g; }
};

inline Lin lin(const Affine& f) { return {f, 0}; }

class LinEval {
public:
    LinEval(Real alpha, Gamma gamma) : alpha_(std::move(alpha)), gamma_(std::move(gamma)) {}
    const Real& alpha() const { return alpha_; }
    const Gamma& gamma() const { return gamma_; }
    // gamma + shift as a Lin.
    Lin gamma_lin(const mpz_class& shift = 0) const;
    bool is_exact(const Lin& y) const { return y.g == 0 || gamma_.is_exact(); }
    Enclosure enclose(const Lin& y, long bits) const;
    // Exact sign when y is exact; otherwise refined enclosures, Precision error at the cap.
    int sign(const Lin& y) const;

private:
    Enclosure rest(long bits) const;
    Real alpha_;
    Gamma gamma_;
};

// Grammar: 0 | P/Q | D:k | digits:[b1,b2,...] | surd or any other real spec.
// Same-field surds and digit expansions become exact affine forms in alpha.
Gamma parse_gamma(const std::string& text, const ConvergentTable& t);
// gamma = sum over k of b_{k+1} D_k (finite).
Gamma gamma_from_digits(const DigitMap& b, const ConvergentTable& t, const std::string& label = "digits");

struct OstrowskiInt {
    mpz_class n;
    long K = 0;          // q_K <= n < q_{K+1}
    DigitMap digits;     // k -> c_{k+1}
    mpz_class c(long k) const;
};

struct OstrowskiReal {
    DigitMap digits;     // k -> b_{k+1}, for k < depth
    long depth = 0;
    mpz_class shift;     // the normalized gamma is gamma + shift
    bool finite = false; // all digits from depth on are zero
    bool boundary = false;  // normalized gamma equals -{alpha}
    Enclosure defect;    // enclosure of |gamma + shift - sum_{k<depth} b_{k+1} D_k|
    Gamma gamma;         // the expanded value, before the shift
    mpz_class b(long k) const;
};

struct DeltaDigits {
    DigitMap delta;                 // k -> delta_{k+1}
    std::optional<long> m;          // smallest k with delta_{k+1} != 0
    long depth = 0;                 // delta is exact for k < depth (all k when finite)
    bool finite = false;
    bool degenerate() const { return !m.has_value(); }
    mpz_class d(long k) const;
};

struct DigitVerdict {
    bool valid = true;
    long k = -1;            // index of the first violation
    std::string rule;
};

OstrowskiInt expand_int(const ConvergentTable& t, const mpz_class& n);
mpz_class reconstruct_int(const OstrowskiInt& d, const ConvergentTable& t);
// Checks the digit bounds and the adjacency rule; integer_case adds the top-index rule.
DigitVerdict validate_digits(const DigitMap& digits, const ConvergentTable& t, bool integer_case = true);
OstrowskiReal expand_real(const ConvergentTable& t, const Gamma& gamma, long depth);
DeltaDigits delta_of(const OstrowskiInt& c, const OstrowskiReal& b);

// Reverse-lexicographic comparison (highest index most significant).
int compare_reverse_lex(const DigitMap& x, const DigitMap& y);

std::string to_json(const OstrowskiInt& d, const ConvergentTable& t);
std::string to_json(const OstrowskiReal& d, const ConvergentTable& t);

}  // namespace dioph
