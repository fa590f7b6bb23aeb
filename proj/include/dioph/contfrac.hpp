#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

#include "dioph/interval.hpp"
#include "dioph/realnum.hpp"

namespace dioph {

// The two conventions for q_{-1} that occur in the literature.
enum class QMinus1 { Zero, MinusOne };

struct ConvergentRow {
    long k = 0;
    mpz_class a;        // a_k (a_0 = floor(alpha))
    mpz_class p;
    mpz_class q;
    int sign_D = 0;     // sign of D_k = q_k alpha - p_k
    Enclosure absD;     // enclosure of |D_k|
    mpz_class A;        // a_1 + ... + a_k
};

// Convergent table of an irrational alpha, rows 0..depth. Immutable after build.
class ConvergentTable {
public:
    static ConvergentTable build(const Real& x, long depth);

    const Real& alpha() const { return alpha_; }
    long depth() const { return static_cast<long>(rows_.size()) - 1; }
    const ConvergentRow& row(long k) const;
    const std::vector<ConvergentRow>& rows() const { return rows_; }

    // a_k for 0 <= k <= depth + 1.
    const mpz_class& a(long k) const;
    const mpz_class& q(long k) const;   // q_{-1} = 0
    const mpz_class& p(long k) const;   // p_{-1} = 1
    mpz_class q_minus1(QMinus1 convention) const { return convention == QMinus1::Zero ? 0 : -1; }
    const mpz_class& A(long k) const { return row(k).A; }
    int sign_D(long k) const { return row(k).sign_D; }

    // D_k and |D_k| as exact affine forms in alpha.
    Affine D(long k) const;
    Affine absD(long k) const;
    // Enclosure of |D_k| with width <= 2^-bits.
    Enclosure absD_enclosure(long k, long bits) const;
    Interval absD_interval(long k, long prec) const;

    // Largest index whose quotient is available (depth + 1).
    long quotient_depth() const { return static_cast<long>(a_.size()) - 1; }

    std::string to_csv() const;
    std::string to_json() const;

private:
    explicit ConvergentTable(Real x) : alpha_(std::move(x)) {}
    Real alpha_;
    std::vector<ConvergentRow> rows_;
    std::vector<mpz_class> a_;
    mpz_class q_m1_{0}, p_m1_{1};
};

// a_0, ..., a_count.
std::vector<mpz_class> partial_quotients(const Real& x, long count);

// Largest K with q_K <= N.
long K_of(const ConvergentTable& t, const mpz_class& N);
// A table whose depth exceeds K(N) by up to `extra` rows (fewer when a stream runs out).
ConvergentTable table_for(const Real& x, const mpz_class& N, long extra = 4);

// Enclosure of max_{2<=k<=depth} log q_{k+1} / log q_k, plus the running maxima.
struct ExponentEstimate {
    Interval max_ratio;
    std::vector<Interval> running;   // running[i] covers k = 2..2+i
};
ExponentEstimate approx_exponent(const ConvergentTable& t, long depth);

// Row-by-row certification of the classical relations.
struct RelationCheck {
    std::string name;
    bool pass = true;
    long rows = 0;
    std::string first_failure;
};
struct RelationReport {
    std::vector<RelationCheck> checks;
    bool pass() const;
};
// Checks recurrences, signs, the q|D| bracket, the three-term identity, the telescoping
// sums with their tail bounds, monotonicity, and the growth bracket for q_k.
RelationReport verify_relations(const ConvergentTable& t);

}  // namespace dioph
