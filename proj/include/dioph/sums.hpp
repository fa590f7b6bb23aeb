#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <vector>

#include "dioph/kernel.hpp"

namespace dioph {

// psi(n): zero | C/n | n^-TAU | nlog:A,S[,B,T] meaning 1/(n log^A(n+S) loglog^B(n+T)).
struct PsiSpec {
    enum class Kind { Zero, COverN, Power, NLog };
    Kind kind = Kind::Zero;
    mpq_class C{1}, tau{1};
    long A = 0, S = 0, B = 0, T = 0;
    std::string text;
};

PsiSpec parse_psi(const std::string& text);
Interval psi_value(const PsiSpec& psi, long n, long prec = 128);
bool psi_decreasing(const PsiSpec& psi);        // n -> psi(n)
bool psi_n_decreasing(const PsiSpec& psi);      // n -> n psi(n), non-increasing

struct Verdict {
    std::string name;
    bool applies = true;
    bool ok = false;
    Enclosure lhs;
    Enclosure bound;
    std::string relation;   // "<=" (lhs <= bound) or ">=" (lhs >= bound)
    std::string note;
};

// Certified lhs >= bound / lhs <= bound for enclosures.
Verdict make_verdict(const std::string& name, const Enclosure& lhs, const std::string& rel, const Enclosure& bound);

struct SumReport {
    std::string kind, alpha, gamma;
    long N = 0, K = 0;
    mpz_class A_K1;                     // a_1 + ... + a_{K+1}
    std::optional<Enclosure> S, R, residue, complement, trimmed;
    long residue_count = 0, complement_count = 0;
    mpq_class c;
    std::vector<Verdict> verdicts;
    long precision = 0, kernel_bits = 0;
    bool pass() const;
    std::string to_json() const;
};

struct SumPoint {
    long N;
    Enclosure S, R;
};

// S_n and R_n at each checkpoint (ascending); widths <= 2^-precision.
std::vector<SumPoint> sums_SR(const Real& alpha, const Gamma& gamma, const std::vector<long>& checkpoints,
                              long precision = 16, int threads = 1);
Enclosure sum_S(const Real& alpha, const Gamma& gamma, long N, long precision = 16, int threads = 1);
Enclosure sum_R(const Real& alpha, const Gamma& gamma, long N, long precision = 16, int threads = 1);

// Residue classes 0 and q_{K-1} mod q_K versus the rest (gamma = 0), with their explicit bounds.
SumReport split_R(const Real& alpha, long N, long precision = 16, int threads = 1);
// sum over the residue classes of min{cN, 1/||n alpha||} against 12 N (c a_{K+1})^(1/2).
SumReport trimmed_R(const Real& alpha, long N, const mpq_class& c, long precision = 16, int threads = 1);
// max{(log N)^2/2, A_{K+1}} <= S_N <= 33 (log N)^2 + 10 A_{K+1}
SumReport check_T1(const Real& alpha, long N, long precision = 16, int threads = 1);
// R_n >= n log n + n log(e/2) + 2 and S_n >= (log n)^2/2 for every 2 <= n <= N.
SumReport check_lower_all(const Real& alpha, long N);
// S_N = sum_{n<=N} R_n/(n(n+1)) + R_N/(N+1)
SumReport partial_summation_check(const Real& alpha, const Gamma& gamma, long N, long prec = 160);

enum class Weight { None, Product };
enum class Region { Box, Orthant };

struct LinearFormSumReport {
    long dim = 0;
    std::vector<long> T;
    mpz_class T_prod;
    std::optional<mpq_class> L;
    mpq_class gamma;
    Weight weight = Weight::None;
    Region region = Region::Box;
    Enclosure lhs;
    std::optional<Enclosure> rhs;      // lower bound 2T min{log L, log T} + (2^{n+1} - 2 - log 4) T + 4
    bool rhs_exact = false;
    std::optional<Verdict> verdict;
    std::string growth_name;           // growth term used for the ratio
    Enclosure growth, ratio;
    std::string to_json(const std::vector<std::string>& alphas) const;
};

LinearFormSumReport linear_forms_sum(const std::vector<Real>& A, const std::vector<long>& T,
                                     const std::optional<mpq_class>& L, const mpq_class& gamma = 0,
                                     Weight w = Weight::None, Region r = Region::Box, long precision = 20);

struct PsiReport {
    long N = 0;
    std::string psi;
    Enclosure direct, via_R, via_S;
    bool via_R_applicable = false, via_S_applicable = false;
    bool agree = false;
    std::vector<std::pair<long, Enclosure>> partials;   // checkpoints of sum Psi
    std::string to_json() const;
};

PsiReport psi_transfer_sums(const Real& alpha, const Gamma& gamma, const PsiSpec& psi, long N,
                            const std::vector<long>& checkpoints = {}, long prec = 160);

}  // namespace dioph
