#pragma once

#include <gmpxx.h>

#include <map>
#include <string>
#include <vector>

#include "dioph/contfrac.hpp"
#include "dioph/interval.hpp"

namespace dioph {

// Fixed lowest digits d_1..d_{m+1}; d[k] holds d_{k+1}.
struct DigitPrefix {
    std::vector<long> d;
    long m() const { return static_cast<long>(d.size()) - 1; }
    // n' = sum d_{k+1} q_k
    long n_prime(const ConvergentTable& t) const;
};

// Parses "d1,d2,...".
DigitPrefix parse_prefix(const std::string& text);
// Empty string when valid, otherwise the violated condition.
std::string prefix_violation(const DigitPrefix& p, const ConvergentTable& t);

struct Member {
    long n;
    long c_next;   // c_{m+2}(n)
};

// Members of A(d_1..d_{m+1}) in [1, N], ascending, by successor stepping.
std::vector<Member> enumerate_A(const DigitPrefix& p, const ConvergentTable& t, long N);
// The same set by expanding every n <= N (oracle).
std::vector<Member> enumerate_A_scan(const DigitPrefix& p, const ConvergentTable& t, long N);

struct GapReport {
    long count = 0;
    std::map<long, long> gaps;          // gap length -> multiplicity
    bool case_one = true;               // case (i): d_{m+1} > 0; otherwise case (ii)
    std::vector<std::string> violations;
    long first_bad = -1;                // index i of the first bad gap n_{i+1} - n_i
    bool pass() const { return violations.empty(); }
    std::string case_name() const { return case_one ? "i" : "ii"; }
};

GapReport verify_gaps(const std::vector<Member>& members, const DigitPrefix& p, const ConvergentTable& t);

struct BoundReport {
    long count = 0;
    mpq_class lower, upper;             // N/(3 q_{m+1}), 3N/q_{m+1} + 1
    bool applies = false;               // count >= 1
    bool lower_ok = false, upper_ok = false;
    std::string verdict;
    bool pass() const { return !applies || (lower_ok && upper_ok); }
};

BoundReport count_bounds(const std::vector<Member>& members, const DigitPrefix& p, const ConvergentTable& t, long N);

struct HarmonicReport {
    Interval sum;                       // sum over members != n' of 1/n
    Interval bound;                     // 5 log N / q_{m+1}
    bool ok = false;
};

HarmonicReport harmonic_sum_A(const std::vector<Member>& members, long n_prime, long N, const ConvergentTable& t,
                              long m, long prec = 128);

std::string gaps_json(const DigitPrefix& p, const ConvergentTable& t, long N, const std::vector<Member>& members,
                      const GapReport& g, const BoundReport& b, const HarmonicReport& h);

}  // namespace dioph
