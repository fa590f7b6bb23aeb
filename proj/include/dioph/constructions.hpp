#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <vector>

#include "dioph/contfrac.hpp"
#include "dioph/ostrowski.hpp"
#include "dioph/sums.hpp"

namespace dioph {

// Partial-quotient stream a_{k+1} = rule(k, q_k) after a fixed prefix, with the running
// approximation exponent max log q_{k+1} / log q_k.
struct LiouvilleStream {
    RealSpec spec;
    std::string rule;                  // "qk" (a_{k+1} = q_k^k), "q^E", "one"
    long depth = 0;
    std::vector<mpz_class> quotients;  // a_0 .. a_{depth+1}
    std::vector<Enclosure> ratios;     // log q_{k+1} / log q_k for k = 2..depth
    std::vector<Enclosure> running;    // running maxima of ratios
    Enclosure max_exponent;
    std::string to_json() const;
};

// Rule grammar: qk | q^E | one, with an optional prefix "[a0;a1,...]".
LiouvilleStream build_liouville_alpha(const std::string& rule, long depth,
                                      const std::string& prefix = "[0;1]", long budget_bits = kDefaultBudgetBits);

struct T8Checkpoint {
    long K = 0;
    mpz_class a_K1;     // a_{K+1}
    mpz_class a_prime;  // floor(a_{K+1} / 4)
    mpz_class N;        // a_prime * q_K
    bool reachable = false;
    Enclosure R;        // R_N(alpha, gamma)
    Enclosure ratio;    // R_N / (N log N)
};

struct T8Construction {
    std::string alpha;
    long r = 1;                       // the multiplier normalizing {r alpha} < 1/3 (caller supplies r = 1)
    long depth = 0;
    DigitMap digits;                  // k -> b_{k+1}
    DigitVerdict validity;
    Gamma gamma = Gamma::zero();      // truncated series with its tail radius
    std::vector<long> K;
    std::vector<T8Checkpoint> checkpoints;
    long reachable = 0;
    bool decreasing = false;          // certified strict decrease over reachable checkpoints
    long precision = 0;
    bool pass() const { return validity.valid && decreasing && reachable >= 2; }
    std::string to_json() const;
};

// Empty K selects every k >= 2 with a_{k+1} >= 8 inside the table.
T8Construction adversarial_gamma_T8(const Real& alpha, const std::vector<long>& K = {}, long max_N = 2000000,
                                    long precision = 24, int threads = 1);

// f(N) = N^(p/s) with 0 < p/s < 1.
struct GrowthFn {
    long p = 1, s = 2;
    std::string text = "sqrt";
};
GrowthFn parse_growth(const std::string& text);

struct SpikeStep {
    long i = 0;
    long k = 0;
    mpz_class q_k1;       // q_{k_i+1}
    mpz_class n;          // n_i
    bool cc2 = true, cc3 = true, eqn1 = true, eqn2 = true;
    bool lookahead = false;
    Enclosure spike;      // lower bound (lo) and upper information for S_{n_i} - max term
    std::string spike_method;
    Enclosure f_times_i;  // i f(q_{k_i+1})
    bool spike_ok = false;
};

struct SpikeGammaPlan {
    std::string alpha;
    GrowthFn f;
    std::vector<int> eps;
    bool c1 = false;
    std::vector<SpikeStep> steps;
    Gamma gamma = Gamma::zero();
    bool gamma_in_range = false;      // |gamma| < min{alpha, 1 - alpha}, alpha taken mod 1
    bool invariants() const;
    bool spikes() const;
    bool pass() const { return c1 && gamma_in_range && invariants() && spikes(); }
    std::string to_json() const;
};

// Builds count indices plus one lookahead index that closes the spike at i = count.
SpikeGammaPlan adversarial_gamma_T5(const Real& alpha, const GrowthFn& f, const std::vector<int>& eps, long count,
                                    long direct_limit = 1000000, long max_index = 4000);

struct Hit {
    long n = 0;
    Enclosure product;
    Enclosure psi;
    bool trivial = false;  // ||n beta|| = 0
};

struct HitRecord {
    std::string beta;
    std::vector<Hit> hits;
    bool complete = true;
};

// Deterministic sample of count beta specs: rationals p/q with 2 <= q <= 1000 alternating with
// quadratic surds sqrt(d) / c for non-square d.
std::vector<std::string> sample_betas(long count, unsigned long seed = 2024);

std::vector<HitRecord> fiber_hit_scan(const Real& alpha, const PsiSpec& psi, const std::vector<std::string>& betas,
                                      long N, int threads = 1);
std::string hits_csv(const std::vector<HitRecord>& recs);
std::string hits_json(const std::string& alpha, const PsiSpec& psi, long N, const std::vector<HitRecord>& recs);

}  // namespace dioph
