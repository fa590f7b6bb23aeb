#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

#include "dioph/kernel.hpp"

namespace dioph {

struct CountCheck {
    std::string name;
    bool applies = false;
    bool ok = false;
    mpq_class lower, upper;   // the bound values checked (upper < 0 when absent)
    std::string note;
};

struct CountReport {
    std::string alpha, gamma;
    mpq_class eps;
    long N = 0;
    long count = 0;
    long K = 0;
    mpq_class M;                      // min{eps q_{K+1}, max{eps N, N / (2 q_K)}}
    std::vector<CountCheck> checks;
    // auxiliary brute-force counts used by the transfer inequalities
    long hom_count_2eps = -1;         // #N(alpha, 2 eps)
    long half_gamma_count = -1;       // #N'_gamma(alpha, eps/2), N' = floor(N/2)
    long half_hom_count = -1;         // #N'(alpha, eps/2)
    bool pass() const;
    std::string to_json() const;
};

// Brute-force #{1 <= n <= N : ||n alpha - gamma|| < eps}, each membership decided exactly.
long count_below(const NormKernel& k, const mpq_class& eps, long N, int threads = 1);

CountReport count_hom(const Real& alpha, const mpq_class& eps, long N, int threads = 1);
CountReport count_inhom(const Real& alpha, const Gamma& gamma, const mpq_class& eps, long N, int threads = 1);

}  // namespace dioph
