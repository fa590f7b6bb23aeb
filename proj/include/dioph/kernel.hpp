#pragma once

#include <gmpxx.h>

#include <exception>
#include <functional>
#include <thread>
#include <vector>

#include "dioph/ostrowski.hpp"

namespace dioph {

// Enclosure of ||x|| for x in [xlo, xhi] * 2^-P, as integers at scale 2^P.
// Returns false when the interval may contain an integer; then dlo = 0 and dhi is still an upper bound.
bool scaled_dist(const mpz_class& xlo, const mpz_class& xhi, long P, mpz_class& dlo, mpz_class& dhi);

// Fast certified evaluation of ||n alpha - gamma|| for many n: fixed-point enclosures of
// alpha and gamma at scale 2^P, with exact per-term fallback when a term is undecided or
// too coarse. All accumulation is in exact integers, so results do not depend on threading.
class NormKernel {
public:
    NormKernel(Real alpha, Gamma gamma, long P);

    long P() const { return P_; }
    const Real& alpha() const { return alpha_; }
    const Gamma& gamma() const { return gamma_; }

    // Enclosure of ||n alpha - gamma||; DegenerateGamma error when it is exactly 0.
    Enclosure norm(long n) const;
    // Bounds on 2^Q / ||n alpha - gamma|| (floor and ceiling); DegenerateGamma error on a zero term.
    void recip(long n, long Q, mpz_class& lo, mpz_class& hi) const;
    // Whether ||n alpha - gamma|| < eps, decided exactly (Precision error when undecidable).
    bool below(long n, const mpq_class& eps) const;

private:
    bool fast(long n, mpz_class& dlo, mpz_class& dhi) const;
    Enclosure slow(long n) const;

    Real alpha_;
    Gamma gamma_;
    long P_;
    mpz_class alo_, ahi_, glo_, ghi_;
};

// Runs f(begin, end, chunk_index) over [from, to] split into contiguous chunks.
void parallel_chunks(long from, long to, int threads, const std::function<void(long, long, int)>& f);

// Working precision for arguments up to N: enough bits that n * width stays far below the terms.
long default_kernel_bits(long N);

}  // namespace dioph
