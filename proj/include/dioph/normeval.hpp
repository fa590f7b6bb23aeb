#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <vector>

#include "dioph/ostrowski.hpp"

namespace dioph {

enum class NormMethod { Direct, Ostrowski };
enum class Branch { Abs, Complement };   // the norm is |Sigma| or 1 - |Sigma|

struct Term {
    Lin lin;
    Enclosure enc;
};

struct NamedCheck {
    std::string name;
    bool ok = false;
};

struct SigmaDecomposition {
    long m = 0;
    int s = 1;                 // sgn(delta_{m+1})
    Term sigma;                // sum_{k>=m} delta_{k+1} D_k
    Term abs_sigma;
    Branch branch = Branch::Abs;
    // three-term identity for |Sigma|
    long ell = 0;
    Term term1, term2, term3, delta;
    // two-term identity for 1 - |Sigma|
    long L = 0;
    Term tilde1, tilde2, tilde_delta;
    std::vector<NamedCheck> checks;

    bool pass() const;
    std::vector<std::string> failures() const;
};

struct NormResult {
    Enclosure value;           // of ||n alpha - gamma||
    NormMethod method = NormMethod::Direct;
    bool degenerate = false;   // n alpha - gamma is an integer
    std::optional<Lin> exact;  // the value as a form, when known
    std::optional<SigmaDecomposition> decomposition;
};

// Certified enclosure of width <= 2^-bits.
NormResult norm_direct(const Real& alpha, const mpz_class& n, const Gamma& gamma, long bits);
// The norm as an exact form, available when gamma is exact.
std::optional<Lin> norm_exact(const Real& alpha, const mpz_class& n, const Gamma& gamma);

// Digit route; every identity it uses is recomputed and recorded in decomposition.checks,
// and an Internal error is raised if any fails.
NormResult norm_via_ostrowski(const ConvergentTable& t, const OstrowskiInt& c, const OstrowskiReal& b,
                              long bits = 128);

struct HomBounds {
    bool applies = false;      // m >= 2
    long m = 0;
    Affine lower{0, 0}, upper{0, 0};
    Enclosure lower_enc, upper_enc;
    std::string verdict;
};

HomBounds hom_bounds(const OstrowskiInt& c, const ConvergentTable& t, long bits = 128);
// sgn(D_m) * sum_{k>=m} c_{k+1} D_k when m >= 2, or m = 1 and {alpha} < 1/2; empty otherwise.
std::optional<Affine> hom_formula(const OstrowskiInt& c, const ConvergentTable& t);
// (|delta_{m+1}| + 2) |D_m|.
Affine inhom_upper(const DeltaDigits& d, const ConvergentTable& t);

// Batch job: {"alpha": spec, "gamma": spec, "n": [..] | "n_from"/"n_to", "bits", "depth"}.
// Emits CSV rows n,value_lo,value_hi,m,branch,ell,L in order of n.
std::string norm_batch_csv(const std::string& job_json, int threads = 1);

}  // namespace dioph
