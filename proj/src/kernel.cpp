#include "dioph/kernel.hpp"

#include "dioph/error.hpp"
#include "dioph/normeval.hpp"

namespace dioph {

namespace {

// relative width above which a term is recomputed exactly: (hi - lo) * 2^kRel > lo
constexpr long kRel = 40;

}  // namespace

bool scaled_dist(const mpz_class& xlo, const mpz_class& xhi, long P, mpz_class& dlo, mpz_class& dhi) {
    mpz_class r, one, half;
    mpz_fdiv_r_2exp(r.get_mpz_t(), xlo.get_mpz_t(), P);
    mpz_class top = r + (xhi - xlo);
    mpz_ui_pow_ui(one.get_mpz_t(), 2, P);
    half = one / 2;
    if (r == 0 || top >= one) {
        // lower bound 0; upper bound from the endpoints when the interval is short
        dlo = 0;
        if (top - r >= half) {
            dhi = half;
        } else {
            mpz_class t = top >= one ? mpz_class(top - one) : top;
            mpz_class e1 = r <= half ? r : mpz_class(one - r);
            dhi = e1 > t ? e1 : t;
        }
        return false;
    }
    mpz_class d1 = r <= half ? r : mpz_class(one - r);
    mpz_class d2 = top <= half ? top : mpz_class(one - top);
    dlo = d1 < d2 ? d1 : d2;
    dhi = d1 < d2 ? d2 : d1;
    if (r <= half && half <= top) dhi = half;
    return dlo > 0;
}

NormKernel::NormKernel(Real alpha, Gamma gamma, long P) : alpha_(std::move(alpha)), gamma_(std::move(gamma)), P_(P) {
    Enclosure a = alpha_.enclose(P + 2);
    alo_ = floor_scaled(a.lo, P);
    ahi_ = ceil_scaled(a.hi, P);
    LinEval ev(alpha_, gamma_);
    Enclosure g = ev.enclose(ev.gamma_lin(), P + 2);
    glo_ = floor_scaled(g.lo, P);
    ghi_ = ceil_scaled(g.hi, P);
}

bool NormKernel::fast(long n, mpz_class& dlo, mpz_class& dhi) const {
    mpz_class xlo = alo_ * n - ghi_;
    mpz_class xhi = ahi_ * n - glo_;
    if (!scaled_dist(xlo, xhi, P_, dlo, dhi)) return false;
    mpz_class w = dhi - dlo;
    mpz_mul_2exp(w.get_mpz_t(), w.get_mpz_t(), kRel);
    return w <= dlo;
}

Enclosure NormKernel::slow(long n) const {
    long bits = P_ + 64;
    while (true) {
        NormResult r = norm_direct(alpha_, n, gamma_, bits);
        if (r.degenerate)
            throw Error(ErrorKind::DegenerateGamma, "n alpha - gamma is an integer at n=" + std::to_string(n));
        if (r.value.lo > 0 && (r.value.hi - r.value.lo) * (mpq_class(mpz_class(1) << kRel)) <= r.value.lo) return r.value;
        if (bits * 2 > precision_cap())
            throw Error(ErrorKind::Precision, "term at n=" + std::to_string(n) + " undecided at precision cap");
        bits *= 2;
    }
}

Enclosure NormKernel::norm(long n) const {
    mpz_class dlo, dhi;
    if (fast(n, dlo, dhi)) {
        mpq_class s(mpz_class(1) << static_cast<unsigned long>(P_));
        return {mpq_class(dlo) / s, mpq_class(dhi) / s};
    }
    return slow(n);
}

void NormKernel::recip(long n, long Q, mpz_class& lo, mpz_class& hi) const {
    mpz_class dlo, dhi;
    if (fast(n, dlo, dhi)) {
        mpz_class num;
        mpz_ui_pow_ui(num.get_mpz_t(), 2, P_ + Q);
        mpz_fdiv_q(lo.get_mpz_t(), num.get_mpz_t(), dhi.get_mpz_t());
        mpz_cdiv_q(hi.get_mpz_t(), num.get_mpz_t(), dlo.get_mpz_t());
        return;
    }
    Enclosure e = slow(n);
    mpq_class s(mpz_class(1) << static_cast<unsigned long>(Q));
    lo = floor_q(s / e.hi);
    hi = ceil_q(s / e.lo);
}

bool NormKernel::below(long n, const mpq_class& eps) const {
    mpz_class dlo, dhi;
    mpz_class xlo = alo_ * n - ghi_;
    mpz_class xhi = ahi_ * n - glo_;
    mpq_class es = eps * mpq_class(mpz_class(1) << static_cast<unsigned long>(P_));
    scaled_dist(xlo, xhi, P_, dlo, dhi);
    if (mpq_class(dhi) < es) return true;
    if (mpq_class(dlo) >= es) return false;
    if (auto ex = norm_exact(alpha_, n, gamma_)) return alpha_.sign(ex->f - Affine{0, eps}) < 0;
    for (long bits = P_ + 64; bits <= precision_cap(); bits *= 2) {
        NormResult r = norm_direct(alpha_, n, gamma_, bits);
        if (r.value.hi < eps) return true;
        if (r.value.lo >= eps) return false;
    }
    throw Error(ErrorKind::Precision, "membership of n=" + std::to_string(n) + " undecided at precision cap");
}

void parallel_chunks(long from, long to, int threads, const std::function<void(long, long, int)>& f) {
    if (to < from) return;
    long total = to - from + 1;
    int nt = static_cast<int>(std::max(1L, std::min<long>(threads, total)));
    if (nt == 1) {
        f(from, to, 0);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errs(nt);
    long step = (total + nt - 1) / nt;
    for (int i = 0; i < nt; ++i) {
        long b = from + i * step, e = std::min(to, b + step - 1);
        pool.emplace_back([&, i, b, e] {
            try {
                if (b <= e) f(b, e, i);
            } catch (...) {
                errs[i] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
}

long default_kernel_bits(long N) { return 96 + 2 * bitlen(mpz_class(std::max(N, 2L))); }

}  // namespace dioph
