#include "dioph/constructions.hpp"

#include <json.hpp>

#include <algorithm>
#include <exception>
#include <memory>
#include <mutex>
#include <random>
#include <sstream>

#include "dioph/error.hpp"
#include "dioph/kernel.hpp"
#include "dioph/normeval.hpp"

namespace dioph {

namespace {

using ojson = nlohmann::ordered_json;

ojson enc_json(const Enclosure& e) { return ojson::array({dec_down(e.lo, 20), dec_up(e.hi, 20)}); }

// D_k = q_k alpha - p_k and |D_k| = (-1)^k D_k.
Affine D_of(const Real& x, long k) { return {mpq_class(x.q(k)), mpq_class(-x.p(k))}; }
Affine absD_of(const Real& x, long k) { return k % 2 == 0 ? D_of(x, k) : -D_of(x, k); }

mpz_class ipow(const mpz_class& b, long e) {
    mpz_class r;
    mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), static_cast<unsigned long>(e));
    return r;
}

}  // namespace

LiouvilleStream build_liouville_alpha(const std::string& rule, long depth, const std::string& prefix,
                                      long budget_bits) {
    if (depth < 2) throw Error(ErrorKind::Domain, "Liouville stream depth must be at least 2");
    LiouvilleStream s;
    s.rule = rule;
    s.depth = depth;
    s.spec = parse_real("liouville:" + rule + ":" + prefix);
    s.spec.budget_bits = budget_bits;
    Real x(s.spec);
    if (!x.has_quotient(depth + 1))
        throw Error(ErrorKind::Resource, "rule " + rule + " exceeds the " + std::to_string(budget_bits) +
                                             "-bit budget before depth " + std::to_string(depth));
    for (long k = 0; k <= depth + 1; ++k) s.quotients.push_back(x.quotient(k));
    const long pr = 128;
    Interval best(pr);
    for (long k = 2; k <= depth; ++k) {
        Interval r = Interval::log(Interval(x.q(k + 1), pr)) / Interval::log(Interval(x.q(k), pr));
        best = k == 2 ? r : best.max(r);
        s.ratios.push_back(r.enclosure());
        s.running.push_back(best.enclosure());
    }
    s.max_exponent = best.enclosure();
    return s;
}

std::string LiouvilleStream::to_json() const {
    ojson j;
    j["schema"] = 1;
    j["alpha"] = to_string(spec);
    j["rule"] = rule;
    j["depth"] = depth;
    j["budget_bits"] = spec.budget_bits;
    auto qs = ojson::array();
    for (const auto& a : quotients) qs.push_back(a.get_str());
    j["quotients"] = qs;
    auto run = ojson::array();
    for (size_t i = 0; i < running.size(); ++i)
        run.push_back({{"k", static_cast<long>(i) + 2}, {"ratio", enc_json(ratios[i])}, {"running_max", enc_json(running[i])}});
    j["running_exponent"] = run;
    j["max_exponent"] = enc_json(max_exponent);
    return j.dump();
}

T8Construction adversarial_gamma_T8(const Real& alpha, const std::vector<long>& Kin, long max_N, long precision,
                                    int threads) {
    T8Construction c;
    c.alpha = alpha.str();
    c.precision = precision;
    // Digits are defined wherever a_{k+1} is known; the tail beyond is bounded by 2 / q_d.
    long d = 1;
    while (d < 2000 && alpha.has_quotient(d + 1)) ++d;
    if (d < 3) throw Error(ErrorKind::Resource, "quotient stream too short for a construction");
    c.depth = d;
    auto a = [&](long k) { return alpha.quotient(k); };

    const mpz_class a0 = a(0);
    if (alpha.sign(Affine{1, -mpq_class(a0) - mpq_class(1, 3)}) >= 0) {
        std::string hint;
        for (long r : {-1L, 2L, -2L, 3L, -3L}) {
            Enclosure e = alpha.enclose(Affine{r, 0}, 64);
            mpz_class f = floor_q(e.lo);
            if (f != floor_q(e.hi)) continue;
            if (alpha.sign(Affine{r, -mpq_class(f) - mpq_class(1, 3)}) < 0) {
                hint = "; {r alpha} < 1/3 for r=" + std::to_string(r);
                break;
            }
        }
        throw Error(ErrorKind::Hypothesis, "construction needs {alpha} < 1/3" + hint);
    }

    if (Kin.empty()) {
        for (long k = 2; k < d; ++k)
            if (a(k + 1) >= 8) c.K.push_back(k);
    } else {
        c.K = Kin;
        std::sort(c.K.begin(), c.K.end());
        c.K.erase(std::unique(c.K.begin(), c.K.end()), c.K.end());
        for (long k : c.K) {
            if (k <= 1) throw Error(ErrorKind::Hypothesis, "checkpoint index K=" + std::to_string(k) + " must exceed 1");
            if (k >= d) throw Error(ErrorKind::Resource, "checkpoint index K=" + std::to_string(k) + " beyond the stream budget");
            if (a(k + 1) < 8)
                throw Error(ErrorKind::Hypothesis, "a_{K+1} = " + a(k + 1).get_str() + " < 8 at K=" + std::to_string(k));
        }
    }
    if (c.K.empty()) throw Error(ErrorKind::Hypothesis, "no index with a_{K+1} >= 8 inside the budget");

    for (long k = 0; k < d; ++k) {
        const mpz_class ak = a(k + 1);
        mpz_class b;
        if (std::binary_search(c.K.begin(), c.K.end(), k))
            b = (ak + 1) / 2;
        else if (ak <= 2)
            b = 0;
        else
            b = 1;
        if (b != 0) c.digits[k] = b;
    }
    // Ostrowski admissibility of the digit sequence.
    for (const auto& [k, b] : c.digits) {
        const mpz_class ak = a(k + 1);
        std::string rule;
        if (k == 0 && b >= ak) rule = "first digit must be below a_1";
        else if (b > ak) rule = "digit exceeds partial quotient";
        else if (k >= 1 && b == ak && c.digits.count(k - 1)) rule = "digit below a full digit must vanish";
        if (!rule.empty() && c.validity.valid) c.validity = {false, k, rule};
    }
    Affine f{0, 0};
    for (const auto& [k, b] : c.digits) f += Affine{mpq_class(alpha.q(k)), mpq_class(-alpha.p(k))} * mpq_class(b);
    c.gamma = Gamma::affine(f, "t8", mpq_class(2, alpha.q(d)));

    std::vector<long> Ns;
    for (long k : c.K) {
        T8Checkpoint cp;
        cp.K = k;
        cp.a_K1 = a(k + 1);
        cp.a_prime = cp.a_K1 / 4;
        cp.N = cp.a_prime * alpha.q(k);
        cp.reachable = cp.N <= max_N;
        if (cp.reachable) Ns.push_back(cp.N.get_si());
        c.checkpoints.push_back(cp);
    }
    c.reachable = static_cast<long>(Ns.size());
    if (!Ns.empty()) {
        auto pts = sums_SR(alpha, c.gamma, Ns, precision, threads);
        const long pr = 128;
        size_t j = 0;
        for (auto& cp : c.checkpoints) {
            if (!cp.reachable) continue;
            cp.R = pts[j++].R;
            Interval n(cp.N, pr);
            cp.ratio = (Interval(cp.R, pr) / (n * Interval::log(n))).enclosure();
        }
    }
    c.decreasing = true;
    const T8Checkpoint* prev = nullptr;
    for (const auto& cp : c.checkpoints) {
        if (!cp.reachable) continue;
        if (prev && !(cp.ratio.hi < prev->ratio.lo)) c.decreasing = false;
        prev = &cp;
    }
    return c;
}

std::string T8Construction::to_json() const {
    ojson j;
    j["schema"] = 1;
    j["alpha"] = alpha;
    j["r"] = r;
    j["depth"] = depth;
    auto dg = ojson::array();
    for (const auto& [k, b] : digits) dg.push_back({{"k", k}, {"b", b.get_str()}});
    j["digits"] = dg;
    j["digits_valid"] = validity.valid;
    if (!validity.valid) j["violation"] = {{"k", validity.k}, {"rule", validity.rule}};
    j["gamma_tail_radius"] = dec_up(gamma.radius(), 6);
    j["K"] = K;
    auto cps = ojson::array();
    for (const auto& cp : checkpoints) {
        ojson e;
        e["K"] = cp.K;
        e["a_K+1"] = cp.a_K1.get_str();
        e["a_prime"] = cp.a_prime.get_str();
        e["N"] = cp.N.get_str();
        e["reachable"] = cp.reachable;
        if (cp.reachable) {
            e["R"] = enc_json(cp.R);
            e["ratio"] = enc_json(cp.ratio);
        }
        cps.push_back(e);
    }
    j["checkpoints"] = cps;
    j["reachable"] = reachable;
    j["ratio_strictly_decreasing"] = decreasing;
    j["precision"] = precision;
    j["pass"] = pass();
    return j.dump();
}

GrowthFn parse_growth(const std::string& text) {
    GrowthFn g;
    g.text = text;
    if (text == "sqrt") return g;
    if (text.rfind("pow:", 0) == 0) {
        mpq_class r;
        if (r.set_str(text.substr(4), 10) != 0) throw Error(ErrorKind::Parse, "bad growth exponent in " + text);
        r.canonicalize();
        if (r <= 0 || r >= 1) throw Error(ErrorKind::Domain, "growth exponent must lie in (0, 1) for f(N) = o(N)");
        if (!r.get_num().fits_slong_p() || !r.get_den().fits_slong_p() || r.get_den() > 1000)
            throw Error(ErrorKind::Domain, "growth exponent denominator too large");
        g.p = r.get_num().get_si();
        g.s = r.get_den().get_si();
        return g;
    }
    throw Error(ErrorKind::Parse, "unknown growth function '" + text + "' (sqrt | pow:P/Q)");
}

bool SpikeGammaPlan::invariants() const {
    for (const auto& s : steps)
        if (!(s.cc2 && s.cc3 && s.eqn1 && s.eqn2)) return false;
    return true;
}

bool SpikeGammaPlan::spikes() const {
    for (const auto& s : steps)
        if (!s.lookahead && !s.spike_ok) return false;
    return true;
}

SpikeGammaPlan adversarial_gamma_T5(const Real& alpha, const GrowthFn& f, const std::vector<int>& eps_in, long count,
                                    long direct_limit, long max_index) {
    if (count < 1) throw Error(ErrorKind::Domain, "count must be positive");
    if (alpha.is_rational()) throw Error(ErrorKind::Domain, "alpha must be irrational");
    SpikeGammaPlan plan;
    plan.alpha = alpha.str();
    plan.f = f;
    for (long i = 0; i < count; ++i) plan.eps.push_back(eps_in.empty() ? 0 : eps_in[i % eps_in.size()] & 1);

    const mpz_class a0 = alpha.quotient(0);
    const Affine frac{1, -mpq_class(a0)};
    const Affine cofrac{-1, mpq_class(a0) + 1};
    auto below_min = [&](const Affine& v) { return alpha.sign(frac - v) > 0 && alpha.sign(cofrac - v) > 0; };

    // (psi 1): q_{k+1} / f(q_{k+1}) >= (i+1) q_{k_i+1}, i.e. q_{k+1}^(s-p) >= ((i+1) q_{k_i+1})^s.
    auto eqn1 = [&](const mpz_class& qnext, long i1, const mpz_class& qprev) {
        return ipow(qnext, f.s - f.p) >= ipow(mpz_class(i1) * qprev, f.s);
    };
    auto need = [&](long k) {
        if (k > max_index || !alpha.has_quotient(k + 1))
            throw Error(ErrorKind::Resource, "index search passed k=" + std::to_string(k) +
                                                 " without meeting the growth conditions");
    };

    long k1 = 1;
    for (;; ++k1) {
        need(k1);
        if (below_min(absD_of(alpha, k1 - 1) + absD_of(alpha, k1))) break;
    }
    plan.c1 = true;
    std::vector<long> ks{k1};
    for (long i = 1; i <= count; ++i) {
        const long ki = ks.back();
        long k = ki + 5;
        if ((k - ki) % 2 != plan.eps[i - 1]) ++k;
        for (;; k += 2) {
            need(k);
            if (!eqn1(alpha.q(k + 1), i + 1, alpha.q(ki + 1))) continue;
            if (i >= 2) {
                const mpz_class& mid = alpha.q(ki + 1);
                if (mid * mid > alpha.q(k + 1) * alpha.q(ks[ks.size() - 2] + 1)) continue;
            }
            break;
        }
        ks.push_back(k);
    }

    Affine g{0, 0};
    for (long k : ks) g += D_of(alpha, k);
    plan.gamma = Gamma::affine(g, "t5");
    plan.gamma_in_range = below_min(g) && below_min(-g);

    // Independent re-check of every plan condition.
    mpz_class n = 0;
    for (size_t j = 0; j < ks.size(); ++j) {
        SpikeStep s;
        s.i = static_cast<long>(j) + 1;
        s.k = ks[j];
        s.q_k1 = alpha.q(ks[j] + 1);
        n += alpha.q(ks[j]);
        s.n = n;
        s.lookahead = s.i == count + 1;
        if (j >= 1) {
            long di = ks[j] - ks[j - 1];
            s.cc2 = di >= 5;
            s.cc3 = di % 2 == plan.eps[j - 1];
            s.eqn1 = eqn1(s.q_k1, s.i, alpha.q(ks[j - 1] + 1));
        }
        if (j >= 2) {
            const mpz_class& mid = alpha.q(ks[j - 1] + 1);
            s.eqn2 = mid * mid <= s.q_k1 * alpha.q(ks[j - 2] + 1);
        }
        plan.steps.push_back(s);
    }

    const long pr = 128;
    for (auto& s : plan.steps) {
        if (s.lookahead) continue;
        Interval fi = Interval(s.i, pr) *
                      Interval::exp(Interval(mpq_class(f.p, f.s), pr) * Interval::log(Interval(s.q_k1, pr)));
        s.f_times_i = fi.enclosure();
        if (s.n <= direct_limit) {
            const long N = s.n.get_si();
            NormKernel kern(alpha, plan.gamma, default_kernel_bits(N) + 32);
            const long Q = 48 + bitlen(s.n);
            mpz_class lo, hi, tlo, thi, Slo = 0, Shi = 0, maxlo = 0, maxhi = 0;
            for (long m = 1; m <= N; ++m) {
                kern.recip(m, Q, lo, hi);
                mpz_fdiv_q_ui(tlo.get_mpz_t(), lo.get_mpz_t(), m);
                mpz_cdiv_q_ui(thi.get_mpz_t(), hi.get_mpz_t(), m);
                Slo += tlo;
                Shi += thi;
                if (tlo > maxlo) maxlo = tlo;
                if (thi > maxhi) maxhi = thi;
            }
            mpq_class scale(mpz_class(1) << static_cast<unsigned long>(Q));
            s.spike = {mpq_class(Slo - maxhi) / scale, mpq_class(Shi - maxlo) / scale};
            s.spike_method = "direct";
        } else {
            if (s.i < 2) throw Error(ErrorKind::Internal, "first spike index too large for direct evaluation");
            // S - max >= the smaller of two distinct terms.
            const SpikeStep& p = plan.steps[s.i - 2];
            auto term_lo = [&](const mpz_class& m) -> mpq_class {
                long bits = 64 + 2 * bitlen(s.q_k1);
                NormResult r = norm_direct(alpha, m, plan.gamma, bits);
                return mpq_class(1) / (mpq_class(m) * r.value.hi);
            };
            mpq_class a = term_lo(p.n), b = term_lo(s.n);
            mpq_class lb = a < b ? a : b;
            s.spike = {lb, lb};
            s.spike_method = "two-term lower bound";
        }
        // spike.lo > i q^(p/s)  <=>  num^s > i^s q^p den^s (spike.lo > 0)
        const mpq_class& v = s.spike.lo;
        s.spike_ok = v > 0 && ipow(v.get_num(), f.s) > ipow(mpz_class(s.i), f.s) * ipow(s.q_k1, f.p) * ipow(v.get_den(), f.s);
    }
    return plan;
}

std::string SpikeGammaPlan::to_json() const {
    ojson j;
    j["schema"] = 1;
    j["alpha"] = alpha;
    j["f"] = f.text;
    j["eps"] = eps;
    j["c1"] = c1;
    auto st = ojson::array();
    for (const auto& s : steps) {
        ojson e;
        e["i"] = s.i;
        e["k"] = s.k;
        e["q_k+1"] = s.q_k1.get_str();
        e["n"] = s.n.get_str();
        e["lookahead"] = s.lookahead;
        e["cc2"] = s.cc2;
        e["cc3"] = s.cc3;
        e["growth_ratio"] = s.eqn1;
        e["ratio_monotone"] = s.eqn2;
        if (!s.lookahead) {
            e["spike_method"] = s.spike_method;
            e["spike_lower"] = dec_down(s.spike.lo, 20);
            e["i_f_q"] = enc_json(s.f_times_i);
            e["spike_ok"] = s.spike_ok;
        }
        st.push_back(e);
    }
    j["steps"] = st;
    j["gamma_in_range"] = gamma_in_range;
    j["invariants"] = invariants();
    j["pass"] = pass();
    return j.dump();
}

namespace {

struct BetaNorm {
    std::optional<mpq_class> rat;
    std::optional<Real> real;
    std::unique_ptr<NormKernel> kern;
};

Enclosure rational_norm(const mpq_class& b, long n) {
    mpz_class num = b.get_num() * n, den = b.get_den();
    mpz_class r;
    mpz_fdiv_r(r.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    mpz_class d = std::min(r, mpz_class(den - r));
    mpq_class v(d, den);
    v.canonicalize();
    return {v, v};
}

}  // namespace

std::vector<HitRecord> fiber_hit_scan(const Real& alpha, const PsiSpec& psi, const std::vector<std::string>& betas,
                                      long N, int threads) {
    if (N < 1) throw Error(ErrorKind::Domain, "N must be positive");
    if (!psi_decreasing(psi) && psi.kind != PsiSpec::Kind::Zero)
        throw Error(ErrorKind::Hypothesis, "psi must be decreasing");
    const long P = default_kernel_bits(N);
    const long pr = 96;
    std::vector<Enclosure> ps(N + 1), na(N + 1);
    NormKernel ka(alpha, Gamma::zero(), P);
    parallel_chunks(1, N, threads, [&](long b, long e, int) {
        for (long n = b; n <= e; ++n) {
            ps[n] = psi_value(psi, n, pr).enclosure();
            na[n] = ka.norm(n);
        }
    });

    std::vector<HitRecord> out(betas.size());
    std::vector<BetaNorm> bn(betas.size());
    for (size_t i = 0; i < betas.size(); ++i) {
        out[i].beta = betas[i];
        const std::string& s = betas[i];
        if (!s.empty() && s.find_first_not_of("-+0123456789/") == std::string::npos) {
            mpq_class q;
            if (q.set_str(s, 10) != 0) throw Error(ErrorKind::Parse, "bad rational beta '" + s + "'");
            q.canonicalize();
            bn[i].rat = q;
            continue;
        }
        Real r = Real::parse(s);
        if (auto v = r.rational_value()) {
            bn[i].rat = *v;
        } else {
            bn[i].real = r;
            bn[i].kern = std::make_unique<NormKernel>(r, Gamma::zero(), P);
        }
    }

    auto scan = [&](size_t i) {
        HitRecord& rec = out[i];
        const BetaNorm& b = bn[i];
        for (long n = 1; n <= N; ++n) {
            if (ps[n].hi <= 0) continue;
            Enclosure db = b.rat ? rational_norm(*b.rat, n) : b.kern->norm(n);
            if (db.hi == 0) {
                rec.hits.push_back({n, {0, 0}, ps[n], true});
                continue;
            }
            Enclosure prod{na[n].lo * db.lo, na[n].hi * db.hi};
            if (prod.lo >= ps[n].hi) continue;
            if (prod.hi < ps[n].lo) {
                rec.hits.push_back({n, prod, ps[n], false});
                continue;
            }
            bool decided = false;
            for (long bits = 2 * P; bits <= precision_cap() && !decided; bits *= 2) {
                Enclosure x = norm_direct(alpha, mpz_class(n), Gamma::zero(), bits).value;
                Enclosure y = b.rat ? db : norm_direct(*b.real, mpz_class(n), Gamma::zero(), bits).value;
                Enclosure pv = psi_value(psi, n, bits).enclosure();
                prod = {x.lo * y.lo, x.hi * y.hi};
                if (prod.lo >= pv.hi) decided = true;
                else if (prod.hi < pv.lo) {
                    rec.hits.push_back({n, prod, pv, false});
                    decided = true;
                }
            }
            if (!decided)
                throw Error(ErrorKind::Precision, "hit test for beta=" + rec.beta + " at n=" + std::to_string(n) +
                                                      " undecided at precision cap");
        }
    };
    if (betas.empty()) return out;
    std::exception_ptr err;
    std::mutex mu;
    parallel_chunks(0, static_cast<long>(betas.size()) - 1, threads, [&](long b, long e, int) {
        for (long i = b; i <= e; ++i) {
            try {
                scan(static_cast<size_t>(i));
            } catch (...) {
                std::lock_guard<std::mutex> lk(mu);
                if (!err) err = std::current_exception();
            }
        }
    });
    if (err) std::rethrow_exception(err);
    return out;
}

std::vector<std::string> sample_betas(long count, unsigned long seed) {
    std::mt19937_64 rng(seed);
    std::vector<std::string> out;
    for (long i = 0; i < count; ++i) {
        if (i % 2 == 0) {
            long q = 2 + static_cast<long>(rng() % 999);
            long p = 1 + static_cast<long>(rng() % (q - 1));
            mpq_class r(p, q);
            r.canonicalize();
            out.push_back(r.get_str());
        } else {
            long d;
            do {
                d = 2 + static_cast<long>(rng() % 200);
            } while (mpz_perfect_square_p(mpz_class(d).get_mpz_t()));
            long c = 1 + static_cast<long>(rng() % 16);
            out.push_back("surd:(0+1*sqrt" + std::to_string(d) + ")/" + std::to_string(c));
        }
    }
    return out;
}

std::string hits_csv(const std::vector<HitRecord>& recs) {
    std::ostringstream os;
    os << "beta,n,product_hi,psi_n_lo,trivial\n";
    for (const auto& r : recs)
        for (const auto& h : r.hits)
            os << '"' << r.beta << "\"," << h.n << ',' << dec_up(h.product.hi, 12) << ',' << dec_down(h.psi.lo, 12)
               << ',' << (h.trivial ? 1 : 0) << '\n';
    return os.str();
}

std::string hits_json(const std::string& alpha, const PsiSpec& psi, long N, const std::vector<HitRecord>& recs) {
    ojson j;
    j["schema"] = 1;
    j["alpha"] = alpha;
    j["psi"] = psi.text;
    j["N"] = N;
    auto arr = ojson::array();
    for (const auto& r : recs) {
        ojson e;
        e["beta"] = r.beta;
        e["complete"] = r.complete;
        e["hit_count"] = r.hits.size();
        long trivial = 0;
        auto ns = ojson::array();
        for (const auto& h : r.hits) {
            ns.push_back(h.n);
            trivial += h.trivial;
        }
        e["trivial_hits"] = trivial;
        e["hits"] = ns;
        arr.push_back(e);
    }
    j["records"] = arr;
    return j.dump();
}

}  // namespace dioph
