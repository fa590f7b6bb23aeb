// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any criterion fails.
#include <gmpxx.h>
#include <mpfr.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dioph/constructions.hpp"
#include "dioph/contfrac.hpp"
#include "dioph/counting.hpp"
#include "dioph/error.hpp"
#include "dioph/gapsets.hpp"
#include "dioph/normeval.hpp"
#include "dioph/ostrowski.hpp"
#include "dioph/sums.hpp"

using namespace dioph;

namespace {

struct Outcome {
    bool ok = true;
    std::ostringstream detail;
    void fail(const std::string& why) {
        if (ok) detail << "first failure: " << why << "; ";
        ok = false;
    }
};

long double to_ld(const mpq_class& v) {
    mpfr_t f;
    mpfr_init2(f, 128);
    mpfr_set_q(f, v.get_mpq_t(), MPFR_RNDN);
    long double r = mpfr_get_ld(f, MPFR_RNDN);
    mpfr_clear(f);
    return r;
}

long double value_ld(const Real& x) { return to_ld(x.enclose(90).lo); }

long double dist_ld(long double x) { return std::fabs(x - std::round(x)); }

// Random admissible finite digit string b_1..b_G for a real shift, repaired into the digit rules.
DigitMap random_real_digits(const ConvergentTable& t, long G, std::mt19937_64& rng) {
    for (;;) {
        DigitMap b;
        long prev = 0;
        for (long k = 0; k < G; ++k) {
            long a = t.a(k + 1).get_si();
            long hi = k == 0 ? a - 1 : a;
            long v = hi <= 0 ? 0 : static_cast<long>(rng() % (hi + 1));
            if (v == a && prev != 0) v = a - 1;
            if (v != 0) b[k] = v;
            prev = v;
        }
        if (validate_digits(b, t, false).valid) return b;
    }
}

// 1. Continued-fraction relations.
void criterion1(Outcome& o) {
    std::vector<std::string> specs{"golden", "surd:(0+1*sqrt2)/1", "surd:(0+1*sqrt3)/1", "e", "liouville:qk:[0;1]"};
    for (const auto& s : specs) {
        Real x = Real::parse(s);
        long depth = 300;
        if (x.is_stream()) {
            depth = 2;
            while (depth < 300 && x.has_quotient(depth + 4)) ++depth;
        }
        auto t = ConvergentTable::build(x, depth);
        auto rep = verify_relations(t);
        long rows = 0;
        for (const auto& c : rep.checks) {
            rows += c.rows;
            if (!c.pass) o.fail(s + " " + c.name + " " + c.first_failure);
        }
        o.detail << s << " depth " << t.depth() << " (" << rep.checks.size() << " relations, " << rows
                 << " row checks); ";
    }
}

// 2. Ostrowski roundtrip, uniqueness, order.
void enumerate_maps(const ConvergentTable& t, long k, const mpz_class& value, long limit, DigitMap& cur,
                    const std::function<void(const DigitMap&, long)>& emit) {
    if (k < 0) {
        if (value > 0) emit(cur, value.get_si());
        return;
    }
    const long a = t.a(k + 1).get_si();
    for (long c = 0; c <= a; ++c) {
        mpz_class v = value + c * t.q(k);
        if (v > limit) break;
        if (c) cur[k] = c;
        else cur.erase(k);
        enumerate_maps(t, k - 1, v, limit, cur, emit);
    }
    cur.erase(k);
}

void criterion2(Outcome& o) {
    for (const std::string s : {"golden", "surd:(0+1*sqrt2)/1", "surd:(0+1*sqrt3)/1", "e"}) {
        Real x = Real::parse(s);
        auto t = table_for(x, 100000);
        long bad = 0;
        for (long n = 1; n <= 100000; ++n) {
            auto c = expand_int(t, n);
            if (!validate_digits(c.digits, t, true).valid || reconstruct_int(c, t) != n) {
                if (bad++ == 0) o.fail(s + " roundtrip n=" + std::to_string(n));
            }
        }
        // Every admissible digit string of value <= 1000 is hit exactly once.
        const long limit = 1000;
        long top = K_of(t, limit);
        std::map<long, DigitMap> seen;
        long valid = 0, dup = 0, mismatch = 0;
        DigitMap cur;
        enumerate_maps(t, top, 0, limit, cur, [&](const DigitMap& d, long v) {
            if (!validate_digits(d, t, true).valid) return;
            ++valid;
            if (!seen.emplace(v, d).second) ++dup;
        });
        for (long n = 1; n <= limit; ++n) {
            auto it = seen.find(n);
            if (it == seen.end() || it->second != expand_int(t, n).digits) ++mismatch;
        }
        if (valid != limit || dup || mismatch)
            o.fail(s + " uniqueness: " + std::to_string(valid) + " admissible strings, " + std::to_string(dup) +
                   " duplicates, " + std::to_string(mismatch) + " mismatches");
        long order_bad = 0;
        for (long n = 1; n < limit; ++n)
            if (compare_reverse_lex(expand_int(t, n).digits, expand_int(t, n + 1).digits) >= 0) ++order_bad;
        if (order_bad) o.fail(s + " reverse-lex order");
        o.detail << s << ": " << valid << " admissible strings <= 1000; ";
    }
}

// 3. Digit route versus direct route.
void criterion3(Outcome& o) {
    std::mt19937_64 rng(31337);
    const mpq_class gap = mpq_class(1, mpz_class(1) << 80);
    for (const std::string s : {"golden", "surd:(0+1*sqrt2)/1", "surd:(0+1*sqrt3)/1", "e"}) {
        Real x = Real::parse(s);
        auto t = table_for(x, 10000, 16);
        const long G = std::min<long>(12, t.depth() - 2);
        std::vector<std::pair<Gamma, OstrowskiReal>> pool;
        for (int i = 0; i < 64; ++i) {
            Gamma g = gamma_from_digits(random_real_digits(t, G, rng), t);
            pool.emplace_back(g, expand_real(t, g, t.depth()));
        }
        long agree = 0, degenerate = 0, bracket = 0;
        for (int i = 0; i < 10000; ++i) {
            long n = 1 + static_cast<long>(rng() % 10000);
            const auto& [g, b] = pool[rng() % pool.size()];
            auto c = expand_int(t, n);
            try {
                auto via = norm_via_ostrowski(t, c, b, 96);
                auto dir = norm_direct(x, n, g, 96);
                bool ok = via.value.hi - via.value.lo <= gap && dir.value.hi - dir.value.lo <= gap &&
                          via.value.overlaps(dir.value);
                if (!via.decomposition || !via.decomposition->pass()) ok = false;
                if (ok) ++agree;
                else o.fail(s + " n=" + std::to_string(n) + " gamma=" + g.label());
            } catch (const Error& e) {
                if (e.kind() == ErrorKind::DegenerateGamma) ++degenerate;
                else o.fail(s + " n=" + std::to_string(n) + ": " + e.what());
            }
            auto h = hom_bounds(c, t);
            if (h.applies) {
                ++bracket;
                Lin v = *norm_exact(x, n, Gamma::zero());
                if (x.sign(v.f - h.lower) < 0 || x.sign(h.upper - v.f) < 0)
                    o.fail(s + " bracket n=" + std::to_string(n));
            }
        }
        o.detail << s << ": " << agree << " agree, " << degenerate << " degenerate, " << bracket << " brackets; ";
    }
}

// 4. Gaps lemma.
void criterion4(Outcome& o) {
    std::mt19937_64 rng(4242);
    const long N = 10000;
    for (const std::string s : {"golden", "surd:(0+1*sqrt2)/1", "surd:(0+1*sqrt3)/1", "e"}) {
        Real x = Real::parse(s);
        auto t = table_for(x, N, 6);
        std::set<std::vector<long>> done;
        long tested = 0, case2 = 0, attempts = 0;
        while (tested < 120 && attempts < 100000) {
            ++attempts;
            long m = static_cast<long>(rng() % std::min<long>(K_of(t, N) + 1, 12));
            DigitPrefix p;
            for (long k = 0; k <= m; ++k) {
                long a = t.a(k + 1).get_si();
                p.d.push_back(static_cast<long>(rng() % (a + 1)));
            }
            if (!prefix_violation(p, t).empty() || m + 1 > t.depth() || !done.insert(p.d).second) continue;
            ++tested;
            auto mem = enumerate_A(p, t, N);
            auto scan = enumerate_A_scan(p, t, N);
            bool same = mem.size() == scan.size();
            for (size_t i = 0; same && i < mem.size(); ++i)
                same = mem[i].n == scan[i].n && mem[i].c_next == scan[i].c_next;
            std::string tag = s + " prefix m=" + std::to_string(m);
            if (!same) o.fail(tag + " enumeration differs from scan");
            auto g = verify_gaps(mem, p, t);
            if (!g.pass()) o.fail(tag + " gaps: " + g.violations.front());
            if (!g.case_one) ++case2;
            if (!count_bounds(mem, p, t, N).pass()) o.fail(tag + " count bounds");
            if (!harmonic_sum_A(mem, p.n_prime(t), N, t, m).ok) o.fail(tag + " harmonic bound");
        }
        if (tested < 100) o.fail(s + " only " + std::to_string(tested) + " prefixes");
        o.detail << s << ": " << tested << " prefixes (" << case2 << " case ii); ";
    }
}

// 5. Counting grid.
void criterion5(Outcome& o) {
    std::mt19937_64 rng(555);
    long reports = 0, applicable = 0;
    for (const std::string s : {"golden", "surd:(0+1*sqrt2)/1", "e"}) {
        Real x = Real::parse(s);
        auto t = table_for(x, 10000, 16);
        const long double a = value_ld(x);
        std::vector<std::pair<std::string, Gamma>> gammas{
            {"0", Gamma::zero()},
            {"D:1", parse_gamma("D:1", t)},
            {"random", gamma_from_digits(random_real_digits(t, std::min<long>(12, t.depth() - 2), rng), t)}};
        for (const auto& [label, g] : gammas) {
            const long double gv = to_ld(g.enclose(x, 90).lo);
            for (long N : {100L, 1000L, 10000L}) {
                for (long den = 8; den <= 1024; den *= 2) {
                    mpq_class eps(1, den);
                    auto r = count_inhom(x, g, eps, N, 1);
                    ++reports;
                    // Independent oracle: long double, with exact fallback near the threshold.
                    long naive = 0;
                    for (long n = 1; n <= N; ++n) {
                        long double d = dist_ld(n * a - gv);
                        long double e = 1.0L / den;
                        if (std::fabs(d - e) > 1e-12L) {
                            naive += d < e;
                        } else {
                            auto v = norm_direct(x, n, g, 200).value;
                            naive += v.hi < eps;
                        }
                    }
                    std::string tag = s + " gamma=" + label + " N=" + std::to_string(N) + " eps=1/" + std::to_string(den);
                    if (r.count != naive) o.fail(tag + " count " + std::to_string(r.count) + " vs " + std::to_string(naive));
                    for (const auto& c : r.checks) {
                        applicable += c.applies;
                        if (c.applies && !c.ok) o.fail(tag + " " + c.name);
                    }
                }
            }
        }
    }
    o.detail << reports << " grid points, " << applicable << " applicable bounds; ";
}

std::vector<long> log_grid(long from, long to) {
    std::vector<long> g{from};
    for (double e = 1; e <= std::log10(static_cast<double>(to)) + 1e-9; e += 0.5) {
        long v = std::lround(std::pow(10.0, e));
        if (v > g.back()) g.push_back(v);
    }
    return g;
}

// 6. Reciprocal sums.
void criterion6(Outcome& o) {
    for (const std::string s : {"golden", "surd:(0+1*sqrt2)/1", "e"}) {
        Real x = Real::parse(s);
        auto t = table_for(x, 1000000);
        const long q3 = t.q(3).get_si();
        long smallest_t1 = -1;
        for (long N : log_grid(2, 1000000)) {
            auto t1 = check_T1(x, N, 16, 1);
            if (t1.pass()) {
                if (smallest_t1 < 0) smallest_t1 = N;
            } else {
                smallest_t1 = -1;
                if (N >= 100) o.fail(s + " T1 N=" + std::to_string(N));
            }
            if (N < q3) continue;
            for (const auto& r : {split_R(x, N, 16, 1), trimmed_R(x, N, 1, 16, 1)})
                for (const auto& v : r.verdicts)
                    if (v.applies && !v.ok) o.fail(s + " " + r.kind + " N=" + std::to_string(N) + " " + v.name);
        }
        auto low = check_lower_all(x, 100000);
        if (!low.pass()) o.fail(s + " lower bounds: " + (low.verdicts.empty() ? "" : low.verdicts.front().note));
        for (long N : {1L, 200L, 500L})
            for (const char* g : {"0", "1/3"})
                if (!partial_summation_check(x, parse_gamma(g, t), N).pass())
                    o.fail(s + " partial summation N=" + std::to_string(N) + " gamma=" + g);
        o.detail << s << ": q_3=" << q3 << ", T1 holds on the grid from N=" << smallest_t1 << "; ";
    }
}

// 7. Linear-form sums.
void criterion7(Outcome& o) {
    std::vector<Real> one{Real::parse("golden")};
    long runs = 0;
    for (long T = 2; T <= 4096; T *= 2) {
        for (long L : {2L, T, 10 * T}) {
            auto r = linear_forms_sum(one, {T}, mpq_class(L));
            ++runs;
            if (!r.verdict || !r.verdict->ok) o.fail("golden T=" + std::to_string(T) + " L=" + std::to_string(L));
            if (T == 2 && (!r.rhs_exact || !r.rhs || r.rhs->lo != 8 || r.rhs->hi != 8))
                o.fail("T=2 right side is not exactly 8");
        }
    }
    std::vector<Real> three{Real::parse("surd:(0+1*sqrt2)/1"), Real::parse("surd:(0+1*sqrt3)/1"), Real::parse("surd:(0+1*sqrt5)/1")};
    for (size_t n = 1; n <= 3; ++n) {
        std::vector<Real> A(three.begin(), three.begin() + n);
        std::vector<long> T2(n, 1);
        T2[0] = 2;
        auto r = linear_forms_sum(A, T2, mpq_class(2));
        mpq_class want = mpq_class(mpz_class(1) << (n + 2));
        if (!r.rhs_exact || !r.rhs || r.rhs->lo != want || r.rhs->hi != want)
            o.fail("T=2 right side for n=" + std::to_string(n));
        if (!r.verdict || !r.verdict->ok) o.fail("T=2 verdict for n=" + std::to_string(n));
    }
    std::vector<Real> two(three.begin(), three.begin() + 2);
    for (long T1 = 1; T1 <= 64; T1 *= 2)
        for (long T2 = 1; T2 <= 64; T2 *= 2)
            for (long L : {2L, T1 * T2, 10 * T1 * T2}) {
                if (T1 * T2 < 2) continue;   // the bound needs T >= 2
                auto r = linear_forms_sum(two, {T1, T2}, mpq_class(std::max(L, 2L)));
                ++runs;
                if (!r.verdict || !r.verdict->ok)
                    o.fail("(sqrt2,sqrt3) T=" + std::to_string(T1) + "x" + std::to_string(T2) + " L=" + std::to_string(L));
            }
    o.detail << runs << " sums; ";
}

// 8. Adversarial shift for R_N.
void criterion8(Outcome& o) {
    const std::string spec = "liouville:qk:[0;3,1,1,8,1,1,40,1,1,200]";
    auto c = adversarial_gamma_T8(Real::parse(spec), {}, 2000000, 24, 1);
    if (!c.validity.valid) o.fail("digits invalid: " + c.validity.rule);
    if (c.reachable < 3) o.fail("only " + std::to_string(c.reachable) + " reachable checkpoints");
    if (!c.decreasing) o.fail("ratio not certified decreasing");
    o.detail << spec << ": " << c.reachable << " reachable checkpoints, ratios";
    for (const auto& p : c.checkpoints)
        if (p.reachable) o.detail << " N=" << p.N.get_str() << ":" << p.ratio.lo.get_d();
    o.detail << "; ";
}

// 9. Spike construction.
void criterion9(Outcome& o) {
    auto p = adversarial_gamma_T5(Real::parse("golden"), parse_growth("sqrt"), {0, 1, 0, 1}, 4);
    if (!p.c1) o.fail("starting condition");
    if (!p.gamma_in_range) o.fail("gamma out of range");
    if (!p.invariants()) o.fail("plan invariants");
    long built = 0;
    for (const auto& s : p.steps) {
        if (s.lookahead) continue;
        ++built;
        if (!s.spike_ok) o.fail("spike i=" + std::to_string(s.i));
    }
    if (built != 4) o.fail("built " + std::to_string(built) + " indices");
    o.detail << "indices";
    for (const auto& s : p.steps) o.detail << " " << s.k << (s.lookahead ? "(lookahead)" : "");
    o.detail << "; ";
}

// 10. Fiber scan against a naive rescan.
void criterion10(Outcome& o) {
    const long N = 100000;
    Real alpha = Real::parse("golden");
    auto betas = sample_betas(32);
    auto recs = fiber_hit_scan(alpha, parse_psi("nlog:2,2,1,16"), betas, N, 1);
    const long double a = value_ld(alpha);
    long total = 0, trivial = 0, borderline = 0;
    for (size_t i = 0; i < betas.size(); ++i) {
        const std::string& b = betas[i];
        long d = 0, c = 1, p = 0, q = 1;
        bool surd = std::sscanf(b.c_str(), "surd:(0+1*sqrt%ld)/%ld", &d, &c) == 2;
        if (!surd && std::sscanf(b.c_str(), "%ld/%ld", &p, &q) != 2) {
            o.fail("unrecognised beta " + b);
            continue;
        }
        const long double bv = surd ? std::sqrt(static_cast<long double>(d)) / c : 0;
        std::set<long> naive;
        for (long n = 1; n <= N; ++n) {
            long double nb = surd ? dist_ld(n * bv) : [&] {
                long r = (n % q) * p % q;
                return static_cast<long double>(std::min(r, q - r)) / q;
            }();
            long double l = std::log(static_cast<long double>(n) + 2);
            long double psi = 1 / (n * l * l * std::log(std::log(static_cast<long double>(n) + 16)));
            long double prod = dist_ld(n * a) * nb;
            if (std::fabs(prod - psi) < 1e-12L * psi) ++borderline;
            if (prod < psi) naive.insert(n);
        }
        std::set<long> got;
        for (const auto& h : recs[i].hits) {
            got.insert(h.n);
            trivial += h.trivial;
            if (!(h.trivial || h.product.hi < h.psi.lo)) o.fail(b + " hit n=" + std::to_string(h.n) + " not strict");
        }
        if (!recs[i].complete) o.fail(b + " scan incomplete");
        if (got != naive) o.fail(b + " hit set differs from rescan");
        total += static_cast<long>(got.size());
    }
    o.detail << betas.size() << " betas, " << total << " hits (" << trivial << " with ||n beta|| = 0), " << borderline
             << " near-threshold rescans; density evidence only; ";
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, void (*)(Outcome&)>> criteria{
        {"continued-fraction relations", criterion1},
        {"Ostrowski roundtrip, uniqueness and order", criterion2},
        {"digit-route norm equals direct norm", criterion3},
        {"gap sets", criterion4},
        {"counting grid", criterion5},
        {"reciprocal sums", criterion6},
        {"linear-form sums", criterion7},
        {"adversarial shift for R_N", criterion8},
        {"spike construction", criterion9},
        {"fiber scan soundness", criterion10},
    };
    bool all = true;
    for (size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        auto t0 = std::chrono::steady_clock::now();
        try {
            criteria[i].second(o);
        } catch (const std::exception& e) {
            o.fail(std::string("exception: ") + e.what());
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        all = all && o.ok;
        std::printf("%s criterion %zu (%s) [%.1f s]: %s\n", o.ok ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    secs, o.detail.str().c_str());
        std::fflush(stdout);
    }
    return all ? 0 : 1;
}
