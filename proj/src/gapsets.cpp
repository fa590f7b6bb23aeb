#include "dioph/gapsets.hpp"

#include <json.hpp>

#include <sstream>

#include "dioph/error.hpp"
#include "dioph/ostrowski.hpp"

namespace dioph {

long DigitPrefix::n_prime(const ConvergentTable& t) const {
    long s = 0;
    for (long k = 0; k <= m(); ++k) s += d[k] * t.q(k).get_si();
    return s;
}

DigitPrefix parse_prefix(const std::string& text) {
    DigitPrefix p;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            size_t used = 0;
            long v = std::stol(tok, &used);
            if (used != tok.size()) throw std::invalid_argument(tok);
            p.d.push_back(v);
        } catch (const std::exception&) {
            throw Error(ErrorKind::Parse, "bad prefix digit '" + tok + "'");
        }
    }
    if (p.d.empty()) throw Error(ErrorKind::Parse, "empty digit prefix");
    return p;
}

std::string prefix_violation(const DigitPrefix& p, const ConvergentTable& t) {
    if (p.m() + 2 > t.quotient_depth()) return "prefix longer than the table";
    for (long k = 0; k <= p.m(); ++k) {
        long a = t.a(k + 1).get_si();
        if (p.d[k] < 0) return "negative digit d_" + std::to_string(k + 1);
        if (k == 0 && p.d[0] >= a) return "d_1 >= a_1";
        if (k >= 1 && p.d[k] > a) return "d_" + std::to_string(k + 1) + " > a_" + std::to_string(k + 1);
        if (k >= 1 && p.d[k] == a && p.d[k - 1] != 0)
            return "d_" + std::to_string(k) + " != 0 while d_" + std::to_string(k + 1) + " = a_" + std::to_string(k + 1);
    }
    return "";
}

namespace {

void require_valid(const DigitPrefix& p, const ConvergentTable& t, long N) {
    std::string v = prefix_violation(p, t);
    if (!v.empty()) throw Error(ErrorKind::Validation, "invalid digit prefix: " + v);
    if (N < 1) throw Error(ErrorKind::Domain, "N must be positive");
    if (t.q(t.depth()) <= N) throw Error(ErrorKind::Depth, "table too shallow for N=" + std::to_string(N), t.depth());
}

}  // namespace

std::vector<Member> enumerate_A(const DigitPrefix& p, const ConvergentTable& t, long N) {
    require_valid(p, t, N);
    const long m = p.m();
    const long top = K_of(t, N) + 1;   // highest digit index that can be nonzero for n <= N, plus slack
    std::vector<long> q(top + 2), a(top + 3);
    for (long k = 0; k <= top + 1; ++k) q[k] = t.q(k).get_si();
    for (long k = 1; k <= top + 2; ++k) a[k] = t.a(k).get_si();
    std::vector<long> c(top + 2, 0);    // c[k] = c_{k+1} for k > m
    const long np = p.n_prime(t);
    std::vector<Member> out;
    long n = np;
    if (n > 0 && n <= N) out.push_back({n, 0});
    while (true) {
        // lowest index j > m whose digit can grow by one with lower upper digits cleared
        long j = m + 1;
        for (; j <= top; ++j) {
            long nv = c[j] + 1;
            if (nv > a[j + 1]) continue;
            if (c[j + 1] == a[j + 2] && c[j + 1] != 0) continue;
            if (nv == a[j + 1] && j - 1 == m && p.d[m] != 0) continue;
            break;
        }
        if (j > top) break;
        for (long k = m + 1; k < j; ++k) {
            n -= c[k] * q[k];
            c[k] = 0;
        }
        ++c[j];
        n += q[j];
        if (n > N) break;
        out.push_back({n, c[m + 1]});
    }
    return out;
}

std::vector<Member> enumerate_A_scan(const DigitPrefix& p, const ConvergentTable& t, long N) {
    require_valid(p, t, N);
    const long m = p.m();
    std::vector<Member> out;
    for (long n = 1; n <= N; ++n) {
        auto e = expand_int(t, n);
        bool ok = true;
        for (long k = 0; k <= m && ok; ++k) ok = e.c(k) == p.d[k];
        if (ok) out.push_back({n, e.c(m + 1).get_si()});
    }
    return out;
}

GapReport verify_gaps(const std::vector<Member>& members, const DigitPrefix& p, const ConvergentTable& t) {
    GapReport g;
    const long m = p.m();
    const long qm = t.q(m).get_si(), qm1 = t.q(m + 1).get_si(), am2 = t.a(m + 2).get_si();
    g.count = static_cast<long>(members.size());
    g.case_one = p.d[m] > 0;
    auto bad = [&](long i, const std::string& what) {
        if (g.first_bad < 0) g.first_bad = i;
        g.violations.push_back("gap " + std::to_string(i) + ": " + what);
    };
    // when n' = 0 the lemma's runs count from the empty expansion 0
    std::vector<long> seq;
    const long np = p.n_prime(t);
    if (np == 0) seq.push_back(0);
    for (const auto& x : members) seq.push_back(x.n);
    const long off = np == 0 ? 1 : 0;
    long run = 0;   // consecutive q_{m+1} gaps ending at the current element
    for (size_t s = 1; s < seq.size(); ++s) {
        long gap = seq[s] - seq[s - 1];
        long i = static_cast<long>(s) - 1 - off;   // gap between members i and i+1 (0-based)
        if (i >= 0) ++g.gaps[gap];
        if (g.case_one) {
            if (gap != qm1 && gap != qm1 + qm) bad(i, "length " + std::to_string(gap) + " outside {q_{m+1}, q_{m+1}+q_m}");
        } else if (gap == qm1) {
            ++run;
            continue;
        } else if (gap == qm) {
            if (i >= 0 && members[i].c_next != am2) bad(i, "q_m gap after an element with c_{m+2} != a_{m+2}");
            if (run < am2) bad(i, "q_m gap preceded by only " + std::to_string(run) + " gaps of length q_{m+1}");
        } else {
            bad(i, "length " + std::to_string(gap) + " outside {q_{m+1}, q_m}");
        }
        run = 0;
    }
    return g;
}

BoundReport count_bounds(const std::vector<Member>& members, const DigitPrefix& p, const ConvergentTable& t, long N) {
    BoundReport b;
    const mpz_class qm1 = t.q(p.m() + 1);
    b.count = static_cast<long>(members.size());
    b.lower = mpq_class(N, 1) / mpq_class(3 * qm1);
    b.upper = mpq_class(3 * N, 1) / mpq_class(qm1) + 1;
    b.applies = b.count >= 1;
    if (!b.applies) {
        b.verdict = "hypothesis not met: A_N is empty";
        return b;
    }
    b.lower_ok = b.lower <= b.count;
    b.upper_ok = b.count <= b.upper;
    b.verdict = b.lower_ok && b.upper_ok ? "bounds hold" : "bounds violated";
    return b;
}

HarmonicReport harmonic_sum_A(const std::vector<Member>& members, long n_prime, long N, const ConvergentTable& t,
                              long m, long prec) {
    if (N < 3) throw Error(ErrorKind::Domain, "harmonic bound needs N >= 3");
    HarmonicReport h;
    h.sum = Interval(0L, prec);
    for (const auto& x : members)
        if (x.n != n_prime && x.n <= N) h.sum = h.sum + Interval(mpq_class(1, x.n), prec);
    h.bound = Interval(5L, prec) * Interval::log(Interval(N, prec)) / Interval(t.q(m + 1), prec);
    h.ok = h.sum.certainly_le(h.bound);
    return h;
}

std::string gaps_json(const DigitPrefix& p, const ConvergentTable& t, long N, const std::vector<Member>& members,
                      const GapReport& g, const BoundReport& b, const HarmonicReport& h) {
    nlohmann::ordered_json j;
    j["schema"] = 1;
    j["alpha"] = t.alpha().str();
    j["prefix"] = p.d;
    j["m"] = p.m();
    j["N"] = N;
    j["n_prime"] = p.n_prime(t);
    auto ms = nlohmann::ordered_json::array();
    for (const auto& x : members) ms.push_back(x.n);
    j["members"] = ms;
    j["case"] = g.case_name();
    auto gs = nlohmann::ordered_json::array();
    for (const auto& [len, cnt] : g.gaps) gs.push_back({len, cnt});
    j["gaps"] = gs;
    j["violations"] = g.violations;
    j["count_lower"] = dec_down(b.lower);
    j["count_upper"] = dec_up(b.upper);
    j["count_verdict"] = b.verdict;
    j["harmonic_sum_hi"] = dec_up(h.sum.hi());
    j["harmonic_bound_lo"] = dec_down(h.bound.lo());
    j["harmonic_ok"] = h.ok;
    j["pass"] = g.pass() && b.pass() && h.ok;
    return j.dump();
}

}  // namespace dioph
