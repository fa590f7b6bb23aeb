#include "dioph/verify.hpp"

#include <json.hpp>

#include <algorithm>

#include "dioph/contfrac.hpp"
#include "dioph/counting.hpp"
#include "dioph/error.hpp"
#include "dioph/gapsets.hpp"
#include "dioph/normeval.hpp"
#include "dioph/sums.hpp"

namespace dioph {

bool VerifyReport::pass() const {
    for (const auto& e : entries)
        if (e.applies && !e.ok) return false;
    return true;
}

std::string VerifyReport::to_json() const {
    nlohmann::ordered_json j;
    j["schema"] = 1;
    j["alpha"] = alpha;
    j["N"] = N;
    j["precision"] = precision;
    j["depth"] = depth;
    auto arr = nlohmann::ordered_json::array();
    long applicable = 0, failed = 0;
    for (const auto& e : entries) {
        nlohmann::ordered_json x;
        x["group"] = e.group;
        x["name"] = e.name;
        x["applies"] = e.applies;
        x["ok"] = e.ok;
        if (!e.detail.empty()) x["detail"] = e.detail;
        arr.push_back(x);
        applicable += e.applies;
        failed += e.applies && !e.ok;
    }
    j["applicable"] = applicable;
    j["failed"] = failed;
    j["verdicts"] = arr;
    j["pass"] = pass();
    return j.dump();
}

namespace {

void add_sum(VerifyReport& r, const std::string& group, const SumReport& s, bool applies = true) {
    for (const auto& v : s.verdicts)
        r.entries.push_back({group, v.name + " (N=" + std::to_string(s.N) + ")", applies && v.applies, v.ok, v.note});
}

void add_count(VerifyReport& r, const CountReport& c) {
    std::string tag = " (eps=" + c.eps.get_str() + ", gamma=" + c.gamma + ")";
    for (const auto& k : c.checks) r.entries.push_back({"counting", k.name + tag, k.applies, k.ok, k.note});
}

}  // namespace

VerifyReport verify_all(const Real& alpha, long N, long precision, int threads) {
    if (N < 2) throw Error(ErrorKind::Domain, "verify-all needs N >= 2");
    if (alpha.is_rational()) throw Error(ErrorKind::Domain, "verify-all needs an irrational alpha");
    VerifyReport r;
    r.alpha = alpha.str();
    r.N = N;
    r.precision = precision;
    auto t = table_for(alpha, N);
    r.depth = t.depth();

    auto rel = verify_relations(t);
    r.entries.push_back({"contfrac", "continued-fraction relations through row " + std::to_string(t.depth()), true,
                         rel.pass(), ""});

    // Digit route for the norm, homogeneous bracket, inhomogeneous upper bound.
    {
        const long nmax = std::min<long>(N, 300);
        std::vector<std::pair<std::string, Gamma>> gammas{{"0", Gamma::zero()}, {"1/3", parse_gamma("1/3", t)},
                                                          {"D:1", parse_gamma("D:1", t)}};
        for (const auto& [label, gm] : gammas) {
            auto b = expand_real(t, gm, t.depth());
            long ok = 0, bad = 0, degenerate = 0, bracket_applies = 0, bracket_bad = 0, upper_bad = 0;
            std::string first;
            for (long n = 1; n <= nmax; ++n) {
                auto c = expand_int(t, n);
                try {
                    auto res = norm_via_ostrowski(t, c, b, 96);
                    auto direct = norm_direct(alpha, n, gm, 96);
                    if (res.value.overlaps(direct.value)) ++ok;
                    else if (bad++ == 0) first = "n=" + std::to_string(n);
                    auto d = delta_of(c, b);
                    Affine up = inhom_upper(d, t);
                    if (res.exact && alpha.sign(up - res.exact->f) < 0) ++upper_bad;
                } catch (const Error& e) {
                    if (e.kind() == ErrorKind::DegenerateGamma) {
                        ++degenerate;
                        continue;
                    }
                    if (bad++ == 0) first = "n=" + std::to_string(n) + ": " + e.what();
                }
                if (label == "0") {
                    auto h = hom_bounds(c, t);
                    if (h.applies) {
                        ++bracket_applies;
                        Lin v = *norm_exact(alpha, n, Gamma::zero());
                        if (alpha.sign(v.f - h.lower) < 0 || alpha.sign(h.upper - v.f) < 0) ++bracket_bad;
                    }
                }
            }
            std::string tag = " (gamma=" + label + ", n<=" + std::to_string(nmax) + ")";
            r.entries.push_back({"normeval", "digit route equals direct norm, all decomposition identities hold" + tag, true,
                                 bad == 0, std::to_string(ok) + " agree, " + std::to_string(degenerate) + " degenerate" +
                                               (first.empty() ? "" : ", first failure " + first)});
            r.entries.push_back({"normeval", "||n alpha - gamma|| <= (|delta_{m+1}| + 2)|D_m|" + tag, true, upper_bad == 0, ""});
            if (label == "0")
                r.entries.push_back({"normeval", "homogeneous bracket for m >= 2" + tag, bracket_applies > 0,
                                     bracket_bad == 0, std::to_string(bracket_applies) + " applicable n"});
        }
    }

    // Gaps lemma over all admissible short prefixes with small digits.
    {
        long tested = 0, gap_bad = 0, count_bad = 0, harm_bad = 0;
        for (long m = 0; m <= 2; ++m) {
            std::vector<long> d(m + 1, 0);
            while (true) {
                DigitPrefix p{d};
                if (prefix_violation(p, t).empty() && m + 1 <= t.depth()) {
                    auto mem = enumerate_A(p, t, N);
                    ++tested;
                    if (!verify_gaps(mem, p, t).pass()) ++gap_bad;
                    if (!mem.empty() && !count_bounds(mem, p, t, N).pass()) ++count_bad;
                    if (!harmonic_sum_A(mem, p.n_prime(t), N, t, m).ok) ++harm_bad;
                }
                long j = 0;
                for (; j <= m; ++j) {
                    if (d[j] < 2) {
                        ++d[j];
                        break;
                    }
                    d[j] = 0;
                }
                if (j > m) break;
            }
        }
        std::string tag = " (" + std::to_string(tested) + " prefixes)";
        r.entries.push_back({"gapsets", "gap alphabet and run structure" + tag, tested > 0, gap_bad == 0, ""});
        r.entries.push_back({"gapsets", "N/(3 q_{m+1}) <= #A <= 3N/q_{m+1} + 1" + tag, tested > 0, count_bad == 0, ""});
        r.entries.push_back({"gapsets", "sum 1/n over A <= 5 log N / q_{m+1}" + tag, tested > 0, harm_bad == 0, ""});
    }

    // Counting.
    for (long den : {8L, 32L, 128L, 1024L}) {
        mpq_class eps(1, den);
        add_count(r, count_hom(alpha, eps, N, threads));
        add_count(r, count_inhom(alpha, parse_gamma("D:1", t), eps, N, threads));
    }

    // Reciprocal sums.
    {
        auto t1 = check_T1(alpha, N, precision, threads);
        for (const auto& v : t1.verdicts)
            r.entries.push_back({"sums", v.name + " (N=" + std::to_string(N) + ")", N >= 100, v.ok,
                                 N >= 100 ? "" : "N < 100: recorded only"});
        add_sum(r, "sums", check_lower_all(alpha, std::min<long>(N, 100000)));
        const bool split_ok = t.q(3) <= N;
        if (split_ok) {
            add_sum(r, "sums", split_R(alpha, N, precision, threads));
            add_sum(r, "sums", trimmed_R(alpha, N, 1, precision, threads));
        } else {
            r.entries.push_back({"sums", "residue/complement split", false, true, "N < q_3"});
        }
        add_sum(r, "sums", partial_summation_check(alpha, Gamma::zero(), std::min<long>(N, 500)));
    }

    // Linear forms, one dimension.
    {
        const long T = std::min<long>(N, 1024);
        for (long L : {2L, T, 10 * T}) {
            auto lf = linear_forms_sum({alpha}, {T}, mpq_class(std::max<long>(L, 2)), 0, Weight::None, Region::Box, 16);
            if (lf.verdict)
                r.entries.push_back({"sums", lf.verdict->name + " (T=" + std::to_string(T) + ", L=" + std::to_string(L) + ")",
                                     true, lf.verdict->ok, ""});
        }
    }
    return r;
}

}  // namespace dioph
