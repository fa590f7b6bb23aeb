#include "dioph/sums.hpp"

#include <json.hpp>

#include <algorithm>

#include "dioph/error.hpp"

namespace dioph {

namespace {

mpq_class pow2(long e) { return mpq_class(mpz_class(1) << static_cast<unsigned long>(e)); }

Enclosure unscale(const mpz_class& lo, const mpz_class& hi, long Q) {
    mpq_class s = pow2(Q);
    return {mpq_class(lo) / s, mpq_class(hi) / s};
}

Enclosure enc(const Interval& x) { return x.enclosure(); }

Interval ival(const Enclosure& e, long prec = 128) { return Interval(e, prec); }

Interval logi(long x, long prec = 128) { return Interval::log(Interval(x, prec)); }
Interval logi(const mpz_class& x, long prec = 128) { return Interval::log(Interval(x, prec)); }

nlohmann::ordered_json enc_json(const Enclosure& e) {
    return nlohmann::ordered_json::array({dec_down(e.lo, 20), dec_up(e.hi, 20)});
}

nlohmann::ordered_json verdicts_json(const std::vector<Verdict>& vs) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& v : vs) {
        nlohmann::ordered_json j;
        j["name"] = v.name;
        j["applies"] = v.applies;
        j["ok"] = v.ok;
        j["lhs"] = enc_json(v.lhs);
        j["relation"] = v.relation;
        j["bound"] = enc_json(v.bound);
        if (!v.note.empty()) j["note"] = v.note;
        arr.push_back(j);
    }
    return arr;
}

using Slots = std::vector<mpz_class>;
using TermFn = std::function<void(long n, const mpz_class& rlo, const mpz_class& rhi, Slots& acc)>;

// Cumulative slot sums at each checkpoint, accumulated over n in [1, max checkpoint].
std::vector<Slots> accumulate(const NormKernel& k, long Q, const std::vector<long>& cps, size_t nslots, int threads,
                              const TermFn& f) {
    const long N = cps.back();
    int nt = std::max(1, std::min<int>(threads, static_cast<int>(N)));
    // per thread, per checkpoint segment
    std::vector<std::vector<Slots>> part(nt, std::vector<Slots>(cps.size(), Slots(nslots)));
    parallel_chunks(1, N, nt, [&](long b, long e, int i) {
        size_t seg = std::lower_bound(cps.begin(), cps.end(), b) - cps.begin();
        mpz_class lo, hi;
        for (long n = b; n <= e; ++n) {
            while (cps[seg] < n) ++seg;
            k.recip(n, Q, lo, hi);
            f(n, lo, hi, part[i][seg]);
        }
    });
    std::vector<Slots> out(cps.size(), Slots(nslots));
    Slots run(nslots);
    for (size_t s = 0; s < cps.size(); ++s) {
        for (int i = 0; i < nt; ++i)
            for (size_t j = 0; j < nslots; ++j) run[j] += part[i][s][j];
        out[s] = run;
    }
    return out;
}

std::vector<long> check_points(std::vector<long> cps) {
    if (cps.empty()) throw Error(ErrorKind::Domain, "no N given");
    std::sort(cps.begin(), cps.end());
    cps.erase(std::unique(cps.begin(), cps.end()), cps.end());
    if (cps.front() < 1) throw Error(ErrorKind::Domain, "N must be positive");
    return cps;
}

long sum_Q(long precision, long N) { return precision + bitlen(mpz_class(N)) + 8; }

// Runs accumulate with growing working precision until the first `pairs` (lo, hi) slot pairs are narrow enough.
std::vector<Slots> accumulate_to(const Real& alpha, const Gamma& gamma, long precision, const std::vector<long>& cps,
                                 size_t nslots, size_t pairs, int threads, const TermFn& f, long& P_used,
                                 long& Q_used) {
    const long N = cps.back();
    const long Q = sum_Q(precision, N);
    mpz_class tol = mpz_class(1) << static_cast<unsigned long>(Q - precision);
    long P = default_kernel_bits(N) + precision;
    for (int attempt = 0; attempt < 4; ++attempt, P *= 2) {
        NormKernel k(alpha, gamma, P);
        auto out = accumulate(k, Q, cps, nslots, threads, f);
        bool ok = true;
        for (const auto& s : out)
            for (size_t j = 0; j < 2 * pairs; j += 2) ok = ok && s[j + 1] - s[j] <= tol;
        if (ok) {
            P_used = P;
            Q_used = Q;
            return out;
        }
    }
    throw Error(ErrorKind::Precision, "sum enclosure wider than 2^-" + std::to_string(precision));
}

struct TableInfo {
    long K;
    mpz_class qK, qKm1, qK1, q2, q3, aK1, A_K1;
};

TableInfo table_info(const Real& alpha, long N) {
    auto t = table_for(alpha, N);
    TableInfo ti;
    ti.K = K_of(t, N);
    ti.qK = t.q(ti.K);
    ti.qKm1 = t.q(ti.K - 1);
    ti.qK1 = t.q(ti.K + 1);
    ti.q2 = t.q(2);
    ti.q3 = t.q(3);
    ti.aK1 = t.a(ti.K + 1);
    ti.A_K1 = 0;
    for (long i = 1; i <= ti.K + 1; ++i) ti.A_K1 += t.a(i);
    return ti;
}

SumReport base(const std::string& kind, const Real& alpha, const Gamma& gamma, long N) {
    SumReport r;
    r.kind = kind;
    r.alpha = alpha.str();
    r.gamma = gamma.label();
    r.N = N;
    return r;
}

}  // namespace

PsiSpec parse_psi(const std::string& text) {
    PsiSpec p;
    p.text = text;
    auto rat = [&](const std::string& s) {
        mpq_class q;
        auto dot = s.find('.');
        std::string t = s;
        if (dot != std::string::npos) {
            std::string frac = s.substr(dot + 1);
            t = s.substr(0, dot) + frac + "/1" + std::string(frac.size(), '0');
        }
        if (t.empty() || q.set_str(t, 10) != 0) throw Error(ErrorKind::Parse, "bad number '" + s + "' in psi " + text);
        q.canonicalize();
        return q;
    };
    auto integer = [&](const std::string& s) {
        try {
            size_t used = 0;
            long v = std::stol(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            throw Error(ErrorKind::Parse, "bad integer '" + s + "' in psi " + text);
        }
    };
    if (text == "zero" || text == "0") {
        p.kind = PsiSpec::Kind::Zero;
    } else if (text.size() > 2 && text.compare(text.size() - 2, 2, "/n") == 0) {
        p.kind = PsiSpec::Kind::COverN;
        p.C = rat(text.substr(0, text.size() - 2));
    } else if (text.rfind("n^-", 0) == 0) {
        p.kind = PsiSpec::Kind::Power;
        p.tau = rat(text.substr(3));
    } else if (text.rfind("nlog:", 0) == 0) {
        p.kind = PsiSpec::Kind::NLog;
        std::vector<long> v;
        std::string body = text.substr(5);
        size_t start = 0;
        while (true) {
            auto pos = body.find(',', start);
            v.push_back(integer(body.substr(start, pos == std::string::npos ? std::string::npos : pos - start)));
            if (pos == std::string::npos) break;
            start = pos + 1;
        }
        if (v.size() != 2 && v.size() != 4) throw Error(ErrorKind::Parse, "nlog needs A,S or A,S,B,T: " + text);
        p.A = v[0];
        p.S = v[1];
        if (v.size() == 4) {
            p.B = v[2];
            p.T = v[3];
        }
        if (p.A < 0 || p.B < 0) throw Error(ErrorKind::Domain, "psi exponents must be nonnegative: " + text);
        if (p.S < 2 || (p.B > 0 && p.T < 3)) throw Error(ErrorKind::Domain, "psi shifts must keep the logs positive: " + text);
    } else {
        throw Error(ErrorKind::Parse, "unknown psi '" + text + "'");
    }
    if (p.kind == PsiSpec::Kind::COverN && p.C <= 0) throw Error(ErrorKind::Domain, "psi constant must be positive");
    if (p.kind == PsiSpec::Kind::Power && p.tau <= 0) throw Error(ErrorKind::Domain, "psi exponent must be positive");
    return p;
}

Interval psi_value(const PsiSpec& p, long n, long prec) {
    switch (p.kind) {
        case PsiSpec::Kind::Zero:
            return Interval(0L, prec);
        case PsiSpec::Kind::COverN:
            return Interval(mpq_class(p.C / n), prec);
        case PsiSpec::Kind::Power:
            return Interval::exp(-Interval(p.tau, prec) * logi(n, prec));
        case PsiSpec::Kind::NLog: {
            Interval d(n, prec);
            Interval l = logi(n + p.S, prec);
            for (long i = 0; i < p.A; ++i) d = d * l;
            if (p.B > 0) {
                Interval ll = Interval::log(logi(n + p.T, prec));
                for (long i = 0; i < p.B; ++i) d = d * ll;
            }
            return Interval(1L, prec) / d;
        }
    }
    throw Error(ErrorKind::Internal, "bad psi kind");
}

bool psi_decreasing(const PsiSpec& p) { return p.kind != PsiSpec::Kind::Zero; }

bool psi_n_decreasing(const PsiSpec& p) {
    switch (p.kind) {
        case PsiSpec::Kind::Zero:
        case PsiSpec::Kind::COverN:
            return true;
        case PsiSpec::Kind::Power:
            return p.tau >= 1;
        case PsiSpec::Kind::NLog:
            return true;
    }
    return false;
}

Verdict make_verdict(const std::string& name, const Enclosure& lhs, const std::string& rel, const Enclosure& bound) {
    Verdict v;
    v.name = name;
    v.lhs = lhs;
    v.bound = bound;
    v.relation = rel;
    v.ok = rel == ">=" ? lhs.lo >= bound.hi : lhs.hi <= bound.lo;
    return v;
}

bool SumReport::pass() const {
    for (const auto& v : verdicts)
        if (v.applies && !v.ok) return false;
    return true;
}

std::string SumReport::to_json() const {
    nlohmann::ordered_json j;
    j["schema"] = 1;
    j["kind"] = kind;
    j["alpha"] = alpha;
    j["gamma"] = gamma;
    j["N"] = N;
    if (K > 0) {
        j["K"] = K;
        j["A_K+1"] = A_K1.get_str();
    }
    if (S) j["S"] = enc_json(*S);
    if (R) j["R"] = enc_json(*R);
    if (residue) {
        j["residue"] = enc_json(*residue);
        j["residue_count"] = residue_count;
    }
    if (complement) {
        j["complement"] = enc_json(*complement);
        j["complement_count"] = complement_count;
    }
    if (trimmed) {
        j["c"] = c.get_str();
        j["trimmed"] = enc_json(*trimmed);
    }
    j["precision"] = precision;
    j["kernel_bits"] = kernel_bits;
    j["verdicts"] = verdicts_json(verdicts);
    j["pass"] = pass();
    return j.dump();
}

std::vector<SumPoint> sums_SR(const Real& alpha, const Gamma& gamma, const std::vector<long>& checkpoints,
                              long precision, int threads) {
    auto cps = check_points(checkpoints);
    long P = 0, Q = 0;
    auto acc = accumulate_to(alpha, gamma, precision, cps, 4, 2, threads,
                             [](long n, const mpz_class& lo, const mpz_class& hi, Slots& s) {
                                 s[0] += lo;
                                 s[1] += hi;
                                 mpz_class t;
                                 mpz_fdiv_q_ui(t.get_mpz_t(), lo.get_mpz_t(), n);
                                 s[2] += t;
                                 mpz_cdiv_q_ui(t.get_mpz_t(), hi.get_mpz_t(), n);
                                 s[3] += t;
                             },
                             P, Q);
    std::vector<SumPoint> out;
    for (size_t i = 0; i < cps.size(); ++i)
        out.push_back({cps[i], unscale(acc[i][2], acc[i][3], Q), unscale(acc[i][0], acc[i][1], Q)});
    return out;
}

Enclosure sum_S(const Real& alpha, const Gamma& gamma, long N, long precision, int threads) {
    return sums_SR(alpha, gamma, {N}, precision, threads).front().S;
}

Enclosure sum_R(const Real& alpha, const Gamma& gamma, long N, long precision, int threads) {
    return sums_SR(alpha, gamma, {N}, precision, threads).front().R;
}

SumReport split_R(const Real& alpha, long N, long precision, int threads) {
    TableInfo ti = table_info(alpha, N);
    if (N < ti.q3) throw Error(ErrorKind::Hypothesis, "split needs N >= q_3 = " + ti.q3.get_str());
    SumReport r = base("split", alpha, Gamma::zero(), N);
    r.K = ti.K;
    r.A_K1 = ti.A_K1;
    const long qK = ti.qK.get_si(), r2 = ti.qKm1.get_si() % qK;
    long P = 0, Q = 0;
    auto acc = accumulate_to(alpha, Gamma::zero(), precision, {N}, 6, 2, threads,
                             [&](long n, const mpz_class& lo, const mpz_class& hi, Slots& s) {
                                 long res = n % qK;
                                 size_t base = (res == 0 || res == r2) ? 0 : 2;
                                 s[base] += lo;
                                 s[base + 1] += hi;
                                 s[base == 0 ? 4 : 5] += 1;
                             },
                             P, Q);
    r.precision = precision;
    r.kernel_bits = P;
    r.residue = unscale(acc[0][0], acc[0][1], Q);
    r.complement = unscale(acc[0][2], acc[0][3], Q);
    r.residue_count = acc[0][4].get_si();
    r.complement_count = acc[0][5].get_si();
    r.R = Enclosure{r.residue->lo + r.complement->lo, r.residue->hi + r.complement->hi};

    const long pr = 128;
    Interval n(N, pr), lqK = logi(ti.qK, pr), lq2 = logi(ti.q2, pr);
    Interval third(mpq_class(1, 3), pr), half(mpq_class(1, 2), pr);
    Interval lower1 = Interval(mpq_class(1, 24), pr) * n * lqK - (third * lq2 + half) * n;
    Interval upper1 = Interval(64L, pr) * n * lqK + Interval(2L, pr) * Interval(ti.q3, pr) * n;
    Interval lg = Interval::log(Interval(1L, pr) + n / Interval(ti.qK, pr));
    Interval lower4 = Interval(ti.qK1, pr) * lg;
    Interval upper4 = Interval(4L, pr) * Interval(ti.qK1, pr) * (Interval(1L, pr) + lg);
    r.verdicts.push_back(make_verdict("complement sum >= N log q_K / 24 - (log q_2 / 3 + 1/2) N", *r.complement, ">=",
                                      enc(lower1)));
    r.verdicts.push_back(make_verdict("complement sum <= 64 N log q_K + 2 q_3 N", *r.complement, "<=", enc(upper1)));
    r.verdicts.push_back(make_verdict("residue sum >= q_{K+1} log(1 + N/q_K)", *r.residue, ">=", enc(lower4)));
    r.verdicts.push_back(make_verdict("residue sum <= 4 q_{K+1} (1 + log(1 + N/q_K))", *r.residue, "<=", enc(upper4)));
    Verdict part;
    part.name = "residue and complement index sets partition [1, N]";
    part.ok = r.residue_count + r.complement_count == N;
    part.lhs = {mpq_class(r.residue_count + r.complement_count), mpq_class(r.residue_count + r.complement_count)};
    part.bound = {mpq_class(N), mpq_class(N)};
    part.relation = "=";
    r.verdicts.push_back(part);
    return r;
}

SumReport trimmed_R(const Real& alpha, long N, const mpq_class& c, long precision, int threads) {
    if (c <= 0) throw Error(ErrorKind::Domain, "trim constant c must be positive");
    TableInfo ti = table_info(alpha, N);
    if (N < ti.q3) throw Error(ErrorKind::Hypothesis, "trimmed sum needs N >= q_3 = " + ti.q3.get_str());
    SumReport r = base("trim", alpha, Gamma::zero(), N);
    r.K = ti.K;
    r.A_K1 = ti.A_K1;
    r.c = c;
    const long qK = ti.qK.get_si(), r2 = ti.qKm1.get_si() % qK;
    const long Q = sum_Q(precision, N);
    mpq_class cap = c * N * pow2(Q);
    mpz_class cap_lo = floor_q(cap), cap_hi = ceil_q(cap);
    long P = 0, Qu = 0;
    auto acc = accumulate_to(alpha, Gamma::zero(), precision, {N}, 5, 2, threads,
                             [&](long n, const mpz_class& lo, const mpz_class& hi, Slots& s) {
                                 long res = n % qK;
                                 if (res != 0 && res != r2) return;
                                 s[0] += lo < cap_lo ? lo : cap_lo;
                                 s[1] += hi < cap_hi ? hi : cap_hi;
                                 s[2] += lo;
                                 s[3] += hi;
                                 s[4] += 1;
                             },
                             P, Qu);
    r.precision = precision;
    r.kernel_bits = P;
    r.trimmed = unscale(acc[0][0], acc[0][1], Q);
    r.residue = unscale(acc[0][2], acc[0][3], Q);
    r.residue_count = acc[0][4].get_si();
    const long pr = 128;
    Interval bound = Interval(12L, pr) * Interval(N, pr) * Interval::sqrt(Interval(mpq_class(c * ti.aK1), pr));
    r.verdicts.push_back(make_verdict("trimmed residue sum <= 12 N (c a_{K+1})^(1/2)", *r.trimmed, "<=", enc(bound)));
    return r;
}

SumReport check_T1(const Real& alpha, long N, long precision, int threads) {
    if (N < 2) throw Error(ErrorKind::Domain, "N must be at least 2");
    TableInfo ti = table_info(alpha, N);
    SumReport r = base("t1", alpha, Gamma::zero(), N);
    r.K = ti.K;
    r.A_K1 = ti.A_K1;
    auto pt = sums_SR(alpha, Gamma::zero(), {N}, precision, threads).front();
    r.S = pt.S;
    r.R = pt.R;
    r.precision = precision;
    r.kernel_bits = default_kernel_bits(N) + precision;
    const long pr = 128;
    Interval l = logi(N, pr);
    Interval l2 = l * l;
    r.verdicts.push_back(make_verdict("S_N >= (log N)^2 / 2", pt.S, ">=", enc(l2 * Interval(mpq_class(1, 2), pr))));
    r.verdicts.push_back(make_verdict("S_N >= A_{K+1}", pt.S, ">=", {mpq_class(ti.A_K1), mpq_class(ti.A_K1)}));
    r.verdicts.push_back(make_verdict("S_N <= 33 (log N)^2 + 10 A_{K+1}", pt.S, "<=",
                                      enc(Interval(33L, pr) * l2 + Interval(mpz_class(10 * ti.A_K1), pr))));
    return r;
}

SumReport check_lower_all(const Real& alpha, long N) {
    if (N < 2) throw Error(ErrorKind::Domain, "N must be at least 2");
    SumReport r = base("lower-all", alpha, Gamma::zero(), N);
    const long precision = 16, Q = sum_Q(precision, N);
    NormKernel k(alpha, Gamma::zero(), default_kernel_bits(N) + precision);
    const long pr = 64;
    Interval scale = Interval(pow2(Q), pr);
    const Interval logeh = Interval(1L, pr) - Interval::log2const(pr);
    mpz_class Rlo = 0, Slo = 0, lo, hi, t;
    long firstR = -1, firstS = -1;
    Enclosure lastR, lastS, boundR, boundS;
    for (long n = 1; n <= N; ++n) {
        k.recip(n, Q, lo, hi);
        Rlo += lo;
        mpz_fdiv_q_ui(t.get_mpz_t(), lo.get_mpz_t(), n);
        Slo += t;
        if (n < 2) continue;
        Interval ln = logi(n, pr);
        Interval nn(n, pr);
        Interval bR = nn * ln + nn * logeh + Interval(2L, pr);
        Interval bS = Interval(mpq_class(1, 2), pr) * ln * ln;
        Interval vR = Interval(Rlo, pr) / scale, vS = Interval(Slo, pr) / scale;
        if (firstR < 0 && !(vR.lo() >= bR.hi())) firstR = n;
        if (firstS < 0 && !(vS.lo() >= bS.hi())) firstS = n;
        if (n == N) {
            lastR = {vR.lo(), vR.lo()};
            lastS = {vS.lo(), vS.lo()};
            boundR = enc(bR);
            boundS = enc(bS);
        }
    }
    Verdict vr = make_verdict("R_n >= n log n + n log(e/2) + 2 for all 2 <= n <= N", lastR, ">=", boundR);
    vr.ok = firstR < 0;
    if (firstR > 0) vr.note = "first failure at n=" + std::to_string(firstR);
    Verdict vs = make_verdict("S_n >= (log n)^2 / 2 for all 2 <= n <= N", lastS, ">=", boundS);
    vs.ok = firstS < 0;
    if (firstS > 0) vs.note = "first failure at n=" + std::to_string(firstS);
    r.verdicts = {vr, vs};
    r.precision = precision;
    r.kernel_bits = k.P();
    return r;
}

SumReport partial_summation_check(const Real& alpha, const Gamma& gamma, long N, long prec) {
    if (N < 1) throw Error(ErrorKind::Domain, "N must be positive");
    SumReport r = base("partial-summation", alpha, gamma, N);
    NormKernel k(alpha, gamma, default_kernel_bits(N) + prec);
    Interval R(0L, prec), S(0L, prec), PS(0L, prec);
    for (long n = 1; n <= N; ++n) {
        Interval t = Interval(1L, prec) / Interval(k.norm(n), prec);
        R = R + t;
        S = S + t / Interval(n, prec);
        PS = PS + R / Interval(mpz_class(mpz_class(n) * (n + 1)), prec);
    }
    PS = PS + R / Interval(N + 1, prec);
    r.S = enc(S);
    r.R = enc(R);
    Verdict v;
    v.name = "S_N = sum_{n<=N} R_n/(n(n+1)) + R_N/(N+1)";
    v.lhs = enc(S);
    v.bound = enc(PS);
    v.relation = "=";
    v.ok = S.overlaps(PS);
    r.verdicts.push_back(v);
    r.precision = prec;
    r.kernel_bits = k.P();
    return r;
}

namespace {

// ||sum q_j alpha_j - gamma|| at scale 2^P for the given coefficient vector.
struct FormEval {
    std::vector<Real> A;
    mpq_class gamma;
    long P = 0;
    std::vector<mpz_class> lo, hi;
    mpz_class glo, ghi;

    void set_precision(long p) {
        P = p;
        lo.clear();
        hi.clear();
        for (const auto& a : A) {
            Enclosure e = a.enclose(P + 2);
            lo.push_back(floor_scaled(e.lo, P));
            hi.push_back(ceil_scaled(e.hi, P));
        }
        glo = floor_scaled(gamma, P);
        ghi = ceil_scaled(gamma, P);
    }

    bool dist(const std::vector<long>& q, mpz_class& dlo, mpz_class& dhi) const {
        mpz_class xlo = -ghi, xhi = -glo;
        for (size_t j = 0; j < q.size(); ++j) {
            if (q[j] >= 0) {
                xlo += lo[j] * q[j];
                xhi += hi[j] * q[j];
            } else {
                xlo += hi[j] * q[j];
                xhi += lo[j] * q[j];
            }
        }
        return scaled_dist(xlo, xhi, P, dlo, dhi);
    }
};

}  // namespace

LinearFormSumReport linear_forms_sum(const std::vector<Real>& A, const std::vector<long>& T,
                                     const std::optional<mpq_class>& L, const mpq_class& gamma, Weight w, Region rg,
                                     long precision) {
    if (A.empty() || A.size() != T.size()) throw Error(ErrorKind::Domain, "need one box size per coefficient");
    for (long t : T)
        if (t < 1) throw Error(ErrorKind::Domain, "box sizes must be positive");
    if (L && *L < 2) throw Error(ErrorKind::Domain, "cap L must be at least 2");
    LinearFormSumReport r;
    r.dim = static_cast<long>(A.size());
    r.T = T;
    r.T_prod = 1;
    for (long t : T) r.T_prod *= t;
    r.L = L;
    r.gamma = gamma;
    r.weight = w;
    r.region = rg;

    mpz_class terms = 1;
    for (long t : T) terms *= rg == Region::Box ? 2 * t + 1 : t;
    const long Q = precision + bitlen(terms) + 8;
    const long P0 = 96 + precision + 2 * bitlen(mpz_class(*std::max_element(T.begin(), T.end()))) + bitlen(terms);
    FormEval fe{A, gamma, 0, {}, {}, 0, 0};
    fe.set_precision(P0);
    std::vector<FormEval> fine;   // lazily refined evaluators
    mpz_class slo = 0, shi = 0;
    mpq_class capped = 0;

    std::vector<long> q(A.size());
    for (size_t j = 0; j < q.size(); ++j) q[j] = rg == Region::Box ? -T[j] : 1;
    mpz_class dlo, dhi, num;
    while (true) {
        bool zero = std::all_of(q.begin(), q.end(), [](long v) { return v == 0; });
        if (!zero) {
            mpz_class weight = 1;
            if (w == Weight::Product)
                for (long v : q)
                    if (v != 0) weight *= std::labs(v);
            const FormEval* ev = &fe;
            size_t level = 0;
            while (true) {
                bool decided = ev->dist(q, dlo, dhi);
                if (decided) {
                    mpz_class wdt = dhi - dlo;
                    mpz_mul_2exp(wdt.get_mpz_t(), wdt.get_mpz_t(), 40);
                    bool cap_known = true, is_capped = false;
                    if (L) {
                        mpq_class one = pow2(ev->P);
                        if (mpq_class(dhi) * *L <= one) is_capped = true;
                        else if (mpq_class(dlo) * *L > one) is_capped = false;
                        else cap_known = false;
                    }
                    if (cap_known && (is_capped || wdt <= dlo)) {
                        if (is_capped) {
                            capped += *L / mpq_class(weight);
                        } else {
                            mpz_ui_pow_ui(num.get_mpz_t(), 2, ev->P + Q);
                            mpz_class den = dhi * weight, t;
                            mpz_fdiv_q(t.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
                            slo += t;
                            den = dlo * weight;
                            mpz_cdiv_q(t.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
                            shi += t;
                        }
                        break;
                    }
                }
                if (level == fine.size()) {
                    long np = (level == 0 ? fe.P : fine.back().P) * 2;
                    if (np > precision_cap())
                        throw Error(ErrorKind::Precision, "linear form term undecided at precision cap");
                    FormEval f{A, gamma, 0, {}, {}, 0, 0};
                    f.set_precision(np);
                    fine.push_back(std::move(f));
                }
                ev = &fine[level++];
            }
        }
        size_t j = 0;
        for (; j < q.size(); ++j) {
            if (q[j] < T[j]) {
                ++q[j];
                break;
            }
            q[j] = rg == Region::Box ? -T[j] : 1;
        }
        if (j == q.size()) break;
    }
    Enclosure part = unscale(slo, shi, Q);
    r.lhs = {capped + part.lo, capped + part.hi};

    const long pr = 160;
    const mpq_class Tq(r.T_prod);
    if (L && w == Weight::None && rg == Region::Box && gamma == 0 && r.T_prod >= 2) {
        mpq_class mu = *L < Tq ? *L : Tq;
        mpq_class R0 = ((mpq_class(mpz_class(1) << static_cast<unsigned long>(r.dim + 1)) - 2) * Tq) + 4;
        if (mu == 2) {
            r.rhs = Enclosure{R0, R0};
            r.rhs_exact = true;
        } else {
            Interval v = Interval(R0, pr) + Interval(2 * Tq, pr) * Interval::log(Interval(mpq_class(mu / 2), pr));
            r.rhs = v.enclosure();
        }
        r.verdict = make_verdict("sum of min{L, 1/||q.A||} >= 2T min{log L, log T} + (2^{n+1} - 2 - log 4) T + 4",
                                 r.lhs, ">=", *r.rhs);
    }
    Interval g(1L, pr);
    if (rg == Region::Box && w == Weight::Product) {
        r.growth_name = "(log T)(log T_1)...(log T_n)";
        g = logi(r.T_prod, pr);
        for (long t : T) g = g * logi(t, pr);
    } else if (rg == Region::Orthant && w == Weight::None) {
        r.growth_name = "T_1...T_n log T_1";
        g = Interval(r.T_prod, pr) * logi(T[0], pr);
    } else if (rg == Region::Orthant && w == Weight::Product) {
        r.growth_name = "log T_1 (log T_1)...(log T_n)";
        g = logi(T[0], pr);
        for (long t : T) g = g * logi(t, pr);
    } else {
        r.growth_name = "T log T";
        g = Interval(r.T_prod, pr) * logi(r.T_prod, pr);
    }
    r.growth = g.enclosure();
    if (g.positive()) r.ratio = (Interval(r.lhs, pr) / g).enclosure();
    return r;
}

std::string LinearFormSumReport::to_json(const std::vector<std::string>& alphas) const {
    nlohmann::ordered_json j;
    j["schema"] = 1;
    j["alphas"] = alphas;
    j["T"] = T;
    j["T_prod"] = T_prod.get_str();
    if (L) j["L"] = L->get_str();
    j["gamma"] = gamma.get_str();
    j["weight"] = weight == Weight::None ? "none" : "product";
    j["region"] = region == Region::Box ? "box" : "orthant";
    j["lhs"] = enc_json(lhs);
    if (rhs) {
        j["rhs"] = enc_json(*rhs);
        j["rhs_exact"] = rhs_exact;
    }
    if (verdict) j["verdicts"] = verdicts_json({*verdict});
    j["growth_term"] = growth_name;
    j["growth"] = enc_json(growth);
    if (growth.lo > 0) j["ratio"] = enc_json(ratio);
    j["pass"] = !verdict || verdict->ok;
    return j.dump();
}

PsiReport psi_transfer_sums(const Real& alpha, const Gamma& gamma, const PsiSpec& psi, long N,
                            const std::vector<long>& checkpoints, long prec) {
    if (N < 1) throw Error(ErrorKind::Domain, "N must be positive");
    PsiReport r;
    r.N = N;
    r.psi = psi.text;
    r.via_R_applicable = psi_decreasing(psi);
    r.via_S_applicable = psi_n_decreasing(psi);
    NormKernel k(alpha, gamma, default_kernel_bits(N) + 64);
    Interval R(0L, prec), S(0L, prec), direct(0L, prec), viaR(0L, prec), viaS(0L, prec);
    Interval psi_n = psi_value(psi, 1, prec);
    std::vector<long> cps = checkpoints;
    std::sort(cps.begin(), cps.end());
    size_t ci = 0;
    for (long n = 1; n <= N; ++n) {
        Interval t = Interval(1L, prec) / Interval(k.norm(n), prec);
        Interval psi_next = psi_value(psi, n + 1, prec);
        R = R + t;
        S = S + t / Interval(n, prec);
        direct = direct + psi_n * t;
        viaR = viaR + (psi_n - psi_next) * R;
        viaS = viaS + (Interval(n, prec) * psi_n - Interval(n + 1, prec) * psi_next) * S;
        if (n == N) {
            viaR = viaR + psi_next * R;
            viaS = viaS + Interval(N + 1, prec) * psi_next * S;
        }
        while (ci < cps.size() && cps[ci] == n) {
            r.partials.push_back({n, direct.enclosure()});
            ++ci;
        }
        psi_n = psi_next;
    }
    r.direct = direct.enclosure();
    r.via_R = viaR.enclosure();
    r.via_S = viaS.enclosure();
    r.agree = direct.overlaps(viaR) && direct.overlaps(viaS);
    return r;
}

std::string PsiReport::to_json() const {
    nlohmann::ordered_json j;
    j["schema"] = 1;
    j["N"] = N;
    j["psi"] = psi;
    j["direct"] = enc_json(direct);
    j["via_R"] = enc_json(via_R);
    j["via_S"] = enc_json(via_S);
    j["psi_decreasing"] = via_R_applicable;
    j["n_psi_nonincreasing"] = via_S_applicable;
    j["agree"] = agree;
    auto arr = nlohmann::ordered_json::array();
    for (const auto& [n, e] : partials) arr.push_back({{"N", n}, {"sum", enc_json(e)}});
    j["partials"] = arr;
    j["pass"] = agree;
    return j.dump();
}

}  // namespace dioph
