#include "dioph/normeval.hpp"

#include <json.hpp>

#include <sstream>
#include <thread>

#include "dioph/error.hpp"

namespace dioph {

namespace {

// Hull of ||x|| over [lo, hi].
Enclosure norm_hull(const Enclosure& e) {
    if (e.hi - e.lo >= mpq_class(1, 2)) return {0, mpq_class(1, 2)};
    auto nm = [](const mpq_class& x) {
        mpq_class f = x - mpq_class(floor_q(x));
        return f <= mpq_class(1, 2) ? f : mpq_class(1 - f);
    };
    mpq_class a = nm(e.lo), b = nm(e.hi);
    mpq_class lo = a < b ? a : b, hi = a < b ? b : a;
    mpz_class fl = floor_q(e.lo);
    mpq_class half = mpq_class(fl) + mpq_class(1, 2);
    if ((e.lo <= half && half <= e.hi) || (e.lo <= half + 1 && half + 1 <= e.hi)) hi = mpq_class(1, 2);
    if (mpq_class(fl) == e.lo || mpq_class(fl + 1) <= e.hi) lo = 0;
    return {lo, hi};
}

Term term(const LinEval& ev, const Lin& y, long bits) { return {y, ev.enclose(y, bits)}; }

long pm1(long k) { return k % 2 == 0 ? 1 : -1; }

}  // namespace

bool SigmaDecomposition::pass() const {
    for (const auto& c : checks)
        if (!c.ok) return false;
    return true;
}

std::vector<std::string> SigmaDecomposition::failures() const {
    std::vector<std::string> out;
    for (const auto& c : checks)
        if (!c.ok) out.push_back(c.name);
    return out;
}

std::optional<Lin> norm_exact(const Real& alpha, const mpz_class& n, const Gamma& gamma) {
    if (!gamma.is_exact()) return std::nullopt;
    Affine y = Affine{mpq_class(n), 0} - gamma.form();
    if (auto r = alpha.rational_value()) y = Affine{0, y.u * *r + y.v};
    // nearest integer r: y - r in [-1/2, 1/2)
    Enclosure e = alpha.enclose(y, 64);
    mpz_class r = floor_q(e.lo + mpq_class(1, 2));
    auto off = [&](const mpz_class& rr) { return y - Affine{0, mpq_class(rr)}; };
    while (alpha.sign(off(r) + Affine{0, mpq_class(1, 2)}) < 0) --r;
    while (alpha.sign(off(r) - Affine{0, mpq_class(1, 2)}) >= 0) ++r;
    Affine d = off(r);
    return lin(alpha.sign(d) < 0 ? -d : d);
}

NormResult norm_direct(const Real& alpha, const mpz_class& n, const Gamma& gamma, long bits) {
    NormResult out;
    out.method = NormMethod::Direct;
    if (auto ex = norm_exact(alpha, n, gamma)) {
        out.exact = ex;
        out.degenerate = ex->f.u == 0 && ex->f.v == 0;
        out.value = alpha.enclose(ex->f, bits);
        if (out.value.lo < 0) out.value.lo = 0;
        return out;
    }
    LinEval ev(alpha, gamma);
    Lin y = lin(Affine{mpq_class(n), 0}) - ev.gamma_lin();
    mpq_class tol(1);
    tol /= mpq_class(mpz_class(1) << static_cast<unsigned long>(bits));
    for (long b = bits + 4; b <= precision_cap(); b *= 2) {
        Enclosure v = norm_hull(ev.enclose(y, b));
        if (v.hi - v.lo <= tol) {
            out.value = v;
            return out;
        }
    }
    throw Error(ErrorKind::Precision, "norm enclosure did not reach 2^-" + std::to_string(bits));
}

NormResult norm_via_ostrowski(const ConvergentTable& t, const OstrowskiInt& c, const OstrowskiReal& b, long bits) {
    DeltaDigits d = delta_of(c, b);
    if (d.degenerate()) {
        if (b.finite) throw Error(ErrorKind::DegenerateGamma, "n alpha - gamma is an integer for n=" + c.n.get_str());
        throw Error(ErrorKind::Depth, "delta vanishes up to depth " + std::to_string(d.depth), d.depth);
    }
    LinEval ev(t.alpha(), b.gamma);
    SigmaDecomposition sd;
    std::vector<NamedCheck>& ck = sd.checks;
    auto check = [&](const std::string& name, bool ok) { ck.push_back({name, ok}); };
    auto nonneg = [&](const Lin& y) { return ev.sign(y) >= 0; };
    auto D = [&](long k) { return lin(t.D(k)); };
    auto aD = [&](long k) { return lin(t.absD(k)); };
    auto a = [&](long k) { return t.a(k); };
    auto dd = [&](long k) {
        if (!d.finite && k >= d.depth)
            throw Error(ErrorKind::Depth, "real digits needed up to index " + std::to_string(k + 1), k + 1);
        return d.d(k);
    };

    const long m = *d.m;
    sd.m = m;
    sd.s = d.d(m) > 0 ? 1 : -1;
    const long s = sd.s;

    // Sigma = n alpha - sum c_{k+1} p_k - (gamma + shift)
    Lin nalpha = lin(Affine{mpq_class(c.n), 0});
    mpz_class P = 0;
    for (const auto& [k, v] : c.digits) P += v * t.p(k);
    Lin sigma = nalpha - lin(Affine{0, mpq_class(P)}) - ev.gamma_lin(b.shift);
    Lin head = lin(Affine{0, 0});
    for (long k = 0; k < m; ++k) head = head + D(k) * dd(k);
    check("sigma starts at m", head == lin(Affine{0, 0}));

    // tail(j) = sum_{k>=j} delta_{k+1} D_k
    auto tail = [&](long j) {
        Lin r = sigma;
        for (long k = m; k < j; ++k) r = r - D(k) * dd(k);
        return r;
    };

    Lin abs_sigma = sigma * (s * pm1(m));
    check("|Sigma| = sgn(delta_{m+1} D_m) Sigma", nonneg(abs_sigma));
    check("|Sigma| <= 1", nonneg(lin(Affine{0, 1}) - abs_sigma));
    bool abs_branch = ev.sign(lin(Affine{0, mpq_class(1, 2)}) - abs_sigma) >= 0;
    sd.branch = abs_branch ? Branch::Abs : Branch::Complement;
    Lin value = abs_branch ? abs_sigma : lin(Affine{0, 1}) - abs_sigma;

    // three-term identity
    const long K = c.K;
    const long ell_bound = std::max(2L, K - m + 1);
    long ell = 1;
    while (dd(m + 1 + ell) == pm1(ell) * s * a(m + 2 + ell)) ++ell;
    sd.ell = ell;
    check("ell within max{2, K-m+1}", ell <= ell_bound);
    bool pattern = true;
    for (long i = 1; i < ell; ++i) pattern = pattern && dd(m + 1 + i) == pm1(i) * s * a(m + 2 + i);
    check("delta pattern below ell", pattern);

    mpz_class c1 = abs(dd(m)) - 1;
    mpz_class c2 = a(m + 2) - 1 - s * dd(m + 1);
    mpz_class c3 = a(m + 2 + ell) - pm1(ell) * s * dd(m + 1 + ell);
    if (m == 0)
        check("0 <= |delta_1| - 1 <= a_1 - 2", c1 >= 0 && c1 <= a(1) - 2);
    else
        check("0 <= |delta_{m+1}| - 1 <= a_{m+1} - 1", c1 >= 0 && c1 <= a(m + 1) - 1);
    check("0 <= a_{m+2} - 1 - s delta_{m+2} <= 2a_{m+2} - 1", c2 >= 0 && c2 <= 2 * a(m + 2) - 1);
    check("1 <= third coefficient <= 2a_{m+2+ell}", c3 >= 1 && c3 <= 2 * a(m + 2 + ell));
    Lin t1 = aD(m) * c1, t2 = aD(m + 1) * c2, t3 = aD(m + 1 + ell) * c3;
    Lin delta = aD(m) + aD(m + 1);
    for (long k = m + 1; k <= m + ell + 1; ++k) delta = delta - aD(k) * a(k + 1);
    delta = delta + tail(m + ell + 2) * (pm1(m) * s);
    check("|Sigma| = term1 + term2 + term3 + Delta", t1 + t2 + t3 + delta == abs_sigma);
    check("Delta >= 0", nonneg(delta));
    check("Delta <= 2|D_{m+1+ell}| + 2|D_{m+2+ell}|", nonneg((aD(m + 1 + ell) + aD(m + 2 + ell)) * 2 - delta));
    check("Delta < 4|D_{m+1+ell}|", ev.sign(aD(m + 1 + ell) * 4 - delta) > 0);

    // complement identity
    long L = 1;
    while (dd(L) == pm1(L + m) * s * a(L + 1)) ++L;
    sd.L = L;
    check("L <= K + 2", L <= K + 2);
    mpz_class u1 = a(1) - 1 - pm1(m) * s * dd(0);
    mpz_class u2 = a(L + 1) - pm1(L + m) * s * dd(L);
    check("complement coefficients nonnegative", u1 >= 0 && u2 >= 0);
    Lin v1 = aD(0) * u1, v2 = aD(L) * u2;
    Lin tdelta = aD(L) + aD(L + 1) - tail(L + 1) * (pm1(m) * s);
    check("1 - |Sigma| = tilde1 + tilde2 + tilde Delta", v1 + v2 + tdelta == lin(Affine{0, 1}) - abs_sigma);
    check("tilde Delta >= 0", nonneg(tdelta));
    check("tilde Delta < 4|D_L|", ev.sign(aD(L) * 4 - tdelta) > 0);

    sd.sigma = term(ev, sigma, bits);
    sd.abs_sigma = term(ev, abs_sigma, bits);
    sd.term1 = term(ev, t1, bits);
    sd.term2 = term(ev, t2, bits);
    sd.term3 = term(ev, t3, bits);
    sd.delta = term(ev, delta, bits);
    sd.tilde1 = term(ev, v1, bits);
    sd.tilde2 = term(ev, v2, bits);
    sd.tilde_delta = term(ev, tdelta, bits);

    if (!sd.pass()) {
        std::string msg = "digit-route identity failed for n=" + c.n.get_str() + ":";
        for (const auto& f : sd.failures()) msg += " [" + f + "]";
        throw Error(ErrorKind::Internal, msg);
    }
    NormResult out;
    out.method = NormMethod::Ostrowski;
    out.value = ev.enclose(value, bits);
    if (out.value.lo < 0) out.value.lo = 0;
    if (ev.is_exact(value)) out.exact = value;
    out.decomposition = std::move(sd);
    return out;
}

HomBounds hom_bounds(const OstrowskiInt& c, const ConvergentTable& t, long bits) {
    HomBounds h;
    h.m = c.digits.begin()->first;
    const long m = h.m;
    if (m < 2) {
        h.applies = false;
        Lin v = *norm_exact(t.alpha(), c.n, Gamma::zero());
        bool forced = t.alpha().sign(v.f - t.absD(2)) >= 0;
        h.verdict = forced ? "hypothesis not met: m < 2 and ||n alpha|| >= |D_2|"
                           : "hypothesis not met: m < 2 yet ||n alpha|| < |D_2| (contradiction)";
        return h;
    }
    h.applies = true;
    mpq_class cm(c.c(m)), cm1(c.c(m + 1));
    h.lower = t.absD(m) * (cm - 1) + t.absD(m + 1) * (mpq_class(t.a(m + 2)) - cm1);
    h.upper = t.absD(m) * (cm + 1);
    h.lower_enc = t.alpha().enclose(h.lower, bits);
    h.upper_enc = t.alpha().enclose(h.upper, bits);
    h.verdict = "applies";
    return h;
}

std::optional<Affine> hom_formula(const OstrowskiInt& c, const ConvergentTable& t) {
    long m = c.digits.begin()->first;
    bool ok = m >= 2 || (m == 1 && t.alpha().sign(t.absD(0) - Affine{0, mpq_class(1, 2)}) < 0);
    if (!ok) return std::nullopt;
    Affine s{0, 0};
    for (const auto& [k, v] : c.digits) s += t.D(k) * mpq_class(v);
    return m % 2 == 0 ? s : -s;
}

Affine inhom_upper(const DeltaDigits& d, const ConvergentTable& t) {
    if (d.degenerate()) throw Error(ErrorKind::DegenerateGamma, "delta vanishes; no index m");
    mpz_class dm = d.d(*d.m);
    return t.absD(*d.m) * mpq_class(abs(dm) + 2);
}

std::string norm_batch_csv(const std::string& job_json, int threads) {
    nlohmann::json job;
    try {
        job = nlohmann::json::parse(job_json);
    } catch (const std::exception& e) {
        throw Error(ErrorKind::Parse, std::string("bad batch job: ") + e.what());
    }
    std::vector<mpz_class> ns;
    if (job.contains("n")) {
        for (const auto& v : job["n"]) ns.emplace_back(v.is_string() ? v.get<std::string>() : std::to_string(v.get<long>()));
    } else {
        long from = job.value("n_from", 1L), to = job.value("n_to", 100L);
        for (long n = from; n <= to; ++n) ns.emplace_back(n);
    }
    if (ns.empty()) throw Error(ErrorKind::Validation, "batch job has no n");
    mpz_class nmax = 1;
    for (const auto& n : ns) {
        if (n <= 0) throw Error(ErrorKind::Domain, "batch n must be positive");
        if (n > nmax) nmax = n;
    }
    Real alpha = Real::parse(job.value("alpha", std::string("golden")));
    long bits = job.value("bits", 80L);
    long depth = job.value("depth", 0L);
    if (depth == 0) {
        auto probe = ConvergentTable::build(alpha, 8);
        long d = 8;
        while (probe.q(probe.depth()) <= nmax) {
            d *= 2;
            probe = ConvergentTable::build(alpha, d);
        }
        depth = K_of(probe, nmax) + 12;
    }
    auto t = ConvergentTable::build(alpha, depth);
    Gamma gamma = parse_gamma(job.value("gamma", std::string("0")), t);
    OstrowskiReal b = expand_real(t, gamma, depth);

    std::vector<std::string> rows(ns.size());
    auto work = [&](size_t start, size_t stride) {
        for (size_t i = start; i < ns.size(); i += stride) {
            const mpz_class& n = ns[i];
            std::ostringstream os;
            os << n.get_str() << ',';
            try {
                NormResult r = norm_via_ostrowski(t, expand_int(t, n), b, bits);
                const auto& sd = *r.decomposition;
                os << dec_down(r.value.lo, 25) << ',' << dec_up(r.value.hi, 25) << ',' << sd.m << ','
                   << (sd.branch == Branch::Abs ? "abs" : "complement") << ',' << sd.ell << ',' << sd.L;
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::DegenerateGamma) throw;
                os << "0,0,,degenerate,,";
            }
            rows[i] = os.str();
        }
    };
    int nt = std::max(1, threads);
    if (nt == 1) {
        work(0, 1);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errs(nt);
        for (int i = 0; i < nt; ++i)
            pool.emplace_back([&, i] {
                try {
                    work(i, nt);
                } catch (...) {
                    errs[i] = std::current_exception();
                }
            });
        for (auto& th : pool) th.join();
        for (auto& e : errs)
            if (e) std::rethrow_exception(e);
    }
    std::string out = "n,value_lo,value_hi,m,branch,ell,L\n";
    for (const auto& r : rows) out += r + "\n";
    return out;
}

}  // namespace dioph
