#include "dioph/contfrac.hpp"

#include <json.hpp>
#include <sstream>

#include "dioph/error.hpp"

namespace dioph {

namespace {

long absD_bits(const mpz_class& qnext) { return 2 * bitlen(qnext) + 64; }

}  // namespace

ConvergentTable ConvergentTable::build(const Real& x, long depth) {
    if (x.is_rational()) throw Error(ErrorKind::Domain, "continued-fraction table needs an irrational alpha, got " + x.str());
    if (depth < 1) throw Error(ErrorKind::Domain, "table depth must be positive");
    ConvergentTable t(x);
    for (long k = 0; k <= depth + 1; ++k) t.a_.push_back(x.quotient(k));
    mpz_class A = 0;
    for (long k = 0; k <= depth; ++k) {
        ConvergentRow r;
        r.k = k;
        r.a = t.a_[k];
        r.p = x.p(k);
        r.q = x.q(k);
        if (k >= 1) A += r.a;
        r.A = A;
        t.rows_.push_back(r);
    }
    for (long k = 0; k <= depth; ++k) {
        ConvergentRow& r = t.rows_[k];
        r.sign_D = x.sign(t.D(k));
        if (r.sign_D == 0) throw Error(ErrorKind::Internal, "D_" + std::to_string(k) + " vanished");
        r.absD = x.enclose(t.absD(k), absD_bits(x.q(k + 1)));
    }
    RelationReport rep = verify_relations(t);
    for (const auto& c : rep.checks)
        if (!c.pass) throw Error(ErrorKind::Internal, "relation " + c.name + " failed: " + c.first_failure);
    return t;
}

const ConvergentRow& ConvergentTable::row(long k) const {
    if (k < 0 || k > depth())
        throw Error(ErrorKind::Depth, "row " + std::to_string(k) + " beyond table depth " + std::to_string(depth()), depth());
    return rows_[k];
}

const mpz_class& ConvergentTable::a(long k) const {
    if (k < 0 || k > quotient_depth())
        throw Error(ErrorKind::Depth, "a_" + std::to_string(k) + " beyond table depth " + std::to_string(depth()), depth());
    return a_[k];
}

const mpz_class& ConvergentTable::q(long k) const { return k == -1 ? q_m1_ : row(k).q; }
const mpz_class& ConvergentTable::p(long k) const { return k == -1 ? p_m1_ : row(k).p; }

Affine ConvergentTable::D(long k) const { return {mpq_class(q(k)), mpq_class(-p(k))}; }

Affine ConvergentTable::absD(long k) const {
    Affine d = D(k);
    int s = k < static_cast<long>(rows_.size()) && rows_[k].sign_D != 0 ? rows_[k].sign_D : (k == 0 ? 1 : (k % 2 ? -1 : 1));
    return s < 0 ? -d : d;
}

Enclosure ConvergentTable::absD_enclosure(long k, long bits) const { return alpha_.enclose(absD(k), bits); }

Interval ConvergentTable::absD_interval(long k, long prec) const { return Interval(absD_enclosure(k, prec + 2), prec); }

std::string ConvergentTable::to_csv() const {
    std::ostringstream os;
    os << "k,a_k,p_k,q_k,sign_Dk,absDk_lo,absDk_hi,A_k\n";
    for (const auto& r : rows_)
        os << r.k << ',' << r.a.get_str() << ',' << r.p.get_str() << ',' << r.q.get_str() << ',' << r.sign_D << ','
           << dec_down(r.absD.lo) << ',' << dec_up(r.absD.hi) << ',' << r.A.get_str() << '\n';
    return os.str();
}

std::string ConvergentTable::to_json() const {
    nlohmann::ordered_json j;
    j["schema"] = 1;
    j["alpha"] = alpha_.str();
    j["depth"] = depth();
    auto rows = nlohmann::ordered_json::array();
    for (const auto& r : rows_) {
        nlohmann::ordered_json o;
        o["k"] = r.k;
        o["a_k"] = r.a.get_str();
        o["p_k"] = r.p.get_str();
        o["q_k"] = r.q.get_str();
        o["sign_Dk"] = r.sign_D;
        o["absDk_lo"] = dec_down(r.absD.lo);
        o["absDk_hi"] = dec_up(r.absD.hi);
        o["A_k"] = r.A.get_str();
        rows.push_back(o);
    }
    j["rows"] = rows;
    return j.dump(2);
}

std::vector<mpz_class> partial_quotients(const Real& x, long count) {
    if (x.is_rational()) throw Error(ErrorKind::Domain, "partial quotients requested for a rational input " + x.str());
    std::vector<mpz_class> out;
    for (long k = 0; k <= count; ++k) out.push_back(x.quotient(k));
    return out;
}

long K_of(const ConvergentTable& t, const mpz_class& N) {
    if (N < 1) throw Error(ErrorKind::Domain, "K(N) needs N >= 1");
    if (t.q(t.depth()) <= N)
        throw Error(ErrorKind::Depth, "table too shallow: q_" + std::to_string(t.depth()) + " <= N", t.depth());
    long K = 0;
    while (t.q(K + 1) <= N) ++K;
    return K;
}

ConvergentTable table_for(const Real& x, const mpz_class& N, long extra) {
    // q_k grows at least like Fibonacci numbers, so this depth always reaches past N
    long d = 4 + 3 * bitlen(N) / 2;
    mpz_class qa = 1, qb = 0;   // q_k, q_{k-1}
    long K = -1;
    for (long k = 0; k <= d; ++k) {
        if (k > 0) {
            mpz_class qn = x.quotient(k) * qa + qb;
            qb = qa;
            qa = qn;
        }
        if (qa > N) break;
        K = k;
    }
    for (long e = extra; e >= 1; --e) {
        try {
            return ConvergentTable::build(x, K + e);
        } catch (const Error& err) {
            if (err.kind() != ErrorKind::Depth || e == 1) throw;
        }
    }
    throw Error(ErrorKind::Internal, "unreachable");
}

ExponentEstimate approx_exponent(const ConvergentTable& t, long depth) {
    if (depth < 2) throw Error(ErrorKind::Domain, "exponent estimate needs depth >= 2");
    if (depth > t.depth() || depth + 1 > t.quotient_depth())
        throw Error(ErrorKind::Depth, "exponent estimate needs q_" + std::to_string(depth + 1), t.depth());
    const long prec = 128;
    ExponentEstimate est{Interval(prec), {}};
    bool first = true;
    for (long k = 2; k <= depth; ++k) {
        mpz_class qnext = t.a(k + 1) * t.q(k) + t.q(k - 1);
        Interval r = Interval::log(Interval(qnext, prec)) / Interval::log(Interval(t.q(k), prec));
        est.max_ratio = first ? r : est.max_ratio.max(r);
        first = false;
        est.running.push_back(est.max_ratio);
    }
    return est;
}

bool RelationReport::pass() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

RelationReport verify_relations(const ConvergentTable& t) {
    const Real& x = t.alpha();
    const long d = t.depth();
    RelationReport rep;
    auto check = [&](const std::string& name) -> RelationCheck& {
        rep.checks.push_back({name, true, 0, ""});
        return rep.checks.back();
    };
    auto fail = [](RelationCheck& c, long k, const std::string& why) {
        if (c.pass) c.first_failure = "k=" + std::to_string(k) + ": " + why;
        c.pass = false;
    };

    {
        RelationCheck& c = check("recurrence");
        for (long k = 1; k < d; ++k) {
            ++c.rows;
            if (t.q(k + 1) != t.a(k + 1) * t.q(k) + t.q(k - 1) || t.p(k + 1) != t.a(k + 1) * t.p(k) + t.p(k - 1))
                fail(c, k, "q or p recurrence");
        }
    }
    // positive[k]: |D_k| > 0 certified. The quadratic loops below rest on exact identities
    // whose sides are sums of these, so their inequalities follow without further sign calls.
    std::vector<char> positive(d + 1, 0);
    {
        RelationCheck& c = check("sign");
        for (long k = 0; k <= d; ++k) {
            ++c.rows;
            Affine Dk = t.D(k);
            positive[k] = x.sign(t.absD(k)) > 0;
            if (!positive[k]) fail(c, k, "|D_k| is not positive");
            if (k == 0) {
                if (x.sign(Dk) <= 0 || x.sign(Dk - Affine{0, 1}) >= 0) fail(c, k, "D_0 is not the fractional part");
            } else {
                int expect = k % 2 ? -1 : 1;
                if (x.sign(Dk) != expect) fail(c, k, "sign of D_k");
                // |D_k| is the distance to the nearest integer only if it is below 1/2
                if (x.sign(t.absD(k) * 2 - Affine{0, 1}) >= 0) fail(c, k, "|D_k| >= 1/2");
            }
        }
    }
    {
        RelationCheck& c = check("second-order");
        for (long k = 1; k < d; ++k) {
            ++c.rows;
            Affine lhs = t.D(k) * mpq_class(t.a(k + 1));
            Affine rhs = t.D(k + 1) - t.D(k - 1);
            if (!(lhs == rhs)) fail(c, k, "a_{k+1} D_k != D_{k+1} - D_{k-1}");
        }
    }
    {
        RelationCheck& c = check("q-bracket");
        for (long k = 0; k <= d; ++k) {
            ++c.rows;
            Affine v = t.absD(k) * mpq_class(t.a(k + 1) * t.q(k) + t.q(k - 1));
            if (x.sign(v * 2 - Affine{0, 1}) < 0 || x.sign(v - Affine{0, 1}) > 0) fail(c, k, "q_{k+1}|D_k| outside [1/2,1]");
        }
    }
    {
        RelationCheck& c = check("three-term");
        for (long k = 0; k + 2 <= d; ++k) {
            ++c.rows;
            Affine lhs = t.absD(k + 1) * mpq_class(t.a(k + 2)) + t.absD(k + 2);
            if (!(lhs == t.absD(k))) fail(c, k, "a_{k+2}|D_{k+1}| + |D_{k+2}| != |D_k|");
        }
    }
    {
        // Alternate-index sums: sum_{i=1}^{I} a_{k+2i}|D_{k+2i-1}| = |D_k| - |D_{k+2I}|,
        // so the truncation error equals the tail |D_{k+2I}|.
        RelationCheck& c = check("alternate-sum");
        for (long k = 0; k + 2 <= d; ++k) {
            Affine s{0, 0};
            for (long i = 1; k + 2 * i <= d; ++i) {
                ++c.rows;
                s += t.absD(k + 2 * i - 1) * mpq_class(t.a(k + 2 * i));
                if (!(s == t.absD(k) - t.absD(k + 2 * i))) fail(c, k, "alternate sum truncation");
                if (!positive[k + 2 * i]) fail(c, k, "alternate partial sum exceeds |D_k|");
            }
        }
    }
    {
        // Telescoping tail: sum_{i=k+1}^{T} a_{i+1}|D_i| = |D_k| + |D_{k+1}| - |D_T| - |D_{T+1}|.
        RelationCheck& c = check("tail-sum");
        for (long k = 0; k + 1 < d; ++k) {
            Affine s{0, 0};
            for (long T = k + 1; T + 1 <= d; ++T) {
                ++c.rows;
                s += t.absD(T) * mpq_class(t.a(T + 1));
                Affine target = t.absD(k) + t.absD(k + 1);
                Affine defect = target - s;
                Affine bound = t.absD(T) + t.absD(T + 1);
                if (!(defect == bound)) fail(c, k, "telescoping identity at T=" + std::to_string(T));
                if (!positive[T] || !positive[T + 1]) fail(c, k, "tail bound at T=" + std::to_string(T));
            }
        }
    }
    {
        // Full sum from i = 0: sum_{i=0}^{T} a_{i+1}|D_i| = |D_0| + 1 - |D_T| - |D_{T+1}|.
        RelationCheck& c = check("full-sum");
        Affine s{0, 0};
        for (long T = 0; T + 1 <= d; ++T) {
            ++c.rows;
            s += t.absD(T) * mpq_class(t.a(T + 1));
            Affine defect = t.absD(0) + Affine{0, 1} - s;
            Affine bound = t.absD(T) + t.absD(T + 1);
            if (!(defect == bound)) fail(c, T, "full telescoping identity");
        }
    }
    {
        RelationCheck& c = check("monotone");
        for (long k = 0; k < d; ++k) {
            ++c.rows;
            if (x.sign(t.absD(k) - t.absD(k + 1)) <= 0) fail(c, k, "|D_k| <= |D_{k+1}|");
        }
    }
    {
        RelationCheck& c = check("growth");
        mpz_class prod = 1;
        for (long m = 1; m <= d; ++m) {
            ++c.rows;
            prod *= t.a(m);
            const mpz_class& qm = t.q(m);
            mpz_class pow2 = mpz_class(1) << static_cast<unsigned long>(m - 1);
            if (qm * qm < pow2) fail(c, m, "q_m < 2^((m-1)/2)");
            if (qm < prod) fail(c, m, "q_m < a_1...a_m");
            if (qm > pow2 * prod) fail(c, m, "q_m > 2^(m-1) a_1...a_m");
        }
    }
    return rep;
}

}  // namespace dioph
