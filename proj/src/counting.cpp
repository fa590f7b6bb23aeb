#include "dioph/counting.hpp"

#include <json.hpp>

#include "dioph/error.hpp"

namespace dioph {

bool CountReport::pass() const {
    for (const auto& c : checks)
        if (c.applies && !c.ok) return false;
    return true;
}

std::string CountReport::to_json() const {
    nlohmann::ordered_json j;
    j["schema"] = 1;
    j["alpha"] = alpha;
    j["gamma"] = gamma;
    j["eps"] = eps.get_str();
    j["N"] = N;
    j["count"] = count;
    j["K"] = K;
    j["M"] = M.get_str();
    if (hom_count_2eps >= 0) j["hom_count_2eps"] = hom_count_2eps;
    if (half_gamma_count >= 0) j["half_gamma_count"] = half_gamma_count;
    if (half_hom_count >= 0) j["half_hom_count"] = half_hom_count;
    auto arr = nlohmann::ordered_json::array();
    for (const auto& c : checks) {
        nlohmann::ordered_json e;
        e["name"] = c.name;
        e["applies"] = c.applies;
        e["ok"] = c.ok;
        e["lower"] = c.lower.get_str();
        if (c.upper >= 0) e["upper"] = c.upper.get_str();
        if (!c.note.empty()) e["note"] = c.note;
        arr.push_back(e);
    }
    j["checks"] = arr;
    j["pass"] = pass();
    return j.dump();
}

long count_below(const NormKernel& k, const mpq_class& eps, long N, int threads) {
    if (eps <= 0) throw Error(ErrorKind::Domain, "eps must be positive");
    std::vector<long> parts(std::max(1, threads), 0);
    parallel_chunks(1, N, threads, [&](long b, long e, int i) {
        long c = 0;
        for (long n = b; n <= e; ++n)
            if (k.below(n, eps)) ++c;
        parts[i] = c;
    });
    long total = 0;
    for (long c : parts) total += c;
    return total;
}

namespace {

mpq_class qfloor(const mpq_class& x) { return mpq_class(floor_q(x)); }

CountReport base_report(const ConvergentTable& t, const std::string& gamma, const mpq_class& eps, long N) {
    CountReport r;
    r.alpha = t.alpha().str();
    r.gamma = gamma;
    r.eps = eps;
    r.N = N;
    r.K = K_of(t, N);
    mpq_class qK(t.q(r.K)), qK1(t.q(r.K + 1));
    mpq_class a = eps * N, b = mpq_class(N) / (2 * qK);
    mpq_class mx = a > b ? a : b;
    r.M = eps * qK1 < mx ? mpq_class(eps * qK1) : mx;
    return r;
}

void hom_checks(CountReport& r, const ConvergentTable& t, long count) {
    const mpq_class& eps = r.eps;
    const long N = r.N;
    const Real& x = t.alpha();
    // 0 < 2 eps < ||q_2 alpha|| = |D_2|
    bool small = x.sign(t.absD(2) - Affine{0, 2 * eps}) > 0;
    // 1/(2 eps) <= q_l <= N for some l
    bool ghj = false;
    for (long l = 0; l <= r.K && !ghj; ++l) ghj = mpq_class(t.q(l)) * 2 * eps >= 1;
    CountCheck c61{"floor(eps N) <= # <= 32 eps N", small && ghj, false, qfloor(eps * N), 32 * eps * N, ""};
    c61.ok = c61.lower <= count && count <= c61.upper;
    if (!small) c61.note = "2 eps >= ||q_2 alpha||";
    else if (!ghj) c61.note = "no q_l in [1/(2 eps), N]";
    r.checks.push_back(c61);

    bool h63 = small && 2 * eps * N > 1;
    CountCheck c63{"floor(M) <= # <= 32 M", h63, false, qfloor(r.M), 32 * r.M, ""};
    c63.ok = c63.lower <= count && count <= c63.upper;
    if (!h63) c63.note = small ? "2 eps <= 1/N" : "2 eps >= ||q_2 alpha||";
    r.checks.push_back(c63);

    CountCheck vbf{"# >= floor(eps N) (Minkowski)", eps * N >= 1, false, qfloor(eps * N), -1, ""};
    vbf.ok = vbf.lower <= count;
    if (!vbf.applies) vbf.note = "eps N < 1";
    r.checks.push_back(vbf);

    mpq_class m1 = qfloor(eps * mpq_class(t.q(r.K + 1))), m2 = qfloor(mpq_class(N) / mpq_class(t.q(r.K)));
    CountCheck vbm{"# >= min{floor(eps q_{K+1}), floor(N/q_K)}", true, false, m1 < m2 ? m1 : m2, -1, ""};
    vbm.ok = vbm.lower <= count;
    r.checks.push_back(vbm);

    if (eps > mpq_class(1, 2)) {
        CountCheck all{"eps > 1/2: every n counts", true, count == N, mpq_class(N), mpq_class(N), ""};
        r.checks.push_back(all);
    }
}

}  // namespace

CountReport count_hom(const Real& alpha, const mpq_class& eps, long N, int threads) {
    if (N < 1) throw Error(ErrorKind::Domain, "N must be positive");
    auto t = table_for(alpha, N);
    NormKernel k(alpha, Gamma::zero(), default_kernel_bits(N));
    CountReport r = base_report(t, "0", eps, N);
    r.count = count_below(k, eps, N, threads);
    hom_checks(r, t, r.count);
    return r;
}

CountReport count_inhom(const Real& alpha, const Gamma& gamma, const mpq_class& eps, long N, int threads) {
    if (N < 1) throw Error(ErrorKind::Domain, "N must be positive");
    auto t = table_for(alpha, N);
    long P = default_kernel_bits(N);
    NormKernel kg(alpha, gamma, P), k0(alpha, Gamma::zero(), P);
    CountReport r = base_report(t, gamma.label(), eps, N);
    r.count = count_below(kg, eps, N, threads);
    bool homogeneous = gamma.is_exact() && gamma.form().is_zero();
    if (homogeneous) hom_checks(r, t, r.count);

    r.hom_count_2eps = count_below(k0, 2 * eps, N, threads);
    CountCheck v1{"# <= #N(alpha, 2 eps) + 1", true, false, 0, mpq_class(r.hom_count_2eps + 1), ""};
    v1.ok = r.count <= r.hom_count_2eps + 1;
    r.checks.push_back(v1);

    long Nh = N / 2;
    CountCheck v2{"# >= #N'(alpha, eps/2) + 1", false, false, 0, -1, ""};
    if (Nh >= 1) {
        r.half_gamma_count = count_below(kg, eps / 2, Nh, threads);
        if (r.half_gamma_count > 0) {
            r.half_hom_count = count_below(k0, eps / 2, Nh, threads);
            v2.applies = true;
            v2.lower = r.half_hom_count + 1;
            v2.ok = r.count >= r.half_hom_count + 1;
        } else {
            v2.note = "N'_gamma(alpha, eps/2) is empty";
        }
    } else {
        v2.note = "N/2 < 1";
    }
    r.checks.push_back(v2);
    return r;
}

}  // namespace dioph
