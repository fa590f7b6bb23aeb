#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "dioph/constructions.hpp"
#include "dioph/contfrac.hpp"
#include "dioph/counting.hpp"
#include "dioph/error.hpp"
#include "dioph/gapsets.hpp"
#include "dioph/normeval.hpp"
#include "dioph/ostrowski.hpp"
#include "dioph/sums.hpp"
#include "dioph/verify.hpp"

using namespace dioph;
using ojson = nlohmann::ordered_json;

namespace {

struct Opts {
    std::vector<std::string> alpha;
    std::string gamma = "0";
    std::string psi;
    std::string N;
    std::string eps;
    std::string c = "1";
    long depth = 10;
    long precision = 24;
    std::string format = "json";
    std::string out;
    int threads = 1;
    // command-specific
    std::string prefix;
    std::string T;
    std::string L;
    std::string weight = "none";
    std::string region = "box";
    std::string K;
    std::string rule = "qk";
    std::string stream_prefix = "[0;1]";
    std::string f = "sqrt";
    std::string eps_bits = "0101";
    long count = 4;
    std::vector<std::string> beta;
    long sample = 0;
    std::string job;
};

// Failed verdicts map to exit status 1; the report is still written.
struct Outcome {
    std::string text;
    bool pass = true;
};

std::string one_alpha(const Opts& o) {
    if (o.alpha.size() != 1) throw Error(ErrorKind::Domain, "exactly one --alpha is required");
    return o.alpha.front();
}

long parse_long(const std::string& s, const std::string& what) {
    try {
        size_t used = 0;
        long v = std::stol(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw Error(ErrorKind::Parse, "bad integer '" + s + "' for " + what);
    }
}

std::vector<long> parse_list(const std::string& s, const std::string& what) {
    std::vector<long> v;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) v.push_back(parse_long(tok, what));
    if (v.empty()) throw Error(ErrorKind::Parse, "empty list for " + what);
    return v;
}

long need_N(const Opts& o) {
    if (o.N.empty()) throw Error(ErrorKind::Domain, "--N is required");
    return parse_long(o.N, "--N");
}

mpq_class parse_q(const std::string& s, const std::string& what) {
    mpq_class q;
    if (s.empty() || q.set_str(s, 10) != 0 || q.get_den() == 0) throw Error(ErrorKind::Parse, "bad rational '" + s + "' for " + what);
    q.canonicalize();
    return q;
}

std::string enc_csv(const Enclosure& e) { return dec_down(e.lo, 20) + "," + dec_up(e.hi, 20); }

void need_format(const Opts& o, bool csv_ok) {
    if (o.format != "json" && !(csv_ok && o.format == "csv"))
        throw Error(ErrorKind::Domain, "unsupported --format " + o.format + (csv_ok ? " (json|csv)" : " (json only)"));
}

Outcome cmd_cf(const Opts& o) {
    need_format(o, true);
    Real x = Real::parse(one_alpha(o));
    auto t = ConvergentTable::build(x, o.depth);
    auto rel = verify_relations(t);
    if (o.format == "csv") return {t.to_csv(), rel.pass()};
    ojson j = ojson::parse(t.to_json());
    j["relations_pass"] = rel.pass();
    return {j.dump(), rel.pass()};
}

Outcome cmd_ostrowski(const Opts& o) {
    need_format(o, false);
    Real x = Real::parse(one_alpha(o));
    if (!o.N.empty()) {
        mpz_class n;
        if (n.set_str(o.N, 10) != 0 || n < 1) throw Error(ErrorKind::Domain, "--N must be a positive integer");
        auto t = table_for(x, n);
        auto d = expand_int(t, n);
        auto v = validate_digits(d.digits, t);
        bool round = v.valid && reconstruct_int(d, t) == n;
        ojson j = ojson::parse(to_json(d, t));
        j["valid"] = v.valid;
        j["roundtrip"] = round;
        return {j.dump(), round};
    }
    auto t = ConvergentTable::build(x, o.depth);
    auto b = expand_real(t, parse_gamma(o.gamma, t), o.depth);
    auto v = validate_digits(b.digits, t, false);
    ojson j = ojson::parse(to_json(b, t));
    j["valid"] = v.valid;
    return {j.dump(), v.valid};
}

Outcome cmd_norm(const Opts& o) {
    if (!o.job.empty()) {
        need_format(o, true);
        std::ifstream in(o.job);
        if (!in) throw Error(ErrorKind::Domain, "cannot read job file " + o.job);
        std::stringstream ss;
        ss << in.rdbuf();
        return {norm_batch_csv(ss.str(), o.threads), true};
    }
    need_format(o, false);
    Real x = Real::parse(one_alpha(o));
    mpz_class n;
    if (o.N.empty() || n.set_str(o.N, 10) != 0 || n < 1) throw Error(ErrorKind::Domain, "--N (the index n) must be a positive integer");
    auto t = table_for(x, n, 8);
    Gamma g = parse_gamma(o.gamma, t);
    auto direct = norm_direct(x, n, g, o.precision);
    ojson j;
    j["schema"] = 1;
    j["alpha"] = x.str();
    j["gamma"] = g.label();
    j["n"] = n.get_str();
    j["precision"] = o.precision;
    j["value"] = ojson::array({dec_down(direct.value.lo, 20), dec_up(direct.value.hi, 20)});
    j["degenerate"] = direct.degenerate;
    bool pass = true;
    if (!direct.degenerate) {
        try {
            auto b = expand_real(t, g, t.depth());
            auto r = norm_via_ostrowski(t, expand_int(t, n), b, o.precision);
            const auto& sd = *r.decomposition;
            ojson d;
            d["m"] = sd.m;
            d["branch"] = sd.branch == Branch::Abs ? "abs" : "complement";
            d["ell"] = sd.ell;
            d["L"] = sd.L;
            d["value"] = ojson::array({dec_down(r.value.lo, 20), dec_up(r.value.hi, 20)});
            auto checks = ojson::array();
            for (const auto& c : sd.checks) checks.push_back({{"name", c.name}, {"ok", c.ok}});
            d["checks"] = checks;
            d["agrees_with_direct"] = r.value.overlaps(direct.value);
            pass = sd.pass() && r.value.overlaps(direct.value);
            j["ostrowski"] = d;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::Depth) throw;
            j["ostrowski"] = {{"unavailable", e.what()}};
        }
    }
    j["pass"] = pass;
    return {j.dump(), pass};
}

Outcome cmd_gaps(const Opts& o) {
    need_format(o, false);
    Real x = Real::parse(one_alpha(o));
    long N = need_N(o);
    if (o.prefix.empty()) throw Error(ErrorKind::Domain, "--prefix d1,d2,... is required");
    DigitPrefix p = parse_prefix(o.prefix);
    auto t = table_for(x, N, p.m() + 4);
    auto mem = enumerate_A(p, t, N);
    auto g = verify_gaps(mem, p, t);
    auto b = count_bounds(mem, p, t, N);
    auto h = harmonic_sum_A(mem, p.n_prime(t), N, t, p.m());
    return {gaps_json(p, t, N, mem, g, b, h), g.pass() && b.pass() && h.ok};
}

Outcome cmd_count(const Opts& o) {
    need_format(o, false);
    Real x = Real::parse(one_alpha(o));
    long N = need_N(o);
    mpq_class eps = parse_q(o.eps, "--eps");
    CountReport r;
    if (o.gamma == "0") {
        r = count_hom(x, eps, N, o.threads);
    } else {
        auto t = table_for(x, N);
        r = count_inhom(x, parse_gamma(o.gamma, t), eps, N, o.threads);
    }
    return {r.to_json(), r.pass()};
}

Gamma gamma_for(const Opts& o, const Real& x, long N) {
    if (o.gamma == "0") return Gamma::zero();
    return parse_gamma(o.gamma, table_for(x, N));
}

Outcome cmd_sum(const Opts& o) {
    need_format(o, true);
    Real x = Real::parse(one_alpha(o));
    if (o.N.empty()) throw Error(ErrorKind::Domain, "--N is required");
    auto Ns = parse_list(o.N, "--N");
    long Nmax = *std::max_element(Ns.begin(), Ns.end());
    Gamma g = gamma_for(o, x, Nmax);
    auto pts = sums_SR(x, g, Ns, o.precision, o.threads);
    if (o.format == "csv") {
        std::string s = "N,S_lo,S_hi,R_lo,R_hi\n";
        for (const auto& p : pts) s += std::to_string(p.N) + "," + enc_csv(p.S) + "," + enc_csv(p.R) + "\n";
        return {s, true};
    }
    ojson j;
    j["schema"] = 1;
    j["kind"] = "sum";
    j["alpha"] = x.str();
    j["gamma"] = g.label();
    j["precision"] = o.precision;
    auto arr = ojson::array();
    for (const auto& p : pts)
        arr.push_back({{"N", p.N},
                       {"S", ojson::array({dec_down(p.S.lo, 20), dec_up(p.S.hi, 20)})},
                       {"R", ojson::array({dec_down(p.R.lo, 20), dec_up(p.R.hi, 20)})}});
    j["points"] = arr;
    return {j.dump(), true};
}

Outcome cmd_split(const Opts& o) {
    need_format(o, false);
    auto r = split_R(Real::parse(one_alpha(o)), need_N(o), o.precision, o.threads);
    return {r.to_json(), r.pass()};
}

Outcome cmd_trim(const Opts& o) {
    need_format(o, false);
    auto r = trimmed_R(Real::parse(one_alpha(o)), need_N(o), parse_q(o.c, "--c"), o.precision, o.threads);
    return {r.to_json(), r.pass()};
}

Outcome cmd_linforms(const Opts& o) {
    need_format(o, false);
    if (o.alpha.empty()) throw Error(ErrorKind::Domain, "at least one --alpha is required");
    if (o.T.empty()) throw Error(ErrorKind::Domain, "--T T1,T2,... is required");
    std::vector<Real> A;
    for (const auto& s : o.alpha) A.push_back(Real::parse(s));
    auto T = parse_list(o.T, "--T");
    std::optional<mpq_class> L;
    if (!o.L.empty()) L = parse_q(o.L, "--L");
    if (o.weight != "none" && o.weight != "product") throw Error(ErrorKind::Domain, "--weight must be none or product");
    if (o.region != "box" && o.region != "orthant") throw Error(ErrorKind::Domain, "--region must be box or orthant");
    auto r = linear_forms_sum(A, T, L, parse_q(o.gamma, "--gamma"), o.weight == "none" ? Weight::None : Weight::Product,
                              o.region == "box" ? Region::Box : Region::Orthant, o.precision);
    return {r.to_json(o.alpha), !r.verdict || r.verdict->ok};
}

Outcome cmd_psi_sum(const Opts& o) {
    need_format(o, true);
    Real x = Real::parse(one_alpha(o));
    if (o.N.empty()) throw Error(ErrorKind::Domain, "--N is required");
    auto Ns = parse_list(o.N, "--N");
    long N = *std::max_element(Ns.begin(), Ns.end());
    if (o.psi.empty()) throw Error(ErrorKind::Domain, "--psi is required");
    auto r = psi_transfer_sums(x, gamma_for(o, x, N), parse_psi(o.psi), N, Ns, std::max<long>(o.precision, 96));
    if (o.format == "csv") {
        std::string s = "N,value_lo,value_hi\n";
        for (const auto& [n, e] : r.partials) s += std::to_string(n) + "," + enc_csv(e) + "\n";
        return {s, r.agree};
    }
    return {r.to_json(), r.agree};
}

Outcome cmd_t5(const Opts& o) {
    need_format(o, false);
    std::vector<int> eps;
    for (char ch : o.eps_bits) {
        if (ch != '0' && ch != '1') throw Error(ErrorKind::Parse, "--eps-bits must be a 0/1 string");
        eps.push_back(ch - '0');
    }
    auto plan = adversarial_gamma_T5(Real::parse(one_alpha(o)), parse_growth(o.f), eps, o.count);
    return {plan.to_json(), plan.pass()};
}

Outcome cmd_t8(const Opts& o) {
    need_format(o, false);
    std::vector<long> K;
    if (!o.K.empty()) K = parse_list(o.K, "--K");
    long maxN = o.N.empty() ? 2000000 : need_N(o);
    auto c = adversarial_gamma_T8(Real::parse(one_alpha(o)), K, maxN, o.precision, o.threads);
    return {c.to_json(), c.pass()};
}

Outcome cmd_liouville(const Opts& o) {
    need_format(o, false);
    auto s = build_liouville_alpha(o.rule, o.depth, o.stream_prefix);
    return {s.to_json(), true};
}

Outcome cmd_fiber(const Opts& o) {
    need_format(o, true);
    Real x = Real::parse(one_alpha(o));
    long N = need_N(o);
    if (o.psi.empty()) throw Error(ErrorKind::Domain, "--psi is required");
    auto psi = parse_psi(o.psi);
    auto betas = o.beta;
    if (o.sample > 0) {
        auto s = sample_betas(o.sample);
        betas.insert(betas.end(), s.begin(), s.end());
    }
    if (betas.empty()) throw Error(ErrorKind::Domain, "give --beta or --sample");
    auto recs = fiber_hit_scan(x, psi, betas, N, o.threads);
    if (o.format == "csv") return {hits_csv(recs), true};
    return {hits_json(x.str(), psi, N, recs), true};
}

Outcome cmd_verify(const Opts& o) {
    need_format(o, false);
    auto r = verify_all(Real::parse(one_alpha(o)), need_N(o), std::min<long>(o.precision, 24), o.threads);
    return {r.to_json(), r.pass()};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Certified continued-fraction, Ostrowski and reciprocal-sum computations.\n"
                 "Reports are JSON (\"schema\": 1) unless --format csv is accepted by the command.\n"
                 "Exit status: 0 all verdicts pass, 1 some verdict fails, 2 usage or domain error.\n"
                 "DIOPH_PRECISION_CAP overrides the refinement cap in bits (default 4096)."};
    app.require_subcommand(1);
    Opts o;
    Outcome (*run)(const Opts&) = nullptr;

    auto common = [&](CLI::App* s, Outcome (*f)(const Opts&)) {
        s->add_option("--alpha", o.alpha, "real spec: golden | e | surd:(A+B*sqrtD)/C | quotients:[a0;a1,...] | "
                                          "periodic:[a0;pre|period] | interval:LO,HI | liouville:RULE[:[a0;a1,...]]");
        s->add_option("--format", o.format, "json | csv");
        s->add_option("--out", o.out, "output file (default stdout)");
        s->add_option("--threads", o.threads, "worker threads")->check(CLI::Range(1, 256));
        s->add_option("--precision", o.precision, "target precision in bits")->check(CLI::Range(8, 4096));
        s->callback([&run, f] { run = f; });
        return s;
    };
    auto gam = [&](CLI::App* s) { s->add_option("--gamma", o.gamma, "gamma spec: 0 | P/Q | D:k | digits:[b1,...] | real spec"); };

    auto cf = common(app.add_subcommand("cf", "convergent table; CSV columns k,a_k,p_k,q_k,sign_Dk,absDk_lo,absDk_hi,A_k"), cmd_cf);
    cf->add_option("--depth", o.depth, "last row k")->check(CLI::Range(1, 100000));

    auto os = common(app.add_subcommand("ostrowski", "Ostrowski digits of an integer (--N) or of gamma (--gamma)"), cmd_ostrowski);
    os->add_option("--N", o.N, "integer to expand");
    os->add_option("--depth", o.depth, "digit depth for real expansions");
    gam(os);

    auto nm = common(app.add_subcommand("norm", "||n alpha - gamma|| by the direct and the digit route; --job gives "
                                               "batch CSV n,value_lo,value_hi,m,branch,ell,L"),
                     cmd_norm);
    nm->add_option("--N", o.N, "the index n");
    nm->add_option("--job", o.job, "JSON job file for batch evaluation");
    gam(nm);

    auto gp = common(app.add_subcommand("gaps", "members and gap structure of A(d_1,...,d_{m+1}) up to N"), cmd_gaps);
    gp->add_option("--N", o.N, "range bound");
    gp->add_option("--prefix", o.prefix, "digit prefix d1,d2,...");

    auto ct = common(app.add_subcommand("count", "#{n <= N : ||n alpha - gamma|| < eps} with bound checks"), cmd_count);
    ct->add_option("--N", o.N, "range bound");
    ct->add_option("--eps", o.eps, "threshold P/Q");
    gam(ct);

    auto sm = common(app.add_subcommand("sum", "S_N and R_N; --N accepts a comma list; CSV columns N,S_lo,S_hi,R_lo,R_hi"), cmd_sum);
    sm->add_option("--N", o.N, "N or N1,N2,...");
    gam(sm);

    auto sp = common(app.add_subcommand("split", "residue-class split of R_N(alpha, 0) with explicit bounds"), cmd_split);
    sp->add_option("--N", o.N, "range bound");

    auto tr = common(app.add_subcommand("trim", "trimmed residue sum of min{cN, 1/||n alpha||}"), cmd_trim);
    tr->add_option("--N", o.N, "range bound");
    tr->add_option("--c", o.c, "trim constant P/Q");

    auto lf = common(app.add_subcommand("linforms", "sums of min{L, ||q.A - gamma||^-1} over a box or orthant"), cmd_linforms);
    lf->add_option("--T", o.T, "box sizes T1,T2,...");
    lf->add_option("--L", o.L, "cap L (omit for no cap)");
    lf->add_option("--weight", o.weight, "none | product");
    lf->add_option("--region", o.region, "box | orthant");
    gam(lf);

    auto ps = common(app.add_subcommand("psi-sum", "sum of psi(n)/||n alpha - gamma|| three ways; CSV columns N,value_lo,value_hi"),
                     cmd_psi_sum);
    ps->add_option("--N", o.N, "N or checkpoints N1,N2,...");
    ps->add_option("--psi", o.psi, "C/n | n^-TAU | nlog:A,S[,B,T] for 1/(n log^A(n+S) loglog^B(n+T)) | zero");
    gam(ps);

    auto t5 = common(app.add_subcommand("construct-t5", "spike gamma plan"), cmd_t5);
    t5->add_option("--f", o.f, "growth function sqrt | pow:P/Q");
    t5->add_option("--eps-bits", o.eps_bits, "parity bits, cycled");
    t5->add_option("--count", o.count, "number of indices")->check(CLI::Range(1, 12));

    auto t8 = common(app.add_subcommand("construct-t8", "Liouville-paired gamma and checkpoints"), cmd_t8);
    t8->add_option("--K", o.K, "checkpoint indices (default: every k >= 2 with a_{k+1} >= 8)");
    t8->add_option("--N", o.N, "largest checkpoint N to evaluate");

    auto lv = common(app.add_subcommand("liouville", "Liouville-type quotient stream and its exponent"), cmd_liouville);
    lv->add_option("--rule", o.rule, "qk | q^E | one");
    lv->add_option("--depth", o.depth, "stream depth");
    lv->add_option("--prefix", o.stream_prefix, "quotient prefix [a0;a1,...]");

    auto fs = common(app.add_subcommand("fiber-scan", "n <= N with ||n alpha|| ||n beta|| < psi(n); CSV columns "
                                                     "beta,n,product_hi,psi_n_lo,trivial"),
                     cmd_fiber);
    fs->add_option("--N", o.N, "range bound");
    fs->add_option("--psi", o.psi, "psi spec");
    fs->add_option("--beta", o.beta, "beta spec (repeatable)");
    fs->add_option("--sample", o.sample, "add this many deterministic sampled betas");

    auto va = common(app.add_subcommand("verify-all", "every applicable certified inequality at (alpha, N)"), cmd_verify);
    va->add_option("--N", o.N, "range bound");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    }

    try {
        Outcome r = run(o);
        if (!r.text.empty() && r.text.back() != '\n') r.text += '\n';
        if (o.out.empty()) {
            std::cout << r.text;
        } else {
            std::ofstream f(o.out, std::ios::binary);
            if (!f) {
                std::cerr << "error: cannot write " << o.out << "\n";
                return 2;
            }
            f << r.text;
        }
        return r.pass ? 0 : 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
