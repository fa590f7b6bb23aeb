#include "dioph/ostrowski.hpp"

#include <json.hpp>

#include "dioph/error.hpp"

namespace dioph {

namespace {

mpq_class pow2q(long bits) {
    mpq_class r(1);
    r /= mpq_class(mpz_class(1) << static_cast<unsigned long>(bits));
    return r;
}

Lin lin_add(const Lin& a, const Affine& f) { return {a.f + f, a.g}; }

}  // namespace

Lin LinEval::gamma_lin(const mpz_class& shift) const {
    return {gamma_.form() + Affine{0, mpq_class(shift)}, gamma_.is_exact() ? 0 : 1};
}

Enclosure LinEval::rest(long bits) const {
    if (gamma_.general()) return gamma_.general()->enclose(bits);
    return {-gamma_.radius(), gamma_.radius()};
}

Enclosure LinEval::enclose(const Lin& y, long bits) const {
    Enclosure e = alpha_.enclose(y.f, bits + 2);
    if (is_exact(y)) return e;
    Enclosure r = rest(bits + 2 + bitlen(mpz_class(std::abs(y.g))));
    mpq_class g(y.g);
    if (y.g > 0) return {e.lo + g * r.lo, e.hi + g * r.hi};
    return {e.lo + g * r.hi, e.hi + g * r.lo};
}

int LinEval::sign(const Lin& y) const {
    if (is_exact(y)) return alpha_.sign(y.f);
    for (long bits = 64; bits <= precision_cap(); bits *= 2) {
        Enclosure e = enclose(y, bits);
        if (e.lo > 0) return 1;
        if (e.hi < 0) return -1;
    }
    throw Error(ErrorKind::Precision, "sign undecided at precision cap for gamma " + gamma_.label());
}

Gamma Gamma::affine(Affine f, std::string label, mpq_class radius) {
    Gamma g;
    g.form_ = std::move(f);
    g.radius_ = std::move(radius);
    g.label_ = std::move(label);
    return g;
}

Gamma Gamma::real(const Real& r) {
    Gamma g;
    g.real_ = r;
    g.label_ = r.str();
    return g;
}

Enclosure Gamma::enclose(const Real& alpha, long bits) const {
    if (real_) return real_->enclose(bits);
    Enclosure e = alpha.enclose(form_, bits);
    return {e.lo - radius_, e.hi + radius_};
}

Gamma gamma_from_digits(const DigitMap& b, const ConvergentTable& t, const std::string& label) {
    Affine f{0, 0};
    for (const auto& [k, v] : b) f += t.D(k) * mpq_class(v);
    return Gamma::affine(f, label);
}

Gamma parse_gamma(const std::string& text, const ConvergentTable& t) {
    if (text.empty() || text == "0") return Gamma::zero();
    if (text.rfind("D:", 0) == 0) {
        long k = std::stol(text.substr(2));
        return Gamma::affine(t.D(k), text);
    }
    if (text.rfind("digits:[", 0) == 0 && text.back() == ']') {
        std::string body = text.substr(8, text.size() - 9);
        DigitMap b;
        long k = 0;
        size_t start = 0;
        while (start <= body.size() && !body.empty()) {
            auto pos = body.find(',', start);
            std::string tok = body.substr(start, pos == std::string::npos ? std::string::npos : pos - start);
            mpz_class v;
            if (v.set_str(tok, 10) != 0) throw Error(ErrorKind::Parse, "bad digit '" + tok + "' in gamma " + text);
            if (v != 0) b[k] = v;
            ++k;
            if (pos == std::string::npos) break;
            start = pos + 1;
        }
        DigitVerdict ok = validate_digits(b, t, false);
        if (!ok.valid)
            throw Error(ErrorKind::Validation, "gamma digits violate " + ok.rule + " at k=" + std::to_string(ok.k));
        return gamma_from_digits(b, t, text);
    }
    bool rational_text = !text.empty() && text.find_first_not_of("-+0123456789/") == std::string::npos;
    if (rational_text) {
        mpq_class r;
        if (r.set_str(text, 10) != 0 || r.get_den() == 0) throw Error(ErrorKind::Parse, "bad rational gamma '" + text + "'");
        r.canonicalize();
        return Gamma::affine({0, r}, text);
    }
    Real g(parse_real(text));
    if (auto r = g.rational_value()) return Gamma::affine({0, *r}, text);
    auto as = t.alpha().surd();
    auto gs = g.surd();
    if (as && gs && as->d() == gs->d()) {
        // sqrt d = (c' alpha - a') / b', substituted into (a + b sqrt d) / c
        mpq_class u(gs->b() * as->c(), as->b() * gs->c());
        mpq_class v = (mpq_class(gs->a()) - mpq_class(gs->b() * as->a(), as->b())) / mpq_class(gs->c());
        u.canonicalize();
        return Gamma::affine({u, v}, text);
    }
    return Gamma::real(g);
}

mpz_class OstrowskiInt::c(long k) const {
    auto it = digits.find(k);
    return it == digits.end() ? mpz_class(0) : it->second;
}

mpz_class OstrowskiReal::b(long k) const {
    auto it = digits.find(k);
    return it == digits.end() ? mpz_class(0) : it->second;
}

mpz_class DeltaDigits::d(long k) const {
    auto it = delta.find(k);
    return it == delta.end() ? mpz_class(0) : it->second;
}

OstrowskiInt expand_int(const ConvergentTable& t, const mpz_class& n) {
    if (n <= 0) throw Error(ErrorKind::Domain, "Ostrowski expansion needs n >= 1, got " + n.get_str());
    OstrowskiInt out;
    out.n = n;
    out.K = K_of(t, n);
    mpz_class r = n;
    for (long k = out.K; k >= 0 && r > 0; --k) {
        mpz_class c = r / t.q(k);
        if (c != 0) {
            out.digits[k] = c;
            r -= c * t.q(k);
        }
    }
    return out;
}

DigitVerdict validate_digits(const DigitMap& digits, const ConvergentTable& t, bool integer_case) {
    DigitVerdict v;
    auto fail = [&](long k, const std::string& rule) {
        if (v.valid) {
            v.valid = false;
            v.k = k;
            v.rule = rule;
        }
    };
    for (const auto& [k, c] : digits) {
        if (k < 0) {
            fail(k, "negative index");
            continue;
        }
        if (c < 0) fail(k, "negative digit");
        if (k + 1 > t.quotient_depth()) {
            fail(k, "index beyond table depth");
            continue;
        }
        const mpz_class& a = t.a(k + 1);
        if (k == 0 && c >= a) fail(k, "first digit must be below a_1");
        if (k >= 1 && c > a) fail(k, "digit exceeds partial quotient");
        if (k >= 1 && c == a) {
            auto prev = digits.find(k - 1);
            if (prev != digits.end() && prev->second != 0) fail(k - 1, "digit below a full digit must vanish");
        }
    }
    if (integer_case && v.valid) {
        mpz_class n = 0;
        for (const auto& [k, c] : digits) n += c * t.q(k);
        if (n <= 0) {
            fail(0, "empty expansion");
        } else {
            long K = K_of(t, n);
            for (const auto& [k, c] : digits)
                if (k > K && c != 0) fail(k, "digit above the top index");
        }
    }
    return v;
}

mpz_class reconstruct_int(const OstrowskiInt& d, const ConvergentTable& t) {
    DigitVerdict v = validate_digits(d.digits, t, true);
    if (!v.valid) throw Error(ErrorKind::Validation, "invalid digits: " + v.rule + " at k=" + std::to_string(v.k));
    mpz_class n = 0;
    for (const auto& [k, c] : d.digits) n += c * t.q(k);
    return n;
}

OstrowskiReal expand_real(const ConvergentTable& t, const Gamma& gamma, long depth) {
    if (depth < 1) throw Error(ErrorKind::Domain, "expansion depth must be positive");
    if (depth > t.depth())
        throw Error(ErrorKind::Depth, "expansion depth " + std::to_string(depth) + " exceeds table depth", t.depth());
    LinEval ev(t.alpha(), gamma);
    const Affine frac = t.absD(0);
    OstrowskiReal out;
    out.depth = depth;
    out.gamma = gamma;

    // Normalize into [-{alpha}, 1 - {alpha}) by an integer shift.
    Lin z = ev.gamma_lin() + lin(frac);
    Enclosure ez = ev.enclose(z, 64);
    mpz_class s = -floor_q(ez.lo);
    while (ev.sign(lin_add(z, {0, mpq_class(s)})) < 0) ++s;
    while (ev.sign(lin_add(z, {0, mpq_class(s - 1)})) >= 0) --s;
    out.shift = s;
    Lin y = ev.gamma_lin(s);
    out.boundary = ev.sign(lin_add(z, {0, mpq_class(s)})) == 0;

    for (long k = 0; k < depth; ++k) {
        if (ev.is_exact(y) && y.f.is_zero()) {
            out.finite = true;
            break;
        }
        const Affine Dk = t.absD(k), Dk1 = t.absD(k + 1);
        // smallest b >= 0 with b|D_k| - y + |D_{k+1}| >= 0
        Enclosure ey = ev.enclose(y, 64);
        Enclosure ek = t.absD_enclosure(k, 64 + 2 * bitlen(t.q(k + 1)));
        Enclosure ek1 = t.absD_enclosure(k + 1, 64 + 2 * bitlen(t.q(k + 1)));
        mpz_class b = ek.lo > 0 ? ceil_q((ey.lo - ek1.hi) / ek.hi) : mpz_class(0);
        if (b < 0) b = 0;
        auto slack = [&](const mpz_class& bb) {
            Lin w{Dk * mpq_class(bb) + Dk1 - y.f, -y.g};
            return ev.sign(w);
        };
        while (slack(b) < 0) ++b;
        while (b > 0 && slack(b - 1) >= 0) --b;
        const mpz_class& a = t.a(k + 1);
        bool restricted = k == 0 || out.b(k - 1) > 0;
        if (b > a || (restricted && b >= a))
            throw Error(ErrorKind::Internal, "Ostrowski digit out of range at k=" + std::to_string(k));
        if (b != 0) out.digits[k] = b;
        y = Lin{Dk * mpq_class(b) - y.f, -y.g};
    }
    if (!out.finite && ev.is_exact(y) && y.f.is_zero()) out.finite = true;

    long bits = 64 + 2 * bitlen(t.q(depth));
    Enclosure r = ev.enclose(y, bits);
    mpq_class alo = abs(r.lo), ahi = abs(r.hi);
    mpq_class hi = alo > ahi ? alo : ahi;
    mpq_class lo = (r.lo > 0 || r.hi < 0) ? (alo < ahi ? alo : ahi) : mpq_class(0);
    out.defect = {lo, hi};
    Enclosure bound = t.alpha().enclose(t.absD(depth - 1) + t.absD(depth), bits);
    if (out.defect.hi > bound.hi + 2 * gamma.radius() + pow2q(bits - 4))
        throw Error(ErrorKind::Internal, "resummation defect exceeds the tail bound");
    return out;
}

DeltaDigits delta_of(const OstrowskiInt& c, const OstrowskiReal& b) {
    if (!b.finite && b.depth <= c.K + 1)
        throw Error(ErrorKind::Depth, "real expansion depth " + std::to_string(b.depth) + " does not cover top index " +
                                          std::to_string(c.K),
                    b.depth);
    DeltaDigits d;
    d.finite = b.finite;
    long top = b.finite ? std::max(c.K + 1, b.digits.empty() ? 0L : b.digits.rbegin()->first + 1) : b.depth;
    d.depth = top;
    for (long k = 0; k < top; ++k) {
        mpz_class v = c.c(k) - b.b(k);
        if (v != 0) {
            d.delta[k] = v;
            if (!d.m) d.m = k;
        }
    }
    return d;
}

int compare_reverse_lex(const DigitMap& x, const DigitMap& y) {
    auto ix = x.rbegin(), iy = y.rbegin();
    while (true) {
        bool ex = ix == x.rend(), ey = iy == y.rend();
        if (ex && ey) return 0;
        long kx = ex ? -1 : ix->first, ky = ey ? -1 : iy->first;
        if (kx != ky) return kx > ky ? 1 : -1;
        int c = cmp(ix->second, iy->second);
        if (c != 0) return c > 0 ? 1 : -1;
        ++ix;
        ++iy;
    }
}

std::string to_json(const OstrowskiInt& d, const ConvergentTable& t) {
    nlohmann::ordered_json j;
    j["schema"] = 1;
    j["alpha"] = t.alpha().str();
    j["n"] = d.n.get_str();
    j["K"] = d.K;
    auto arr = nlohmann::ordered_json::array();
    for (const auto& [k, c] : d.digits) arr.push_back({k, c.get_str()});
    j["digits"] = arr;
    return j.dump();
}

std::string to_json(const OstrowskiReal& d, const ConvergentTable& t) {
    nlohmann::ordered_json j;
    j["schema"] = 1;
    j["alpha"] = t.alpha().str();
    j["shift"] = d.shift.get_str();
    j["depth"] = d.depth;
    j["finite"] = d.finite;
    j["boundary"] = d.boundary;
    auto arr = nlohmann::ordered_json::array();
    for (const auto& [k, c] : d.digits) arr.push_back({k, c.get_str()});
    j["digits"] = arr;
    j["defect_hi"] = dec_up(d.defect.hi);
    return j.dump();
}

}  // namespace dioph
