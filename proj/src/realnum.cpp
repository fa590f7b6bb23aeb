#include "dioph/realnum.hpp"

#include <cctype>
#include <mutex>

#include "dioph/error.hpp"

namespace dioph {

namespace {

[[noreturn]] void parse_fail(const std::string& text, const std::string& token) {
    throw Error(ErrorKind::Parse, "cannot parse real spec '" + text + "' at token '" + token + "'");
}

bool parse_int(const std::string& s, mpz_class& out) {
    if (s.empty()) return false;
    size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) return false;
    for (size_t j = i; j < s.size(); ++j)
        if (!std::isdigit(static_cast<unsigned char>(s[j]))) return false;
    out.set_str(s[0] == '+' ? s.substr(1) : s, 10);
    return true;
}

bool parse_rational(const std::string& s, mpq_class& out) {
    auto slash = s.find('/');
    mpz_class num, den(1);
    if (slash == std::string::npos) {
        if (!parse_int(s, num)) return false;
    } else {
        if (!parse_int(s.substr(0, slash), num) || !parse_int(s.substr(slash + 1), den) || den == 0) return false;
    }
    out = mpq_class(num, den);
    out.canonicalize();
    return true;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    size_t start = 0;
    while (true) {
        auto pos = s.find(sep, start);
        out.push_back(s.substr(start, pos - start));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

std::vector<mpz_class> parse_list(const std::string& text, const std::string& body, bool positive) {
    std::vector<mpz_class> out;
    if (body.empty()) return out;
    for (const auto& tok : split(body, ',')) {
        mpz_class v;
        if (!parse_int(tok, v)) parse_fail(text, tok);
        if (positive && v < 1) throw Error(ErrorKind::Domain, "partial quotient " + tok + " must be >= 1");
        out.push_back(v);
    }
    return out;
}

// "[a0;rest]" → (a0, rest)
std::pair<mpz_class, std::string> parse_bracket(const std::string& text, const std::string& body) {
    if (body.size() < 2 || body.front() != '[' || body.back() != ']') parse_fail(text, body);
    std::string inner = body.substr(1, body.size() - 2);
    auto semi = inner.find(';');
    std::string head = semi == std::string::npos ? inner : inner.substr(0, semi);
    mpz_class a0;
    if (!parse_int(head, a0)) parse_fail(text, head);
    return {a0, semi == std::string::npos ? std::string() : inner.substr(semi + 1)};
}

RealSpec parse_surd(const std::string& text, const std::string& body) {
    // (A+B*sqrtD)/C
    auto close = body.find(")/");
    if (body.empty() || body[0] != '(' || close == std::string::npos) parse_fail(text, body);
    std::string inner = body.substr(1, close - 1);
    std::string cstr = body.substr(close + 2);
    size_t star = inner.find("*sqrt");
    if (star == std::string::npos) parse_fail(text, inner);
    std::string left = inner.substr(0, star);
    std::string dstr = inner.substr(star + 5);
    // split left at the last sign that is not the leading one
    size_t op = std::string::npos;
    for (size_t i = 1; i < left.size(); ++i)
        if (left[i] == '+' || left[i] == '-') op = i;
    if (op == std::string::npos) parse_fail(text, left);
    std::string astr = left.substr(0, op);
    std::string bstr = left.substr(op);
    RealSpec s;
    s.kind = RealSpec::Kind::QuadraticSurd;
    if (!parse_int(astr, s.a)) parse_fail(text, astr);
    if (!parse_int(bstr, s.b)) parse_fail(text, bstr);
    if (!parse_int(dstr, s.d)) parse_fail(text, dstr);
    if (!parse_int(cstr, s.c)) parse_fail(text, cstr);
    if (s.c == 0) throw Error(ErrorKind::Domain, "surd denominator is zero");
    if (s.d <= 0 || is_square(s.d)) throw Error(ErrorKind::Domain, "radicand " + dstr + " is a perfect square or not positive");
    if (s.b == 0) throw Error(ErrorKind::Domain, "surd coefficient of sqrt is zero");
    return s;
}

std::string join(const std::vector<mpz_class>& v, size_t from = 0) {
    std::string s;
    for (size_t i = from; i < v.size(); ++i) {
        if (i > from) s += ",";
        s += v[i].get_str();
    }
    return s;
}

}  // namespace

RealSpec parse_real(const std::string& text) {
    std::string t;
    for (char ch : text)
        if (!std::isspace(static_cast<unsigned char>(ch))) t += ch;
    if (t == "golden") return surd_spec(1, 1, 5, 2);
    if (t == "e") {
        RealSpec s;
        s.kind = RealSpec::Kind::RuleStream;
        s.rule = "e";
        return s;
    }
    auto colon = t.find(':');
    if (colon == std::string::npos) parse_fail(text, t);
    std::string head = t.substr(0, colon);
    std::string body = t.substr(colon + 1);
    if (head == "surd" || head == "sqrt") return parse_surd(text, body);
    if (head == "quotients") {
        auto [a0, rest] = parse_bracket(text, body);
        RealSpec s;
        s.kind = RealSpec::Kind::ExplicitQuotients;
        s.a0 = a0;
        s.tail = parse_list(text, rest, true);
        return s;
    }
    if (head == "periodic") {
        auto [a0, rest] = parse_bracket(text, body);
        auto bar = rest.find('|');
        if (bar == std::string::npos) parse_fail(text, rest);
        RealSpec s;
        s.kind = RealSpec::Kind::PeriodicQuotients;
        s.a0 = a0;
        s.tail = parse_list(text, rest.substr(0, bar), true);
        s.period = parse_list(text, rest.substr(bar + 1), true);
        if (s.period.empty()) throw Error(ErrorKind::Domain, "periodic spec needs a nonempty period");
        return s;
    }
    if (head == "interval") {
        auto parts = split(body, ',');
        if (parts.size() != 2) parse_fail(text, body);
        RealSpec s;
        s.kind = RealSpec::Kind::LiteralEnclosure;
        if (!parse_rational(parts[0], s.lo)) parse_fail(text, parts[0]);
        if (!parse_rational(parts[1], s.hi)) parse_fail(text, parts[1]);
        if (s.lo > s.hi) throw Error(ErrorKind::Domain, "interval with LO > HI");
        return s;
    }
    if (head == "liouville") {
        // liouville:RULE[:[a0;a1,...]] with RULE one of qk, q^E, one
        auto c2 = body.find(':');
        std::string rule = body.substr(0, c2);
        RealSpec s;
        s.kind = RealSpec::Kind::RuleStream;
        if (rule == "qk") {
            s.rule = "liouville-qk";
        } else if (rule == "one") {
            s.rule = "liouville-one";
        } else if (rule.rfind("q^", 0) == 0) {
            mpz_class e;
            if (!parse_int(rule.substr(2), e) || e < 1) parse_fail(text, rule);
            s.rule = "liouville-qpow";
            s.exponent = e.get_si();
        } else {
            parse_fail(text, rule);
        }
        if (c2 == std::string::npos) {
            s.prefix = {0, 1};
        } else {
            auto [a0, rest] = parse_bracket(text, body.substr(c2 + 1));
            s.prefix = {a0};
            for (auto& v : parse_list(text, rest, true)) s.prefix.push_back(v);
        }
        return s;
    }
    parse_fail(text, head);
}

std::string to_string(const RealSpec& s) {
    switch (s.kind) {
        case RealSpec::Kind::QuadraticSurd:
            if (s.a == 1 && s.b == 1 && s.d == 5 && s.c == 2) return "golden";
            return "surd:(" + s.a.get_str() + (s.b < 0 ? "-" : "+") + mpz_class(abs(s.b)).get_str() + "*sqrt" +
                   s.d.get_str() + ")/" + s.c.get_str();
        case RealSpec::Kind::ExplicitQuotients:
            return "quotients:[" + s.a0.get_str() + (s.tail.empty() ? "" : ";" + join(s.tail)) + "]";
        case RealSpec::Kind::PeriodicQuotients:
            return "periodic:[" + s.a0.get_str() + ";" + join(s.tail) + "|" + join(s.period) + "]";
        case RealSpec::Kind::RuleStream: {
            if (s.rule == "e") return "e";
            std::string r = s.rule == "liouville-qk" ? "qk"
                            : s.rule == "liouville-one" ? "one"
                                                        : "q^" + std::to_string(s.exponent);
            std::string pre = "[" + s.prefix[0].get_str() + (s.prefix.size() > 1 ? ";" + join(s.prefix, 1) : "") + "]";
            return "liouville:" + r + ":" + pre;
        }
        case RealSpec::Kind::LiteralEnclosure:
            return "interval:" + s.lo.get_str() + "," + s.hi.get_str();
    }
    return "?";
}

RealSpec surd_spec(long a, long b, long d, long c) {
    RealSpec s;
    s.kind = RealSpec::Kind::QuadraticSurd;
    s.a = a;
    s.b = b;
    s.d = d;
    s.c = c;
    if (c == 0 || d <= 0 || is_square(s.d) || b == 0) throw Error(ErrorKind::Domain, "invalid surd coefficients");
    return s;
}

RealSpec quotients_spec(const std::vector<long>& a) {
    RealSpec s;
    s.kind = RealSpec::Kind::ExplicitQuotients;
    s.a0 = a.at(0);
    for (size_t i = 1; i < a.size(); ++i) {
        if (a[i] < 1) throw Error(ErrorKind::Domain, "partial quotient must be >= 1");
        s.tail.emplace_back(a[i]);
    }
    return s;
}

RealSpec periodic_spec(long a0, const std::vector<long>& pre, const std::vector<long>& period) {
    RealSpec s;
    s.kind = RealSpec::Kind::PeriodicQuotients;
    s.a0 = a0;
    for (long v : pre) s.tail.emplace_back(v);
    for (long v : period) s.period.emplace_back(v);
    if (s.period.empty()) throw Error(ErrorKind::Domain, "periodic spec needs a nonempty period");
    return s;
}

// ---------------------------------------------------------------------------

struct Real::Impl {
    RealSpec spec;
    std::mutex mu;
    std::vector<mpz_class> a, p, q;
    bool exhausted = false;
    bool rational = false;
    std::optional<mpq_class> rat_value;
    std::optional<QuadSurd> surd;
    std::optional<QuadSurd> surd_state;  // complete quotient of a surd
    mpq_class rat_state;                 // complete quotient of a rational
    mpq_class lit_lo, lit_hi;            // complete quotients of a literal interval's endpoints

    void push(const mpz_class& ak) {
        size_t k = a.size();
        a.push_back(ak);
        if (k == 0) {
            p.push_back(ak);
            q.push_back(1);
        } else {
            mpz_class pm = k == 1 ? mpz_class(1) : p[k - 2];
            mpz_class qm = k == 1 ? mpz_class(0) : q[k - 2];
            p.push_back(ak * p[k - 1] + pm);
            q.push_back(ak * q[k - 1] + qm);
        }
    }

    // Appends one quotient; returns false once the source has nothing more.
    bool step() {
        if (exhausted) return false;
        const size_t i = a.size();
        if (rational) {
            mpz_class f = floor_q(rat_state);
            push(f);
            mpq_class r = rat_state - f;
            if (r == 0)
                exhausted = true;
            else
                rat_state = 1 / r;
            return true;
        }
        switch (spec.kind) {
            case RealSpec::Kind::QuadraticSurd: {
                mpz_class f = surd_state->floor();
                push(f);
                surd_state = (*surd_state - mpq_class(f)).reciprocal();
                return true;
            }
            case RealSpec::Kind::ExplicitQuotients:
                if (i == 0) {
                    push(spec.a0);
                    return true;
                }
                if (i - 1 < spec.tail.size()) {
                    push(spec.tail[i - 1]);
                    return true;
                }
                exhausted = true;
                return false;
            case RealSpec::Kind::PeriodicQuotients:
                if (i == 0)
                    push(spec.a0);
                else if (i - 1 < spec.tail.size())
                    push(spec.tail[i - 1]);
                else
                    push(spec.period[(i - 1 - spec.tail.size()) % spec.period.size()]);
                return true;
            case RealSpec::Kind::RuleStream: {
                if (spec.rule == "e") {
                    if (i == 0)
                        push(2);
                    else
                        push(i % 3 == 2 ? mpz_class(2 * (static_cast<long>(i) + 1) / 3) : mpz_class(1));
                    return true;
                }
                mpz_class ak;
                if (i < spec.prefix.size()) {
                    ak = spec.prefix[i];
                } else {
                    const mpz_class& qk = q[i - 1];
                    long e = spec.rule == "liouville-qk" ? static_cast<long>(i - 1)
                             : spec.rule == "liouville-qpow" ? spec.exponent
                                                             : 0;
                    if (e == 0) {
                        ak = 1;
                    } else {
                        if (bitlen(qk) * e > spec.budget_bits + 64) {
                            exhausted = true;
                            return false;
                        }
                        mpz_pow_ui(ak.get_mpz_t(), qk.get_mpz_t(), static_cast<unsigned long>(e));
                        if (ak < 1) ak = 1;
                    }
                }
                mpz_class qnext = i == 0 ? mpz_class(1) : ak * q[i - 1] + (i == 1 ? mpz_class(0) : q[i - 2]);
                if (bitlen(qnext) > spec.budget_bits) {
                    exhausted = true;
                    return false;
                }
                push(ak);
                return true;
            }
            case RealSpec::Kind::LiteralEnclosure: {
                mpz_class f1 = floor_q(lit_lo), f2 = floor_q(lit_hi);
                if (f1 != f2 || lit_lo == mpq_class(f1) || lit_hi == mpq_class(f2)) {
                    exhausted = true;
                    return false;
                }
                push(f1);
                lit_lo = 1 / (lit_lo - f1);
                lit_hi = 1 / (lit_hi - f2);
                return true;
            }
        }
        return false;
    }

    bool ensure(long k) {
        while (static_cast<long>(a.size()) <= k)
            if (!step()) return false;
        return true;
    }
};

Real::Real(const RealSpec& spec) : impl_(std::make_shared<Impl>()) {
    impl_->spec = spec;
    switch (spec.kind) {
        case RealSpec::Kind::QuadraticSurd:
            impl_->surd = QuadSurd(spec.a, spec.b, spec.d, spec.c);
            if (impl_->surd->is_rational()) throw Error(ErrorKind::Domain, "surd with zero sqrt coefficient");
            impl_->surd_state = impl_->surd;
            break;
        case RealSpec::Kind::ExplicitQuotients:
            if (spec.tail.empty()) {
                impl_->rational = true;
                impl_->rat_value = mpq_class(spec.a0);
                impl_->rat_state = mpq_class(spec.a0);
            }
            break;
        case RealSpec::Kind::LiteralEnclosure:
            if (spec.lo == spec.hi) {
                impl_->rational = true;
                impl_->rat_value = spec.lo;
                impl_->rat_state = spec.lo;
            }
            impl_->lit_lo = spec.lo;
            impl_->lit_hi = spec.hi;
            break;
        default:
            break;
    }
}

Real Real::rational(const mpq_class& v) {
    RealSpec s;
    s.kind = RealSpec::Kind::LiteralEnclosure;
    s.lo = v;
    s.hi = v;
    return Real(s);
}

const RealSpec& Real::spec() const { return impl_->spec; }
bool Real::is_rational() const { return impl_->rational; }
std::optional<mpq_class> Real::rational_value() const { return impl_->rat_value; }
std::optional<QuadSurd> Real::surd() const { return impl_->surd; }

bool Real::is_stream() const {
    auto k = impl_->spec.kind;
    return !impl_->rational && (k == RealSpec::Kind::ExplicitQuotients || k == RealSpec::Kind::PeriodicQuotients ||
                                k == RealSpec::Kind::RuleStream);
}

bool Real::has_quotient(long k) const {
    if (k < 0) return false;
    std::lock_guard<std::mutex> lock(impl_->mu);
    return impl_->ensure(k);
}

mpz_class Real::quotient(long k) const {
    if (k < 0) throw Error(ErrorKind::Domain, "negative quotient index");
    std::lock_guard<std::mutex> lock(impl_->mu);
    if (!impl_->ensure(k))
        throw Error(ErrorKind::Depth, "insufficient stream depth for " + to_string(impl_->spec) + ": a_" +
                                          std::to_string(k) + " unavailable",
                    static_cast<long>(impl_->a.size()) - 1);
    return impl_->a[k];
}

mpz_class Real::p(long k) const {
    if (k == -1) return 1;
    quotient(k);
    std::lock_guard<std::mutex> lock(impl_->mu);
    return impl_->p[k];
}

mpz_class Real::q(long k) const {
    if (k == -1) return 0;
    quotient(k);
    std::lock_guard<std::mutex> lock(impl_->mu);
    return impl_->q[k];
}

Enclosure Real::sandwich(long k) const {
    if (is_rational()) return {*impl_->rat_value, *impl_->rat_value};
    mpq_class x(p(k), q(k)), y(p(k + 1), q(k + 1));
    x.canonicalize();
    y.canonicalize();
    return x < y ? Enclosure{x, y} : Enclosure{y, x};
}

Enclosure Real::enclose(long bits) const {
    if (is_rational()) return {*impl_->rat_value, *impl_->rat_value};
    if (impl_->surd) return impl_->surd->enclose(bits);
    if (impl_->spec.kind == RealSpec::Kind::LiteralEnclosure) {
        Enclosure e{impl_->spec.lo, impl_->spec.hi};
        mpq_class tol(1);
        tol /= mpq_class(mpz_class(1) << static_cast<unsigned long>(bits));
        if (e.width() > tol)
            throw Error(ErrorKind::Precision, "literal enclosure is wider than 2^-" + std::to_string(bits));
        return e;
    }
    mpz_class target = mpz_class(1) << static_cast<unsigned long>(bits);
    for (long k = 0;; ++k) {
        if (!has_quotient(k + 1))
            throw Error(ErrorKind::Depth,
                        "insufficient stream depth for " + str() + " at 2^-" + std::to_string(bits), k);
        if (q(k) * q(k + 1) >= target) return sandwich(k);
    }
}

Enclosure Real::enclose(const Affine& f, long bits) const {
    if (f.u == 0) return {f.v, f.v};
    if (is_rational()) {
        mpq_class x = f.u * *impl_->rat_value + f.v;
        return {x, x};
    }
    if (impl_->surd) return (*impl_->surd * f.u + f.v).enclose(bits);
    long extra = bitlen(floor_q(abs(f.u))) + 2;
    Enclosure e = enclose(bits + extra);
    mpq_class x = f.u * e.lo + f.v, y = f.u * e.hi + f.v;
    return x < y ? Enclosure{x, y} : Enclosure{y, x};
}

int Real::sign_affine(const mpq_class& u, const mpq_class& v) const {
    if (u == 0) return sgn(v);
    if (is_rational()) return sgn(u * *impl_->rat_value + v);
    if (impl_->surd) return (*impl_->surd * u + v).sign();
    auto decide = [&](const Enclosure& e) -> int {
        mpq_class x = u * e.lo + v, y = u * e.hi + v;
        if (x > 0 && y > 0) return 1;
        if (x < 0 && y < 0) return -1;
        return 0;
    };
    if (impl_->spec.kind == RealSpec::Kind::LiteralEnclosure) {
        int s = decide({impl_->spec.lo, impl_->spec.hi});
        if (s == 0) throw Error(ErrorKind::Precision, "sign undecidable on literal enclosure " + str());
        return s;
    }
    for (long k = 0;; ++k) {
        if (!has_quotient(k + 1))
            throw Error(ErrorKind::Depth, "insufficient stream depth to decide a sign for " + str(), k);
        if (bitlen(q(k)) > precision_cap())
            throw Error(ErrorKind::Precision, "sign undecided at precision cap for " + str());
        int s = decide(sandwich(k));
        if (s != 0) return s;
    }
}

}  // namespace dioph
