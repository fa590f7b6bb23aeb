#include <doctest.h>

#include <functional>

#include "dioph/error.hpp"
#include "dioph/ostrowski.hpp"

using namespace dioph;

static DigitMap dm(std::initializer_list<std::pair<long, long>> xs) {
    DigitMap m;
    for (auto [k, v] : xs) m[k] = v;
    return m;
}

static const char* kAlphas[] = {"golden", "sqrt:(-1+1*sqrt2)/1", "e", "surd:(0+1*sqrt7)/3"};

TEST_CASE("integer expansion examples") {
    auto g = ConvergentTable::build(Real::parse("golden"), 20);
    auto d = expand_int(g, 17);
    CHECK(d.digits == dm({{1, 1}, {3, 1}, {6, 1}}));
    CHECK(d.K == 6);
    CHECK(reconstruct_int(d, g) == 17);

    auto s = ConvergentTable::build(Real::parse("sqrt:(-1+1*sqrt2)/1"), 20);
    CHECK(expand_int(s, 7).digits == dm({{1, 1}, {2, 1}}));
    for (long k = 0; k < 10; ++k) {
        auto e = expand_int(s, s.q(k));
        CHECK(e.digits == dm({{k, 1}}));
    }
    CHECK_THROWS_AS(expand_int(g, 0), Error);
    auto shallow = ConvergentTable::build(Real::parse("golden"), 4);
    try {
        expand_int(shallow, 1000);
        FAIL("expected depth error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Depth);
    }
}

TEST_CASE("reconstruction and validation") {
    auto g = ConvergentTable::build(Real::parse("golden"), 20);
    OstrowskiInt z;
    CHECK_THROWS_AS(reconstruct_int(z, g), Error);
    auto s = ConvergentTable::build(Real::parse("sqrt:(-1+1*sqrt2)/1"), 20);
    OstrowskiInt one;
    one.digits = dm({{3, 2}});
    CHECK(reconstruct_int(one, s) == 2 * s.q(3));

    auto v = validate_digits(dm({{0, 2}}), s);
    CHECK_FALSE(v.valid);
    CHECK(v.k == 0);
    v = validate_digits(dm({{2, 1}, {3, 2}}), s);
    CHECK_FALSE(v.valid);
    CHECK(v.k == 2);
    try {
        OstrowskiInt bad;
        bad.digits = dm({{2, 1}, {3, 2}});
        reconstruct_int(bad, s);
        FAIL("expected validation error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Validation);
    }
}

TEST_CASE("roundtrip, uniqueness and ordering for small n") {
    for (const char* spec : kAlphas) {
        auto t = ConvergentTable::build(Real::parse(spec), 30);
        std::map<long, int> count;
        std::map<long, DigitMap> found;
        // enumerate all admissible digit vectors with value <= 1000
        long top = K_of(t, 1000) + 1;
        std::function<void(long, mpz_class, DigitMap&, bool)> rec = [&](long k, mpz_class acc, DigitMap& cur,
                                                                     bool next_full) {
            if (acc > 1000) return;
            if (k < 0) {
                if (acc > 0) {
                    long n = acc.get_si();
                    ++count[n];
                    found[n] = cur;
                }
                return;
            }
            long amax = t.a(k + 1).get_si() - (k == 0 ? 1 : 0);
            if (next_full) amax = 0;
            for (long c = 0; c <= amax; ++c) {
                if (c) cur[k] = c; else cur.erase(k);
                rec(k - 1, acc + c * t.q(k), cur, k >= 1 && c == t.a(k + 1));
            }
            cur.erase(k);
        };
        DigitMap cur;
        rec(top, 0, cur, false);
        CAPTURE(spec);
        for (long n = 1; n <= 1000; ++n) {
            REQUIRE(count[n] == 1);
            CHECK(expand_int(t, n).digits == found[n]);
        }
        for (long n = 1; n < 1000; ++n)
            CHECK(compare_reverse_lex(found[n], found[n + 1]) < 0);
        for (long n = 1; n <= 2000; n += 7) {
            auto d = expand_int(t, n);
            CHECK(validate_digits(d.digits, t).valid);
            CHECK(reconstruct_int(d, t) == n);
        }
    }
}

TEST_CASE("real expansion examples") {
    auto g = ConvergentTable::build(Real::parse("golden"), 40);
    auto r = expand_real(g, parse_gamma("D:1", g), 30);
    CHECK(r.digits == dm({{1, 1}}));
    CHECK(r.finite);
    CHECK(r.shift == 0);
    auto z = expand_real(g, Gamma::zero(), 30);
    CHECK(z.digits.empty());
    CHECK(z.finite);
    auto d = delta_of(expand_int(g, 17), r);
    REQUIRE(d.m);
    CHECK(*d.m == 3);
    CHECK(d.d(1) == 0);
    CHECK(d.d(3) == 1);
    auto h = delta_of(expand_int(g, 17), z);
    CHECK(*h.m == 1);
    auto same = expand_real(g, gamma_from_digits(expand_int(g, 17).digits, g), 30);
    CHECK(same.digits == expand_int(g, 17).digits);
    CHECK(delta_of(expand_int(g, 17), same).degenerate());
}

TEST_CASE("rational gammas: digits valid and defect bounded") {
    const char* gammas[] = {"1/3", "-2/7", "5/11", "1/1000", "-1/2", "7/3", "22/7"};
    for (const char* spec : kAlphas) {
        auto t = ConvergentTable::build(Real::parse(spec), 45);
        for (const char* gs : gammas) {
            CAPTURE(spec);
            CAPTURE(gs);
            auto r = expand_real(t, parse_gamma(gs, t), 40);
            CHECK(validate_digits(r.digits, t, false).valid);
            Enclosure bound = t.alpha().enclose(t.absD(39) + t.absD(40), 200);
            CHECK(r.defect.hi <= bound.hi);
            // normalized gamma in [-{alpha}, 1-{alpha})
            mpq_class gq(gs);
            gq.canonicalize();
            Enclosure frac = t.absD_enclosure(0, 200);
            CHECK(gq + mpq_class(r.shift) >= -frac.hi);
            CHECK(gq + mpq_class(r.shift) < 1 - frac.lo);
        }
    }
}

TEST_CASE("surd and general gammas") {
    auto g = ConvergentTable::build(Real::parse("surd:(0+1*sqrt2)/1"), 40);
    auto gam = parse_gamma("surd:(1+3*sqrt2)/5", g);
    CHECK(gam.is_exact());
    auto r = expand_real(g, gam, 30);
    CHECK(validate_digits(r.digits, g, false).valid);
    auto gen = parse_gamma("e", g);
    CHECK_FALSE(gen.is_exact());
    auto re = expand_real(g, gen, 25);
    CHECK(validate_digits(re.digits, g, false).valid);
    CHECK_FALSE(re.finite);
    CHECK(re.shift == -3);
}

TEST_CASE("delta depth mismatch") {
    auto g = ConvergentTable::build(Real::parse("golden"), 40);
    auto r = expand_real(g, parse_gamma("1/3", g), 5);
    try {
        delta_of(expand_int(g, 1000), r);
        FAIL("expected depth error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Depth);
    }
}
