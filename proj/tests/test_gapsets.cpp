#include <doctest.h>

#include <random>

#include "dioph/error.hpp"
#include "dioph/gapsets.hpp"
#include "dioph/ostrowski.hpp"

using namespace dioph;

static std::vector<long> ns(const std::vector<Member>& v) {
    std::vector<long> out;
    for (const auto& x : v) out.push_back(x.n);
    return out;
}

TEST_CASE("enumeration examples") {
    auto s = ConvergentTable::build(Real::parse("sqrt:(-1+1*sqrt2)/1"), 30);
    DigitPrefix one = parse_prefix("1");
    auto a = enumerate_A(one, s, 50);
    CHECK(a.front().n == 1);
    auto g = verify_gaps(a, one, s);
    CHECK(g.pass());
    CHECK(g.case_name() == "i");
    for (const auto& [len, cnt] : g.gaps) CHECK((len == 2 || len == 3));
    CHECK(ns(a) == ns(enumerate_A_scan(one, s, 50)));

    auto gold = ConvergentTable::build(Real::parse("golden"), 30);
    for (long m = 0; m < 6; ++m) {
        DigitPrefix z;
        z.d.assign(m + 1, 0);
        auto mem = enumerate_A(z, gold, 1000);
        CHECK(mem.front().n == gold.q(m + 1));
    }
    DigitPrefix z2 = parse_prefix("0,0");
    auto mem = enumerate_A(z2, gold, 100);
    auto rep = verify_gaps(mem, z2, gold);
    CHECK(rep.pass());
    CHECK(rep.case_name() == "ii");
    for (const auto& [len, cnt] : rep.gaps) CHECK((len == gold.q(2) || len == gold.q(1)));
}

TEST_CASE("invalid prefixes are rejected") {
    auto s = ConvergentTable::build(Real::parse("sqrt:(-1+1*sqrt2)/1"), 30);
    CHECK_THROWS_AS(enumerate_A(parse_prefix("2"), s, 10), Error);
    CHECK_THROWS_AS(enumerate_A(parse_prefix("1,2"), s, 10), Error);
    CHECK(prefix_violation(parse_prefix("0,2"), s).empty());
    CHECK_THROWS_AS(parse_prefix("1,x"), Error);
}

TEST_CASE("corrupted member list") {
    auto s = ConvergentTable::build(Real::parse("sqrt:(-1+1*sqrt2)/1"), 30);
    DigitPrefix one = parse_prefix("1");
    auto a = enumerate_A(one, s, 50);
    a[4].n += 1;
    auto g = verify_gaps(a, one, s);
    CHECK_FALSE(g.pass());
    CHECK(g.first_bad == 3);
}

TEST_CASE("count and harmonic bounds") {
    auto gold = ConvergentTable::build(Real::parse("golden"), 40);
    DigitPrefix z3 = parse_prefix("0,0,0");
    auto mem = enumerate_A(z3, gold, 1000);
    CHECK(count_bounds(mem, z3, gold, 1000).pass());
    DigitPrefix z2 = parse_prefix("0,0");
    auto h = harmonic_sum_A(enumerate_A(z2, gold, 1000), z2.n_prime(gold), 1000, gold, 1);
    CHECK(h.ok);
    auto r2 = ConvergentTable::build(Real::parse("surd:(0+1*sqrt2)/1"), 40);
    DigitPrefix one = parse_prefix("1");
    CHECK(count_bounds(enumerate_A(one, r2, 10000), one, r2, 10000).pass());
    CHECK(harmonic_sum_A(enumerate_A(one, r2, 1000), one.n_prime(r2), 1000, r2, 0).ok);
    // N below q_{m+1}
    DigitPrefix deep = parse_prefix("0,0,0,0,0,1");
    auto small = enumerate_A(deep, gold, 10);
    REQUIRE(small.size() >= 1);
    CHECK(count_bounds(small, deep, gold, 10).lower_ok);
    auto empty = harmonic_sum_A({}, 0, 10, gold, 2);
    CHECK(empty.ok);
}

TEST_CASE("random prefixes against the scan oracle") {
    std::mt19937_64 rng(7);
    for (const char* as : {"golden", "surd:(0+1*sqrt2)/1", "e", "surd:(0+1*sqrt7)/3"}) {
        auto t = ConvergentTable::build(Real::parse(as), 40);
        const long N = 10000;
        std::vector<OstrowskiInt> ex;
        for (long n = 1; n <= N; ++n) ex.push_back(expand_int(t, n));
        int tested = 0;
        while (tested < 100) {
            DigitPrefix p;
            long m = static_cast<long>(rng() % 6);
            for (long k = 0; k <= m; ++k) {
                long a = t.a(k + 1).get_si();
                long hi = k == 0 ? a - 1 : a;
                p.d.push_back(static_cast<long>(rng() % (hi + 1)));
            }
            if (!prefix_violation(p, t).empty()) continue;
            ++tested;
            auto mem = enumerate_A(p, t, N);
            std::vector<long> scan;
            for (long n = 1; n <= N; ++n) {
                bool ok = true;
                for (long k = 0; k <= m && ok; ++k) ok = ex[n - 1].c(k) == p.d[k];
                if (ok) scan.push_back(n);
            }
            CAPTURE(as);
            CHECK(ns(mem) == scan);
            for (const auto& x : mem) CHECK(x.c_next == ex[x.n - 1].c(m + 1));
            auto g = verify_gaps(mem, p, t);
            CHECK(g.pass());
            if (!mem.empty()) CHECK(count_bounds(mem, p, t, N).pass());
            CHECK(harmonic_sum_A(mem, p.n_prime(t), N, t, m).ok);
        }
    }
}
