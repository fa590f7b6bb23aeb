#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "dioph/constructions.hpp"
#include "dioph/error.hpp"

using namespace dioph;

TEST_CASE("Liouville streams") {
    auto one = build_liouville_alpha("q^1", 6);
    CHECK(one.max_exponent.lo >= mpq_class(19, 10));
    CHECK(one.quotients[3] == 2);
    auto flat = build_liouville_alpha("one", 30);
    CHECK(flat.ratios.back().hi < mpq_class(21, 20));
    auto fast = build_liouville_alpha("qk", 5);
    CHECK(fast.max_exponent.lo >= 4);
    CHECK_THROWS_AS(build_liouville_alpha("qk", 40), Error);
}

TEST_CASE("T8 construction") {
    Real a = Real::parse("liouville:qk:[0;3,1,1,8,1,1,40,1,1,200]");
    auto c = adversarial_gamma_T8(a, {}, 2000000, 24, 2);
    CHECK(c.validity.valid);
    CHECK(c.reachable >= 3);
    CHECK(c.decreasing);
    CHECK(c.pass());
    // digit rule
    CHECK(c.digits.count(1) == 0);                 // a_2 = 1
    CHECK(c.digits.at(3) == 4);                    // a_4 = 8 at a checkpoint
    CHECK(c.digits.at(0) == 1);                    // a_1 = 3
    CHECK(c.checkpoints[0].a_prime == 2);
    CHECK(c.checkpoints[0].N == 2 * 7);
    Real b = Real::parse("liouville:qk:[0;3,1,1,9,1,1,40]");
    auto c9 = adversarial_gamma_T8(b, {3}, 2000000, 24, 1);
    CHECK(c9.digits.at(3) == 5);
    CHECK_THROWS_AS(adversarial_gamma_T8(a, {4}, 2000000, 24, 1), Error);
    CHECK_THROWS_AS(adversarial_gamma_T8(Real::parse("liouville:qk:[0;1,1,8,1]"), {}, 1000, 24, 1), Error);
}

TEST_CASE("T5 spike construction") {
    auto plan = adversarial_gamma_T5(Real::parse("golden"), parse_growth("sqrt"), {0, 1, 0, 1}, 4);
    CHECK(plan.c1);
    CHECK(plan.gamma_in_range);
    CHECK(plan.invariants());
    REQUIRE(plan.steps.size() == 5);
    for (size_t j = 1; j < plan.steps.size(); ++j) {
        CHECK(plan.steps[j].k - plan.steps[j - 1].k >= 5);
        CHECK((plan.steps[j].k - plan.steps[j - 1].k) % 2 == plan.eps[j - 1]);
    }
    for (const auto& s : plan.steps)
        if (!s.lookahead) CHECK_MESSAGE(s.spike_ok, "i=" << s.i);
    CHECK(plan.pass());
}

namespace {

long double psi_naive(long n) {
    long double l = std::log((long double)n + 2);
    return 1 / (n * l * l * std::log(std::log((long double)n + 16)));
}

std::set<long> naive_hits(long double a, long double b, long N) {
    std::set<long> h;
    for (long n = 1; n <= N; ++n) {
        long double x = n * a, y = n * b;
        long double p = std::fabs(x - std::round(x)) * std::fabs(y - std::round(y));
        if (p < psi_naive(n)) h.insert(n);
    }
    return h;
}

}  // namespace

TEST_CASE("fiber scan") {
    Real g = Real::parse("golden");
    auto none = fiber_hit_scan(g, parse_psi("zero"), {"1/3", "golden"}, 1000, 1);
    for (const auto& r : none) CHECK(r.hits.empty());
    auto self = fiber_hit_scan(g, parse_psi("1/n"), {"golden"}, 100000, 1);
    std::set<long> hs;
    for (const auto& h : self[0].hits) hs.insert(h.n);
    for (long f : {13L, 21L, 34L, 55L, 89L, 144L, 233L, 377L, 610L, 987L, 1597L, 2584L, 4181L, 6765L, 10946L, 17711L,
                   28657L, 46368L, 75025L})
        CHECK(hs.count(f) == 1);
    std::vector<std::string> betas{"3/7", "surd:(0+1*sqrt2)/1", "5/1024"};
    auto psi = parse_psi("nlog:2,2,1,16");
    auto recs = fiber_hit_scan(g, psi, betas, 20000, 2);
    const long double phi = (1 + std::sqrt(5.0L)) / 2;
    std::vector<long double> bv{3.0L / 7, std::sqrt(2.0L), 5.0L / 1024};
    for (size_t i = 0; i < betas.size(); ++i) {
        std::set<long> got;
        for (const auto& h : recs[i].hits) {
            got.insert(h.n);
            CHECK((h.trivial || h.product.hi < h.psi.lo));
        }
        CHECK(got == naive_hits(phi, bv[i], 20000));
    }
    long trivial = 0;
    for (const auto& h : recs[0].hits) trivial += h.trivial;
    CHECK(trivial == 20000 / 7);
}
