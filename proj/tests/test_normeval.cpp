#include <doctest.h>

#include <random>

#include "dioph/error.hpp"
#include "dioph/normeval.hpp"

using namespace dioph;

static double mid(const Enclosure& e) { return (e.lo.get_d() + e.hi.get_d()) / 2; }

TEST_CASE("direct norm examples") {
    Real r2 = Real::parse("surd:(0+1*sqrt2)/1");
    auto v = norm_direct(r2, 12, Gamma::zero(), 80);
    CHECK(mid(v.value) == doctest::Approx(0.0294372515).epsilon(1e-9));
    CHECK(v.value.hi - v.value.lo <= mpq_class(1, 1) / mpq_class(mpz_class(1) << 80));
    Real g = Real::parse("golden");
    auto w = norm_direct(g, 5, Gamma::zero(), 80);
    CHECK(mid(w.value) == doctest::Approx(0.0901699437).epsilon(1e-9));
    // gamma = 7 alpha - nearest integer
    auto t = ConvergentTable::build(g, 20);
    Gamma hit = Gamma::affine(Affine{7, -11}, "hit");
    auto z = norm_direct(g, 7, hit, 80);
    CHECK(z.degenerate);
    CHECK(z.value.hi == 0);
    auto e = norm_direct(r2, 3, Gamma::real(Real::parse("e")), 60);
    double exact = std::fabs(3 * std::sqrt(2.0) - std::exp(1.0));
    exact = std::fabs(exact - std::round(exact));
    CHECK(mid(e.value) == doctest::Approx(exact).epsilon(1e-12));
}

TEST_CASE("digit route homogeneous examples") {
    auto t = ConvergentTable::build(Real::parse("golden"), 30);
    auto zero = expand_real(t, Gamma::zero(), 30);
    for (long k = 2; k < 15; ++k) {
        auto r = norm_via_ostrowski(t, expand_int(t, t.q(k)), zero);
        REQUIRE(r.exact);
        CHECK(r.exact->f == t.absD(k));
    }
}

TEST_CASE("digit route agrees with the direct oracle") {
    const char* alphas[] = {"golden", "surd:(0+1*sqrt2)/1", "e", "surd:(0+1*sqrt7)/3", "quotients:[0;5,1,9,2,1,1,7,3,30,1,2,2,4,1,1,6,2,9,1,3,1,1,2,5,1,1,3,1,4,1,1,2,8,1,1,3,2,1,1,5,1,2,1,1,3,1,1,1,2,4,1,1,2,1,1,3,1,1,2,1,1,6,1,1,1,2,1,3,1,1,1,2,1,1,4,1,1,1,2,1,1,3,1,1,1,2,1,5,1,1,2,1,1,1,3,1,1,2,1,1,1,2,1,1,4,1,1,1,2,1,1,3,1,1,2,1,1]"};
    std::mt19937_64 rng(12345);
    for (const char* as : alphas) {
        auto t = ConvergentTable::build(Real::parse(as), 24);
        std::vector<Gamma> gammas{Gamma::zero(), parse_gamma("1/3", t), parse_gamma("D:2", t),
                                  parse_gamma("-5/17", t)};
        // random finite digit expansions
        for (int j = 0; j < 3; ++j) {
            DigitMap dig;
            for (long k = 0; k < 12; ++k) {
                long amax = t.a(k + 1).get_si() - (k == 0 ? 1 : 0);
                if (k > 0 && dig.count(k - 1) && amax == t.a(k + 1).get_si()) --amax;
                long v = static_cast<long>(rng() % (amax + 1));
                if (v) dig[k] = v;
            }
            if (validate_digits(dig, t, false).valid) gammas.push_back(gamma_from_digits(dig, t));
        }
        for (const auto& gm : gammas) {
            auto b = expand_real(t, gm, 24);
            for (int i = 0; i < 60; ++i) {
                mpz_class n = 1 + static_cast<long>(rng() % 10000);
                if (t.q(20) <= n) continue;
                CAPTURE(as);
                CAPTURE(gm.label());
                CAPTURE(n.get_str());
                auto c = expand_int(t, n);
                NormResult r;
                try {
                    r = norm_via_ostrowski(t, c, b, 96);
                } catch (const Error& e) {
                    REQUIRE(e.kind() == ErrorKind::DegenerateGamma);
                    CHECK(norm_direct(t.alpha(), n, gm, 80).degenerate);
                    continue;
                }
                auto dref = norm_direct(t.alpha(), n, gm, 96);
                CHECK(r.value.overlaps(dref.value));
                REQUIRE(r.exact);
                REQUIRE(dref.exact);
                CHECK(r.exact->f == dref.exact->f);
                auto up = inhom_upper(delta_of(c, b), t);
                CHECK(t.alpha().sign(up - r.exact->f) > 0);
                CHECK(r.decomposition->pass());
            }
        }
    }
}

TEST_CASE("general gamma via intervals") {
    auto t = ConvergentTable::build(Real::parse("golden"), 40);
    Gamma g = Gamma::real(Real::parse("e"));
    auto b = expand_real(t, g, 40);
    for (long n = 1; n < 2000; n += 37) {
        auto r = norm_via_ostrowski(t, expand_int(t, n), b, 80);
        auto d = norm_direct(t.alpha(), n, g, 80);
        CHECK(r.value.overlaps(d.value));
        CHECK(r.decomposition->pass());
    }
}

TEST_CASE("homogeneous bounds and formula") {
    for (const char* as : {"golden", "surd:(-1+1*sqrt2)/1", "e", "surd:(0+1*sqrt7)/3"}) {
        auto t = ConvergentTable::build(Real::parse(as), 30);
        for (long n = 1; n <= 1000; ++n) {
            auto c = expand_int(t, n);
            auto exact = norm_exact(t.alpha(), n, Gamma::zero())->f;
            auto h = hom_bounds(c, t);
            if (h.applies) {
                CHECK(t.alpha().sign(exact - h.lower) >= 0);
                CHECK(t.alpha().sign(h.upper - exact) >= 0);
            } else {
                CHECK(t.alpha().sign(exact - t.absD(2)) >= 0);
            }
            if (auto f = hom_formula(c, t)) CHECK(*f == exact);
        }
    }
    auto s = ConvergentTable::build(Real::parse("surd:(-1+1*sqrt2)/1"), 20);
    auto h = hom_bounds(expand_int(s, 7), s);
    CHECK_FALSE(h.applies);
    CHECK(h.m == 1);
}

TEST_CASE("inhomogeneous upper bound example") {
    auto t = ConvergentTable::build(Real::parse("golden"), 30);
    auto b = expand_real(t, parse_gamma("D:1", t), 30);
    auto d = delta_of(expand_int(t, 17), b);
    CHECK(inhom_upper(d, t) == t.absD(3) * 3);
}

TEST_CASE("degenerate gamma is explicit") {
    auto t = ConvergentTable::build(Real::parse("golden"), 30);
    auto b = expand_real(t, gamma_from_digits(expand_int(t, 17).digits, t), 30);
    try {
        norm_via_ostrowski(t, expand_int(t, 17), b);
        FAIL("expected degenerate");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DegenerateGamma);
    }
}

TEST_CASE("batch csv is deterministic across threads") {
    std::string job = R"({"alpha":"golden","gamma":"1/3","n_from":1,"n_to":300,"bits":60})";
    auto a = norm_batch_csv(job, 1);
    auto b = norm_batch_csv(job, 3);
    CHECK(a == b);
    CHECK(a.rfind("n,value_lo,value_hi,m,branch,ell,L\n", 0) == 0);
    CHECK(std::count(a.begin(), a.end(), '\n') == 301);
}
