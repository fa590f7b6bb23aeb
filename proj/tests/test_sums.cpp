#include <doctest.h>

#include <cmath>

#include "dioph/contfrac.hpp"
#include "dioph/error.hpp"
#include "dioph/sums.hpp"

using namespace dioph;

namespace {

long double naive_R(long double a, long double g, long N, bool weighted) {
    long double s = 0;
    for (long n = 1; n <= N; ++n) {
        long double x = n * a - g;
        long double d = std::fabs(x - std::round(x));
        s += weighted ? 1 / (n * d) : 1 / d;
    }
    return s;
}

double mid(const Enclosure& e) { return mpq_class((e.lo + e.hi) / 2).get_d(); }

const long double PHI = (1 + std::sqrt(5.0L)) / 2;

}  // namespace

TEST_CASE("single term sums") {
    Real g = Real::parse("golden");
    auto s = sum_S(g, Gamma::zero(), 1, 32, 1);
    auto r = sum_R(g, Gamma::zero(), 1, 32, 1);
    CHECK(s.overlaps(r));
    CHECK(std::fabs(mid(s) - 1 / (2 - PHI)) < 1e-9);
    CHECK(s.width() <= mpq_class(1, 1L << 32));
}

TEST_CASE("sums match naive resummation") {
    Real g = Real::parse("golden");
    auto pts = sums_SR(g, Gamma::zero(), {10, 1000}, 24, 2);
    REQUIRE(pts.size() == 2);
    CHECK(std::fabs(mid(pts[1].R) / static_cast<double>(naive_R(PHI, 0, 1000, false)) - 1) < 1e-12);
    CHECK(std::fabs(mid(pts[1].S) / static_cast<double>(naive_R(PHI, 0, 1000, true)) - 1) < 1e-12);
    Real r2 = Real::parse("surd:(0+1*sqrt2)/1");
    auto s = sum_S(r2, Gamma::zero(), 10000, 20, 2);
    CHECK(std::fabs(mid(s) / static_cast<double>(naive_R(std::sqrt(2.0L), 0, 10000, true)) - 1) < 1e-9);
    CHECK(s.width() <= mpq_class(1, 1L << 20));
    // thread count does not change the enclosure
    auto one = sum_R(r2, Gamma::zero(), 3000, 20, 1);
    auto four = sum_R(r2, Gamma::zero(), 3000, 20, 4);
    CHECK(one.lo == four.lo);
    CHECK(one.hi == four.hi);
}

TEST_CASE("degenerate term is reported") {
    Real g = Real::parse("golden");
    auto t = ConvergentTable::build(g, 20);
    Gamma gm = parse_gamma("surd:(1+1*sqrt5)/1", t);  // 2 alpha
    try {
        sum_S(g, gm, 10, 16, 1);
        FAIL("expected degenerate error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DegenerateGamma);
        CHECK(std::string(e.what()).find("n=2") != std::string::npos);
    }
}

TEST_CASE("theorem-level bounds for S_N and the split") {
    Real g = Real::parse("golden");
    Real r2 = Real::parse("surd:(0+1*sqrt2)/1");
    Real e = Real::parse("e");
    CHECK(check_T1(g, 1000, 16, 1).pass());
    for (long N : {100L, 1000L, 10000L}) CHECK(check_T1(r2, N, 16, 2).pass());
    auto sg = split_R(g, 1000, 16, 1);
    CHECK(sg.pass());
    CHECK(sg.residue_count + sg.complement_count == 1000);
    CHECK(sg.R->contains(Enclosure{sg.residue->lo + sg.complement->lo, sg.residue->hi + sg.complement->hi}));
    CHECK(split_R(r2, 10000, 16, 2).pass());
    CHECK(split_R(e, 1000, 16, 1).pass());
    CHECK_THROWS_AS(split_R(g, 1, 16, 1), Error);
}

TEST_CASE("trimmed residue sums") {
    Real g = Real::parse("golden");
    auto t = trimmed_R(g, 1000, 1, 16, 1);
    CHECK(t.pass());
    auto huge = trimmed_R(g, 1000, mpq_class(1000000000), 16, 1);
    CHECK(huge.trimmed->lo == huge.residue->lo);
    CHECK(huge.trimmed->hi == huge.residue->hi);
    CHECK_THROWS_AS(trimmed_R(g, 1000, 0, 16, 1), Error);
}

TEST_CASE("lower bounds hold for every n up to 1e5") {
    for (const char* a : {"golden", "surd:(0+1*sqrt2)/1", "e"}) {
        auto r = check_lower_all(Real::parse(a), 100000);
        CHECK_MESSAGE(r.pass(), a);
    }
}

TEST_CASE("partial summation identity") {
    Real g = Real::parse("golden");
    auto t = ConvergentTable::build(g, 20);
    auto one = partial_summation_check(g, Gamma::zero(), 1, 160);
    CHECK(one.pass());
    CHECK(one.S->overlaps(*one.R));
    // gamma = D_1 makes n = q_1 degenerate
    CHECK_THROWS_AS(partial_summation_check(g, parse_gamma("D:1", t), 200, 160), Error);
    CHECK(partial_summation_check(g, parse_gamma("1/3", t), 200, 160).pass());
    CHECK(partial_summation_check(Real::parse("surd:(0+1*sqrt2)/1"), Gamma::zero(), 500, 160).pass());
}

TEST_CASE("linear forms lower bound") {
    Real g = Real::parse("golden");
    for (int n = 1; n <= 3; ++n) {
        std::vector<Real> A;
        std::vector<long> T(n, 1);
        T[0] = 2;
        for (int j = 0; j < n; ++j) A.push_back(Real::parse(j == 0 ? "golden" : j == 1 ? "surd:(0+1*sqrt2)/1" : "surd:(0+1*sqrt3)/1"));
        auto r = linear_forms_sum(A, T, mpq_class(2), 0, Weight::None, Region::Box, 20);
        REQUIRE(r.rhs);
        CHECK(r.rhs_exact);
        CHECK(r.rhs->lo == mpq_class(1L << (n + 2)));
        CHECK(r.verdict->ok);
    }
    auto r1 = linear_forms_sum({g}, {256}, mpq_class(256), 0, Weight::None, Region::Box, 20);
    CHECK(r1.verdict->ok);
    std::vector<Real> A2{Real::parse("surd:(0+1*sqrt2)/1"), Real::parse("surd:(0+1*sqrt3)/1")};
    auto r2 = linear_forms_sum(A2, {32, 32}, mpq_class(64), 0, Weight::None, Region::Box, 20);
    CHECK(r2.verdict->ok);
    for (long T1 : {2L, 8L, 64L})
        for (long T2 : {1L, 4L, 64L})
            for (long L : {2L, 10L, 1000L})
                CHECK(linear_forms_sum(A2, {T1, T2}, mpq_class(L), 0, Weight::None, Region::Box, 16).verdict->ok);
}

TEST_CASE("linear forms: cap monotonicity and growth ratios") {
    Real g = Real::parse("golden");
    auto small = linear_forms_sum({g}, {100}, mpq_class(4), 0, Weight::None, Region::Box, 20);
    auto large = linear_forms_sum({g}, {100}, mpq_class(1000000), 0, Weight::None, Region::Box, 20);
    CHECK(small.lhs.hi <= large.lhs.lo);
    // uncapped orthant sum with n = 1 is R_T
    auto orth = linear_forms_sum({g}, {100}, std::nullopt, 0, Weight::None, Region::Orthant, 20);
    CHECK(!orth.verdict);
    CHECK(orth.lhs.overlaps(sum_R(g, Gamma::zero(), 100, 20, 1)));
    auto weighted = linear_forms_sum({g}, {100}, std::nullopt, 0, Weight::Product, Region::Orthant, 20);
    CHECK(weighted.lhs.overlaps(sum_S(g, Gamma::zero(), 100, 20, 1)));
    std::vector<Real> A2{Real::parse("surd:(0+1*sqrt2)/1"), Real::parse("surd:(0+1*sqrt3)/1")};
    auto kron = linear_forms_sum(A2, {16, 16}, std::nullopt, 0, Weight::Product, Region::Box, 16);
    CHECK(kron.growth.lo > 0);
    CHECK(kron.ratio.lo > 0);
}

TEST_CASE("psi specs") {
    auto p = parse_psi("nlog:2,2");
    auto v = psi_value(p, 1, 128);
    double expect = 1 / std::pow(std::log(3.0), 2);
    CHECK(std::fabs(mid(v.enclosure()) - expect) < 1e-12);
    CHECK(psi_value(parse_psi("3/n"), 6, 64).contains(mpq_class(1, 2)));
    CHECK(psi_n_decreasing(parse_psi("n^-1")));
    CHECK_FALSE(psi_n_decreasing(parse_psi("n^-1/2")));
    CHECK_THROWS_AS(parse_psi("nlog:1,1"), Error);
    CHECK_THROWS_AS(parse_psi("bogus"), Error);
}

TEST_CASE("psi transfer identities") {
    Real g = Real::parse("golden");
    auto one = psi_transfer_sums(g, Gamma::zero(), parse_psi("nlog:2,2"), 1, {}, 160);
    CHECK(one.agree);
    auto r = psi_transfer_sums(g, Gamma::zero(), parse_psi("nlog:2,2"), 1000, {}, 160);
    CHECK(r.agree);
    CHECK(r.direct.width() < mpq_class(1, 1000000));
}

TEST_CASE("psi partial sums grow like log squared") {
    Real g = Real::parse("golden");
    auto r = psi_transfer_sums(g, Gamma::zero(), parse_psi("nlog:1,2"), 10000, {100, 1000, 10000}, 96);
    REQUIRE(r.partials.size() == 3);
    double kappa = 1e9;
    for (const auto& [n, e] : r.partials) kappa = std::min(kappa, e.lo.get_d() / std::pow(std::log(double(n)), 2));
    CHECK(kappa > 0.05);
    CHECK(r.partials[0].second.hi < r.partials[1].second.lo);
    CHECK(r.partials[1].second.hi < r.partials[2].second.lo);
}
