#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "zetafam/padic.hpp"

using namespace zetafam;

static Padic rnd(const PadicCtx& ctx, std::mt19937_64& rng, int maxshift = 0) {
    mpz_class m = 0;
    for (int i = 0; i < ctx.prec; ++i) m = m * ctx.pz + mpz_class(static_cast<unsigned long>(rng() % ctx.p));
    int s = maxshift > 0 ? static_cast<int>(rng() % (maxshift + 1)) : 0;
    return Padic(ctx, m, s);
}

TEST_CASE("padic construction and basic identities") {
    PadicCtx ctx(5, 8, 6);
    Padic a(ctx, 7);
    Padic b(ctx, -7);
    REQUIRE((a + b).is_zero());
    Padic one(ctx, 1);
    REQUIRE((a * one).eq_mod(a, 8));
}

TEST_CASE("padic ring axioms on random samples") {
    PadicCtx ctx(7, 10, 8);
    std::mt19937_64 rng(42);
    for (int t = 0; t < 200; ++t) {
        Padic a = rnd(ctx, rng, 2), b = rnd(ctx, rng, 2), c = rnd(ctx, rng, 2);
        REQUIRE(((a + b) + c).eq_mod(a + (b + c), 10));
        REQUIRE((a + b).eq_mod(b + a, 10));
        // products lose up to s_a+s_b digits of absolute precision
        int loss = a.s + b.s + c.s;
        REQUIRE(((a * b) * c).eq_mod(a * (b * c), 10 - loss));
        REQUIRE((a * (b + c)).eq_mod(a * b + a * c, 10 - loss));
    }
}

TEST_CASE("normalization strips p factors") {
    PadicCtx ctx(3, 6, 4);
    Padic a(ctx, mpz_class(27), 3);  // 27/27 = 1
    REQUIRE(a.eq_mod(Padic(ctx, 1), 6));
    a.normalize();
    REQUIRE(a.s == 0);
    REQUIRE(a.m == 1);
}

TEST_CASE("multiplication precision contract vs doubled precision") {
    // product of values with shifts s1, s2 is exact to p^(N - s1 - s2):
    // compare against arithmetic carried out at doubled precision
    PadicCtx lo(5, 6, 5), hi(5, 12, 5);
    std::mt19937_64 rng(7);
    for (int t = 0; t < 500; ++t) {
        Padic A = rnd(hi, rng, 2), B = rnd(hi, rng, 2);
        Padic a = A.change_ctx(lo), b = B.change_ctx(lo);
        Padic prod_hi = A * B;
        Padic prod_lo = a * b;
        REQUIRE(prod_lo.eq_mod(prod_hi.change_ctx(lo), 6 - A.s - B.s));
    }
}

TEST_CASE("integer division and inverse") {
    PadicCtx ctx(3, 8, 6);
    Padic a(ctx, 10);
    Padic d = a.div_si(6);  // 10/6 = 5/3: shift 1
    REQUIRE(d.s == 1);
    REQUIRE((d.mul_si(6)).eq_mod(a, 8));
    Padic u(ctx, 7);
    REQUIRE((u * u.inv()).eq_mod(Padic(ctx, 1), 8));
    Padic w(ctx, 9);  // 9 = 3^2: inverse has shift 2
    Padic wi = w.inv();
    REQUIRE(wi.s == 2);
    REQUIRE((w * wi).eq_mod(Padic(ctx, 1), 8));
    REQUIRE_THROWS_AS(Padic(ctx).inv(), PrecisionError);
}

TEST_CASE("shift budget is a hard error") {
    PadicCtx ctx(3, 5, 2);
    Padic a(ctx, 1);
    Padic b = a.div_si(3).div_si(3);  // shift 2: at budget
    REQUIRE(b.s == 2);
    REQUIRE_THROWS_AS(b.div_si(3), PrecisionError);
}

TEST_CASE("centered lift") {
    PadicCtx ctx(5, 6, 2);
    Padic a(ctx, -2);
    REQUIRE(a.to_centered(6) == -2);
    Padic b(ctx, 2);
    REQUIRE(b.to_centered(6) == 2);
    Padic c(ctx, mpz_class(50), 1);  // 50/5 = 10
    REQUIRE(c.to_centered(4) == 10);
}

TEST_CASE("times_p_pow and is_zero_mod") {
    PadicCtx ctx(7, 6, 3);
    Padic a(ctx, 3);
    Padic b = a.div_si(49);
    REQUIRE(b.s == 2);
    REQUIRE(b.times_p_pow(2).eq_mod(a, 6));
    Padic z(ctx, mpz_class(49));
    REQUIRE(z.is_zero_mod(2));
    REQUIRE(!z.is_zero_mod(3));
}
