#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "zetafam/series.hpp"

using namespace zetafam;

static Qq rnd_qq(const QqCtx& ctx, std::mt19937_64& rng, int maxshift = 0) {
    Qq u(ctx);
    for (auto& c : u.c) {
        mpz_class m = 0;
        for (int i = 0; i < ctx.zp->prec; ++i)
            m = m * ctx.zp->pz + mpz_class(static_cast<unsigned long>(rng() % ctx.zp->p));
        int s = maxshift > 0 ? static_cast<int>(rng() % (maxshift + 1)) : 0;
        c = Padic(*ctx.zp, m, s);
    }
    return u;
}

static SeriesMat rnd_mat(const QqCtx& ctx, std::mt19937_64& rng, int dim, int trunc, int len,
                         int maxshift = 0) {
    SeriesMat m(ctx, dim, trunc);
    for (auto& s : m.e) {
        s.resize(static_cast<std::size_t>(len), ctx.zero());
        for (auto& q : s) q = rnd_qq(ctx, rng, maxshift);
        qqpoly_trim(s);
    }
    return m;
}

TEST_CASE("series multiplication basics") {
    auto zp = std::make_shared<PadicCtx>(5, 6, 4);
    QqCtx ctx(zp, {2, 1});
    // (1 + G)(1 - G) = 1 - G^2
    Series a{ctx.one(), ctx.one()};
    Series b{ctx.one(), ctx.from_si(-1)};
    auto prod = series_mul(a, b, 16);
    REQUIRE(prod.size() == 3);
    REQUIRE(prod[0].eq_mod(ctx.one(), 6));
    REQUIRE(prod[1].is_zero_mod(6));
    REQUIRE(prod[2].eq_mod(ctx.from_si(-1), 6));
    // truncation drops the G^2 term
    auto tr = series_mul(a, b, 2);
    REQUIRE(tr.size() <= 2);
}

TEST_CASE("matrix product: identity and packed-vs-schoolbook oracle") {
    auto zp = std::make_shared<PadicCtx>(3, 8, 5);
    QqCtx ctx(zp, {1, 0, 1});
    std::mt19937_64 rng(61);
    auto I = SeriesMat::identity(ctx, 3, 16);
    auto A = rnd_mat(ctx, rng, 3, 16, 13);
    REQUIRE(matrix_mul(A, I, 16).eq_mod(A, 8));
    for (int t = 0; t < 10; ++t) {
        auto X = rnd_mat(ctx, rng, 3, 16, 11);
        auto Y = rnd_mat(ctx, rng, 3, 16, 14);
        auto fast = matrix_mul(X, Y, 16);
        auto slow = matrix_mul_schoolbook(X, Y, 16);
        REQUIRE(fast.eq_mod(slow, 8));
    }
}

TEST_CASE("packed product handles shifted coefficients") {
    auto zp = std::make_shared<PadicCtx>(5, 7, 5);
    QqCtx ctx(zp, {3, 1});
    std::mt19937_64 rng(67);
    for (int t = 0; t < 10; ++t) {
        auto X = rnd_mat(ctx, rng, 2, 12, 9, 2);
        auto Y = rnd_mat(ctx, rng, 2, 12, 9, 1);
        auto fast = matrix_mul(X, Y, 12);
        auto slow = matrix_mul_schoolbook(X, Y, 12);
        int loss = X.max_shift() + Y.max_shift();
        REQUIRE(fast.eq_mod(slow, 7 - loss));
    }
}

TEST_CASE("matrix ring axioms at fixed truncation") {
    auto zp = std::make_shared<PadicCtx>(7, 6, 4);
    QqCtx ctx(zp, {3, 1});
    std::mt19937_64 rng(71);
    for (int t = 0; t < 8; ++t) {
        auto A = rnd_mat(ctx, rng, 2, 10, 10);
        auto B = rnd_mat(ctx, rng, 2, 10, 10);
        auto C = rnd_mat(ctx, rng, 2, 10, 10);
        auto l = matrix_mul(matrix_mul(A, B, 10), C, 10);
        auto r = matrix_mul(A, matrix_mul(B, C, 10), 10);
        REQUIRE(l.eq_mod(r, 6));
        auto d1 = matrix_mul(A, B + C, 10);
        auto d2 = matrix_mul(A, B, 10) + matrix_mul(A, C, 10);
        REQUIRE(d1.eq_mod(d2, 6));
    }
}

TEST_CASE("substitute_sigma_gamma_p examples and semilinearity") {
    auto zp = std::make_shared<PadicCtx>(3, 8, 5);
    QqCtx ctx(zp, {1, 0, 1});
    // scalar series x*G^2 -> (-x)*G^6
    SeriesMat S(ctx, 1, 10);
    S.at(0, 0) = Series{ctx.zero(), ctx.zero(), ctx.gen()};
    auto T = substitute_sigma_gamma_p(S);
    REQUIRE(T.at(0, 0).size() == 7);
    REQUIRE(T.at(0, 0)[6].eq_mod(-ctx.gen(), 8));
    // G -> G^p
    SeriesMat G(ctx, 1, 10);
    G.at(0, 0) = Series{ctx.zero(), ctx.one()};
    auto Gp = substitute_sigma_gamma_p(G);
    REQUIRE(Gp.at(0, 0).size() == 4);
    REQUIRE(Gp.at(0, 0)[3].eq_mod(ctx.one(), 8));
    // constant matrix over Q_p-rational entries is fixed
    SeriesMat K(ctx, 2, 10);
    K.at(0, 0) = Series{ctx.from_si(4)};
    K.at(1, 0) = Series{ctx.from_si(-2)};
    REQUIRE(substitute_sigma_gamma_p(K).eq_mod(K, 8));
    // multiplicativity
    std::mt19937_64 rng(73);
    for (int t = 0; t < 8; ++t) {
        auto A = rnd_mat(ctx, rng, 2, 30, 3);
        auto B = rnd_mat(ctx, rng, 2, 30, 3);
        auto lhs = substitute_sigma_gamma_p(matrix_mul(A, B, 30));
        auto rhs = matrix_mul(substitute_sigma_gamma_p(A), substitute_sigma_gamma_p(B), 30);
        REQUIRE(lhs.eq_mod(rhs, 8));
    }
}

TEST_CASE("newton_invert_matrix examples") {
    auto zp = std::make_shared<PadicCtx>(5, 8, 5);
    QqCtx ctx(zp, {2, 1});
    // identity -> identity
    auto I = SeriesMat::identity(ctx, 3, 8);
    REQUIRE(newton_invert_matrix(I, 8).eq_mod(I, 8));
    // 1x1 geometric series
    SeriesMat C(ctx, 1, 16);
    C.at(0, 0) = Series{ctx.one(), ctx.from_si(-1)};
    auto D = newton_invert_matrix(C, 16);
    REQUIRE(D.at(0, 0).size() == 16);
    for (int k = 0; k < 16; ++k) REQUIRE(D.at(0, 0)[static_cast<std::size_t>(k)].eq_mod(ctx.one(), 8));
}

TEST_CASE("newton_invert_matrix multiply-back oracle") {
    auto zp = std::make_shared<PadicCtx>(3, 8, 5);
    QqCtx ctx(zp, {1, 0, 1});
    std::mt19937_64 rng(79);
    for (int t = 0; t < 5; ++t) {
        auto A = rnd_mat(ctx, rng, 4, 32, 32);
        // force C(0) = I
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                if (A.at(i, j).empty()) A.at(i, j).resize(1, ctx.zero());
                A.at(i, j)[0] = i == j ? ctx.one() : ctx.zero();
            }
        auto D = newton_invert_matrix(A, 32);
        auto I = SeriesMat::identity(ctx, 4, 32);
        REQUIRE(matrix_mul(D, A, 32).eq_mod(I, 8));
        REQUIRE(matrix_mul(A, D, 32).eq_mod(I, 8));
    }
    // a unit constant term that is not the identity
    auto B = rnd_mat(ctx, rng, 2, 12, 12);
    B.at(0, 0).resize(1, ctx.zero());
    B.at(0, 0)[0] = ctx.from_si(2);
    auto D = newton_invert_matrix(B, 12);
    REQUIRE(matrix_mul(D, B, 12).eq_mod(SeriesMat::identity(ctx, 2, 12), 8));
    // singular constant term rejected
    SeriesMat S(ctx, 2, 4);
    S.at(0, 0) = Series{ctx.one()};
    S.at(0, 1) = Series{ctx.one()};
    S.at(1, 0) = Series{ctx.one()};
    S.at(1, 1) = Series{ctx.one()};
    REQUIRE_THROWS_AS(newton_invert_matrix(S, 4), PrecisionError);
}

TEST_CASE("series evaluation at a point of the big field") {
    auto zp = std::make_shared<PadicCtx>(3, 8, 6);
    auto qq = std::make_shared<QqCtx>(zp, std::vector<long>{1, 1});
    QqPoly phi{qq->one(), qq->zero(), qq->one()};
    QqnCtx ctx(qq, phi);
    // constants and the coordinate series
    Series c{qq->from_si(7)};
    REQUIRE(series_evaluate(c, ctx).eq_mod(ctx.from_si(7), 8));
    Series gam{qq->zero(), qq->one()};
    REQUIRE(series_evaluate(gam, ctx).eq_mod(ctx.gen(), 8));
    // ring homomorphism on products of short polynomials
    std::mt19937_64 rng(83);
    for (int t = 0; t < 40; ++t) {
        Series s(2), u(2);
        for (auto& x : s) x = rnd_qq(*qq, rng);
        for (auto& x : u) x = rnd_qq(*qq, rng);
        auto lhs = series_evaluate(series_mul(s, u, 8), ctx);
        auto rhs = series_evaluate(s, ctx) * series_evaluate(u, ctx);
        REQUIRE(lhs.eq_mod(rhs, 8));
    }
}

TEST_CASE("series differentiation") {
    auto zp = std::make_shared<PadicCtx>(5, 6, 4);
    QqCtx ctx(zp, {2, 1});
    Series s{ctx.from_si(4), ctx.from_si(3), ctx.from_si(2)};  // 4 + 3G + 2G^2
    auto d = series_differentiate(s);
    REQUIRE(d.size() == 2);
    REQUIRE(d[0].eq_mod(ctx.from_si(3), 6));
    REQUIRE(d[1].eq_mod(ctx.from_si(4), 6));
    REQUIRE(series_differentiate(Series{ctx.one()}).empty());
}
