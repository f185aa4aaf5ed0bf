#include <catch2/catch_amalgamated.hpp>

#include "zetafam/deformation.hpp"

using namespace zetafam;

namespace {

CurveFamily legendre(std::uint64_t p) {
    std::vector<std::vector<std::vector<long>>> qc{
        {{0}}, {{-1}, {1}}, {{0}, {-1}}, {{1}}};
    return CurveFamily(p, {0, 1}, qc);
}

CurveFamily cubic_const(std::uint64_t p) {
    std::vector<std::vector<std::vector<long>>> qc{
        {{0}}, {{-1}}, {{0}}, {{1}}};
    return CurveFamily(p, {0, 1}, qc);
}

Series series_scale_mat(const QqCtx& ctx, const Series& a, const Series& b, int trunc) {
    SeriesMat x(ctx, 1, trunc), y(ctx, 1, trunc);
    x.at(0, 0) = a;
    y.at(0, 0) = b;
    return matrix_mul(x, y, trunc).at(0, 0);
}

}  // namespace

TEST_CASE("constant family: H = 0 and C = I identically") {
    auto fam = cubic_const(5);
    auto cert = validate_family(fam);
    auto zp = std::make_shared<PadicCtx>(5, 12, 8);
    QqCtx ctx(zp, fam.chi);
    auto cm = connection_matrix(fam, cert, ctx);
    for (auto& s : cm.H.e)
        for (auto& q : s) REQUIRE(q.is_zero_mod(12));
    auto sol = solve_connection_ode(ctx, cm.H, cert.r_series(ctx), 40);
    for (std::size_t k = 0; k < sol.C.size(); ++k)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                const Qq& e = sol.C[k][static_cast<std::size_t>(i) * 2 + j];
                if (k == 0 && i == j)
                    REQUIRE(e.eq_mod(ctx.one(), 12));
                else
                    REQUIRE(e.is_zero_mod(12));
            }
}

TEST_CASE("connection ODE: residual and valuation bound, Legendre p=5") {
    auto fam = legendre(5);
    auto cert = validate_family(fam);
    int prec = 20, eta = 1;
    long ngamma = 120;
    auto zp = std::make_shared<PadicCtx>(5, prec, 14);
    QqCtx ctx(zp, fam.chi);
    auto cm = connection_matrix(fam, cert, ctx);
    Series r = cert.r_series(ctx);
    auto sol = solve_connection_ode(ctx, cm.H, r, ngamma);
    REQUIRE(sol.C[0][0].eq_mod(ctx.one(), prec));
    REQUIRE(check_c_valuation(sol, 5, eta) <= eta * ilog_ceil(5, static_cast<std::uint64_t>(ngamma)));

    int trunc = static_cast<int>(ngamma);
    SeriesMat C(ctx, 2, trunc);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            Series s(sol.C.size(), ctx.zero());
            for (std::size_t k = 0; k < s.size(); ++k) s[k] = sol.C[k][static_cast<std::size_t>(i) * 2 + j];
            qqpoly_trim(s);
            C.at(i, j) = std::move(s);
        }
    // r Cdot + C H must vanish up to the truncation edge
    auto CH = matrix_mul(C, cm.H, trunc);
    int loss = (2 * eta + 1) * ilog_ceil(5, static_cast<std::uint64_t>(ngamma));
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            auto res = series_add(series_scale_mat(ctx, r, series_differentiate(C.at(i, j)), trunc),
                                  CH.at(i, j));
            res = series_truncate(res, trunc - 1 - static_cast<int>(r.size()));
            for (auto& q : res) REQUIRE(q.is_zero_mod(prec - loss));
        }

    // perturbing a single coefficient breaks the residual
    auto Cbad = C;
    Cbad.at(0, 1)[40] += ctx.one();
    auto CHbad = matrix_mul(Cbad, cm.H, trunc);
    bool broken = false;
    for (int i = 0; i < 2 && !broken; ++i)
        for (int j = 0; j < 2 && !broken; ++j) {
            auto res = series_add(
                series_scale_mat(ctx, r, series_differentiate(Cbad.at(i, j)), trunc), CHbad.at(i, j));
            res = series_truncate(res, trunc - 1 - static_cast<int>(r.size()));
            for (auto& q : res)
                if (!q.is_zero_mod(prec - loss)) broken = true;
        }
    REQUIRE(broken);
}

TEST_CASE("solution is stable under raising the working precision") {
    auto fam = legendre(5);
    auto cert = validate_family(fam);
    int eta = 1, prec = 18;
    long ngamma = 120;
    auto run = [&](int workprec) {
        auto zp = std::make_shared<PadicCtx>(5, workprec, 14);
        auto ctx = std::make_shared<QqCtx>(zp, fam.chi);
        auto cm = connection_matrix(fam, cert, *ctx);
        return std::make_pair(ctx, solve_connection_ode(*ctx, cm.H, cert.r_series(*ctx), ngamma));
    };
    auto [ctx1, lo] = run(prec);
    auto [ctx2, hi] = run(prec + 10);
    for (std::size_t k = 0; k < lo.C.size(); ++k) {
        int loss = (2 * eta + 1) * ilog_ceil(5, static_cast<std::uint64_t>(k) + 1) + 1;
        for (std::size_t e = 0; e < lo.C[k].size(); ++e) {
            Qq down = qq_change_ctx(hi.C[k][e], *ctx1);
            REQUIRE(down.eq_mod(lo.C[k][e], prec - loss));
        }
    }
}

TEST_CASE("assembled cache: base-point specialization and Frobenius residual") {
    auto fam = legendre(3);
    auto cert = validate_family(fam);
    auto pr = compute_precisions(fam, 1);
    AssemblyDiagnostics diag;
    auto cache = assemble_frobenius(fam, cert, pr, &diag);  // throws if the
    // Gamma = 0 specialization or a valuation bound fails

    REQUIRE(cache.rmf.size() == 4);
    for (auto& s : cache.rmf) {
        REQUIRE(static_cast<long>(s.size()) <= pr.Ngamma);
        for (auto& q : s) REQUIRE(q.max_shift() == 0);
    }
    REQUIRE(diag.f_shift_worst <= ilog_ceil(3, 1) + 2);

    // r^sigma(G^p) r Fdot + r^sigma(G^p) F H - p G^(p-1) H^sigma(G^p) r F = 0
    const QqCtx& ctx = *diag.ctx;
    int trunc = static_cast<int>(pr.Ngamma);
    // re-wrap H at full truncation first: substitution drops indices past
    // the matrix's own truncation, and H was built with a tight one
    SeriesMat Hw(ctx, 2, trunc);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) Hw.at(i, j) = diag.cm.H.at(i, j);
    auto Hs = substitute_sigma_gamma_p(Hw);
    SeriesMat r1(ctx, 1, trunc);
    r1.at(0, 0) = diag.r;
    Series rs = substitute_sigma_gamma_p(r1).at(0, 0);
    Series gp1(3, ctx.zero());  // p Gamma^(p-1)
    gp1[2] = ctx.from_si(3);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            Series fdot = series_differentiate(diag.F.at(i, j));
            Series t1 = series_scale_mat(ctx, rs, series_scale_mat(ctx, diag.r, fdot, trunc), trunc);
            Series t2{ctx.zero()};
            Series t3{ctx.zero()};
            for (int l = 0; l < 2; ++l) {
                t2 = series_add(t2, series_scale_mat(ctx, rs,
                                                     series_scale_mat(ctx, diag.F.at(i, l), diag.cm.H.at(l, j), trunc), trunc));
                t3 = series_add(t3, series_scale_mat(ctx, gp1,
                                                     series_scale_mat(ctx, Hs.at(i, l),
                                                                      series_scale_mat(ctx, diag.r, diag.F.at(l, j), trunc), trunc), trunc));
            }
            auto res = series_sub(series_add(t1, t2), t3);
            res = series_truncate(res, trunc - 30);
            for (auto& q : res) REQUIRE(q.is_zero_mod(pr.Nb));
        }
}

TEST_CASE("cache coefficients are a genuine polynomial: inflating the truncation") {
    auto fam = legendre(3);
    auto cert = validate_family(fam);
    auto pr = compute_precisions(fam, 1);
    auto base = assemble_frobenius(fam, cert, pr);
    auto wide = assemble_frobenius(fam, cert, pr, nullptr, pr.Ngamma + 50);
    for (std::size_t e = 0; e < base.rmf.size(); ++e) {
        const Series& b = base.rmf[e];
        const Series& w = wide.rmf[e];
        for (long k = 0; k < pr.Ngamma + 50; ++k) {
            Qq bv = k < static_cast<long>(b.size()) ? b[static_cast<std::size_t>(k)] : base.ctx_nb->zero();
            Qq wv = k < static_cast<long>(w.size()) ? w[static_cast<std::size_t>(k)] : wide.ctx_nb->zero();
            if (k < pr.Ngamma) {
                if (!bv.is_zero()) {
                    REQUIRE(bv.eq_mod(qq_change_ctx(wv, *base.ctx_nb), pr.Nb));
                } else {
                    REQUIRE(wv.is_zero_mod(pr.Nb));
                }
            } else {
                REQUIRE(wv.is_zero_mod(pr.Nb));  // degree bound is sharp
            }
        }
    }
}
