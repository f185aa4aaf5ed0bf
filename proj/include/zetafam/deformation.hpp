#pragma once

// Family-level stage: solve r*Cdot = -C*H for the local solution C(Gamma),
// invert C^sigma(Gamma^p), and assemble the analytic continuation
// r(Gamma)^M * F(Gamma) as a genuine polynomial matrix mod p^Nb.

#include <chrono>

#include "cohomology.hpp"
#include "precision.hpp"

namespace zetafam {

struct ConnectionSolution {
    // C[k] is the Gamma^k coefficient matrix, row-major dim x dim
    std::vector<std::vector<Qq>> C;
    int dim;
};

inline ConnectionSolution solve_connection_ode(const QqCtx& ctx, const SeriesMat& H,
                                               const Series& r, long ngamma) {
    int dim = H.dim;
    // constant coefficient matrices of H and the coefficients of r
    int h = 0;
    for (auto& s : H.e) h = std::max(h, static_cast<int>(s.size()) - 1);
    std::vector<std::vector<Qq>> hmat(static_cast<std::size_t>(h) + 1,
                                      std::vector<Qq>(static_cast<std::size_t>(dim) * dim, ctx.zero()));
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
            const Series& s = H.at(i, j);
            for (std::size_t k = 0; k < s.size(); ++k)
                hmat[k][static_cast<std::size_t>(i) * dim + j] = s[k];
        }
    int rho = static_cast<int>(r.size()) - 1;
    Qq r0inv = r[0].inv();

    ConnectionSolution sol;
    sol.dim = dim;
    sol.C.reserve(static_cast<std::size_t>(ngamma));
    std::vector<Qq> ident(static_cast<std::size_t>(dim) * dim, ctx.zero());
    for (int i = 0; i < dim; ++i) ident[static_cast<std::size_t>(i) * dim + i] = ctx.one();
    sol.C.push_back(std::move(ident));

    for (long k = 1; k < ngamma; ++k) {
        std::vector<Qq> acc(static_cast<std::size_t>(dim) * dim, ctx.zero());
        for (int i = 0; i <= std::min<long>(h, k - 1); ++i) {
            const auto& Cm = sol.C[static_cast<std::size_t>(k - 1 - i)];
            const auto& Hm = hmat[static_cast<std::size_t>(i)];
            for (int x = 0; x < dim; ++x)
                for (int l = 0; l < dim; ++l) {
                    const Qq& c = Cm[static_cast<std::size_t>(x) * dim + l];
                    if (c.is_zero()) continue;
                    for (int y = 0; y < dim; ++y)
                        acc[static_cast<std::size_t>(x) * dim + y] -=
                            c * Hm[static_cast<std::size_t>(l) * dim + y];
                }
        }
        for (long i = 1; i <= std::min<long>(rho, k - 1); ++i) {
            const Qq& ri = r[static_cast<std::size_t>(i)];
            if (ri.is_zero()) continue;
            Qq w = ri.mul_si(k - i);
            const auto& Cm = sol.C[static_cast<std::size_t>(k - i)];
            for (std::size_t e = 0; e < acc.size(); ++e) acc[e] -= Cm[e] * w;
        }
        for (auto& e : acc) e = (e * r0inv).div_si(k);
        sol.C.push_back(std::move(acc));
    }
    return sol;
}

// ord(C_k) >= -eta ceil(log_p(k+1)); violation means the solver is wrong
inline int check_c_valuation(const ConnectionSolution& sol, std::uint64_t p, int eta) {
    int worst = 0;
    for (std::size_t k = 0; k < sol.C.size(); ++k) {
        int bound = eta * ilog_ceil(p, static_cast<std::uint64_t>(k) + 1);
        for (auto& e : sol.C[k]) {
            int s = e.max_shift();
            worst = std::max(worst, s);
            if (s > bound) throw PrecisionError("connection solution exceeds its valuation bound");
        }
    }
    return worst;
}

// same bound for D = (C^sigma(Gamma^p))^-1, with k replaced by k/p
inline int check_d_valuation(const SeriesMat& D, std::uint64_t p, int eta) {
    int worst = 0;
    for (auto& s : D.e)
        for (std::size_t k = 0; k < s.size(); ++k) {
            // ceil(log_p(k/p + 1)) = ceil(log_p(k + p)) - 1
            int bound = eta * (ilog_ceil(p, static_cast<std::uint64_t>(k) + p) - 1);
            int sh = s[k].max_shift();
            worst = std::max(worst, sh);
            if (sh > bound) throw PrecisionError("inverse solution exceeds its valuation bound");
        }
    return worst;
}

inline Series series_pow_trunc(const QqCtx& ctx, const Series& s, unsigned long e, int trunc) {
    SeriesMat acc(ctx, 1, trunc);
    acc.at(0, 0) = Series{ctx.one()};
    SeriesMat base(ctx, 1, trunc);
    base.at(0, 0) = series_truncate(s, trunc);
    while (e > 0) {
        if (e & 1) acc = matrix_mul(acc, base, trunc);
        e >>= 1;
        if (e > 0) base = matrix_mul(base, base, trunc);
    }
    return acc.at(0, 0);
}

struct DeformationCache {
    CurveFamily fam;
    ResultantCertificate cert;
    PrecisionProfile profile;
    std::shared_ptr<QqCtx> ctx_nb;  // precision Nb
    std::vector<Qq> F0;             // 2g x 2g at precision Nb (may carry shifts)
    // r(Gamma)^M F(Gamma): (2g)^2 integral polynomials of degree < Ngamma
    std::vector<Series> rmf;
};

struct AssemblyDiagnostics {
    std::shared_ptr<QqCtx> ctx;  // the Na-precision working context
    SeriesMat C, D, F;           // kept only on request, for residual tests
    Series r;
    ConnectionMatrix cm;
    int c_shift_worst = 0, d_shift_worst = 0, f_shift_worst = 0;
    // (stage name, wall seconds) in pipeline order
    std::vector<std::pair<std::string, double>> stage_seconds;
};

inline DeformationCache assemble_frobenius(const CurveFamily& fam, const ResultantCertificate& cert,
                                           const PrecisionProfile& pr,
                                           AssemblyDiagnostics* diag = nullptr,
                                           long ngamma_override = 0) {
    int g = fam.g;
    int dim = 2 * g;
    long ngamma = ngamma_override > 0 ? ngamma_override : pr.Ngamma;
    int trunc = static_cast<int>(ngamma);
    int L = detail::ilog_ceil_mpz(static_cast<unsigned long>(fam.p), mpz_class(ngamma));
    int budget = (2 * pr.eta + 1) * L + ilog_ceil(fam.p, static_cast<std::uint64_t>(g)) + 16;
    auto zp = std::make_shared<PadicCtx>(fam.p, pr.Na, budget);
    auto ctx = std::make_shared<QqCtx>(zp, fam.chi);

    auto t0 = std::chrono::steady_clock::now();
    auto mark = [&](const char* stage) {
        auto t1 = std::chrono::steady_clock::now();
        if (diag) diag->stage_seconds.emplace_back(stage, std::chrono::duration<double>(t1 - t0).count());
        t0 = t1;
    };

    auto cm = connection_matrix(fam, cert, *ctx);
    Series r = cert.r_series(*ctx);
    mark("H");

    auto sol = solve_connection_ode(*ctx, cm.H, r, ngamma);
    int cworst = check_c_valuation(sol, fam.p, pr.eta);
    mark("C");

    SeriesMat C(*ctx, dim, trunc);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
            Series s(static_cast<std::size_t>(ngamma), ctx->zero());
            for (std::size_t k = 0; k < s.size(); ++k)
                s[k] = sol.C[k][static_cast<std::size_t>(i) * dim + j];
            qqpoly_trim(s);
            C.at(i, j) = std::move(s);
        }
    sol.C.clear();

    auto D = newton_invert_matrix(substitute_sigma_gamma_p(C), trunc);
    int dworst = check_d_valuation(D, fam.p, pr.eta);
    mark("inverse");

    auto fz = kedlaya_frobenius_zero(fam, cert, ctx);
    mark("F(0)");

    SeriesMat F0m(*ctx, dim, trunc);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
            F0m.at(i, j) = Series{fz.F0[static_cast<std::size_t>(i) * dim + j]};
    auto F = matrix_mul(matrix_mul(D, F0m, trunc), C, trunc);
    int fworst = F.max_shift();
    if (fworst > ilog_ceil(fam.p, static_cast<std::uint64_t>(g)) + 2)
        throw PrecisionError("deformed Frobenius exceeds its order bound");
    mark("F(Gamma)");

    Series rM = series_pow_trunc(*ctx, r, static_cast<unsigned long>(pr.M), trunc);

    // clear denominators and drop to precision Nb: the entries of F carry
    // denominators up to p^lam, so r^M F itself need not be integral (its
    // value at Gamma = 0 is r(0)^M F(0), and F(0) has negative-order entries
    // at genus >= 2); the cache stores the scaled matrix p^lam r^M F
    int lam = ilog_ceil(fam.p, static_cast<std::uint64_t>(g)) + 2;
    auto zpb = std::make_shared<PadicCtx>(fam.p, pr.Nb, fz.max_shift + 4);
    DeformationCache cache{fam, cert, pr, std::make_shared<QqCtx>(zpb, fam.chi), {}, {}};
    cache.F0.reserve(fz.F0.size());
    for (auto& e : fz.F0) cache.F0.push_back(qq_change_ctx(e, *cache.ctx_nb));
    cache.rmf.resize(static_cast<std::size_t>(dim) * dim);
    SeriesMat rMm(*ctx, 1, trunc);
    rMm.at(0, 0) = rM;
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
            SeriesMat fm(*ctx, 1, trunc);
            fm.at(0, 0) = F.at(i, j);
            Series prod = matrix_mul(rMm, fm, trunc).at(0, 0);
            Series out(prod.size(), cache.ctx_nb->zero());
            for (std::size_t k = 0; k < prod.size(); ++k) {
                Qq v(*cache.ctx_nb);
                for (int c = 0; c < fam.a; ++c) {
                    const Padic& x = prod[k].c[static_cast<std::size_t>(c)];
                    if (x.s > lam)
                        throw PrecisionError("r^M F denominator exceeds its bound (entry " +
                                             std::to_string(i) + "," + std::to_string(j) +
                                             " coeff " + std::to_string(k) + " shift " +
                                             std::to_string(x.s) + ")");
                    v.c[static_cast<std::size_t>(c)] = Padic(*zpb, x.m * zp->pow(lam - x.s));
                }
                out[k] = std::move(v);
            }
            qqpoly_trim(out);
            cache.rmf[static_cast<std::size_t>(i) * dim + j] = std::move(out);
        }
    mark("r^M F");

    // C(0) = I, so specializing at Gamma = 0 must recover p^lam r(0)^M F(0)
    {
        Qq r0m = cache.ctx_nb->one();
        Qq r0 = qq_change_ctx(r[0], *cache.ctx_nb);
        for (long e = 0; e < pr.M; ++e) r0m = r0m * r0;
        Qq plam = cache.ctx_nb->one();
        plam.c[0] = Padic(*zpb, zpb->pow(lam));
        int chk = pr.Nb - fz.max_shift - fworst;
        for (std::size_t e = 0; e < cache.rmf.size(); ++e) {
            Qq at0 = cache.rmf[e].empty() ? cache.ctx_nb->zero() : cache.rmf[e][0];
            if (!at0.eq_mod(r0m * cache.F0[e] * plam, chk))
                throw PrecisionError("cache does not specialize to F(0) at the base point");
        }
    }

    if (diag) {
        diag->ctx = ctx;
        diag->C = std::move(C);
        diag->D = std::move(D);
        diag->F = std::move(F);
        diag->r = std::move(r);
        diag->cm = std::move(cm);
        diag->c_shift_worst = cworst;
        diag->d_shift_worst = dworst;
        diag->f_shift_worst = fworst;
    }
    return cache;
}

}  // namespace zetafam
