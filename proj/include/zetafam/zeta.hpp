#pragma once

// Per-fiber stage: pick a good parameter value gammabar in an extension of
// F_q, build the Teichmuller specialization ring, evaluate the cached
// r(Gamma)^M F(Gamma) there, take the Frobenius norm product, and read the
// L-polynomial off its traces.

#include "deformation.hpp"
#include "oracle.hpp"

namespace zetafam {

using Fq = ExtField<PrimeField>;
using Fqn = ExtField<Fq>;

struct SpecializationContext {
    std::shared_ptr<QqCtx> ctx;   // Nb precision, shift budget sized for norms
    std::shared_ptr<QqnCtx> qn;   // Q_q[y]/phi, phi a Teichmuller modulus
    int n_eff;                    // degree of gammabar over F_q
    PolyF<Fq> phibar;             // its minimal polynomial over F_q
    Qqn gamma;
};

namespace detail {

// gammabar's minimal polynomial over F_p, as the product over its orbit
// under x -> x^p; the coefficients must land in the prime field
inline PolyF<PrimeField> prime_minimal_polynomial(const Fqn& amb, const Fqn::Elem& gbar) {
    const Fq& fq = *amb.base;
    const PrimeField& fp = *fq.base;
    std::vector<Fqn::Elem> orbit{gbar};
    auto cur = amb.pow(gbar, mpz_class(static_cast<unsigned long>(fp.p)));
    while (!amb.eq(cur, gbar)) {
        orbit.push_back(cur);
        cur = amb.pow(cur, mpz_class(static_cast<unsigned long>(fp.p)));
        if (orbit.size() > amb.deg() * fq.deg())
            throw PrecisionError("Frobenius orbit failed to close");
    }
    PolyF<Fqn> prod{amb.one()};
    for (auto& o : orbit) {
        PolyF<Fqn> lin{amb.sub(amb.zero(), o), amb.one()};
        prod = poly_mul(amb, prod, lin);
    }
    PolyF<PrimeField> out(prod.size());
    for (std::size_t i = 0; i < prod.size(); ++i) {
        const auto& c = prod[i];
        for (std::size_t k = 1; k < c.size(); ++k)
            if (!fq.is_zero(c[k]))
                throw PrecisionError("orbit product has a coefficient outside F_p");
        for (std::size_t k = 1; k < c[0].size(); ++k)
            if (c[0][k] != 0)
                throw PrecisionError("orbit product has a coefficient outside F_p");
        out[i] = c[0].empty() ? fp.zero() : c[0][0];
    }
    return out;
}

inline std::vector<Qqn> qqn_mat_mul(const QqnCtx& qn, const std::vector<Qqn>& A,
                                    const std::vector<Qqn>& B, int dim) {
    std::vector<Qqn> R(static_cast<std::size_t>(dim) * dim, qn.zero());
    for (int i = 0; i < dim; ++i)
        for (int l = 0; l < dim; ++l) {
            const Qqn& a = A[static_cast<std::size_t>(i) * dim + l];
            if (a.is_zero()) continue;
            for (int j = 0; j < dim; ++j)
                R[static_cast<std::size_t>(i) * dim + j] +=
                    a * B[static_cast<std::size_t>(l) * dim + j];
        }
    return R;
}

inline std::vector<Qqn> qqn_mat_frob(const std::vector<Qqn>& A, int k) {
    std::vector<Qqn> R(A.size());
    for (std::size_t e = 0; e < A.size(); ++e) R[e] = frobenius_qqn(A[e], k);
    return R;
}

}  // namespace detail

// gammabar is given inside a caller-chosen presentation F_{q^m} = F_q[y]/psibar
inline SpecializationContext build_specialization(const DeformationCache& cache, const Fqn& amb,
                                                  const Fqn::Elem& gbar) {
    const CurveFamily& fam = cache.fam;
    const Fq& fq = cache.ctx_nb->fq;
    if (amb.base != &fq) throw BadParameterError("ambient field must extend the family's F_q");

    SpecializationContext sc;
    sc.phibar = minimal_polynomial(amb, gbar);
    sc.n_eff = static_cast<int>(sc.phibar.size()) - 1;
    if (sc.n_eff > cache.profile.n)
        throw BadParameterError("parameter degree exceeds the precomputed bound n");

    // good fiber: the discriminant resultant must not vanish at gammabar
    {
        auto rb = cache.cert.rbar(fq);
        auto acc = amb.zero();
        for (std::size_t j = rb.size(); j-- > 0;)
            acc = amb.add(amb.mul(acc, gbar), amb.from_base(rb[j]));
        if (amb.is_zero(acc))
            throw BadParameterError("singular fiber: Q(X, gammabar) has a repeated root");
    }

    auto fbarp = detail::prime_minimal_polynomial(amb, gbar);
    auto f = teichmuller_modulus(fbarp, fam.p, cache.profile.Nb);

    int lam = ilog_ceil(fam.p, static_cast<std::uint64_t>(fam.g)) + 2;
    int budget = lam * (fam.a * sc.n_eff + 2 * fam.g) + 8;
    auto zp = std::make_shared<PadicCtx>(fam.p, cache.profile.Nb, budget);
    sc.ctx = std::make_shared<QqCtx>(zp, fam.chi);

    // split off the degree-n_eff factor of f over Z_q lying above phibar
    QqPoly fq_lift(f.size(), sc.ctx->zero());
    for (std::size_t i = 0; i < f.size(); ++i)
        fq_lift[i] = sc.ctx->from_padic(Padic(*zp, f[i]));
    PolyF<Fq> fbarp_q(f.size(), fq.zero());
    for (std::size_t i = 0; i < f.size(); ++i) {
        mpz_class c = f[i] % mpz_class(static_cast<unsigned long>(fam.p));
        if (c < 0) c += static_cast<unsigned long>(fam.p);
        fbarp_q[i] = fq.from_base(fq.base->from_int(static_cast<long>(c.get_ui())));
    }
    auto [cof, rem] = poly_divmod(fq, fbarp_q, sc.phibar);
    poly_trim(fq, rem);
    if (!rem.empty()) throw PrecisionError("F_q minimal polynomial does not divide the F_p one");
    auto [phi, rest] = hensel_split(*sc.ctx, fq_lift, sc.phibar, cof);
    (void)rest;

    sc.qn = std::make_shared<QqnCtx>(sc.ctx, phi, true);
    sc.gamma = sc.qn->gen();
    return sc;
}

// F(gamma) = p^-lam r(gamma)^-M * (p^lam r^M F)(gamma), row-major 2g x 2g
// over Q_{q^n}; the cache stores the p^lam-scaled matrix so its coefficients
// are integers even though F's entries have denominators up to p^lam
inline std::vector<Qqn> specialize_frobenius(const DeformationCache& cache,
                                             const SpecializationContext& sc) {
    const QqnCtx& qn = *sc.qn;
    int dim = 2 * cache.fam.g;
    Qqn rg = series_evaluate(cache.cert.r_series(*sc.ctx), qn);
    Qqn rinvm = rg.pow(mpz_class(-cache.profile.M));

    int lam = ilog_ceil(cache.fam.p, static_cast<std::uint64_t>(cache.fam.g)) + 2;
    Qq pinv(*sc.ctx);
    pinv.c[0] = Padic(*sc.ctx->zp, mpz_class(1), lam);
    Qqn scale = qn.from_qq(pinv) * rinvm;
    std::vector<Qqn> F(static_cast<std::size_t>(dim) * dim, qn.zero());
    for (std::size_t e = 0; e < F.size(); ++e) {
        const Series& s = cache.rmf[e];
        Series s2(s.size(), sc.ctx->zero());
        for (std::size_t k = 0; k < s.size(); ++k) s2[k] = qq_change_ctx(s[k], *sc.ctx);
        F[e] = series_evaluate(s2, qn) * scale;
        if (F[e].max_shift() > lam)
            throw PrecisionError("specialized Frobenius exceeds its order bound");
    }
    return F;
}

// matrix of the q^n-power Frobenius: T_{h+h'} = sigma^h'(T_h) T_h', built by
// binary doubling over e = a * n_eff applications of sigma
inline std::vector<Qqn> norm_product(const QqnCtx& qn, const std::vector<Qqn>& F, int dim,
                                     int e) {
    if (e < 1) throw BadParameterError("norm product needs at least one factor");
    std::vector<Qqn> acc;
    int hacc = 0;
    std::vector<Qqn> base = F;
    int hb = 1;
    while (e > 0) {
        if (e & 1) {
            acc = acc.empty() ? base : detail::qqn_mat_mul(qn, detail::qqn_mat_frob(acc, hb), base, dim);
            hacc += hb;
        }
        e >>= 1;
        if (e > 0) {
            base = detail::qqn_mat_mul(qn, detail::qqn_mat_frob(base, hb), base, dim);
            hb *= 2;
        }
    }
    (void)hacc;
    return acc;
}

// L-polynomial coefficients from the traces of the norm powers: p-adic
// Newton identities, centered lift of the low half, functional equation for
// the rest, and a cross-check of the computed high half against it
inline std::vector<mpz_class> lpolynomial(const DeformationCache& cache,
                                          const SpecializationContext& sc,
                                          const std::vector<Qqn>& Fg) {
    const QqnCtx& qn = *sc.qn;
    int g = cache.fam.g;
    int dim = 2 * g;
    int an = cache.fam.a * sc.n_eff;
    int N0 = cache.profile.N0;
    mpz_class q;
    mpz_pow_ui(q.get_mpz_t(), mpz_class(static_cast<unsigned long>(cache.fam.p)).get_mpz_t(),
               static_cast<unsigned long>(an));

    auto FN = norm_product(qn, Fg, dim, an);

    // s_k = tr(FN^k); the traces must be rational (lie in Z_p)
    std::vector<Padic> s(static_cast<std::size_t>(dim) + 1, Padic(*sc.ctx->zp, 0L));
    std::vector<Qqn> pw = FN;
    for (int k = 1; k <= dim; ++k) {
        Qqn tr = qn.zero();
        for (int i = 0; i < dim; ++i) tr += pw[static_cast<std::size_t>(i) * dim + i];
        for (std::size_t j = 1; j < tr.c.size(); ++j)
            if (!tr.c[j].is_zero_mod(N0)) throw PrecisionError("trace is not rational");
        for (std::size_t j = 1; j < tr.c[0].c.size(); ++j)
            if (!tr.c[0].c[j].is_zero_mod(N0)) throw PrecisionError("trace is not rational");
        s[static_cast<std::size_t>(k)] = tr.c[0].c[0];
        if (k < dim) pw = detail::qqn_mat_mul(qn, pw, FN, dim);
    }

    std::vector<Padic> ap(static_cast<std::size_t>(dim) + 1, Padic(*sc.ctx->zp, 0L));
    ap[0] = Padic(*sc.ctx->zp, 1L);
    for (int k = 1; k <= dim; ++k) {
        Padic t = s[static_cast<std::size_t>(k)];
        for (int i = 1; i < k; ++i) t = t + ap[static_cast<std::size_t>(i)] * s[static_cast<std::size_t>(k - i)];
        ap[static_cast<std::size_t>(k)] = (-t).div_si(k);
    }

    std::vector<mpz_class> a(static_cast<std::size_t>(dim) + 1);
    a[0] = 1;
    for (int k = 1; k <= g; ++k) {
        mpz_class v = ap[static_cast<std::size_t>(k)].to_centered(N0);
        // |a_k| <= binom(2g, k) q^(k/2)
        mpz_class bound, qk;
        mpz_bin_uiui(bound.get_mpz_t(), static_cast<unsigned long>(dim), static_cast<unsigned long>(k));
        mpz_pow_ui(qk.get_mpz_t(), q.get_mpz_t(), static_cast<unsigned long>(k));
        if (v * v > bound * bound * qk)
            throw PrecisionError("L-polynomial coefficient violates the Weil bound");
        a[static_cast<std::size_t>(k)] = v;
    }
    mpz_class qp = 1;
    for (int i = g - 1; i >= 0; --i) {
        qp *= q;
        a[static_cast<std::size_t>(dim - i)] = qp * a[static_cast<std::size_t>(i)];
    }
    // the high half was also computed p-adically; it must match
    for (int k = g + 1; k <= dim; ++k) {
        Padic want(*sc.ctx->zp, a[static_cast<std::size_t>(k)]);
        if (!ap[static_cast<std::size_t>(k)].eq_mod(want, N0))
            throw PrecisionError("functional equation fails at the working precision");
    }
    return a;
}

struct ZetaResult {
    std::vector<mpz_class> a;  // L-polynomial, degree 2g, a[0] = 1
    mpz_class field_size;      // p^(a n_eff)
    int an;
    int g;
    std::vector<mpz_class> counts;  // #X over the degree 1..2g extensions
};

inline ZetaResult zeta_assemble(const std::vector<mpz_class>& a, std::uint64_t p, int an, int g) {
    ZetaResult z;
    z.a = a;
    z.an = an;
    z.g = g;
    mpz_pow_ui(z.field_size.get_mpz_t(), mpz_class(static_cast<unsigned long>(p)).get_mpz_t(),
               static_cast<unsigned long>(an));
    const mpz_class& q = z.field_size;
    int dim = 2 * g;
    if (static_cast<int>(a.size()) != dim + 1 || a[0] != 1)
        throw PrecisionError("malformed L-polynomial");
    mpz_class qp = 1;
    for (int i = g - 1; i >= 0; --i) {
        qp *= q;
        if (a[static_cast<std::size_t>(dim - i)] != qp * a[static_cast<std::size_t>(i)])
            throw PrecisionError("functional equation fails");
    }
    // power sums back out of the coefficients, then counts and Weil bounds
    std::vector<mpz_class> s(static_cast<std::size_t>(dim) + 1);
    mpz_class qk = 1;
    for (int k = 1; k <= dim; ++k) {
        mpz_class t = k * a[static_cast<std::size_t>(k)];
        for (int i = 1; i < k; ++i) t += a[static_cast<std::size_t>(i)] * s[static_cast<std::size_t>(k - i)];
        s[static_cast<std::size_t>(k)] = -t;
        qk *= q;
        if (s[static_cast<std::size_t>(k)] * s[static_cast<std::size_t>(k)] > 4 * g * g * qk)
            throw PrecisionError("point count violates the Weil bound");
        z.counts.push_back(qk + 1 - s[static_cast<std::size_t>(k)]);
    }
    return z;
}

inline ZetaResult zeta_at(const DeformationCache& cache, const SpecializationContext& sc) {
    auto F = specialize_frobenius(cache, sc);
    auto a = lpolynomial(cache, sc, F);
    return zeta_assemble(a, cache.fam.p, cache.fam.a * sc.n_eff, cache.fam.g);
}

}  // namespace zetafam
