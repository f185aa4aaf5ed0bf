#pragma once

// One-parameter hyperelliptic family Y^2 = Q(X, Gamma) with Q monic of odd
// X-degree 2g+1, plus the resultant certificate r = alpha*Q + beta*Q' that
// witnesses smoothness of the good fibers.  The certificate is computed
// exactly over Z[x]/chi (no p-adic truncation): Sylvester-matrix cofactors
// via a division-free determinant, then the defining identity is re-verified
// coefficient by coefficient, so sign conventions cannot silently drift.

#include "series.hpp"

namespace zetafam {

namespace exact {

// element of Z[x]/chi(x): mpz coefficient vector of length a
using XElem = std::vector<mpz_class>;
// polynomial in Gamma over Z[x]/chi
using GPoly = std::vector<XElem>;

struct Ring {
    std::vector<long> chi;  // monic, centered small integers
    int a;

    explicit Ring(std::vector<long> chi_) : chi(std::move(chi_)), a(static_cast<int>(chi.size()) - 1) {}

    XElem zero() const { return XElem(static_cast<std::size_t>(a), mpz_class(0)); }
    XElem one() const {
        XElem e = zero();
        e[0] = 1;
        return e;
    }
    bool is_zero(const XElem& e) const {
        for (auto& c : e)
            if (c != 0) return false;
        return true;
    }
    XElem add(const XElem& x, const XElem& y) const {
        XElem r = x;
        for (int i = 0; i < a; ++i) r[static_cast<std::size_t>(i)] += y[static_cast<std::size_t>(i)];
        return r;
    }
    XElem sub(const XElem& x, const XElem& y) const {
        XElem r = x;
        for (int i = 0; i < a; ++i) r[static_cast<std::size_t>(i)] -= y[static_cast<std::size_t>(i)];
        return r;
    }
    XElem neg(const XElem& x) const {
        XElem r = x;
        for (auto& c : r) c = -c;
        return r;
    }
    XElem mul(const XElem& x, const XElem& y) const {
        std::vector<mpz_class> t(static_cast<std::size_t>(2 * a - 1), mpz_class(0));
        for (int i = 0; i < a; ++i)
            for (int j = 0; j < a; ++j)
                t[static_cast<std::size_t>(i + j)] += x[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(j)];
        for (int j = 2 * a - 2; j >= a; --j) {
            mpz_class c = t[static_cast<std::size_t>(j)];
            if (c == 0) continue;
            t[static_cast<std::size_t>(j)] = 0;
            for (int i = 0; i < a; ++i) t[static_cast<std::size_t>(j - a + i)] -= c * chi[static_cast<std::size_t>(i)];
        }
        t.resize(static_cast<std::size_t>(a));
        return t;
    }
    XElem mul_si(const XElem& x, long v) const {
        XElem r = x;
        for (auto& c : r) c *= v;
        return r;
    }

    GPoly gzero() const { return {}; }
    void gtrim(GPoly& v) const {
        while (!v.empty() && is_zero(v.back())) v.pop_back();
    }
    GPoly gadd(const GPoly& x, const GPoly& y) const {
        GPoly r(std::max(x.size(), y.size()), zero());
        for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i];
        for (std::size_t i = 0; i < y.size(); ++i) r[i] = add(r[i], y[i]);
        gtrim(r);
        return r;
    }
    GPoly gneg(const GPoly& x) const {
        GPoly r = x;
        for (auto& e : r) e = neg(e);
        return r;
    }
    GPoly gmul(const GPoly& x, const GPoly& y) const {
        if (x.empty() || y.empty()) return {};
        GPoly r(x.size() + y.size() - 1, zero());
        for (std::size_t i = 0; i < x.size(); ++i)
            for (std::size_t j = 0; j < y.size(); ++j) r[i + j] = add(r[i + j], mul(x[i], y[j]));
        gtrim(r);
        return r;
    }
    GPoly gmul_si(const GPoly& x, long v) const {
        GPoly r = x;
        for (auto& e : r) e = mul_si(e, v);
        gtrim(r);
        return r;
    }
    bool gis_zero(const GPoly& x) const {
        for (auto& e : x)
            if (!is_zero(e)) return false;
        return true;
    }
};

// division-free determinant (Berkowitz characteristic-polynomial scheme);
// entries are GPoly, indexed row-major in an n x n vector
inline GPoly det_berkowitz(const Ring& R, const std::vector<GPoly>& M, int n) {
    if (n == 0) return GPoly{R.one()};
    auto at = [&](int i, int j) -> const GPoly& { return M[static_cast<std::size_t>(i) * n + j]; };
    std::vector<GPoly> V{GPoly{R.one()}};  // char poly coefficients, leading first
    for (int r = 1; r <= n; ++r) {
        // Toeplitz column: 1, -A[r-1][r-1], -(row . col), -(row . Mprev . col), ...
        std::vector<GPoly> t(static_cast<std::size_t>(r) + 1);
        t[0] = GPoly{R.one()};
        t[1] = R.gneg(at(r - 1, r - 1));
        std::vector<GPoly> w(static_cast<std::size_t>(r - 1));
        for (int i = 0; i < r - 1; ++i) w[static_cast<std::size_t>(i)] = at(i, r - 1);
        for (int k = 2; k <= r; ++k) {
            GPoly dot;
            for (int i = 0; i < r - 1; ++i)
                dot = R.gadd(dot, R.gmul(at(r - 1, i), w[static_cast<std::size_t>(i)]));
            t[static_cast<std::size_t>(k)] = R.gneg(dot);
            if (k < r) {
                std::vector<GPoly> w2(static_cast<std::size_t>(r - 1));
                for (int i = 0; i < r - 1; ++i) {
                    GPoly s;
                    for (int j = 0; j < r - 1; ++j) s = R.gadd(s, R.gmul(at(i, j), w[static_cast<std::size_t>(j)]));
                    w2[static_cast<std::size_t>(i)] = std::move(s);
                }
                w = std::move(w2);
            }
        }
        std::vector<GPoly> V2(static_cast<std::size_t>(r) + 1);
        for (int i = 0; i <= r; ++i) {
            GPoly s;
            for (int j = 0; j < static_cast<int>(V.size()); ++j) {
                int k = i - j;
                if (k < 0 || k > r) continue;
                s = R.gadd(s, R.gmul(t[static_cast<std::size_t>(k)], V[static_cast<std::size_t>(j)]));
            }
            V2[static_cast<std::size_t>(i)] = std::move(s);
        }
        V = std::move(V2);
    }
    // constant term of det(lambda I - A) is (-1)^n det A
    GPoly d = V.back();
    if (n % 2 == 1) d = R.gneg(d);
    return d;
}

}  // namespace exact

struct CurveFamily {
    std::uint64_t p;
    int a;
    std::vector<long> chi;  // monic over F_p, centered lift
    int g;
    int kappa;
    // qc[i][j]: coefficient of X^i Gamma^j as an F_q element (length-a list
    // of centered integers)
    std::vector<std::vector<std::vector<long>>> qc;
    bool variant_basis = false;  // reduce to {X^i dX/sqrt(Q)^3} instead

    CurveFamily(std::uint64_t p_, std::vector<long> chi_,
                std::vector<std::vector<std::vector<long>>> qc_, bool variant = false)
        : p(p_), a(static_cast<int>(chi_.size()) - 1), chi(std::move(chi_)), qc(std::move(qc_)),
          variant_basis(variant) {
        if (p < 3 || !is_prime_u64(p)) throw BadFamilyError("p must be an odd prime");
        if (a < 1 || chi.back() != 1) throw BadFamilyError("chi must be monic of degree >= 1");
        int degx = static_cast<int>(qc.size()) - 1;
        if (degx < 3 || degx % 2 == 0) throw BadFamilyError("Q must have odd X-degree >= 3");
        g = (degx - 1) / 2;
        kappa = 0;
        for (auto& col : qc) {
            if (col.empty()) throw BadFamilyError("malformed Q coefficients");
            for (auto& e : col)
                if (static_cast<int>(e.size()) != a) throw BadFamilyError("coefficient length != deg chi");
            kappa = std::max(kappa, static_cast<int>(col.size()) - 1);
        }
        // monic in X with a Gamma-free leading coefficient
        const auto& lead = qc.back();
        for (std::size_t j = 0; j < lead.size(); ++j)
            for (int i = 0; i < a; ++i) {
                long want = (j == 0 && i == 0) ? 1 : 0;
                if (lead[j][static_cast<std::size_t>(i)] != want)
                    throw BadFamilyError("Q must be monic in X with leading coefficient 1");
            }
    }

    int degx() const { return 2 * g + 1; }

    // exact coefficient ring view
    exact::Ring ring() const { return exact::Ring(chi); }
    std::vector<exact::GPoly> q_exact() const {
        exact::Ring R = ring();
        std::vector<exact::GPoly> out(qc.size());
        for (std::size_t i = 0; i < qc.size(); ++i) {
            exact::GPoly gp(qc[i].size(), R.zero());
            for (std::size_t j = 0; j < qc[i].size(); ++j)
                for (int k = 0; k < a; ++k) gp[j][static_cast<std::size_t>(k)] = qc[i][j][static_cast<std::size_t>(k)];
            R.gtrim(gp);
            out[i] = std::move(gp);
        }
        return out;
    }

    // residue-field view; fp must outlive the returned field (ExtField keeps
    // a pointer to its base)
    ExtField<PrimeField> make_fq(const PrimeField& fp) const {
        PolyF<PrimeField> cb(chi.size());
        for (std::size_t i = 0; i < chi.size(); ++i) cb[i] = fp.from_int(chi[i]);
        return ExtField<PrimeField>(fp, cb);
    }
    // Qbar(X, gbar) over an extension field E containing F_q; embed maps an
    // F_q element into E
    template <class E, class Embed>
    PolyF<E> qbar_at(const E& field, const typename E::Elem& gbar, Embed embed) const {
        PolyF<E> out(qc.size(), field.zero());
        for (std::size_t i = 0; i < qc.size(); ++i) {
            auto acc = field.zero();
            auto gpow = field.one();
            for (std::size_t j = 0; j < qc[i].size(); ++j) {
                acc = field.add(acc, field.mul(embed(qc[i][j]), gpow));
                gpow = field.mul(gpow, gbar);
            }
            out[i] = acc;
        }
        poly_trim(field, out);
        return out;
    }
    // Qbar(X, 0) over F_q itself
    PolyF<ExtField<PrimeField>> qbar_zero(const ExtField<PrimeField>& fq) const {
        PolyF<ExtField<PrimeField>> out(qc.size(), fq.zero());
        for (std::size_t i = 0; i < qc.size(); ++i) out[i] = lift_fq(fq, qc[i][0]);
        poly_trim(fq, out);
        return out;
    }
    static ExtField<PrimeField>::Elem lift_fq(const ExtField<PrimeField>& fq, const std::vector<long>& e) {
        auto r = fq.zero();
        for (std::size_t i = 0; i < e.size(); ++i) r[i] = fq.base->from_int(e[i]);
        return r;
    }

    // Q as an X-polynomial with Gamma-series coefficients over a Q_q context
    std::vector<Series> q_series(const QqCtx& ctx) const {
        std::vector<Series> out(qc.size());
        for (std::size_t i = 0; i < qc.size(); ++i) {
            Series s(qc[i].size(), ctx.zero());
            for (std::size_t j = 0; j < qc[i].size(); ++j)
                for (int k = 0; k < a; ++k)
                    s[j].c[static_cast<std::size_t>(k)] = Padic(*ctx.zp, qc[i][j][static_cast<std::size_t>(k)]);
            qqpoly_trim(s);
            out[i] = std::move(s);
        }
        return out;
    }
};

struct ResultantCertificate {
    exact::Ring R;
    exact::GPoly r;                  // resultant r(Gamma), exact
    std::vector<exact::GPoly> alpha; // X-degree <= 2g-1
    std::vector<exact::GPoly> beta;  // X-degree <= 2g
    int rho;                         // deg_Gamma r
    int degB;                        // max deg_Gamma of alpha, beta
    int degD;                        // max deg_X of alpha, beta

    // conversions into a p-adic context
    Series r_series(const QqCtx& ctx) const { return to_series(ctx, r); }
    std::vector<Series> alpha_series(const QqCtx& ctx) const { return to_xpoly(ctx, alpha); }
    std::vector<Series> beta_series(const QqCtx& ctx) const { return to_xpoly(ctx, beta); }

    Series to_series(const QqCtx& ctx, const exact::GPoly& gp) const {
        Series s(gp.size(), ctx.zero());
        for (std::size_t j = 0; j < gp.size(); ++j)
            for (int k = 0; k < R.a; ++k) s[j].c[static_cast<std::size_t>(k)] = Padic(*ctx.zp, gp[j][static_cast<std::size_t>(k)]);
        qqpoly_trim(s);
        return s;
    }
    std::vector<Series> to_xpoly(const QqCtx& ctx, const std::vector<exact::GPoly>& v) const {
        std::vector<Series> out(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) out[i] = to_series(ctx, v[i]);
        return out;
    }
    // rbar over F_q
    PolyF<ExtField<PrimeField>> rbar(const ExtField<PrimeField>& fq) const {
        PolyF<ExtField<PrimeField>> out(r.size(), fq.zero());
        for (std::size_t j = 0; j < r.size(); ++j) {
            auto e = fq.zero();
            for (int k = 0; k < R.a; ++k) {
                mpz_class c = r[j][static_cast<std::size_t>(k)] % mpz_class(fq.base->p);
                if (c < 0) c += static_cast<unsigned long>(fq.base->p);
                e[static_cast<std::size_t>(k)] = c.get_ui();
            }
            out[j] = e;
        }
        poly_trim(fq, out);
        return out;
    }
};

inline ResultantCertificate validate_family(const CurveFamily& fam) {
    exact::Ring R = fam.ring();
    int g = fam.g;
    PrimeField fp(fam.p);
    auto fq = fam.make_fq(fp);

    // the base fiber must be smooth: Qbar(X, 0) squarefree
    auto qb0 = fam.qbar_zero(fq);
    PolyF<ExtField<PrimeField>> qb0d = poly_deriv(fq, qb0);
    auto gcd0 = poly_gcd(fq, qb0, qb0d);
    if (gcd0.size() != 1) throw BadFamilyError("bad base curve: Q(X,0) mod p is not squarefree");

    auto Q = fam.q_exact();
    // Q' in X
    std::vector<exact::GPoly> Qd(Q.size() - 1);
    for (std::size_t i = 1; i < Q.size(); ++i) Qd[i - 1] = R.gmul_si(Q[i], static_cast<long>(i));

    // Sylvester matrix of (Q, Q'): rows X^j*Q (j < 2g), then X^j*Q' (j <= 2g);
    // columns are coefficients of X^0..X^4g
    int n = 4 * g + 1;
    std::vector<exact::GPoly> S(static_cast<std::size_t>(n) * n, R.gzero());
    auto put = [&](int row, int col, const exact::GPoly& v) {
        if (col < n) S[static_cast<std::size_t>(row) * n + col] = v;
    };
    for (int j = 0; j < 2 * g; ++j)
        for (std::size_t c = 0; c < Q.size(); ++c) put(j, j + static_cast<int>(c), Q[c]);
    for (int j = 0; j <= 2 * g; ++j)
        for (std::size_t c = 0; c < Qd.size(); ++c) put(2 * g + j, j + static_cast<int>(c), Qd[c]);

    // cofactors along column 0: alpha_j, beta_j up to one global sign
    std::vector<exact::GPoly> cof(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        std::vector<exact::GPoly> minor(static_cast<std::size_t>(n - 1) * (n - 1));
        for (int r2 = 0, rr = 0; r2 < n; ++r2) {
            if (r2 == i) continue;
            for (int c2 = 1; c2 < n; ++c2)
                minor[static_cast<std::size_t>(rr) * (n - 1) + (c2 - 1)] = S[static_cast<std::size_t>(r2) * n + c2];
            ++rr;
        }
        auto d = exact::det_berkowitz(R, minor, n - 1);
        cof[static_cast<std::size_t>(i)] = (i % 2 == 0) ? d : R.gneg(d);
    }

    ResultantCertificate cert{R, {}, {}, {}, 0, 0, 0};
    cert.alpha.assign(cof.begin(), cof.begin() + 2 * g);
    cert.beta.assign(cof.begin() + 2 * g, cof.end());

    // re-verify the defining identity exactly: alpha*Q + beta*Q' must be
    // constant in X; its X^0 coefficient is r
    std::vector<exact::GPoly> E(static_cast<std::size_t>(n) + Q.size(), R.gzero());
    for (std::size_t i = 0; i < cert.alpha.size(); ++i)
        for (std::size_t c = 0; c < Q.size(); ++c)
            E[i + c] = R.gadd(E[i + c], R.gmul(cert.alpha[i], Q[c]));
    for (std::size_t i = 0; i < cert.beta.size(); ++i)
        for (std::size_t c = 0; c < Qd.size(); ++c)
            E[i + c] = R.gadd(E[i + c], R.gmul(cert.beta[i], Qd[c]));
    for (std::size_t c = 1; c < E.size(); ++c)
        if (!R.gis_zero(E[c])) throw PrecisionError("resultant certificate identity failed");
    cert.r = E[0];
    R.gtrim(cert.r);

    if (R.gis_zero(cert.r)) throw BadFamilyError("family generically singular: resultant is zero");
    auto rb = cert.rbar(fq);
    if (rb.empty() || fq.is_zero(rb[0]))
        throw BadFamilyError("bad base curve: resultant vanishes mod p at Gamma = 0");

    cert.rho = static_cast<int>(cert.r.size()) - 1;
    for (auto& v : {cert.alpha, cert.beta}) {
        for (std::size_t i = 0; i < v.size(); ++i) {
            auto t = v[i];
            R.gtrim(t);
            if (!t.empty()) {
                cert.degB = std::max(cert.degB, static_cast<int>(t.size()) - 1);
                cert.degD = std::max(cert.degD, static_cast<int>(i));
            }
        }
    }
    if (cert.rho > 4 * g * fam.kappa || cert.degD > 2 * g || cert.degB > (4 * g - 1) * fam.kappa)
        throw PrecisionError("resultant certificate degree bound violated");
    return cert;
}

}  // namespace zetafam
