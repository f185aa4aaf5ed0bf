#pragma once

// Q_q = Q_p[x]/chi(x), unramified of degree a, at fixed absolute precision.
// chi is a centered small-integer lift of an irreducible chibar over F_p.
// Also: the Teichmuller-modulus construction over Z_p and classical Hensel
// splitting over Z_q, both used to build the specialization ring Q_{q^n}.

#include <memory>

#include "gf.hpp"
#include "padic.hpp"

namespace zetafam {

struct QqCtx;

class Qq {
  public:
    const QqCtx* ctx = nullptr;
    std::vector<Padic> c;  // length a

    Qq() = default;
    explicit Qq(const QqCtx& ctx_);

    bool is_zero() const {
        for (auto& x : c)
            if (!x.is_zero()) return false;
        return true;
    }
    int max_shift() const {
        int s = 0;
        for (auto& x : c) s = std::max(s, x.s);
        return s;
    }
    void normalize() {
        for (auto& x : c) x.normalize();
    }

    Qq operator+(const Qq& o) const;
    Qq operator-(const Qq& o) const;
    Qq operator-() const;
    Qq operator*(const Qq& o) const;
    Qq& operator+=(const Qq& o) { return *this = *this + o; }
    Qq& operator-=(const Qq& o) { return *this = *this - o; }
    Qq& operator*=(const Qq& o) { return *this = *this * o; }
    Qq mul_padic(const Padic& t) const;
    Qq mul_si(long v) const;
    Qq div_si(long v) const;
    Qq inv() const;
    Qq pow(mpz_class e) const;
    bool eq_mod(const Qq& o, int k) const {
        for (std::size_t i = 0; i < c.size(); ++i)
            if (!c[i].eq_mod(o.c[i], k)) return false;
        return true;
    }
    bool is_zero_mod(int k) const {
        for (auto& x : c)
            if (!x.is_zero_mod(k)) return false;
        return true;
    }
};

struct QqCtx {
    std::shared_ptr<PadicCtx> zp;
    std::vector<long> chi;  // centered integer coefficients, monic, length a+1
    int a;
    PrimeField fp;
    ExtField<PrimeField> fq;  // F_p[x]/chibar

    QqCtx(std::shared_ptr<PadicCtx> zp_, std::vector<long> chi_)
        : zp(std::move(zp_)),
          chi(std::move(chi_)),
          a(static_cast<int>(chi.size()) - 1),
          fp(zp->p),
          fq(fp, reduce_chibar(fp, chi)) {
        if (a < 1 || chi.back() != 1) throw BadFamilyError("chi must be monic of degree >= 1");
    }

    static PolyF<PrimeField> reduce_chibar(const PrimeField& fp, const std::vector<long>& chi) {
        PolyF<PrimeField> cb(chi.size());
        for (std::size_t i = 0; i < chi.size(); ++i) cb[i] = fp.from_int(chi[i]);
        return cb;
    }

    // sigma^k(x) for k = 1..a-1, filled lazily
    mutable std::vector<Qq> sigma_x_cache;
    const Qq& sigma_x(int k) const;

    Qq zero() const { return Qq(*this); }
    Qq one() const {
        Qq r(*this);
        r.c[0] = Padic(*zp, 1);
        return r;
    }
    Qq from_si(long v) const {
        Qq r(*this);
        r.c[0] = Padic(*zp, v);
        return r;
    }
    Qq from_padic(const Padic& t) const {
        Qq r(*this);
        r.c[0] = t;
        return r;
    }
    Qq gen() const {
        Qq r(*this);
        if (a == 1) {
            r.c[0] = Padic(*zp, -chi[0]);
        } else {
            r.c[1] = Padic(*zp, 1);
        }
        return r;
    }
    // naive lift with digits in [0, p)
    Qq lift(const ExtField<PrimeField>::Elem& e) const {
        Qq r(*this);
        for (int i = 0; i < a; ++i) r.c[i] = Padic(*zp, static_cast<long>(e[i]));
        return r;
    }
    ExtField<PrimeField>::Elem reduce(const Qq& u) const {
        ExtField<PrimeField>::Elem e = fq.zero();
        for (int i = 0; i < a; ++i) e[i] = u.c[i].reduce_fp();
        return e;
    }
    bool compatible(const QqCtx& o) const { return zp->compatible(*o.zp) && chi == o.chi; }
};

inline Qq::Qq(const QqCtx& ctx_) : ctx(&ctx_), c(ctx_.a, Padic(*ctx_.zp)) {}

inline Qq Qq::operator+(const Qq& o) const {
    Qq r(*ctx);
    for (int i = 0; i < ctx->a; ++i) r.c[i] = c[i] + o.c[i];
    return r;
}
inline Qq Qq::operator-(const Qq& o) const {
    Qq r(*ctx);
    for (int i = 0; i < ctx->a; ++i) r.c[i] = c[i] - o.c[i];
    return r;
}
inline Qq Qq::operator-() const {
    Qq r(*ctx);
    for (int i = 0; i < ctx->a; ++i) r.c[i] = -c[i];
    return r;
}
inline Qq Qq::mul_padic(const Padic& t) const {
    Qq r(*ctx);
    for (int i = 0; i < ctx->a; ++i) r.c[i] = c[i] * t;
    return r;
}
inline Qq Qq::mul_si(long v) const {
    Qq r(*ctx);
    for (int i = 0; i < ctx->a; ++i) r.c[i] = c[i].mul_si(v);
    return r;
}
inline Qq Qq::div_si(long v) const {
    Qq r(*ctx);
    for (int i = 0; i < ctx->a; ++i) r.c[i] = c[i].div_si(v);
    return r;
}

inline Qq Qq::operator*(const Qq& o) const {
    int a = ctx->a;
    if (a == 1) {
        Qq r(*ctx);
        r.c[0] = c[0] * o.c[0];
        return r;
    }
    std::vector<Padic> conv(2 * a - 1, Padic(*ctx->zp));
    for (int i = 0; i < a; ++i) {
        if (c[i].is_zero()) continue;
        for (int j = 0; j < a; ++j) {
            if (o.c[j].is_zero()) continue;
            conv[i + j] += c[i] * o.c[j];
        }
    }
    // reduce modulo chi (monic, small-integer coefficients)
    for (int d = 2 * a - 2; d >= a; --d) {
        if (conv[d].is_zero()) continue;
        for (int j = 0; j < a; ++j)
            if (ctx->chi[j] != 0) conv[d - a + j] -= conv[d].mul_si(ctx->chi[j]);
        conv[d] = Padic(*ctx->zp);
    }
    Qq r(*ctx);
    for (int i = 0; i < a; ++i) r.c[i] = conv[i];
    return r;
}

inline Qq Qq::inv() const {
    // residue inverse + Newton lift; input must be a unit (integral with
    // nonzero reduction)
    Qq u = *this;
    u.normalize();
    if (u.max_shift() > 0) throw PrecisionError("Qq inverse of a non-integral element");
    auto ub = ctx->reduce(u);
    auto vb = ctx->fq.inv(ub);  // throws on zero
    Qq v = ctx->lift(vb);
    Qq two = ctx->from_si(2);
    int iters = ilog_ceil(2, static_cast<std::uint64_t>(ctx->zp->prec)) + 1;
    for (int i = 0; i < iters; ++i) v = v * (two - u * v);
    return v;
}

inline Qq Qq::pow(mpz_class e) const {
    Qq r = ctx->one(), b = *this;
    while (e > 0) {
        if (mpz_odd_p(e.get_mpz_t())) r = r * b;
        b = b * b;
        e >>= 1;
    }
    return r;
}

// ----- dense polynomials over Qq (used by Hensel splitting and Q_{q^n}) ----

using QqPoly = std::vector<Qq>;

inline void qqpoly_trim(QqPoly& v) {
    while (!v.empty() && v.back().is_zero()) v.pop_back();
}
inline QqPoly qqpoly_add(const QqPoly& x, const QqPoly& y) {
    QqPoly r = x.size() >= y.size() ? x : y;
    const QqPoly& s = x.size() >= y.size() ? y : x;
    for (std::size_t i = 0; i < s.size(); ++i) r[i] += s[i];
    qqpoly_trim(r);
    return r;
}
inline QqPoly qqpoly_sub(const QqPoly& x, const QqPoly& y) {
    QqPoly r = x;
    r.resize(std::max(x.size(), y.size()), y.empty() ? Qq() : y[0].ctx->zero());
    for (std::size_t i = 0; i < y.size(); ++i) r[i] -= y[i];
    qqpoly_trim(r);
    return r;
}
inline QqPoly qqpoly_mul(const QqPoly& x, const QqPoly& y) {
    if (x.empty() || y.empty()) return {};
    QqPoly r(x.size() + y.size() - 1, x[0].ctx->zero());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i].is_zero()) continue;
        for (std::size_t j = 0; j < y.size(); ++j) {
            if (y[j].is_zero()) continue;
            r[i + j] += x[i] * y[j];
        }
    }
    qqpoly_trim(r);
    return r;
}
// division with remainder by a monic divisor
inline std::pair<QqPoly, QqPoly> qqpoly_divmod_monic(QqPoly x, const QqPoly& m) {
    if (m.empty()) throw PrecisionError("division by zero polynomial");
    qqpoly_trim(x);
    if (x.size() < m.size()) return {{}, x};
    QqPoly q(x.size() - m.size() + 1, m[0].ctx->zero());
    for (std::size_t off = q.size(); off-- > 0;) {
        Qq c = x[off + m.size() - 1];
        if (c.is_zero()) continue;
        q[off] = c;
        for (std::size_t i = 0; i < m.size(); ++i) x[off + i] -= c * m[i];
    }
    qqpoly_trim(x);
    qqpoly_trim(q);
    return {q, x};
}
inline QqPoly qqpoly_mod_monic(QqPoly x, const QqPoly& m) {
    return qqpoly_divmod_monic(std::move(x), m).second;
}

// ----- Frobenius on Q_q -----

inline const Qq& QqCtx::sigma_x(int k) const {
    // sigma^k(x): lift of xbar^(p^k), refined by Newton iteration on chi
    if (sigma_x_cache.empty()) sigma_x_cache.resize(static_cast<std::size_t>(a));
    Qq& slot = sigma_x_cache[static_cast<std::size_t>(k)];
    if (slot.ctx != nullptr) return slot;
    mpz_class pk;
    ::mpz_pow_ui(pk.get_mpz_t(), zp->pz.get_mpz_t(), static_cast<unsigned long>(k));
    auto xb = fq.gen();
    auto target = fq.pow(xb, pk);
    Qq t = lift(target);
    // chi and chi' with small integer coefficients
    int iters = ilog_ceil(2, static_cast<std::uint64_t>(zp->prec)) + 1;
    for (int it = 0; it < iters; ++it) {
        // evaluate chi(t) and chi'(t) by Horner
        Qq val = from_si(chi[a]);
        Qq dval = zero();
        for (int j = a - 1; j >= 0; --j) {
            dval = dval * t + val;
            val = val * t + from_si(chi[j]);
        }
        t = t - val * dval.inv();
    }
    slot = t;
    return slot;
}

inline Qq frobenius_qq(const Qq& u, int k) {
    if (k < 0) throw PrecisionError("negative Frobenius power");
    const QqCtx& ctx = *u.ctx;
    k %= ctx.a;
    if (k == 0) return u;
    const Qq& sx = ctx.sigma_x(k);
    // Horner evaluation of u's coefficient polynomial at sigma^k(x)
    Qq r = ctx.from_padic(u.c[static_cast<std::size_t>(ctx.a - 1)]);
    for (int j = ctx.a - 2; j >= 0; --j) r = r * sx + ctx.from_padic(u.c[static_cast<std::size_t>(j)]);
    return r;
}

// ----- integer-polynomial arithmetic mod p^nu (Teichmuller modulus) -----

namespace detail {

using ZPoly = std::vector<mpz_class>;

inline void zpoly_trim(ZPoly& v) {
    while (!v.empty() && v.back() == 0) v.pop_back();
}
inline void zpoly_reduce(ZPoly& v, const mpz_class& mod) {
    for (auto& x : v) {
        x %= mod;
        if (x < 0) x += mod;
    }
    zpoly_trim(v);
}
inline ZPoly zpoly_mul(const ZPoly& x, const ZPoly& y, const mpz_class& mod) {
    if (x.empty() || y.empty()) return {};
    ZPoly r(x.size() + y.size() - 1, mpz_class(0));
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] == 0) continue;
        for (std::size_t j = 0; j < y.size(); ++j) r[i + j] += x[i] * y[j];
    }
    zpoly_reduce(r, mod);
    return r;
}
// divisor must be monic
inline std::pair<ZPoly, ZPoly> zpoly_divmod(ZPoly x, const ZPoly& m, const mpz_class& mod) {
    zpoly_trim(x);
    if (x.size() < m.size()) return {{}, x};
    ZPoly q(x.size() - m.size() + 1, mpz_class(0));
    for (std::size_t off = q.size(); off-- > 0;) {
        mpz_class c = x[off + m.size() - 1] % mod;
        if (c == 0) continue;
        q[off] = c;
        for (std::size_t i = 0; i < m.size(); ++i) {
            x[off + i] -= c * m[i];
            x[off + i] %= mod;
        }
    }
    zpoly_reduce(x, mod);
    zpoly_reduce(q, mod);
    return {q, x};
}
inline ZPoly zpoly_powmod(ZPoly base, mpz_class e, const ZPoly& m, const mpz_class& mod) {
    ZPoly r{mpz_class(1)};
    base = zpoly_divmod(std::move(base), m, mod).second;
    while (e > 0) {
        if (mpz_odd_p(e.get_mpz_t())) r = zpoly_divmod(zpoly_mul(r, base, mod), m, mod).second;
        base = zpoly_divmod(zpoly_mul(base, base, mod), m, mod).second;
        e >>= 1;
    }
    return r;
}

// solve M h = rhs over Z/mod, where M is invertible mod p (unit pivots exist)
inline std::vector<mpz_class> solve_unit_system(std::vector<std::vector<mpz_class>> M,
                                                std::vector<mpz_class> rhs, const mpz_class& mod,
                                                const mpz_class& p) {
    std::size_t n = rhs.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = n;
        for (std::size_t r2 = col; r2 < n; ++r2) {
            if (M[r2][col] % p != 0) {
                piv = r2;
                break;
            }
        }
        if (piv == n) throw PrecisionError("singular system in Teichmuller lift");
        std::swap(M[piv], M[col]);
        std::swap(rhs[piv], rhs[col]);
        mpz_class inv;
        mpz_class pivv = M[col][col] % mod;
        if (pivv < 0) pivv += mod;
        if (mpz_invert(inv.get_mpz_t(), pivv.get_mpz_t(), mod.get_mpz_t()) == 0)
            throw PrecisionError("non-invertible pivot");
        for (std::size_t j = col; j < n; ++j) M[col][j] = M[col][j] * inv % mod;
        rhs[col] = rhs[col] * inv % mod;
        for (std::size_t r2 = 0; r2 < n; ++r2) {
            if (r2 == col) continue;
            mpz_class f = M[r2][col] % mod;
            if (f == 0) continue;
            for (std::size_t j = col; j < n; ++j) M[r2][j] = (M[r2][j] - f * M[col][j]) % mod;
            rhs[r2] = (rhs[r2] - f * rhs[col]) % mod;
        }
    }
    for (auto& x : rhs)
        if (x < 0) x += mod;
    return rhs;
}

}  // namespace detail

// Monic lift f of fbar (irreducible over F_p, degree m) whose roots are
// Teichmuller points: f divides z^(p^m) - z mod p^N.  Newton iteration on
// the functional equation f(z^p) = 0 mod f(z); the linearized map is the
// Frobenius on F_{p^m}, hence invertible.
inline std::vector<mpz_class> teichmuller_modulus(const PolyF<PrimeField>& fbar, std::uint64_t p,
                                                  int N) {
    PrimeField fp(p);
    if (fbar.size() < 2 || fbar.back() != 1)
        throw BadFamilyError("Teichmuller modulus input must be monic of degree >= 1");
    if (!poly_irreducible(fp, fbar)) throw BadFamilyError("Teichmuller modulus input reducible");
    std::size_t m = fbar.size() - 1;
    mpz_class pz(static_cast<unsigned long>(p));

    detail::ZPoly f(fbar.size());
    for (std::size_t i = 0; i < fbar.size(); ++i) {
        // centered lift
        long v = static_cast<long>(fbar[i]);
        if (2 * static_cast<std::uint64_t>(v) > p) v -= static_cast<long>(p);
        f[i] = v;
    }

    int t = 1;
    while (t < N) {
        int nu = std::min(2 * t, N);
        mpz_class mod = mpz_pow_ui(pz, static_cast<unsigned long>(nu));
        detail::ZPoly fm = f;
        detail::zpoly_reduce(fm, mod);
        fm.resize(m + 1, mpz_class(0));  // keep monic shape
        fm[m] = 1;
        // f(z^p) spread out, then divide by f
        detail::ZPoly fzp(m * p + 1, mpz_class(0));
        for (std::size_t i = 0; i <= m; ++i) fzp[i * p] = fm[i];
        auto [q, V] = detail::zpoly_divmod(std::move(fzp), fm, mod);
        detail::zpoly_trim(V);
        if (V.empty()) {
            t = nu;
            continue;
        }
        auto qr = detail::zpoly_divmod(std::move(q), fm, mod).second;
        // columns of the linear map h = z^j |-> z^(pj) - q(z) z^j  (mod f)
        detail::ZPoly zp_pow{mpz_class(0)};
        zp_pow.resize(p + 1, mpz_class(0));
        zp_pow[p] = 1;
        auto Z1 = detail::zpoly_divmod(std::move(zp_pow), fm, mod).second;
        std::vector<std::vector<mpz_class>> M(m, std::vector<mpz_class>(m, mpz_class(0)));
        detail::ZPoly Zj{mpz_class(1)};
        for (std::size_t j = 0; j < m; ++j) {
            if (j > 0) Zj = detail::zpoly_divmod(detail::zpoly_mul(Zj, Z1, mod), fm, mod).second;
            detail::ZPoly col = Zj;
            col.resize(m, mpz_class(0));
            detail::ZPoly qj(j + 1, mpz_class(0));
            qj[j] = 1;
            auto qzj = detail::zpoly_divmod(detail::zpoly_mul(qr, qj, mod), fm, mod).second;
            qzj.resize(m, mpz_class(0));
            for (std::size_t i2 = 0; i2 < m; ++i2) M[i2][j] = (col[i2] - qzj[i2]) % mod;
        }
        V.resize(m, mpz_class(0));
        std::vector<mpz_class> rhs(m);
        for (std::size_t i2 = 0; i2 < m; ++i2) rhs[i2] = (mod - V[i2] % mod) % mod;
        auto h = detail::solve_unit_system(std::move(M), std::move(rhs), mod, pz);
        for (std::size_t i2 = 0; i2 < m; ++i2) f[i2] = (f[i2] + h[i2]) % mod;
        t = nu;
    }
    mpz_class mod = mpz_pow_ui(pz, static_cast<unsigned long>(N));
    detail::zpoly_reduce(f, mod);
    f.resize(m + 1, mpz_class(0));
    f[m] = 1;

    // divisibility certificate: f | z^(p^m) - z mod p^N
    mpz_class pm;
    ::mpz_pow_ui(pm.get_mpz_t(), pz.get_mpz_t(), static_cast<unsigned long>(m));
    detail::ZPoly z{mpz_class(0), mpz_class(1)};
    auto zpm = detail::zpoly_powmod(z, pm, f, mod);
    auto zred = detail::zpoly_divmod(z, f, mod).second;
    zpm.resize(m, mpz_class(0));
    zred.resize(m, mpz_class(0));
    detail::ZPoly diff(m);
    for (std::size_t i = 0; i < m; ++i) diff[i] = zpm[i] - zred[i];
    detail::zpoly_reduce(diff, mod);
    if (!diff.empty()) throw PrecisionError("Teichmuller divisibility certificate failed");
    return f;
}

// Classical Hensel lifting: split monic f over Z_q (at ctx precision) along
// the coprime factorization fbar = f1bar * f2bar over F_q.
inline std::pair<QqPoly, QqPoly> hensel_split(const QqCtx& ctx, const QqPoly& f,
                                              PolyF<ExtField<PrimeField>> f1bar,
                                              PolyF<ExtField<PrimeField>> f2bar) {
    const auto& fq = ctx.fq;
    poly_trim(fq, f1bar);
    poly_trim(fq, f2bar);
    if (f.empty() || !(f.back() - f.back().ctx->one()).is_zero())
        throw BadFamilyError("hensel_split requires a monic polynomial");
    if (f2bar.size() == 1) {
        // trivial cofactor: nothing to split
        QqPoly onep{ctx.one()};
        return {f, onep};
    }
    auto [g0, sb, tb] = poly_xgcd(fq, f1bar, f2bar);
    if (g0.size() != 1) throw BadFamilyError("hensel_split factors not coprime");

    auto liftpoly = [&](const PolyF<ExtField<PrimeField>>& pb) {
        QqPoly r(pb.size(), ctx.zero());
        for (std::size_t i = 0; i < pb.size(); ++i) r[i] = ctx.lift(pb[i]);
        return r;
    };
    QqPoly g = liftpoly(f1bar), h = liftpoly(f2bar);
    QqPoly s = liftpoly(sb), t = liftpoly(tb);
    // force monic shape
    g.back() = ctx.one();
    h.back() = ctx.one();

    int iters = ilog_ceil(2, static_cast<std::uint64_t>(ctx.zp->prec)) + 1;
    for (int it = 0; it < iters; ++it) {
        QqPoly e = qqpoly_sub(f, qqpoly_mul(g, h));
        if (e.empty()) break;
        auto [qd, r] = qqpoly_divmod_monic(qqpoly_mul(s, e), h);
        g = qqpoly_add(g, qqpoly_add(qqpoly_mul(t, e), qqpoly_mul(qd, g)));
        h = qqpoly_add(h, r);
        g.resize(f1bar.size(), ctx.zero());
        h.resize(f2bar.size(), ctx.zero());
        g.back() = ctx.one();
        h.back() = ctx.one();
        // refresh Bezout data
        QqPoly b = qqpoly_sub(qqpoly_add(qqpoly_mul(s, g), qqpoly_mul(t, h)), QqPoly{ctx.one()});
        auto [cd, d] = qqpoly_divmod_monic(qqpoly_mul(s, b), h);
        s = qqpoly_sub(s, d);
        t = qqpoly_sub(t, qqpoly_add(qqpoly_mul(t, b), qqpoly_mul(cd, g)));
    }
    QqPoly check = qqpoly_sub(f, qqpoly_mul(g, h));
    for (auto& cc : check)
        if (!cc.is_zero()) throw PrecisionError("Hensel lift failed to converge");
    return {g, h};
}

}  // namespace zetafam
