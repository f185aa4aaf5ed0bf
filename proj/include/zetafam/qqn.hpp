#pragma once

// Q_{q^n} = Q_q[y]/phi(y), the specialization ring. phi is normally a
// Teichmuller modulus (the class of y is a Teichmuller lift gamma with
// gamma^(p^{an}) = gamma), which is what makes sigma^k(y) computable by a
// residue-field power plus Newton refinement.

#include <cmath>

#include "qq.hpp"

namespace zetafam {

struct QqnCtx;

class Qqn {
  public:
    const QqnCtx* ctx = nullptr;
    QqPoly c;  // length n, coefficients in Q_q

    Qqn() = default;
    explicit Qqn(const QqnCtx& ctx_);

    bool is_zero() const {
        for (auto& x : c)
            if (!x.is_zero()) return false;
        return true;
    }
    int max_shift() const {
        int s = 0;
        for (auto& x : c) s = std::max(s, x.max_shift());
        return s;
    }

    Qqn operator+(const Qqn& o) const;
    Qqn operator-(const Qqn& o) const;
    Qqn operator-() const;
    Qqn operator*(const Qqn& o) const;
    Qqn& operator+=(const Qqn& o) { return *this = *this + o; }
    Qqn& operator-=(const Qqn& o) { return *this = *this - o; }
    Qqn& operator*=(const Qqn& o) { return *this = *this * o; }
    Qqn mul_qq(const Qq& t) const;
    Qqn mul_si(long v) const;
    Qqn inv() const;
    Qqn pow(mpz_class e) const;
    bool eq_mod(const Qqn& o, int k) const {
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

inline QqPoly qqpoly_powmod(QqPoly base, mpz_class e, const QqPoly& m, const QqCtx& ctx) {
    QqPoly r{ctx.one()};
    base = qqpoly_mod_monic(std::move(base), m);
    while (e > 0) {
        if (mpz_odd_p(e.get_mpz_t())) r = qqpoly_mod_monic(qqpoly_mul(r, base), m);
        base = qqpoly_mod_monic(qqpoly_mul(base, base), m);
        e >>= 1;
    }
    return r;
}

// g(eta) mod phi by Horner; g given by its y-coefficients, deg g < deg phi
inline QqPoly modular_compose(const QqCtx& ctx, const QqPoly& g, const QqPoly& eta,
                              const QqPoly& phi) {
    if (phi.size() < 2 || g.size() >= phi.size())
        throw BadParameterError("modular_compose: need deg g < deg phi");
    QqPoly r;
    for (std::size_t i = g.size(); i-- > 0;) {
        r = qqpoly_mod_monic(qqpoly_mul(r, eta), phi);
        if (r.empty()) r.push_back(ctx.zero());
        r[0] += g[i];
        qqpoly_trim(r);
    }
    return r;
}

// baby-step/giant-step variant: precompute eta^0..eta^m, combine chunks of g
// of width m, then Horner over eta^m.  Bit-identical to the Horner route.
inline QqPoly modular_compose_bsgs(const QqCtx& ctx, const QqPoly& g, const QqPoly& eta,
                                   const QqPoly& phi, double b = 0.5) {
    if (phi.size() < 2 || g.size() >= phi.size())
        throw BadParameterError("modular_compose: need deg g < deg phi");
    if (!(b > 0.0 && b <= 0.5)) throw BadParameterError("modular_compose: block exponent");
    std::size_t n = phi.size() - 1;
    auto m = static_cast<std::size_t>(std::ceil(std::pow(static_cast<double>(n), b)));
    if (m < 1) m = 1;
    std::vector<QqPoly> pw(m + 1);
    pw[0] = QqPoly{ctx.one()};
    for (std::size_t i = 1; i <= m; ++i) pw[i] = qqpoly_mod_monic(qqpoly_mul(pw[i - 1], eta), phi);
    QqPoly r;
    std::size_t chunks = (g.size() + m - 1) / m;
    for (std::size_t j = chunks; j-- > 0;) {
        r = qqpoly_mod_monic(qqpoly_mul(r, pw[m]), phi);
        QqPoly inner;
        for (std::size_t i = 0; i < m && j * m + i < g.size(); ++i) {
            QqPoly term = pw[i];
            for (auto& t : term) t *= g[j * m + i];
            qqpoly_trim(term);
            inner = qqpoly_add(inner, term);
        }
        r = qqpoly_add(r, inner);
    }
    return r;
}

struct QqnCtx {
    std::shared_ptr<QqCtx> qq;
    QqPoly phi;  // monic, degree n
    int n;
    ExtField<ExtField<PrimeField>> fqn;  // F_q[y]/phibar
    bool teichmuller = false;

    // sigma^k(y) for k = 1..an-1, filled lazily
    mutable std::vector<Qqn> sigma_y_cache;

    QqnCtx(std::shared_ptr<QqCtx> qq_, QqPoly phi_, bool require_teichmuller = true)
        : qq(std::move(qq_)),
          phi(std::move(phi_)),
          n(static_cast<int>(phi.size()) - 1),
          fqn(qq->fq, reduce_phibar(*qq, phi)) {
        if (n < 1 || !phi.back().eq_mod(qq->one(), qq->zp->prec))
            throw BadFamilyError("phi must be monic of degree >= 1");
        for (auto& cf : phi)
            if (cf.max_shift() != 0) throw BadFamilyError("phi must be integral");
        if (require_teichmuller) {
            // certificate: y^(p^{an}) = y mod (phi, p^N)
            mpz_class e = mpz_pow_ui(qq->zp->pz, static_cast<unsigned long>(qq->a * n));
            QqPoly y = gen_poly();
            QqPoly ypow = qqpoly_powmod(y, e, phi, *qq);
            QqPoly diff = qqpoly_sub(ypow, y);
            for (auto& d : diff)
                if (!d.is_zero_mod(qq->zp->prec))
                    throw BadFamilyError("phi is not a Teichmuller modulus");
            teichmuller = true;
        }
    }

    static PolyF<ExtField<PrimeField>> reduce_phibar(const QqCtx& qq, const QqPoly& phi) {
        PolyF<ExtField<PrimeField>> pb(phi.size());
        for (std::size_t i = 0; i < phi.size(); ++i) pb[i] = qq.reduce(phi[i]);
        return pb;
    }

    QqPoly gen_poly() const {
        if (n == 1) return QqPoly{-phi[0]};
        QqPoly y(2, qq->zero());
        y[1] = qq->one();
        return y;
    }

    Qqn zero() const { return Qqn(*this); }
    Qqn one() const {
        Qqn r(*this);
        r.c[0] = qq->one();
        return r;
    }
    Qqn from_qq(const Qq& u) const {
        Qqn r(*this);
        r.c[0] = u;
        return r;
    }
    Qqn from_si(long v) const { return from_qq(qq->from_si(v)); }
    Qqn gen() const { return from_poly(gen_poly()); }
    Qqn from_poly(const QqPoly& v) const {
        Qqn r(*this);
        QqPoly w = v;
        if (static_cast<int>(w.size()) > n) w = qqpoly_mod_monic(std::move(w), phi);
        for (std::size_t i = 0; i < w.size(); ++i) r.c[i] = w[i];
        return r;
    }
    Qqn lift(const ExtField<ExtField<PrimeField>>::Elem& e) const {
        Qqn r(*this);
        for (int i = 0; i < n; ++i) r.c[static_cast<std::size_t>(i)] = qq->lift(e[static_cast<std::size_t>(i)]);
        return r;
    }
    ExtField<ExtField<PrimeField>>::Elem reduce(const Qqn& u) const {
        auto e = fqn.zero();
        for (int i = 0; i < n; ++i) e[static_cast<std::size_t>(i)] = qq->reduce(u.c[static_cast<std::size_t>(i)]);
        return e;
    }

    const Qqn& sigma_y(int k) const;
    bool compatible(const QqnCtx& o) const {
        if (!qq->compatible(*o.qq) || phi.size() != o.phi.size()) return false;
        for (std::size_t i = 0; i < phi.size(); ++i)
            if (!phi[i].eq_mod(o.phi[i], qq->zp->prec)) return false;
        return true;
    }
};

inline Qqn::Qqn(const QqnCtx& ctx_) : ctx(&ctx_), c(static_cast<std::size_t>(ctx_.n), ctx_.qq->zero()) {}

inline Qqn Qqn::operator+(const Qqn& o) const {
    Qqn r(*ctx);
    for (std::size_t i = 0; i < c.size(); ++i) r.c[i] = c[i] + o.c[i];
    return r;
}
inline Qqn Qqn::operator-(const Qqn& o) const {
    Qqn r(*ctx);
    for (std::size_t i = 0; i < c.size(); ++i) r.c[i] = c[i] - o.c[i];
    return r;
}
inline Qqn Qqn::operator-() const {
    Qqn r(*ctx);
    for (std::size_t i = 0; i < c.size(); ++i) r.c[i] = -c[i];
    return r;
}
inline Qqn Qqn::operator*(const Qqn& o) const {
    QqPoly prod = qqpoly_mod_monic(qqpoly_mul(c, o.c), ctx->phi);
    return ctx->from_poly(prod);
}
inline Qqn Qqn::mul_qq(const Qq& t) const {
    Qqn r(*ctx);
    for (std::size_t i = 0; i < c.size(); ++i) r.c[i] = c[i] * t;
    return r;
}
inline Qqn Qqn::mul_si(long v) const {
    Qqn r(*ctx);
    for (std::size_t i = 0; i < c.size(); ++i) r.c[i] = c[i].mul_si(v);
    return r;
}
inline Qqn Qqn::inv() const {
    auto rbar = ctx->reduce(*this);
    if (ctx->fqn.is_zero(rbar)) throw PrecisionError("Qqn inverse of non-unit");
    Qqn v = ctx->lift(ctx->fqn.inv(rbar));
    int iters = ilog_ceil(2, ctx->qq->zp->prec) + 1;
    Qqn two = ctx->from_si(2);
    for (int i = 0; i < iters; ++i) v = v * (two - *this * v);
    return v;
}
inline Qqn Qqn::pow(mpz_class e) const {
    Qqn r = ctx->one();
    Qqn b = *this;
    if (e < 0) {
        b = b.inv();
        e = -e;
    }
    while (e > 0) {
        if (mpz_odd_p(e.get_mpz_t())) r *= b;
        b *= b;
        e >>= 1;
    }
    return r;
}

// sigma^k(y): residue-field power ybar^(p^k), then Newton against phi (phi'
// is a unit at the approximate root since phibar is separable)
inline const Qqn& QqnCtx::sigma_y(int k) const {
    int an = qq->a * n;
    k %= an;
    if (sigma_y_cache.empty()) sigma_y_cache.resize(static_cast<std::size_t>(an));
    Qqn& slot = sigma_y_cache[static_cast<std::size_t>(k)];
    if (slot.ctx == nullptr) {
        if (k == 0) {
            slot = gen();
        } else {
            mpz_class e = mpz_pow_ui(qq->zp->pz, static_cast<unsigned long>(k));
            auto zbar = fqn.pow(fqn.gen(), e);
            Qqn z = lift(zbar);
            // sigma^k(y) = y^(p^k) is a root of phi with sigma^k applied to
            // its Q_q coefficients, not of phi itself (they agree iff a | k)
            QqPoly target(phi.size());
            for (std::size_t i = 0; i < phi.size(); ++i)
                target[i] = frobenius_qq(phi[i], k % qq->a);
            int iters = ilog_ceil(2, qq->zp->prec) + 1;
            for (int t = 0; t < iters; ++t) {
                // target(z) and target'(z) by Horner in Qqn arithmetic
                Qqn fz = zero(), dz = zero();
                for (std::size_t i = target.size(); i-- > 0;) {
                    dz = dz * z + fz;
                    fz = fz * z + from_qq(target[i]);
                }
                z = z - fz * dz.inv();
            }
            slot = z;
        }
    }
    return slot;
}

inline Qqn frobenius_qqn(const Qqn& u, int k) {
    const QqnCtx& ctx = *u.ctx;
    if (k < 0) throw PrecisionError("frobenius_qqn: negative power");
    if (!ctx.teichmuller) throw BadFamilyError("frobenius_qqn requires a Teichmuller modulus");
    int an = ctx.qq->a * ctx.n;
    k %= an;
    if (k == 0) return u;
    QqPoly g(u.c.size());
    for (std::size_t i = 0; i < u.c.size(); ++i) g[i] = frobenius_qq(u.c[i], k % ctx.qq->a);
    qqpoly_trim(g);
    QqPoly sy = ctx.sigma_y(k).c;
    qqpoly_trim(sy);
    return ctx.from_poly(modular_compose(*ctx.qq, g, sy, ctx.phi));
}

}  // namespace zetafam
