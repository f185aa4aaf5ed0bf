#pragma once

// Reduction of differential forms on Y^2 = Q(X, Gamma) to the basis
// {X^i dX/sqrt(Q)} (or the sqrt(Q)^3 variant), the connection matrix
// H = r * (matrix of d/dGamma), and the base-point Frobenius matrix F(0).
//
// The reduction engine is generic over the coefficient ring so the same
// code runs on plain Q_q elements (Gamma = 0) and on truncated
// Gamma-series (family level).

#include <map>

#include "family.hpp"

namespace zetafam {

struct QqRing {
    const QqCtx* ctx;
    using T = Qq;
    T zero() const { return ctx->zero(); }
    bool is_zero(const T& x) const { return x.is_zero(); }
    T add(const T& x, const T& y) const { return x + y; }
    T sub(const T& x, const T& y) const { return x - y; }
    T mul(const T& x, const T& y) const { return x * y; }
    T mul_si(const T& x, long v) const { return x.mul_si(v); }
    T div_si(const T& x, long v) const { return x.div_si(v); }
    int shift_of(const T& x) const { return x.max_shift(); }
};

struct SeriesRing {
    const QqCtx* ctx;
    int trunc;
    using T = Series;
    T zero() const { return {}; }
    bool is_zero(const T& x) const {
        for (auto& c : x)
            if (!c.is_zero()) return false;
        return true;
    }
    T add(const T& x, const T& y) const { return series_add(x, y); }
    T sub(const T& x, const T& y) const { return series_sub(x, y); }
    T mul(const T& x, const T& y) const { return series_mul(x, y, trunc); }
    T mul_si(const T& x, long v) const {
        T r = x;
        for (auto& c : r) c = c.mul_si(v);
        return r;
    }
    T div_si(const T& x, long v) const {
        T r = x;
        for (auto& c : r) c = c.div_si(v);
        return r;
    }
    int shift_of(const T& x) const {
        int s = 0;
        for (auto& c : x) s = std::max(s, c.max_shift());
        return s;
    }
};

// polynomials in X over the ring R
template <class R>
using XPol = std::vector<typename R::T>;

template <class R>
void xp_trim(const R& ring, XPol<R>& v) {
    while (!v.empty() && ring.is_zero(v.back())) v.pop_back();
}
template <class R>
XPol<R> xp_add(const R& ring, const XPol<R>& x, const XPol<R>& y) {
    XPol<R> r(std::max(x.size(), y.size()), ring.zero());
    for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i];
    for (std::size_t i = 0; i < y.size(); ++i) r[i] = ring.add(r[i], y[i]);
    xp_trim(ring, r);
    return r;
}
template <class R>
XPol<R> xp_sub(const R& ring, const XPol<R>& x, const XPol<R>& y) {
    XPol<R> r(std::max(x.size(), y.size()), ring.zero());
    for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i];
    for (std::size_t i = 0; i < y.size(); ++i) r[i] = ring.sub(r[i], y[i]);
    xp_trim(ring, r);
    return r;
}
template <class R>
XPol<R> xp_mul(const R& ring, const XPol<R>& x, const XPol<R>& y) {
    if (x.empty() || y.empty()) return {};
    XPol<R> r(x.size() + y.size() - 1, ring.zero());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (ring.is_zero(x[i])) continue;
        for (std::size_t j = 0; j < y.size(); ++j) r[i + j] = ring.add(r[i + j], ring.mul(x[i], y[j]));
    }
    xp_trim(ring, r);
    return r;
}
template <class R>
XPol<R> xp_scale(const R& ring, const XPol<R>& x, const typename R::T& c) {
    XPol<R> r(x.size(), ring.zero());
    for (std::size_t i = 0; i < x.size(); ++i) r[i] = ring.mul(x[i], c);
    xp_trim(ring, r);
    return r;
}
template <class R>
XPol<R> xp_mul_si(const R& ring, const XPol<R>& x, long v) {
    XPol<R> r(x.size(), ring.zero());
    for (std::size_t i = 0; i < x.size(); ++i) r[i] = ring.mul_si(x[i], v);
    xp_trim(ring, r);
    return r;
}
template <class R>
XPol<R> xp_div_si(const R& ring, const XPol<R>& x, long v) {
    XPol<R> r(x.size(), ring.zero());
    for (std::size_t i = 0; i < x.size(); ++i) r[i] = ring.div_si(x[i], v);
    return r;
}
template <class R>
XPol<R> xp_deriv(const R& ring, const XPol<R>& x) {
    if (x.size() < 2) return {};
    XPol<R> r(x.size() - 1, ring.zero());
    for (std::size_t i = 1; i < x.size(); ++i) r[i - 1] = ring.mul_si(x[i], static_cast<long>(i));
    xp_trim(ring, r);
    return r;
}
template <class R>
XPol<R> xp_shift(const R& ring, const XPol<R>& x, int e) {
    if (x.empty()) return {};
    XPol<R> r(x.size() + static_cast<std::size_t>(e), ring.zero());
    for (std::size_t i = 0; i < x.size(); ++i) r[i + static_cast<std::size_t>(e)] = x[i];
    return r;
}
// division by a monic polynomial whose leading coefficient is the ring unit
template <class R>
std::pair<XPol<R>, XPol<R>> xp_divmod_monic(const R& ring, XPol<R> x, const XPol<R>& m) {
    xp_trim(ring, x);
    std::size_t d = m.size() - 1;
    if (x.size() <= d) return {XPol<R>{}, std::move(x)};
    XPol<R> q(x.size() - d, ring.zero());
    for (std::size_t off = x.size() - d; off-- > 0;) {
        typename R::T c = x[off + d];
        if (ring.is_zero(c)) continue;
        q[off] = c;
        for (std::size_t i = 0; i < d; ++i) x[off + i] = ring.sub(x[off + i], ring.mul(c, m[i]));
        x[off + d] = ring.zero();
    }
    x.resize(d);
    xp_trim(ring, x);
    xp_trim(ring, q);
    return {std::move(q), std::move(x)};
}

// a finite sum of terms numerator(X) dX / sqrt(Q)^k, keyed by odd k
template <class R>
using FormTerms = std::map<int, XPol<R>>;

// the reduction environment: Q, Q', the certificate polynomials, and the
// inverse of r (exact scalar at Gamma = 0; truncated series at family level
// when denominator steps are needed there)
template <class R>
struct Reducer {
    R ring;
    XPol<R> Q, Qd, alpha, beta;
    typename R::T rinv;
    bool has_rinv = false;
    int g;
    int target = 1;  // basis lives over sqrt(Q)^target

    void add_into(FormTerms<R>& form, int k, XPol<R> v) const {
        if (v.empty()) return;
        auto it = form.find(k);
        if (it == form.end())
            form.emplace(k, std::move(v));
        else
            it->second = xp_add(ring, it->second, v);
    }

    // one step of killing the leading X-power of w with an exact form at
    // the target level; returns the coordinates when deg < 2g
    std::vector<typename R::T> reduce_xpowers(XPol<R> w) const {
        xp_trim(ring, w);
        while (w.size() > static_cast<std::size_t>(2 * g)) {
            int m = static_cast<int>(w.size()) - 1;
            int s = m - 2 * g;
            typename R::T c = w.back();
            // d(X^s sqrt(Q)^(2-target)) up to a factor 1/2: for target 1 the
            // numerator is 2s X^(s-1) Q + X^s Q', leading coefficient
            // 2m-2g+1; for target 3 it is 2s X^(s-1) Q - X^s Q', leading
            // coefficient 2m-6g-1 (odd, never zero)
            XPol<R> E;
            long lead;
            if (target == 1) {
                E = s > 0 ? xp_add(ring, xp_shift(ring, xp_mul_si(ring, Q, 2 * s), s - 1), xp_shift(ring, Qd, s))
                          : Qd;
                lead = 2L * m - 2 * g + 1;
            } else {
                E = s > 0 ? xp_sub(ring, xp_shift(ring, xp_mul_si(ring, Q, 2 * s), s - 1), xp_shift(ring, Qd, s))
                          : xp_mul_si(ring, Qd, -1);
                lead = 2L * m - 6 * g - 1;
            }
            w = xp_sub(ring, w, xp_div_si(ring, xp_scale(ring, E, c), lead));
            // the leading term cancels identically; drop it explicitly so
            // carry digits cannot stall the loop
            if (w.size() > static_cast<std::size_t>(m)) w.resize(static_cast<std::size_t>(m));
            xp_trim(ring, w);
        }
        w.resize(static_cast<std::size_t>(2 * g), ring.zero());
        return w;
    }

    std::vector<typename R::T> reduce(FormTerms<R> form) const {
        while (!form.empty()) {
            auto top = std::prev(form.end());
            int k = top->first;
            if (k == target && form.size() == 1) break;
            XPol<R> v = std::move(top->second);
            form.erase(top);
            if (k % 2 == 0) {
                if (k > 0) throw BadParameterError("reduction: even positive denominator power");
                continue;  // polynomial (even, nonpositive) part is exact
            }
            if (k < target) {
                // sqrt(Q)^(target-k) = Q^((target-k)/2) over the target level
                XPol<R> lifted = std::move(v);
                for (int t = 0; t < (target - k) / 2; ++t) lifted = xp_mul(ring, lifted, Q);
                add_into(form, target, std::move(lifted));
                continue;
            }
            // k > target, odd: split off multiples of Q, then trade the
            // remaining sqrt(Q)^k denominator for sqrt(Q)^(k-2) using
            // r = alpha Q + beta Q' and one exact differential
            auto [quot, rem] = xp_divmod_monic(ring, std::move(v), Q);
            add_into(form, k - 2, std::move(quot));
            if (!rem.empty()) {
                if (!has_rinv) throw PrecisionError("reduction step requires 1/r");
                XPol<R> contrib = xp_add(
                    ring, xp_mul(ring, alpha, rem),
                    xp_div_si(ring, xp_mul_si(ring, xp_deriv(ring, xp_mul(ring, beta, rem)), 2), k - 2));
                add_into(form, k - 2, xp_scale(ring, contrib, rinv));
            }
        }
        XPol<R> w;
        if (!form.empty()) w = std::move(form.begin()->second);
        return reduce_xpowers(std::move(w));
    }
};

template <class R>
Reducer<R> make_reducer(R ring, const CurveFamily& fam, const ResultantCertificate& cert,
                        const QqCtx& ctx);

inline std::vector<Series> to_series_xpoly(const std::vector<Series>& v) { return v; }

template <>
inline Reducer<SeriesRing> make_reducer<SeriesRing>(SeriesRing ring, const CurveFamily& fam,
                                                    const ResultantCertificate& cert,
                                                    const QqCtx& ctx) {
    Reducer<SeriesRing> red;
    red.ring = ring;
    red.g = fam.g;
    red.target = fam.variant_basis ? 3 : 1;
    red.Q = fam.q_series(ctx);
    red.Qd.assign(red.Q.size() ? red.Q.size() - 1 : 0, {});
    for (std::size_t i = 1; i < red.Q.size(); ++i) red.Qd[i - 1] = ring.mul_si(red.Q[i], static_cast<long>(i));
    red.alpha = cert.alpha_series(ctx);
    red.beta = cert.beta_series(ctx);
    return red;
}

template <>
inline Reducer<QqRing> make_reducer<QqRing>(QqRing ring, const CurveFamily& fam,
                                            const ResultantCertificate& cert, const QqCtx& ctx) {
    // Gamma = 0 view: series evaluated at 0 (constant coefficients)
    Reducer<QqRing> red;
    red.ring = ring;
    red.g = fam.g;
    red.target = fam.variant_basis ? 3 : 1;
    auto take0 = [&](const Series& s) { return s.empty() ? ctx.zero() : s[0]; };
    for (auto& s : fam.q_series(ctx)) red.Q.push_back(take0(s));
    red.Qd.assign(red.Q.size() - 1, ctx.zero());
    for (std::size_t i = 1; i < red.Q.size(); ++i) red.Qd[i - 1] = red.Q[i].mul_si(static_cast<long>(i));
    for (auto& s : cert.alpha_series(ctx)) red.alpha.push_back(take0(s));
    for (auto& s : cert.beta_series(ctx)) red.beta.push_back(take0(s));
    xp_trim(ring, red.alpha);
    xp_trim(ring, red.beta);
    Series rs = cert.r_series(ctx);
    red.rinv = take0(rs).inv();
    red.has_rinv = true;
    return red;
}

struct ConnectionMatrix {
    SeriesMat H;  // 2g x 2g, H = r * (matrix of the Gamma-derivative)
    int deg_bound;
    int max_shift;
};

inline ConnectionMatrix connection_matrix(const CurveFamily& fam, const ResultantCertificate& cert,
                                          const QqCtx& ctx) {
    int g = fam.g;
    int kap = std::max(fam.kappa, 1);
    SeriesRing ring{&ctx, (16 * g + 8) * kap + 8};
    auto red = make_reducer<SeriesRing>(ring, fam, cert, ctx);
    Series r = cert.r_series(ctx);

    // d/dGamma of Q as an X-polynomial
    std::vector<Series> qdot(red.Q.size());
    for (std::size_t i = 0; i < red.Q.size(); ++i) qdot[i] = series_differentiate(red.Q[i]);
    xp_trim(ring, qdot);

    ConnectionMatrix out{SeriesMat(ctx, 2 * g, 8 * g * kap + 1), 0, 0};
    bool variant = fam.variant_basis;
    for (int i = 0; i < 2 * g; ++i) {
        // r * d/dGamma(X^i dX / sqrt(Q)^t) = -(t/2) r X^i Qdot dX/sqrt(Q)^(t+2)
        XPol<SeriesRing> w = xp_shift(ring, qdot, i);
        w = xp_div_si(ring, xp_mul_si(ring, w, variant ? -3 : -1), 2);
        auto [quot, rem] = xp_divmod_monic(ring, std::move(w), red.Q);
        // the (t+2) -> t denominator step, with the 1/r cancelled against
        // the leading r: alpha*rem + (2/t)(beta*rem)' + r*quot
        XPol<SeriesRing> lvl = xp_mul(ring, red.alpha, rem);
        XPol<SeriesRing> br = xp_mul(ring, red.beta, rem);
        lvl = xp_add(ring, lvl, xp_div_si(ring, xp_mul_si(ring, xp_deriv(ring, br), 2), variant ? 3 : 1));
        lvl = xp_add(ring, lvl, xp_scale(ring, quot, r));
        auto coords = red.reduce_xpowers(std::move(lvl));
        for (int l = 0; l < 2 * g; ++l) {
            Series h = coords[static_cast<std::size_t>(l)];
            qqpoly_trim(h);
            if (!h.empty()) out.deg_bound = std::max(out.deg_bound, static_cast<int>(h.size()) - 1);
            out.max_shift = std::max(out.max_shift, ring.shift_of(h));
            out.H.at(i, l) = std::move(h);
        }
    }
    if (out.deg_bound > 8 * g * fam.kappa)
        throw PrecisionError("connection matrix exceeds its degree bound");
    if (!variant) {
        int bound = static_cast<int>((10 * g + static_cast<int>(fam.p) - 2) / (fam.p - 1));  // ceil(10g/(p-1))
        if (out.max_shift > bound) throw PrecisionError("connection matrix exceeds its integrality bound");
    }
    return out;
}

// ---- base-point Frobenius (Kedlaya at Gamma = 0) ----

namespace detail {

// (-1/2 choose j) as an integral p-adic: (-1)^j C(2j, j) / 4^j
inline Padic half_binomial(const PadicCtx& zp, unsigned long j, const mpz_class& inv4) {
    mpz_class b;
    mpz_bin_uiui(b.get_mpz_t(), 2 * j, j);
    mpz_class i4 = 1;
    mpz_powm_ui(i4.get_mpz_t(), inv4.get_mpz_t(), j, zp.pow(zp.prec).get_mpz_t());
    b *= i4;
    if (j % 2 == 1) b = -b;
    return Padic(zp, b);
}

}  // namespace detail

// the unreduced image F_p(X^i dX/sqrt(Q)) at Gamma = 0, as form terms; the
// j-th binomial term sits at denominator power 2pj + p and carries p^(j+1)
inline FormTerms<QqRing> frobenius_image_form(const CurveFamily& fam, const QqCtx& ctx, int i,
                                              int j_cap) {
    QqRing ring{&ctx};
    auto p = static_cast<long>(fam.p);
    int g = fam.g;
    // Q at Gamma = 0 and Dtilde = (Q^sigma(X^p) - Q^p)/p
    XPol<QqRing> Q;
    for (auto& s : fam.q_series(ctx)) Q.push_back(s.empty() ? ctx.zero() : s[0]);
    XPol<QqRing> qsig(static_cast<std::size_t>(p) * (2 * g + 1) + 1, ctx.zero());
    for (std::size_t c = 0; c < Q.size(); ++c) qsig[c * static_cast<std::size_t>(p)] = frobenius_qq(Q[c], 1);
    XPol<QqRing> qp{ctx.one()};
    for (long t = 0; t < p; ++t) qp = xp_mul(ring, qp, Q);
    XPol<QqRing> dt = xp_sub(ring, qsig, qp);
    for (auto& c : dt) {
        c = c.div_si(p);
        if (c.max_shift() != 0) throw PrecisionError("Frobenius congruence failed");
    }
    xp_trim(ring, dt);

    mpz_class inv4;
    mpz_class four = 4;
    mpz_invert(inv4.get_mpz_t(), four.get_mpz_t(), ctx.zp->pow(ctx.zp->prec).get_mpz_t());

    FormTerms<QqRing> form;
    Padic ppj(*ctx.zp, 1);  // p^j
    XPol<QqRing> dtj{ctx.one()};  // Dtilde^j
    for (int j = 0; j <= j_cap; ++j) {
        Padic cj = detail::half_binomial(*ctx.zp, static_cast<unsigned long>(j), inv4) * ppj;
        cj = cj.mul_si(p);  // overall factor p
        XPol<QqRing> num = xp_shift(ring, xp_scale(ring, dtj, ctx.from_padic(cj)), p * (i + 1) - 1);
        Reducer<QqRing> dummy;  // only for add_into; cheap
        dummy.ring = ring;
        dummy.add_into(form, 2 * p * j + p, std::move(num));
        if (j < j_cap) {
            dtj = xp_mul(ring, dtj, dt);
            ppj = ppj.times_p_pow(1);
        }
    }
    return form;
}

struct FrobeniusZero {
    std::vector<Qq> F0;  // 2g x 2g row-major, precision = out context
    int max_shift = 0;
};

inline Qq qq_change_ctx(const Qq& u, const QqCtx& to) {
    Qq r(to);
    for (std::size_t i = 0; i < u.c.size(); ++i) r.c[i] = u.c[i].change_ctx(*to.zp);
    return r;
}

inline FrobeniusZero kedlaya_frobenius_zero(const CurveFamily& fam, const ResultantCertificate& cert,
                                            const std::shared_ptr<QqCtx>& out_ctx, int j_cap = -1) {
    int g = fam.g;
    auto p = static_cast<long>(fam.p);
    int N = out_ctx->zp->prec;
    int Jmax = 2 * N + 4;
    // reduction loss for the deepest term, from the single-term loss bound
    int lam = ilog_floor(fam.p, static_cast<std::uint64_t>((2 * g + 1) * (Jmax + 1))) +
              ilog_floor(fam.p, static_cast<std::uint64_t>(2 * (p * Jmax + (p - 1) / 2) + 1));
    int nwork = N + lam + 6;
    auto zp = std::make_shared<PadicCtx>(fam.p, nwork, lam + 8);
    auto ctx = std::make_shared<QqCtx>(zp, fam.chi);
    QqRing ring{ctx.get()};
    auto red = make_reducer<QqRing>(ring, fam, cert, *ctx);

    int J = j_cap >= 0 ? j_cap : std::min(Jmax, nwork + lam + 2);

    // Dtilde and its base-Q digits
    XPol<QqRing> qsig(static_cast<std::size_t>(p) * (2 * g + 1) + 1, ctx->zero());
    for (std::size_t c = 0; c < red.Q.size(); ++c) qsig[c * static_cast<std::size_t>(p)] = frobenius_qq(red.Q[c], 1);
    XPol<QqRing> qp{ctx->one()};
    for (long t = 0; t < p; ++t) qp = xp_mul(ring, qp, red.Q);
    XPol<QqRing> dt = xp_sub(ring, qsig, qp);
    for (auto& c : dt) {
        c = c.div_si(p);
        if (c.max_shift() != 0) throw PrecisionError("Frobenius congruence failed");
    }
    xp_trim(ring, dt);
    std::vector<XPol<QqRing>> dt_digits;
    {
        XPol<QqRing> rest = dt;
        while (!rest.empty()) {
            auto [q2, rem] = xp_divmod_monic(ring, std::move(rest), red.Q);
            dt_digits.push_back(std::move(rem));
            rest = std::move(q2);
        }
        if (dt_digits.empty()) dt_digits.push_back({});
    }

    mpz_class inv4;
    mpz_class four = 4;
    mpz_invert(inv4.get_mpz_t(), four.get_mpz_t(), zp->pow(nwork).get_mpz_t());

    // accumulate B_u = sum_j c_j p^(j+1) (digit pj-u of Dtilde^j); the form
    // for basis element i is sum_u X^(p(i+1)-1) B_u / sqrt(Q)^(2u+p)
    std::vector<XPol<QqRing>> B(static_cast<std::size_t>(p) * J + 1);
    std::vector<XPol<QqRing>> digs{XPol<QqRing>{ctx->one()}};  // Dtilde^0
    Padic ppj(*zp, 1);
    for (int j = 0; j <= J; ++j) {
        Padic cj = detail::half_binomial(*zp, static_cast<unsigned long>(j), inv4) * ppj;
        cj = cj.mul_si(p);
        Qq cq = ctx->from_padic(cj);
        for (std::size_t s = 0; s < digs.size(); ++s) {
            if (digs[s].empty()) continue;
            std::size_t u = static_cast<std::size_t>(p) * j - s;
            B[u] = xp_add(ring, B[u], xp_scale(ring, digs[s], cq));
        }
        if (j < J) {
            std::vector<XPol<QqRing>> next(digs.size() + dt_digits.size());
            for (std::size_t s = 0; s < digs.size(); ++s) {
                if (digs[s].empty()) continue;
                for (std::size_t t = 0; t < dt_digits.size(); ++t) {
                    if (dt_digits[t].empty()) continue;
                    auto prod = xp_mul(ring, digs[s], dt_digits[t]);
                    auto [q2, rem] = xp_divmod_monic(ring, std::move(prod), red.Q);
                    next[s + t] = xp_add(ring, next[s + t], rem);
                    next[s + t + 1] = xp_add(ring, next[s + t + 1], q2);
                }
            }
            while (!next.empty() && next.back().empty()) next.pop_back();
            digs = std::move(next);
            ppj = ppj.times_p_pow(1);
        }
    }

    FrobeniusZero out;
    out.F0.assign(static_cast<std::size_t>(2 * g) * (2 * g), out_ctx->zero());
    for (int i = 0; i < 2 * g; ++i) {
        FormTerms<QqRing> form;
        for (std::size_t u = 0; u < B.size(); ++u) {
            if (B[u].empty()) continue;
            red.add_into(form, 2 * static_cast<int>(u) + static_cast<int>(p),
                         xp_shift(ring, B[u], p * (i + 1) - 1));
        }
        auto coords = red.reduce(std::move(form));
        for (int l = 0; l < 2 * g; ++l) {
            out.max_shift = std::max(out.max_shift, coords[static_cast<std::size_t>(l)].max_shift());
            out.F0[static_cast<std::size_t>(i) * (2 * g) + l] =
                qq_change_ctx(coords[static_cast<std::size_t>(l)], *out_ctx);
        }
    }
    // ord(F(0)) >= -(log_p g + 2)
    int bound = ilog_ceil(fam.p, static_cast<std::uint64_t>(g)) + 2;
    if (out.max_shift > bound) throw PrecisionError("Frobenius matrix exceeds its order bound");
    return out;
}

}  // namespace zetafam
