#pragma once

// Truncated power series in Gamma over Q_q, and square matrices of them.
// Matrix products pack each entry into a single big integer (one slot per
// (Gamma, x) coefficient pair) so the inner loop is a handful of large GMP
// multiplies instead of trunc^2 small ones.

#include "qqn.hpp"

namespace zetafam {

// a series is just a coefficient vector; absent entries are exact zeros
using Series = QqPoly;

inline Series series_add(const Series& x, const Series& y) { return qqpoly_add(x, y); }
inline Series series_sub(const Series& x, const Series& y) { return qqpoly_sub(x, y); }

inline Series series_mul(const Series& x, const Series& y, int trunc) {
    if (x.empty() || y.empty()) return {};
    std::size_t lim = std::min(static_cast<std::size_t>(trunc), x.size() + y.size() - 1);
    Series r(lim, x[0].ctx->zero());
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < y.size() && i + j < lim; ++j) r[i + j] += x[i] * y[j];
    qqpoly_trim(r);
    return r;
}

inline Series series_truncate(Series s, int trunc) {
    if (s.size() > static_cast<std::size_t>(trunc)) s.resize(static_cast<std::size_t>(trunc));
    qqpoly_trim(s);
    return s;
}

inline Series series_differentiate(const Series& s) {
    if (s.size() < 2) return {};
    Series r(s.size() - 1);
    for (std::size_t i = 1; i < s.size(); ++i) r[i - 1] = s[i].mul_si(static_cast<long>(i));
    qqpoly_trim(r);
    return r;
}

// Horner evaluation at a point of Q_{q^n}
inline Qqn series_evaluate(const Series& s, const QqnCtx& ctx) {
    Qqn r = ctx.zero();
    Qqn y = ctx.gen();
    for (std::size_t i = s.size(); i-- > 0;) r = r * y + ctx.from_qq(s[i]);
    return r;
}

class SeriesMat {
  public:
    const QqCtx* ctx = nullptr;
    int dim = 0;
    int trunc = 0;
    std::vector<Series> e;  // row-major, dim*dim entries

    SeriesMat() = default;
    SeriesMat(const QqCtx& ctx_, int dim_, int trunc_)
        : ctx(&ctx_), dim(dim_), trunc(trunc_), e(static_cast<std::size_t>(dim_) * dim_) {}

    Series& at(int i, int j) { return e[static_cast<std::size_t>(i) * dim + j]; }
    const Series& at(int i, int j) const { return e[static_cast<std::size_t>(i) * dim + j]; }

    static SeriesMat identity(const QqCtx& ctx, int dim, int trunc) {
        SeriesMat m(ctx, dim, trunc);
        for (int i = 0; i < dim; ++i) m.at(i, i) = Series{ctx.one()};
        return m;
    }

    int max_shift() const {
        int s = 0;
        for (auto& v : e)
            for (auto& q : v) s = std::max(s, q.max_shift());
        return s;
    }

    SeriesMat operator+(const SeriesMat& o) const {
        SeriesMat r(*ctx, dim, trunc);
        for (std::size_t k = 0; k < e.size(); ++k) r.e[k] = series_add(e[k], o.e[k]);
        return r;
    }
    SeriesMat operator-(const SeriesMat& o) const {
        SeriesMat r(*ctx, dim, trunc);
        for (std::size_t k = 0; k < e.size(); ++k) r.e[k] = series_sub(e[k], o.e[k]);
        return r;
    }

    SeriesMat truncated(int t) const {
        SeriesMat r(*ctx, dim, t);
        for (std::size_t k = 0; k < e.size(); ++k) r.e[k] = series_truncate(e[k], t);
        return r;
    }

    bool eq_mod(const SeriesMat& o, int k) const {
        if (dim != o.dim) return false;
        const Qq z = ctx->zero();
        for (std::size_t t = 0; t < e.size(); ++t) {
            std::size_t len = std::max(e[t].size(), o.e[t].size());
            for (std::size_t i = 0; i < len; ++i) {
                const Qq& a = i < e[t].size() ? e[t][i] : z;
                const Qq& b = i < o.e[t].size() ? o.e[t][i] : z;
                if (!a.eq_mod(b, k)) return false;
            }
        }
        return true;
    }
};

// schoolbook reference product (kept as the oracle for the packed routine)
inline SeriesMat matrix_mul_schoolbook(const SeriesMat& A, const SeriesMat& B, int trunc) {
    if (A.dim != B.dim || !A.ctx->compatible(*B.ctx)) throw BadParameterError("matrix_mul: shape");
    SeriesMat R(*A.ctx, A.dim, trunc);
    for (int i = 0; i < A.dim; ++i)
        for (int j = 0; j < A.dim; ++j) {
            Series acc;
            for (int k = 0; k < A.dim; ++k)
                acc = series_add(acc, series_mul(A.at(i, k), B.at(k, j), trunc));
            R.at(i, j) = std::move(acc);
        }
    return R;
}

namespace detail {

struct PackPlan {
    int slot_limbs;       // limbs per (Gamma, x) slot
    int xslots;           // 2a-1 sub-slots per Gamma index
    int trunc;            // Gamma slots per entry
    int shift_a, shift_b; // common shifts factored out of each operand
    std::size_t entry_limbs() const {
        return static_cast<std::size_t>(slot_limbs) * xslots * trunc;
    }
};

inline mpz_class pack_entry(const Series& v, const PackPlan& pl, int shift, const PadicCtx& zp) {
    std::vector<unsigned long> buf(pl.entry_limbs(), 0);
    mpz_class tmp;
    for (std::size_t k = 0; k < v.size() && k < static_cast<std::size_t>(pl.trunc); ++k) {
        for (std::size_t i = 0; i < v[k].c.size(); ++i) {
            const Padic& x = v[k].c[i];
            if (x.m == 0) continue;
            if (x.s > shift) throw PrecisionError("series pack: shift exceeds plan");
            tmp = x.m;
            if (shift > x.s) tmp *= mpz_pow_ui(zp.pz, static_cast<unsigned long>(shift - x.s));
            std::size_t base = (k * pl.xslots + i) * pl.slot_limbs;
            std::size_t cnt = 0;
            mpz_export(buf.data() + base, &cnt, -1, sizeof(unsigned long), 0, 0, tmp.get_mpz_t());
        }
    }
    mpz_class out;
    mpz_import(out.get_mpz_t(), buf.size(), -1, sizeof(unsigned long), 0, 0, buf.data());
    return out;
}

inline Series unpack_entry(const mpz_class& big, const PackPlan& pl, const QqCtx& ctx) {
    std::size_t need = (mpz_sizeinbase(big.get_mpz_t(), 2) + 63) / 64;
    std::vector<unsigned long> buf(std::max(need, pl.entry_limbs()) + pl.slot_limbs, 0);
    std::size_t cnt = 0;
    mpz_export(buf.data(), &cnt, -1, sizeof(unsigned long), 0, 0, big.get_mpz_t());
    int a = ctx.a;
    int stot = pl.shift_a + pl.shift_b;
    Series out(static_cast<std::size_t>(pl.trunc), ctx.zero());
    mpz_class slot;
    std::vector<Padic> xs(static_cast<std::size_t>(pl.xslots), Padic(*ctx.zp));
    for (int k = 0; k < pl.trunc; ++k) {
        for (int i = 0; i < pl.xslots; ++i) {
            std::size_t base = (static_cast<std::size_t>(k) * pl.xslots + i) * pl.slot_limbs;
            mpz_import(slot.get_mpz_t(), static_cast<std::size_t>(pl.slot_limbs), -1,
                       sizeof(unsigned long), 0, 0, buf.data() + base);
            xs[static_cast<std::size_t>(i)] = Padic(*ctx.zp, slot, stot);
        }
        // fold x^a .. x^(2a-2) down with the modulus (chi has small centered
        // integer coefficients)
        for (int j = pl.xslots - 1; j >= a; --j) {
            Padic t = xs[static_cast<std::size_t>(j)];
            if (t.m == 0) continue;
            xs[static_cast<std::size_t>(j)] = Padic(*ctx.zp);
            for (int i = 0; i < a; ++i)
                xs[static_cast<std::size_t>(j - a + i)] -= t.mul_si(ctx.chi[static_cast<std::size_t>(i)]);
        }
        for (int i = 0; i < a; ++i) out[static_cast<std::size_t>(k)].c[static_cast<std::size_t>(i)] = xs[static_cast<std::size_t>(i)];
    }
    qqpoly_trim(out);
    return out;
}

}  // namespace detail

inline SeriesMat matrix_mul(const SeriesMat& A, const SeriesMat& B, int trunc) {
    if (A.dim != B.dim || !A.ctx->compatible(*B.ctx)) throw BadParameterError("matrix_mul: shape");
    const QqCtx& ctx = *A.ctx;
    const PadicCtx& zp = *ctx.zp;
    int sa = A.max_shift(), sb = B.max_shift();
    detail::PackPlan pl;
    pl.xslots = 2 * ctx.a - 1;
    pl.trunc = trunc;
    pl.shift_a = sa;
    pl.shift_b = sb;
    // slot bound: dim * trunc * a products of values < p^(prec+sa) * p^(prec+sb)
    mpz_class bound = mpz_pow_ui(zp.pz, static_cast<unsigned long>(2 * zp.prec + sa + sb));
    std::size_t bits = mpz_sizeinbase(bound.get_mpz_t(), 2) + 2 +
                       ilog_ceil(2, static_cast<std::uint64_t>(A.dim) * trunc * ctx.a + 1);
    pl.slot_limbs = static_cast<int>((bits + 63) / 64);

    std::vector<mpz_class> pa(A.e.size()), pb(B.e.size());
    for (std::size_t k = 0; k < A.e.size(); ++k) pa[k] = detail::pack_entry(A.e[k], pl, sa, zp);
    for (std::size_t k = 0; k < B.e.size(); ++k) pb[k] = detail::pack_entry(B.e[k], pl, sb, zp);

    SeriesMat R(ctx, A.dim, trunc);
    mpz_class acc;
    for (int i = 0; i < A.dim; ++i)
        for (int j = 0; j < A.dim; ++j) {
            acc = 0;
            for (int k = 0; k < A.dim; ++k)
                acc += pa[static_cast<std::size_t>(i) * A.dim + k] * pb[static_cast<std::size_t>(k) * A.dim + j];
            R.at(i, j) = detail::unpack_entry(acc, pl, ctx);
        }
    return R;
}

// C^sigma(Gamma^p): coefficient k goes through sigma once and lands at p*k
inline SeriesMat substitute_sigma_gamma_p(const SeriesMat& C) {
    const QqCtx& ctx = *C.ctx;
    auto p = static_cast<std::size_t>(ctx.zp->p);
    SeriesMat R(ctx, C.dim, C.trunc);
    for (std::size_t t = 0; t < C.e.size(); ++t) {
        Series out;
        for (std::size_t k = 0; k < C.e[t].size(); ++k) {
            if (p * k >= static_cast<std::size_t>(C.trunc)) break;
            if (C.e[t][k].is_zero()) continue;
            if (out.size() <= p * k) out.resize(p * k + 1, ctx.zero());
            out[p * k] = frobenius_qq(C.e[t][k], 1);
        }
        qqpoly_trim(out);
        R.e[t] = std::move(out);
    }
    return R;
}

// exact inverse of a constant matrix over Q_q: residue-field Gauss-Jordan
// seed, then quadratic Newton lifting
inline std::vector<Qq> const_matrix_invert(const QqCtx& ctx, const std::vector<Qq>& M, int dim) {
    const auto& fq = ctx.fq;
    std::size_t d = static_cast<std::size_t>(dim);
    // reduce and invert over F_q
    std::vector<ExtField<PrimeField>::Elem> R(d * d, fq.zero()), I(d * d, fq.zero());
    for (std::size_t k = 0; k < d * d; ++k) R[k] = ctx.reduce(M[k]);
    for (std::size_t i = 0; i < d; ++i) I[i * d + i] = fq.one();
    for (std::size_t col = 0; col < d; ++col) {
        std::size_t piv = col;
        while (piv < d && fq.is_zero(R[piv * d + col])) ++piv;
        if (piv == d) throw PrecisionError("constant matrix not invertible");
        if (piv != col)
            for (std::size_t j = 0; j < d; ++j) {
                std::swap(R[piv * d + j], R[col * d + j]);
                std::swap(I[piv * d + j], I[col * d + j]);
            }
        auto inv = fq.inv(R[col * d + col]);
        for (std::size_t j = 0; j < d; ++j) {
            R[col * d + j] = fq.mul(R[col * d + j], inv);
            I[col * d + j] = fq.mul(I[col * d + j], inv);
        }
        for (std::size_t r = 0; r < d; ++r) {
            if (r == col || fq.is_zero(R[r * d + col])) continue;
            auto f = R[r * d + col];
            for (std::size_t j = 0; j < d; ++j) {
                R[r * d + j] = fq.sub(R[r * d + j], fq.mul(f, R[col * d + j]));
                I[r * d + j] = fq.sub(I[r * d + j], fq.mul(f, I[col * d + j]));
            }
        }
    }
    std::vector<Qq> D(d * d, ctx.zero());
    for (std::size_t k = 0; k < d * d; ++k) D[k] = ctx.lift(I[k]);
    auto mul = [&](const std::vector<Qq>& X, const std::vector<Qq>& Y) {
        std::vector<Qq> Z(d * d, ctx.zero());
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) {
                Qq s = ctx.zero();
                for (std::size_t k = 0; k < d; ++k) s += X[i * d + k] * Y[k * d + j];
                Z[i * d + j] = std::move(s);
            }
        return Z;
    };
    int iters = ilog_ceil(2, ctx.zp->prec) + 1;
    for (int it = 0; it < iters; ++it) {
        auto MD = mul(M, D);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) {
                MD[i * d + j] = -MD[i * d + j];
                if (i == j) MD[i * d + j] += ctx.from_si(2);
            }
        D = mul(D, MD);
    }
    return D;
}

// D with D*Cm = I mod (p^N, Gamma^trunc), Newton iteration with
// Gamma-precision doubling from the exact inverse of the constant term
inline SeriesMat newton_invert_matrix(const SeriesMat& Cm, int trunc) {
    const QqCtx& ctx = *Cm.ctx;
    std::size_t d = static_cast<std::size_t>(Cm.dim);
    std::vector<Qq> c0(d * d, ctx.zero());
    for (std::size_t k = 0; k < d * d; ++k)
        if (!Cm.e[k].empty()) c0[k] = Cm.e[k][0];
    auto inv0 = const_matrix_invert(ctx, c0, Cm.dim);
    SeriesMat D(ctx, Cm.dim, 1);
    for (std::size_t k = 0; k < d * d; ++k)
        if (!inv0[k].is_zero()) D.e[k] = Series{inv0[k]};
    int t = 1;
    while (t < trunc) {
        t = std::min(2 * t, trunc);
        SeriesMat CD = matrix_mul(Cm.truncated(t), D, t);
        SeriesMat two_minus = SeriesMat::identity(ctx, Cm.dim, t);
        for (std::size_t k = 0; k < d * d; ++k) {
            Series s = two_minus.e[k];
            for (auto& q : s) q = q.mul_si(2);
            two_minus.e[k] = series_sub(s, CD.e[k]);
        }
        D = matrix_mul(D, two_minus, t);
        D.trunc = t;
    }
    D.trunc = trunc;
    return D;
}

}  // namespace zetafam
