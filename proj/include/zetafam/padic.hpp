#pragma once

// Truncated p-adic numbers at fixed absolute precision with an explicit
// denominator exponent ("shift"): the pair (m, s) represents p^(-s)*m with
// m in [0, p^(N+s)).  All arithmetic is exact modular arithmetic on the
// mantissa; precision loss only ever enters through divisions by p, which
// raise the shift.  Each context carries a shift budget; exceeding it is a
// hard error (it signals a violated valuation bound, not a rounding issue).

#include <memory>

#include "common.hpp"

namespace zetafam {

struct PadicCtx {
    std::uint64_t p;
    int prec;          // absolute precision N: values well-defined mod p^N
    int shift_budget;  // max allowed normalized shift

    mpz_class pz;
    std::vector<mpz_class> ppow;  // p^0 .. p^(prec + 2*shift_budget + 4)

    PadicCtx(std::uint64_t p_, int prec_, int budget)
        : p(p_), prec(prec_), shift_budget(budget), pz(static_cast<unsigned long>(p_)) {
        if (p < 3 || p % 2 == 0 || !is_prime_u64(p)) throw BadFamilyError("p must be an odd prime");
        if (prec < 1) throw BadFamilyError("precision must be >= 1");
        int top = prec + 2 * shift_budget + 4;
        ppow.reserve(top + 1);
        mpz_class v = 1;
        for (int e = 0; e <= top; ++e) {
            ppow.push_back(v);
            v *= pz;
        }
    }

    const mpz_class& pow(int e) const {
        if (e < 0) throw PrecisionError("negative power of p requested");
        if (static_cast<std::size_t>(e) >= ppow.size())
            throw PrecisionError("p-power beyond context range (shift budget exceeded?)");
        return ppow[static_cast<std::size_t>(e)];
    }
    bool compatible(const PadicCtx& o) const { return p == o.p && prec == o.prec; }
};

class Padic {
  public:
    const PadicCtx* ctx = nullptr;
    mpz_class m;  // mantissa in [0, p^(prec+s))
    int s = 0;    // shift

    Padic() = default;
    explicit Padic(const PadicCtx& c) : ctx(&c), m(0), s(0) {}
    Padic(const PadicCtx& c, long v) : ctx(&c), m(v), s(0) { clamp(); }
    Padic(const PadicCtx& c, const mpz_class& v) : ctx(&c), m(v), s(0) { clamp(); }
    Padic(const PadicCtx& c, mpz_class v, int shift) : ctx(&c), m(std::move(v)), s(shift) {
        clamp();
        normalize();
    }

    bool is_zero() const { return m == 0; }

    // strip common p factors from mantissa and shift; canonicalizes
    void normalize() {
        if (m == 0) {
            s = 0;
            return;
        }
        while (s > 0 && mpz_divisible_ui_p(m.get_mpz_t(), static_cast<unsigned long>(ctx->p))) {
            mpz_divexact_ui(m.get_mpz_t(), m.get_mpz_t(), static_cast<unsigned long>(ctx->p));
            --s;
        }
        if (s > ctx->shift_budget)
            throw PrecisionError("p-adic shift budget exceeded (shift " + std::to_string(s) +
                                 " > budget " + std::to_string(ctx->shift_budget) + ")");
    }

    Padic operator+(const Padic& o) const {
        require_same(o);
        Padic r(*ctx);
        r.s = std::max(s, o.s);
        r.m = m * ctx->pow(r.s - s) + o.m * ctx->pow(r.s - o.s);
        r.clamp();
        r.normalize();
        return r;
    }
    Padic operator-(const Padic& o) const {
        require_same(o);
        Padic r(*ctx);
        r.s = std::max(s, o.s);
        r.m = m * ctx->pow(r.s - s) - o.m * ctx->pow(r.s - o.s);
        r.clamp();
        r.normalize();
        return r;
    }
    Padic operator-() const {
        Padic r(*ctx);
        r.s = s;
        r.m = -m;
        r.clamp();
        r.normalize();
        return r;
    }
    Padic operator*(const Padic& o) const {
        require_same(o);
        Padic r(*ctx);
        r.s = s + o.s;
        r.m = m * o.m;
        r.clamp();
        r.normalize();
        return r;
    }
    Padic& operator+=(const Padic& o) { return *this = *this + o; }
    Padic& operator-=(const Padic& o) { return *this = *this - o; }
    Padic& operator*=(const Padic& o) { return *this = *this * o; }

    Padic mul_si(long c) const {
        Padic r(*ctx);
        r.s = s;
        r.m = m * c;
        r.clamp();
        r.normalize();
        return r;
    }

    // exact division by a nonzero integer d = p^v * u: multiply by u^(-1),
    // raise the shift by v
    Padic div_si(long d) const {
        if (d == 0) throw PrecisionError("division by zero integer");
        bool neg = d < 0;
        unsigned long ad = static_cast<unsigned long>(neg ? -d : d);
        int v = 0;
        while (ad % ctx->p == 0) {
            ad /= ctx->p;
            ++v;
        }
        Padic r(*ctx);
        r.s = s + v;
        if (r.s > 2 * ctx->shift_budget + 2)
            throw PrecisionError("p-adic shift budget exceeded in integer division");
        const mpz_class& mod = ctx->pow(ctx->prec + r.s);
        mpz_class uinv;
        mpz_class u(ad);
        if (mpz_invert(uinv.get_mpz_t(), u.get_mpz_t(), mod.get_mpz_t()) == 0)
            throw PrecisionError("non-invertible unit part in integer division");
        r.m = m * uinv;
        if (neg) r.m = -r.m;
        r.clamp();
        r.normalize();
        return r;
    }

    // multiplicative inverse; input must be nonzero mod p^prec
    Padic inv() const {
        Padic x = *this;
        x.normalize();
        if (x.m == 0) throw PrecisionError("inverse of zero");
        Padic r(*ctx);
        if (x.s > 0) {
            // value u/p^s with u a unit: inverse p^s * u^(-1) is integral
            mpz_class ui;
            const mpz_class& mod = ctx->pow(ctx->prec);
            mpz_class mm = x.m % mod;
            if (mpz_invert(ui.get_mpz_t(), mm.get_mpz_t(), mod.get_mpz_t()) == 0)
                throw PrecisionError("non-unit mantissa in inverse");
            r.m = ui * ctx->pow(x.s);
            r.s = 0;
        } else {
            int t = 0;
            mpz_class u = x.m;
            while (mpz_divisible_ui_p(u.get_mpz_t(), static_cast<unsigned long>(ctx->p))) {
                mpz_divexact_ui(u.get_mpz_t(), u.get_mpz_t(), static_cast<unsigned long>(ctx->p));
                ++t;
                if (t > ctx->shift_budget)
                    throw PrecisionError("inverse of non-unit exceeds shift budget");
            }
            const mpz_class& mod = ctx->pow(ctx->prec + t);
            mpz_class ui;
            u %= mod;
            if (mpz_invert(ui.get_mpz_t(), u.get_mpz_t(), mod.get_mpz_t()) == 0)
                throw PrecisionError("non-invertible mantissa in inverse");
            r.m = ui;
            r.s = t;
        }
        r.clamp();
        r.normalize();
        return r;
    }

    Padic times_p_pow(int e) const {  // multiply by p^e, e >= 0
        Padic r = *this;
        int drop = std::min(e, r.s);
        r.s -= drop;
        e -= drop;
        if (e > 0) r.m *= ctx->pow(e);
        r.clamp();
        r.normalize();
        return r;
    }

    // equality of the represented values modulo p^k
    bool eq_mod(const Padic& o, int k) const {
        require_same(o);
        mpz_class d = m * ctx->pow(o.s) - o.m * ctx->pow(s);
        return mpz_divisible_p(d.get_mpz_t(), ctx->pow(k + s + o.s).get_mpz_t()) != 0;
    }
    bool is_zero_mod(int k) const {
        return mpz_divisible_p(m.get_mpz_t(), ctx->pow(k + s).get_mpz_t()) != 0;
    }

    // value mod p, requires integrality
    std::uint64_t reduce_fp() const {
        Padic x = *this;
        x.normalize();
        if (x.s > 0) throw PrecisionError("reducing a non-integral value mod p");
        mpz_class r = x.m % ctx->pz;
        return static_cast<std::uint64_t>(r.get_ui());
    }

    // centered integer representative of the value mod p^k, requires the
    // value to be integral to that precision
    mpz_class to_centered(int k) const {
        Padic x = *this;
        x.normalize();
        mpz_class v;
        if (x.s > 0) {
            if (!mpz_divisible_p(x.m.get_mpz_t(), ctx->pow(x.s).get_mpz_t()))
                throw PrecisionError("value not integral in to_centered");
            v = x.m / ctx->pow(x.s);
        } else {
            v = x.m;
        }
        const mpz_class& mod = ctx->pow(k);
        v %= mod;
        if (v < 0) v += mod;
        if (2 * v > mod) v -= mod;
        return v;
    }

    Padic change_ctx(const PadicCtx& c) const {
        if (c.p != ctx->p) throw PrecisionError("context prime mismatch");
        Padic r(c);
        r.s = s;
        r.m = m;
        r.clamp();
        r.normalize();
        return r;
    }

  private:
    void require_same(const Padic& o) const {
        if (!ctx->compatible(*o.ctx)) throw PrecisionError("p-adic context mismatch");
    }
    void clamp() {
        const mpz_class& mod = ctx->pow(ctx->prec + s);
        m %= mod;
        if (m < 0) m += mod;
    }
};

}  // namespace zetafam
