#pragma once

// Finite fields as a template tower: PrimeField (F_p, word-sized p) and
// ExtField<F> = F[t]/mod for the layers F_q, F_{q^n} and oracle extensions.
// Elements are coefficient vectors over the layer below; all operations are
// generic in the field concept {Elem, zero, one, add, sub, mul, inv, eq}.

#include <random>
#include <tuple>

#include "common.hpp"

namespace zetafam {

struct PrimeField {
    using Elem = std::uint64_t;
    std::uint64_t p;

    explicit PrimeField(std::uint64_t p_) : p(p_) {
        if (!is_prime_u64(p) || p < 2) throw BadFamilyError("field characteristic must be prime");
    }
    Elem zero() const { return 0; }
    Elem one() const { return 1; }
    bool is_zero(Elem a) const { return a == 0; }
    bool eq(Elem a, Elem b) const { return a == b; }
    Elem add(Elem a, Elem b) const { return (a + b) % p; }
    Elem sub(Elem a, Elem b) const { return (a + p - b % p) % p; }
    Elem neg(Elem a) const { return a == 0 ? 0 : p - a; }
    Elem mul(Elem a, Elem b) const { return (a * b) % p; }  // p < 2^31 assumed
    Elem inv(Elem a) const {
        if (a == 0) throw PrecisionError("F_p inverse of zero");
        return pow(a, p - 2);
    }
    Elem pow(Elem a, std::uint64_t e) const {
        Elem r = 1, b = a % p;
        while (e) {
            if (e & 1) r = mul(r, b);
            b = mul(b, b);
            e >>= 1;
        }
        return r;
    }
    Elem from_int(long v) const {
        long r = v % static_cast<long>(p);
        if (r < 0) r += static_cast<long>(p);
        return static_cast<Elem>(r);
    }
    mpz_class order() const { return mpz_class(static_cast<unsigned long>(p)); }
    std::uint64_t characteristic() const { return p; }
    Elem random(std::mt19937_64& rng) const { return rng() % p; }
    // enumeration support: elements indexed 0 .. order-1
    std::uint64_t card() const { return p; }
    Elem unindex(std::uint64_t i) const { return i; }
    std::uint64_t index(Elem a) const { return a; }
};

// ----- generic dense polynomial helpers over a field F -----

template <class F>
using PolyF = std::vector<typename F::Elem>;

template <class F>
void poly_trim(const F& f, PolyF<F>& a) {
    while (!a.empty() && f.is_zero(a.back())) a.pop_back();
}

template <class F>
PolyF<F> poly_add(const F& f, const PolyF<F>& a, const PolyF<F>& b) {
    PolyF<F> r(std::max(a.size(), b.size()), f.zero());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i];
    for (std::size_t i = 0; i < b.size(); ++i) r[i] = f.add(r[i], b[i]);
    poly_trim(f, r);
    return r;
}

template <class F>
PolyF<F> poly_sub(const F& f, const PolyF<F>& a, const PolyF<F>& b) {
    PolyF<F> r(std::max(a.size(), b.size()), f.zero());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i];
    for (std::size_t i = 0; i < b.size(); ++i) r[i] = f.sub(r[i], b[i]);
    poly_trim(f, r);
    return r;
}

template <class F>
PolyF<F> poly_mul(const F& f, const PolyF<F>& a, const PolyF<F>& b) {
    if (a.empty() || b.empty()) return {};
    PolyF<F> r(a.size() + b.size() - 1, f.zero());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            r[i + j] = f.add(r[i + j], f.mul(a[i], b[j]));
    poly_trim(f, r);
    return r;
}

template <class F>
PolyF<F> poly_scal(const F& f, const PolyF<F>& a, const typename F::Elem& c) {
    PolyF<F> r = a;
    for (auto& x : r) x = f.mul(x, c);
    poly_trim(f, r);
    return r;
}

template <class F>
std::pair<PolyF<F>, PolyF<F>> poly_divmod(const F& f, PolyF<F> a, const PolyF<F>& b) {
    if (b.empty()) throw PrecisionError("polynomial division by zero");
    poly_trim(f, a);
    if (a.size() < b.size()) return {{}, a};
    auto li = f.inv(b.back());
    PolyF<F> q(a.size() - b.size() + 1, f.zero());
    for (std::size_t off = q.size(); off-- > 0;) {
        auto lead = a[off + b.size() - 1];
        if (f.is_zero(lead)) continue;
        auto c = f.mul(lead, li);
        q[off] = c;
        for (std::size_t i = 0; i < b.size(); ++i) a[off + i] = f.sub(a[off + i], f.mul(c, b[i]));
    }
    poly_trim(f, a);
    poly_trim(f, q);
    return {q, a};
}

template <class F>
PolyF<F> poly_mod(const F& f, PolyF<F> a, const PolyF<F>& b) {
    return poly_divmod(f, std::move(a), b).second;
}

template <class F>
PolyF<F> poly_gcd(const F& f, PolyF<F> a, PolyF<F> b) {
    poly_trim(f, a);
    poly_trim(f, b);
    while (!b.empty()) {
        auto r = poly_mod(f, a, b);
        a = std::move(b);
        b = std::move(r);
    }
    if (!a.empty()) a = poly_scal(f, a, f.inv(a.back()));  // monic
    return a;
}

// extended gcd: returns (g, u, v) with u*a + v*b = g, g monic
template <class F>
std::tuple<PolyF<F>, PolyF<F>, PolyF<F>> poly_xgcd(const F& f, PolyF<F> a, PolyF<F> b) {
    PolyF<F> u0{f.one()}, v0{}, u1{}, v1{f.one()};
    poly_trim(f, a);
    poly_trim(f, b);
    while (!b.empty()) {
        auto [q, r] = poly_divmod(f, a, b);
        a = std::move(b);
        b = std::move(r);
        auto u2 = poly_sub(f, u0, poly_mul(f, q, u1));
        auto v2 = poly_sub(f, v0, poly_mul(f, q, v1));
        u0 = std::move(u1);
        v0 = std::move(v1);
        u1 = std::move(u2);
        v1 = std::move(v2);
    }
    if (!a.empty()) {
        auto li = f.inv(a.back());
        a = poly_scal(f, a, li);
        u0 = poly_scal(f, u0, li);
        v0 = poly_scal(f, v0, li);
    }
    return {a, u0, v0};
}

template <class F>
PolyF<F> poly_powmod(const F& f, PolyF<F> base, mpz_class e, const PolyF<F>& mod) {
    PolyF<F> r{f.one()};
    base = poly_mod(f, base, mod);
    while (e > 0) {
        if (mpz_odd_p(e.get_mpz_t())) r = poly_mod(f, poly_mul(f, r, base), mod);
        base = poly_mod(f, poly_mul(f, base, base), mod);
        e >>= 1;
    }
    return r;
}

// derivative
template <class F>
PolyF<F> poly_deriv(const F& f, const PolyF<F>& a) {
    PolyF<F> r;
    for (std::size_t i = 1; i < a.size(); ++i) {
        typename F::Elem c = f.zero();
        for (std::size_t j = 0; j < i % f.characteristic(); ++j) c = f.add(c, a[i]);
        // i*a[i] computed by repeated addition of the residue i mod char
        r.push_back(c);
    }
    poly_trim(f, r);
    return r;
}

// irreducibility over F of monic poly of degree m:
//   t^(|F|^m) == t mod a, and gcd(t^(|F|^(m/ell)) - t, a) = 1 for prime ell | m
template <class F>
bool poly_irreducible(const F& f, const PolyF<F>& a) {
    if (a.size() < 2) return false;
    std::size_t m = a.size() - 1;
    mpz_class Q = f.order();
    PolyF<F> t{f.zero(), f.one()};
    mpz_class qm;
    ::mpz_pow_ui(qm.get_mpz_t(), Q.get_mpz_t(), static_cast<unsigned long>(m));
    auto frob = poly_powmod(f, t, qm, a);
    auto d = poly_sub(f, frob, poly_mod(f, t, a));
    poly_trim(f, d);
    if (!d.empty()) return false;
    for (std::size_t ell = 2; ell <= m; ++ell) {
        if (m % ell != 0) continue;
        bool isp = true;
        for (std::size_t d2 = 2; d2 * d2 <= ell; ++d2)
            if (ell % d2 == 0) isp = false;
        if (!isp) continue;
        mpz_class qe;
        ::mpz_pow_ui(qe.get_mpz_t(), Q.get_mpz_t(), static_cast<unsigned long>(m / ell));
        auto fe = poly_powmod(f, t, qe, a);
        auto g = poly_gcd(f, poly_sub(f, fe, t), a);
        if (g.size() != 1) return false;
    }
    return true;
}

// first monic irreducible of degree m in lexicographic coefficient order
template <class F>
PolyF<F> find_irreducible(const F& f, std::size_t m) {
    if (m == 1) return PolyF<F>{f.zero(), f.one()};
    std::uint64_t card = f.card();
    std::vector<std::uint64_t> idx(m, 0);
    for (;;) {
        PolyF<F> a(m + 1, f.zero());
        a[m] = f.one();
        for (std::size_t i = 0; i < m; ++i) a[i] = f.unindex(idx[i]);
        if (poly_irreducible(f, a)) return a;
        std::size_t i = 0;
        while (i < m && ++idx[i] == card) idx[i++] = 0;
        if (i == m) throw PrecisionError("no irreducible polynomial found");
    }
}

// ----- field extension layer -----

template <class F>
struct ExtField {
    using Elem = std::vector<typename F::Elem>;  // length deg, coeffs over F
    const F* base;
    PolyF<F> mod;  // monic of degree deg

    ExtField(const F& b, PolyF<F> m, bool check_irreducible = true) : base(&b), mod(std::move(m)) {
        if (mod.size() < 2 || !base->eq(mod.back(), base->one()))
            throw BadFamilyError("extension modulus must be monic of degree >= 1");
        if (check_irreducible && !poly_irreducible(*base, mod))
            throw BadFamilyError("extension modulus is reducible");
    }
    std::size_t deg() const { return mod.size() - 1; }

    Elem zero() const { return Elem(deg(), base->zero()); }
    Elem one() const {
        Elem e = zero();
        if (deg() > 0) e[0] = base->one();
        return e;
    }
    Elem gen() const {  // class of t (reduced if deg == 1)
        if (deg() == 1) return Elem{base->neg(mod[0])};
        Elem e = zero();
        e[1] = base->one();
        return e;
    }
    bool is_zero(const Elem& a) const {
        for (auto& c : a)
            if (!base->is_zero(c)) return false;
        return true;
    }
    bool eq(const Elem& a, const Elem& b) const {
        for (std::size_t i = 0; i < deg(); ++i)
            if (!base->eq(a[i], b[i])) return false;
        return true;
    }
    Elem add(const Elem& a, const Elem& b) const {
        Elem r = a;
        for (std::size_t i = 0; i < deg(); ++i) r[i] = base->add(r[i], b[i]);
        return r;
    }
    Elem sub(const Elem& a, const Elem& b) const {
        Elem r = a;
        for (std::size_t i = 0; i < deg(); ++i) r[i] = base->sub(r[i], b[i]);
        return r;
    }
    Elem neg(const Elem& a) const {
        Elem r = a;
        for (auto& c : r) c = base->neg(c);
        return r;
    }
    Elem mul(const Elem& a, const Elem& b) const {
        PolyF<F> pa(a.begin(), a.end()), pb(b.begin(), b.end());
        poly_trim(*base, pa);
        poly_trim(*base, pb);
        auto pr = poly_mod(*base, poly_mul(*base, pa, pb), mod);
        pr.resize(deg(), base->zero());
        return pr;
    }
    Elem inv(const Elem& a) const {
        PolyF<F> pa(a.begin(), a.end());
        poly_trim(*base, pa);
        if (pa.empty()) throw PrecisionError("extension-field inverse of zero");
        auto [g, u, v] = poly_xgcd(*base, pa, mod);
        (void)v;
        if (g.size() != 1) throw PrecisionError("non-invertible element (reducible modulus?)");
        auto ui = poly_scal(*base, u, base->inv(g[0]));
        ui = poly_mod(*base, ui, mod);
        ui.resize(deg(), base->zero());
        return ui;
    }
    Elem pow(Elem a, mpz_class e) const {
        Elem r = one();
        while (e > 0) {
            if (mpz_odd_p(e.get_mpz_t())) r = mul(r, a);
            a = mul(a, a);
            e >>= 1;
        }
        return r;
    }
    Elem from_int(long v) const {
        Elem e = zero();
        e[0] = base->from_int(v);
        return e;
    }
    Elem from_base(const typename F::Elem& c) const {
        Elem e = zero();
        e[0] = c;
        return e;
    }
    mpz_class order() const {
        mpz_class r;
        ::mpz_pow_ui(r.get_mpz_t(), base->order().get_mpz_t(), static_cast<unsigned long>(deg()));
        return r;
    }
    std::uint64_t characteristic() const { return base->characteristic(); }
    Elem random(std::mt19937_64& rng) const {
        Elem e = zero();
        for (auto& c : e) c = base->random(rng);
        return e;
    }
    std::uint64_t card() const {
        std::uint64_t c = 1;
        for (std::size_t i = 0; i < deg(); ++i) {
            if (c > (1ull << 40) / base->card()) throw PrecisionError("field too large to index");
            c *= base->card();
        }
        return c;
    }
    Elem unindex(std::uint64_t i) const {
        Elem e = zero();
        std::uint64_t bc = base->card();
        for (std::size_t k = 0; k < deg(); ++k) {
            e[k] = base->unindex(i % bc);
            i /= bc;
        }
        return e;
    }
    std::uint64_t index(const Elem& a) const {
        std::uint64_t i = 0, bc = base->card();
        for (std::size_t k = deg(); k-- > 0;) i = i * bc + base->index(a[k]);
        return i;
    }
};

// minimal polynomial of gamma over the base field of its layer: first linear
// dependency among 1, gamma, gamma^2, ... in the coordinate space over F
template <class F>
PolyF<F> minimal_polynomial(const ExtField<F>& E, const typename ExtField<F>::Elem& gamma) {
    const F& f = *E.base;
    std::size_t n = E.deg();
    // rows of reduced echelon basis, with the combination that produced them
    std::vector<std::vector<typename F::Elem>> rows;       // length n
    std::vector<std::vector<typename F::Elem>> combos;     // length <= n+1
    std::vector<std::size_t> pivots;
    typename ExtField<F>::Elem pw = E.one();
    for (std::size_t d = 0; d <= n; ++d) {
        std::vector<typename F::Elem> v(pw.begin(), pw.end());
        std::vector<typename F::Elem> combo(d + 1, f.zero());
        combo[d] = f.one();
        // eliminate against existing rows
        for (std::size_t r = 0; r < rows.size(); ++r) {
            auto c = v[pivots[r]];
            if (f.is_zero(c)) continue;
            for (std::size_t j = 0; j < n; ++j) v[j] = f.sub(v[j], f.mul(c, rows[r][j]));
            combos[r].resize(std::max(combos[r].size(), combo.size()), f.zero());
            combo.resize(std::max(combos[r].size(), combo.size()), f.zero());
            for (std::size_t j = 0; j < combos[r].size(); ++j)
                combo[j] = f.sub(combo[j], f.mul(c, combos[r][j]));
        }
        std::size_t piv = n;
        for (std::size_t j = 0; j < n; ++j)
            if (!f.is_zero(v[j])) {
                piv = j;
                break;
            }
        if (piv == n) {
            // dependency found: combo holds min-poly coefficients
            PolyF<F> mp(combo.begin(), combo.end());
            poly_trim(f, mp);
            auto li = f.inv(mp.back());
            return poly_scal(f, mp, li);
        }
        auto ci = f.inv(v[piv]);
        for (std::size_t j = 0; j < n; ++j) v[j] = f.mul(v[j], ci);
        for (auto& c : combo) c = f.mul(c, ci);
        rows.push_back(std::move(v));
        combos.push_back(std::move(combo));
        pivots.push_back(piv);
        pw = E.mul(pw, gamma);
    }
    throw PrecisionError("minimal polynomial search failed");
}

}  // namespace zetafam
