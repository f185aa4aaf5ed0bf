#pragma once

// Independent ground truth: exhaustive point counting over small fields and
// the inverse map from counts to the L-polynomial.  Deliberately dumb — no
// shared code with the p-adic pipeline beyond the finite-field substrate.

#include <chrono>
#include <cstdlib>

#include "family.hpp"

namespace zetafam {

inline std::uint64_t enum_cap() {
    if (const char* e = std::getenv("ZETAFAM_ENUM_CAP")) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(e, &end, 10);
        if (end && *end == '\0' && v > 0) return v;
    }
    return 1ull << 26;
}

struct CountReport {
    mpz_class field_size;
    std::uint64_t affine = 0;
    mpz_class total;
    double seconds = 0;
};

template <class E>
typename E::Elem poly_eval_at(const E& field, const PolyF<E>& f, const typename E::Elem& x) {
    auto acc = field.zero();
    for (std::size_t j = f.size(); j-- > 0;) acc = field.add(field.mul(acc, x), f[j]);
    return acc;
}

// quadratic character with chi2(0) = 0, by exponentiation
template <class E>
int quad_character_pow(const E& field, const typename E::Elem& v, std::uint64_t card) {
    if (field.is_zero(v)) return 0;
    auto e = field.pow(v, (card - 1) / 2);
    return field.eq(e, field.one()) ? 1 : -1;
}

// count points of Y^2 = qbar(X) over the given field, including the single
// point at infinity of the odd-degree model
template <class E>
CountReport count_points_field(const E& field, const PolyF<E>& qbar, std::uint64_t cap = 0) {
    auto t0 = std::chrono::steady_clock::now();
    std::uint64_t card = field.card();
    if (cap == 0) cap = enum_cap();
    if (card > cap) throw BadParameterError("enumeration cap exceeded");
    mpz_class size(static_cast<unsigned long>(card));

    // small fields use the character directly; larger ones use a table of
    // squares, and the two methods are cross-checked on a sample either way
    bool use_table = card >= (1ull << 16);
    std::vector<bool> sq;
    if (use_table) {
        sq.assign(card, false);
        for (std::uint64_t i = 0; i < card; ++i) {
            auto y = field.unindex(i);
            sq[field.index(field.mul(y, y))] = true;
        }
    }
    auto chi2 = [&](const typename E::Elem& v) -> int {
        if (field.is_zero(v)) return 0;
        if (use_table) return sq[field.index(v)] ? 1 : -1;
        return quad_character_pow(field, v, card);
    };
    for (std::uint64_t i = 0; i < std::min<std::uint64_t>(card, 64); ++i) {
        auto v = field.unindex(i);
        int a = quad_character_pow(field, v, card);
        int b;
        if (field.is_zero(v))
            b = 0;
        else {
            bool hit = false;
            if (use_table)
                hit = sq[field.index(v)];
            else
                for (std::uint64_t j = 0; j < card && !hit; ++j) {
                    auto y = field.unindex(j);
                    hit = field.eq(field.mul(y, y), v);
                }
            b = hit ? 1 : -1;
        }
        if (a != b) throw PrecisionError("quadratic character self-check failed");
    }

    CountReport rep;
    rep.field_size = size;
    for (std::uint64_t i = 0; i < card; ++i) {
        auto x = field.unindex(i);
        rep.affine += static_cast<std::uint64_t>(1 + chi2(poly_eval_at(field, qbar, x)));
    }
    rep.total = mpz_class(static_cast<unsigned long>(rep.affine)) + 1;
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

// count over the degree-k extension of the field carrying qbar
template <class E>
CountReport count_points_naive(const E& field, const PolyF<E>& qbar, int k, std::uint64_t cap = 0) {
    if (k == 1) return count_points_field(field, qbar, cap);
    if (k < 1) throw BadParameterError("extension degree must be >= 1");
    ExtField<E> ext(field, find_irreducible(field, static_cast<std::size_t>(k)));
    PolyF<ExtField<E>> lifted(qbar.size(), ext.zero());
    for (std::size_t i = 0; i < qbar.size(); ++i) lifted[i] = ext.from_base(qbar[i]);
    return count_points_field(ext, lifted, cap);
}

// invert #X(F_{q^k}) = q^k + 1 - s_k for k = 1..g into P(t) = 1 + a_1 t + ...
// + a_2g t^2g using Newton's identities and the functional equation
inline std::vector<mpz_class> zeta_from_counts(const std::vector<mpz_class>& counts,
                                               const mpz_class& q, int g) {
    if (static_cast<int>(counts.size()) < g) throw BadParameterError("need counts for k = 1..g");
    std::vector<mpz_class> s(static_cast<std::size_t>(g) + 1);
    mpz_class qk = 1;
    for (int k = 1; k <= g; ++k) {
        qk *= q;
        s[static_cast<std::size_t>(k)] = qk + 1 - counts[static_cast<std::size_t>(k - 1)];
    }
    std::vector<mpz_class> a(static_cast<std::size_t>(2 * g) + 1);
    a[0] = 1;
    for (int k = 1; k <= g; ++k) {
        mpz_class t = s[static_cast<std::size_t>(k)];
        for (int i = 1; i < k; ++i) t += a[static_cast<std::size_t>(i)] * s[static_cast<std::size_t>(k - i)];
        if (t % k != 0) throw BadParameterError("counts are inconsistent with an integral L-polynomial");
        a[static_cast<std::size_t>(k)] = -t / k;
    }
    mpz_class qp = 1;
    for (int i = g - 1; i >= 0; --i) {
        qp *= q;  // q^(g-i)
        a[static_cast<std::size_t>(2 * g - i)] = qp * a[static_cast<std::size_t>(i)];
    }
    return a;
}

}  // namespace zetafam
