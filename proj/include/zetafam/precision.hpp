#pragma once

// Working-precision profile for the family computation.  Everything follows
// from p, a, g, kappa and the largest extension degree n that will be
// queried; the log terms are evaluated exactly by integer power comparison,
// never in floating point.

#include "family.hpp"

namespace zetafam {

struct PrecisionProfile {
    int n;
    int eta;
    int mu_times_2;  // 2*mu = pg - 4 (may be negative)
    int N0, N3, N4, N6, N8;
    int Nb, Na;
    long Ngamma;
    long M;
    bool heuristic_m = false;
};

namespace detail {

// smallest e >= 0 with b^e >= x
inline int ilog_ceil_mpz(unsigned long b, const mpz_class& x) {
    int e = 0;
    mpz_class pw = 1;
    while (pw < x) {
        pw *= b;
        ++e;
    }
    return e;
}
// largest e >= 0 with b^e <= x (x >= 1)
inline int ilog_floor_mpz(unsigned long b, const mpz_class& x) {
    int e = 0;
    mpz_class pw = b;
    while (pw <= x) {
        pw *= b;
        ++e;
    }
    return e;
}

}  // namespace detail

inline PrecisionProfile compute_precisions(const CurveFamily& fam, int n,
                                           bool heuristic_m = false) {
    if (n < 1) throw BadParameterError("extension degree must be >= 1");
    auto p = static_cast<unsigned long>(fam.p);
    long a = fam.a, g = fam.g;
    long an = a * static_cast<long>(n);

    PrecisionProfile pr;
    pr.n = n;
    pr.heuristic_m = heuristic_m;
    pr.mu_times_2 = static_cast<int>(p * g) - 4;

    // eta = ceil(2g log_p g + g) = ceil(log_p g^2g) + g
    mpz_class g2g;
    mpz_pow_ui(g2g.get_mpz_t(), mpz_class(g).get_mpz_t(), static_cast<unsigned long>(2 * g));
    pr.eta = detail::ilog_ceil_mpz(p, g2g) + static_cast<int>(g);

    // N0 = ceil(nga/2 + (2g+1) log_p 2): smallest N with p^2N >= p^nga 4^(2g+1)
    {
        mpz_class target;
        mpz_pow_ui(target.get_mpz_t(), mpz_class(p).get_mpz_t(), static_cast<unsigned long>(an * g));
        mpz_class four_pow;
        mpz_pow_ui(four_pow.get_mpz_t(), mpz_class(4).get_mpz_t(), static_cast<unsigned long>(2 * g + 1));
        target *= four_pow;
        int N = 0;
        mpz_class pw = 1;
        while (pw < target) {
            pw *= p;
            pw *= p;
            ++N;
        }
        pr.N0 = N;
    }

    // N8 = an floor(log_p g + 2) + floor(2gan (log_p g + 3))
    {
        mpz_class gpow;
        mpz_pow_ui(gpow.get_mpz_t(), mpz_class(g).get_mpz_t(), static_cast<unsigned long>(2 * g * an));
        pr.N8 = static_cast<int>(an) * (ilog_floor(fam.p, static_cast<std::uint64_t>(g)) + 2) +
                detail::ilog_floor_mpz(p, gpow) + static_cast<int>(6 * g * an);
    }

    pr.Nb = pr.N0 + pr.N8;
    if (2 * pr.Nb + 4 < static_cast<int>(p) * g)
        throw PrecisionError("working precision below the pg/2 - 2 threshold");

    // a constant family still gets a (trivial) one-term Gamma expansion
    long kap = std::max(fam.kappa, 1);
    pr.Ngamma = (2L * pr.Nb + 5) * (8 * g + 2) * kap * static_cast<long>(p) + 1;
    pr.M = static_cast<long>(p) * (2 * pr.Nb + 4) + static_cast<long>(p - 1) / 2;
    if (heuristic_m) {
        // experimental shortcut; every downstream result gets re-verified
        // against the functional equation and the Weil bounds
        long num = (3L * n + 20) * static_cast<long>(p) * g;  // (3n/2 + 10) pg / 3
        pr.M = (num + 5) / 6;
    }

    int L = detail::ilog_ceil_mpz(p, mpz_class(pr.Ngamma));
    pr.N3 = (2 * pr.eta + 1) * L;
    pr.N6 = 3 * pr.eta * L;
    // N4 = ceil(log_2(Ngamma) * eta * (3 ceil(log_p Ngamma) - 2))
    {
        long K = static_cast<long>(pr.eta) * (3L * L - 2);
        if (K < 0) K = 0;
        mpz_class npow;
        mpz_pow_ui(npow.get_mpz_t(), mpz_class(pr.Ngamma).get_mpz_t(), static_cast<unsigned long>(K));
        pr.N4 = detail::ilog_ceil_mpz(2, npow);
    }
    pr.Na = pr.Nb + pr.N3 + pr.N4 + pr.N6;
    return pr;
}

}  // namespace zetafam
