#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace zetafam {

// Error taxonomy.  The CLI maps these onto distinct exit codes; library users
// can catch them individually.
struct ZfError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct BadFamilyError : ZfError {
    using ZfError::ZfError;
};
struct BadParameterError : ZfError {
    using ZfError::ZfError;
};
// Precision/valuation budget exhaustion or violated internal invariant.
struct PrecisionError : ZfError {
    using ZfError::ZfError;
};
struct IoError : ZfError {
    using ZfError::ZfError;
};

inline bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

// smallest e >= 0 with p^e >= x  (x >= 1), i.e. ceil(log_p x)
inline int ilog_ceil(std::uint64_t p, std::uint64_t x) {
    int e = 0;
    std::uint64_t v = 1;
    while (v < x) {
        v *= p;
        ++e;
    }
    return e;
}

// largest e >= 0 with p^e <= x  (x >= 1), i.e. floor(log_p x)
inline int ilog_floor(std::uint64_t p, std::uint64_t x) {
    int e = 0;
    std::uint64_t v = p;
    while (v <= x) {
        v *= p;
        ++e;
    }
    return e;
}

inline mpz_class mpz_pow_ui(const mpz_class& b, unsigned long e) {
    mpz_class r;
    ::mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), e);
    return r;
}

// FNV-1a 64-bit, used for cache-file integrity.
struct Fnv1a {
    std::uint64_t h = 1469598103934665603ull;
    void feed(const void* data, std::size_t len) {
        const auto* b = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < len; ++i) {
            h ^= b[i];
            h *= 1099511628211ull;
        }
    }
};

}  // namespace zetafam
