#pragma once

// Input documents and cache persistence.  Family specs and parameter specs
// are JSON; the cache is a checksummed binary container whose big integers
// are stored as little-endian 64-bit chunks, so a cache written on one
// machine loads bit-exactly on any other.

#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "zeta.hpp"

namespace zetafam {

struct FamilySpec {
    CurveFamily fam;
    bool heuristic_m = false;
    nlohmann::json echo;  // canonical form, embedded in the cache
};

inline FamilySpec parse_family_spec(const nlohmann::json& j) {
    auto need = [&](const char* k) -> const nlohmann::json& {
        if (!j.contains(k)) throw BadFamilyError(std::string("family spec: missing field '") + k + "'");
        return j.at(k);
    };
    std::uint64_t p;
    try {
        p = need("p").get<std::uint64_t>();
    } catch (const nlohmann::json::exception&) {
        throw BadFamilyError("family spec: 'p' must be an integer");
    }
    std::vector<long> chi;
    try {
        chi = need("chi").get<std::vector<long>>();
    } catch (const nlohmann::json::exception&) {
        throw BadFamilyError("family spec: 'chi' must be an integer list");
    }
    int a = static_cast<int>(chi.size()) - 1;
    if (a < 1) throw BadFamilyError("family spec: 'chi' must have degree >= 1");

    const auto& Q = need("Q");
    if (!Q.is_array() || Q.empty()) throw BadFamilyError("family spec: 'Q' must be a list of [i, j, c] triples");
    int degx = -1, degg = -1;
    for (const auto& t : Q) {
        if (!t.is_array() || t.size() != 3 || !t[0].is_number_integer() || !t[1].is_number_integer())
            throw BadFamilyError("family spec: each Q entry must be [i, j, c]");
        degx = std::max(degx, t[0].get<int>());
        degg = std::max(degg, t[1].get<int>());
        if (t[0].get<int>() < 0 || t[1].get<int>() < 0)
            throw BadFamilyError("family spec: Q exponents must be nonnegative");
    }
    std::vector<std::vector<std::vector<long>>> qc(
        static_cast<std::size_t>(degx) + 1,
        std::vector<std::vector<long>>(static_cast<std::size_t>(degg) + 1,
                                       std::vector<long>(static_cast<std::size_t>(a), 0)));
    for (const auto& t : Q) {
        std::vector<long> c;
        try {
            c = t[2].get<std::vector<long>>();
        } catch (const nlohmann::json::exception&) {
            throw BadFamilyError("family spec: Q coefficient must be an integer list over F_p");
        }
        if (static_cast<int>(c.size()) != a)
            throw BadFamilyError("family spec: Q coefficient length must equal deg(chi) = " + std::to_string(a));
        qc[t[0].get<std::size_t>()][t[1].get<std::size_t>()] = c;
    }
    // trim empty trailing Gamma columns so kappa comes out right
    for (auto& col : qc) {
        while (col.size() > 1) {
            bool z = true;
            for (long v : col.back())
                if (v) z = false;
            if (!z) break;
            col.pop_back();
        }
    }
    bool variant = j.value("variant_basis", false);
    FamilySpec fs{CurveFamily(p, chi, qc, variant), j.value("heuristic_m", false), {}};
    fs.echo["p"] = p;
    fs.echo["chi"] = chi;
    nlohmann::json qj = nlohmann::json::array();
    for (std::size_t i = 0; i < qc.size(); ++i)
        for (std::size_t jj = 0; jj < qc[i].size(); ++jj) {
            bool z = true;
            for (long v : qc[i][jj])
                if (v) z = false;
            if (!z) qj.push_back({i, jj, qc[i][jj]});
        }
    fs.echo["Q"] = qj;
    fs.echo["variant_basis"] = variant;
    fs.echo["heuristic_m"] = fs.heuristic_m;
    return fs;
}

inline FamilySpec load_family_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open family spec: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw BadFamilyError(std::string("family spec parse error: ") + e.what());
    }
    return parse_family_spec(j);
}

// --- binary cache -----------------------------------------------------------

namespace detail {

constexpr char kCacheMagic[9] = "ZETAFAM\x01";
constexpr std::uint32_t kCacheVersion = 1;

struct Fnv1a {
    std::uint64_t h = 1469598103934665603ull;
    void feed(const void* p, std::size_t n) {
        const auto* b = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= b[i];
            h *= 1099511628211ull;
        }
    }
};

struct CacheWriter {
    std::ostringstream out;
    void bytes(const void* p, std::size_t n) { out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n)); }
    void u32(std::uint32_t v) {
        unsigned char b[4];
        for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
        bytes(b, 4);
    }
    void u64(std::uint64_t v) {
        unsigned char b[8];
        for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
        bytes(b, 8);
    }
    void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }
    // sign byte, then magnitude as little-endian 64-bit chunks
    void mpz(const mpz_class& v) {
        int sg = mpz_sgn(v.get_mpz_t());
        unsigned char s = sg < 0 ? 2 : (sg > 0 ? 1 : 0);
        bytes(&s, 1);
        if (sg == 0) {
            u64(0);
            return;
        }
        std::size_t nchunks = (mpz_sizeinbase(v.get_mpz_t(), 2) + 63) / 64;
        u64(nchunks);
        std::vector<std::uint64_t> buf(nchunks, 0);
        std::size_t written = 0;
        mpz_export(buf.data(), &written, -1, 8, -1, 0, v.get_mpz_t());
        for (std::size_t i = 0; i < nchunks; ++i) u64(buf[i]);
    }
    void str(const std::string& s) {
        u64(s.size());
        bytes(s.data(), s.size());
    }
};

struct CacheReader {
    std::string data;
    std::size_t pos = 0;
    void bytes(void* p, std::size_t n) {
        if (pos + n > data.size()) throw IoError("cache truncated");
        std::memcpy(p, data.data() + pos, n);
        pos += n;
    }
    std::uint32_t u32() {
        unsigned char b[4];
        bytes(b, 4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
        return v;
    }
    std::uint64_t u64() {
        unsigned char b[8];
        bytes(b, 8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
        return v;
    }
    std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
    mpz_class mpz() {
        unsigned char s;
        bytes(&s, 1);
        std::uint64_t n = u64();
        if (s == 0) {
            if (n != 0) throw IoError("cache corrupt: malformed zero");
            return 0;
        }
        if (n > (1u << 22)) throw IoError("cache corrupt: oversized integer");
        std::vector<std::uint64_t> buf(n);
        for (auto& c : buf) c = u64();
        mpz_class v;
        mpz_import(v.get_mpz_t(), buf.size(), -1, 8, -1, 0, buf.data());
        if (s == 2) v = -v;
        return v;
    }
    std::string str() {
        std::uint64_t n = u64();
        if (pos + n > data.size()) throw IoError("cache truncated");
        std::string s(data.data() + pos, n);
        pos += n;
        return s;
    }
};

}  // namespace detail

inline void save_cache(const DeformationCache& cache, const nlohmann::json& echo,
                       const std::string& path) {
    detail::CacheWriter w;
    w.bytes(detail::kCacheMagic, 8);
    w.u32(detail::kCacheVersion);
    w.str(echo.dump());

    const PrecisionProfile& pr = cache.profile;
    w.i64(pr.n);
    w.i64(pr.eta);
    w.i64(pr.mu_times_2);
    w.i64(pr.N0);
    w.i64(pr.N3);
    w.i64(pr.N4);
    w.i64(pr.N6);
    w.i64(pr.N8);
    w.i64(pr.Nb);
    w.i64(pr.Na);
    w.i64(pr.Ngamma);
    w.i64(pr.M);
    w.u32(pr.heuristic_m ? 1 : 0);

    // exact resultant coefficients
    w.u64(cache.cert.r.size());
    for (const auto& coef : cache.cert.r) {
        w.u64(coef.size());
        for (const auto& v : coef) w.mpz(v);
    }
    // F(0): explicit shift, then the mantissa
    w.u64(cache.F0.size());
    for (const auto& e : cache.F0) {
        w.u64(e.c.size());
        for (const auto& pd : e.c) {
            w.i64(pd.s);
            w.mpz(pd.m);
        }
    }
    // r^M F entries: integral, shift-free by construction
    w.u64(cache.rmf.size());
    for (const auto& s : cache.rmf) {
        w.u64(s.size());
        for (const auto& q : s) {
            w.u64(q.c.size());
            for (const auto& pd : q.c) {
                if (pd.s != 0) throw IoError("cache invariant violated: r^M F carries a shift");
                w.mpz(pd.m);
            }
        }
    }

    std::string body = w.out.str();
    detail::Fnv1a ck;
    ck.feed(body.data(), body.size());
    detail::CacheWriter tail;
    tail.u64(ck.h);

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open cache for writing: " + path);
    f.write(body.data(), static_cast<std::streamsize>(body.size()));
    std::string t = tail.out.str();
    f.write(t.data(), static_cast<std::streamsize>(t.size()));
    if (!f) throw IoError("cache write failed: " + path);
}

inline DeformationCache load_cache(const std::string& path) {
    detail::CacheReader r;
    {
        std::ifstream f(path, std::ios::binary);
        if (!f) throw IoError("cannot open cache: " + path);
        std::ostringstream ss;
        ss << f.rdbuf();
        r.data = ss.str();
    }
    if (r.data.size() < 16) throw IoError("cache truncated");
    {
        detail::Fnv1a ck;
        ck.feed(r.data.data(), r.data.size() - 8);
        detail::CacheReader tail;
        tail.data = r.data.substr(r.data.size() - 8);
        if (ck.h != tail.u64()) throw IoError("cache checksum mismatch (corrupted file)");
        r.data.resize(r.data.size() - 8);
    }
    char magic[8];
    r.bytes(magic, 8);
    if (std::memcmp(magic, detail::kCacheMagic, 8) != 0) throw IoError("not a cache file");
    if (r.u32() != detail::kCacheVersion) throw IoError("unsupported cache format version");

    nlohmann::json echo;
    try {
        echo = nlohmann::json::parse(r.str());
    } catch (const nlohmann::json::exception&) {
        throw IoError("cache corrupt: bad family echo");
    }
    FamilySpec fs = parse_family_spec(echo);
    auto cert = validate_family(fs.fam);

    PrecisionProfile pr;
    pr.n = static_cast<int>(r.i64());
    pr.eta = static_cast<int>(r.i64());
    pr.mu_times_2 = static_cast<int>(r.i64());
    pr.N0 = static_cast<int>(r.i64());
    pr.N3 = static_cast<int>(r.i64());
    pr.N4 = static_cast<int>(r.i64());
    pr.N6 = static_cast<int>(r.i64());
    pr.N8 = static_cast<int>(r.i64());
    pr.Nb = static_cast<int>(r.i64());
    pr.Na = static_cast<int>(r.i64());
    pr.Ngamma = r.i64();
    pr.M = r.i64();
    pr.heuristic_m = r.u32() != 0;
    // the profile is derivable; a stored profile that disagrees is corruption
    auto want = compute_precisions(fs.fam, pr.n, pr.heuristic_m);
    if (want.eta != pr.eta || want.N0 != pr.N0 || want.Nb != pr.Nb || want.Na != pr.Na ||
        want.Ngamma != pr.Ngamma || want.M != pr.M || want.N3 != pr.N3 || want.N4 != pr.N4 ||
        want.N6 != pr.N6 || want.N8 != pr.N8 || want.mu_times_2 != pr.mu_times_2)
        throw IoError("cache corrupt: stored precision profile is inconsistent");

    // the stored resultant must match the freshly recomputed certificate
    if (r.u64() != cert.r.size()) throw IoError("cache corrupt: resultant mismatch");
    for (const auto& coef : cert.r) {
        if (r.u64() != coef.size()) throw IoError("cache corrupt: resultant mismatch");
        for (const auto& v : coef)
            if (r.mpz() != v) throw IoError("cache corrupt: resultant mismatch");
    }

    int dim = 2 * fs.fam.g;
    auto zpb = std::make_shared<PadicCtx>(fs.fam.p, pr.Nb,
                                          ilog_ceil(fs.fam.p, static_cast<std::uint64_t>(fs.fam.g)) + 6);
    DeformationCache cache{fs.fam, std::move(cert), pr, std::make_shared<QqCtx>(zpb, fs.fam.chi), {}, {}};

    std::uint64_t nf0 = r.u64();
    if (nf0 != static_cast<std::uint64_t>(dim) * dim) throw IoError("cache corrupt: F(0) shape");
    for (std::uint64_t i = 0; i < nf0; ++i) {
        Qq e(*cache.ctx_nb);
        if (r.u64() != e.c.size()) throw IoError("cache corrupt: F(0) shape");
        for (auto& pd : e.c) {
            auto s = static_cast<int>(r.i64());
            if (s < 0 || s > zpb->shift_budget) throw IoError("cache corrupt: bad shift");
            pd = Padic(*zpb, r.mpz(), s);
        }
        cache.F0.push_back(std::move(e));
    }
    std::uint64_t nrmf = r.u64();
    if (nrmf != static_cast<std::uint64_t>(dim) * dim) throw IoError("cache corrupt: matrix shape");
    cache.rmf.resize(nrmf);
    for (auto& s : cache.rmf) {
        std::uint64_t len = r.u64();
        if (len > static_cast<std::uint64_t>(pr.Ngamma)) throw IoError("cache corrupt: series too long");
        s.assign(len, cache.ctx_nb->zero());
        for (auto& q : s) {
            if (r.u64() != q.c.size()) throw IoError("cache corrupt: coefficient shape");
            for (auto& pd : q.c) pd = Padic(*zpb, r.mpz());
        }
    }
    if (r.pos != r.data.size()) throw IoError("cache corrupt: trailing data");
    return cache;
}

// --- parameter specs --------------------------------------------------------

// gammabar input: the literals "0" / "1", inline JSON, or a path to a JSON
// document {"psi": [c0, c1, ..., 1], "gamma": [e0, e1, ...]} with psi monic
// over F_q and gamma the coordinate list of gammabar in F_q[y]/psi; each
// F_q element is a length-a list of integers mod p
struct GammaSpec {
    PolyF<Fq> psibar;
    std::vector<Fq::Elem> coords;
};

inline Fq::Elem parse_fq_elem(const Fq& fq, const nlohmann::json& j) {
    std::vector<long> v;
    try {
        v = j.get<std::vector<long>>();
    } catch (const nlohmann::json::exception&) {
        throw BadParameterError("parameter spec: F_q element must be an integer list");
    }
    if (v.size() > fq.deg())
        throw BadParameterError("parameter spec: F_q element has too many coordinates");
    v.resize(fq.deg(), 0);
    return CurveFamily::lift_fq(fq, v);
}

inline GammaSpec parse_gamma_spec(const Fq& fq, const std::string& text) {
    GammaSpec gs;
    if (text == "0" || text == "1") {
        // psi = y - gammabar, gammabar the literal constant
        gs.psibar = PolyF<Fq>{text == "0" ? fq.zero() : fq.sub(fq.zero(), fq.one()), fq.one()};
        gs.coords = {text == "0" ? fq.zero() : fq.one()};
        return gs;
    }
    nlohmann::json j;
    try {
        if (!text.empty() && text[0] == '{') {
            j = nlohmann::json::parse(text);
        } else {
            std::ifstream in(text);
            if (!in) throw IoError("cannot open parameter spec: " + text);
            in >> j;
        }
    } catch (const nlohmann::json::exception& e) {
        throw BadParameterError(std::string("parameter spec parse error: ") + e.what());
    }
    if (!j.contains("psi") || !j.contains("gamma"))
        throw BadParameterError("parameter spec: need 'psi' and 'gamma'");
    for (const auto& c : j.at("psi")) gs.psibar.push_back(parse_fq_elem(fq, c));
    if (gs.psibar.size() < 2 || !fq.eq(gs.psibar.back(), fq.one()))
        throw BadParameterError("parameter spec: psi must be monic of degree >= 1");
    for (const auto& c : j.at("gamma")) gs.coords.push_back(parse_fq_elem(fq, c));
    if (gs.coords.size() >= gs.psibar.size())
        throw BadParameterError("parameter spec: gamma must have fewer coordinates than deg(psi)");
    gs.coords.resize(gs.psibar.size() - 1, fq.zero());
    return gs;
}

}  // namespace zetafam
