#include <catch2/catch_amalgamated.hpp>

#include "zetafam/zeta.hpp"

using namespace zetafam;

namespace {

CurveFamily legendre(std::uint64_t p) {
    // Q = X(X - 1)(X - (Gamma - 1)); singular fibers at Gamma = 1, 2
    std::vector<std::vector<std::vector<long>>> qc{
        {{0}}, {{-1}, {1}}, {{0}, {-1}}, {{1}}};
    return CurveFamily(p, {0, 1}, qc);
}

// one shared cache: assembling it is the expensive part of this file
const DeformationCache& cache3() {
    static DeformationCache c = [] {
        auto fam = legendre(3);
        auto cert = validate_family(fam);
        auto pr = compute_precisions(fam, 2);
        return assemble_frobenius(fam, cert, pr);
    }();
    return c;
}

}  // namespace

TEST_CASE("specialization at the base point recovers F(0) and its zeta") {
    const auto& cache = cache3();
    const Fq& fq = cache.ctx_nb->fq;
    Fqn amb(fq, find_irreducible(fq, 2));

    auto sc = build_specialization(cache, amb, amb.from_int(0));
    CHECK(sc.n_eff == 1);
    REQUIRE(sc.phibar.size() == 2);
    CHECK(fq.is_zero(sc.phibar[0]));
    CHECK(sc.gamma.is_zero());

    auto F = specialize_frobenius(cache, sc);
    REQUIRE(F.size() == 4);
    int slack = ilog_ceil(3, 1) + 4;
    for (std::size_t e = 0; e < 4; ++e) {
        REQUIRE(sc.qn->n == 1);
        Qq got = F[e].c[0];
        Qq want = qq_change_ctx(cache.F0[e], *sc.ctx);
        CHECK(got.eq_mod(want, cache.profile.Nb - slack));
    }

    // Y^2 = X^3 - X over F_3 is supersingular: P(t) = 1 + 3t^2
    auto z = zeta_at(cache, sc);
    CHECK(z.field_size == 3);
    CHECK(z.a == std::vector<mpz_class>{1, 0, 3});
    CHECK(z.counts[0] == 4);
    CHECK(z.counts[1] == 16);
}

TEST_CASE("singular fibers and oversized parameters are refused") {
    const auto& cache = cache3();
    const Fq& fq = cache.ctx_nb->fq;
    Fqn amb(fq, find_irreducible(fq, 2));
    CHECK_THROWS_AS(build_specialization(cache, amb, amb.from_int(1)), BadParameterError);
    CHECK_THROWS_AS(build_specialization(cache, amb, amb.from_int(2)), BadParameterError);
    // cache was precomputed for n <= 2; a cubic parameter must be rejected
    Fqn amb3(fq, find_irreducible(fq, 3));
    CHECK_THROWS_AS(build_specialization(cache, amb3, amb3.gen()), BadParameterError);
}

TEST_CASE("quadratic parameter: zeta agrees with exhaustive counting") {
    const auto& cache = cache3();
    const Fq& fq = cache.ctx_nb->fq;
    // gammabar = root of y^2 + 1, the unique good orbit of degree 2 here
    PolyF<Fq> psi{fq.one(), fq.zero(), fq.one()};
    Fqn amb(fq, psi);
    auto gbar = amb.gen();

    auto sc = build_specialization(cache, amb, gbar);
    CHECK(sc.n_eff == 2);
    REQUIRE(sc.phibar.size() == 3);
    CHECK(fq.eq(sc.phibar[0], fq.one()));
    CHECK(fq.is_zero(sc.phibar[1]));

    auto z = zeta_at(cache, sc);
    CHECK(z.field_size == 9);
    CHECK(z.an == 2);

    auto qbar = cache.fam.qbar_at(amb, gbar, [&](const std::vector<long>& e) {
        return amb.from_base(CurveFamily::lift_fq(fq, e));
    });
    for (int k = 1; k <= 2; ++k) {
        auto rep = count_points_naive(amb, qbar, k);
        CHECK(z.counts[static_cast<std::size_t>(k - 1)] == rep.total);
    }
}

TEST_CASE("norm product: doubling equals the naive sigma-twisted loop") {
    const auto& cache = cache3();
    const Fq& fq = cache.ctx_nb->fq;
    PolyF<Fq> psi{fq.one(), fq.zero(), fq.one()};
    Fqn amb(fq, psi);
    auto sc = build_specialization(cache, amb, amb.gen());
    auto F = specialize_frobenius(cache, sc);
    int an = cache.fam.a * sc.n_eff;
    REQUIRE(an == 2);

    for (int e = 1; e <= 3; ++e) {
        auto fast = norm_product(*sc.qn, F, 2, e);
        auto naive = F;
        for (int m = 1; m < e; ++m)
            naive = detail::qqn_mat_mul(*sc.qn, detail::qqn_mat_frob(naive, 1), F, 2);
        for (std::size_t i = 0; i < 4; ++i)
            CHECK(fast[i].eq_mod(naive[i], cache.profile.N0));
    }

    // det of the full norm is q^g = 9
    auto N = norm_product(*sc.qn, F, 2, an);
    Qqn det = N[0] * N[3] - N[1] * N[2];
    CHECK(det.eq_mod(sc.qn->from_si(9), cache.profile.N0));
}
