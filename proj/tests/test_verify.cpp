#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "cpband/band_matrix.hpp"
#include "cpband/tridiagonal.hpp"
#include "cpband/verify.hpp"
#include "oracles.hpp"

using namespace cpband;
using Catch::Matchers::WithinAbs;

namespace {

BandedSymMatrix matrix_a() {
    return make_matrix({3.0 / 4, 0.5, 0.5, 0.5, 3.0 / 4}, {0.25, 0.25, 0.25, 0.25});
}

FactorMatrix basis_factor(std::size_t n) {
    FactorMatrix f;
    f.n = n;
    for (std::size_t k = 0; k < n; ++k) {
        std::vector<double> col(n, 0.0);
        col[k] = 1.0;
        f.columns.push_back(col);
    }
    return f;
}

} // namespace

TEST_CASE("certify_cp accepts a true factorization", "[verify]") {
    auto a = matrix_a();
    auto r = tri_decompose(a);
    REQUIRE(r.ok());
    Certificate c = certify_cp(a, *r.factor);
    CHECK(c.verdict == Verdict::CPCertified);
    CHECK(c.residual_max <= 1e-12);
    CHECK(c.min_entry >= 0.0);
    CHECK(c.notes.find("tol_res") != std::string::npos);
    CHECK(c.notes.find("tol_sign") != std::string::npos);
}

TEST_CASE("certify_cp flags negative entries and residuals", "[verify]") {
    auto id = make_matrix({1.0, 1.0}, {0.0});
    Certificate ok = certify_cp(id, basis_factor(2));
    CHECK(ok.verdict == Verdict::CPCertified);
    CHECK(ok.residual_max == 0.0);

    FactorMatrix wrong = basis_factor(2);
    wrong.columns[0][0] = 1.1;
    Certificate bad = certify_cp(id, wrong);
    CHECK(bad.verdict == Verdict::NotCertified);
    CHECK(bad.residual_max > 0.1);

    FactorMatrix neg = basis_factor(2);
    neg.columns.push_back({0.5, -0.5});
    neg.columns.push_back({0.5, 0.5});  // gram still wrong, sign is the point
    Certificate signs = certify_cp(id, neg);
    CHECK(signs.min_entry == -0.5);
    CHECK(signs.verdict == Verdict::NotCertified);

    FactorMatrix small = basis_factor(3);
    CHECK_THROWS_AS(certify_cp(id, small), DimensionMismatch);
}

TEST_CASE("leading principal minors of the worked 5x5", "[verify]") {
    auto minors = leading_principal_minors(matrix_a());
    REQUIRE(minors.size() == 5);
    // First two forced by the continuant cascade, rest against brute force.
    CHECK_THAT(minors[0], WithinAbs(3.0 / 4, 1e-15));
    CHECK_THAT(minors[1], WithinAbs(5.0 / 16, 1e-15));
    CHECK_THAT(minors[2], WithinAbs(7.0 / 64, 1e-15));
    CHECK_THAT(minors[3], WithinAbs(9.0 / 256, 1e-15));
    CHECK_THAT(minors[4], WithinAbs(5.0 / 256, 1e-15));

    auto brute = oracle::brute_force_minors(matrix_a());
    for (std::size_t k = 0; k < 5; ++k) CHECK_THAT(minors[k], WithinAbs(brute[k], 1e-14));
}

TEST_CASE("leading principal minors, small cases", "[verify]") {
    auto half = leading_principal_minors(make_matrix({0.5, 0.5}, {0.5}));
    CHECK_THAT(half[0], WithinAbs(0.5, 1e-15));
    CHECK_THAT(half[1], WithinAbs(0.0, 1e-15));

    auto id3 = leading_principal_minors(make_matrix({1, 1, 1}, {0, 0}));
    CHECK(id3 == std::vector<double>{1.0, 1.0, 1.0});
}

TEST_CASE("minors agree with cofactor expansion on random banded matrices",
          "[verify][property]") {
    oracle::Rng rng(20240812);
    for (int trial = 0; trial < 200; ++trial) {
        BandedSymMatrix m = oracle::random_symmetric_banded(rng, 8);
        auto fast = leading_principal_minors(m);
        auto brute = oracle::brute_force_minors(m);
        REQUIRE(fast.size() == brute.size());
        for (std::size_t k = 0; k < fast.size(); ++k)
            CHECK_THAT(fast[k], WithinAbs(brute[k], 1e-10));
    }
}

TEST_CASE("eigen_spectrum closed forms", "[verify]") {
    SECTION("2x2 doubly stochastic has eigenvalues {2a-1, 1}") {
        for (double a : {0.0, 0.3, 0.5, 0.65, 1.0}) {
            auto rep = eigen_spectrum(make_matrix({a, a}, {1.0 - a}));
            REQUIRE(rep.eigenvalues.size() == 2);
            CHECK_THAT(rep.eigenvalues[0], WithinAbs(std::min(2 * a - 1, 1.0), 1e-12));
            CHECK_THAT(rep.eigenvalues[1], WithinAbs(std::max(2 * a - 1, 1.0), 1e-12));
        }
    }
    SECTION("2x2 all-1/2 is singular of rank 1") {
        auto rep = eigen_spectrum(make_matrix({0.5, 0.5}, {0.5}));
        CHECK_THAT(rep.eigenvalues[0], WithinAbs(0.0, 1e-12));
        CHECK_THAT(rep.eigenvalues[1], WithinAbs(1.0, 1e-12));
        CHECK(rep.psd_class == PsdClass::PSDSingular);
        CHECK(rep.rank == 1);
    }
    SECTION("worked 5x5 is positive definite of full rank") {
        auto rep = eigen_spectrum(matrix_a());
        REQUIRE(rep.eigenvalues.size() == 5);
        CHECK(rep.psd_class == PsdClass::PositiveDefinite);
        CHECK(rep.rank == 5);
        for (double ev : rep.eigenvalues) {
            CHECK(ev >= -1e-12);
            CHECK(ev <= 1.0 + 1e-12);
            // Roots of the characteristic polynomial, checked by brute force.
            CHECK_THAT(oracle::char_poly_at(matrix_a(), ev), WithinAbs(0.0, 1e-10));
        }
    }
}

TEST_CASE("eigen_spectrum trace and frobenius identities", "[verify][property]") {
    oracle::Rng rng(20240813);
    for (int trial = 0; trial < 300; ++trial) {
        BandedSymMatrix m = oracle::random_symmetric_banded(rng, 12);
        auto rep = eigen_spectrum(m);
        double sum = 0.0, sq = 0.0;
        for (double ev : rep.eigenvalues) {
            sum += ev;
            sq += ev * ev;
        }
        CHECK_THAT(sum, WithinAbs(oracle::trace(m), 1e-8));
        CHECK_THAT(sq, WithinAbs(oracle::frobenius_sq(m), 1e-8));
        auto [lo, hi] = rep.gershgorin;
        for (double ev : rep.eigenvalues) {
            CHECK(ev >= lo - 1e-9);
            CHECK(ev <= hi + 1e-9);
        }
    }
}

TEST_CASE("eigen_spectrum small closed forms against brute force", "[verify][property]") {
    oracle::Rng rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        BandedSymMatrix m = oracle::random_symmetric_banded(rng, 3);
        auto rep = eigen_spectrum(m);
        for (double ev : rep.eigenvalues)
            CHECK_THAT(oracle::char_poly_at(m, ev), WithinAbs(0.0, 1e-9));
    }
}

TEST_CASE("psd classification", "[verify]") {
    CHECK(psd_classify(make_matrix({1, 1, 1}, {0, 0})) == PsdClass::PositiveDefinite);
    CHECK(psd_classify(make_matrix({0.5, 0.5}, {0.5})) == PsdClass::PSDSingular);
    CHECK(psd_classify(make_matrix({0.0, 0.0}, {1.0})) == PsdClass::Indefinite);

    // Irreducible diagonally dominant doubly stochastic, n >= 3: positive
    // definite.
    oracle::Rng rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        BandedSymMatrix m = oracle::random_irreducible_dd_ds_tridiag(rng);
        if (m.n < 3) continue;
        CHECK(psd_classify(m) == PsdClass::PositiveDefinite);
    }
}

TEST_CASE("sylvester: positive minors imply positive definite", "[verify][property]") {
    oracle::Rng rng(17);
    std::uniform_real_distribution<double> ua(0.0, 2.0), ub(-0.6, 0.6);
    std::uniform_int_distribution<std::size_t> ndist(1, 8);
    int used = 0;
    for (int trial = 0; trial < 500 && used < 150; ++trial) {
        const std::size_t n = ndist(rng);
        std::vector<double> a(n), b(n - 1);
        for (auto& v : a) v = ua(rng);
        for (auto& v : b) v = ub(rng);
        BandedSymMatrix m = make_matrix(std::move(a), std::move(b));
        auto minors = leading_principal_minors(m);
        bool all_pos = true;
        for (double d : minors) all_pos = all_pos && d > 1e-4;  // guard band
        if (!all_pos) continue;
        ++used;
        CHECK(psd_classify(m) == PsdClass::PositiveDefinite);
    }
    CHECK(used > 30);  // the generator produces enough positive definite draws
}

TEST_CASE("eigensolver rejects a zero sweep budget", "[verify]") {
    EigenOptions opts;
    opts.max_sweeps = 0;
    CHECK_THROWS_AS(eigen_spectrum(matrix_a(), Tolerance{}, opts), NoConvergence);
}

TEST_CASE("construct_tridiag_with_eigenvalue", "[verify]") {
    SECTION("lambda = -1 gives the antidiagonal block") {
        auto m = construct_tridiag_with_eigenvalue(-1.0, 2);
        CHECK(m.diag == std::vector<double>{0.0, 0.0});
        CHECK(m.off1 == std::vector<double>{1.0});
    }
    SECTION("lambda = 0, n = 4 pads with the identity") {
        auto m = construct_tridiag_with_eigenvalue(0.0, 4);
        CHECK(m.diag == std::vector<double>{0.5, 0.5, 1.0, 1.0});
        CHECK(m.off1 == std::vector<double>{0.5, 0.0, 0.0});
    }
    SECTION("lambda = 0.3 lands in the spectrum") {
        auto m = construct_tridiag_with_eigenvalue(0.3, 2);
        CHECK_THAT(m.diag[0], WithinAbs(0.65, 1e-15));
        CHECK_THAT(m.off1[0], WithinAbs(0.35, 1e-15));
        auto rep = eigen_spectrum(m);
        CHECK_THAT(rep.eigenvalues[0], WithinAbs(0.3, 1e-12));
    }
    CHECK_THROWS_AS(construct_tridiag_with_eigenvalue(1.5, 3), OutOfRange);
    CHECK_THROWS_AS(construct_tridiag_with_eigenvalue(0.0, 1), OutOfRange);
}

TEST_CASE("construct_penta_with_eigenvalue", "[verify]") {
    SECTION("lambda = 1 degenerates to the identity") {
        auto m = construct_penta_with_eigenvalue(1.0, 3);
        CHECK(m.diag == std::vector<double>{1.0, 1.0, 1.0});
        CHECK(m.off1 == std::vector<double>{0.0, 0.0});
        CHECK(*m.off2 == std::vector<double>{0.0});
    }
    SECTION("lambda = -1/2 keeps the bonafide pentadiagonal form") {
        auto m = construct_penta_with_eigenvalue(-0.5, 3);
        CHECK_THAT(m.diag[0], WithinAbs(0.0, 1e-15));
        CHECK_THAT(m.off1[0], WithinAbs(0.5, 1e-15));
        CHECK_THAT((*m.off2)[0], WithinAbs(0.5, 1e-15));
        auto rep = eigen_spectrum(m);
        // Spectrum {1, -1/2, -1/2}: closed form for aI + b(J - I).
        CHECK_THAT(rep.eigenvalues[0], WithinAbs(-0.5, 1e-12));
        CHECK_THAT(rep.eigenvalues[1], WithinAbs(-0.5, 1e-12));
        CHECK_THAT(rep.eigenvalues[2], WithinAbs(1.0, 1e-12));
    }
    SECTION("lambda below -1/2 falls back to the embedded 2x2 witness") {
        auto m = construct_penta_with_eigenvalue(-0.9, 3);
        CHECK_THAT(m.diag[0], WithinAbs(0.05, 1e-15));
        CHECK_THAT(m.diag[2], WithinAbs(1.0, 1e-15));
        CHECK(*m.off2 == std::vector<double>{0.0});
        auto rep = eigen_spectrum(m);
        CHECK_THAT(rep.eigenvalues[0], WithinAbs(-0.9, 1e-12));
    }
    CHECK_THROWS_AS(construct_penta_with_eigenvalue(0.0, 2), OutOfRange);
    CHECK_THROWS_AS(construct_penta_with_eigenvalue(-2.0, 3), OutOfRange);
}

TEST_CASE("constructions are doubly stochastic with the eigenvalue present",
          "[verify][property]") {
    for (double lambda : {-1.0, -0.9, -0.5, 0.0, 0.3, 1.0}) {
        for (std::size_t n : {2, 3, 6}) {
            auto tri = construct_tridiag_with_eigenvalue(lambda, n);
            CHECK(is_doubly_stochastic(tri).ok);
            double best = 1e9;
            for (double ev : eigen_spectrum(tri).eigenvalues)
                best = std::min(best, std::abs(ev - lambda));
            CHECK(best <= 1e-9);
            if (n >= 3) {
                auto penta = construct_penta_with_eigenvalue(lambda, n);
                CHECK(is_doubly_stochastic(penta).ok);
                best = 1e9;
                for (double ev : eigen_spectrum(penta).eigenvalues)
                    best = std::min(best, std::abs(ev - lambda));
                CHECK(best <= 1e-9);
            }
        }
    }
}
