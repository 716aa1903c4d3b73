#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "cpband/band_matrix.hpp"
#include "cpband/verify.hpp"
#include "oracles.hpp"

using namespace cpband;
using Catch::Matchers::WithinAbs;

namespace {

// The 5x5 matrices A and B used throughout.
BandedSymMatrix matrix_a() {
    return make_matrix({3.0 / 4, 0.5, 0.5, 0.5, 3.0 / 4}, {0.25, 0.25, 0.25, 0.25});
}
BandedSymMatrix matrix_b() {
    return make_matrix({7.0 / 9, 5.0 / 9, 7.0 / 9, 8.0 / 9, 8.0 / 9},
                       {2.0 / 9, 2.0 / 9, 0.0, 1.0 / 9});
}
BandedSymMatrix matrix_c() {
    return make_matrix({1.0, 0.5, 0.5, 0.5, 0.5}, {0.0, 0.5, 0.0, 0.5});
}
BandedSymMatrix matrix_ex4() {
    return make_matrix({0.5, 0.5, 0.5, 0.5, 0.5, 1.0}, {0.25, 0.25, 0.0, 0.5, 0.0},
                       std::vector<double>{0.25, 0.0, 0.0, 0.0});
}

} // namespace

TEST_CASE("make_matrix validates band lengths", "[band]") {
    CHECK_THROWS_AS(make_matrix({1.0, 1.0}, {}), DimensionMismatch);
    CHECK_THROWS_AS(make_matrix({1.0, 1.0}, {0.0, 0.0}), DimensionMismatch);
    CHECK_THROWS_AS(make_matrix({1.0, 1.0}, {0.0}, std::vector<double>{}), DimensionMismatch);
    CHECK_THROWS_AS(make_matrix({1.0, 1.0, 1.0}, {0.0, 0.0}, std::vector<double>{0.5, 0.5}),
                    DimensionMismatch);
    CHECK_NOTHROW(make_matrix({1.0}, {}));
    CHECK_NOTHROW(make_matrix({1.0, 1.0, 1.0}, {0.0, 0.0}, std::vector<double>{0.5}));
}

TEST_CASE("to_dense reproduces the printed matrices", "[band]") {
    SECTION("2x2 all-1/2") {
        DenseMatrix d = to_dense(make_matrix({0.5, 0.5}, {0.5}));
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 2; ++j) CHECK(d(i, j) == 0.5);
    }
    SECTION("identity via zero coupling") {
        DenseMatrix d = to_dense(make_matrix({1.0, 1.0}, {0.0}));
        CHECK(d(0, 0) == 1.0);
        CHECK(d(1, 1) == 1.0);
        CHECK(d(0, 1) == 0.0);
    }
    SECTION("5x5 matrix A") {
        const double expect[5][5] = {{3.0 / 4, 0.25, 0, 0, 0},
                                     {0.25, 0.5, 0.25, 0, 0},
                                     {0, 0.25, 0.5, 0.25, 0},
                                     {0, 0, 0.25, 0.5, 0.25},
                                     {0, 0, 0, 0.25, 3.0 / 4}};
        DenseMatrix d = to_dense(matrix_a());
        for (std::size_t i = 0; i < 5; ++i)
            for (std::size_t j = 0; j < 5; ++j) CHECK(d(i, j) == expect[i][j]);
    }
    SECTION("pentadiagonal bands land two off the diagonal") {
        DenseMatrix d = to_dense(make_matrix({1, 1, 1, 1}, {0, 0, 0}, std::vector<double>{0.5, 0.25}));
        CHECK(d(0, 2) == 0.5);
        CHECK(d(2, 0) == 0.5);
        CHECK(d(1, 3) == 0.25);
        CHECK(d(0, 3) == 0.0);
    }
}

TEST_CASE("doubly stochastic predicate", "[band]") {
    CHECK(is_doubly_stochastic(matrix_a()).ok);

    auto bad = is_doubly_stochastic(make_matrix({1.0, 1.0}, {1.0}));
    CHECK_FALSE(bad.ok);
    REQUIRE(bad.bad_row_sums.size() == 2);
    CHECK(bad.bad_row_sums[0].row == 1);
    CHECK_THAT(bad.bad_row_sums[0].sum, WithinAbs(2.0, 1e-15));

    // The 4x4 of the alternate-construction example.
    auto m = make_matrix({7.0 / 12, 7.0 / 12, 7.0 / 12, 31.0 / 52},
                         {1.0 / 3, 1.0 / 156, 17.0 / 52},
                         std::vector<double>{1.0 / 12, 1.0 / 13});
    CHECK(is_doubly_stochastic(m).ok);

    auto neg = is_doubly_stochastic(make_matrix({1.5, 1.5}, {-0.5}));
    CHECK_FALSE(neg.ok);
    REQUIRE(neg.negative_entries.size() == 1);
    CHECK(neg.negative_entries[0].row == 1);
    CHECK(neg.negative_entries[0].col == 2);
}

TEST_CASE("diagonal dominance is an exact comparison", "[band]") {
    CHECK(is_diagonally_dominant(matrix_a()));
    CHECK(is_diagonally_dominant(make_matrix({1.0, 1.0}, {0.0})));

    // Doubly stochastic and positive semidefinite, but not diagonally
    // dominant: row 2 has 2/5 + 1/6 > 13/30.
    auto m = make_matrix({0.6, 13.0 / 30, 13.0 / 30, 0.6}, {0.4, 1.0 / 6, 0.4});
    CHECK_FALSE(is_diagonally_dominant(m));
    CHECK(psd_classify(m) != PsdClass::Indefinite);

    // Boundary row: equality counts as dominant.
    CHECK(is_diagonally_dominant(make_matrix({0.5, 0.5}, {0.5})));
}

TEST_CASE("irreducibility via band connectivity", "[band]") {
    CHECK(is_irreducible(matrix_a()));
    CHECK_FALSE(is_irreducible(matrix_b()));   // b_3 = 0
    CHECK_FALSE(is_irreducible(matrix_ex4()));

    // A zero first band bridged by the second band stays connected.
    auto bridged = make_matrix({1, 1, 1}, {0.0, 0.0}, std::vector<double>{0.5});
    CHECK_FALSE(is_irreducible(bridged));  // rows {1,3} vs {2}
    auto chained = make_matrix({1, 1, 1, 1}, {0.0, 0.5, 0.0},
                               std::vector<double>{0.5, 0.5});
    CHECK(is_irreducible(chained));
}

TEST_CASE("split_blocks cuts at zero couplings", "[band]") {
    SECTION("matrix B splits 3 + 2") {
        auto dec = split_blocks(matrix_b());
        REQUIRE(dec.sizes() == std::vector<std::size_t>{3, 2});
        CHECK(dec.blocks[0].offset == 0);
        CHECK(dec.blocks[1].offset == 3);
    }
    SECTION("matrix C splits at every zero coupling") {
        // The worked example treats C as 3 + 2 by inspection; b_1 = 0 means
        // the dense matrix is also a direct sum at index 1, so the full cut
        // set gives 1 + 2 + 2.
        auto dec = split_blocks(matrix_c());
        REQUIRE(dec.sizes() == std::vector<std::size_t>{1, 2, 2});
        CHECK(dec.blocks[0].offset == 0);
        CHECK(dec.blocks[1].offset == 1);
        CHECK(dec.blocks[2].offset == 3);
    }
    SECTION("pentadiagonal cut needs the second band clear") {
        auto dec = split_blocks(matrix_ex4());
        REQUIRE(dec.sizes() == std::vector<std::size_t>{3, 2, 1});
        // b_2 = 0 in example 3's matrix but c_1, c_2 != 0: no cut.
        auto m3 = make_matrix({0.75, 0.75, 0.5, 0.5, 0.9}, {0.125, 0.0, 0.325, 0.05},
                              std::vector<double>{0.125, 0.125, 0.05});
        CHECK(split_blocks(m3).blocks.size() == 1);
    }
    SECTION("irreducible input stays whole") {
        auto dec = split_blocks(matrix_a());
        REQUIRE(dec.blocks.size() == 1);
        CHECK(dec.blocks[0].matrix.n == 5);
    }
}

TEST_CASE("split then direct sum is the identity, bit-exact", "[band][property]") {
    oracle::Rng rng(20240811);
    for (int trial = 0; trial < 200; ++trial) {
        BandedSymMatrix m = trial % 2 == 0 ? oracle::random_dd_ds_tridiag(rng)
                                           : oracle::random_dd_ds_penta(rng);
        BandedSymMatrix back = direct_sum(split_blocks(m));
        REQUIRE(back.n == m.n);
        CHECK(back.diag == m.diag);
        CHECK(back.off1 == m.off1);
        if (m.off2) {
            REQUIRE(back.off2.has_value());
            CHECK(*back.off2 == *m.off2);
        }
    }
}

TEST_CASE("irreducible iff a single block, tridiagonal", "[band][property]") {
    oracle::Rng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        BandedSymMatrix m = oracle::random_dd_ds_tridiag(rng);
        CHECK(is_irreducible(m) == (split_blocks(m).blocks.size() == 1));
    }
    // Pentadiagonal order-preserving cuts only ever split reducible input;
    // the converse can fail when components interleave through the second
    // band, as documented for the bridged matrix above.
    for (int trial = 0; trial < 200; ++trial) {
        BandedSymMatrix m = oracle::random_dd_ds_penta(rng);
        if (split_blocks(m).blocks.size() > 1) CHECK_FALSE(is_irreducible(m));
    }
}

TEST_CASE("all positive couplings imply irreducible", "[band][property]") {
    oracle::Rng rng(99);
    for (int trial = 0; trial < 100; ++trial) {
        BandedSymMatrix m = oracle::random_irreducible_dd_ds_tridiag(rng);
        CHECK(is_irreducible(m));
        CHECK(split_blocks(m).blocks.size() == 1);
    }
}

TEST_CASE("gershgorin interval", "[band]") {
    auto id = gershgorin_interval(make_matrix({1.0, 1.0}, {0.0}));
    CHECK(id.first == 1.0);
    CHECK(id.second == 1.0);

    auto half = gershgorin_interval(make_matrix({0.5, 0.5}, {0.5}));
    CHECK_THAT(half.first, WithinAbs(0.0, 1e-15));
    CHECK_THAT(half.second, WithinAbs(1.0, 1e-15));

    oracle::Rng rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        BandedSymMatrix m = oracle::random_ds_banded(rng);
        auto [lo, hi] = gershgorin_interval(m);
        CHECK(lo >= -1.0 - 1e-12);
        CHECK(hi <= 1.0 + 1e-12);
    }
}

TEST_CASE("diagonally dominant with nonnegative diagonal is never indefinite",
          "[band][property]") {
    oracle::Rng rng(41);
    for (int trial = 0; trial < 100; ++trial) {
        BandedSymMatrix m = trial % 2 == 0 ? oracle::random_dd_ds_tridiag(rng)
                                           : oracle::random_dd_ds_penta(rng);
        REQUIRE(is_diagonally_dominant(m));
        CHECK(psd_classify(m) != PsdClass::Indefinite);
    }
}
