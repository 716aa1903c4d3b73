#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "cpband/band_matrix.hpp"
#include "cpband/core.hpp"
#include "cpband/factor_matrix.hpp"
#include "cpband/verify.hpp"

namespace cpband {

/// Free initial constant of the tridiagonal recursion: v_0 = (a0, 0, ..., 0)^T.
struct TriInit {
    double a0 = 0.0;
};

struct DecomposeOptions {
    Tolerance tol{};
    /// Pentadiagonal only: treat every near-zero pivot before the last index
    /// as a failure even when the dependent numerators vanish. Tridiagonal
    /// decomposition always does.
    bool strict_pivot = false;
    /// Record negative components instead of failing on the first one.
    /// The factorization still reconstructs M; it just cannot certify
    /// complete positivity.
    bool allow_negative = false;
};

struct DecomposeResult {
    std::optional<FactorMatrix> factor;
    std::optional<RecursionFailure> failure;
    /// Recursion indices where a zero pivot was continued with zero
    /// components; a strict reading would have stopped there.
    std::vector<std::size_t> lenient_pivots;

    bool ok() const { return factor.has_value(); }
};

/// Rank-one recursion for symmetric tridiagonal M:
///   (v_i)_i   = sqrt(a_i - ((v_{i-1})_i)^2)
///   (v_i)_i+1 = b_i / (v_i)_i
/// Returns the raw columns v_0..v_n; no trimming, so the indexing of the
/// result matches the recursion.
inline DecomposeResult tri_decompose(const BandedSymMatrix& m, TriInit init = {},
                                     DecomposeOptions opts = {}) {
    if (m.pentadiagonal())
        throw DimensionMismatch("tri_decompose requires a tridiagonal matrix (no second band)");
    if (init.a0 < 0.0) throw OutOfRange("initial constant a0 must be nonnegative");

    const std::size_t n = m.n;
    const double eps = opts.tol.eps;
    DecomposeResult res;
    FactorMatrix f;
    f.n = n;
    f.columns.assign(n + 1, std::vector<double>(n, 0.0));
    f.tags.resize(n + 1);
    for (std::size_t k = 0; k <= n; ++k) f.tags[k] = {static_cast<int>(k), 0};
    f.columns[0][0] = init.a0;

    for (std::size_t i = 1; i <= n; ++i) {
        const double prev = f.columns[i - 1][i - 1];  // (v_{i-1})_i
        const double under = m.diag[i - 1] - prev * prev;
        if (under < -eps) {
            res.failure = RecursionFailure{FailureKind::NegativeUnderRoot, i, i, under};
            return res;
        }
        if (under <= eps * std::max(1.0, std::abs(m.diag[i - 1]))) {
            if (i < n) {
                // A vanishing pivot leaves (v_i)_{i+1} undefined regardless
                // of b_i; a vanishing b_i means the matrix splits there and
                // the block pipeline is the right tool.
                res.failure = RecursionFailure{FailureKind::ZeroDenominator, i, i + 1, under};
                return res;
            }
            f.columns[i][i - 1] = std::sqrt(std::max(under, 0.0));
            continue;
        }
        const double pivot = std::sqrt(under);
        f.columns[i][i - 1] = pivot;
        if (i < n) {
            const double val = m.off1[i - 1] / pivot;
            if (val < -eps && !opts.allow_negative) {
                res.failure = RecursionFailure{FailureKind::NegativeComponent, i, i + 1, val};
                return res;
            }
            f.columns[i][i] = val;
        }
    }
    res.factor = std::move(f);
    return res;
}

/// Failure of one block in a block pipeline; indices inside `failure` are
/// local to the block.
struct BlockFailure {
    std::size_t block_index = 0;  // 0-based position among the blocks
    std::size_t offset = 0;       // 0-based row offset of the block
    RecursionFailure failure;
};

struct TriCpResult {
    std::optional<FactorMatrix> factor;  // trimmed, columns embedded at block offsets
    std::optional<Certificate> certificate;
    std::optional<BlockFailure> failure;
    std::vector<std::size_t> block_sizes;

    bool ok() const { return factor.has_value(); }
};

/// Block pipeline: split at zero couplings, decompose every block with
/// a0 = 0, embed the per-block columns at their offsets, drop all-zero
/// columns and certify the assembled factor.
inline TriCpResult tri_cp(const BandedSymMatrix& m, Tolerance tol = {}) {
    if (m.pentadiagonal())
        throw DimensionMismatch("tri_cp requires a tridiagonal matrix (no second band)");
    TriCpResult out;
    BlockDecomposition dec = split_blocks(m);
    out.block_sizes = dec.sizes();

    FactorMatrix f;
    f.n = m.n;
    for (std::size_t bi = 0; bi < dec.blocks.size(); ++bi) {
        const auto& blk = dec.blocks[bi];
        DecomposeResult r = tri_decompose(blk.matrix, TriInit{0.0}, DecomposeOptions{tol});
        if (!r.ok()) {
            out.failure = BlockFailure{bi, blk.offset, *r.failure};
            return out;
        }
        for (std::size_t k = 0; k < r.factor->columns.size(); ++k) {
            if (FactorMatrix::is_zero_column(r.factor->columns[k])) continue;
            std::vector<double> col(m.n, 0.0);
            for (std::size_t j = 0; j < blk.matrix.n; ++j)
                col[blk.offset + j] = r.factor->columns[k][j];
            f.columns.push_back(std::move(col));
            f.tags.push_back({static_cast<int>(k), blk.offset});
        }
    }
    out.certificate = certify_cp(m, f, tol);
    out.factor = std::move(f);
    return out;
}

struct CpRankReport {
    std::size_t columns = 0;  // nonzero columns of the factor
    std::size_t rank = 0;     // numerical rank of M
    bool equal = false;
};

inline CpRankReport cp_rank_report(const BandedSymMatrix& m, const FactorMatrix& f,
                                   Tolerance tol = {}) {
    CpRankReport rep;
    rep.columns = f.nonzero_column_count();
    rep.rank = eigen_spectrum(m, tol).rank;
    rep.equal = rep.columns == rep.rank;
    return rep;
}

} // namespace cpband
