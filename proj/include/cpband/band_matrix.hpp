#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "cpband/core.hpp"

namespace cpband {

/// Symmetric banded matrix stored by bands: diagonal, first and (optionally)
/// second off-diagonal. An absent second off-diagonal marks the matrix as
/// tridiagonal; a present all-zero one is still treated as pentadiagonal
/// storage. Entries with |i-j| > 2 are identically zero.
struct BandedSymMatrix {
    std::size_t n = 0;
    std::vector<double> diag;                 // n entries
    std::vector<double> off1;                 // n-1 entries
    std::optional<std::vector<double>> off2;  // n-2 entries when present

    bool pentadiagonal() const { return off2.has_value(); }

    /// Band accessors with out-of-range positions reading as zero.
    /// k is the 0-based position within the band.
    double off1_at(std::size_t k) const {
        return k < off1.size() ? off1[k] : 0.0;
    }
    double off2_at(std::size_t k) const {
        if (!off2) return 0.0;
        return k < off2->size() ? (*off2)[k] : 0.0;
    }

    /// Dense entry, 0-based indices.
    double entry(std::size_t i, std::size_t j) const {
        if (i == j) return diag[i];
        std::size_t lo = std::min(i, j), hi = std::max(i, j);
        if (hi - lo == 1) return off1[lo];
        if (hi - lo == 2) return off2_at(lo);
        return 0.0;
    }

    /// Sum of absolute off-diagonal entries in row i (0-based).
    double off_row_sum(std::size_t i) const {
        double s = 0.0;
        if (i >= 1) s += std::abs(off1[i - 1]);
        if (i + 1 < n) s += std::abs(off1[i]);
        if (i >= 2) s += std::abs(off2_at(i - 2));
        if (i + 2 < n) s += std::abs(off2_at(i));
        return s;
    }
};

inline BandedSymMatrix make_matrix(std::vector<double> a, std::vector<double> b,
                                   std::optional<std::vector<double>> c = std::nullopt) {
    if (a.empty()) throw DimensionMismatch("diagonal must have at least one entry");
    const std::size_t n = a.size();
    if (b.size() != n - 1)
        throw DimensionMismatch("first off-diagonal has " + std::to_string(b.size()) +
                                " entries, expected " + std::to_string(n - 1));
    if (c) {
        if (n < 3)
            throw DimensionMismatch("second off-diagonal requires dimension >= 3");
        if (c->size() != n - 2)
            throw DimensionMismatch("second off-diagonal has " + std::to_string(c->size()) +
                                    " entries, expected " + std::to_string(n - 2));
    }
    return BandedSymMatrix{n, std::move(a), std::move(b), std::move(c)};
}

inline DenseMatrix to_dense(const BandedSymMatrix& m) {
    DenseMatrix d(m.n);
    for (std::size_t i = 0; i < m.n; ++i) {
        d(i, i) = m.diag[i];
        if (i + 1 < m.n) d(i, i + 1) = d(i + 1, i) = m.off1[i];
        if (i + 2 < m.n) d(i, i + 2) = d(i + 2, i) = m.off2_at(i);
    }
    return d;
}

/// Outcome of the doubly stochastic test with the offending rows/entries.
struct StochasticReport {
    struct RowSumViolation {
        std::size_t row;  // 1-based
        double sum;
    };
    struct NegativeEntry {
        std::size_t row, col;  // 1-based
        double value;
    };
    bool ok = false;
    std::vector<RowSumViolation> bad_row_sums;
    std::vector<NegativeEntry> negative_entries;
};

/// Entrywise nonnegative (>= -eps) with all row sums within eps of 1.
/// Column sums follow from symmetry.
inline StochasticReport is_doubly_stochastic(const BandedSymMatrix& m, Tolerance tol = {}) {
    StochasticReport rep;
    for (std::size_t i = 0; i < m.n; ++i) {
        double sum = m.diag[i];
        if (i >= 1) sum += m.off1[i - 1];
        if (i + 1 < m.n) sum += m.off1[i];
        if (i >= 2) sum += m.off2_at(i - 2);
        if (i + 2 < m.n) sum += m.off2_at(i);
        if (std::abs(sum - 1.0) > tol.eps)
            rep.bad_row_sums.push_back({i + 1, sum});
        if (m.diag[i] < -tol.eps)
            rep.negative_entries.push_back({i + 1, i + 1, m.diag[i]});
        if (i + 1 < m.n && m.off1[i] < -tol.eps)
            rep.negative_entries.push_back({i + 1, i + 2, m.off1[i]});
        if (i + 2 < m.n && m.off2_at(i) < -tol.eps)
            rep.negative_entries.push_back({i + 1, i + 3, m.off2_at(i)});
    }
    rep.ok = rep.bad_row_sums.empty() && rep.negative_entries.empty();
    return rep;
}

/// Exact comparison, no tolerance: boundary cases carry structure here.
inline bool is_diagonally_dominant(const BandedSymMatrix& m) {
    for (std::size_t i = 0; i < m.n; ++i)
        if (m.diag[i] < m.off_row_sum(i)) return false;
    return true;
}

/// Connectivity of the graph on {1..n} with edges at nonzero band entries.
/// Band entries are compared against literal zero: structure, not noise.
inline bool is_irreducible(const BandedSymMatrix& m) {
    if (m.n == 0) return false;
    std::vector<char> seen(m.n, 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    std::size_t count = 1;
    while (!stack.empty()) {
        std::size_t i = stack.back();
        stack.pop_back();
        auto visit = [&](std::size_t j) {
            if (!seen[j]) {
                seen[j] = 1;
                ++count;
                stack.push_back(j);
            }
        };
        if (i >= 1 && m.off1[i - 1] != 0.0) visit(i - 1);
        if (i + 1 < m.n && m.off1[i] != 0.0) visit(i + 1);
        if (i >= 2 && m.off2_at(i - 2) != 0.0) visit(i - 2);
        if (i + 2 < m.n && m.off2_at(i) != 0.0) visit(i + 2);
    }
    return count == m.n;
}

/// Direct-sum decomposition along band cuts.
struct BlockDecomposition {
    struct Block {
        std::size_t offset;  // 0-based row offset in the source matrix
        BandedSymMatrix matrix;
    };
    std::vector<Block> blocks;

    std::vector<std::size_t> sizes() const {
        std::vector<std::size_t> s;
        s.reserve(blocks.size());
        for (const auto& b : blocks) s.push_back(b.matrix.n);
        return s;
    }
};

/// Cuts between rows k and k+1 exactly when every band entry crossing the
/// cut is zero: off1[k], and for pentadiagonal storage off2[k-1] and off2[k].
/// Order-preserving cuts only; interleaved reducibility (possible through
/// the second band) is reported by is_irreducible but not split here.
inline BlockDecomposition split_blocks(const BandedSymMatrix& m) {
    BlockDecomposition dec;
    std::size_t start = 0;
    auto cut_after = [&](std::size_t k) {  // between 0-based rows k and k+1
        if (m.off1[k] != 0.0) return false;
        if (!m.off2) return true;
        double lo = (k >= 1) ? m.off2_at(k - 1) : 0.0;
        return lo == 0.0 && m.off2_at(k) == 0.0;
    };
    auto emit = [&](std::size_t end) {  // block covers rows [start, end)
        std::size_t len = end - start;
        std::vector<double> a(m.diag.begin() + start, m.diag.begin() + end);
        std::vector<double> b;
        for (std::size_t k = start; k + 1 < end; ++k) b.push_back(m.off1[k]);
        std::optional<std::vector<double>> c;
        if (m.off2 && len >= 3) {
            c.emplace();
            for (std::size_t k = start; k + 2 < end; ++k) c->push_back(m.off2_at(k));
        }
        dec.blocks.push_back({start, BandedSymMatrix{len, std::move(a), std::move(b), std::move(c)}});
        start = end;
    };
    for (std::size_t k = 0; k + 1 < m.n; ++k)
        if (cut_after(k)) emit(k + 1);
    emit(m.n);
    return dec;
}

/// Reassemble a block decomposition as a direct sum. Inverse of split_blocks.
inline BandedSymMatrix direct_sum(const BlockDecomposition& dec) {
    std::size_t n = 0;
    for (const auto& b : dec.blocks) n += b.matrix.n;
    std::vector<double> a(n, 0.0), b1(n > 0 ? n - 1 : 0, 0.0);
    bool any_c = false;
    for (const auto& b : dec.blocks) any_c = any_c || b.matrix.off2.has_value();
    std::optional<std::vector<double>> c;
    if (any_c && n >= 3) c.emplace(n - 2, 0.0);
    for (const auto& blk : dec.blocks) {
        const auto& bm = blk.matrix;
        for (std::size_t i = 0; i < bm.n; ++i) a[blk.offset + i] = bm.diag[i];
        for (std::size_t i = 0; i + 1 < bm.n; ++i) b1[blk.offset + i] = bm.off1[i];
        if (c && bm.off2)
            for (std::size_t i = 0; i + 2 < bm.n; ++i) (*c)[blk.offset + i] = (*bm.off2)[i];
    }
    return BandedSymMatrix{n, std::move(a), std::move(b1), std::move(c)};
}

/// [lo, hi] with lo = min_i(a_i - r_i), hi = max_i(a_i + r_i); all
/// eigenvalues lie inside.
inline std::pair<double, double> gershgorin_interval(const BandedSymMatrix& m) {
    double lo = m.diag[0] - m.off_row_sum(0);
    double hi = m.diag[0] + m.off_row_sum(0);
    for (std::size_t i = 1; i < m.n; ++i) {
        double r = m.off_row_sum(i);
        lo = std::min(lo, m.diag[i] - r);
        hi = std::max(hi, m.diag[i] + r);
    }
    return {lo, hi};
}

} // namespace cpband
