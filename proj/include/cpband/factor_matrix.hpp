#pragma once

#include <cstddef>
#include <cstdio>
#include <string>
#include <vector>

#include "cpband/core.hpp"

namespace cpband {

/// Where a factor column came from: the recursion index that produced it
/// (-1 and 0 are the initial-condition columns) and the row offset of its
/// block in the source matrix.
struct ColumnTag {
    int recursion_index = 0;
    std::size_t block_offset = 0;
};

/// Ordered list of n-dimensional columns v_i whose Gram sum reconstructs a
/// banded matrix. Columns are kept full-length; each has a nonzero window
/// of width at most 3 located by its tag.
struct FactorMatrix {
    std::size_t n = 0;
    std::vector<std::vector<double>> columns;
    std::vector<ColumnTag> tags;  // parallel to columns; may be empty for loaded files

    std::size_t column_count() const { return columns.size(); }

    static bool is_zero_column(const std::vector<double>& col) {
        for (double v : col)
            if (v != 0.0) return false;
        return true;
    }

    std::size_t nonzero_column_count() const {
        std::size_t k = 0;
        for (const auto& col : columns)
            if (!is_zero_column(col)) ++k;
        return k;
    }

    double min_entry() const {
        double m = 0.0;
        bool first = true;
        for (const auto& col : columns)
            for (double v : col) {
                if (first) { m = v; first = false; }
                else m = std::min(m, v);
            }
        return m;
    }

    /// Copy with all-zero columns removed; zero columns never contribute to
    /// the Gram sum.
    FactorMatrix trimmed() const {
        FactorMatrix out;
        out.n = n;
        for (std::size_t k = 0; k < columns.size(); ++k) {
            if (is_zero_column(columns[k])) continue;
            out.columns.push_back(columns[k]);
            if (k < tags.size()) out.tags.push_back(tags[k]);
        }
        return out;
    }

    /// Dense Gram reconstruction sum_i v_i v_i^T.
    DenseMatrix gram() const {
        DenseMatrix g(n);
        for (const auto& col : columns)
            for (std::size_t r = 0; r < n; ++r) {
                if (col[r] == 0.0) continue;
                for (std::size_t s = 0; s < n; ++s) g(r, s) += col[r] * col[s];
            }
        return g;
    }
};

enum class FailureKind { NegativeUnderRoot, ZeroDenominator, NegativeComponent };

inline const char* to_string(FailureKind k) {
    switch (k) {
        case FailureKind::NegativeUnderRoot: return "NegativeUnderRoot";
        case FailureKind::ZeroDenominator: return "ZeroDenominator";
        case FailureKind::NegativeComponent: return "NegativeComponent";
    }
    return "?";
}

/// First offending component of a failed recursion. Indices are 1-based:
/// column_index is the recursion index i, component is the position j of
/// (v_i)_j, matching the usual matrix notation.
struct RecursionFailure {
    FailureKind kind;
    std::size_t column_index = 0;
    std::size_t component = 0;
    double value = 0.0;

    std::string describe() const {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.9g", value);
        return std::string(to_string(kind)) + " at (" + std::to_string(column_index) +
               "," + std::to_string(component) + "): " + buf;
    }
};

} // namespace cpband
