#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cpband/band_matrix.hpp"
#include "cpband/core.hpp"
#include "cpband/factor_matrix.hpp"
#include "cpband/tridiagonal.hpp"
#include "cpband/verify.hpp"

namespace cpband {

/// Free constants of the pentadiagonal recursion:
///   v_{-1} = (a_minus1, 0, ..., 0)^T,  v_0 = (a0, b0, 0, ..., 0)^T.
struct PentaInit {
    double a_minus1 = 0.0;
    double a0 = 0.0;
    double b0 = 0.0;

    bool zero() const { return a_minus1 == 0.0 && a0 == 0.0 && b0 == 0.0; }
};

/// Recursion for symmetric pentadiagonal M (a tridiagonal matrix is treated
/// as c == 0):
///   (v_i)_i   = sqrt(a_i - ((v_{i-1})_i)^2 - ((v_{i-2})_i)^2)
///   (v_i)_i+1 = (b_i - (v_{i-1})_{i+1} (v_{i-1})_i) / (v_i)_i
///   (v_i)_i+2 = c_i / (v_i)_i
/// Returns the raw columns v_{-1}, v_0, ..., v_n. A zero pivot whose
/// dependent numerators all vanish continues with zero components unless
/// opts.strict_pivot is set; the continuation indices are recorded.
inline DecomposeResult penta_decompose(const BandedSymMatrix& m, PentaInit init = {},
                                       DecomposeOptions opts = {}) {
    if (init.a_minus1 < 0.0 || init.a0 < 0.0 || init.b0 < 0.0)
        throw OutOfRange("initial constants must be nonnegative");
    const std::size_t n = m.n;
    if (n == 1 && init.b0 != 0.0)
        throw OutOfRange("b0 requires dimension >= 2");

    const double eps = opts.tol.eps;
    DecomposeResult res;
    FactorMatrix f;
    f.n = n;
    f.columns.assign(n + 2, std::vector<double>(n, 0.0));
    f.tags.resize(n + 2);
    for (std::size_t k = 0; k < n + 2; ++k)
        f.tags[k] = {static_cast<int>(k) - 1, 0};
    // Column v_i lives at vector index i+1.
    auto col = [&](std::ptrdiff_t i) -> std::vector<double>& {
        return f.columns[static_cast<std::size_t>(i + 1)];
    };
    col(-1)[0] = init.a_minus1;
    col(0)[0] = init.a0;
    if (n >= 2) col(0)[1] = init.b0;

    for (std::size_t i = 1; i <= n; ++i) {
        const double prev1 = col(static_cast<std::ptrdiff_t>(i) - 1)[i - 1];
        const double prev2 = col(static_cast<std::ptrdiff_t>(i) - 2)[i - 1];
        const double under = m.diag[i - 1] - prev1 * prev1 - prev2 * prev2;
        if (under < -eps) {
            res.failure = RecursionFailure{FailureKind::NegativeUnderRoot, i, i, under};
            return res;
        }
        const bool has_b = i + 1 <= n;
        const bool has_c = i + 2 <= n;
        if (under <= eps * std::max(1.0, std::abs(m.diag[i - 1]))) {
            if (!has_b) {  // last index: nothing depends on this pivot
                col(i)[i - 1] = std::sqrt(std::max(under, 0.0));
                continue;
            }
            if (opts.strict_pivot) {
                res.failure = RecursionFailure{FailureKind::ZeroDenominator, i, i + 1, under};
                return res;
            }
            const double num_b =
                m.off1[i - 1] - col(static_cast<std::ptrdiff_t>(i) - 1)[i] *
                                    col(static_cast<std::ptrdiff_t>(i) - 1)[i - 1];
            if (std::abs(num_b) > eps) {
                res.failure = RecursionFailure{FailureKind::ZeroDenominator, i, i + 1, under};
                return res;
            }
            if (has_c && std::abs(m.off2_at(i - 1)) > eps) {
                res.failure = RecursionFailure{FailureKind::ZeroDenominator, i, i + 2, under};
                return res;
            }
            col(i)[i - 1] = std::sqrt(std::max(under, 0.0));
            res.lenient_pivots.push_back(i);
            continue;
        }
        const double pivot = std::sqrt(under);
        col(i)[i - 1] = pivot;
        if (has_b) {
            const double num = m.off1[i - 1] - col(static_cast<std::ptrdiff_t>(i) - 1)[i] *
                                                  col(static_cast<std::ptrdiff_t>(i) - 1)[i - 1];
            const double val = num / pivot;
            if (val < -eps && !opts.allow_negative) {
                res.failure = RecursionFailure{FailureKind::NegativeComponent, i, i + 1, val};
                return res;
            }
            col(i)[i] = val;
        }
        if (has_c) {
            const double val = m.off2_at(i - 1) / pivot;
            if (val < -eps && !opts.allow_negative) {
                res.failure = RecursionFailure{FailureKind::NegativeComponent, i, i + 2, val};
                return res;
            }
            col(i)[i + 1] = val;
        }
    }
    res.factor = std::move(f);
    return res;
}

/// Deterministic candidate generator for the initial-condition search.
/// An explicit candidate list overrides the generated grid.
struct SearchConfig {
    std::size_t resolution = 8;
    std::vector<PentaInit> candidates;
    /// Append candidates with b0 = b_1/a0, which zero the (v_1)_2 numerator
    /// the way nonzero initial conditions are chosen by hand. Plain lattice
    /// products almost never satisfy b0*a0 = b_1 exactly, and matrices with
    /// b_2 = 0 need exactly that.
    bool matched_candidates = true;
};

inline std::vector<PentaInit> search_candidates(const BandedSymMatrix& m, const SearchConfig& cfg) {
    if (!cfg.candidates.empty()) return cfg.candidates;
    std::vector<PentaInit> out;
    const std::size_t res = std::max<std::size_t>(cfg.resolution, 1);
    const double s = std::sqrt(std::max(m.diag[0], 0.0));
    const double a2 = m.n >= 2 ? m.diag[1] : 0.0;
    const double t = std::sqrt(std::max(a2, 0.0));
    if (m.n == 1) {
        for (std::size_t k = 0; k < res; ++k)
            out.push_back({0.0, k * s / static_cast<double>(res), 0.0});
        return out;
    }
    for (std::size_t k = 0; k < res; ++k)
        for (std::size_t l = 0; l < res; ++l)
            out.push_back({0.0, k * s / static_cast<double>(res),
                           l * t / static_cast<double>(res)});
    if (cfg.matched_candidates && m.off1[0] > 0.0) {
        for (std::size_t k = 1; k < res; ++k) {
            const double a0 = k * s / static_cast<double>(res);
            if (a0 <= 0.0) continue;
            const double b0 = m.off1[0] / a0;
            if (b0 * b0 >= a2) continue;  // would empty the second pivot
            out.push_back({0.0, a0, b0});
        }
    }
    return out;
}

/// Closed-form sign of the would-be component (v_2)_3 under `init`,
/// mirroring the first two recursion steps. Returns false only when the
/// full recursion is certain to fail with NegativeComponent at (2,3);
/// anything undetermined (short matrices, degenerate pivots, failures
/// earlier in the recursion) passes through to the recursion itself.
inline bool penta_feasible_23(const BandedSymMatrix& m, PentaInit init, Tolerance tol = {}) {
    if (m.n < 3) return true;
    const double eps = tol.eps;
    const double denom1 = m.diag[0] - init.a0 * init.a0 - init.a_minus1 * init.a_minus1;
    if (denom1 <= eps * std::max(1.0, std::abs(m.diag[0]))) return true;
    const double p1 = std::sqrt(denom1);
    const double v12 = (m.off1[0] - init.b0 * init.a0) / p1;
    const double v13 = m.off2_at(0) / p1;
    if (v12 < -eps || v13 < -eps) return true;  // recursion fails at (1,·) first
    const double under2 = m.diag[1] - v12 * v12 - init.b0 * init.b0;
    if (under2 <= eps * std::max(1.0, std::abs(m.diag[1]))) return true;
    const double v23 = (m.off1[1] - v13 * v12) / std::sqrt(under2);
    return v23 >= -eps;
}

struct SearchResult {
    std::optional<PentaInit> init;
    std::optional<FactorMatrix> factor;
    std::size_t attempts = 0;
    /// Deepest fully built recursion index over all failed candidates,
    /// with the candidate that reached it.
    std::size_t best_depth = 0;
    std::optional<PentaInit> best_init;
    std::optional<RecursionFailure> best_failure;

    bool ok() const { return factor.has_value(); }
};

/// Tries candidates in enumeration order (all-zero first) and returns the
/// first one whose decomposition succeeds with nonnegative components.
inline SearchResult init_search(const BandedSymMatrix& m, SearchConfig cfg = {},
                                DecomposeOptions opts = {}) {
    SearchResult out;
    for (const PentaInit& cand : search_candidates(m, cfg)) {
        ++out.attempts;
        if (!penta_feasible_23(m, cand, opts.tol)) continue;
        DecomposeResult r = penta_decompose(m, cand, opts);
        if (r.ok()) {
            out.init = cand;
            out.factor = std::move(r.factor);
            return out;
        }
        const std::size_t depth = r.failure->column_index - 1;
        if (!out.best_init || depth > out.best_depth) {
            out.best_depth = depth;
            out.best_init = cand;
            out.best_failure = r.failure;
        }
    }
    return out;
}

/// The two-part split of a doubly stochastic pentadiagonal matrix:
/// tilde carries the second band with diagonal 1/2 - b_i - b_{i-1},
/// hat carries the first band with diagonal 1/2 - c_i - c_{i-2}.
struct SplitPair {
    BandedSymMatrix tilde;
    BandedSymMatrix hat;
};

/// The hat diagonal follows the band formula; the tilde diagonal is taken
/// as the remainder a_i - hat_i so that tilde + hat reproduces M entry for
/// entry, bit-exactly, also when row sums are only approximately 1.
inline SplitPair alternate_split(const BandedSymMatrix& m, Tolerance tol = {}) {
    if (!is_doubly_stochastic(m, tol).ok)
        throw NotDoublyStochastic("alternate_split requires a doubly stochastic matrix");
    const std::size_t n = m.n;
    std::vector<double> hat_diag(n), tilde_diag(n);
    for (std::size_t r = 0; r < n; ++r) {
        double c_right = m.off2_at(r);                       // c_i
        double c_left = (r >= 2) ? m.off2_at(r - 2) : 0.0;   // c_{i-2}
        hat_diag[r] = 0.5 - c_right - c_left;
        tilde_diag[r] = m.diag[r] - hat_diag[r];
    }
    std::optional<std::vector<double>> tilde_c, hat_c;
    if (m.off2) {
        tilde_c = *m.off2;
        hat_c = std::vector<double>(n - 2, 0.0);
    }
    BandedSymMatrix tilde{n, std::move(tilde_diag), std::vector<double>(n - 1, 0.0),
                          std::move(tilde_c)};
    BandedSymMatrix hat{n, std::move(hat_diag), m.off1, std::move(hat_c)};
    return SplitPair{std::move(tilde), std::move(hat)};
}

enum class CpMethod { Direct, InitSearch, Blocks, AlternateSplit };

inline const char* to_string(CpMethod m) {
    switch (m) {
        case CpMethod::Direct: return "direct";
        case CpMethod::InitSearch: return "init-search";
        case CpMethod::Blocks: return "blocks";
        case CpMethod::AlternateSplit: return "alternate-split";
    }
    return "?";
}

struct StageAttempt {
    std::string stage;
    std::optional<RecursionFailure> failure;
    std::string note;
};

struct PentaBlockReport {
    std::size_t offset = 0;
    std::size_t size = 0;
    bool ok = false;
    CpMethod method = CpMethod::Direct;       // stage that succeeded, when ok
    std::optional<PentaInit> init;            // when found by init_search
    std::vector<StageAttempt> failed_stages;  // stages tried before giving up
};

struct PentaCpResult {
    std::optional<FactorMatrix> factor;  // trimmed, columns embedded at block offsets
    std::optional<Certificate> certificate;
    CpMethod method = CpMethod::Direct;  // meaningful when ok()
    std::vector<PentaBlockReport> blocks;

    bool ok() const { return factor.has_value(); }
};

/// Pipeline: split at band cuts first (failures inside reducible matrices
/// are structural); per block try the zero-init recursion, then the
/// initial-condition search, then — for doubly stochastic blocks — the
/// alternate split with both members decomposed at zero init and their
/// columns concatenated.
inline PentaCpResult penta_cp(const BandedSymMatrix& m, SearchConfig cfg = {},
                              DecomposeOptions opts = {}) {
    PentaCpResult out;
    BlockDecomposition dec = split_blocks(m);

    FactorMatrix f;
    f.n = m.n;
    bool all_ok = true;
    auto embed = [&](const FactorMatrix& src, std::size_t offset) {
        for (std::size_t k = 0; k < src.columns.size(); ++k) {
            if (FactorMatrix::is_zero_column(src.columns[k])) continue;
            std::vector<double> colv(m.n, 0.0);
            for (std::size_t j = 0; j < src.columns[k].size(); ++j)
                colv[offset + j] = src.columns[k][j];
            f.columns.push_back(std::move(colv));
            int idx = k < src.tags.size() ? src.tags[k].recursion_index : static_cast<int>(k);
            f.tags.push_back({idx, offset});
        }
    };

    for (const auto& blk : dec.blocks) {
        PentaBlockReport rep;
        rep.offset = blk.offset;
        rep.size = blk.matrix.n;

        DecomposeResult direct = penta_decompose(blk.matrix, PentaInit{}, opts);
        if (direct.ok()) {
            rep.ok = true;
            rep.method = CpMethod::Direct;
            embed(*direct.factor, blk.offset);
            out.blocks.push_back(std::move(rep));
            continue;
        }
        rep.failed_stages.push_back({"direct", direct.failure, ""});

        SearchResult search = init_search(blk.matrix, cfg, opts);
        if (search.ok()) {
            rep.ok = true;
            rep.method = CpMethod::InitSearch;
            rep.init = search.init;
            embed(*search.factor, blk.offset);
            out.blocks.push_back(std::move(rep));
            continue;
        }
        rep.failed_stages.push_back({"init-search", search.best_failure,
                                     "no candidate succeeded in " +
                                         std::to_string(search.attempts) + " attempts"});

        if (is_doubly_stochastic(blk.matrix, opts.tol).ok) {
            SplitPair split = alternate_split(blk.matrix, opts.tol);
            DecomposeResult rv = penta_decompose(split.tilde, PentaInit{}, opts);
            DecomposeResult rw = penta_decompose(split.hat, PentaInit{}, opts);
            if (rv.ok() && rw.ok()) {
                rep.ok = true;
                rep.method = CpMethod::AlternateSplit;
                embed(*rv.factor, blk.offset);
                embed(*rw.factor, blk.offset);
                out.blocks.push_back(std::move(rep));
                continue;
            }
            rep.failed_stages.push_back({"alternate-split",
                                         rv.ok() ? rw.failure : rv.failure,
                                         rv.ok() ? "hat member failed" : "tilde member failed"});
        } else {
            rep.failed_stages.push_back({"alternate-split", std::nullopt,
                                         "skipped: block is not doubly stochastic"});
        }
        rep.ok = false;
        all_ok = false;
        out.blocks.push_back(std::move(rep));
    }

    if (!all_ok) return out;
    out.method = out.blocks.size() > 1 ? CpMethod::Blocks : out.blocks.front().method;
    out.certificate = certify_cp(m, f, opts.tol);
    out.factor = std::move(f);
    return out;
}

struct ModifiedMinorCriterion {
    std::size_t index = 0;   // i: predicts the sign of (v_i)_{i+1}
    double determinant = 0.0;
    int sign = 0;            // -1, 0, +1 at tolerance
};

/// The matrix A' equals M except
///   a'_11 = a_1 - (a0^2 + a_{-1}^2),  a'_22 = a_2 - b0^2,  a'_12 = b_1 - b0 a0;
/// its leading principal minors play the Sylvester role for the recursion,
/// and for each i the determinant of rows 1..i, columns {1..i-1, i+1}
/// predicts the sign of (v_i)_{i+1}.
struct AprimeDiagnostic {
    BandedSymMatrix aprime;
    std::vector<double> leading_minors;
    std::vector<ModifiedMinorCriterion> criteria;
};

inline AprimeDiagnostic aprime_diagnostic(const BandedSymMatrix& m, PentaInit init = {},
                                          Tolerance tol = {}) {
    AprimeDiagnostic diag;
    BandedSymMatrix ap = m;
    ap.diag[0] = m.diag[0] - (init.a0 * init.a0 + init.a_minus1 * init.a_minus1);
    if (m.n >= 2) {
        ap.diag[1] = m.diag[1] - init.b0 * init.b0;
        ap.off1[0] = m.off1[0] - init.b0 * init.a0;
    }
    diag.leading_minors = leading_principal_minors(ap);
    for (std::size_t i = 1; i < m.n; ++i) {
        DenseMatrix sub(i);
        for (std::size_t r = 0; r < i; ++r) {
            std::size_t cc = 0;
            for (std::size_t c = 0; c + 1 <= i + 1; ++c) {
                if (c == i - 1) continue;  // drop the second-last column
                sub(r, cc++) = ap.entry(r, c);
            }
        }
        double det = detail::bareiss_determinant(std::move(sub));
        int sign = det > tol.eps ? 1 : (det < -tol.eps ? -1 : 0);
        diag.criteria.push_back({i, det, sign});
    }
    diag.aprime = std::move(ap);
    return diag;
}

} // namespace cpband
