#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cpband/band_matrix.hpp"
#include "cpband/core.hpp"
#include "cpband/factor_matrix.hpp"

namespace cpband {

enum class Verdict { CPCertified, NotCertified };

inline const char* to_string(Verdict v) {
    return v == Verdict::CPCertified ? "CPCertified" : "NotCertified";
}

/// Verification record for a claimed factorization A = V V^T with V >= 0.
struct Certificate {
    double residual_max = 0.0;  // max |A - V V^T| over all entries
    double min_entry = 0.0;     // minimum component of V
    Verdict verdict = Verdict::NotCertified;
    std::string notes;
};

/// Recomputes the Gram sum densely and checks it against M.
/// CPCertified iff residual_max <= n*eps*max(1, max|M|) and
/// min_entry >= -eps.
inline Certificate certify_cp(const BandedSymMatrix& m, const FactorMatrix& f, Tolerance tol = {}) {
    if (f.n != m.n)
        throw DimensionMismatch("factor has dimension " + std::to_string(f.n) +
                                ", matrix has " + std::to_string(m.n));
    DenseMatrix gram = f.gram();
    DenseMatrix dense = to_dense(m);
    double res = 0.0;
    for (std::size_t i = 0; i < m.n; ++i)
        for (std::size_t j = 0; j < m.n; ++j)
            res = std::max(res, std::abs(gram(i, j) - dense(i, j)));

    Certificate cert;
    cert.residual_max = res;
    cert.min_entry = f.columns.empty() ? 0.0 : f.min_entry();
    const double tol_res = static_cast<double>(m.n) * tol.eps * std::max(1.0, dense.max_abs());
    const double tol_sign = tol.eps;
    cert.verdict = (res <= tol_res && cert.min_entry >= -tol_sign)
                       ? Verdict::CPCertified
                       : Verdict::NotCertified;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "tol_res=%.3g tol_sign=%.3g columns=%zu", tol_res, tol_sign,
                  f.columns.size());
    cert.notes = buf;
    if (cert.verdict == Verdict::NotCertified) {
        if (res > tol_res) cert.notes += "; residual exceeds tolerance";
        if (cert.min_entry < -tol_sign) cert.notes += "; negative factor entry";
    }
    return cert;
}

namespace detail {

/// Bareiss fraction-free elimination; exact for integer matrices, mild
/// growth otherwise. Returns the determinant.
inline double bareiss_determinant(DenseMatrix a) {
    const std::size_t n = a.size();
    if (n == 0) return 1.0;
    double prev = 1.0;
    double sign = 1.0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (a(k, k) == 0.0) {
            std::size_t p = k + 1;
            while (p < n && a(p, k) == 0.0) ++p;
            if (p == n) return 0.0;
            for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j)
                a(i, j) = (a(i, j) * a(k, k) - a(i, k) * a(k, j)) / prev;
        prev = a(k, k);
    }
    return sign * a(n - 1, n - 1);
}

} // namespace detail

/// Determinants of the top-left k x k submatrices, k = 1..n. Tridiagonal
/// matrices use the continuant recurrence d_k = a_k d_{k-1} - b_{k-1}^2 d_{k-2};
/// pentadiagonal ones fall back to fraction-free elimination per submatrix.
inline std::vector<double> leading_principal_minors(const BandedSymMatrix& m) {
    std::vector<double> minors(m.n);
    if (!m.pentadiagonal()) {
        double dm2 = 1.0, dm1 = 1.0;
        for (std::size_t k = 0; k < m.n; ++k) {
            double bprev = (k >= 1) ? m.off1[k - 1] : 0.0;
            double d = m.diag[k] * dm1 - bprev * bprev * dm2;
            minors[k] = d;
            dm2 = dm1;
            dm1 = d;
        }
        return minors;
    }
    for (std::size_t k = 1; k <= m.n; ++k) {
        DenseMatrix sub(k);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j) sub(i, j) = m.entry(i, j);
        minors[k - 1] = detail::bareiss_determinant(std::move(sub));
    }
    return minors;
}

enum class PsdClass { PositiveDefinite, PSDSingular, Indefinite };

inline const char* to_string(PsdClass c) {
    switch (c) {
        case PsdClass::PositiveDefinite: return "PositiveDefinite";
        case PsdClass::PSDSingular: return "PSDSingular";
        case PsdClass::Indefinite: return "Indefinite";
    }
    return "?";
}

struct SpectralReport {
    std::vector<double> eigenvalues;  // ascending
    PsdClass psd_class = PsdClass::Indefinite;
    std::size_t rank = 0;
    std::pair<double, double> gershgorin{0.0, 0.0};
};

struct EigenOptions {
    double rank_tol = 1e-8;  // relative; desk-scale spectra are well separated
    int max_sweeps = 100;
};

namespace detail {

/// Cyclic Jacobi sweeps on a dense copy, row-major rotation order so runs
/// are bit-reproducible. Eigenvalues only; no accumulation of vectors.
inline std::vector<double> jacobi_eigenvalues(DenseMatrix a, double eps, int max_sweeps) {
    const std::size_t n = a.size();
    if (n == 1) return {a(0, 0)};
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) norm += a(i, j) * a(i, j);
    norm = std::sqrt(norm);
    const double target = std::max(eps, 1e-15) * std::max(norm, 1e-300);

    auto off_norm = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) s += 2.0 * a(i, j) * a(i, j);
        return std::sqrt(s);
    };

    int sweep = 0;
    while (off_norm() > target) {
        if (sweep++ >= max_sweeps)
            throw NoConvergence("jacobi eigensolver: off-diagonal norm stalled after " +
                                std::to_string(max_sweeps) + " sweeps");
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                double apq = a(p, q);
                if (apq == 0.0) continue;
                if (std::abs(apq) < 1e-300) {  // below rotation resolution
                    a(p, q) = a(q, p) = 0.0;
                    continue;
                }
                double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                double t;
                if (std::abs(theta) > 1e150)
                    t = 1.0 / (2.0 * theta);
                else
                    t = (theta >= 0.0 ? 1.0 : -1.0) /
                        (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                // Rotate rows/columns p and q.
                for (std::size_t k = 0; k < n; ++k) {
                    double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                a(p, q) = a(q, p) = 0.0;  // annihilated by construction
            }
        }
    }
    std::vector<double> eig(n);
    for (std::size_t i = 0; i < n; ++i) eig[i] = a(i, i);
    std::sort(eig.begin(), eig.end());
    return eig;
}

} // namespace detail

inline SpectralReport eigen_spectrum(const BandedSymMatrix& m, Tolerance tol = {},
                                     EigenOptions opts = {}) {
    SpectralReport rep;
    rep.eigenvalues = detail::jacobi_eigenvalues(to_dense(m), tol.eps, opts.max_sweeps);
    rep.gershgorin = gershgorin_interval(m);
    double max_abs = 0.0;
    for (double ev : rep.eigenvalues) max_abs = std::max(max_abs, std::abs(ev));
    const double rank_thr = opts.rank_tol * std::max(1.0, max_abs);
    rep.rank = 0;
    for (double ev : rep.eigenvalues)
        if (std::abs(ev) > rank_thr) ++rep.rank;
    const double cls_thr = tol.eps * std::max(1.0, max_abs);
    double lambda_min = rep.eigenvalues.front();
    if (lambda_min > cls_thr)
        rep.psd_class = PsdClass::PositiveDefinite;
    else if (lambda_min < -cls_thr)
        rep.psd_class = PsdClass::Indefinite;
    else
        rep.psd_class = PsdClass::PSDSingular;
    return rep;
}

inline PsdClass psd_classify(const BandedSymMatrix& m, Tolerance tol = {}) {
    return eigen_spectrum(m, tol).psd_class;
}

/// 2x2 doubly stochastic block with eigenvalues {1, lambda}, direct-summed
/// with an identity up to dimension n.
inline BandedSymMatrix construct_tridiag_with_eigenvalue(double lambda, std::size_t n) {
    if (!(lambda >= -1.0 && lambda <= 1.0))
        throw OutOfRange("eigenvalue must lie in [-1, 1]");
    if (n < 2) throw OutOfRange("dimension must be at least 2");
    const double a = (lambda + 1.0) / 2.0;
    const double b = (1.0 - lambda) / 2.0;
    std::vector<double> diag(n, 1.0), off(n - 1, 0.0);
    diag[0] = diag[1] = a;
    off[0] = b;
    return BandedSymMatrix{n, std::move(diag), std::move(off), std::nullopt};
}

/// 3x3 block a*I + b*(J - I) with spectrum {1, lambda, lambda} for
/// lambda >= -1/2; below that the diagonal would go negative, so the
/// tridiagonal 2x2 witness is embedded instead (with an explicit zero
/// second band). Direct-summed with an identity up to dimension n.
inline BandedSymMatrix construct_penta_with_eigenvalue(double lambda, std::size_t n) {
    if (!(lambda >= -1.0 && lambda <= 1.0))
        throw OutOfRange("eigenvalue must lie in [-1, 1]");
    if (n < 3) throw OutOfRange("dimension must be at least 3");
    std::vector<double> diag(n, 1.0), off1(n - 1, 0.0), off2(n - 2, 0.0);
    if (lambda >= -0.5) {
        const double a = (1.0 + 2.0 * lambda) / 3.0;
        const double b = (1.0 - lambda) / 3.0;
        diag[0] = diag[1] = diag[2] = a;
        off1[0] = off1[1] = b;
        off2[0] = b;
    } else {
        const double a = (lambda + 1.0) / 2.0;
        diag[0] = diag[1] = a;
        off1[0] = (1.0 - lambda) / 2.0;
    }
    return BandedSymMatrix{n, std::move(diag), std::move(off1), std::move(off2)};
}

} // namespace cpband
