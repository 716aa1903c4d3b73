// cpband command line: structural checks, constructive complete-positivity
// decompositions, certificate verification and prescribed-eigenvalue
// constructions for symmetric tridiagonal/pentadiagonal matrices.
//
// Exit codes: 0 success (requested certification holds), 1 usage/parse
// error, 2 honest pipeline failure with diagnostics.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "cpband/band_matrix.hpp"
#include "cpband/core.hpp"
#include "cpband/factor_matrix.hpp"
#include "cpband/io.hpp"
#include "cpband/pentadiagonal.hpp"
#include "cpband/tridiagonal.hpp"
#include "cpband/verify.hpp"

namespace {

using nlohmann::json;
using namespace cpband;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string format_vector(const std::vector<double>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ", ";
        s += fmt(v[i]);
    }
    return s + "]";
}

void round_band_zeros(BandedSymMatrix& m, double thr) {
    auto snap = [&](std::vector<double>& band) {
        for (double& v : band)
            if (std::abs(v) <= thr) v = 0.0;
    };
    snap(m.off1);
    if (m.off2) snap(*m.off2);
}

struct Predicates {
    StochasticReport stochastic;
    bool diagonally_dominant = false;
    bool irreducible = false;
    std::vector<std::size_t> block_sizes;
    std::pair<double, double> gershgorin;
};

Predicates run_predicates(const BandedSymMatrix& m, Tolerance tol) {
    Predicates p;
    p.stochastic = is_doubly_stochastic(m, tol);
    p.diagonally_dominant = is_diagonally_dominant(m);
    p.irreducible = is_irreducible(m);
    p.block_sizes = split_blocks(m).sizes();
    p.gershgorin = gershgorin_interval(m);
    return p;
}

std::string format_sizes(const std::vector<std::size_t>& sizes) {
    std::string s = "[";
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        if (i) s += ", ";
        s += std::to_string(sizes[i]);
    }
    return s + "]";
}

void print_predicates(const Predicates& p) {
    std::cout << "doubly stochastic: " << (p.stochastic.ok ? "yes" : "no") << "\n";
    for (const auto& r : p.stochastic.bad_row_sums)
        std::cout << "  row " << r.row << " sums to " << fmt(r.sum) << "\n";
    for (const auto& e : p.stochastic.negative_entries)
        std::cout << "  entry (" << e.row << "," << e.col << ") = " << fmt(e.value)
                  << " is negative\n";
    std::cout << "diagonally dominant: " << (p.diagonally_dominant ? "yes" : "no") << "\n";
    std::cout << "irreducible: " << (p.irreducible ? "yes" : "no") << "\n";
    std::cout << "blocks: " << format_sizes(p.block_sizes) << "\n";
    std::cout << "gershgorin: [" << fmt(p.gershgorin.first) << ", " << fmt(p.gershgorin.second)
              << "]\n";
}

void print_spectrum(const SpectralReport& s) {
    std::cout << "eigenvalues: " << format_vector(s.eigenvalues) << "\n";
    std::cout << "psd class: " << to_string(s.psd_class) << "\n";
    std::cout << "rank: " << s.rank << "\n";
}

void print_factor(const FactorMatrix& f) {
    std::cout << "factor (" << f.n << " x " << f.columns.size() << "):\n";
    for (std::size_t k = 0; k < f.columns.size(); ++k) {
        std::cout << "  v";
        if (k < f.tags.size())
            std::cout << f.tags[k].recursion_index;
        else
            std::cout << k;
        std::cout << ": " << format_vector(f.columns[k]) << "\n";
    }
}

void print_certificate(const Certificate& c) {
    std::cout << "certificate: " << to_string(c.verdict) << "\n";
    std::cout << "  residual max: " << fmt(c.residual_max) << "\n";
    std::cout << "  min entry: " << fmt(c.min_entry) << "\n";
    std::cout << "  " << c.notes << "\n";
}

json predicates_json(const Predicates& p) {
    json j;
    j["doubly_stochastic"] = p.stochastic.ok;
    j["diagonally_dominant"] = p.diagonally_dominant;
    j["irreducible"] = p.irreducible;
    j["blocks"] = p.block_sizes;
    j["gershgorin"] = {p.gershgorin.first, p.gershgorin.second};
    return j;
}

json input_json(const std::string& path, const BandedSymMatrix& m) {
    json j;
    j["path"] = path;
    j["n"] = m.n;
    j["bandwidth"] = m.pentadiagonal() ? "pentadiagonal" : "tridiagonal";
    j["a"] = m.diag;
    j["b"] = m.off1;
    if (m.off2)
        j["c"] = *m.off2;
    else
        j["c"] = nullptr;
    return j;
}

json factor_json(const FactorMatrix& f) {
    json j;
    j["n"] = f.n;
    j["columns"] = json::array();
    for (const auto& col : f.columns) j["columns"].push_back(col);
    return j;
}

json certificate_json(const Certificate& c) {
    json j;
    j["residual_max"] = c.residual_max;
    j["min_entry"] = c.min_entry;
    j["verdict"] = to_string(c.verdict);
    j["notes"] = c.notes;
    return j;
}

json spectrum_json(const SpectralReport& s) {
    json j;
    j["eigenvalues"] = s.eigenvalues;
    j["psd_class"] = to_string(s.psd_class);
    j["rank"] = s.rank;
    return j;
}

json failure_json(const RecursionFailure& f) {
    json j;
    j["kind"] = to_string(f.kind);
    j["at"] = {f.column_index, f.component};
    j["value"] = f.value;
    return j;
}

void print_diagnose(const BandedSymMatrix& m, const PentaInit& init, Tolerance tol) {
    if (m.pentadiagonal()) {
        AprimeDiagnostic d = aprime_diagnostic(m, init, tol);
        std::cout << "A' leading principal minors: " << format_vector(d.leading_minors) << "\n";
        std::cout << "A' modified-minor criteria (sign predicts sign of (v_i)_{i+1}):\n";
        for (const auto& c : d.criteria)
            std::cout << "  i=" << c.index << ": det=" << fmt(c.determinant) << " sign="
                      << (c.sign > 0 ? "+" : (c.sign < 0 ? "-" : "0")) << "\n";
    } else {
        std::cout << "leading principal minors: " << format_vector(leading_principal_minors(m))
                  << "\n";
    }
}

struct DecomposeOutcome {
    std::optional<FactorMatrix> factor;
    std::optional<Certificate> certificate;
    std::string method;
    std::optional<RecursionFailure> failure;
    std::vector<std::string> notes;
    int exit_code = 0;
};

int run_decompose(const std::string& path, const io::MatrixFile& file, Tolerance tol,
                  std::optional<double> a0, std::optional<std::vector<double>> init_vals,
                  bool search, bool strict, bool no_trim, bool diagnose, bool as_json) {
    const BandedSymMatrix& m = file.matrix;
    DecomposeOptions opts;
    opts.tol = tol;
    opts.strict_pivot = strict;

    DecomposeOutcome out;
    Predicates preds = run_predicates(m, tol);

    if (!m.pentadiagonal() && init_vals) {
        std::cerr << "error: --init applies to pentadiagonal input; use --a0\n";
        return 1;
    }
    if (m.pentadiagonal() && a0) {
        std::cerr << "error: --a0 applies to tridiagonal input; use --init\n";
        return 1;
    }

    PentaInit used_init;  // for --diagnose
    if (a0) {
        if (*a0 < 0.0) {
            std::cerr << "error: --a0 must be nonnegative\n";
            return 1;
        }
        used_init.a0 = *a0;
        DecomposeResult r = tri_decompose(m, TriInit{*a0}, opts);
        out.method = "direct";
        out.notes.push_back("tri_decompose with a0=" + fmt(*a0));
        if (r.ok()) {
            out.certificate = certify_cp(m, *r.factor, tol);
            out.factor = no_trim ? std::move(*r.factor) : r.factor->trimmed();
        } else {
            out.failure = r.failure;
        }
    } else if (init_vals) {
        if (init_vals->size() != 3) {
            std::cerr << "error: --init expects three values a-1,a0,b0\n";
            return 1;
        }
        PentaInit init{(*init_vals)[0], (*init_vals)[1], (*init_vals)[2]};
        if (init.a_minus1 < 0 || init.a0 < 0 || init.b0 < 0) {
            std::cerr << "error: --init values must be nonnegative\n";
            return 1;
        }
        used_init = init;
        DecomposeResult r = penta_decompose(m, init, opts);
        out.method = "direct";
        out.notes.push_back("penta_decompose with init (" + fmt(init.a_minus1) + ", " +
                            fmt(init.a0) + ", " + fmt(init.b0) + ")");
        for (std::size_t i : r.lenient_pivots)
            out.notes.push_back("zero pivot at i=" + std::to_string(i) +
                                " continued with zero components; the strict reading fails at (" +
                                std::to_string(i) + "," + std::to_string(i + 1) + ")");
        if (r.ok()) {
            out.certificate = certify_cp(m, *r.factor, tol);
            out.factor = no_trim ? std::move(*r.factor) : r.factor->trimmed();
        } else {
            out.failure = r.failure;
        }
    } else if (search) {
        SearchResult r = init_search(m, SearchConfig{}, opts);
        out.method = "init-search";
        if (r.ok()) {
            out.notes.push_back("found init (" + fmt(r.init->a_minus1) + ", " + fmt(r.init->a0) +
                                ", " + fmt(r.init->b0) + ") after " + std::to_string(r.attempts) +
                                " attempts");
            out.certificate = certify_cp(m, *r.factor, tol);
            out.factor = no_trim ? std::move(*r.factor) : r.factor->trimmed();
        } else {
            out.failure = r.best_failure;
            out.notes.push_back("no candidate succeeded in " + std::to_string(r.attempts) +
                                " attempts; deepest index reached " + std::to_string(r.best_depth));
        }
    } else if (!m.pentadiagonal()) {
        TriCpResult r = tri_cp(m, tol);
        out.method = "blocks";
        if (r.block_sizes.size() == 1) out.method = "direct";
        if (r.ok()) {
            out.certificate = r.certificate;
            out.factor = std::move(r.factor);
        } else {
            out.failure = r.failure->failure;
            out.notes.push_back("block " + std::to_string(r.failure->block_index + 1) +
                                " at offset " + std::to_string(r.failure->offset + 1) + " failed");
        }
    } else {
        PentaCpResult r = penta_cp(m, SearchConfig{}, opts);
        if (r.ok()) {
            out.method = to_string(r.method);
            for (const auto& blk : r.blocks)
                if (blk.init)
                    out.notes.push_back("block at offset " + std::to_string(blk.offset + 1) +
                                        " used init (" + fmt(blk.init->a_minus1) + ", " +
                                        fmt(blk.init->a0) + ", " + fmt(blk.init->b0) + ")");
            out.certificate = r.certificate;
            out.factor = std::move(r.factor);
        } else {
            for (const auto& blk : r.blocks) {
                if (blk.ok) continue;
                for (const auto& stage : blk.failed_stages) {
                    std::string msg = "block at offset " + std::to_string(blk.offset + 1) +
                                      ", stage " + stage.stage + ": ";
                    if (stage.failure) msg += stage.failure->describe();
                    if (!stage.note.empty()) msg += (stage.failure ? "; " : "") + stage.note;
                    out.notes.push_back(msg);
                    if (stage.failure && !out.failure) out.failure = stage.failure;
                }
            }
        }
    }

    const bool certified =
        out.certificate && out.certificate->verdict == Verdict::CPCertified;
    out.exit_code = certified ? 0 : 2;

    SpectralReport spectrum = eigen_spectrum(m, tol);

    if (as_json) {
        json rep;
        rep["command"] = "decompose";
        rep["input"] = input_json(path, m);
        rep["predicates"] = predicates_json(preds);
        rep["method"] = out.method;
        rep["factor"] = out.factor ? factor_json(*out.factor) : json(nullptr);
        rep["certificate"] = out.certificate ? certificate_json(*out.certificate) : json(nullptr);
        rep["spectrum"] = spectrum_json(spectrum);
        rep["failure"] = out.failure ? failure_json(*out.failure) : json(nullptr);
        rep["notes"] = out.notes;
        rep["exit_code"] = out.exit_code;
        std::cout << rep.dump(2) << "\n";
        return out.exit_code;
    }

    std::cout << "n: " << m.n << " (" << (m.pentadiagonal() ? "pentadiagonal" : "tridiagonal")
              << ")\n";
    print_predicates(preds);
    print_spectrum(spectrum);
    std::cout << "method: " << out.method << "\n";
    for (const auto& note : out.notes) std::cout << "note: " << note << "\n";
    if (out.factor) print_factor(*out.factor);
    if (out.certificate) print_certificate(*out.certificate);
    if (out.failure) {
        std::cout << "failure: " << out.failure->describe() << "\n";
        std::cerr << "decomposition failed: " << out.failure->describe() << "\n";
    } else if (!certified) {
        std::cerr << "decomposition did not certify\n";
    }
    if (diagnose && (out.failure || !certified)) print_diagnose(m, used_init, tol);
    return out.exit_code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Constructive complete positivity for banded symmetric matrices"};
    app.require_subcommand(1);

    double tol_eps = 1e-10;
    app.add_option("--tol", tol_eps, "absolute tolerance for approximate comparisons")
        ->check(CLI::NonNegativeNumber);

    // check
    auto* check = app.add_subcommand("check", "structural predicates and spectrum of a matrix");
    std::string check_path;
    double check_round = -1.0;
    check->add_option("path", check_path, "matrix file (band-json or dense-csv)")->required();
    check->add_option("--round-zeros", check_round,
                      "zero out band entries with magnitude at most this threshold");

    // decompose
    auto* dec = app.add_subcommand("decompose", "decompose a matrix as V V^T with V >= 0");
    std::string dec_path;
    std::optional<double> dec_a0;
    std::vector<double> dec_init;
    bool dec_search = false, dec_strict = false, dec_no_trim = false, dec_json = false,
         dec_diagnose = false;
    double dec_round = -1.0;
    dec->add_option("path", dec_path, "matrix file (band-json or dense-csv)")->required();
    auto* a0_opt = dec->add_option("--a0", dec_a0, "initial constant for the tridiagonal recursion");
    dec->add_option("--init", dec_init,
                    "initial constants a-1,a0,b0 for the pentadiagonal recursion")
        ->delimiter(',')
        ->expected(3)
        ->excludes(a0_opt);
    dec->add_flag("--search", dec_search, "run the initial-condition search directly");
    dec->add_flag("--strict-pivot", dec_strict,
                  "treat any zero pivot before the last index as a failure");
    dec->add_flag("--no-trim", dec_no_trim, "keep all-zero columns (raw recursion indexing)");
    dec->add_flag("--json", dec_json, "emit the full run report as a single JSON object");
    dec->add_flag("--diagnose", dec_diagnose,
                  "on failure, print leading minors and the A' minor criteria");
    dec->add_option("--round-zeros", dec_round,
                    "zero out band entries with magnitude at most this threshold");

    // certify
    auto* cert = app.add_subcommand("certify", "check a factor file against a matrix");
    std::string cert_matrix, cert_factor;
    cert->add_option("matrix", cert_matrix, "matrix file")->required();
    cert->add_option("factor", cert_factor, "factor file (column list)")->required();

    // construct
    auto* cons = app.add_subcommand("construct",
                                    "emit a doubly stochastic matrix with a prescribed eigenvalue");
    double cons_lambda = 0.0;
    std::size_t cons_n = 0;
    bool cons_penta = false;
    cons->add_option("--lambda", cons_lambda, "prescribed eigenvalue in [-1, 1]")->required();
    cons->add_option("--n", cons_n, "matrix dimension")->required();
    cons->add_flag("--penta", cons_penta, "use the pentadiagonal construction (n >= 3)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    Tolerance tol{tol_eps};
    try {
        if (*check) {
            io::MatrixFile file = io::load_matrix_file(check_path, tol);
            if (check_round >= 0.0) round_band_zeros(file.matrix, check_round);
            const BandedSymMatrix& m = file.matrix;
            std::cout << "n: " << m.n << " ("
                      << (m.pentadiagonal() ? "pentadiagonal" : "tridiagonal") << ")\n";
            print_predicates(run_predicates(m, tol));
            print_spectrum(eigen_spectrum(m, tol));
            return 0;
        }
        if (*dec) {
            io::MatrixFile file = io::load_matrix_file(dec_path, tol);
            if (dec_round >= 0.0) round_band_zeros(file.matrix, dec_round);
            std::optional<std::vector<double>> init_vals;
            if (!dec_init.empty()) init_vals = dec_init;
            return run_decompose(dec_path, file, tol, dec_a0, init_vals, dec_search, dec_strict,
                                 dec_no_trim, dec_diagnose, dec_json);
        }
        if (*cert) {
            io::MatrixFile file = io::load_matrix_file(cert_matrix, tol);
            FactorMatrix factor = io::load_factor_file(cert_factor);
            Certificate c = certify_cp(file.matrix, factor, tol);
            print_certificate(c);
            return c.verdict == Verdict::CPCertified ? 0 : 2;
        }
        if (*cons) {
            BandedSymMatrix m = cons_penta ? construct_penta_with_eigenvalue(cons_lambda, cons_n)
                                           : construct_tridiag_with_eigenvalue(cons_lambda, cons_n);
            std::cout << io::emit_band_json(m) << "\n";
            return 0;
        }
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 1;
    } catch (const DimensionMismatch& e) {
        std::cerr << "dimension mismatch: " << e.what() << "\n";
        return 1;
    } catch (const OutOfRange& e) {
        std::cerr << "out of range: " << e.what() << "\n";
        return 1;
    } catch (const NotDoublyStochastic& e) {
        std::cerr << "not doubly stochastic: " << e.what() << "\n";
        return 1;
    } catch (const NoConvergence& e) {
        std::cerr << "no convergence: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
