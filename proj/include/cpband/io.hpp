#pragma once

#include <cctype>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cpband/band_matrix.hpp"
#include "cpband/core.hpp"
#include "cpband/factor_matrix.hpp"

namespace cpband::io {

using nlohmann::json;

/// Parses an exact fraction string "p/q" to the nearest double after
/// integer reduction. Plain decimal strings are accepted too.
inline double parse_number_string(const std::string& raw, const std::string& where) {
    const auto slash = raw.find('/');
    if (slash == std::string::npos) {
        std::size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(raw, &pos);
        } catch (const std::exception&) {
            throw ParseError(where + ": cannot parse number '" + raw + "'");
        }
        while (pos < raw.size() && std::isspace(static_cast<unsigned char>(raw[pos]))) ++pos;
        if (pos != raw.size())
            throw ParseError(where + ": cannot parse number '" + raw + "'");
        return v;
    }
    auto parse_int = [&](const std::string& s) -> std::int64_t {
        std::int64_t v = 0;
        const char* first = s.data();
        const char* last = s.data() + s.size();
        auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc{} || ptr != last)
            throw ParseError(where + ": cannot parse fraction '" + raw + "'");
        return v;
    };
    std::int64_t p = parse_int(raw.substr(0, slash));
    std::int64_t q = parse_int(raw.substr(slash + 1));
    if (q == 0) throw ParseError(where + ": zero denominator in '" + raw + "'");
    if (q < 0) { p = -p; q = -q; }
    const std::int64_t g = std::gcd(p < 0 ? -p : p, q);
    if (g > 1) { p /= g; q /= g; }
    return static_cast<double>(p) / static_cast<double>(q);
}

/// Parsed matrix file. Raw tokens keep the original fraction spellings so
/// re-emission preserves them.
struct MatrixFile {
    enum class Format { BandJson, DenseCsv };
    Format format = Format::BandJson;
    BandedSymMatrix matrix;
    std::vector<std::string> a_raw, b_raw, c_raw;  // empty string where input was numeric
};

namespace detail {

inline std::pair<double, std::string> parse_json_number(const json& j, const std::string& where) {
    if (j.is_number()) return {j.get<double>(), std::string{}};
    if (j.is_string()) {
        const auto raw = j.get<std::string>();
        return {parse_number_string(raw, where), raw};
    }
    throw ParseError(where + ": expected a number or a fraction string");
}

inline void parse_json_array(const json& obj, const char* field, std::size_t expected,
                             std::vector<double>& values, std::vector<std::string>& raws) {
    if (!obj.contains(field))
        throw ParseError(std::string("field \"") + field + "\" is missing");
    const json& arr = obj.at(field);
    if (!arr.is_array())
        throw ParseError(std::string("field \"") + field + "\" must be an array");
    if (arr.size() != expected)
        throw ParseError(std::string("field \"") + field + "\": expected " +
                         std::to_string(expected) + " entries, got " + std::to_string(arr.size()));
    values.reserve(expected);
    raws.reserve(expected);
    for (std::size_t k = 0; k < arr.size(); ++k) {
        auto [v, raw] = parse_json_number(arr[k], std::string("field \"") + field + "\"[" +
                                                      std::to_string(k) + "]");
        values.push_back(v);
        raws.push_back(std::move(raw));
    }
}

} // namespace detail

inline MatrixFile parse_band_json(const std::string& text, Tolerance = {}) {
    json obj;
    try {
        obj = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object()) throw ParseError("band-json input must be an object");
    if (!obj.contains("n") || !obj.at("n").is_number_integer() || obj.at("n").get<long long>() < 1)
        throw ParseError("field \"n\" must be a positive integer");
    const std::size_t n = obj.at("n").get<std::size_t>();

    MatrixFile file;
    file.format = MatrixFile::Format::BandJson;
    std::vector<double> a, b;
    detail::parse_json_array(obj, "a", n, a, file.a_raw);
    detail::parse_json_array(obj, "b", n - 1, b, file.b_raw);
    std::optional<std::vector<double>> c;
    if (obj.contains("c")) {
        if (n < 3) throw ParseError("field \"c\" requires n >= 3");
        c.emplace();
        detail::parse_json_array(obj, "c", n - 2, *c, file.c_raw);
    }
    file.matrix = make_matrix(std::move(a), std::move(b), std::move(c));
    return file;
}

/// n x n comma-separated rows; must be symmetric within eps and banded with
/// bandwidth 2. Entries outside the band must be exactly zero — anything
/// else is rejected rather than silently truncated. The second band is kept
/// only when some |i-j| = 2 entry is nonzero.
inline MatrixFile parse_dense_csv(const std::string& text, Tolerance tol = {}) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        std::string trimmed = line;
        while (!trimmed.empty() && (trimmed.back() == '\r' || trimmed.back() == ' ')) trimmed.pop_back();
        if (trimmed.empty()) continue;
        std::vector<std::string> tokens;
        std::istringstream cells(trimmed);
        std::string cell;
        while (std::getline(cells, cell, ',')) {
            std::size_t first = cell.find_first_not_of(" \t");
            std::size_t last = cell.find_last_not_of(" \t");
            tokens.push_back(first == std::string::npos ? std::string{}
                                                        : cell.substr(first, last - first + 1));
        }
        rows.push_back(std::move(tokens));
    }
    const std::size_t n = rows.size();
    if (n == 0) throw ParseError("dense-csv input is empty");
    for (std::size_t i = 0; i < n; ++i)
        if (rows[i].size() != n)
            throw ParseError("row " + std::to_string(i + 1) + " has " +
                             std::to_string(rows[i].size()) + " entries, expected " +
                             std::to_string(n));

    std::vector<std::vector<double>> dense(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            dense[i][j] = parse_number_string(rows[i][j], "entry (" + std::to_string(i + 1) + "," +
                                                              std::to_string(j + 1) + ")");
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            if (std::abs(dense[i][j] - dense[j][i]) > tol.eps)
                throw ParseError("not symmetric within tolerance at (" + std::to_string(i + 1) +
                                 "," + std::to_string(j + 1) + ")");
            if (j - i > 2 && dense[i][j] != 0.0)
                throw ParseError("entry (" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                                 ") lies outside bandwidth 2 and is not zero");
        }

    MatrixFile file;
    file.format = MatrixFile::Format::DenseCsv;
    std::vector<double> a(n), b(n > 0 ? n - 1 : 0);
    file.a_raw.resize(n);
    file.b_raw.resize(n - 1);
    bool any_c = false;
    for (std::size_t i = 0; i + 2 < n; ++i) any_c = any_c || dense[i][i + 2] != 0.0;
    std::optional<std::vector<double>> c;
    if (any_c) {
        c.emplace(n - 2);
        file.c_raw.resize(n - 2);
    }
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = dense[i][i];
        file.a_raw[i] = rows[i][i].find('/') != std::string::npos ? rows[i][i] : std::string{};
        if (i + 1 < n) {
            b[i] = dense[i][i + 1];
            file.b_raw[i] = rows[i][i + 1].find('/') != std::string::npos ? rows[i][i + 1]
                                                                          : std::string{};
        }
        if (c && i + 2 < n) {
            (*c)[i] = dense[i][i + 2];
            file.c_raw[i] = rows[i][i + 2].find('/') != std::string::npos ? rows[i][i + 2]
                                                                          : std::string{};
        }
    }
    file.matrix = make_matrix(std::move(a), std::move(b), std::move(c));
    return file;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Band-json when the first non-space character is '{', dense-csv otherwise.
inline MatrixFile load_matrix_file(const std::string& path, Tolerance tol = {}) {
    const std::string text = read_file(path);
    for (char ch : text) {
        if (std::isspace(static_cast<unsigned char>(ch))) continue;
        return ch == '{' ? parse_band_json(text, tol) : parse_dense_csv(text, tol);
    }
    throw ParseError("file is empty: " + path);
}

namespace detail {

inline json band_array(const std::vector<double>& values, const std::vector<std::string>& raws) {
    json arr = json::array();
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (k < raws.size() && !raws[k].empty())
            arr.push_back(raws[k]);
        else
            arr.push_back(values[k]);
    }
    return arr;
}

} // namespace detail

/// Emits band-json, preserving fraction spellings from the source file.
inline std::string emit_band_json(const MatrixFile& file) {
    json obj;
    obj["n"] = file.matrix.n;
    obj["a"] = detail::band_array(file.matrix.diag, file.a_raw);
    obj["b"] = detail::band_array(file.matrix.off1, file.b_raw);
    if (file.matrix.off2) obj["c"] = detail::band_array(*file.matrix.off2, file.c_raw);
    return obj.dump(2);
}

inline std::string emit_band_json(const BandedSymMatrix& m) {
    MatrixFile file;
    file.matrix = m;
    return emit_band_json(file);
}

/// Factor files are band-json-like column lists:
///   {"n": N, "columns": [[...N numbers...], ...]}
inline FactorMatrix parse_factor_json(const std::string& text) {
    json obj;
    try {
        obj = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object() || !obj.contains("n") || !obj.contains("columns"))
        throw ParseError("factor file must be an object with \"n\" and \"columns\"");
    if (!obj.at("n").is_number_integer() || obj.at("n").get<long long>() < 1)
        throw ParseError("field \"n\" must be a positive integer");
    FactorMatrix f;
    f.n = obj.at("n").get<std::size_t>();
    const json& cols = obj.at("columns");
    if (!cols.is_array()) throw ParseError("field \"columns\" must be an array");
    for (std::size_t k = 0; k < cols.size(); ++k) {
        const json& col = cols[k];
        if (!col.is_array() || col.size() != f.n)
            throw ParseError("column " + std::to_string(k) + " must have " + std::to_string(f.n) +
                             " entries");
        std::vector<double> v(f.n);
        for (std::size_t j = 0; j < f.n; ++j)
            v[j] = detail::parse_json_number(col[j], "column " + std::to_string(k) + "[" +
                                                         std::to_string(j) + "]")
                       .first;
        f.columns.push_back(std::move(v));
    }
    return f;
}

inline FactorMatrix load_factor_file(const std::string& path) {
    return parse_factor_json(read_file(path));
}

inline std::string emit_factor_json(const FactorMatrix& f) {
    json obj;
    obj["n"] = f.n;
    json cols = json::array();
    for (const auto& col : f.columns) cols.push_back(col);
    obj["columns"] = cols;
    return obj.dump(2);
}

} // namespace cpband::io
