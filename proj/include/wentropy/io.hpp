#pragma once

// File formats shared by the CLI: JSON Gaussian / pmf descriptions and CSV
// data and draw files.

#include <cctype>
#include <charconv>
#include <fstream>
#include <iosfwd>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "discrete.hpp"
#include "error.hpp"
#include "gaussian.hpp"
#include "numeric_utils.hpp"
#include "wdic.hpp"

namespace wentropy::io {

using json = nlohmann::json;

inline std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline json parse_json(const std::string& text, const std::string& source) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ParseError, source + ": " + e.what());
    }
}

namespace detail {

inline std::vector<double> number_array(const json& j, const std::string& what) {
    if (!j.is_array()) throw Error(ErrorCode::ParseError, what + " must be an array");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number())
            throw Error(ErrorCode::ParseError, what + "[" + std::to_string(i) + "] is not a number");
        out.push_back(j[i].get<double>());
    }
    return out;
}

inline const json& field(const json& j, const char* key, const std::string& source) {
    if (!j.is_object() || !j.contains(key))
        throw Error(ErrorCode::ParseError, source + ": missing \"" + key + "\"");
    return j.at(key);
}

}  // namespace detail

/// {"mean": [...], "cov": [[...], ...]}
inline GaussianDist gaussian_from_json(const json& j, const std::string& source = "input") {
    const std::vector<double> mean = detail::number_array(detail::field(j, "mean", source), "mean");
    const json& rows = detail::field(j, "cov", source);
    if (!rows.is_array()) throw Error(ErrorCode::ParseError, source + ": cov must be an array");
    const auto n = static_cast<Eigen::Index>(rows.size());
    Matrix cov(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const std::vector<double> row =
            detail::number_array(rows[static_cast<std::size_t>(i)], "cov[" + std::to_string(i) + "]");
        if (static_cast<Eigen::Index>(row.size()) != n)
            throw Error(ErrorCode::DimensionMismatch,
                        source + ": cov row " + std::to_string(i) + " has " +
                            std::to_string(row.size()) + " entries, expected " + std::to_string(n));
        for (Eigen::Index k = 0; k < n; ++k) cov(i, k) = row[static_cast<std::size_t>(k)];
    }
    Vector mu = Eigen::Map<const Vector>(mean.data(), static_cast<Eigen::Index>(mean.size()));
    return GaussianDist(mu, cov);
}

inline GaussianDist load_gaussian(const std::string& path) {
    return gaussian_from_json(parse_json(read_text(path), path), path);
}

inline json gaussian_to_json(const GaussianDist& d) {
    json cov = json::array();
    for (Eigen::Index i = 0; i < d.cov().rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < d.cov().cols(); ++k) row.push_back(d.cov()(i, k));
        cov.push_back(row);
    }
    json mean = json::array();
    for (Eigen::Index i = 0; i < d.mean().size(); ++i) mean.push_back(d.mean()(i));
    return json{{"mean", mean}, {"cov", cov}};
}

/// {"dims": [...], "support": [[...], ...], "probs": [row-major]}; support
/// is optional and defaults to 0..k-1 per axis.
inline discrete::DiscreteJoint discrete_from_json(const json& j, const std::string& source = "input") {
    const json& dj = detail::field(j, "dims", source);
    if (!dj.is_array()) throw Error(ErrorCode::ParseError, source + ": dims must be an array");
    std::vector<std::size_t> dims;
    for (const json& d : dj) {
        if (!d.is_number_unsigned())
            throw Error(ErrorCode::ParseError, source + ": dims entries must be positive integers");
        dims.push_back(d.get<std::size_t>());
    }
    std::vector<double> probs = detail::number_array(detail::field(j, "probs", source), "probs");
    if (!j.contains("support")) return discrete::DiscreteJoint::with_default_labels(dims, probs);
    const json& sj = j.at("support");
    if (!sj.is_array()) throw Error(ErrorCode::ParseError, source + ": support must be an array");
    std::vector<std::vector<double>> support;
    for (std::size_t k = 0; k < sj.size(); ++k)
        support.push_back(detail::number_array(sj[k], "support[" + std::to_string(k) + "]"));
    return discrete::DiscreteJoint(dims, support, probs);
}

// CSV

namespace detail {

inline std::string trim(std::string_view s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return std::string(s.substr(a, b - a));
}

inline std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, sep)) out.push_back(trim(cell));
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

inline double parse_real(const std::string& s, const std::string& where) {
    double v = 0.0;
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (s.empty() || ec != std::errc() || ptr != end || !std::isfinite(v))
        throw Error(ErrorCode::ParseError, where + ": \"" + s + "\" is not a finite number");
    return v;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    std::vector<std::size_t> line_numbers;
};

/// Comma-separated numbers under a header row; blank lines and lines
/// starting with '#' are skipped.
inline CsvTable read_csv(std::istream& in, const std::string& source) {
    CsvTable t;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        std::vector<std::string> cells = split(s, ',');
        if (t.header.empty()) {
            t.header = std::move(cells);
            continue;
        }
        if (cells.size() != t.header.size())
            throw Error(ErrorCode::ParseError,
                        source + ": row " + std::to_string(lineno) + " has " +
                            std::to_string(cells.size()) + " columns, header has " +
                            std::to_string(t.header.size()));
        std::vector<double> row;
        for (std::size_t c = 0; c < cells.size(); ++c)
            row.push_back(parse_real(cells[c], source + ": row " + std::to_string(lineno) +
                                                   ", column " + std::to_string(c + 1) + " (" +
                                                   t.header[c] + ")"));
        t.rows.push_back(std::move(row));
        t.line_numbers.push_back(lineno);
    }
    if (t.header.empty()) throw Error(ErrorCode::ParseError, source + ": missing header row");
    return t;
}

inline void expect_columns(const CsvTable& t, const std::string& prefix, std::size_t count,
                           const std::string& source) {
    for (std::size_t c = 0; c < count; ++c) {
        const std::string want = prefix + std::to_string(c + 1);
        if (t.header[c] != want)
            throw Error(ErrorCode::ParseError, source + ": column " + std::to_string(c + 1) +
                                                   " is \"" + t.header[c] + "\", expected \"" +
                                                   want + "\"");
    }
}

}  // namespace detail

/// Columns y_1..y_d, weight.
inline wdic::WeightedDataset read_dataset(std::istream& in, const std::string& source) {
    const detail::CsvTable t = detail::read_csv(in, source);
    if (t.header.size() < 2 || t.header.back() != "weight")
        throw Error(ErrorCode::ParseError, source + ": expected columns y_1..y_d,weight");
    const std::size_t d = t.header.size() - 1;
    detail::expect_columns(t, "y_", d, source);
    wdic::WeightedDataset data;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const double w = t.rows[r][d];
        if (w < 0.0)
            throw Error(ErrorCode::ParseError, source + ": row " + std::to_string(t.line_numbers[r]) +
                                                   ", column " + std::to_string(d + 1) +
                                                   " (weight) is negative");
        data.observations.emplace_back(t.rows[r].begin(), t.rows[r].begin() + static_cast<long>(d));
        data.weights.push_back(w);
    }
    if (data.size() == 0) throw Error(ErrorCode::ParseError, source + ": no data rows");
    return data;
}

inline wdic::WeightedDataset load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
    return read_dataset(in, path);
}

inline void write_dataset(std::ostream& out, const wdic::WeightedDataset& data) {
    const std::size_t d = data.size() ? data.observations[0].size() : 1;
    for (std::size_t k = 0; k < d; ++k) out << "y_" << k + 1 << ',';
    out << "weight\n";
    for (std::size_t i = 0; i < data.size(); ++i) {
        for (double y : data.observations[i]) out << format_real(y) << ',';
        out << format_real(data.weights[i]) << '\n';
    }
}

inline constexpr std::size_t kMinFileDraws = 100;

/// Columns theta_1..theta_p.
inline wdic::PosteriorDraws read_draws(std::istream& in, const std::string& source) {
    const detail::CsvTable t = detail::read_csv(in, source);
    detail::expect_columns(t, "theta_", t.header.size(), source);
    wdic::PosteriorDraws draws;
    draws.draws = t.rows;
    draws.provenance = "file:" + source;
    if (draws.draws.size() < kMinFileDraws)
        throw Error(ErrorCode::ParseError, source + ": " + std::to_string(draws.draws.size()) +
                                               " draws, at least " +
                                               std::to_string(kMinFileDraws) + " required");
    return draws;
}

inline wdic::PosteriorDraws load_draws(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
    return read_draws(in, path);
}

inline void write_draws(std::ostream& out, const wdic::PosteriorDraws& draws) {
    const std::size_t p = draws.draws.empty() ? 1 : draws.draws[0].size();
    for (std::size_t k = 0; k < p; ++k) out << (k ? "," : "") << "theta_" << k + 1;
    out << '\n';
    for (const auto& t : draws.draws) {
        for (std::size_t k = 0; k < t.size(); ++k) out << (k ? "," : "") << format_real(t[k]);
        out << '\n';
    }
}

}  // namespace wentropy::io
