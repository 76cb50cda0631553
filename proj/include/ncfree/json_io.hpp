#pragma once
// JSON file formats. Complex numbers are [re, im] (plain numbers are accepted
// on input), matrices are arrays of rows.

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "error.hpp"
#include "expr.hpp"
#include "linalg.hpp"
#include "realization.hpp"
#include "series.hpp"
#include "word.hpp"

namespace ncfree {

using json = nlohmann::ordered_json;

inline json to_json(cd c) { return json::array({c.real(), c.imag()}); }

inline cd complex_from_json(const json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    if (j.is_string()) {
        const ExprPtr e = parse(j.get<std::string>());
        if (variable_count(*e) == 0 && coefficient_size(*e) == 1) return eval_expr(*e, MatrixTuple(1, {}), 1)(0, 0);
    }
    fail(ErrorKind::invalid_input, "expected a complex number, got " + j.dump());
}

inline json to_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

/// Rows of entries; a bare number is a 1x1 matrix. `cols` fixes the width of
/// an empty row list.
inline Matrix matrix_from_json(const json& j, Eigen::Index cols = 0) {
    if (j.is_number() || (j.is_array() && j.size() == 2 && j[0].is_number())) {
        Matrix m(1, 1);
        m(0, 0) = complex_from_json(j);
        return m;
    }
    require(j.is_array(), ErrorKind::invalid_input, "matrix must be an array of rows");
    if (j.empty()) return Matrix(0, cols);
    Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(j[0].size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        require(j[i].is_array() && j[i].size() == static_cast<std::size_t>(m.cols()), ErrorKind::invalid_input,
                "matrix rows must have equal length");
        for (std::size_t c = 0; c < j[i].size(); ++c)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = complex_from_json(j[i][c]);
    }
    return m;
}

inline json to_json(const MatrixTuple& t) {
    json mats = json::array();
    for (const auto& m : t.mats) mats.push_back(to_json(m));
    return json{{"n", t.n}, {"mats", mats}};
}

/// {"mats": [...]} or a bare list of matrices.
inline MatrixTuple tuple_from_json(const json& j) {
    const json& mats = j.is_object() ? j.at("mats") : j;
    require(mats.is_array() && !mats.empty(), ErrorKind::invalid_input, "a point needs at least one matrix");
    std::vector<Matrix> m;
    for (const auto& x : mats) m.push_back(matrix_from_json(x));
    const int n = static_cast<int>(m.front().rows());
    return MatrixTuple(n, std::move(m));
}

inline json to_json(const NCSeries& s) {
    json terms = json::array();
    for (const auto& [w, c] : s.terms()) terms.push_back(json{{"word", format_word(w)}, {"coeff", to_json(c)}});
    return json{{"d", s.d()}, {"rows", s.rows()}, {"cols", s.cols()}, {"maxdeg", s.maxdeg()}, {"terms", terms}};
}

/// Either explicit terms or {"expr": "...", "maxdeg": m[, "d": d]}.
inline NCSeries series_from_json(const json& j) {
    require(j.is_object(), ErrorKind::invalid_input, "series must be a JSON object");
    if (j.contains("expr")) {
        const ExprPtr e = parse(j.at("expr").get<std::string>());
        const int maxdeg = j.at("maxdeg").get<int>();
        const int d = j.value("d", std::max(variable_count(*e), 1));
        return expand(*e, maxdeg, d, coefficient_size(*e));
    }
    const int d = j.at("d").get<int>();
    const int maxdeg = j.at("maxdeg").get<int>();
    const int rows = j.contains("rows") ? j.at("rows").get<int>() : j.value("k", 1);
    const int cols = j.value("cols", rows);
    NCSeries s(d, rows, cols, maxdeg);
    for (const auto& t : j.at("terms")) {
        const Word w = parse_word(t.at("word").get<std::string>());
        require(w.max_var() < d, ErrorKind::invalid_input, "word " + format_word(w) + " uses a variable beyond d");
        const Matrix c = matrix_from_json(t.at("coeff"), cols);
        require(c.rows() == rows && c.cols() == cols, ErrorKind::dimension_mismatch,
                "coefficient of " + format_word(w) + " has the wrong shape");
        s.add_term(w, c);
    }
    return s;
}

inline json to_json(const MiddleMatrix& m) {
    json words = json::array();
    for (const auto& w : m.words) words.push_back(format_word(w));
    return json{{"kind", std::string(to_string(m.kind))},
                {"mode", m.mode == IndexMode::analytic ? "analytic" : "full"},
                {"N", m.N},
                {"k", m.k},
                {"words", words},
                {"asymmetry", m.asymmetry},
                {"gram", to_json(m.gram)}};
}

inline MiddleMatrix middle_from_json(const json& j) {
    MiddleMatrix m;
    m.kind = j.at("kind").get<std::string>() == "plus" ? MiddleKind::plus : MiddleKind::minus;
    m.mode = j.at("mode").get<std::string>() == "analytic" ? IndexMode::analytic : IndexMode::full;
    m.N = j.at("N").get<int>();
    m.k = j.at("k").get<int>();
    for (const auto& w : j.at("words")) m.words.push_back(parse_word(w.get<std::string>()));
    m.asymmetry = j.value("asymmetry", 0.0);
    m.gram = matrix_from_json(j.at("gram"));
    return m;
}

inline json to_json(const Realization& r) {
    json center = json::array();
    for (cd c : r.center) center.push_back(to_json(c));
    json out{{"d", r.d},         {"k", r.k},           {"N", r.N},
             {"maxdeg", r.maxdeg}, {"center", center},  {"growth", r.growth},
             {"g", to_json(r.g)},  {"vplus", to_json(r.vplus)}, {"vminus", to_json(r.vminus)},
             {"T", to_json(r.T)}};
    if (r.gns) {
        const GnsData& g = *r.gns;
        out["gns"] = json{{"null_cutoff", g.null_cutoff},
                          {"rank_plus", g.rank_plus},
                          {"rank_minus", g.rank_minus},
                          {"min_eig_plus", g.min_eig_plus},
                          {"min_eig_minus", g.min_eig_minus},
                          {"dropped_entries", g.dropped_entries},
                          {"gram_plus", to_json(g.plus)},
                          {"gram_minus", to_json(g.minus)}};
    }
    return out;
}

inline Realization realization_from_json(const json& j) {
    Realization r;
    r.d = j.at("d").get<int>();
    r.k = j.at("k").get<int>();
    r.N = j.at("N").get<int>();
    r.maxdeg = j.at("maxdeg").get<int>();
    for (const auto& c : j.at("center")) r.center.push_back(complex_from_json(c));
    require(static_cast<int>(r.center.size()) == r.d, ErrorKind::invalid_input, "center must have d entries");
    r.growth = j.value("growth", 0.0);
    r.g = series_from_json(j.at("g"));
    r.vplus = series_from_json(j.at("vplus"));
    r.vminus = series_from_json(j.at("vminus"));
    r.T = series_from_json(j.at("T"));
    require(r.T.rows() == r.vplus.rows() && r.T.cols() == r.vminus.rows() && r.vplus.cols() == r.k &&
                r.vminus.cols() == r.k && r.g.rows() == r.k,
            ErrorKind::dimension_mismatch, "realization blocks have inconsistent shapes");
    if (j.contains("gns")) {
        const json& g = j.at("gns");
        GnsData d;
        d.null_cutoff = g.at("null_cutoff").get<double>();
        d.rank_plus = g.at("rank_plus").get<int>();
        d.rank_minus = g.at("rank_minus").get<int>();
        d.min_eig_plus = g.at("min_eig_plus").get<double>();
        d.min_eig_minus = g.at("min_eig_minus").get<double>();
        d.dropped_entries = g.value("dropped_entries", 0);
        d.plus = middle_from_json(g.at("gram_plus"));
        d.minus = middle_from_json(g.at("gram_minus"));
        r.gns = std::move(d);
    }
    return r;
}

/// A continuation path: {"steps": [{"w": [c, ...]} | {"W": point}, ...]} with
/// optional per-step "tol", "grid" overrides.
struct PathStep {
    std::vector<cd> w;
    std::optional<double> tol;
    std::optional<int> grid;
};

inline std::vector<PathStep> path_from_json(const json& j) {
    const json& steps = j.is_object() ? j.at("steps") : j;
    require(steps.is_array(), ErrorKind::invalid_input, "path must list its steps");
    std::vector<PathStep> out;
    for (const auto& s : steps) {
        PathStep p;
        if (s.is_object() && s.contains("W")) {
            const MatrixTuple w = tuple_from_json(s.at("W"));
            for (const auto& m : w.mats) {
                const cd c = m(0, 0);
                require((m - c * Matrix::Identity(m.rows(), m.cols())).norm() <= 1e-14 * std::max(1.0, std::abs(c)),
                        ErrorKind::precondition_violated, "series continuation needs scalar centers (W_i = w_i I)");
                p.w.push_back(c);
            }
        } else {
            const json& w = s.is_object() ? s.at("w") : s;
            for (const auto& c : w) p.w.push_back(complex_from_json(c));
        }
        if (s.is_object() && s.contains("tol")) p.tol = s.at("tol").get<double>();
        if (s.is_object() && s.contains("grid")) p.grid = s.at("grid").get<int>();
        out.push_back(std::move(p));
    }
    return out;
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::invalid_input, "cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

inline json read_json_file(const std::string& path) {
    const std::string text = read_text_file(path);
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        fail(ErrorKind::parse_error, path + ": " + e.what());
    }
}

/// An expression file is either a JSON object with "expr" or the raw text.
inline ExprPtr read_expr_file(const std::string& path) {
    const std::string text = read_text_file(path);
    const json j = json::parse(text, nullptr, false);
    if (!j.is_discarded() && j.is_object() && j.contains("expr")) return parse(j.at("expr").get<std::string>());
    return parse(text);
}

}  // namespace ncfree
