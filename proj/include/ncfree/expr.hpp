#pragma once

#include <cctype>
#include <charconv>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"
#include "eval.hpp"
#include "linalg.hpp"
#include "series.hpp"

namespace ncfree {

enum class ExprKind { Const, Var, Adjoint, Add, Sub, Mul, ScalarMul, Pow, Inv, Exp, Log, RealPart };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Immutable AST node. Const holds a 1x1 (scalar) or k x k matrix; Var a
/// 0-based index; ScalarMul a scalar and one child; Pow an exponent.
struct Expr {
    ExprKind kind = ExprKind::Const;
    Matrix value;
    int index = 0;
    int power = 0;
    cd scalar = 0.0;
    std::vector<ExprPtr> kids;

    bool is_scalar_const() const { return kind == ExprKind::Const && value.rows() == 1 && value.cols() == 1; }
};

namespace ex {

inline ExprPtr make(ExprKind kind, std::vector<ExprPtr> kids = {}) {
    auto e = std::make_shared<Expr>();
    e->kind = kind;
    e->kids = std::move(kids);
    return e;
}
inline ExprPtr constant(cd c) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Const;
    e->value = Matrix::Constant(1, 1, c);
    return e;
}
inline ExprPtr constant(const Matrix& m) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Const;
    e->value = m;
    return e;
}
inline ExprPtr var(int index) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Var;
    e->index = index;
    return e;
}
inline ExprPtr adjoint(ExprPtr a) { return make(ExprKind::Adjoint, {std::move(a)}); }
inline ExprPtr add(ExprPtr a, ExprPtr b) { return make(ExprKind::Add, {std::move(a), std::move(b)}); }
inline ExprPtr sub(ExprPtr a, ExprPtr b) { return make(ExprKind::Sub, {std::move(a), std::move(b)}); }
inline ExprPtr mul(ExprPtr a, ExprPtr b) { return make(ExprKind::Mul, {std::move(a), std::move(b)}); }
inline ExprPtr scale(cd s, ExprPtr a) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::ScalarMul;
    e->scalar = s;
    e->kids = {std::move(a)};
    return e;
}
inline ExprPtr pow(ExprPtr a, int n) {
    require(n >= 0, ErrorKind::invalid_input, "negative exponent");
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Pow;
    e->power = n;
    e->kids = {std::move(a)};
    return e;
}
inline ExprPtr inv(ExprPtr a) { return make(ExprKind::Inv, {std::move(a)}); }
inline ExprPtr exp(ExprPtr a) { return make(ExprKind::Exp, {std::move(a)}); }
inline ExprPtr log(ExprPtr a) { return make(ExprKind::Log, {std::move(a)}); }
inline ExprPtr re(ExprPtr a) { return make(ExprKind::RealPart, {std::move(a)}); }

}  // namespace ex

inline bool structurally_equal(const Expr& a, const Expr& b) {
    if (a.kind != b.kind || a.kids.size() != b.kids.size()) return false;
    switch (a.kind) {
        case ExprKind::Const:
            if (a.value.rows() != b.value.rows() || a.value.cols() != b.value.cols() || a.value != b.value)
                return false;
            break;
        case ExprKind::Var: if (a.index != b.index) return false; break;
        case ExprKind::Pow: if (a.power != b.power) return false; break;
        case ExprKind::ScalarMul: if (a.scalar != b.scalar) return false; break;
        default: break;
    }
    for (std::size_t i = 0; i < a.kids.size(); ++i)
        if (!structurally_equal(*a.kids[i], *b.kids[i])) return false;
    return true;
}

/// Number of variables referenced (max index + 1).
inline int variable_count(const Expr& e) {
    int m = e.kind == ExprKind::Var ? e.index + 1 : 0;
    for (const auto& k : e.kids) m = std::max(m, variable_count(*k));
    return m;
}

/// Coefficient size implied by matrix constants (1 if none). Mixed sizes throw.
inline int coefficient_size(const Expr& e) {
    int k = 1;
    if (e.kind == ExprKind::Const && !e.is_scalar_const()) {
        require(e.value.rows() == e.value.cols(), ErrorKind::dimension_mismatch,
                "matrix constants must be square");
        k = static_cast<int>(e.value.rows());
    }
    for (const auto& c : e.kids) {
        const int kc = coefficient_size(*c);
        if (kc == 1) continue;
        require(k == 1 || k == kc, ErrorKind::dimension_mismatch, "matrix constants of different sizes");
        k = kc;
    }
    return k;
}

inline bool has_adjoint(const Expr& e) {
    if (e.kind == ExprKind::Adjoint || e.kind == ExprKind::RealPart) return true;
    for (const auto& k : e.kids)
        if (has_adjoint(*k)) return true;
    return false;
}

// ---- printing --------------------------------------------------------------------

inline std::string format_real(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

/// Complex literal in a form the parser reads back as a single constant.
inline std::string format_complex(cd c) {
    const double re = c.real(), im = c.imag();
    if (im == 0.0) return re < 0 || std::signbit(re) ? "(" + format_real(re) + ")" : format_real(re);
    if (re == 0.0 && !std::signbit(re)) {
        return im < 0 ? "(" + format_real(im) + "i)" : format_real(im) + "i";
    }
    std::string s = "(" + format_real(re);
    s += im < 0 ? "-" : "+";
    s += format_real(std::abs(im)) + "i)";
    return s;
}

inline std::string to_string(const Expr& e) {
    auto wrap = [](const ExprPtr& k) { return "(" + to_string(*k) + ")"; };
    switch (e.kind) {
        case ExprKind::Const: {
            if (e.is_scalar_const()) return format_complex(e.value(0, 0));
            std::string s = "[";
            for (Eigen::Index i = 0; i < e.value.rows(); ++i) {
                s += i ? ", [" : "[";
                for (Eigen::Index j = 0; j < e.value.cols(); ++j) {
                    if (j) s += ", ";
                    s += format_complex(e.value(i, j));
                }
                s += "]";
            }
            return s + "]";
        }
        case ExprKind::Var: return "x" + std::to_string(e.index + 1);
        case ExprKind::Adjoint: return wrap(e.kids[0]) + "'";
        case ExprKind::Add: return wrap(e.kids[0]) + " + " + wrap(e.kids[1]);
        case ExprKind::Sub: return wrap(e.kids[0]) + " - " + wrap(e.kids[1]);
        case ExprKind::Mul: return wrap(e.kids[0]) + " " + wrap(e.kids[1]);
        case ExprKind::ScalarMul: return "(" + format_complex(e.scalar) + ") * " + wrap(e.kids[0]);
        case ExprKind::Pow: return wrap(e.kids[0]) + "^" + std::to_string(e.power);
        case ExprKind::Inv: return "inv" + wrap(e.kids[0]);
        case ExprKind::Exp: return "exp" + wrap(e.kids[0]);
        case ExprKind::Log: return "log" + wrap(e.kids[0]);
        case ExprKind::RealPart: return "re" + wrap(e.kids[0]);
    }
    return "?";
}

// ---- parsing ---------------------------------------------------------------------

namespace detail {

class Parser {
public:
    explicit Parser(std::string_view text) : s_(text) {}

    ExprPtr parse_all() {
        ExprPtr e = expr();
        skip();
        if (pos_ != s_.size()) error("unexpected '" + std::string(1, s_[pos_]) + "'");
        return e;
    }

private:
    std::string_view s_;
    std::size_t pos_ = 0;

    [[noreturn]] void error(const std::string& msg) const {
        throw Error(ErrorKind::parse_error, msg + " at position " + std::to_string(pos_), pos_);
    }
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    char peek() {
        skip();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }
    bool accept(char c) {
        if (peek() == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!accept(c)) error(std::string("expected '") + c + "'");
    }
    static bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

    ExprPtr expr() {
        ExprPtr e;
        if (accept('-')) e = ex::scale(-1.0, term());
        else e = term();
        while (true) {
            if (accept('+')) e = ex::add(e, term());
            else if (accept('-')) e = ex::sub(e, term());
            else return e;
        }
    }

    bool starts_atom() {
        const char c = peek();
        return std::isalpha(static_cast<unsigned char>(c)) || std::isdigit(static_cast<unsigned char>(c)) ||
               c == '.' || c == '(' || c == '[';
    }

    ExprPtr term() {
        ExprPtr e = factor();
        while (true) {
            if (accept('*')) {
                ExprPtr r = factor();
                e = e->is_scalar_const() ? ex::scale(e->value(0, 0), r) : ex::mul(e, r);
            } else if (accept('/')) {
                ExprPtr r = factor();
                if (!r->is_scalar_const()) error("only division by a scalar constant is supported");
                if (r->value(0, 0) == cd(0.0)) error("division by zero");
                e = ex::scale(cd(1.0) / r->value(0, 0), e);
            } else if (starts_atom()) {
                e = ex::mul(e, factor());
            } else {
                return e;
            }
        }
    }

    ExprPtr factor() {
        ExprPtr e = atom();
        while (true) {
            if (accept('^')) {
                skip();
                const std::size_t start = pos_;
                while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
                if (start == pos_) error("expected a nonnegative integer exponent");
                e = ex::pow(e, std::stoi(std::string(s_.substr(start, pos_ - start))));
            } else if (accept('\'')) {
                e = ex::adjoint(e);
            } else {
                return e;
            }
        }
    }

    std::optional<double> number() {
        skip();
        const std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
        if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E') && pos_ > start) {
            std::size_t q = pos_ + 1;
            if (q < s_.size() && (s_[q] == '+' || s_[q] == '-')) ++q;
            if (q < s_.size() && std::isdigit(static_cast<unsigned char>(s_[q]))) {
                pos_ = q;
                while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            }
        }
        if (start == pos_) return std::nullopt;
        double v = 0.0;
        auto res = std::from_chars(s_.data() + start, s_.data() + pos_, v);
        if (res.ec != std::errc() || res.ptr != s_.data() + pos_) {
            pos_ = start;
            error("malformed number");
        }
        return v;
    }

    /// Imaginary-unit suffix directly after a number ("2.5i"), not the start of a word.
    bool imaginary_suffix() {
        if (pos_ < s_.size() && s_[pos_] == 'i' && (pos_ + 1 >= s_.size() || !ident_char(s_[pos_ + 1]))) {
            ++pos_;
            return true;
        }
        return false;
    }

    /// Signed real or imaginary number: "-2", "3.5i", "i", "-i".
    std::optional<cd> signed_part(bool allow_sign) {
        const std::size_t save = pos_;
        double sign = 1.0;
        if (allow_sign) {
            if (accept('-')) sign = -1.0;
            else if (accept('+')) sign = 1.0;
        }
        skip();
        if (auto v = number()) {
            if (imaginary_suffix()) return cd(0.0, sign * *v);
            return cd(sign * *v, 0.0);
        }
        if (imaginary_suffix()) return cd(0.0, sign);
        pos_ = save;
        return std::nullopt;
    }

    /// "(re)", "(im i)", "(re +- im i)" read as one constant; backtracks on failure.
    std::optional<cd> paren_complex() {
        const std::size_t save = pos_;
        if (!accept('(')) return std::nullopt;
        auto first = signed_part(true);
        if (first) {
            if (accept(')')) return *first;
            if (first->imag() == 0.0) {
                const char c = peek();
                if (c == '+' || c == '-') {
                    auto second = signed_part(true);
                    if (second && second->real() == 0.0 && second->imag() != 0.0 && accept(')'))
                        return *first + *second;
                    // "(1 + 0i)" is also fine
                    if (second && second->real() == 0.0 && accept(')')) return *first + *second;
                }
            }
        }
        pos_ = save;
        return std::nullopt;
    }

    cd matrix_entry() {
        if (auto c = paren_complex()) return *c;
        if (auto c = signed_part(true)) return *c;
        error("expected a complex matrix entry");
    }

    ExprPtr matrix_literal() {
        expect('[');
        std::vector<std::vector<cd>> rows;
        do {
            expect('[');
            std::vector<cd> row;
            do row.push_back(matrix_entry());
            while (accept(','));
            expect(']');
            rows.push_back(std::move(row));
        } while (accept(','));
        expect(']');
        const std::size_t cols = rows[0].size();
        for (const auto& r : rows)
            if (r.size() != cols) error("ragged matrix literal");
        Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
        for (std::size_t i = 0; i < rows.size(); ++i)
            for (std::size_t j = 0; j < cols; ++j)
                m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        return ex::constant(m);
    }

    ExprPtr atom() {
        const char c = peek();
        if (c == '\0') error("unexpected end of input");
        if (c == '(') {
            if (auto z = paren_complex()) return ex::constant(*z);
            expect('(');
            ExprPtr e = expr();
            expect(')');
            return e;
        }
        if (c == '[') return matrix_literal();
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            auto z = signed_part(false);
            if (!z) error("malformed number");
            return ex::constant(*z);
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            const std::size_t start = pos_;
            while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            const std::string name(s_.substr(start, pos_ - start));
            if (name == "x" && pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
                const std::size_t ds = pos_;
                while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
                const int idx = std::stoi(std::string(s_.substr(ds, pos_ - ds)));
                if (idx < 1 || idx > max_variables) {
                    pos_ = ds;
                    error("variable index out of range");
                }
                return ex::var(idx - 1);
            }
            if (name == "i" && (pos_ >= s_.size() || !ident_char(s_[pos_]))) return ex::constant(cd(0.0, 1.0));
            ExprKind fn;
            if (name == "inv") fn = ExprKind::Inv;
            else if (name == "exp") fn = ExprKind::Exp;
            else if (name == "log") fn = ExprKind::Log;
            else if (name == "re") fn = ExprKind::RealPart;
            else {
                while (pos_ < s_.size() && ident_char(s_[pos_])) ++pos_;
                throw Error(ErrorKind::unknown_identifier,
                            "unknown identifier '" + std::string(s_.substr(start, pos_ - start)) +
                                "' at position " + std::to_string(start),
                            start);
            }
            expect('(');
            ExprPtr arg = expr();
            expect(')');
            return ex::make(fn, {arg});
        }
        error("unexpected '" + std::string(1, c) + "'");
    }
};

}  // namespace detail

/// Parses the expression grammar: juxtaposition multiplies, postfix ' is the
/// adjoint, ^n powers, inv/exp/log/re are functions, x1..xd are variables.
inline ExprPtr parse(std::string_view text) { return detail::Parser(text).parse_all(); }

// ---- expansion ---------------------------------------------------------------------

/// Power series of e through degree maxdeg, over d variables with k x k coefficients.
inline NCSeries expand(const Expr& e, int maxdeg, int d, int k) {
    auto rec = [&](const Expr& x) { return expand(x, maxdeg, d, k); };
    switch (e.kind) {
        case ExprKind::Const: {
            if (e.is_scalar_const()) return NCSeries::scalar(d, k, e.value(0, 0), maxdeg);
            require(e.value.rows() == k && e.value.cols() == k, ErrorKind::dimension_mismatch,
                    "matrix constant does not match coefficient size");
            return NCSeries::constant(d, e.value, maxdeg);
        }
        case ExprKind::Var:
            require(e.index < d, ErrorKind::dimension_mismatch, "variable beyond declared count");
            return NCSeries::variable(d, k, e.index, false, maxdeg);
        case ExprKind::Adjoint: return series_adjoint(rec(*e.kids[0]));
        case ExprKind::Add: return rec(*e.kids[0]) + rec(*e.kids[1]);
        case ExprKind::Sub: return rec(*e.kids[0]) + scalar_mul(-1.0, rec(*e.kids[1]));
        case ExprKind::Mul: return rec(*e.kids[0]) * rec(*e.kids[1]);
        case ExprKind::ScalarMul: return scalar_mul(e.scalar, rec(*e.kids[0]));
        case ExprKind::Pow: return series_pow(rec(*e.kids[0]), e.power);
        case ExprKind::Inv: return neumann_inverse(rec(*e.kids[0]));
        case ExprKind::Exp: return series_exp(rec(*e.kids[0]));
        case ExprKind::Log: return series_log(rec(*e.kids[0]));
        case ExprKind::RealPart: return real_part(rec(*e.kids[0]));
    }
    fail(ErrorKind::invalid_input, "unknown node");
}

inline NCSeries expand(const Expr& e, int maxdeg) {
    return expand(e, maxdeg, std::max(variable_count(e), 1), coefficient_size(e));
}

// ---- pointwise evaluation ------------------------------------------------------------

/// Evaluates e at X with coefficients of size k: the result is nk x nk.
inline Matrix eval_expr(const Expr& e, const MatrixTuple& x, int k) {
    const int n = x.n;
    auto rec = [&](const Expr& c) { return eval_expr(c, x, k); };
    switch (e.kind) {
        case ExprKind::Const:
            if (e.is_scalar_const()) return e.value(0, 0) * Matrix::Identity(n * k, n * k);
            require(e.value.rows() == k && e.value.cols() == k, ErrorKind::dimension_mismatch,
                    "matrix constant does not match coefficient size");
            return lift_constant(e.value, n);
        case ExprKind::Var:
            require(e.index < x.d(), ErrorKind::dimension_mismatch,
                    "expression uses x" + std::to_string(e.index + 1) + " but the point has d=" +
                        std::to_string(x.d()));
            return lift_variable(x.mats[static_cast<std::size_t>(e.index)], k);
        case ExprKind::Adjoint: return rec(*e.kids[0]).adjoint();
        case ExprKind::Add: return rec(*e.kids[0]) + rec(*e.kids[1]);
        case ExprKind::Sub: return rec(*e.kids[0]) - rec(*e.kids[1]);
        case ExprKind::Mul: return rec(*e.kids[0]) * rec(*e.kids[1]);
        case ExprKind::ScalarMul: return e.scalar * rec(*e.kids[0]);
        case ExprKind::Pow: {
            const Matrix b = rec(*e.kids[0]);
            Matrix out = Matrix::Identity(b.rows(), b.cols());
            for (int i = 0; i < e.power; ++i) out = out * b;
            return out;
        }
        case ExprKind::Inv: return checked_inverse(rec(*e.kids[0]));
        case ExprKind::Exp: return matrix_exp(rec(*e.kids[0]));
        case ExprKind::Log: return principal_log(rec(*e.kids[0]));
        case ExprKind::RealPart: {
            const Matrix m = rec(*e.kids[0]);
            return (m + m.adjoint()) / 2.0;
        }
    }
    fail(ErrorKind::invalid_input, "unknown node");
}

inline Matrix eval_expr(const Expr& e, const MatrixTuple& x) { return eval_expr(e, x, coefficient_size(e)); }

}  // namespace ncfree
