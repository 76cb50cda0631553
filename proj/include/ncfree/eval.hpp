#pragma once

#include <unordered_map>

#include "linalg.hpp"
#include "series.hpp"
#include "word.hpp"

namespace ncfree {

/// Word products X^w for one tuple, memoized on prefixes.
class WordPowers {
public:
    explicit WordPowers(const MatrixTuple& x) : x_(x) {
        adj_.reserve(x.mats.size());
        for (const auto& m : x.mats) adj_.push_back(m.adjoint());
    }

    const Matrix& operator()(const Word& w) {
        auto it = cache_.find(w);
        if (it != cache_.end()) return it->second;
        Matrix value;
        if (w.empty()) {
            value = Matrix::Identity(x_.n, x_.n);
        } else {
            const Word prefix = w.slice(0, w.size() - 1);
            const Letter l = w[w.size() - 1];
            value = (*this)(prefix) * letter(l);
        }
        return cache_.emplace(w, std::move(value)).first->second;
    }

    const Matrix& letter(Letter l) const {
        require(l.var < x_.d(), ErrorKind::dimension_mismatch, "word uses a variable the tuple lacks");
        return l.starred ? adj_[static_cast<std::size_t>(l.var)] : x_.mats[static_cast<std::size_t>(l.var)];
    }

private:
    const MatrixTuple& x_;
    std::vector<Matrix> adj_;
    std::unordered_map<Word, Matrix, WordHash> cache_;
};

/// sum_alpha X^alpha (x) c_alpha: word product on the left tensor factor,
/// coefficient on the right. Result is (n rows) x (n cols).
inline Matrix eval_series(const NCSeries& s, const MatrixTuple& x) {
    require(s.d() == x.d(), ErrorKind::dimension_mismatch,
            "series has d=" + std::to_string(s.d()) + " but tuple has d=" + std::to_string(x.d()));
    const Eigen::Index n = x.n;
    Matrix out = Matrix::Zero(n * s.rows(), n * s.cols());
    WordPowers pw(x);
    for (const auto& [w, c] : s.terms()) {
        const Matrix& xw = pw(w);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) {
                const cd e = xw(i, j);
                if (e != cd(0.0)) out.block(i * s.rows(), j * s.cols(), s.rows(), s.cols()) += e * c;
            }
    }
    return out;
}

/// I_n (x) c, the constant c placed at level n.
inline Matrix lift_constant(const Matrix& c, int n) {
    return kron(Matrix::Identity(n, n), c);
}

/// X_i (x) I_k.
inline Matrix lift_variable(const Matrix& x, int k) {
    return kron(x, Matrix::Identity(k, k));
}

/// Permutation P with P (A (x) B) P^T = B (x) A for A n x n, B k x k; used to
/// compare direct sums across the tensor layout.
inline Matrix shuffle_permutation(int n, int k) {
    Matrix p = Matrix::Zero(n * k, n * k);
    for (int i = 0; i < n; ++i)
        for (int a = 0; a < k; ++a) p(a * n + i, i * k + a) = 1.0;
    return p;
}

}  // namespace ncfree
