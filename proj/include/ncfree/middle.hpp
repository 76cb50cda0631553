#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "calculus.hpp"
#include "error.hpp"
#include "linalg.hpp"
#include "series.hpp"

namespace ncfree {

enum class MiddleKind { plus, minus };

/// Which words index the Gram matrix.
///  analytic: z_i alpha with alpha analytic (plus) / coanalytic (minus), the
///            certificate layout;
///  full:     every word whose first letter is unstarred (plus) / starred
///            (minus), the span the realization is built on.
enum class IndexMode { analytic, full };

inline std::string_view to_string(MiddleKind k) { return k == MiddleKind::plus ? "plus" : "minus"; }

struct MiddleMatrix {
    MiddleKind kind = MiddleKind::plus;
    IndexMode mode = IndexMode::analytic;
    int N = 0;
    int k = 1;
    std::vector<Word> words;  // graded-lex; index position = word_idx * k + b
    Matrix gram;              // symmetrized
    double asymmetry = 0.0;   // ||G - G^*|| before symmetrization

    std::size_t size() const { return words.size() * static_cast<std::size_t>(k); }
};

inline std::vector<Word> middle_index_words(int d, MiddleKind kind, int N, IndexMode mode) {
    const bool plus = kind == MiddleKind::plus;
    std::vector<Word> out;
    for (int L = 1; L <= N; ++L) {
        if (mode == IndexMode::analytic) {
            auto ws = words_of_length(d, L, plus, !plus);
            out.insert(out.end(), ws.begin(), ws.end());
        } else {
            for (auto& w : words_of_length(d, L, true, true))
                if (w[0].starred != plus) out.push_back(std::move(w));
        }
    }
    return out;
}

/// gram[(eta, a), (gamma, b)] = (c_{eta^* gamma})_{a b}. For plus,
/// eta = z_i alpha and gamma = z_j beta give c_{alpha^* z_i^* z_j beta}.
inline MiddleMatrix build_middle(const NCSeries& s, MiddleKind kind, int N,
                                 IndexMode mode = IndexMode::analytic) {
    require(N >= 1, ErrorKind::invalid_input, "N must be >= 1");
    require(s.square(), ErrorKind::dimension_mismatch, "middle matrices need square coefficients");
    if (2 * N > s.maxdeg())
        fail(ErrorKind::truncation_too_deep, "N=" + std::to_string(N) + " needs coefficients of length " +
                                                 std::to_string(2 * N) + " but maxdeg is " +
                                                 std::to_string(s.maxdeg()));
    MiddleMatrix m;
    m.kind = kind;
    m.mode = mode;
    m.N = N;
    m.k = s.k();
    m.words = middle_index_words(s.d(), kind, N, mode);
    const Eigen::Index k = m.k;
    const Eigen::Index size = static_cast<Eigen::Index>(m.words.size()) * k;
    Matrix g = Matrix::Zero(size, size);
    for (std::size_t p = 0; p < m.words.size(); ++p) {
        const Word left = m.words[p].adjoint();
        for (std::size_t q = 0; q < m.words.size(); ++q) {
            auto it = s.terms().find(left + m.words[q]);
            if (it == s.terms().end()) continue;
            g.block(static_cast<Eigen::Index>(p) * k, static_cast<Eigen::Index>(q) * k, k, k) = it->second;
        }
    }
    m.asymmetry = hermitian_asymmetry(g);
    m.gram = (g + g.adjoint()) / 2.0;
    return m;
}

struct WitnessEntry {
    Word word;
    Vector coeffs;  // length k
};

/// Negative direction of a middle matrix, decoded to the vector-valued
/// polynomial sum_eta x_eta z^eta.
struct MiddleWitness {
    MiddleKind kind = MiddleKind::plus;
    int N = 0;
    int k = 1;
    double min_eig = 0.0;
    std::vector<WitnessEntry> entries;
    Vector vector;  // raw eigenvector in the index layout
};

struct CertificateReport {
    int N = 0;
    double tol = 1e-9;
    PsdReport cplus;
    PsdReport cminus;
    double asymmetry_plus = 0.0;
    double asymmetry_minus = 0.0;
    std::optional<MiddleWitness> witness;

    bool psd() const { return cplus.psd && cminus.psd; }
};

inline MiddleWitness decode_witness(const MiddleMatrix& m, const PsdReport& rep) {
    MiddleWitness w;
    w.kind = m.kind;
    w.N = m.N;
    w.k = m.k;
    w.min_eig = rep.min_eigenvalue;
    w.vector = rep.witness;
    for (std::size_t p = 0; p < m.words.size(); ++p) {
        Vector c = rep.witness.segment(static_cast<Eigen::Index>(p) * m.k, m.k);
        if (c.norm() == 0.0) continue;
        w.entries.push_back({m.words[p], c});
    }
    return w;
}

/// PSD verdicts for C+ and C- at truncation N. A failing C+ is preferred for
/// the witness.
inline CertificateReport psh_certificate(const NCSeries& s, int N, double tol = 1e-9) {
    CertificateReport r;
    r.N = N;
    r.tol = tol;
    const MiddleMatrix plus = build_middle(s, MiddleKind::plus, N);
    const MiddleMatrix minus = build_middle(s, MiddleKind::minus, N);
    r.asymmetry_plus = plus.asymmetry;
    r.asymmetry_minus = minus.asymmetry;
    // tiny absolute floor so the exact zero matrix reads as PSD
    auto check = [&](const MiddleMatrix& m) {
        PsdReport rep = psd_check(m.gram, tol);
        if (!rep.psd && rep.min_eigenvalue >= -1e-300) rep.psd = true;
        return rep;
    };
    r.cplus = check(plus);
    r.cminus = check(minus);
    if (!r.cplus.psd) r.witness = decode_witness(plus, r.cplus);
    else if (!r.cminus.psd) r.witness = decode_witness(minus, r.cminus);
    return r;
}

/// The point and direction used to turn a middle-matrix witness into a
/// negative Hessian value: Fock-space creation operators of scale eps on
/// analytic words of length <= N (tensored with C^k), padded by one extra
/// dimension; `probe` is the vector whose quadratic form approximates
/// x^* C x.
struct WitnessPoint {
    PshSample sample;
    Vector probe;
    double eps = 0.0;
};

inline WitnessPoint witness_point(int d, const MiddleWitness& w, double eps) {
    const std::vector<Word> fock = analytic_words(d, 0, w.N);
    std::map<Word, Eigen::Index> pos;
    for (std::size_t i = 0; i < fock.size(); ++i) pos[fock[i]] = static_cast<Eigen::Index>(i);
    const Eigen::Index m = static_cast<Eigen::Index>(fock.size());
    const Eigen::Index k = w.k;
    const Eigen::Index n = m * k;

    // creation operators L_j e_u = e_{z_j u}, zero on the top level
    std::vector<Matrix> create(static_cast<std::size_t>(d), Matrix::Zero(m, m));
    for (const auto& u : fock) {
        if (static_cast<int>(u.size()) >= w.N) continue;
        for (int j = 0; j < d; ++j) create[static_cast<std::size_t>(j)](pos[Word::letter(j) + u], pos[u]) = 1.0;
    }
    const bool plus = w.kind == MiddleKind::plus;
    std::vector<Matrix> zs;
    for (int j = 0; j < d; ++j) {
        Matrix l = kron(create[static_cast<std::size_t>(j)], Matrix::Identity(k, k)) * eps;
        zs.push_back(plus ? l : Matrix(l.adjoint()));
    }

    Vector v = Vector::Zero(n);
    for (const auto& e : w.entries) {
        Word key = e.word;
        if (!plus)  // z_{p1}^* ... z_{pr}^* sits at e_{z_{p1} ... z_{pr}}
            for (std::size_t i = 0; i < key.size(); ++i) key.set(i, {key[i].var, false});
        const Eigen::Index base = pos.at(key) * k;
        const double scale = std::pow(eps, -static_cast<double>(e.word.size()));
        for (Eigen::Index b = 0; b < k; ++b) v(base + b) = std::conj(e.coeffs(b)) * scale;
    }

    WitnessPoint out;
    out.eps = eps;
    std::vector<Matrix> zt, ht;
    for (int j = 0; j < d; ++j) {
        const Matrix& zj = zs[static_cast<std::size_t>(j)];
        Matrix big = Matrix::Zero(n + 1, n + 1);
        big.topLeftCorner(n, n) = zj;
        zt.push_back(big);
        Matrix h = Matrix::Zero(n + 1, n + 1);
        if (plus) h.block(n, 0, 1, n) = v.adjoint() * zj;
        else h.block(0, n, n, 1) = zj * v;
        ht.push_back(h);
    }
    out.sample.z = MatrixTuple(static_cast<int>(n + 1), zt);
    out.sample.h = MatrixTuple(static_cast<int>(n + 1), ht);
    // Y = sum_b (e_empty (x) e_b, 0) (x) e_b
    out.probe = Vector::Zero((n + 1) * k);
    for (Eigen::Index b = 0; b < k; ++b) out.probe((pos.at(Word{}) * k + b) * k + b) = 1.0;
    return out;
}

struct WitnessConfirmation {
    bool confirmed = false;
    double eps = 0.0;
    double quadratic = 0.0;  // probe^* Delta f probe
    double min_eig = 0.0;    // of the Hermitian part of Delta f at the point
};

/// Evaluates the Hessian at the witness point for eps in {1e-1, 1e-2, 1e-3}
/// and stops at the first negative value.
inline WitnessConfirmation confirm_witness(const NCSeries& s, const MiddleWitness& w, double tol = 1e-9) {
    const DirectionalForm hess = complex_hessian(s);
    WitnessConfirmation best;
    for (double eps : {1e-1, 1e-2, 1e-3}) {
        const WitnessPoint p = witness_point(s.d(), w, eps);
        const Matrix m = eval_form(hess, p.sample.z, p.sample.h);
        const Matrix herm = (m + m.adjoint()) / 2.0;
        WitnessConfirmation c;
        c.eps = eps;
        c.quadratic = p.probe.dot(herm * p.probe).real();
        c.min_eig = min_hermitian_eig(herm);
        c.confirmed = c.min_eig < -tol * std::max(1.0, op_norm(herm));
        if (c.confirmed) return c;
        if (best.eps == 0.0) best = c;
    }
    return best;
}

}  // namespace ncfree
