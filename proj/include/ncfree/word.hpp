#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"

namespace ncfree {

/// One letter of a word: variable z_{var+1}, or its adjoint when `starred`.
/// Variables are 0-based internally and 1-based in every text format.
struct Letter {
    int var = 0;
    bool starred = false;

    friend bool operator==(const Letter&, const Letter&) = default;

    Letter adjoint() const { return {var, !starred}; }
};

inline constexpr int max_variables = 127;

/// A finite word over z_1..z_d and z_1^*..z_d^*.
///
/// Letters are packed as one byte each (2*var + starred), so that the
/// byte-lexicographic order puts z_i before z_i^* before z_{i+1}. Words
/// compare graded-lexicographically: shorter first, then letter by letter.
class Word {
public:
    Word() = default;
    Word(std::initializer_list<Letter> letters) {
        for (const auto& l : letters) push_back(l);
    }

    static Word letter(int var, bool starred = false) {
        Word w;
        w.push_back({var, starred});
        return w;
    }

    std::size_t size() const noexcept { return codes_.size(); }
    bool empty() const noexcept { return codes_.empty(); }

    Letter operator[](std::size_t i) const {
        const auto c = static_cast<unsigned char>(codes_[i]);
        return {static_cast<int>(c >> 1), (c & 1u) != 0};
    }

    void push_back(Letter l) {
        require(l.var >= 0 && l.var < max_variables, ErrorKind::invalid_input,
                "variable index out of range");
        codes_.push_back(static_cast<char>((l.var << 1) | (l.starred ? 1 : 0)));
    }

    void set(std::size_t i, Letter l) {
        codes_[i] = static_cast<char>((l.var << 1) | (l.starred ? 1 : 0));
    }

    /// alpha -> alpha^*: reverse the letters and toggle every star.
    Word adjoint() const {
        Word out;
        out.codes_.resize(codes_.size());
        const auto n = codes_.size();
        for (std::size_t i = 0; i < n; ++i)
            out.codes_[i] = static_cast<char>(static_cast<unsigned char>(codes_[n - 1 - i]) ^ 1u);
        return out;
    }

    Word operator+(const Word& other) const {
        Word out;
        out.codes_ = codes_ + other.codes_;
        return out;
    }

    Word slice(std::size_t pos, std::size_t len) const {
        Word out;
        out.codes_ = codes_.substr(pos, len);
        return out;
    }

    /// No starred letter (the empty word counts).
    bool is_analytic() const {
        return std::none_of(codes_.begin(), codes_.end(),
                            [](char c) { return (static_cast<unsigned char>(c) & 1u) != 0; });
    }
    /// Every letter starred (the empty word counts).
    bool is_coanalytic() const {
        return std::all_of(codes_.begin(), codes_.end(),
                           [](char c) { return (static_cast<unsigned char>(c) & 1u) != 0; });
    }

    int max_var() const {
        int m = -1;
        for (std::size_t i = 0; i < size(); ++i) m = std::max(m, (*this)[i].var);
        return m;
    }

    const std::string& codes() const noexcept { return codes_; }

    friend bool operator==(const Word&, const Word&) = default;
    friend std::strong_ordering operator<=>(const Word& a, const Word& b) {
        if (a.size() != b.size()) return a.size() <=> b.size();
        const int c = a.codes_.compare(b.codes_);
        return c < 0 ? std::strong_ordering::less
                     : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
    }

private:
    std::string codes_;
};

struct WordHash {
    std::size_t operator()(const Word& w) const noexcept {
        return std::hash<std::string>{}(w.codes());
    }
};

/// "z1 z2* z1"; the empty word prints as "".
inline std::string format_word(const Word& w) {
    std::string out;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i) out += ' ';
        const Letter l = w[i];
        out += 'z';
        out += std::to_string(l.var + 1);
        if (l.starred) out += '*';
    }
    return out;
}

/// Inverse of format_word. Also accepts "1" for the empty word.
inline Word parse_word(std::string_view text) {
    Word w;
    std::size_t i = 0;
    auto skip = [&] {
        while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
    };
    skip();
    if (text.substr(i) == "1") return w;
    while (i < text.size()) {
        if (text[i] != 'z' && text[i] != 'x')
            throw Error(ErrorKind::parse_error, "expected letter 'z<k>' in word '" +
                                                    std::string(text) + "'", i);
        ++i;
        std::size_t start = i;
        while (i < text.size() && text[i] >= '0' && text[i] <= '9') ++i;
        if (start == i)
            throw Error(ErrorKind::parse_error, "missing variable index in word", i);
        const int idx = std::stoi(std::string(text.substr(start, i - start)));
        if (idx < 1 || idx > max_variables)
            throw Error(ErrorKind::parse_error, "variable index out of range", start);
        bool starred = false;
        if (i < text.size() && (text[i] == '*' || text[i] == '\'')) {
            starred = true;
            ++i;
        }
        w.push_back({idx - 1, starred});
        skip();
    }
    return w;
}

/// Maximal runs of unstarred / starred letters, left to right.
inline std::vector<Word> alternating_blocks(const Word& w) {
    std::vector<Word> blocks;
    std::size_t start = 0;
    for (std::size_t i = 1; i <= w.size(); ++i) {
        if (i == w.size() || w[i].starred != w[start].starred) {
            blocks.push_back(w.slice(start, i - start));
            start = i;
        }
    }
    return blocks;
}

/// All words of exactly `length` letters over an alphabet, in graded-lex order.
/// `starred_letters` / `unstarred_letters` select which of z_i, z_i^* occur.
inline std::vector<Word> words_of_length(int d, int length, bool unstarred_letters,
                                         bool starred_letters) {
    std::vector<Letter> alphabet;
    for (int v = 0; v < d; ++v) {
        if (unstarred_letters) alphabet.push_back({v, false});
        if (starred_letters) alphabet.push_back({v, true});
    }
    std::vector<Word> out;
    if (length == 0) {
        out.emplace_back();
        return out;
    }
    if (alphabet.empty()) return out;
    std::vector<std::size_t> digits(static_cast<std::size_t>(length), 0);
    while (true) {
        Word w;
        for (auto dgt : digits) w.push_back(alphabet[dgt]);
        out.push_back(std::move(w));
        int pos = length - 1;
        while (pos >= 0 && ++digits[static_cast<std::size_t>(pos)] == alphabet.size()) {
            digits[static_cast<std::size_t>(pos)] = 0;
            --pos;
        }
        if (pos < 0) break;
    }
    return out;
}

inline std::vector<Word> analytic_words(int d, int min_len, int max_len) {
    std::vector<Word> out;
    for (int L = min_len; L <= max_len; ++L) {
        auto ws = words_of_length(d, L, true, false);
        out.insert(out.end(), ws.begin(), ws.end());
    }
    return out;
}

inline std::vector<Word> coanalytic_words(int d, int min_len, int max_len) {
    std::vector<Word> out;
    for (int L = min_len; L <= max_len; ++L) {
        auto ws = words_of_length(d, L, false, true);
        out.insert(out.end(), ws.begin(), ws.end());
    }
    return out;
}

}  // namespace ncfree
