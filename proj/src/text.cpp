#include "tarag/text.hpp"

#include <cctype>

namespace tarag {

namespace {
bool is_alnum(unsigned char c) { return std::isalnum(c) != 0; }
bool is_space(unsigned char c) { return std::isspace(c) != 0; }
}  // namespace

std::vector<TokenSpan> token_spans(std::string_view text) {
    std::vector<TokenSpan> spans;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        unsigned char c = static_cast<unsigned char>(text[i]);
        if (is_space(c)) {
            ++i;
        } else if (is_alnum(c)) {
            std::size_t j = i + 1;
            while (j < n && is_alnum(static_cast<unsigned char>(text[j]))) ++j;
            spans.push_back({i, j});
            i = j;
        } else {
            spans.push_back({i, i + 1});
            ++i;
        }
    }
    return spans;
}

std::size_t token_count(std::string_view text) {
    std::size_t count = 0;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        unsigned char c = static_cast<unsigned char>(text[i]);
        if (is_space(c)) {
            ++i;
        } else if (is_alnum(c)) {
            ++count;
            while (i < n && is_alnum(static_cast<unsigned char>(text[i]))) ++i;
        } else {
            ++count;
            ++i;
        }
    }
    return count;
}

std::vector<std::string> tokenize_lower(std::string_view text) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        if (is_alnum(static_cast<unsigned char>(text[i]))) {
            std::size_t j = i;
            std::string tok;
            while (j < n && is_alnum(static_cast<unsigned char>(text[j]))) {
                tok.push_back(char(std::tolower(static_cast<unsigned char>(text[j]))));
                ++j;
            }
            tokens.push_back(std::move(tok));
            i = j;
        } else {
            ++i;
        }
    }
    return tokens;
}

std::string to_lower(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) out.push_back(char(std::tolower(static_cast<unsigned char>(c))));
    return out;
}

std::string normalize_whitespace(std::string_view s) {
    std::string out;
    bool in_space = true;  // leading spaces dropped
    for (char c : s) {
        if (is_space(static_cast<unsigned char>(c))) {
            in_space = true;
        } else {
            if (in_space && !out.empty()) out.push_back(' ');
            out.push_back(c);
            in_space = false;
        }
    }
    return out;
}

std::vector<TokenSpan> sentence_spans(std::string_view text) {
    std::vector<std::size_t> boundaries;
    const std::size_t n = text.size();
    std::size_t i = 0;
    while (i < n) {
        char c = text[i];
        if (c == '.' || c == '!' || c == '?') {
            std::size_t j = i + 1;
            while (j < n && (text[j] == '.' || text[j] == '!' || text[j] == '?' || text[j] == '"' ||
                             text[j] == '\'' || text[j] == ')'))
                ++j;
            if (j < n && is_space(static_cast<unsigned char>(text[j]))) {
                while (j < n && is_space(static_cast<unsigned char>(text[j]))) ++j;
                boundaries.push_back(j);
            }
            i = j;
        } else if (c == '\n') {
            // Blank line ends a sentence even without punctuation.
            std::size_t j = i + 1;
            bool blank = false;
            while (j < n && is_space(static_cast<unsigned char>(text[j]))) {
                if (text[j] == '\n') blank = true;
                ++j;
            }
            if (blank && j < n) boundaries.push_back(j);
            i = j;
        } else {
            ++i;
        }
    }
    std::vector<TokenSpan> spans;
    std::size_t start = 0;
    for (std::size_t b : boundaries) {
        if (b > start && b < n) {
            spans.push_back({start, b});
            start = b;
        }
    }
    if (start < n) spans.push_back({start, n});
    return spans;
}

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 14695981039346656037ull;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace tarag
