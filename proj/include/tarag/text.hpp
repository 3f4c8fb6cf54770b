#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace tarag {

// Reference tokenizer used everywhere a token count or token stream is needed
// (chunk budgets, BM25, stub embedder). A token is either a maximal run of
// alphanumeric characters or a single non-space punctuation character.
struct TokenSpan {
    std::size_t begin;
    std::size_t end;
};

[[nodiscard]] std::vector<TokenSpan> token_spans(std::string_view text);
[[nodiscard]] std::size_t token_count(std::string_view text);
[[nodiscard]] std::vector<std::string> tokenize_lower(std::string_view text);  // alnum runs only

[[nodiscard]] std::string to_lower(std::string_view s);
[[nodiscard]] std::string normalize_whitespace(std::string_view s);  // trim + collapse runs

[[nodiscard]] std::uint64_t fnv1a64(std::string_view s);

// Rule-based sentence segmentation. Spans tile the input exactly: each span
// ends where the next begins, so concatenating them reproduces the text.
// Boundaries fall after sentence-final punctuation (plus trailing whitespace)
// and after blank lines.
[[nodiscard]] std::vector<TokenSpan> sentence_spans(std::string_view text);

}  // namespace tarag
