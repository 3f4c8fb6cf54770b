#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace tarag {

struct ChunkPiece {
    std::size_t seq = 0;
    std::string text;             // exact substring of the source document
    std::size_t token_count = 0;  // under the reference tokenizer
};

// Greedy sentence packing into non-overlapping chunks of at most max_tokens
// tokens. A single sentence over the budget is hard-split at token boundaries.
// Chunk texts tile the document: their concatenation reproduces it exactly.
[[nodiscard]] std::vector<ChunkPiece> chunk_document(const std::string& text,
                                                     std::size_t max_tokens);

}  // namespace tarag
