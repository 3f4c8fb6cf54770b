#pragma once

#include <string>
#include <vector>

#include "tarag/ingest.hpp"
#include "tarag/vector_index.hpp"

namespace tarag {

struct ContextBlock {
    Date pub_time_est;
    ChunkId chunk_id;
    std::string text;
};

struct StructuredContext {
    std::vector<ContextBlock> blocks;  // ascending pub date, ties by (doc_id, seq)
    std::string rendered;              // "[Published: YYYY-MM-DD]\n<text>\n" per block
    std::size_t token_estimate = 0;
    bool truncated = false;
};

// Chronologically ordered, token-budgeted context. When the budget is
// exceeded, whole blocks are dropped lowest score first (never truncated
// mid-block) and the survivors re-sorted chronologically.
[[nodiscard]] StructuredContext build_context(const std::vector<ScoredHit>& hits,
                                              const CorpusIndex& index, std::size_t token_budget);

}  // namespace tarag
