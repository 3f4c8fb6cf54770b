#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "tarag/vector_index.hpp"

namespace tarag {

// Okapi BM25 over the reference tokenizer (lowercased alphanumeric runs).
// Scoring: sum over query terms of
//   idf(t) * tf * (k1 + 1) / (tf + k1 * (1 - b + b * len / avg_len))
// with idf(t) = ln((N - df + 0.5) / (df + 0.5) + 1). Documents sharing no
// term with the query are never returned.
class Bm25Index {
public:
    static constexpr double kK1 = 1.2;
    static constexpr double kB = 0.75;

    static Bm25Index build(const std::vector<std::pair<ChunkId, std::string>>& docs);

    [[nodiscard]] std::vector<ScoredHit> top_k(const std::string& query, std::size_t k) const;

    [[nodiscard]] std::size_t doc_count() const { return ids_.size(); }

private:
    struct Posting {
        std::uint32_t doc;
        std::uint32_t tf;
    };

    std::vector<ChunkId> ids_;
    std::vector<std::uint32_t> doc_len_;
    double avg_len_ = 0.0;
    std::unordered_map<std::string, std::vector<Posting>> postings_;
};

}  // namespace tarag
