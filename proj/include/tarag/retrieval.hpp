#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "tarag/annotation.hpp"
#include "tarag/bm25.hpp"
#include "tarag/ingest.hpp"

namespace tarag {

enum class Method { ta_rag, naive, bm25 };

[[nodiscard]] const char* to_string(Method m);
[[nodiscard]] std::optional<Method> method_from_string(const std::string& s);

struct RetrievalRequest {
    std::string question;
    std::size_t k = 10;
    Method method = Method::ta_rag;
    std::optional<Granularity> granularity_override;
    std::optional<std::size_t> max_anchors;
};

struct RetrievalDiagnostics {
    std::size_t candidate_count = 0;
    std::size_t anchor_count = 0;
    double elapsed_ms = 0.0;
    bool short_fill = false;   // temporal filter produced fewer than k candidates
    std::string reason;        // non-empty when the result is degenerate
};

struct RetrievalResult {
    std::vector<ScoredHit> hits;  // (score desc, chunk id asc)
    std::vector<TimeInterval> resolved_intervals;  // empty for naive/bm25
    std::optional<DecomposedQuery> decomposition;
    RetrievalDiagnostics diagnostics;
};

// Retrieval front end over a loaded index. Read-only and safe for concurrent
// requests; the BM25 inverted index is built lazily on first use.
class Retriever {
public:
    explicit Retriever(const CorpusIndex& index) : index_(index) {}

    RetrievalResult retrieve(const RetrievalRequest& req, EmbeddingProvider* embedder,
                             LlmProvider* decomposer_llm) const;

    // Two-step temporally aware retrieval: decompose, resolve, sample anchors,
    // build the hypothetical embedding, filter by interval overlap, rank by
    // cosine. When every constraint falls outside the corpus timeline the
    // result is empty with a reason code rather than an error.
    RetrievalResult retrieve_ta(const RetrievalRequest& req, EmbeddingProvider& embedder,
                                LlmProvider* decomposer_llm) const;

    // Dense retrieval of the raw question over all chunks.
    RetrievalResult retrieve_naive(const RetrievalRequest& req, EmbeddingProvider& embedder) const;

    RetrievalResult retrieve_bm25(const RetrievalRequest& req) const;

private:
    const Bm25Index& lexical() const;

    const CorpusIndex& index_;
    mutable std::unique_ptr<Bm25Index> bm25_;
    mutable std::once_flag bm25_once_;
};

// Fraction of calendar buckets (granularity g) of the query intervals touched
// by at least one hit's event interval.
[[nodiscard]] double temporal_coverage(const RetrievalResult& result, const CorpusIndex& index,
                                       const std::vector<TimeInterval>& intervals, Granularity g);

}  // namespace tarag
