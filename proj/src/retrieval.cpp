#include "tarag/retrieval.hpp"

#include <chrono>
#include <mutex>

#include "tarag/errors.hpp"

namespace tarag {

const char* to_string(Method m) {
    switch (m) {
        case Method::ta_rag: return "ta_rag";
        case Method::naive: return "naive";
        case Method::bm25: return "bm25";
    }
    return "?";
}

std::optional<Method> method_from_string(const std::string& s) {
    if (s == "ta_rag") return Method::ta_rag;
    if (s == "naive") return Method::naive;
    if (s == "bm25") return Method::bm25;
    return std::nullopt;
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

}  // namespace

RetrievalResult Retriever::retrieve(const RetrievalRequest& req, EmbeddingProvider* embedder,
                                    LlmProvider* decomposer_llm) const {
    switch (req.method) {
        case Method::ta_rag:
            if (!embedder) throw std::invalid_argument("ta_rag requires an embedding provider");
            return retrieve_ta(req, *embedder, decomposer_llm);
        case Method::naive:
            if (!embedder) throw std::invalid_argument("naive retrieval requires an embedding provider");
            return retrieve_naive(req, *embedder);
        case Method::bm25:
            return retrieve_bm25(req);
    }
    throw std::invalid_argument("unknown method");
}

RetrievalResult Retriever::retrieve_ta(const RetrievalRequest& req, EmbeddingProvider& embedder,
                                       LlmProvider* decomposer_llm) const {
    auto t0 = Clock::now();
    RetrievalResult result;

    auto decomposition = decompose_question(decomposer_llm, req.question);
    result.decomposition = decomposition;

    try {
        result.resolved_intervals =
            resolve_constraints(decomposition.constraints, index_.manifest.corpus_bounds());
    } catch (const AllConstraintsEmpty&) {
        result.diagnostics.reason = "all_constraints_empty";
        result.diagnostics.elapsed_ms = ms_since(t0);
        return result;
    }

    Granularity g = req.granularity_override.value_or(choose_granularity(result.resolved_intervals));
    auto anchors =
        sample_anchors(result.resolved_intervals, g, req.max_anchors.value_or(kDefaultMaxAnchors));
    result.diagnostics.anchor_count = anchors.size();

    auto query_vec = build_hypothetical_embedding(embedder, decomposition.q_core, anchors, g);

    auto candidates = index_.intervals.query_overlapping(result.resolved_intervals);
    result.diagnostics.candidate_count = candidates.size();
    result.diagnostics.short_fill = candidates.size() < req.k;

    result.hits = index_.vectors.top_k(query_vec, &candidates, req.k);
    result.diagnostics.elapsed_ms = ms_since(t0);
    return result;
}

RetrievalResult Retriever::retrieve_naive(const RetrievalRequest& req,
                                          EmbeddingProvider& embedder) const {
    auto t0 = Clock::now();
    RetrievalResult result;
    auto vecs = embed_texts(embedder, {req.question});
    result.hits = index_.vectors.top_k(vecs[0], nullptr, req.k);
    result.diagnostics.candidate_count = index_.vectors.size();
    result.diagnostics.elapsed_ms = ms_since(t0);
    return result;
}

const Bm25Index& Retriever::lexical() const {
    std::call_once(bm25_once_, [this] {
        std::vector<std::pair<ChunkId, std::string>> docs;
        docs.reserve(index_.chunks.size());
        for (const auto& c : index_.chunks) docs.emplace_back(c.chunk_id, c.text);
        bm25_ = std::make_unique<Bm25Index>(Bm25Index::build(docs));
    });
    return *bm25_;
}

RetrievalResult Retriever::retrieve_bm25(const RetrievalRequest& req) const {
    auto t0 = Clock::now();
    RetrievalResult result;
    result.hits = lexical().top_k(req.question, req.k);
    result.diagnostics.candidate_count = index_.chunks.size();
    result.diagnostics.elapsed_ms = ms_since(t0);
    return result;
}

double temporal_coverage(const RetrievalResult& result, const CorpusIndex& index,
                         const std::vector<TimeInterval>& intervals, Granularity g) {
    if (intervals.empty()) throw EmptyConstraintSet{};
    // One bucket per calendar period overlapping the intervals; no cap.
    auto bucket_starts = sample_anchors(intervals, g, std::size_t(-1));
    if (bucket_starts.empty()) return 0.0;

    std::size_t covered = 0;
    for (const auto& start : bucket_starts) {
        TimeInterval bucket = g == Granularity::Year    ? TimeInterval::whole_year(start.year)
                              : g == Granularity::Month ? TimeInterval::whole_month(start.year, start.month)
                                                        : TimeInterval::single_day(start);
        bool hit_overlap = false;
        for (const auto& hit : result.hits) {
            for (const auto& iv : index.chunk(hit.chunk_id).event_intervals) {
                if (overlaps(iv, bucket)) {
                    hit_overlap = true;
                    break;
                }
            }
            if (hit_overlap) break;
        }
        if (hit_overlap) ++covered;
    }
    return double(covered) / double(bucket_starts.size());
}

}  // namespace tarag
