#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "tarag/annotation.hpp"
#include "tarag/cache.hpp"
#include "tarag/chunker.hpp"
#include "tarag/interval_index.hpp"
#include "tarag/providers.hpp"
#include "tarag/temporal.hpp"
#include "tarag/vector_index.hpp"

namespace tarag {

struct Document {
    std::string doc_id;
    std::string text;
    std::map<std::string, std::string> metadata;  // source, date hint, ticker, ...
};

struct ChunkRecord {
    ChunkId chunk_id;  // "<doc_id>#<seq, zero padded>"
    std::string doc_id;
    std::size_t seq = 0;
    std::string text;
    std::size_t token_count = 0;
    std::vector<TimeInterval> event_intervals;  // non-empty
    Date pub_time_est;
    AnnotationSource interval_source = AnnotationSource::rule;
};

struct IndexManifest {
    std::string embedder_id;
    std::size_t dim = 0;
    std::string prompt_version;
    std::string built_at;  // ISO timestamp
    Date bounds_start;
    Date bounds_end;  // exclusive
    std::size_t max_chunk_tokens = 0;

    [[nodiscard]] TimeInterval corpus_bounds() const { return {bounds_start, bounds_end}; }
};

struct CorpusIndex {
    std::vector<ChunkRecord> chunks;  // row order, matches vectors
    IntervalIndex intervals;
    VectorIndex vectors{0};
    IndexManifest manifest;

    [[nodiscard]] const ChunkRecord& chunk(const ChunkId& id) const;
    [[nodiscard]] bool has_chunk(const ChunkId& id) const { return row_of_.contains(id); }
    void rebuild_lookup();

private:
    std::unordered_map<ChunkId, std::size_t> row_of_;
};

struct BuildReport {
    std::size_t documents_seen = 0;
    std::size_t documents_indexed = 0;
    std::size_t chunk_count = 0;
    std::vector<std::pair<std::string, std::string>> rejected;  // (doc_id, reason)
};

struct IngestConfig {
    std::size_t max_chunk_tokens = 2048;
    AnnotationOptions annotation;
    std::string embedder_id = "stub-64";
    std::string llm_id = "rule";
    std::string prompt_version = "v1";
    std::string cache_path;  // empty -> no sidecar
};

// Full ingestion pipeline: pass-one annotation per document, chunking,
// pass-two annotation per chunk, embedding, then both index builds.
// Documents with no temporal signal are rejected and listed in the report.
CorpusIndex build_corpus_index(const std::vector<Document>& docs, EmbeddingProvider& embedder,
                               LlmProvider* llm, const IngestConfig& config,
                               BuildReport* report = nullptr);

// Single-file container: magic + version, JSON manifest, JSONL chunk table,
// little-endian f32 vector block, interval entries, trailing CRC-32 over the
// whole preceding byte stream.
void save_index(const CorpusIndex& index, const std::string& path);
CorpusIndex load_index(const std::string& path);

// JSON-lines corpus input, one document object per line:
// {"doc_id": ..., "text": ..., "metadata": {...}?}
std::vector<Document> load_documents_jsonl(const std::string& path);

}  // namespace tarag
