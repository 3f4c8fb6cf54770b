#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "tarag/interval_index.hpp"  // ChunkId

namespace tarag {

struct ScoredHit {
    ChunkId chunk_id;
    float score = 0.0f;  // cosine, in [-1, 1]

    bool operator==(const ScoredHit&) const = default;
};

// Exact flat cosine index. Vectors are L2-normalized at insert time so cosine
// reduces to a dot product. Immutable once populated; concurrent queries are
// safe.
class VectorIndex {
public:
    explicit VectorIndex(std::size_t dim) : dim_(dim) {}

    // Normalizes and stores. Throws DimensionMismatch on wrong width and
    // std::invalid_argument on duplicate ids or zero vectors.
    void add(const ChunkId& id, std::span<const float> vec);

    // Top-k by (score desc, chunk id asc). With candidates == nullptr every
    // stored vector competes. Throws UnknownChunkId for candidates not present.
    [[nodiscard]] std::vector<ScoredHit> top_k(std::span<const float> query_vec,
                                               const std::vector<ChunkId>* candidates,
                                               std::size_t k) const;

    [[nodiscard]] std::size_t dim() const { return dim_; }
    [[nodiscard]] std::size_t size() const { return ids_.size(); }
    [[nodiscard]] const std::vector<ChunkId>& ids() const { return ids_; }
    [[nodiscard]] std::span<const float> row(std::size_t i) const {
        return {data_.data() + i * dim_, dim_};
    }
    [[nodiscard]] const std::vector<float>& data() const { return data_; }

    // Deserialization path: rows are already unit norm.
    static VectorIndex from_rows(std::size_t dim, std::vector<ChunkId> ids, std::vector<float> data);

private:
    [[nodiscard]] float dot_row(std::size_t i, std::span<const float> q) const;

    std::size_t dim_;
    std::vector<float> data_;  // row-major
    std::vector<ChunkId> ids_;
    std::unordered_map<ChunkId, std::uint32_t> row_of_;
};

// L2-normalizes in place. Throws std::invalid_argument when the norm is below
// 1e-12.
void normalize(std::vector<float>& v);
[[nodiscard]] float dot(std::span<const float> a, std::span<const float> b);

}  // namespace tarag
