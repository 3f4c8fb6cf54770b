#include "tarag/vector_index.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tarag/errors.hpp"

namespace tarag {

float dot(std::span<const float> a, std::span<const float> b) {
    float s = 0.0f;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

void normalize(std::vector<float>& v) {
    double n2 = 0.0;
    for (float x : v) n2 += double(x) * x;
    double n = std::sqrt(n2);
    if (n < 1e-12) throw std::invalid_argument("cannot normalize a zero vector");
    for (float& x : v) x = float(x / n);
}

void VectorIndex::add(const ChunkId& id, std::span<const float> vec) {
    if (vec.size() != dim_)
        throw DimensionMismatch{"vector of dim " + std::to_string(vec.size()) + " into index of dim " +
                                std::to_string(dim_)};
    if (row_of_.contains(id)) throw std::invalid_argument("duplicate chunk id: " + id);
    std::vector<float> v(vec.begin(), vec.end());
    normalize(v);
    row_of_.emplace(id, std::uint32_t(ids_.size()));
    ids_.push_back(id);
    data_.insert(data_.end(), v.begin(), v.end());
}

float VectorIndex::dot_row(std::size_t i, std::span<const float> q) const {
    return dot(row(i), q);
}

std::vector<ScoredHit> VectorIndex::top_k(std::span<const float> query_vec,
                                          const std::vector<ChunkId>* candidates,
                                          std::size_t k) const {
    if (query_vec.size() != dim_)
        throw DimensionMismatch{"query vector of dim " + std::to_string(query_vec.size()) +
                                " against index of dim " + std::to_string(dim_)};
    if (k == 0) return {};

    // Rows are stored unit-norm; normalizing the query makes scores cosines.
    std::vector<float> q(query_vec.begin(), query_vec.end());
    normalize(q);

    std::vector<std::uint32_t> rows;
    if (candidates) {
        rows.reserve(candidates->size());
        for (const auto& id : *candidates) {
            auto it = row_of_.find(id);
            if (it == row_of_.end()) throw UnknownChunkId{id};
            rows.push_back(it->second);
        }
    } else {
        rows.resize(ids_.size());
        for (std::uint32_t i = 0; i < rows.size(); ++i) rows[i] = i;
    }

    struct Scored {
        float score;
        std::uint32_t row;
    };
    std::vector<Scored> scored;
    scored.reserve(rows.size());
    for (auto r : rows) scored.push_back({dot_row(r, q), r});

    auto better = [this](const Scored& a, const Scored& b) {
        if (a.score != b.score) return a.score > b.score;
        return ids_[a.row] < ids_[b.row];
    };
    const std::size_t cut = std::min(k, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + cut, scored.end(), better);

    std::vector<ScoredHit> out;
    out.reserve(cut);
    for (std::size_t i = 0; i < cut; ++i) out.push_back({ids_[scored[i].row], scored[i].score});
    return out;
}

VectorIndex VectorIndex::from_rows(std::size_t dim, std::vector<ChunkId> ids,
                                   std::vector<float> data) {
    if (data.size() != dim * ids.size()) throw CorruptIndex{"vector block size mismatch"};
    VectorIndex idx(dim);
    idx.ids_ = std::move(ids);
    idx.data_ = std::move(data);
    for (std::uint32_t i = 0; i < idx.ids_.size(); ++i) {
        if (!idx.row_of_.emplace(idx.ids_[i], i).second)
            throw CorruptIndex{"duplicate chunk id in vector block"};
    }
    return idx;
}

}  // namespace tarag
