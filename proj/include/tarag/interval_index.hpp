#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tarag/temporal.hpp"

namespace tarag {

using ChunkId = std::string;

// Static interval tree over (event interval, chunk id) entries. Built once and
// immutable afterwards; concurrent queries need no locking.
//
// Layout: entries sorted by (start, end, id) form an implicit balanced BST
// (midpoint recursion); each position carries the max interval end over its
// subtree, which prunes whole subtrees whose entries all end at or before the
// query start.
class IntervalIndex {
public:
    IntervalIndex() = default;

    // One entry per (chunk, event interval) pair. Throws EmptyCorpus on empty
    // input. The same chunk id may appear under several intervals.
    static IntervalIndex build(std::vector<std::pair<TimeInterval, ChunkId>> entries);

    // Ids of all chunks with at least one entry overlapping at least one query
    // interval, deduplicated and sorted ascending. Query intervals are expected
    // disjoint and sorted (the shape resolve_constraints produces).
    [[nodiscard]] std::vector<ChunkId> query_overlapping(
        const std::vector<TimeInterval>& query_intervals) const;

    [[nodiscard]] std::size_t entry_count() const { return starts_.size(); }
    [[nodiscard]] std::size_t chunk_count() const { return ids_.size(); }

private:
    void finalize();
    void collect(std::size_t lo, std::size_t hi, std::int64_t q_start, std::int64_t q_end,
                 std::vector<char>& seen, std::vector<std::uint32_t>& out) const;

    // Parallel arrays sorted by (start, end, id slot).
    std::vector<std::int64_t> starts_;
    std::vector<std::int64_t> ends_;
    std::vector<std::uint32_t> slots_;
    std::vector<std::int64_t> subtree_max_end_;
    std::vector<ChunkId> ids_;  // slot -> chunk id
};

}  // namespace tarag
