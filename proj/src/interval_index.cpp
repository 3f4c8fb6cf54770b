#include "tarag/interval_index.hpp"

#include <algorithm>
#include <tuple>

#include "tarag/errors.hpp"

namespace tarag {

IntervalIndex IntervalIndex::build(std::vector<std::pair<TimeInterval, ChunkId>> entries) {
    if (entries.empty()) throw EmptyCorpus{};

    IntervalIndex idx;
    std::unordered_map<ChunkId, std::uint32_t> slot_of;
    idx.starts_.reserve(entries.size());
    idx.ends_.reserve(entries.size());
    idx.slots_.reserve(entries.size());

    struct Rec {
        std::int64_t start, end;
        std::uint32_t slot;
    };
    std::vector<Rec> recs;
    recs.reserve(entries.size());
    for (const auto& [iv, id] : entries) {
        auto [it, inserted] = slot_of.try_emplace(id, std::uint32_t(idx.ids_.size()));
        if (inserted) idx.ids_.push_back(id);
        recs.push_back({iv.start.to_days(), iv.end.to_days(), it->second});
    }
    std::sort(recs.begin(), recs.end(), [](const Rec& a, const Rec& b) {
        return std::tie(a.start, a.end, a.slot) < std::tie(b.start, b.end, b.slot);
    });
    for (const auto& r : recs) {
        idx.starts_.push_back(r.start);
        idx.ends_.push_back(r.end);
        idx.slots_.push_back(r.slot);
    }
    idx.finalize();
    return idx;
}

void IntervalIndex::finalize() {
    const std::size_t n = starts_.size();
    subtree_max_end_.assign(n, 0);
    // Bottom-up over the implicit midpoint tree: max end of [lo, hi] lives at mid.
    struct Frame {
        std::size_t lo, hi;
    };
    // Recursive lambda; depth is O(log n) since the tree is balanced by construction.
    auto rec = [&](auto&& self, std::size_t lo, std::size_t hi) -> std::int64_t {
        if (lo > hi || hi >= n) return INT64_MIN;
        std::size_t mid = lo + (hi - lo) / 2;
        std::int64_t m = ends_[mid];
        if (lo < mid) m = std::max(m, self(self, lo, mid - 1));
        if (mid < hi) m = std::max(m, self(self, mid + 1, hi));
        subtree_max_end_[mid] = m;
        return m;
    };
    if (n > 0) rec(rec, 0, n - 1);
}

void IntervalIndex::collect(std::size_t lo, std::size_t hi, std::int64_t q_start, std::int64_t q_end,
                            std::vector<char>& seen, std::vector<std::uint32_t>& out) const {
    if (lo > hi || hi >= starts_.size()) return;
    std::size_t mid = lo + (hi - lo) / 2;
    if (subtree_max_end_[mid] <= q_start) return;  // nothing here extends past the query start
    if (lo < mid) collect(lo, mid - 1, q_start, q_end, seen, out);
    if (starts_[mid] < q_end) {
        if (ends_[mid] > q_start) {
            std::uint32_t slot = slots_[mid];
            if (!seen[slot]) {
                seen[slot] = 1;
                out.push_back(slot);
            }
        }
        if (mid < hi) collect(mid + 1, hi, q_start, q_end, seen, out);
    }
    // starts_[mid] >= q_end implies every start to the right is >= q_end as well.
}

std::vector<ChunkId> IntervalIndex::query_overlapping(
    const std::vector<TimeInterval>& query_intervals) const {
    std::vector<char> seen(ids_.size(), 0);
    std::vector<std::uint32_t> slots;
    for (const auto& q : query_intervals) {
        if (!starts_.empty())
            collect(0, starts_.size() - 1, q.start.to_days(), q.end.to_days(), seen, slots);
    }
    std::vector<ChunkId> result;
    result.reserve(slots.size());
    for (auto s : slots) result.push_back(ids_[s]);
    std::sort(result.begin(), result.end());
    return result;
}

}  // namespace tarag
