#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "tarag/errors.hpp"
#include "tarag/interval_index.hpp"

using namespace tarag;

namespace {

// Linear-scan oracle over the raw entry list.
std::vector<ChunkId> brute_query(const std::vector<std::pair<TimeInterval, ChunkId>>& entries,
                                 const std::vector<TimeInterval>& queries) {
    std::set<ChunkId> hit;
    for (const auto& [interval, id] : entries)
        for (const auto& q : queries)
            if (overlaps(interval, q)) hit.insert(id);
    return {hit.begin(), hit.end()};
}

TimeInterval rand_interval(std::mt19937& rng) {
    std::int64_t lo = Date{2012, 1, 1}.to_days(), hi = Date{2022, 1, 1}.to_days();
    std::uniform_int_distribution<std::int64_t> start(lo, hi - 1);
    std::int64_t s = start(rng);
    std::uniform_int_distribution<std::int64_t> len(1, std::min<std::int64_t>(500, hi - s));
    return {Date::from_days(s), Date::from_days(s + len(rng))};
}

}  // namespace

TEST_CASE("build rejects an empty entry list") {
    CHECK_THROWS_AS(IntervalIndex::build({}), EmptyCorpus);
}

TEST_CASE("query matches the linear-scan oracle on small fixed data") {
    std::vector<std::pair<TimeInterval, ChunkId>> entries = {
        {TimeInterval::whole_year(2015), "a#000000"},
        {TimeInterval::whole_year(2016), "a#000001"},
        {TimeInterval{{2015, 6, 1}, {2017, 6, 1}}, "b#000000"},
        {TimeInterval::whole_month(2018, 3), "c#000000"},
        // Same chunk under two intervals: must dedup.
        {TimeInterval::whole_month(2015, 2), "b#000000"},
    };
    auto idx = IntervalIndex::build(entries);
    CHECK(idx.entry_count() == 5);
    CHECK(idx.chunk_count() == 4);

    std::vector<TimeInterval> q = {TimeInterval::whole_month(2015, 2)};
    CHECK(idx.query_overlapping(q) == brute_query(entries, q));
    CHECK(idx.query_overlapping(q) == std::vector<ChunkId>{"a#000000", "b#000000"});

    q = {TimeInterval::whole_year(2018)};
    CHECK(idx.query_overlapping(q) == std::vector<ChunkId>{"c#000000"});

    q = {TimeInterval{{2010, 1, 1}, {2011, 1, 1}}};
    CHECK(idx.query_overlapping(q).empty());

    // Multiple disjoint query intervals union their matches.
    q = {TimeInterval::whole_year(2015), TimeInterval::whole_month(2018, 3)};
    CHECK(idx.query_overlapping(q) == brute_query(entries, q));
}

TEST_CASE("query matches the linear-scan oracle on random data") {
    std::mt19937 rng(101);
    for (int trial = 0; trial < 20; ++trial) {
        std::uniform_int_distribution<int> n_entries(1, 300), n_queries(1, 3);
        std::vector<std::pair<TimeInterval, ChunkId>> entries;
        int n = n_entries(rng);
        for (int i = 0; i < n; ++i) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "d%02d#%06d", i % 17, i / 17);
            entries.emplace_back(rand_interval(rng), buf);
        }
        auto idx = IntervalIndex::build(entries);
        for (int qt = 0; qt < 10; ++qt) {
            // Build disjoint sorted query intervals.
            std::vector<TimeInterval> qs;
            int m = n_queries(rng);
            for (int j = 0; j < m; ++j) qs.push_back(rand_interval(rng));
            std::sort(qs.begin(), qs.end());
            std::vector<TimeInterval> disjoint;
            for (const auto& q : qs) {
                if (!disjoint.empty() && q.start.to_days() <= disjoint.back().end.to_days()) {
                    if (q.end > disjoint.back().end) disjoint.back().end = q.end;
                } else {
                    disjoint.push_back(q);
                }
            }
            auto got = idx.query_overlapping(disjoint);
            CHECK(got == brute_query(entries, disjoint));
            CHECK(std::is_sorted(got.begin(), got.end()));
            CHECK(std::adjacent_find(got.begin(), got.end()) == got.end());
            // Determinism.
            CHECK(got == idx.query_overlapping(disjoint));
        }
    }
}

TEST_CASE("result sets grow monotonically with the query interval") {
    std::mt19937 rng(131);
    std::vector<std::pair<TimeInterval, ChunkId>> entries;
    for (int i = 0; i < 200; ++i) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "m#%06d", i);
        entries.emplace_back(rand_interval(rng), buf);
    }
    auto idx = IntervalIndex::build(entries);
    for (int trial = 0; trial < 50; ++trial) {
        TimeInterval small = rand_interval(rng);
        TimeInterval large{small.start.add_days(-30), small.end.add_days(45)};
        auto inner = idx.query_overlapping({small});
        auto outer = idx.query_overlapping({large});
        CHECK(std::includes(outer.begin(), outer.end(), inner.begin(), inner.end()));
    }
}
