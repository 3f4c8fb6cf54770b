#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "tarag/errors.hpp"
#include "tarag/vector_index.hpp"

using namespace tarag;

namespace {

// Full-sort oracle with the normative (score desc, id asc) tie-break, computed
// in double precision from raw (unnormalized) vectors.
std::vector<ScoredHit> brute_top_k(const std::vector<std::pair<ChunkId, std::vector<float>>>& rows,
                                   const std::vector<float>& query, std::size_t k,
                                   const std::vector<ChunkId>* candidates = nullptr) {
    auto cos = [](const std::vector<float>& a, const std::vector<float>& b) {
        double num = 0, na = 0, nb = 0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            num += double(a[i]) * b[i];
            na += double(a[i]) * a[i];
            nb += double(b[i]) * b[i];
        }
        return num / (std::sqrt(na) * std::sqrt(nb));
    };
    std::vector<ScoredHit> all;
    for (const auto& [id, v] : rows) {
        if (candidates && std::find(candidates->begin(), candidates->end(), id) == candidates->end())
            continue;
        all.push_back({id, float(cos(v, query))});
    }
    std::stable_sort(all.begin(), all.end(), [](const ScoredHit& a, const ScoredHit& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.chunk_id < b.chunk_id;
    });
    if (all.size() > k) all.resize(k);
    return all;
}

std::vector<float> rand_vec(std::mt19937& rng, std::size_t dim) {
    std::normal_distribution<float> g(0.0f, 1.0f);
    std::vector<float> v(dim);
    for (auto& x : v) x = g(rng);
    return v;
}

}  // namespace

TEST_CASE("add validates dimension, duplicates, and zero vectors") {
    VectorIndex idx(4);
    std::vector<float> v{1, 0, 0, 0};
    idx.add("a", v);
    CHECK_THROWS_AS(idx.add("b", std::vector<float>{1, 0, 0}), DimensionMismatch);
    CHECK_THROWS_AS(idx.add("a", v), std::invalid_argument);
    CHECK_THROWS_AS(idx.add("c", std::vector<float>{0, 0, 0, 0}), std::invalid_argument);
    CHECK_THROWS_AS(idx.top_k(std::vector<float>{1, 0}, nullptr, 1), DimensionMismatch);
}

TEST_CASE("stored vectors are unit norm regardless of input scale") {
    VectorIndex idx(3);
    idx.add("a", std::vector<float>{3, 4, 0});
    auto r = idx.row(0);
    CHECK(r[0] == doctest::Approx(0.6f));
    CHECK(r[1] == doctest::Approx(0.8f));
    // Scale invariance: cosine against the same direction is 1.
    auto hits = idx.top_k(std::vector<float>{30, 40, 0}, nullptr, 1);
    REQUIRE(hits.size() == 1);
    CHECK(hits[0].score == doctest::Approx(1.0f));
}

TEST_CASE("tie-break: equal scores order by ascending chunk id") {
    VectorIndex idx(2);
    // All three at the same angle to the query.
    idx.add("zz", std::vector<float>{1, 0});
    idx.add("aa", std::vector<float>{2, 0});
    idx.add("mm", std::vector<float>{5, 0});
    auto hits = idx.top_k(std::vector<float>{1, 0}, nullptr, 3);
    REQUIRE(hits.size() == 3);
    CHECK(hits[0].chunk_id == "aa");
    CHECK(hits[1].chunk_id == "mm");
    CHECK(hits[2].chunk_id == "zz");
}

TEST_CASE("top_k matches the full-sort oracle") {
    std::mt19937 rng(211);
    const std::size_t dim = 16;
    std::vector<std::pair<ChunkId, std::vector<float>>> rows;
    VectorIndex idx(dim);
    for (int i = 0; i < 120; ++i) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "v#%06d", i);
        auto v = rand_vec(rng, dim);
        rows.emplace_back(buf, v);
        idx.add(buf, v);
    }
    for (int trial = 0; trial < 30; ++trial) {
        auto q = rand_vec(rng, dim);
        for (std::size_t k : {1u, 5u, 120u, 500u}) {
            auto got = idx.top_k(q, nullptr, k);
            auto want = brute_top_k(rows, q, k);
            REQUIRE(got.size() == want.size());
            for (std::size_t i = 0; i < got.size(); ++i) {
                CHECK(got[i].chunk_id == want[i].chunk_id);
                CHECK(got[i].score == doctest::Approx(want[i].score).epsilon(1e-4));
            }
        }
    }
}

TEST_CASE("candidate restriction scores only the listed ids") {
    std::mt19937 rng(223);
    const std::size_t dim = 8;
    std::vector<std::pair<ChunkId, std::vector<float>>> rows;
    VectorIndex idx(dim);
    for (int i = 0; i < 40; ++i) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "c#%06d", i);
        auto v = rand_vec(rng, dim);
        rows.emplace_back(buf, v);
        idx.add(buf, v);
    }
    std::vector<ChunkId> cands = {"c#000003", "c#000017", "c#000031", "c#000008"};
    auto q = rand_vec(rng, dim);
    auto got = idx.top_k(q, &cands, 10);
    auto want = brute_top_k(rows, q, 10, &cands);
    REQUIRE(got.size() == 4);
    for (std::size_t i = 0; i < got.size(); ++i) {
        CHECK(got[i].chunk_id == want[i].chunk_id);
        for (const auto& h : got)
            CHECK(std::find(cands.begin(), cands.end(), h.chunk_id) != cands.end());
    }
    std::vector<ChunkId> bad = {"c#000003", "nope"};
    CHECK_THROWS_AS(idx.top_k(q, &bad, 10), UnknownChunkId);
    std::vector<ChunkId> empty;
    CHECK(idx.top_k(q, &empty, 10).empty());
}

TEST_CASE("k-prefix nesting: smaller k is a prefix of larger k") {
    std::mt19937 rng(227);
    const std::size_t dim = 12;
    VectorIndex idx(dim);
    for (int i = 0; i < 60; ++i) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "p#%06d", i);
        idx.add(buf, rand_vec(rng, dim));
    }
    for (int trial = 0; trial < 20; ++trial) {
        auto q = rand_vec(rng, dim);
        auto big = idx.top_k(q, nullptr, 25);
        for (std::size_t k : {1u, 5u, 10u, 20u}) {
            auto small = idx.top_k(q, nullptr, k);
            REQUIRE(small.size() == k);
            for (std::size_t i = 0; i < k; ++i) CHECK(small[i] == big[i]);
        }
    }
}

TEST_CASE("from_rows round-trips stored data") {
    std::mt19937 rng(229);
    VectorIndex idx(6);
    for (int i = 0; i < 10; ++i) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "r#%06d", i);
        idx.add(buf, rand_vec(rng, 6));
    }
    auto copy = VectorIndex::from_rows(6, idx.ids(), idx.data());
    auto q = rand_vec(rng, 6);
    auto a = idx.top_k(q, nullptr, 10);
    auto b = copy.top_k(q, nullptr, 10);
    CHECK(a == b);
}
