#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "tarag/errors.hpp"
#include "tarag/eval.hpp"

using namespace tarag;
namespace fs = std::filesystem;

namespace {

std::vector<Document> eval_docs() {
    std::vector<Document> docs;
    struct Spec {
        int year;
        const char* topic;
    };
    Spec specs[] = {{2013, "wheat harvest"}, {2014, "wheat harvest"}, {2015, "steel output"},
                    {2016, "steel output"},  {2017, "copper mining"}, {2018, "copper mining"}};
    for (const auto& s : specs) {
        std::string ys = std::to_string(s.year);
        docs.push_back({"doc" + ys,
                        "Published June 15, " + ys + ". The " + std::string(s.topic) +
                            " figures for " + ys + " improved notably during the year.",
                        {}});
    }
    return docs;
}

McqaItem make_item(const std::string& id, const std::string& stem,
                   std::array<std::string, 4> choices, int gold, QueryType type) {
    McqaItem item;
    item.item_id = id;
    item.question = stem;
    item.choices = choices;
    item.gold_index = gold;
    item.query_type = type;
    return item;
}

// Items answerable from the retrieved context via token overlap.
std::vector<McqaItem> eval_items() {
    return {
        make_item("q1", "How did the wheat harvest figures develop from 2013 to 2014?",
                  {"wheat harvest improved", "submarine cables expanded", "opera attendance fell",
                   "glacier volume shrank"},
                  0, QueryType::TimeIntervalYears),
        make_item("q2", "How did the steel output figures develop in 2015?",
                  {"orbital launches paused", "steel output improved", "jungle canopy thinned",
                   "vinyl sales spiked"},
                  1, QueryType::SpecificYearTrend),
        make_item("q3", "How did the copper mining figures develop after 2016?",
                  {"comet tails brightened", "harbor traffic sank", "copper mining improved",
                   "sonnet forms evolved"},
                  2, QueryType::AfterYearAnchor),
    };
}

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) {
        path = (fs::temp_directory_path() / name).string();
        std::remove(path.c_str());
    }
    ~TempFile() { std::remove(path.c_str()); }
};

struct FailingLlm final : LlmProvider {
    std::string complete(const std::string&) override {
        throw ProviderUnavailable{"scripted outage"};
    }
};

// Index with one chunk per year, event interval = that whole year.
CorpusIndex year_chunk_index(int first_year, int last_year) {
    CorpusIndex index;
    for (int y = first_year; y <= last_year; ++y) {
        ChunkRecord rec;
        rec.chunk_id = "y" + std::to_string(y) + "#000000";
        rec.doc_id = "y" + std::to_string(y);
        rec.text = "year " + std::to_string(y);
        rec.token_count = 2;
        rec.pub_time_est = {y, 6, 1};
        rec.event_intervals = {TimeInterval::whole_year(y)};
        index.chunks.push_back(rec);
    }
    index.rebuild_lookup();
    return index;
}

}  // namespace

TEST_CASE("reply parsing priority: letter, digit, exact text, else unparseable") {
    std::array<std::string, 4> choices = {"red", "green", "blue", "ultra violet"};
    CHECK(parse_generator_reply("A", choices) == 0);
    CHECK(parse_generator_reply("  c ", choices) == 2);
    CHECK(parse_generator_reply("B) because", choices) == 1);
    CHECK(parse_generator_reply("D.", choices) == 3);
    CHECK(parse_generator_reply("2", choices) == 1);
    CHECK(parse_generator_reply("4: the last one", choices) == 3);
    CHECK(parse_generator_reply("green", choices) == 1);
    CHECK(parse_generator_reply("ULTRA  violet", choices) == 3);
    CHECK(parse_generator_reply("Answer unknown", choices) == -1);  // 'A' not lone, no text match
    CHECK(parse_generator_reply("", choices) == -1);
    CHECK(parse_generator_reply("E", choices) == -1);
    CHECK(parse_generator_reply("5", choices) == -1);
}

TEST_CASE("constant-choice generator lands on the chance baseline") {
    StubEmbedder emb;
    auto index = build_corpus_index(eval_docs(), emb, nullptr, {});
    // Four items, gold spread across all positions; answering "C" hits 1/4.
    std::vector<McqaItem> items;
    for (int gold = 0; gold < 4; ++gold) {
        std::array<std::string, 4> choices = {"w", "x", "y", "z"};
        items.push_back(make_item("g" + std::to_string(gold),
                                  "How did the wheat harvest figures develop in 2013?", choices,
                                  gold, QueryType::SpecificYearTrend));
    }
    ConstantChoiceLlm gen("C");
    auto report = run_eval(index, &emb, nullptr, gen, items, Method::ta_rag, 5, 2);
    CHECK(report.mean_accuracy == doctest::Approx(0.25));
    CHECK(report.std_dev == doctest::Approx(0.0));
    CHECK(report.runs == 2);
    REQUIRE(report.per_run_accuracy.size() == 2);
    CHECK(report.per_run_accuracy[0] == doctest::Approx(0.25));
}

TEST_CASE("overlap-oracle generator solves the planted items; stubs give zero variance") {
    StubEmbedder emb;
    auto index = build_corpus_index(eval_docs(), emb, nullptr, {});
    OverlapOracleLlm gen;
    auto report = run_eval(index, &emb, nullptr, gen, eval_items(), Method::ta_rag, 5, 3);
    CHECK(report.mean_accuracy == doctest::Approx(1.0));
    CHECK(report.std_dev == doctest::Approx(0.0));
    CHECK(report.unparseable_replies == 0);
    CHECK(report.failed_items == 0);
    CHECK(report.mean_latency_ms > 0.0);
    // Per-type accuracy covers exactly the types present.
    CHECK(report.per_query_type_accuracy.size() == 3);
    CHECK(report.per_query_type_accuracy.at("time_interval_years") == doctest::Approx(1.0));
    // Range items resolved, so coverage was measurable.
    CHECK(report.mean_temporal_coverage > 0.0);
}

TEST_CASE("protocol isolation: choices never influence retrieval") {
    StubEmbedder emb;
    auto index = build_corpus_index(eval_docs(), emb, nullptr, {});
    std::string stem = "How did the steel output figures develop from 2015 to 2016?";
    std::vector<McqaItem> items = {
        make_item("p1", stem,
                  {"steel output improved", "alpha", "beta", "gamma"}, 0,
                  QueryType::TimeIntervalYears),
        make_item("p2", stem,
                  {"alpha", "beta", "gamma", "steel output improved"}, 3,
                  QueryType::TimeIntervalYears),
    };
    OverlapOracleLlm gen;
    std::vector<ItemOutcome> outcomes;
    auto report = run_eval(index, &emb, nullptr, gen, items, Method::ta_rag, 5, 1, {}, &outcomes);
    REQUIRE(outcomes.size() == 2);
    // Identical stems retrieve identical hits regardless of the choice lists.
    CHECK(outcomes[0].retrieval.hits == outcomes[1].retrieval.hits);
    // But the predicted label follows the permutation.
    CHECK(outcomes[0].predicted == 0);
    CHECK(outcomes[1].predicted == 3);
    CHECK(report.mean_accuracy == doctest::Approx(1.0));
}

TEST_CASE("provider failures are tallied, not fatal") {
    StubEmbedder emb;
    auto index = build_corpus_index(eval_docs(), emb, nullptr, {});
    FailingLlm gen;
    auto report = run_eval(index, &emb, nullptr, gen, eval_items(), Method::ta_rag, 5, 2);
    CHECK(report.mean_accuracy == doctest::Approx(0.0));
    CHECK(report.failed_items == eval_items().size() * 2);
}

TEST_CASE("compare_methods emits the full method-by-k cross product in order") {
    StubEmbedder emb;
    auto index = build_corpus_index(eval_docs(), emb, nullptr, {});
    ConstantChoiceLlm gen("A");
    auto reports = compare_methods(index, &emb, nullptr, gen, eval_items(),
                                   {Method::ta_rag, Method::bm25}, {1, 3, 5}, 1);
    REQUIRE(reports.size() == 6);
    CHECK(reports[0].method == Method::ta_rag);
    CHECK(reports[0].k == 1);
    CHECK(reports[2].k == 5);
    CHECK(reports[3].method == Method::bm25);
    CHECK(reports[5].k == 5);
    CHECK_THROWS_AS(compare_methods(index, &emb, nullptr, gen, eval_items(), {}, {5}, 1),
                    std::invalid_argument);
}

TEST_CASE("endpoint bias: boundary-only, interior-only, and mixed hit sets") {
    auto index = year_chunk_index(2013, 2019);
    std::vector<TimeInterval> window = {TimeInterval{{2014, 1, 1}, {2018, 1, 1}}};  // 2014..2017

    auto result_with = [&](std::initializer_list<int> years) {
        RetrievalResult r;
        for (int y : years) r.hits.push_back({"y" + std::to_string(y) + "#000000", 1.0f});
        return r;
    };

    {
        // Hits only in the first and last year bucket.
        std::vector<RetrievalResult> rs = {result_with({2014, 2017, 2014})};
        std::vector<std::vector<TimeInterval>> ivs = {window};
        CHECK(endpoint_bias_score(rs, ivs, index) == doctest::Approx(1.0));
    }
    {
        // Hits only in interior buckets.
        std::vector<RetrievalResult> rs = {result_with({2015, 2016})};
        std::vector<std::vector<TimeInterval>> ivs = {window};
        CHECK(endpoint_bias_score(rs, ivs, index) == doctest::Approx(0.0));
    }
    {
        // 3 of 10 hits touch only a boundary bucket.
        std::vector<RetrievalResult> rs = {
            result_with({2014, 2017, 2014, 2015, 2015, 2016, 2016, 2015, 2016, 2015})};
        std::vector<std::vector<TimeInterval>> ivs = {window};
        CHECK(endpoint_bias_score(rs, ivs, index) == doctest::Approx(0.3));
    }
    {
        // A hit overlapping boundary AND interior buckets is not boundary-only.
        CorpusIndex span_index = year_chunk_index(2013, 2019);
        ChunkRecord rec;
        rec.chunk_id = "wide#000000";
        rec.doc_id = "wide";
        rec.text = "wide";
        rec.token_count = 1;
        rec.pub_time_est = {2014, 1, 1};
        rec.event_intervals = {TimeInterval{{2014, 1, 1}, {2016, 1, 1}}};
        span_index.chunks.push_back(rec);
        span_index.rebuild_lookup();
        RetrievalResult r;
        r.hits.push_back({"wide#000000", 1.0f});
        std::vector<RetrievalResult> rs = {r};
        std::vector<std::vector<TimeInterval>> ivs = {window};
        CHECK(endpoint_bias_score(rs, ivs, span_index) == doctest::Approx(0.0));
    }
    // Empty inputs contribute nothing; mismatched arity is an error.
    std::vector<RetrievalResult> none;
    std::vector<std::vector<TimeInterval>> no_ivs;
    CHECK(endpoint_bias_score(none, no_ivs, index) == doctest::Approx(0.0));
    std::vector<RetrievalResult> one = {result_with({2014})};
    CHECK_THROWS_AS(endpoint_bias_score(one, no_ivs, index), std::invalid_argument);
}

TEST_CASE("mcqa jsonl round trip and validation") {
    TempFile f("tarag_test_mcqa.jsonl");
    auto items = eval_items();
    save_mcqa_jsonl(items, f.path);
    auto loaded = load_mcqa_jsonl(f.path);
    REQUIRE(loaded.size() == items.size());
    for (std::size_t i = 0; i < items.size(); ++i) {
        CHECK(loaded[i].item_id == items[i].item_id);
        CHECK(loaded[i].question == items[i].question);
        CHECK(loaded[i].choices == items[i].choices);
        CHECK(loaded[i].gold_index == items[i].gold_index);
        CHECK(loaded[i].query_type == items[i].query_type);
    }

    {
        std::ofstream out(f.path, std::ios::trunc);
        out << R"({"question": "q", "choices": ["a","b","c"], "gold_index": 0, "query_type": "specific_year_trend"})"
            << "\n";
    }
    CHECK_THROWS_AS(load_mcqa_jsonl(f.path), Error);  // only 3 choices
}

TEST_CASE("report artifacts: table, json, svg") {
    StubEmbedder emb;
    auto index = build_corpus_index(eval_docs(), emb, nullptr, {});
    OverlapOracleLlm gen;
    auto reports = compare_methods(index, &emb, nullptr, gen, eval_items(),
                                   {Method::ta_rag, Method::naive}, {5, 10}, 1);

    auto table = reports_table(reports);
    CHECK(table.find("ta_rag") != std::string::npos);
    CHECK(table.find("naive") != std::string::npos);

    TempFile j("tarag_test_reports.json");
    write_reports_json(reports, j.path);
    {
        std::ifstream in(j.path);
        std::string body((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        CHECK(body.find("\"mean_accuracy\"") != std::string::npos);
        CHECK(body.find("\"ta_rag\"") != std::string::npos);
    }

    TempFile s("tarag_test_plot.svg");
    write_accuracy_plot_svg(reports, s.path);
    {
        std::ifstream in(s.path);
        std::string body((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        CHECK(body.find("<svg") != std::string::npos);
        CHECK(body.find("<polyline") != std::string::npos);
    }
}
