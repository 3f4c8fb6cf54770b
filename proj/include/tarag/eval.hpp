#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tarag/context_builder.hpp"
#include "tarag/retrieval.hpp"

namespace tarag {

enum class QueryType {
    SpecificYearTrend,
    BeforeYearAnchor,
    BeforeMonthAnchor,
    AfterYearAnchor,
    AfterMonthAnchor,
    TimeIntervalYears,
    TimeIntervalMonths,
};

[[nodiscard]] const char* to_string(QueryType t);
[[nodiscard]] std::optional<QueryType> query_type_from_string(const std::string& s);

struct McqaItem {
    std::string item_id;
    std::string question;  // stem; the only text retrieval ever sees
    std::array<std::string, 4> choices;
    int gold_index = 0;  // 0..3
    QueryType query_type = QueryType::SpecificYearTrend;
};

std::vector<McqaItem> load_mcqa_jsonl(const std::string& path);
void save_mcqa_jsonl(const std::vector<McqaItem>& items, const std::string& path);

// Reply parsing, first rule that applies wins: a leading choice letter A-D,
// a leading digit 1-4, or a (case-insensitive) exact choice-text match.
// Returns -1 when nothing applies; such replies score as incorrect.
[[nodiscard]] int parse_generator_reply(const std::string& reply,
                                        const std::array<std::string, 4>& choices);

struct EvalOptions {
    std::size_t context_token_budget = 16384;
    bool record_retrievals = false;  // keep per-item retrieval results of the last run
};

struct ItemOutcome {
    std::string item_id;
    int predicted = -1;
    bool correct = false;
    bool unparseable_reply = false;
    bool provider_failure = false;
    RetrievalResult retrieval;
    std::vector<TimeInterval> resolved_intervals;  // rule decomposition of the stem
};

struct EvalReport {
    Method method = Method::ta_rag;
    std::size_t k = 0;
    std::size_t runs = 0;
    std::vector<double> per_run_accuracy;
    double mean_accuracy = 0.0;
    double std_dev = 0.0;  // population std over runs
    std::map<std::string, double> per_query_type_accuracy;
    double mean_temporal_coverage = 0.0;  // over items with resolvable constraints
    double endpoint_bias = 0.0;           // range-type items only
    double mean_latency_ms = 0.0;
    std::size_t unparseable_replies = 0;
    std::size_t failed_items = 0;
};

// Full MCQA protocol: retrieval over the bare stem, then the generator sees
// (chronological context, stem, choices) and must answer with one choice.
// Provider errors mark the item incorrect and are tallied; they never abort
// the run.
EvalReport run_eval(const CorpusIndex& index, EmbeddingProvider* embedder, LlmProvider* decomposer,
                    LlmProvider& generator, const std::vector<McqaItem>& eval_set, Method method,
                    std::size_t k, std::size_t runs, const EvalOptions& opts = {},
                    std::vector<ItemOutcome>* last_run_outcomes = nullptr);

// Fraction of hits whose event intervals touch only the first or last
// granularity bucket of their query's range. results[i] pairs with
// intervals[i]; results with no hits or empty intervals contribute nothing.
[[nodiscard]] double endpoint_bias_score(std::span<const RetrievalResult> results,
                                         std::span<const std::vector<TimeInterval>> intervals,
                                         const CorpusIndex& index,
                                         std::optional<Granularity> g = std::nullopt);

// Cross product of methods and k values.
std::vector<EvalReport> compare_methods(const CorpusIndex& index, EmbeddingProvider* embedder,
                                        LlmProvider* decomposer, LlmProvider& generator,
                                        const std::vector<McqaItem>& eval_set,
                                        const std::vector<Method>& methods,
                                        const std::vector<std::size_t>& k_values, std::size_t runs,
                                        const EvalOptions& opts = {});

[[nodiscard]] std::string reports_table(const std::vector<EvalReport>& reports);
void write_reports_json(const std::vector<EvalReport>& reports, const std::string& path);
void write_accuracy_plot_svg(const std::vector<EvalReport>& reports, const std::string& path);

}  // namespace tarag
