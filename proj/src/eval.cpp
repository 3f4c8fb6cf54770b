#include "tarag/eval.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tarag/errors.hpp"
#include "tarag/prompts.hpp"
#include "tarag/text.hpp"

namespace tarag {

using nlohmann::json;

const char* to_string(QueryType t) {
    switch (t) {
        case QueryType::SpecificYearTrend: return "specific_year_trend";
        case QueryType::BeforeYearAnchor: return "before_year_anchor";
        case QueryType::BeforeMonthAnchor: return "before_month_anchor";
        case QueryType::AfterYearAnchor: return "after_year_anchor";
        case QueryType::AfterMonthAnchor: return "after_month_anchor";
        case QueryType::TimeIntervalYears: return "time_interval_years";
        case QueryType::TimeIntervalMonths: return "time_interval_months";
    }
    return "?";
}

std::optional<QueryType> query_type_from_string(const std::string& s) {
    static const std::pair<const char*, QueryType> table[] = {
        {"specific_year_trend", QueryType::SpecificYearTrend},
        {"before_year_anchor", QueryType::BeforeYearAnchor},
        {"before_month_anchor", QueryType::BeforeMonthAnchor},
        {"after_year_anchor", QueryType::AfterYearAnchor},
        {"after_month_anchor", QueryType::AfterMonthAnchor},
        {"time_interval_years", QueryType::TimeIntervalYears},
        {"time_interval_months", QueryType::TimeIntervalMonths},
    };
    for (const auto& [name, type] : table)
        if (s == name) return type;
    return std::nullopt;
}

std::vector<McqaItem> load_mcqa_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error{"cannot open " + path};
    std::vector<McqaItem> items;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (normalize_whitespace(line).empty()) continue;
        auto j = json::parse(line, nullptr, false);
        const std::string where = " (line " + std::to_string(line_no) + " of " + path + ")";
        if (j.is_discarded()) throw Error{"unparseable eval item" + where};
        McqaItem item;
        item.item_id = j.value("item_id", "item-" + std::to_string(line_no));
        item.question = j.at("question").get<std::string>();
        auto choices = j.at("choices");
        if (!choices.is_array() || choices.size() != 4)
            throw Error{"eval item needs exactly 4 choices" + where};
        for (std::size_t i = 0; i < 4; ++i) item.choices[i] = choices[i].get<std::string>();
        item.gold_index = j.at("gold_index").get<int>();
        if (item.gold_index < 0 || item.gold_index > 3)
            throw Error{"gold_index out of range" + where};
        auto type = query_type_from_string(j.value("query_type", ""));
        if (!type) throw Error{"unknown query_type" + where};
        item.query_type = *type;
        items.push_back(std::move(item));
    }
    return items;
}

void save_mcqa_jsonl(const std::vector<McqaItem>& items, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error{"cannot open " + path + " for writing"};
    for (const auto& item : items) {
        json j = {{"item_id", item.item_id},
                  {"question", item.question},
                  {"choices", item.choices},
                  {"gold_index", item.gold_index},
                  {"query_type", to_string(item.query_type)}};
        out << j.dump() << "\n";
    }
}

int parse_generator_reply(const std::string& reply, const std::array<std::string, 4>& choices) {
    std::string trimmed = normalize_whitespace(reply);
    if (trimmed.empty()) return -1;
    char first = char(std::toupper(static_cast<unsigned char>(trimmed[0])));
    bool lone = trimmed.size() == 1 || !std::isalnum(static_cast<unsigned char>(trimmed[1]));
    if (first >= 'A' && first <= 'D' && lone) return first - 'A';
    if (first >= '1' && first <= '4' && lone) return first - '1';
    std::string lowered = to_lower(trimmed);
    for (int i = 0; i < 4; ++i)
        if (lowered == to_lower(normalize_whitespace(choices[i]))) return i;
    return -1;
}

namespace {

std::string generator_prompt(const StructuredContext& ctx, const McqaItem& item) {
    std::string prompt = prompts::fill(prompts::kGenerateAnswer, "context", ctx.rendered);
    prompt = prompts::fill(prompt, "question", item.question);
    prompt = prompts::fill(prompt, "choice_a", item.choices[0]);
    prompt = prompts::fill(prompt, "choice_b", item.choices[1]);
    prompt = prompts::fill(prompt, "choice_c", item.choices[2]);
    return prompts::fill(prompt, "choice_d", item.choices[3]);
}

std::vector<TimeInterval> rule_intervals_for_stem(const CorpusIndex& index,
                                                  const std::string& stem) {
    try {
        auto decomposition = decompose_question(nullptr, stem);
        return resolve_constraints(decomposition.constraints, index.manifest.corpus_bounds());
    } catch (const Error&) {
        return {};
    } catch (const std::invalid_argument&) {
        return {};
    }
}

bool is_range_type(QueryType t) {
    return t == QueryType::TimeIntervalYears || t == QueryType::TimeIntervalMonths;
}

}  // namespace

EvalReport run_eval(const CorpusIndex& index, EmbeddingProvider* embedder, LlmProvider* decomposer,
                    LlmProvider& generator, const std::vector<McqaItem>& eval_set, Method method,
                    std::size_t k, std::size_t runs, const EvalOptions& opts,
                    std::vector<ItemOutcome>* last_run_outcomes) {
    if (eval_set.empty()) throw std::invalid_argument("eval set is empty");
    if (runs == 0) throw std::invalid_argument("runs must be >= 1");

    Retriever retriever(index);
    EvalReport report;
    report.method = method;
    report.k = k;
    report.runs = runs;

    std::map<std::string, std::pair<std::size_t, std::size_t>> per_type;  // correct, total
    double coverage_sum = 0.0;
    std::size_t coverage_n = 0;
    double latency_sum = 0.0;
    std::size_t latency_n = 0;
    std::vector<RetrievalResult> range_results;
    std::vector<std::vector<TimeInterval>> range_intervals;

    for (std::size_t run = 0; run < runs; ++run) {
        const bool last_run = run + 1 == runs;
        std::size_t correct = 0;
        std::vector<ItemOutcome> outcomes;

        for (const auto& item : eval_set) {
            ItemOutcome outcome;
            outcome.item_id = item.item_id;
            try {
                // The retrieval path sees the bare stem only; choices are
                // introduced after retrieval has completed.
                RetrievalRequest req{item.question, k, method, std::nullopt, std::nullopt};
                outcome.retrieval = retriever.retrieve(req, embedder, decomposer);
                auto ctx = build_context(outcome.retrieval.hits, index, opts.context_token_budget);
                std::string reply = generator.complete(generator_prompt(ctx, item));
                outcome.predicted = parse_generator_reply(reply, item.choices);
                outcome.unparseable_reply = outcome.predicted < 0;
                outcome.correct = outcome.predicted == item.gold_index;
            } catch (const ProviderUnavailable&) {
                outcome.provider_failure = true;
            }
            if (outcome.correct) ++correct;

            auto& [type_correct, type_total] = per_type[to_string(item.query_type)];
            ++type_total;
            if (outcome.correct) ++type_correct;
            if (outcome.unparseable_reply) ++report.unparseable_replies;
            if (outcome.provider_failure) ++report.failed_items;

            if (last_run) {
                outcome.resolved_intervals = rule_intervals_for_stem(index, item.question);
                latency_sum += outcome.retrieval.diagnostics.elapsed_ms;
                ++latency_n;
                if (!outcome.resolved_intervals.empty() && !outcome.retrieval.hits.empty()) {
                    coverage_sum +=
                        temporal_coverage(outcome.retrieval, index, outcome.resolved_intervals,
                                          choose_granularity(outcome.resolved_intervals));
                    ++coverage_n;
                }
                if (is_range_type(item.query_type) && !outcome.resolved_intervals.empty()) {
                    range_results.push_back(outcome.retrieval);
                    range_intervals.push_back(outcome.resolved_intervals);
                }
                if (last_run_outcomes || opts.record_retrievals) outcomes.push_back(outcome);
            }
        }
        report.per_run_accuracy.push_back(double(correct) / double(eval_set.size()));
        if (last_run && last_run_outcomes) *last_run_outcomes = std::move(outcomes);
    }

    double mean = 0.0;
    for (double a : report.per_run_accuracy) mean += a;
    mean /= double(runs);
    double var = 0.0;
    for (double a : report.per_run_accuracy) var += (a - mean) * (a - mean);
    report.mean_accuracy = mean;
    report.std_dev = std::sqrt(var / double(runs));
    for (const auto& [type, counts] : per_type)
        report.per_query_type_accuracy[type] = double(counts.first) / double(counts.second);
    report.mean_temporal_coverage = coverage_n ? coverage_sum / double(coverage_n) : 0.0;
    report.mean_latency_ms = latency_n ? latency_sum / double(latency_n) : 0.0;
    report.endpoint_bias = endpoint_bias_score(range_results, range_intervals, index);
    return report;
}

double endpoint_bias_score(std::span<const RetrievalResult> results,
                           std::span<const std::vector<TimeInterval>> intervals,
                           const CorpusIndex& index, std::optional<Granularity> g) {
    if (results.size() != intervals.size())
        throw std::invalid_argument("results/intervals length mismatch");
    std::size_t boundary_only = 0, total = 0;
    for (std::size_t i = 0; i < results.size(); ++i) {
        if (intervals[i].empty() || results[i].hits.empty()) continue;
        Granularity gran = g.value_or(choose_granularity(intervals[i]));
        auto bucket_starts = sample_anchors(intervals[i], gran, std::size_t(-1));
        if (bucket_starts.empty()) continue;
        auto bucket_of = [&](const Date& start) {
            return gran == Granularity::Year    ? TimeInterval::whole_year(start.year)
                   : gran == Granularity::Month ? TimeInterval::whole_month(start.year, start.month)
                                                : TimeInterval::single_day(start);
        };
        TimeInterval first = bucket_of(bucket_starts.front());
        TimeInterval last = bucket_of(bucket_starts.back());
        for (const auto& hit : results[i].hits) {
            ++total;
            bool touches_boundary = false, touches_interior = false;
            for (const auto& iv : index.chunk(hit.chunk_id).event_intervals) {
                for (const auto& start : bucket_starts) {
                    TimeInterval bucket = bucket_of(start);
                    if (!overlaps(iv, bucket)) continue;
                    if (bucket == first || bucket == last)
                        touches_boundary = true;
                    else
                        touches_interior = true;
                }
            }
            if (touches_boundary && !touches_interior) ++boundary_only;
        }
    }
    return total ? double(boundary_only) / double(total) : 0.0;
}

std::vector<EvalReport> compare_methods(const CorpusIndex& index, EmbeddingProvider* embedder,
                                        LlmProvider* decomposer, LlmProvider& generator,
                                        const std::vector<McqaItem>& eval_set,
                                        const std::vector<Method>& methods,
                                        const std::vector<std::size_t>& k_values, std::size_t runs,
                                        const EvalOptions& opts) {
    if (methods.empty() || k_values.empty())
        throw std::invalid_argument("methods and k values must be non-empty");
    std::vector<EvalReport> reports;
    for (Method m : methods)
        for (std::size_t k : k_values)
            reports.push_back(run_eval(index, embedder, decomposer, generator, eval_set, m, k, runs, opts));
    return reports;
}

std::string reports_table(const std::vector<EvalReport>& reports) {
    std::ostringstream out;
    out << "method    k     accuracy         coverage  endpt-bias  fails\n";
    for (const auto& r : reports) {
        char line[128];
        std::snprintf(line, sizeof line, "%-8s  %-4zu  %6.2f%% +-%.2f%%  %8.3f  %10.3f  %5zu\n",
                      to_string(r.method), r.k, 100.0 * r.mean_accuracy, 100.0 * r.std_dev,
                      r.mean_temporal_coverage, r.endpoint_bias, r.failed_items);
        out << line;
    }
    return out.str();
}

namespace {

json report_to_json(const EvalReport& r) {
    return {{"method", to_string(r.method)},
            {"k", r.k},
            {"runs", r.runs},
            {"per_run_accuracy", r.per_run_accuracy},
            {"mean_accuracy", r.mean_accuracy},
            {"std_dev", r.std_dev},
            {"per_query_type_accuracy", r.per_query_type_accuracy},
            {"mean_temporal_coverage", r.mean_temporal_coverage},
            {"endpoint_bias", r.endpoint_bias},
            {"mean_latency_ms", r.mean_latency_ms},
            {"unparseable_replies", r.unparseable_replies},
            {"failed_items", r.failed_items}};
}

}  // namespace

void write_reports_json(const std::vector<EvalReport>& reports, const std::string& path) {
    json arr = json::array();
    for (const auto& r : reports) arr.push_back(report_to_json(r));
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error{"cannot open " + path + " for writing"};
    out << arr.dump(2) << "\n";
}

void write_accuracy_plot_svg(const std::vector<EvalReport>& reports, const std::string& path) {
    // Accuracy vs k, one polyline per method.
    constexpr int width = 640, height = 420, margin = 60;
    std::size_t max_k = 1;
    for (const auto& r : reports) max_k = std::max(max_k, r.k);

    auto x_of = [&](std::size_t k) {
        return margin + double(width - 2 * margin) * double(k) / double(max_k);
    };
    auto y_of = [&](double acc) { return height - margin - double(height - 2 * margin) * acc; };

    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
    std::map<std::string, std::vector<const EvalReport*>> by_method;
    for (const auto& r : reports) by_method[to_string(r.method)].push_back(&r);

    std::ostringstream svg;
    svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='" << height
        << "'>\n<rect width='100%' height='100%' fill='white'/>\n";
    svg << "<line x1='" << margin << "' y1='" << height - margin << "' x2='" << width - margin
        << "' y2='" << height - margin << "' stroke='black'/>\n";
    svg << "<line x1='" << margin << "' y1='" << margin << "' x2='" << margin << "' y2='"
        << height - margin << "' stroke='black'/>\n";
    for (int pct = 0; pct <= 100; pct += 25) {
        double y = y_of(pct / 100.0);
        svg << "<text x='" << margin - 38 << "' y='" << y + 4 << "' font-size='12'>" << pct
            << "%</text>\n";
    }
    svg << "<text x='" << width / 2 << "' y='" << height - 16 << "' font-size='13'>k</text>\n";

    int color_idx = 0;
    int legend_y = margin;
    for (auto& [name, rs] : by_method) {
        std::sort(rs.begin(), rs.end(),
                  [](const EvalReport* a, const EvalReport* b) { return a->k < b->k; });
        const char* color = colors[color_idx++ % 4];
        svg << "<polyline fill='none' stroke='" << color << "' stroke-width='2' points='";
        for (const auto* r : rs) svg << x_of(r->k) << "," << y_of(r->mean_accuracy) << " ";
        svg << "'/>\n";
        for (const auto* r : rs)
            svg << "<circle cx='" << x_of(r->k) << "' cy='" << y_of(r->mean_accuracy)
                << "' r='3' fill='" << color << "'/>\n";
        svg << "<text x='" << width - margin - 90 << "' y='" << legend_y << "' font-size='12' fill='"
            << color << "'>" << name << "</text>\n";
        legend_y += 16;
    }
    svg << "</svg>\n";

    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error{"cannot open " + path + " for writing"};
    out << svg.str();
}

}  // namespace tarag
