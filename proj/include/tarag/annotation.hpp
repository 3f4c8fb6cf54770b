#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tarag/providers.hpp"
#include "tarag/temporal.hpp"

namespace tarag {

enum class AnnotationSource { llm, rule, fallback_pub };

[[nodiscard]] const char* to_string(AnnotationSource s);

struct DocPassResult {
    Date pub_time_est;
    std::string abstract;  // 1-2 sentences
};

struct ChunkAnnotation {
    std::vector<TimeInterval> event_intervals;  // non-empty, deduplicated
    AnnotationSource source = AnnotationSource::rule;
};

struct DecomposedQuery {
    std::string q_core;
    std::vector<TemporalConstraint> constraints;
    AnnotationSource source = AnnotationSource::rule;
};

struct AnnotationOptions {
    std::size_t head_chars = 1500;
    Date plausible_min{1900, 1, 1};
    Date plausible_max{2100, 1, 1};  // exclusive
};

// Pass one of document annotation: estimate the publication date and a short
// abstract from the document's head and tail. The LLM route (when llm is
// non-null) is tried first with one JSON-repair retry, then the rule parser on
// head+tail, then the metadata hint. Throws NoTemporalSignal when all routes
// fail.
DocPassResult doc_pass_one(LlmProvider* llm, const std::string& head, const std::string& tail,
                           const std::optional<std::string>& metadata_hint = std::nullopt,
                           const AnnotationOptions& opts = {});

// Pass two: extract event intervals from one chunk, resolving abbreviated
// mentions against the document context. Never fails: a chunk with no
// temporal signal gets the one-day publication-date interval.
ChunkAnnotation chunk_pass_two(LlmProvider* llm, const std::string& chunk_text,
                               const DocPassResult& doc_context,
                               const AnnotationOptions& opts = {});

// Splits a question into a temporally neutral core and temporal constraints.
// The rule route recognizes "in <Y>", "before <Y|M Y>", "after <Y|M Y>" and
// "from <A> to <B>" (plus bare period mentions, which become Bounded) and
// deletes the matched spans. Throws EmptyCore when nothing but temporal
// expressions remains.
DecomposedQuery decompose_question(LlmProvider* llm, const std::string& question,
                                   const AnnotationOptions& opts = {});

// --- rule-grammar internals, exposed for tests and the oracle suites ---

// Event intervals the rule extractor finds in free text. When pub is given,
// year-less mentions (bare months, weekdays, "last quarter") are resolved
// against it; otherwise they are skipped.
[[nodiscard]] std::vector<TimeInterval> extract_event_intervals(const std::string& text,
                                                                const std::optional<Date>& pub);

// First explicit full date (day precision) within the plausibility window.
[[nodiscard]] std::optional<Date> find_first_full_date(const std::string& text,
                                                       const AnnotationOptions& opts = {});

// True when the text contains a date expression with an explicit year.
[[nodiscard]] bool has_dated_mention(const std::string& text);

}  // namespace tarag
