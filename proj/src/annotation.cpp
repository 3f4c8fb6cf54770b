#include "tarag/annotation.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <regex>

#include <nlohmann/json.hpp>

#include "tarag/errors.hpp"
#include "tarag/prompts.hpp"
#include "tarag/text.hpp"

namespace tarag {

const char* to_string(AnnotationSource s) {
    switch (s) {
        case AnnotationSource::llm: return "llm";
        case AnnotationSource::rule: return "rule";
        case AnnotationSource::fallback_pub: return "fallback_pub";
    }
    return "?";
}

namespace {

using nlohmann::json;

enum class MentionKind { FullDate, MonthYear, Year, MonthDay, Month, Weekday, LastQuarter };

struct Mention {
    std::size_t begin = 0;
    std::size_t end = 0;
    MentionKind kind = MentionKind::Year;
    int year = 0;
    int month = 0;
    int day = 0;
    int weekday = 0;  // 0 = Sunday, chrono convention
};

constexpr const char* kMonthAlt =
    "january|february|march|april|may|june|july|august|september|october|november|december|"
    "jan|feb|mar|apr|jun|jul|aug|sept|sep|oct|nov|dec";
constexpr const char* kWeekdayAlt = "monday|tuesday|wednesday|thursday|friday|saturday|sunday";

int parse_month(std::string name) {
    name = to_lower(name);
    static const char* prefixes[] = {"jan", "feb", "mar", "apr", "may", "jun",
                                     "jul", "aug", "sep", "oct", "nov", "dec"};
    for (int i = 0; i < 12; ++i)
        if (name.rfind(prefixes[i], 0) == 0) return i + 1;
    return 0;
}

int parse_weekday(std::string name) {
    name = to_lower(name);
    static const char* days[] = {"sunday", "monday", "tuesday", "wednesday",
                                 "thursday", "friday", "saturday"};
    for (int i = 0; i < 7; ++i)
        if (name == days[i]) return i;
    return -1;
}

const std::regex& mention_regex() {
    static const std::regex re = [] {
        std::string months = std::string("(?:") + kMonthAlt + ")";
        std::string weekdays = std::string("(?:") + kWeekdayAlt + ")";
        // Alternation order is the classification priority; classify_mention
        // re-parses the matched text with the same sub-patterns.
        std::string pattern = "\\b(?:"
                              "\\d{4}-\\d{2}-\\d{2}"                                      // ISO
                              "|" + months + "\\s+\\d{1,2}(?:st|nd|rd|th)?,?\\s+\\d{4}"   // March 5, 2014
                              "|\\d{1,2}(?:st|nd|rd|th)?\\s+(?:of\\s+)?" + months + ",?\\s+\\d{4}"  // 5 March 2014
                              "|" + months + ",?\\s+\\d{4}"                               // March 2014
                              "|" + months + "\\s+\\d{1,2}(?:st|nd|rd|th)?\\b(?!\\s*,?\\s*\\d)"  // March 5
                              "|" + months + "\\b(?!\\s*,?\\s*\\d)"                       // March
                              "|(?:19|20)\\d{2}"                                          // 2014
                              "|" + weekdays +
                              "|last\\s+quarter"
                              ")\\b";
        return std::regex(pattern, std::regex::ECMAScript | std::regex::icase);
    }();
    return re;
}

std::optional<Mention> classify_mention(const std::string& text, std::size_t begin, std::size_t end) {
    static const std::regex iso(R"((\d{4})-(\d{2})-(\d{2}))");
    static const std::regex mdy(std::string("(") + kMonthAlt + R"()\s+(\d{1,2})(?:st|nd|rd|th)?,?\s+(\d{4}))",
                                std::regex::icase);
    static const std::regex dmy(std::string(R"((\d{1,2})(?:st|nd|rd|th)?\s+(?:of\s+)?()") + kMonthAlt +
                                    R"(),?\s+(\d{4}))",
                                std::regex::icase);
    static const std::regex my(std::string("(") + kMonthAlt + R"(),?\s+(\d{4}))", std::regex::icase);
    static const std::regex md(std::string("(") + kMonthAlt + R"()\s+(\d{1,2})(?:st|nd|rd|th)?)",
                               std::regex::icase);
    static const std::regex mon(std::string("(") + kMonthAlt + ")", std::regex::icase);
    static const std::regex yr(R"(((?:19|20)\d{2}))");
    static const std::regex wd(std::string("(") + kWeekdayAlt + ")", std::regex::icase);
    static const std::regex lq(R"(last\s+quarter)", std::regex::icase);

    const std::string s = text.substr(begin, end - begin);
    Mention m;
    m.begin = begin;
    m.end = end;
    std::smatch sm;
    if (std::regex_match(s, sm, iso)) {
        m.kind = MentionKind::FullDate;
        m.year = std::stoi(sm[1]);
        m.month = std::stoi(sm[2]);
        m.day = std::stoi(sm[3]);
    } else if (std::regex_match(s, sm, mdy)) {
        m.kind = MentionKind::FullDate;
        m.month = parse_month(sm[1]);
        m.day = std::stoi(sm[2]);
        m.year = std::stoi(sm[3]);
    } else if (std::regex_match(s, sm, dmy)) {
        m.kind = MentionKind::FullDate;
        m.day = std::stoi(sm[1]);
        m.month = parse_month(sm[2]);
        m.year = std::stoi(sm[3]);
    } else if (std::regex_match(s, sm, my)) {
        m.kind = MentionKind::MonthYear;
        m.month = parse_month(sm[1]);
        m.year = std::stoi(sm[2]);
    } else if (std::regex_match(s, sm, md)) {
        m.kind = MentionKind::MonthDay;
        m.month = parse_month(sm[1]);
        m.day = std::stoi(sm[2]);
    } else if (std::regex_match(s, sm, mon)) {
        m.kind = MentionKind::Month;
        m.month = parse_month(sm[1]);
    } else if (std::regex_match(s, sm, yr)) {
        m.kind = MentionKind::Year;
        m.year = std::stoi(sm[1]);
    } else if (std::regex_match(s, sm, wd)) {
        m.kind = MentionKind::Weekday;
        m.weekday = parse_weekday(to_lower(sm[1].str()));
    } else if (std::regex_match(s, sm, lq)) {
        m.kind = MentionKind::LastQuarter;
    } else {
        return std::nullopt;
    }
    return m;
}

std::vector<Mention> scan_mentions(const std::string& text) {
    std::vector<Mention> out;
    auto begin = std::sregex_iterator(text.begin(), text.end(), mention_regex());
    for (auto it = begin; it != std::sregex_iterator(); ++it) {
        if (auto m = classify_mention(text, std::size_t(it->position()), std::size_t(it->position() + it->length())))
            out.push_back(*m);
    }
    return out;
}

bool year_plausible(int year, const AnnotationOptions& opts) {
    return year >= opts.plausible_min.year && year < opts.plausible_max.year;
}

bool has_explicit_year(const Mention& m) {
    return m.kind == MentionKind::FullDate || m.kind == MentionKind::MonthYear ||
           m.kind == MentionKind::Year;
}

// Period covered by a year-bearing mention.
std::optional<TimeInterval> period_of(const Mention& m) {
    switch (m.kind) {
        case MentionKind::FullDate:
            if (!Date::is_valid(m.year, m.month, m.day)) return std::nullopt;
            return TimeInterval::single_day({m.year, m.month, m.day});
        case MentionKind::MonthYear:
            return TimeInterval::whole_month(m.year, m.month);
        case MentionKind::Year:
            return TimeInterval::whole_year(m.year);
        default:
            return std::nullopt;
    }
}

std::optional<TimeInterval> resolve_relative(const Mention& m, const Date& pub) {
    switch (m.kind) {
        case MentionKind::MonthDay:
            if (!Date::is_valid(pub.year, m.month, m.day)) return std::nullopt;
            return TimeInterval::single_day({pub.year, m.month, m.day});
        case MentionKind::Month:
            return TimeInterval::whole_month(pub.year, m.month);
        case MentionKind::Weekday: {
            // Most recent occurrence on or before the publication date.
            int pub_wd = int((pub.to_days() % 7 + 11) % 7);  // 1970-01-01 was a Thursday
            int delta = (pub_wd - m.weekday + 7) % 7;
            return TimeInterval::single_day(pub.add_days(-delta));
        }
        case MentionKind::LastQuarter: {
            int q_start_month = ((pub.month - 1) / 3) * 3 + 1;  // current quarter start
            Date cur{pub.year, q_start_month, 1};
            Date prev = q_start_month == 1 ? Date{pub.year - 1, 10, 1} : Date{pub.year, q_start_month - 3, 1};
            return TimeInterval{prev, cur};
        }
        default:
            return std::nullopt;
    }
}

// Connector classification for the text immediately before a mention.
enum class Connector { None, Range, Before, After, In };

struct ConnectorHit {
    Connector kind = Connector::None;
    std::size_t begin = 0;       // where the deleted span starts
    bool anchor_start = false;   // "the start of" modifier
    bool anchor_end = false;     // "the end of" modifier
};

ConnectorHit find_connector(const std::string& text, std::size_t mention_begin) {
    const std::size_t window = 48;
    std::size_t from = mention_begin > window ? mention_begin - window : 0;
    std::string tail = text.substr(from, mention_begin - from);

    static const std::regex range_re(R"((?:^|[^a-zA-Z])(from|between)\s+$)", std::regex::icase);
    static const std::regex rel_re(
        R"((?:^|[^a-zA-Z])(?:in\s+the\s+period\s+)?(before|prior\s+to|after|since|following)(\s+the\s+(start|beginning|end)\s+of)?\s+$)",
        std::regex::icase);
    static const std::regex in_re(R"((?:^|[^a-zA-Z])(in|during|within|throughout|on)\s+$)",
                                  std::regex::icase);

    std::smatch sm;
    ConnectorHit hit;
    if (std::regex_search(tail, sm, range_re)) {
        hit.kind = Connector::Range;
        hit.begin = from + std::size_t(sm.position(1));
        return hit;
    }
    if (std::regex_search(tail, sm, rel_re)) {
        std::string word = to_lower(sm[1].str());
        hit.kind = (word == "before" || word == "prior to") ? Connector::Before : Connector::After;
        hit.begin = from + std::size_t(sm.position(1));
        if (sm[3].matched) {
            std::string mod = to_lower(sm[3].str());
            hit.anchor_end = (mod == "end");
            hit.anchor_start = !hit.anchor_end;
        }
        return hit;
    }
    if (std::regex_search(tail, sm, in_re)) {
        hit.kind = Connector::In;
        hit.begin = from + std::size_t(sm.position(1));
        return hit;
    }
    return hit;
}

bool range_closer_between(const std::string& text, std::size_t gap_begin, std::size_t gap_end) {
    static const std::regex closer(R"(^\s*(to|until|through|and)\s*$)", std::regex::icase);
    std::string gap = text.substr(gap_begin, gap_end - gap_begin);
    return std::regex_match(gap, closer);
}

std::optional<json> extract_json(const std::string& reply) {
    auto open = reply.find('{');
    auto close = reply.rfind('}');
    if (open == std::string::npos || close == std::string::npos || close < open) return std::nullopt;
    auto parsed = json::parse(reply.substr(open, close - open + 1), nullptr, false);
    if (parsed.is_discarded()) return std::nullopt;
    return parsed;
}

std::string first_sentences(const std::string& text, std::size_t max_sentences) {
    auto spans = sentence_spans(text);
    std::string out;
    for (std::size_t i = 0; i < std::min(max_sentences, spans.size()); ++i)
        out += text.substr(spans[i].begin, spans[i].end - spans[i].begin);
    return normalize_whitespace(out);
}

std::string tidy_core(std::string s) {
    s = normalize_whitespace(s);
    // Drop spaces the deletions left before closing punctuation.
    std::string out;
    for (char c : s) {
        if (!out.empty() && out.back() == ' ' &&
            (c == '?' || c == '.' || c == ',' || c == '!' || c == ';' || c == ':'))
            out.pop_back();
        out.push_back(c);
    }
    return out;
}

bool has_content_words(const std::string& s) {
    for (const auto& tok : tokenize_lower(s)) {
        bool alpha = std::all_of(tok.begin(), tok.end(),
                                 [](unsigned char c) { return std::isalpha(c) != 0; });
        if (alpha && !tok.empty()) return true;
    }
    return false;
}

std::optional<DocPassResult> parse_doc_pass_reply(const std::string& reply,
                                                  const AnnotationOptions& opts) {
    auto j = extract_json(reply);
    if (!j || !j->contains("pub_time") || !j->contains("abstract")) return std::nullopt;
    if (!(*j)["pub_time"].is_string() || !(*j)["abstract"].is_string()) return std::nullopt;
    auto date = Date::parse_iso((*j)["pub_time"].get<std::string>());
    if (!date || *date < opts.plausible_min || !(*date < opts.plausible_max)) return std::nullopt;
    std::string abstract = first_sentences((*j)["abstract"].get<std::string>(), 2);
    if (abstract.empty()) return std::nullopt;
    return DocPassResult{*date, abstract};
}

}  // namespace

std::optional<Date> find_first_full_date(const std::string& text, const AnnotationOptions& opts) {
    for (const auto& m : scan_mentions(text)) {
        if (m.kind == MentionKind::FullDate && year_plausible(m.year, opts) &&
            Date::is_valid(m.year, m.month, m.day))
            return Date{m.year, m.month, m.day};
    }
    return std::nullopt;
}

bool has_dated_mention(const std::string& text) {
    for (const auto& m : scan_mentions(text))
        if (has_explicit_year(m)) return true;
    return false;
}

std::vector<TimeInterval> extract_event_intervals(const std::string& text,
                                                  const std::optional<Date>& pub) {
    AnnotationOptions opts;
    auto mentions = scan_mentions(text);
    std::vector<TimeInterval> intervals;
    for (std::size_t i = 0; i < mentions.size(); ++i) {
        const auto& m = mentions[i];
        if (has_explicit_year(m)) {
            if (!year_plausible(m.year, opts)) continue;
            auto period = period_of(m);
            if (!period) continue;
            // "from A to B" / "between A and B" folds into one interval.
            auto conn = find_connector(text, m.begin);
            if (conn.kind == Connector::Range && i + 1 < mentions.size() &&
                has_explicit_year(mentions[i + 1]) &&
                range_closer_between(text, m.end, mentions[i + 1].begin)) {
                auto second = period_of(mentions[i + 1]);
                if (second && year_plausible(mentions[i + 1].year, opts) &&
                    period->start < second->end) {
                    intervals.emplace_back(period->start, second->end);
                    ++i;
                    continue;
                }
            }
            intervals.push_back(*period);
        } else if (pub) {
            if (auto iv = resolve_relative(m, *pub)) intervals.push_back(*iv);
        }
    }
    std::sort(intervals.begin(), intervals.end());
    intervals.erase(std::unique(intervals.begin(), intervals.end()), intervals.end());
    return intervals;
}

DocPassResult doc_pass_one(LlmProvider* llm, const std::string& head, const std::string& tail,
                           const std::optional<std::string>& metadata_hint,
                           const AnnotationOptions& opts) {
    if (normalize_whitespace(head).empty()) throw std::invalid_argument("document head is empty");

    if (llm) {
        std::string prompt = prompts::fill(prompts::fill(prompts::kDocPassOne, "head", head), "tail", tail);
        if (auto r = parse_doc_pass_reply(llm->complete(prompt), opts)) return *r;
        if (auto r = parse_doc_pass_reply(llm->complete(prompt + prompts::kRepairSuffix), opts))
            return *r;
    }

    // Rule route: first full date in the head wins over the tail; coarser
    // mentions resolve to the first day of their period.
    auto build = [&](const std::string& text) -> std::optional<Date> {
        if (auto d = find_first_full_date(text, opts)) return d;
        return std::nullopt;
    };
    std::optional<Date> pub = build(head);
    if (!pub) pub = build(tail);
    if (!pub) {
        for (const std::string* part : {&head, &tail}) {
            for (const auto& m : scan_mentions(*part)) {
                if (m.kind == MentionKind::MonthYear && year_plausible(m.year, opts)) {
                    pub = Date{m.year, m.month, 1};
                    break;
                }
            }
            if (pub) break;
        }
    }
    if (!pub) {
        for (const std::string* part : {&head, &tail}) {
            for (const auto& m : scan_mentions(*part)) {
                if (m.kind == MentionKind::Year && year_plausible(m.year, opts)) {
                    pub = Date{m.year, 1, 1};
                    break;
                }
            }
            if (pub) break;
        }
    }
    if (!pub && metadata_hint) {
        if (auto d = Date::parse_iso(*metadata_hint)) {
            pub = d;
        } else if (auto d2 = find_first_full_date(*metadata_hint, opts)) {
            pub = d2;
        }
    }
    if (!pub) throw NoTemporalSignal{"(unidentified document)"};
    return DocPassResult{*pub, first_sentences(head, 2)};
}

ChunkAnnotation chunk_pass_two(LlmProvider* llm, const std::string& chunk_text,
                               const DocPassResult& doc_context, const AnnotationOptions&) {
    if (normalize_whitespace(chunk_text).empty()) throw std::invalid_argument("chunk is empty");

    if (llm) {
        std::string prompt = prompts::fill(prompts::kChunkPassTwo, "pub_time", doc_context.pub_time_est.to_iso());
        prompt = prompts::fill(prompt, "abstract", doc_context.abstract);
        prompt = prompts::fill(prompt, "chunk", chunk_text);
        if (auto j = extract_json(llm->complete(prompt)); j && j->contains("intervals")) {
            std::vector<TimeInterval> intervals;
            bool ok = true;
            for (const auto& item : (*j)["intervals"]) {
                auto s = item.contains("start") && item["start"].is_string()
                             ? Date::parse_iso(item["start"].get<std::string>())
                             : std::nullopt;
                auto e = item.contains("end") && item["end"].is_string()
                             ? Date::parse_iso(item["end"].get<std::string>())
                             : std::nullopt;
                if (!s || !e || !(*s < *e)) {
                    ok = false;
                    break;
                }
                intervals.emplace_back(*s, *e);
            }
            if (ok && !intervals.empty()) {
                std::sort(intervals.begin(), intervals.end());
                intervals.erase(std::unique(intervals.begin(), intervals.end()), intervals.end());
                return {intervals, AnnotationSource::llm};
            }
        }
    }

    auto intervals = extract_event_intervals(chunk_text, doc_context.pub_time_est);
    if (!intervals.empty()) return {intervals, AnnotationSource::rule};
    return {{TimeInterval::single_day(doc_context.pub_time_est)}, AnnotationSource::fallback_pub};
}

DecomposedQuery decompose_question(LlmProvider* llm, const std::string& question,
                                   const AnnotationOptions& opts) {
    if (normalize_whitespace(question).empty()) throw std::invalid_argument("question is empty");

    if (llm) {
        std::string prompt = prompts::fill(prompts::kDecomposeQuestion, "question", question);
        if (auto j = extract_json(llm->complete(prompt));
            j && j->contains("q_core") && (*j)["q_core"].is_string() && j->contains("constraints")) {
            std::string q_core = normalize_whitespace((*j)["q_core"].get<std::string>());
            std::vector<TemporalConstraint> constraints;
            bool ok = !q_core.empty() && !has_dated_mention(q_core) && has_content_words(q_core);
            for (const auto& c : (*j)["constraints"]) {
                if (!ok) break;
                std::string kind = c.value("kind", "");
                if (kind == "bounded") {
                    auto s = Date::parse_iso(c.value("start", ""));
                    auto e = Date::parse_iso(c.value("end", ""));
                    if (s && e && *s < *e)
                        constraints.push_back(Bounded{TimeInterval{*s, *e}});
                    else
                        ok = false;
                } else if (kind == "before") {
                    auto d = Date::parse_iso(c.value("date", ""));
                    ok = d.has_value();
                    if (d) constraints.push_back(Before{*d});
                } else if (kind == "after") {
                    auto d = Date::parse_iso(c.value("date", ""));
                    ok = d.has_value();
                    if (d) constraints.push_back(After{*d});
                } else if (kind == "unconstrained") {
                    constraints.push_back(Unconstrained{});
                } else {
                    ok = false;
                }
            }
            if (ok) {
                if (constraints.empty()) constraints.push_back(Unconstrained{});
                return {q_core, constraints, AnnotationSource::llm};
            }
        }
    }

    // Rule grammar. Only year-bearing mentions participate; deleting their
    // spans (plus the introducing connector) yields the core.
    std::vector<Mention> mentions;
    for (const auto& m : scan_mentions(question))
        if (has_explicit_year(m) && year_plausible(m.year, opts)) mentions.push_back(m);

    std::vector<TemporalConstraint> constraints;
    std::vector<std::pair<std::size_t, std::size_t>> deleted;
    for (std::size_t i = 0; i < mentions.size(); ++i) {
        const auto& m = mentions[i];
        auto period = period_of(m);
        if (!period) continue;
        auto conn = find_connector(question, m.begin);
        if (conn.kind == Connector::Range && i + 1 < mentions.size() &&
            range_closer_between(question, m.end, mentions[i + 1].begin)) {
            auto second = period_of(mentions[i + 1]);
            if (second && period->start < second->end) {
                constraints.push_back(Bounded{TimeInterval{period->start, second->end}});
                deleted.emplace_back(conn.begin, mentions[i + 1].end);
                ++i;
                continue;
            }
        }
        switch (conn.kind) {
            case Connector::Before:
                constraints.push_back(Before{conn.anchor_end ? period->end : period->start});
                deleted.emplace_back(conn.begin, m.end);
                break;
            case Connector::After:
                constraints.push_back(After{conn.anchor_start ? period->start : period->end});
                deleted.emplace_back(conn.begin, m.end);
                break;
            case Connector::In:
                constraints.push_back(Bounded{*period});
                deleted.emplace_back(conn.begin, m.end);
                break;
            default:
                constraints.push_back(Bounded{*period});
                deleted.emplace_back(m.begin, m.end);
                break;
        }
    }

    std::string core;
    std::size_t cursor = 0;
    for (const auto& [b, e] : deleted) {
        if (b > cursor) core += question.substr(cursor, b - cursor);
        cursor = std::max(cursor, e);
    }
    if (cursor < question.size()) core += question.substr(cursor);
    core = tidy_core(core);
    if (!has_content_words(core)) throw EmptyCore{};
    if (constraints.empty()) constraints.push_back(Unconstrained{});
    return {core, constraints, AnnotationSource::rule};
}

}  // namespace tarag
