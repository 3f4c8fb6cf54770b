#include "tarag/temporal.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "tarag/errors.hpp"

namespace tarag {

namespace {

std::chrono::year_month_day to_ymd(const Date& d) {
    return std::chrono::year{d.year} / d.month / d.day;
}

}  // namespace

bool Date::is_valid(int year, int month, int day) {
    if (month < 1 || month > 12 || day < 1 || day > 31) return false;
    return (std::chrono::year{year} / month / day).ok();
}

std::int64_t Date::to_days() const {
    return std::chrono::sys_days{to_ymd(*this)}.time_since_epoch().count();
}

Date Date::from_days(std::int64_t days) {
    std::chrono::year_month_day ymd{std::chrono::sys_days{std::chrono::days{days}}};
    return {int(ymd.year()), int(unsigned(ymd.month())), int(unsigned(ymd.day()))};
}

std::string Date::to_iso() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
    return buf;
}

std::optional<Date> Date::parse_iso(const std::string& s) {
    int y = 0, m = 0, d = 0;
    char extra = 0;
    if (std::sscanf(s.c_str(), "%d-%d-%d%c", &y, &m, &d, &extra) != 3) return std::nullopt;
    if (!is_valid(y, m, d)) return std::nullopt;
    return Date{y, m, d};
}

TimeInterval::TimeInterval(Date s, Date e) : start(s), end(e) {
    if (!s.valid() || !e.valid()) throw std::invalid_argument("TimeInterval: invalid date");
    if (!(s < e)) throw std::invalid_argument("TimeInterval: start must precede end");
}

TimeInterval TimeInterval::whole_year(int year) {
    return {{year, 1, 1}, {year + 1, 1, 1}};
}

TimeInterval TimeInterval::whole_month(int year, int month) {
    Date next = month == 12 ? Date{year + 1, 1, 1} : Date{year, month + 1, 1};
    return {{year, month, 1}, next};
}

TimeInterval TimeInterval::single_day(Date d) {
    return {d, d.add_days(1)};
}

bool overlaps(const TimeInterval& a, const TimeInterval& b) {
    return a.start < b.end && b.start < a.end;
}

std::optional<TimeInterval> intersect(const TimeInterval& a, const TimeInterval& b) {
    if (!overlaps(a, b)) return std::nullopt;
    return TimeInterval{std::max(a.start, b.start), std::min(a.end, b.end)};
}

std::vector<TimeInterval> resolve_constraints(const std::vector<TemporalConstraint>& constraints,
                                              const TimeInterval& corpus_bounds) {
    std::vector<TimeInterval> clipped;
    bool unconstrained = constraints.empty();
    for (const auto& c : constraints) {
        if (std::holds_alternative<Unconstrained>(c)) {
            unconstrained = true;
            continue;
        }
        std::optional<TimeInterval> raw;
        if (const auto* b = std::get_if<Bounded>(&c)) {
            raw = intersect(b->interval, corpus_bounds);
        } else if (const auto* b = std::get_if<Before>(&c)) {
            if (corpus_bounds.start < b->date)
                raw = TimeInterval{corpus_bounds.start, std::min(b->date, corpus_bounds.end)};
        } else if (const auto* a = std::get_if<After>(&c)) {
            if (a->date < corpus_bounds.end)
                raw = TimeInterval{std::max(a->date, corpus_bounds.start), corpus_bounds.end};
        }
        if (raw) clipped.push_back(*raw);
    }
    if (unconstrained) clipped.push_back(corpus_bounds);
    if (clipped.empty()) throw AllConstraintsEmpty{};

    std::sort(clipped.begin(), clipped.end());
    std::vector<TimeInterval> merged;
    for (const auto& iv : clipped) {
        if (!merged.empty() && iv.start <= merged.back().end) {
            if (merged.back().end < iv.end) merged.back().end = iv.end;
        } else {
            merged.push_back(iv);
        }
    }
    return merged;
}

const char* to_string(Granularity g) {
    switch (g) {
        case Granularity::Year: return "year";
        case Granularity::Month: return "month";
        case Granularity::Day: return "day";
    }
    return "?";
}

Granularity choose_granularity(const std::vector<TimeInterval>& intervals) {
    if (intervals.empty()) throw EmptyConstraintSet{};
    // Intervals from resolve_constraints are disjoint, so the union span is a sum.
    std::int64_t span = 0;
    for (const auto& iv : intervals) span += iv.day_count();
    if (span > 1096) return Granularity::Year;
    if (span > 60) return Granularity::Month;
    return Granularity::Day;
}

namespace {

Date truncate_to(const Date& d, Granularity g) {
    switch (g) {
        case Granularity::Year: return d.first_of_year();
        case Granularity::Month: return d.first_of_month();
        case Granularity::Day: return d;
    }
    return d;
}

Date next_period(const Date& d, Granularity g) {
    switch (g) {
        case Granularity::Year: return {d.year + 1, 1, 1};
        case Granularity::Month: return d.month == 12 ? Date{d.year + 1, 1, 1} : Date{d.year, d.month + 1, 1};
        case Granularity::Day: return d.add_days(1);
    }
    return d;
}

}  // namespace

std::vector<Date> sample_anchors(const std::vector<TimeInterval>& intervals, Granularity g,
                                 std::size_t max_anchors) {
    if (max_anchors == 0) throw std::invalid_argument("max_anchors must be >= 1");
    std::vector<Date> anchors;
    for (const auto& iv : intervals) {
        for (Date p = truncate_to(iv.start, g); p < iv.end; p = next_period(p, g)) {
            anchors.push_back(p);
        }
    }
    std::sort(anchors.begin(), anchors.end());
    anchors.erase(std::unique(anchors.begin(), anchors.end()), anchors.end());
    if (anchors.size() <= max_anchors) return anchors;

    // Uniform stride thinning that always keeps the endpoints.
    std::vector<Date> thinned;
    thinned.reserve(max_anchors);
    const std::size_t n = anchors.size();
    if (max_anchors == 1) return {anchors.front()};
    for (std::size_t i = 0; i < max_anchors; ++i) {
        std::size_t idx = std::size_t(std::llround(double(i) * double(n - 1) / double(max_anchors - 1)));
        if (thinned.empty() || thinned.back() != anchors[idx]) thinned.push_back(anchors[idx]);
    }
    return thinned;
}

const char* month_name(int month) {
    static const char* names[] = {"January",   "February", "March",    "April",
                                  "May",       "June",     "July",     "August",
                                  "September", "October",  "November", "December"};
    if (month < 1 || month > 12) throw std::invalid_argument("month out of range");
    return names[month - 1];
}

std::string render_anchor(const Date& d, Granularity g, const std::string& q_core) {
    switch (g) {
        case Granularity::Year:
            return "In " + std::to_string(d.year) + ", " + q_core;
        case Granularity::Month:
            return std::string("In ") + month_name(d.month) + " " + std::to_string(d.year) + ", " + q_core;
        case Granularity::Day:
            return std::string("On ") + month_name(d.month) + " " + std::to_string(d.day) + ", " +
                   std::to_string(d.year) + ", " + q_core;
    }
    return q_core;
}

}  // namespace tarag
