#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace tarag {

// Proleptic Gregorian calendar date at day resolution. Convertible to/from a
// signed day count since 1970-01-01 (the std::chrono civil epoch).
struct Date {
    int year = 1970;
    int month = 1;  // 1..12
    int day = 1;    // 1..31

    auto operator<=>(const Date&) const = default;

    [[nodiscard]] static bool is_valid(int year, int month, int day);
    [[nodiscard]] bool valid() const { return is_valid(year, month, day); }

    [[nodiscard]] std::int64_t to_days() const;
    [[nodiscard]] static Date from_days(std::int64_t days);
    [[nodiscard]] Date add_days(std::int64_t n) const { return from_days(to_days() + n); }

    [[nodiscard]] std::string to_iso() const;                               // "YYYY-MM-DD"
    [[nodiscard]] static std::optional<Date> parse_iso(const std::string& s);

    // First day of the calendar period containing this date.
    [[nodiscard]] Date first_of_month() const { return {year, month, 1}; }
    [[nodiscard]] Date first_of_year() const { return {year, 1, 1}; }
};

// Half-open [start, end) interval of calendar days. Zero-length intervals are
// invalid; the constructor enforces start < end.
struct TimeInterval {
    Date start;  // inclusive
    Date end;    // exclusive

    TimeInterval(Date s, Date e);
    auto operator<=>(const TimeInterval&) const = default;

    [[nodiscard]] std::int64_t day_count() const { return end.to_days() - start.to_days(); }

    [[nodiscard]] static TimeInterval whole_year(int year);
    [[nodiscard]] static TimeInterval whole_month(int year, int month);
    [[nodiscard]] static TimeInterval single_day(Date d);
};

[[nodiscard]] bool overlaps(const TimeInterval& a, const TimeInterval& b);

// Intersection of two overlapping intervals. Empty if they do not overlap.
[[nodiscard]] std::optional<TimeInterval> intersect(const TimeInterval& a, const TimeInterval& b);

struct Bounded {
    TimeInterval interval;
};
struct Before {
    Date date;  // exclusive upper bound
};
struct After {
    Date date;  // inclusive lower bound
};
struct Unconstrained {};

using TemporalConstraint = std::variant<Bounded, Before, After, Unconstrained>;

// Clamps relative and unbounded constraints to the corpus timeline and merges
// the results into disjoint, ascending intervals. An empty constraint list
// behaves as Unconstrained. Throws AllConstraintsEmpty when every constraint
// clips to nothing.
[[nodiscard]] std::vector<TimeInterval> resolve_constraints(
    const std::vector<TemporalConstraint>& constraints, const TimeInterval& corpus_bounds);

enum class Granularity { Year, Month, Day };

[[nodiscard]] const char* to_string(Granularity g);

// Anchor granularity from the total day span of the (disjoint) intervals:
// > 1096 days -> Year, 61..1096 -> Month, <= 60 -> Day.
[[nodiscard]] Granularity choose_granularity(const std::vector<TimeInterval>& intervals);

// First day of every calendar period at granularity g that overlaps some
// interval, ascending and deduplicated. When more than max_anchors periods
// qualify, the list is thinned by uniform stride keeping the first and last.
[[nodiscard]] std::vector<Date> sample_anchors(const std::vector<TimeInterval>& intervals,
                                               Granularity g, std::size_t max_anchors);

inline constexpr std::size_t kDefaultMaxAnchors = 128;

[[nodiscard]] const char* month_name(int month);  // "January".."December"

// "In 2018, <q>" / "In January 2011, <q>" / "On March 15, 2020, <q>".
// The templates are normative; downstream embeddings depend on them.
[[nodiscard]] std::string render_anchor(const Date& d, Granularity g, const std::string& q_core);

}  // namespace tarag
