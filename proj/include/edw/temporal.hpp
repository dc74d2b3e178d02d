#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace edw {

// Registered time units, coarse to fine along each tiling chain.
enum class TimeUnit { year, semester, quarter, month, week, day };

inline constexpr TimeUnit kAllUnits[] = {TimeUnit::year, TimeUnit::semester, TimeUnit::quarter,
                                         TimeUnit::month, TimeUnit::week, TimeUnit::day};

std::string_view to_string(TimeUnit unit);
// Throws Error(UnknownUnit).
TimeUnit parse_unit(std::string_view name);

enum class UnitOrder { finer, coarser, equal, incomparable };

std::string_view to_string(UnitOrder order);

// Position of u1 relative to u2 in the finer-than partial order. A unit is
// finer than another only when a constant integer number of its granules
// tiles one granule of the other (12 months per year, 7 days per week, but
// no constant number of weeks per month or days per year).
UnitOrder compare_units(TimeUnit u1, TimeUnit u2);
UnitOrder compare_units(std::string_view u1, std::string_view u2);

// Number of `fine` granules per `coarse` granule, or nullopt when `fine` is
// not finer-or-equal to `coarse`.
std::optional<std::int64_t> granules_per(TimeUnit coarse, TimeUnit fine);

// Granule index since the start of 1970, in one unit.
struct Instant {
    TimeUnit unit = TimeUnit::year;
    std::int64_t tick = 0;

    bool operator==(Instant const &) const = default;
    // Throws Error(MixedUnits) when units differ.
    std::strong_ordering operator<=>(Instant const &other) const;

    Instant plus(std::int64_t ticks) const { return {unit, tick + ticks}; }
};

Instant year_instant(int year);
Instant month_instant(int year, int month);

// "<unit>:<tick>", with the sugar "1990" (year) and "1990-03" (month).
// format(parse(s)) reproduces every canonical spelling.
std::string format_instant(Instant t);
Instant parse_instant(std::string_view text);

// Closed interval over discrete granules; start == end is a single granule.
struct Interval {
    Instant start;
    Instant end;

    bool operator==(Interval const &) const = default;
};

// Checked constructor: same unit, start <= end.
Interval make_interval(Instant start, Instant end);
std::string format_interval(Interval const &interval);

struct TemporalDomain {
    TimeUnit unit = TimeUnit::year;
    std::vector<Interval> intervals;

    bool empty() const { return intervals.empty(); }
    bool operator==(TemporalDomain const &) const = default;
};

TemporalDomain single_interval_domain(Interval const &interval);
std::string format_domain(TemporalDomain const &domain);

enum class DomainProperty { non_empty, unit_uniform, disjoint, ordered_non_contiguous };

std::string_view to_string(DomainProperty property);

struct DomainViolation {
    DomainProperty property;
    std::size_t index; // offending interval (or the first of an offending pair)
    std::string message;
};

// Canonical domain whose granule set is the union of the inputs'.
// Throws Error(MixedUnits) if any interval is not in `unit`.
TemporalDomain coalesce(std::span<Interval const> intervals, TimeUnit unit);

// Empty result iff the domain is canonical.
std::vector<DomainViolation> validate_domain(TemporalDomain const &domain);

TemporalDomain domain_union(TemporalDomain const &d1, TemporalDomain const &d2);
bool domain_contains(TemporalDomain const &domain, Instant t);
bool domains_intersect(TemporalDomain const &d1, TemporalDomain const &d2);
// Bounding interval; requires a non-empty domain.
Interval domain_span(TemporalDomain const &domain);

// Rescale an interval between comparable units: start is floored and the end
// is widened to the granule containing it.
Interval rescale(Interval const &interval, TimeUnit to);
// A duration of `count` granules of `from`, expressed in `to` granules
// (rounded up when `to` is coarser).
std::int64_t rescale_duration(std::int64_t count, TimeUnit from, TimeUnit to);

} // namespace edw
