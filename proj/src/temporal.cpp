#include "edw/temporal.hpp"

#include "edw/error.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>

namespace edw {

namespace {

struct Tiling {
    TimeUnit coarse;
    TimeUnit fine;
    std::int64_t factor;
};

// The registry's divisibility table. Finer-than is its reflexive-transitive closure.
constexpr Tiling kTilings[] = {
    {TimeUnit::year, TimeUnit::semester, 2},
    {TimeUnit::semester, TimeUnit::quarter, 2},
    {TimeUnit::quarter, TimeUnit::month, 3},
    {TimeUnit::week, TimeUnit::day, 7},
};

std::int64_t floor_div(std::int64_t a, std::int64_t b)
{
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0)))
        --q;
    return q;
}

std::int64_t floor_mod(std::int64_t a, std::int64_t b) { return a - floor_div(a, b) * b; }

void require_same_unit(TimeUnit a, TimeUnit b)
{
    if (a != b)
        throw Error(ErrorKind::MixedUnits,
                    std::string("unit ") + std::string(to_string(a)) + " vs " + std::string(to_string(b)));
}

bool all_digits(std::string_view s)
{
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::int64_t parse_int(std::string_view s, std::string_view whole)
{
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw Error(ErrorKind::InvalidInstant, "malformed instant '" + std::string(whole) + "'");
    return v;
}

} // namespace

std::string_view to_string(TimeUnit unit)
{
    switch (unit) {
    case TimeUnit::year: return "year";
    case TimeUnit::semester: return "semester";
    case TimeUnit::quarter: return "quarter";
    case TimeUnit::month: return "month";
    case TimeUnit::week: return "week";
    case TimeUnit::day: return "day";
    }
    return "?";
}

TimeUnit parse_unit(std::string_view name)
{
    for (TimeUnit u : kAllUnits)
        if (to_string(u) == name)
            return u;
    throw Error(ErrorKind::UnknownUnit, "unknown time unit '" + std::string(name) + "'");
}

std::string_view to_string(UnitOrder order)
{
    switch (order) {
    case UnitOrder::finer: return "finer";
    case UnitOrder::coarser: return "coarser";
    case UnitOrder::equal: return "equal";
    case UnitOrder::incomparable: return "incomparable";
    }
    return "?";
}

std::optional<std::int64_t> granules_per(TimeUnit coarse, TimeUnit fine)
{
    if (coarse == fine)
        return 1;
    // Tiling chains are linear, so a walk down from `coarse` finds `fine` if reachable.
    std::int64_t factor = 1;
    TimeUnit at = coarse;
    for (bool moved = true; moved;) {
        moved = false;
        for (auto const &t : kTilings) {
            if (t.coarse == at) {
                factor *= t.factor;
                at = t.fine;
                moved = true;
                if (at == fine)
                    return factor;
                break;
            }
        }
    }
    return std::nullopt;
}

UnitOrder compare_units(TimeUnit u1, TimeUnit u2)
{
    if (u1 == u2)
        return UnitOrder::equal;
    if (granules_per(u2, u1))
        return UnitOrder::finer;
    if (granules_per(u1, u2))
        return UnitOrder::coarser;
    return UnitOrder::incomparable;
}

UnitOrder compare_units(std::string_view u1, std::string_view u2)
{
    return compare_units(parse_unit(u1), parse_unit(u2));
}

std::strong_ordering Instant::operator<=>(Instant const &other) const
{
    require_same_unit(unit, other.unit);
    return tick <=> other.tick;
}

Instant year_instant(int year) { return {TimeUnit::year, static_cast<std::int64_t>(year) - 1970}; }

Instant month_instant(int year, int month)
{
    return {TimeUnit::month, (static_cast<std::int64_t>(year) - 1970) * 12 + (month - 1)};
}

std::string format_instant(Instant t)
{
    char buf[32];
    if (t.unit == TimeUnit::year) {
        std::int64_t year = t.tick + 1970;
        if (year >= 0 && year <= 9999) {
            std::snprintf(buf, sizeof buf, "%04lld", static_cast<long long>(year));
            return buf;
        }
    } else if (t.unit == TimeUnit::month) {
        std::int64_t year = floor_div(t.tick, 12) + 1970;
        std::int64_t month = floor_mod(t.tick, 12) + 1;
        if (year >= 0 && year <= 9999) {
            std::snprintf(buf, sizeof buf, "%04lld-%02lld", static_cast<long long>(year),
                          static_cast<long long>(month));
            return buf;
        }
    }
    return std::string(to_string(t.unit)) + ":" + std::to_string(t.tick);
}

Instant parse_instant(std::string_view text)
{
    if (auto colon = text.find(':'); colon != std::string_view::npos) {
        TimeUnit unit = parse_unit(text.substr(0, colon));
        return {unit, parse_int(text.substr(colon + 1), text)};
    }
    if (text.size() == 4 && all_digits(text))
        return year_instant(static_cast<int>(parse_int(text, text)));
    if (text.size() == 7 && text[4] == '-' && all_digits(text.substr(0, 4)) && all_digits(text.substr(5))) {
        auto month = parse_int(text.substr(5), text);
        if (month < 1 || month > 12)
            throw Error(ErrorKind::InvalidInstant, "month out of range in '" + std::string(text) + "'");
        return month_instant(static_cast<int>(parse_int(text.substr(0, 4), text)), static_cast<int>(month));
    }
    throw Error(ErrorKind::InvalidInstant, "malformed instant '" + std::string(text) + "'");
}

Interval make_interval(Instant start, Instant end)
{
    require_same_unit(start.unit, end.unit);
    if (start.tick > end.tick)
        throw Error(ErrorKind::InvalidInterval,
                    "interval start " + format_instant(start) + " after end " + format_instant(end));
    return {start, end};
}

std::string format_interval(Interval const &interval)
{
    return "[" + format_instant(interval.start) + "," + format_instant(interval.end) + "]";
}

TemporalDomain single_interval_domain(Interval const &interval)
{
    Interval checked = make_interval(interval.start, interval.end);
    return {checked.start.unit, {checked}};
}

std::string format_domain(TemporalDomain const &domain)
{
    std::string out = "<";
    for (std::size_t i = 0; i < domain.intervals.size(); ++i) {
        if (i)
            out += ";";
        out += format_interval(domain.intervals[i]);
    }
    return out + ">";
}

std::string_view to_string(DomainProperty property)
{
    switch (property) {
    case DomainProperty::non_empty: return "non-empty";
    case DomainProperty::unit_uniform: return "unit-uniform";
    case DomainProperty::disjoint: return "disjoint";
    case DomainProperty::ordered_non_contiguous: return "ordered-non-contiguous";
    }
    return "?";
}

TemporalDomain coalesce(std::span<Interval const> intervals, TimeUnit unit)
{
    std::vector<Interval> sorted;
    sorted.reserve(intervals.size());
    for (auto const &iv : intervals) {
        require_same_unit(iv.start.unit, unit);
        require_same_unit(iv.end.unit, unit);
        if (iv.start.tick > iv.end.tick)
            throw Error(ErrorKind::InvalidInterval, "empty interval " + format_interval(iv));
        sorted.push_back(iv);
    }
    std::sort(sorted.begin(), sorted.end(),
              [](Interval const &a, Interval const &b) { return a.start.tick < b.start.tick; });

    TemporalDomain out{unit, {}};
    for (auto const &iv : sorted) {
        if (!out.intervals.empty() && iv.start.tick <= out.intervals.back().end.tick + 1) {
            auto &last = out.intervals.back();
            last.end.tick = std::max(last.end.tick, iv.end.tick);
        } else {
            out.intervals.push_back(iv);
        }
    }
    return out;
}

std::vector<DomainViolation> validate_domain(TemporalDomain const &domain)
{
    std::vector<DomainViolation> out;
    auto const &ivs = domain.intervals;
    for (std::size_t k = 0; k < ivs.size(); ++k) {
        if (ivs[k].start.unit != domain.unit || ivs[k].end.unit != domain.unit)
            out.push_back({DomainProperty::unit_uniform, k,
                           "interval " + std::to_string(k) + " is not in unit " + std::string(to_string(domain.unit))});
        if (ivs[k].start.tick > ivs[k].end.tick)
            out.push_back({DomainProperty::non_empty, k, "interval " + std::to_string(k) + " is empty"});
    }
    for (std::size_t k = 0; k + 1 < ivs.size(); ++k) {
        auto const &a = ivs[k];
        auto const &b = ivs[k + 1];
        bool overlap = a.start.tick <= b.end.tick && b.start.tick <= a.end.tick;
        if (overlap) {
            out.push_back({DomainProperty::disjoint, k,
                           "intervals " + std::to_string(k) + " and " + std::to_string(k + 1) + " overlap"});
        } else if (b.start.tick < a.start.tick) {
            out.push_back({DomainProperty::ordered_non_contiguous, k,
                           "intervals " + std::to_string(k) + " and " + std::to_string(k + 1) + " out of order"});
        } else if (b.start.tick == a.end.tick + 1) {
            out.push_back({DomainProperty::ordered_non_contiguous, k,
                           "intervals " + std::to_string(k) + " and " + std::to_string(k + 1) +
                               " are contiguous (coalescable)"});
        }
    }
    // Non-adjacent overlaps only matter when the sequence is unordered.
    for (std::size_t k = 0; k < ivs.size(); ++k)
        for (std::size_t j = k + 2; j < ivs.size(); ++j)
            if (ivs[k].start.tick <= ivs[j].end.tick && ivs[j].start.tick <= ivs[k].end.tick)
                out.push_back({DomainProperty::disjoint, k,
                               "intervals " + std::to_string(k) + " and " + std::to_string(j) + " overlap"});
    return out;
}

TemporalDomain domain_union(TemporalDomain const &d1, TemporalDomain const &d2)
{
    require_same_unit(d1.unit, d2.unit);
    std::vector<Interval> all;
    all.reserve(d1.intervals.size() + d2.intervals.size());
    all.insert(all.end(), d1.intervals.begin(), d1.intervals.end());
    all.insert(all.end(), d2.intervals.begin(), d2.intervals.end());
    return coalesce(all, d1.unit);
}

bool domain_contains(TemporalDomain const &domain, Instant t)
{
    require_same_unit(domain.unit, t.unit);
    auto it = std::upper_bound(domain.intervals.begin(), domain.intervals.end(), t.tick,
                               [](std::int64_t tick, Interval const &iv) { return tick < iv.start.tick; });
    if (it == domain.intervals.begin())
        return false;
    --it;
    return t.tick <= it->end.tick;
}

bool domains_intersect(TemporalDomain const &d1, TemporalDomain const &d2)
{
    require_same_unit(d1.unit, d2.unit);
    std::size_t i = 0, j = 0;
    while (i < d1.intervals.size() && j < d2.intervals.size()) {
        auto const &a = d1.intervals[i];
        auto const &b = d2.intervals[j];
        if (a.start.tick <= b.end.tick && b.start.tick <= a.end.tick)
            return true;
        if (a.end.tick < b.end.tick)
            ++i;
        else
            ++j;
    }
    return false;
}

Interval domain_span(TemporalDomain const &domain)
{
    if (domain.intervals.empty())
        throw Error(ErrorKind::InvalidInterval, "span of an empty domain");
    Instant lo = domain.intervals.front().start;
    Instant hi = domain.intervals.front().end;
    for (auto const &iv : domain.intervals) {
        lo.tick = std::min(lo.tick, iv.start.tick);
        hi.tick = std::max(hi.tick, iv.end.tick);
    }
    return {lo, hi};
}

Interval rescale(Interval const &interval, TimeUnit to)
{
    TimeUnit from = interval.start.unit;
    require_same_unit(from, interval.end.unit);
    if (auto f = granules_per(to, from)) {
        // to is coarser
        return {{to, floor_div(interval.start.tick, *f)}, {to, floor_div(interval.end.tick, *f)}};
    }
    if (auto f = granules_per(from, to)) {
        return {{to, interval.start.tick * *f}, {to, (interval.end.tick + 1) * *f - 1}};
    }
    throw Error(ErrorKind::MixedUnits,
                "units " + std::string(to_string(from)) + " and " + std::string(to_string(to)) + " are incomparable");
}

std::int64_t rescale_duration(std::int64_t count, TimeUnit from, TimeUnit to)
{
    if (auto f = granules_per(from, to))
        return count * *f;
    if (auto f = granules_per(to, from))
        return (count + *f - 1) / *f;
    throw Error(ErrorKind::MixedUnits,
                "units " + std::string(to_string(from)) + " and " + std::string(to_string(to)) + " are incomparable");
}

} // namespace edw
