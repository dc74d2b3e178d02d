#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "edw/error.hpp"
#include "edw/temporal.hpp"

#include <bitset>
#include <random>

using namespace edw;

namespace {

constexpr int kSpan = 64;

Interval years(int a, int b)
{
    return make_interval(year_instant(a), year_instant(b));
}

TemporalDomain domain_of(std::vector<Interval> const &intervals)
{
    return coalesce(intervals, TimeUnit::year);
}

// Granule-set oracle over ticks [0, kSpan).
std::bitset<kSpan> bits(std::vector<Interval> const &intervals)
{
    std::bitset<kSpan> b;
    for (auto const &i : intervals)
        for (auto t = i.start.tick; t <= i.end.tick; ++t)
            b.set(static_cast<std::size_t>(t));
    return b;
}

std::vector<Interval> random_intervals(std::mt19937 &rng)
{
    std::uniform_int_distribution<int> count(0, 6), pos(0, kSpan - 1), len(0, 8);
    std::vector<Interval> out;
    for (int n = count(rng); n > 0; --n) {
        int a = pos(rng);
        int b = std::min(kSpan - 1, a + len(rng));
        out.push_back(make_interval(Instant{TimeUnit::year, a}, Instant{TimeUnit::year, b}));
    }
    return out;
}

ErrorKind kind_of(auto &&f)
{
    try {
        f();
    } catch (Error const &e) {
        return e.kind();
    }
    FAIL("no error thrown");
    return ErrorKind::Io;
}

} // namespace

TEST_CASE("units compare along tiling chains")
{
    CHECK(compare_units(TimeUnit::month, TimeUnit::year) == UnitOrder::finer);
    CHECK(compare_units(TimeUnit::year, TimeUnit::quarter) == UnitOrder::coarser);
    CHECK(compare_units(TimeUnit::week, TimeUnit::month) == UnitOrder::incomparable);
    CHECK(compare_units(TimeUnit::day, TimeUnit::year) == UnitOrder::incomparable);
    CHECK(compare_units(TimeUnit::day, TimeUnit::week) == UnitOrder::finer);
    CHECK(compare_units("semester", "semester") == UnitOrder::equal);
    CHECK(kind_of([] { compare_units("fortnight", "year"); }) == ErrorKind::UnknownUnit);
    CHECK(granules_per(TimeUnit::year, TimeUnit::month) == 12);
    CHECK(granules_per(TimeUnit::semester, TimeUnit::month) == 6);
    CHECK(granules_per(TimeUnit::month, TimeUnit::year) == std::nullopt);
}

TEST_CASE("finer-than is a partial order")
{
    for (auto a : kAllUnits) {
        CHECK(compare_units(a, a) == UnitOrder::equal);
        for (auto b : kAllUnits) {
            auto ab = compare_units(a, b);
            auto ba = compare_units(b, a);
            if (ab == UnitOrder::finer)
                CHECK(ba == UnitOrder::coarser);
            if (ab == UnitOrder::incomparable)
                CHECK(ba == UnitOrder::incomparable);
            for (auto c : kAllUnits)
                if (ab == UnitOrder::finer && compare_units(b, c) == UnitOrder::finer)
                    CHECK(compare_units(a, c) == UnitOrder::finer);
        }
    }
}

TEST_CASE("instant notation round-trips")
{
    CHECK(format_instant(year_instant(1990)) == "1990");
    CHECK(format_instant(month_instant(1990, 3)) == "1990-03");
    CHECK(parse_instant("1990") == year_instant(1990));
    CHECK(parse_instant("1990-03") == month_instant(1990, 3));
    CHECK(parse_instant("month:243") == Instant{TimeUnit::month, 243});
    for (auto u : kAllUnits)
        for (std::int64_t tick : {-30, -1, 0, 1, 20, 245, 9000}) {
            Instant t{u, tick};
            CHECK(parse_instant(format_instant(t)) == t);
        }
    CHECK(kind_of([] { parse_instant("1990-13"); }) == ErrorKind::InvalidInstant);
    CHECK(kind_of([] { parse_instant("eon:3"); }) == ErrorKind::UnknownUnit);
    CHECK(kind_of([] { return year_instant(1990) < month_instant(1990, 1); }) == ErrorKind::MixedUnits);
}

TEST_CASE("intervals are closed and may hold one granule")
{
    CHECK_NOTHROW(years(1990, 1990));
    CHECK(kind_of([] { years(1991, 1990); }) == ErrorKind::InvalidInterval);
    CHECK(kind_of([] { make_interval(year_instant(1990), month_instant(1991, 1)); }) == ErrorKind::MixedUnits);
}

TEST_CASE("validate_domain reports each broken property")
{
    CHECK(validate_domain(TemporalDomain{TimeUnit::year, {years(1990, 1991), years(1993, 1995)}}).empty());
    auto overlap = validate_domain(TemporalDomain{TimeUnit::year, {years(1990, 1993), years(1992, 1995)}});
    REQUIRE(overlap.size() == 1);
    CHECK(overlap[0].property == DomainProperty::disjoint);
    auto touching = validate_domain(TemporalDomain{TimeUnit::year, {years(1990, 1991), years(1992, 1995)}});
    REQUIRE(touching.size() == 1);
    CHECK(touching[0].property == DomainProperty::ordered_non_contiguous);
    CHECK(validate_domain(TemporalDomain{TimeUnit::year, {}}).empty());
    auto reversed = validate_domain(TemporalDomain{TimeUnit::year, {Interval{year_instant(1995), year_instant(1990)}}});
    REQUIRE(reversed.size() == 1);
    CHECK(reversed[0].property == DomainProperty::non_empty);
    auto mixed = validate_domain(TemporalDomain{TimeUnit::year, {years(1990, 1990), Interval{month_instant(1992, 1), month_instant(1992, 2)}}});
    REQUIRE(!mixed.empty());
    CHECK(mixed[0].property == DomainProperty::unit_uniform);
}

TEST_CASE("union and containment")
{
    CHECK(domain_union(domain_of({years(1990, 1990)}), domain_of({years(1991, 1992)})) ==
          domain_of({years(1990, 1992)}));
    CHECK(domain_union(domain_of({years(1990, 1991)}), domain_of({years(1991, 1994)})).intervals ==
          std::vector<Interval>{years(1990, 1994)});
    auto d = domain_of({years(1990, 1991), years(1993, 1995)});
    CHECK(domain_union(d, TemporalDomain{TimeUnit::year, {}}) == d);
    CHECK_FALSE(domain_contains(d, year_instant(1992)));
    CHECK(domain_contains(domain_of({years(1990, 1991)}), year_instant(1990)));
    CHECK(kind_of([&] { domain_contains(d, month_instant(1990, 1)); }) == ErrorKind::MixedUnits);
}

TEST_CASE("randomized domains agree with a granule bit-set oracle")
{
    std::mt19937 rng(20240611);
    for (int round = 0; round < 2000; ++round) {
        auto s1 = random_intervals(rng);
        auto s2 = random_intervals(rng);
        auto d1 = domain_of(s1);
        auto d2 = domain_of(s2);
        REQUIRE(validate_domain(d1).empty());
        CHECK(domain_of(d1.intervals) == d1);
        CHECK(bits(d1.intervals) == bits(s1));
        auto u = domain_union(d1, d2);
        CHECK(bits(u.intervals) == (bits(s1) | bits(s2)));
        CHECK(u == domain_union(d2, d1));
        auto d3 = domain_of(random_intervals(rng));
        CHECK(domain_union(domain_union(d1, d2), d3) == domain_union(d1, domain_union(d2, d3)));
        CHECK(domains_intersect(d1, d2) == (bits(s1) & bits(s2)).any());
        auto b = bits(s1);
        for (int t = 0; t < kSpan; ++t)
            CHECK(domain_contains(d1, Instant{TimeUnit::year, t}) == b.test(static_cast<std::size_t>(t)));
    }
}

TEST_CASE("rescaling between comparable units")
{
    auto q = rescale(years(1990, 1990), TimeUnit::quarter);
    CHECK(q.start == Instant{TimeUnit::quarter, 80});
    CHECK(q.end == Instant{TimeUnit::quarter, 83});
    auto y = rescale(Interval{month_instant(1990, 2), month_instant(1991, 1)}, TimeUnit::year);
    CHECK(y == years(1990, 1991));
    CHECK(rescale_duration(2, TimeUnit::year, TimeUnit::month) == 24);
    CHECK(rescale_duration(13, TimeUnit::month, TimeUnit::year) == 2);
    CHECK(kind_of([] { rescale_duration(1, TimeUnit::week, TimeUnit::month); }) == ErrorKind::MixedUnits);
}
