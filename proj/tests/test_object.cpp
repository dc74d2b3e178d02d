#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "edw/error.hpp"
#include "edw/object.hpp"

#include <algorithm>
#include <random>

using namespace edw;

namespace {

State state(int year, StateValue v)
{
    return State{single_interval_domain(make_interval(year_instant(year), year_instant(year))), std::move(v)};
}

ArchiveState fold(std::vector<State> const &states, std::map<std::string, ArchiveFn> const &archi)
{
    std::optional<ArchiveState> a;
    for (auto const &s : states)
        a = merge_archive(a, s, archi);
    return *a;
}

} // namespace

TEST_CASE("rationals are exact images of doubles")
{
    CHECK(to_rational(0.5) == Rational(1, 2));
    CHECK(to_rational(-3.0) == Rational(-3));
    CHECK(to_rational(0.1) != Rational(1, 10));
    CHECK(format_rational(Rational(-7, 4)) == "-7/4");
    CHECK(format_rational(Rational(3)) == "3/1");
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> d(-1e9, 1e9);
    for (int i = 0; i < 500; ++i) {
        double x = d(rng);
        Rational r = to_rational(x);
        CHECK(static_cast<double>(r) == x);
        CHECK(parse_rational(format_rational(r)) == r);
    }
}

TEST_CASE("archive aggregates match a brute-force fold in any eviction order")
{
    std::map<std::string, ArchiveFn> archi{
        {"a", ArchiveFn::avg}, {"s", ArchiveFn::sum}, {"lo", ArchiveFn::min}, {"hi", ArchiveFn::max}, {"c", ArchiveFn::count}};
    std::mt19937 rng(11);
    for (int round = 0; round < 300; ++round) {
        int n = 1 + static_cast<int>(rng() % 7);
        std::vector<State> states;
        Rational total = 0;
        int non_null = 0;
        std::optional<double> lo, hi;
        for (int i = 0; i < n; ++i) {
            StateValue v;
            Value x = Value::null();
            if (rng() % 5) {
                double r = static_cast<double>(static_cast<int>(rng() % 2001) - 1000) / 8.0 + 0.1;
                x = Value::real(r);
                total += to_rational(r);
                ++non_null;
                lo = lo ? std::min(*lo, r) : r;
                hi = hi ? std::max(*hi, r) : r;
            }
            for (auto const &[name, fn] : archi)
                v[name] = x;
            states.push_back(state(1990 + 2 * i, v));
        }
        ArchiveState a = fold(states, archi);
        auto const &avg = a.aggregates.at("a");
        CHECK(avg.count == non_null);
        if (non_null) {
            CHECK(*avg.exact_mean() == total / non_null);
            CHECK(avg.value == Value::real(static_cast<double>(total / non_null)));
        } else {
            CHECK(avg.value.is_null());
            CHECK_FALSE(avg.exact_mean());
        }
        CHECK(a.aggregates.at("s").sum == total);
        CHECK(a.aggregates.at("lo").value == (lo ? Value::real(*lo) : Value::null()));
        CHECK(a.aggregates.at("hi").value == (hi ? Value::real(*hi) : Value::null()));
        CHECK(a.aggregates.at("c").value == Value::integer(n));
        CHECK(a.domain.intervals.size() == static_cast<std::size_t>(n));

        auto shuffled = states;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        CHECK(fold(shuffled, archi) == a);
    }
}

TEST_CASE("last keeps the most recent evicted value")
{
    std::map<std::string, ArchiveFn> archi{{"p", ArchiveFn::last}};
    auto a = fold({state(1990, {{"p", Value::string("x")}}), state(1991, {{"p", Value::string("y")}})}, archi);
    CHECK(a.aggregates.at("p").value == Value::string("y"));
    CHECK(a.domain.intervals == std::vector<Interval>{make_interval(year_instant(1990), year_instant(1991))});
}

TEST_CASE("archive errors")
{
    std::map<std::string, ArchiveFn> archi{{"p", ArchiveFn::avg}};
    CHECK_THROWS_AS(merge_archive(std::nullopt, state(1990, {}), archi), Error);
    try {
        merge_archive(std::nullopt, state(1990, {{"p", Value::string("x")}}), archi);
        FAIL("expected TypeMismatch");
    } catch (Error const &e) {
        CHECK(e.kind() == ErrorKind::TypeMismatch);
    }
}

TEST_CASE("lifecycle covers every state")
{
    WarehouseObject o;
    o.current = state(1996, {});
    o.past = {state(1994, {}), state(1995, {})};
    o.archives = {ArchiveState{single_interval_domain(make_interval(year_instant(1990), year_instant(1992))), {}}};
    CHECK(lifecycle_span(o) == make_interval(year_instant(1990), year_instant(1996)));
    CHECK(lifecycle_domain(o).intervals ==
          std::vector<Interval>{make_interval(year_instant(1990), year_instant(1992)),
                                make_interval(year_instant(1994), year_instant(1996))});
}
