#pragma once

#include "edw/property.hpp"
#include "edw/temporal.hpp"
#include "edw/value.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace edw {

using Rational = boost::multiprecision::cpp_rational;

struct State {
    TemporalDomain domain;
    StateValue value;
    bool operator==(State const &) const = default;
};

// Running summary of one archived property. `sum` is exact for avg and sum;
// `count` is the number of values folded in (nulls excluded, except for the
// count function, which counts evicted states).
struct ArchiveAggregate {
    ArchiveFn fn = ArchiveFn::last;
    Value value;
    std::int64_t count = 0;
    Rational sum = 0;

    // Exact mean for avg; nullopt when nothing was folded in.
    std::optional<Rational> exact_mean() const;
    bool operator==(ArchiveAggregate const &) const = default;
};

struct ArchiveState {
    TemporalDomain domain;
    std::map<std::string, ArchiveAggregate> aggregates;
    bool operator==(ArchiveState const &) const = default;
};

enum class ObjectStatus { active, frozen };
std::string_view to_string(ObjectStatus status);

struct WarehouseObject {
    Oid oid;
    std::string class_name;
    State current;
    std::vector<State> past;           // oldest first
    std::vector<ArchiveState> archives; // at most one cumulative state
    ObjectStatus status = ObjectStatus::active;
    SourceKey source_key;

    bool active() const { return status == ObjectStatus::active; }
    bool operator==(WarehouseObject const &) const = default;
};

// Bounding interval of every state domain of the object.
Interval lifecycle_span(WarehouseObject const &object);
// Exact union of every state domain.
TemporalDomain lifecycle_domain(WarehouseObject const &object);

// Folds one evicted past state into the cumulative archive. Properties not
// listed in `archi` are dropped. Throws Error(TypeMismatch) when the state
// lacks an archived slot or an avg/sum slot is not numeric.
ArchiveState merge_archive(std::optional<ArchiveState> const &archive, State const &evicted,
                           std::map<std::string, ArchiveFn> const &archi);

Rational to_rational(double value);
std::string format_rational(Rational const &value);
Rational parse_rational(std::string const &text);

} // namespace edw
