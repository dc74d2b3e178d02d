#pragma once

#include "edw/snapshot.hpp"
#include "edw/store.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <string>
#include <vector>

namespace edw {

struct ClassCounts {
    std::size_t previous = 0; // active objects of the class before the extraction point
    std::size_t created = 0;
    std::size_t carried = 0;
    std::size_t updated = 0;
    std::size_t historized = 0;
    std::size_t frozen = 0;
    std::size_t evicted = 0; // past states moved out by archival
    bool operator==(ClassCounts const &) const = default;
};

struct RefreshReport {
    Instant at;
    bool initial = false;
    std::map<std::string, ClassCounts> classes; // objects counted under their own class
    std::vector<std::string> warnings;

    nlohmann::json to_json() const;
};

// Populates an empty store from the first snapshot. Objects get current
// states over [t,t]; relations are rewritten to oids; specializations are
// evaluated over the loaded objects. Throws NonEmptyStore,
// DanglingRelationTarget, AmbiguousRelationTarget, DuplicateKey. The store
// is unchanged on error.
RefreshReport initial_load(Store &store, Snapshot const &snapshot, Instant t);

// One extraction point: re-evaluates every mapping, then per object either
// creates, carries, updates in place, historizes or freezes it, then applies
// each environment's retention rules. Throws NonMonotonicInstant,
// UnitMismatch, plus the initial_load errors. The store is unchanged on error.
RefreshReport refresh(Store &store, Snapshot const &snapshot, Instant t);

// Evicts past states beyond the environment's retention bounds into each
// object's cumulative archive. Frozen objects are left untouched. Returns
// evictions per class.
std::map<std::string, std::size_t> apply_archival(Store &store, std::string const &env, Instant t);

// Sets an administrator-owned property of an active object at the latest
// extraction point. A change to a temporal property opened before t pushes
// the old value to history. Throws UnknownOid, UnknownProperty,
// NotSpecificProperty, FrozenObject, TypeMismatch, NonMonotonicInstant,
// UnitMismatch.
void patch_specific(Store &store, Oid oid, std::string const &property, Value const &value, Instant t);

} // namespace edw
