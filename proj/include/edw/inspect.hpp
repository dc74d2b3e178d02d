#pragma once

#include "edw/store.hpp"

#include <optional>
#include <string>

namespace edw {

struct InspectQuery {
    std::string class_name;
    std::optional<Oid> oid;  // one object of the class extension
    std::optional<Instant> at; // value as of this instant
    bool history = false;    // every current, past and archive state
};

// Deterministic text: objects by oid, properties by name. Throws
// UnknownClass, UnknownOid (also for an oid outside the class), UnitMismatch.
std::string render_inspect(Store const &store, InspectQuery const &query);

} // namespace edw
