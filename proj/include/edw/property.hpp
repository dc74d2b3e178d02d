#pragma once

#include "edw/error.hpp"
#include "edw/source_schema.hpp"
#include "edw/temporal.hpp"
#include "edw/value.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace edw {

// Where a warehouse property comes from: copied from the source, produced
// by an aggregate over the source, or introduced by the administrator.
enum class Origin { derived, computed, specific };

std::string_view to_string(Origin origin);
std::string_view origin_prefix(Origin origin); // "D_", "C_", "S_"

// How evicted past values of an archived property are summarized.
enum class ArchiveFn { avg, sum, min, max, count, last };

std::string_view to_string(ArchiveFn fn);
bool parse_archive_fn(std::string_view name, ArchiveFn &out);

struct PropertyDef {
    std::string name;
    Origin origin = Origin::derived;
    PropertyKind kind = PropertyKind::attribute;
    Type type;                        // attributes
    std::string target;               // relations: target class (or interface inside a build)
    Cardinality cardinality = Cardinality::one;
    std::optional<InverseRef> inverse;
    std::string source_path;          // derived: Interface.prop[.field]; empty otherwise
    SourcePos pos;

    bool is_relation() const { return kind != PropertyKind::attribute; }
    // Name, origin, kind, type and relation shape; provenance is ignored.
    bool same_definition(PropertyDef const &other) const;
    bool operator==(PropertyDef const &other) const { return same_definition(other); }
};

// "D_attribute Short x" style rendering.
std::string format_property(PropertyDef const &property);

struct Period {
    std::int64_t count = 1;
    TimeUnit unit = TimeUnit::year;
    bool operator==(Period const &) const = default;
};

// Declarative stand-in for the environment's configuration rules. Unset
// fields of an environment fall back to the warehouse-wide defaults.
struct RetentionConfig {
    std::optional<Period> refresh_period;
    std::optional<std::int64_t> keep_past_count;
    std::optional<Period> keep_past_duration;

    bool has_retention_bound() const { return keep_past_count.has_value() || keep_past_duration.has_value(); }
    bool operator==(RetentionConfig const &) const = default;
};

// Field-by-field override of `defaults` by `local`.
RetentionConfig merge_config(RetentionConfig const &local, RetentionConfig const &defaults);
std::string format_config(RetentionConfig const &config);

} // namespace edw
