#pragma once

#include "edw/source_schema.hpp"
#include "edw/temporal.hpp"
#include "edw/value.hpp"

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace edw {

// One source object as observed at an extraction point. Every attribute of
// the interface's flattened structure has a slot (null when absent); every
// relationship has a (possibly empty) link set resolved to concrete
// interfaces.
struct SourceRecord {
    std::string interface;
    std::string id;
    std::map<std::string, Value> values;
    std::map<std::string, std::vector<SourceLink>> links;

    SourceLink link() const { return {interface, id}; }
    bool operator==(SourceRecord const &) const = default;
};

// A coherent, validated state of the source at one instant.
class Snapshot {
public:
    Snapshot() = default;
    Snapshot(Instant at, std::map<SourceLink, SourceRecord> records) : at_(at), records_(std::move(records)) {}

    Instant at() const { return at_; }
    std::map<SourceLink, SourceRecord> const &records() const { return records_; }
    SourceRecord const *find(SourceLink const &link) const;
    std::size_t size() const { return records_.size(); }

    // Records of `interface` and of every interface extending it, in key order.
    std::vector<SourceRecord const *> extension(SourceSchema const &schema, std::string const &interface) const;

private:
    Instant at_;
    std::map<SourceLink, SourceRecord> records_;
};

// Validates and types a stream of records:
//   {"interface": "...", "id": "...", "values": {...}, "links": {"rel": ["id", ...]}}
// Throws Error(UnknownInterface | TypeMismatch | DanglingReference |
// InverseViolation | DuplicateId | CompositionShared).
Snapshot ingest_snapshot(SourceSchema const &schema, std::span<nlohmann::json const> records, Instant at);
// One JSON record per non-blank line; errors carry the line number.
Snapshot ingest_snapshot(SourceSchema const &schema, std::istream &lines, Instant at);

// Canonical one-line encoding (sorted keys, links as id lists).
std::string record_to_line(SourceRecord const &record);

// Checks the inverse-consistency invariant starting from the records of
// `interface` only; returns one message per violation found.
std::vector<std::string> inverse_violations_from(SourceSchema const &schema,
                                                 std::map<SourceLink, SourceRecord> const &records,
                                                 std::string const &interface);

} // namespace edw
