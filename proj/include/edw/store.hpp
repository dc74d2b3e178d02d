#pragma once

#include "edw/object.hpp"
#include "edw/source_schema.hpp"
#include "edw/warehouse.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace edw {

// Bridge from source keys to surrogate oids. Per class, a key maps to every
// oid it was ever given (oldest first); only the last can be active, and
// entries are never removed.
struct IdentityMap {
    std::map<std::string, std::map<SourceKey, std::vector<Oid>>> entries;

    std::optional<Oid> latest(std::string const &class_name, SourceKey const &key) const;
    void add(std::string const &class_name, SourceKey const &key, Oid oid);
    bool operator==(IdentityMap const &) const = default;
};

struct Store {
    std::string source_text;    // .odl the schema was resolved from
    std::string warehouse_text; // .edw the schema was resolved from
    SourceSchema source;
    WarehouseSchema schema;
    std::map<Oid, WarehouseObject> objects;
    IdentityMap identity;
    std::optional<Instant> last_refresh;
    std::uint64_t next_oid = 1;

    // Parses and resolves both texts. Throws Error / DiagnosticError.
    static Store create(std::string source_text, std::string warehouse_text);

    WarehouseObject const &object(Oid oid) const; // throws UnknownOid
    // Objects of the class and of every subclass, by oid.
    std::vector<Oid> extension(std::string const &class_name, bool active_only = false) const;
    // Objects created for exactly this class.
    std::vector<Oid> direct_members(std::string const &class_name, bool active_only = false) const;
};

struct ValueAt {
    enum class Kind { current, past, archive, absent };
    Kind kind = Kind::absent;
    StateValue value;           // current or past
    ArchiveState const *archive = nullptr;
};
std::string_view to_string(ValueAt::Kind kind);

// Looks t up in the current, past and archive states, in that order.
// Throws UnknownOid, UnitMismatch.
ValueAt value_at(Store const &store, Oid oid, Instant t);

// Canonical document: sorted keys, objects by oid, fixed indentation.
// Identical stores serialize to identical bytes.
std::string serialize_store(Store const &store);
// Throws CorruptStore (or the resolution error for a stale schema).
Store deserialize_store(std::string const &text);

// Write-to-temp then rename; the previous file survives any failure.
void save_store(Store const &store, std::filesystem::path const &path);
Store load_store(std::filesystem::path const &path);

// Advisory single-writer lock: "<store>.lock", created exclusively.
class StoreLock {
public:
    explicit StoreLock(std::filesystem::path const &store_path); // throws Locked, Io
    ~StoreLock();
    StoreLock(StoreLock const &) = delete;
    StoreLock &operator=(StoreLock const &) = delete;

private:
    std::filesystem::path path_;
};

std::string read_text_file(std::filesystem::path const &path); // throws Io

} // namespace edw
