#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace edw {

// Attribute types shared by source interfaces and warehouse classes.
class Type {
public:
    enum class Kind { String, Short, Long, Double, Date, Image, Struct, Set };

    Type() = default;
    static Type scalar(Kind kind);
    static Type structure(std::string name, std::vector<std::string> field_names, std::vector<Type> field_types);
    static Type set_of(Type element);

    Kind kind() const { return kind_; }
    bool is_numeric() const { return kind_ == Kind::Short || kind_ == Kind::Long || kind_ == Kind::Double; }
    bool is_integer() const { return kind_ == Kind::Short || kind_ == Kind::Long; }
    bool is_scalar() const { return kind_ != Kind::Struct && kind_ != Kind::Set; }

    std::string const &struct_name() const { return struct_name_; }
    std::vector<std::string> const &field_names() const { return field_names_; }
    std::vector<Type> const &field_types() const { return field_types_; }
    Type const *field(std::string const &name) const;
    Type const &element() const { return element_.front(); }

    bool operator==(Type const &) const = default;

private:
    Kind kind_ = Kind::String;
    std::string struct_name_;
    std::vector<std::string> field_names_;
    std::vector<Type> field_types_;
    std::vector<Type> element_; // exactly one entry for Set
};

// ODL spelling: String, Short, ..., Struct T { String a, Long b }, Set<T>.
std::string format_type(Type const &type);
// Scalar keyword lookup; nullopt for anything else.
bool scalar_kind_from_keyword(std::string const &word, Type::Kind &out);

struct Oid {
    std::uint64_t value = 0;
    auto operator<=>(Oid const &) const = default;
};

// Reference to a source record: ids are opaque and scoped per interface.
struct SourceLink {
    std::string interface;
    std::string id;
    auto operator<=>(SourceLink const &) const = default;
};

using SourceKey = std::vector<SourceLink>;

std::string format_source_key(SourceKey const &key);

// A slot value. Sets are kept sorted and deduplicated so that equality is
// structural. Dates and image references are carried as strings; their
// meaning comes from the declared type.
class Value {
public:
    using Null = std::monostate;
    using Struct = std::map<std::string, Value>;
    struct Set {
        std::vector<Value> items;
    };
    struct Links {
        std::vector<SourceLink> items;
    };
    struct Oids {
        std::vector<Oid> items;
    };

    Value() = default;
    static Value null() { return {}; }
    static Value integer(std::int64_t v);
    static Value real(double v);
    static Value string(std::string v);
    static Value structure(Struct fields);
    static Value set(std::vector<Value> items);
    static Value links(std::vector<SourceLink> items);
    static Value oids(std::vector<Oid> items);

    bool is_null() const { return std::holds_alternative<Null>(data_); }
    bool is_integer() const { return std::holds_alternative<std::int64_t>(data_); }
    bool is_real() const { return std::holds_alternative<double>(data_); }
    bool is_number() const { return is_integer() || is_real(); }
    bool is_string() const { return std::holds_alternative<std::string>(data_); }
    bool is_struct() const { return std::holds_alternative<Struct>(data_); }
    bool is_set() const { return std::holds_alternative<Set>(data_); }
    bool is_links() const { return std::holds_alternative<Links>(data_); }
    bool is_oids() const { return std::holds_alternative<Oids>(data_); }

    std::int64_t as_integer() const { return std::get<std::int64_t>(data_); }
    double as_real() const { return std::get<double>(data_); }
    double as_number() const { return is_integer() ? static_cast<double>(as_integer()) : as_real(); }
    std::string const &as_string() const { return std::get<std::string>(data_); }
    Struct const &as_struct() const { return std::get<Struct>(data_); }
    std::vector<Value> const &as_set() const { return std::get<Set>(data_).items; }
    std::vector<SourceLink> const &as_links() const { return std::get<Links>(data_).items; }
    std::vector<Oid> const &as_oids() const { return std::get<Oids>(data_).items; }

    // Total order: by alternative, then by content. Used for canonical sets.
    friend int compare(Value const &a, Value const &b);
    friend bool operator==(Value const &a, Value const &b) { return compare(a, b) == 0; }
    friend bool operator<(Value const &a, Value const &b) { return compare(a, b) < 0; }

private:
    std::variant<Null, std::int64_t, double, std::string, Struct, Set, Links, Oids> data_;
};

// Slot name -> value; the value of an object during one state.
using StateValue = std::map<std::string, Value>;

// Self-describing JSON encoding: sets are arrays, structs are objects,
// relation targets are tagged {"$oids": [...]} or {"$links": [[iface, id], ...]}.
nlohmann::json to_json(Value const &value);
Value value_from_json(nlohmann::json const &json);
nlohmann::json to_json(StateValue const &value);
StateValue state_value_from_json(nlohmann::json const &json);

// Compact single-line rendering for reports.
std::string format_value(Value const &value);

// Checks a JSON literal against a declared attribute type and converts it.
// Throws Error(TypeMismatch).
Value typed_value_from_json(nlohmann::json const &json, Type const &type, std::string const &what);

} // namespace edw
