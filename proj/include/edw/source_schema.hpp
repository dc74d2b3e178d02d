#pragma once

#include "edw/error.hpp"
#include "edw/value.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace edw {

class TokenStream;

enum class PropertyKind { attribute, association, composition };
enum class Cardinality { one, many };

std::string_view to_string(PropertyKind kind);

struct InverseRef {
    std::string interface;
    std::string property;
    bool operator==(InverseRef const &) const = default;
};

// One attribute, relationship or composition of a source interface.
struct SourceProperty {
    std::string name;
    PropertyKind kind = PropertyKind::attribute;
    Type type;                          // attributes only
    std::string target;                 // relationships/compositions only
    Cardinality cardinality = Cardinality::one;
    std::optional<InverseRef> inverse;
    std::string declared_in;            // filled in by flattening
    SourcePos pos;

    bool is_relation() const { return kind != PropertyKind::attribute; }
    // Same definition regardless of where it is declared.
    bool same_definition(SourceProperty const &other) const;
    bool operator==(SourceProperty const &other) const;
};

// Operations are retained by name only; they are never evaluated.
struct SourceOperation {
    std::string name;
    std::string signature;
    bool operator==(SourceOperation const &) const = default;
};

struct SourceInterface {
    std::string name;
    std::vector<std::string> supers;
    std::vector<SourceProperty> properties; // declaration order
    std::vector<SourceOperation> operations;
    SourcePos pos;

    SourceProperty const *own_property(std::string_view name) const;
    bool operator==(SourceInterface const &) const = default;
};

class SourceSchema {
public:
    SourceSchema() = default;
    // Checks names, inheritance, and inverse declarations. Throws Error.
    explicit SourceSchema(std::vector<SourceInterface> interfaces);

    std::vector<SourceInterface> const &interfaces() const { return interfaces_; }
    SourceInterface const *find(std::string_view name) const;
    SourceInterface const &get(std::string_view name) const; // throws UnknownInterface

    // Own plus all inherited properties (supers first, each super once).
    std::vector<SourceProperty> flatten(std::string_view interface) const;
    SourceProperty const *find_property(std::string_view interface, std::string_view property) const;
    // Reflexive: `sub` is `base` or transitively extends it.
    bool extends(std::string_view sub, std::string_view base) const;
    // `name` followed by every interface that transitively extends it, sorted.
    std::vector<std::string> family(std::string_view name) const;

    bool operator==(SourceSchema const &other) const { return interfaces_ == other.interfaces_; }

private:
    std::vector<SourceInterface> interfaces_;
    std::vector<std::vector<SourceProperty>> flattened_;
};

// ODL-like surface:
//   interface NAME [(extend A, B)] { member* } [;]
//   member := attribute TYPE name; | relationship [Set]<T> name [inverse T::r]; |
//             composition [Set]<T> name; | TYPE name(...);
// Throws Error(SyntaxError | UnknownInterface | InverseMismatch | ...).
SourceSchema parse_source_schema(std::string_view text);
std::string print_source_schema(SourceSchema const &schema);

// Grammar pieces shared with the warehouse-definition parser.
Type parse_type(TokenStream &tokens);
// Parses "Set<T>" or "<T>" after a relationship keyword.
void parse_relation_target(TokenStream &tokens, std::string &target, Cardinality &cardinality);

} // namespace edw
