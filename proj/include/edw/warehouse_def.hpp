#pragma once

#include "edw/mapping.hpp"
#include "edw/property.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace edw {

// Unresolved syntax tree of a warehouse definition (.edw). Names are not
// checked here; see resolve().

struct PropertyDecl {
    PropertyDef def;
    bool explicit_origin = true; // false for an unprefixed member (read as derived)
    bool operator==(PropertyDecl const &o) const
    {
        return def.same_definition(o.def) && explicit_origin == o.explicit_origin;
    }
};

struct ArchiveDecl {
    ArchiveFn fn = ArchiveFn::last;
    std::string property;
    SourcePos pos;
    bool operator==(ArchiveDecl const &) const = default;
};

struct FiltersDecl {
    std::vector<std::string> temporal;
    std::vector<ArchiveDecl> archive;
    SourcePos pos;
    bool operator==(FiltersDecl const &) const = default;
};

struct ClassDecl {
    std::string name;
    std::vector<std::string> supers;
    std::vector<PropertyDecl> properties;
    std::vector<SourceOperation> operations;
    std::optional<FiltersDecl> filters;
    SourcePos pos;
    bool operator==(ClassDecl const &) const = default;
};

struct ConfigDecl {
    RetentionConfig config;
    SourcePos pos;
    bool operator==(ConfigDecl const &) const = default;
};

struct EnvironmentDecl {
    std::string name;
    std::vector<std::string> classes;
    std::optional<ConfigDecl> config;
    SourcePos pos;
    bool operator==(EnvironmentDecl const &) const = default;
};

struct MappingDecl {
    std::string class_name;
    MappingExpr expr;
    SourcePos pos;
    bool operator==(MappingDecl const &) const = default;
};

struct WarehouseDef {
    std::string name; // empty when no "warehouse NAME;" line
    std::vector<ClassDecl> classes;
    std::vector<EnvironmentDecl> environments;
    std::vector<MappingDecl> mappings;
    std::optional<ConfigDecl> config;

    ClassDecl const *find_class(std::string_view name) const;
    MappingDecl const *find_mapping(std::string_view class_name) const;
    bool operator==(WarehouseDef const &) const = default;
};

// Grammar summary (full EBNF in docs/grammar.md):
//   item := 'warehouse' NAME ';'
//         | 'interface' NAME ['(' 'extend' NAMES ')'] '{' member* '}' ['with' 'filters' '{' filter* '}']
//         | 'environment' NAME '{' 'class' NAMES ';' ['config' '{' entry* '}'] '}'
//         | 'config' '{' entry* '}'
//         | 'mapping' NAME '=' expr ';'
// Throws Error(SyntaxError | UnknownFunction) with line/column.
WarehouseDef parse_warehouse_def(std::string_view text);
std::string print_warehouse_def(WarehouseDef const &def);

} // namespace edw
