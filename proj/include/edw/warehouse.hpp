#pragma once

#include "edw/error.hpp"
#include "edw/mapping.hpp"
#include "edw/property.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace edw {

// Tempo: properties whose changes are historized. Archi: how evicted past
// values of (a subset of) them are summarized.
struct Filters {
    std::set<std::string> tempo;
    std::map<std::string, ArchiveFn> archi;

    bool empty() const { return tempo.empty() && archi.empty(); }
    bool operator==(Filters const &) const = default;
};

struct WarehouseClass {
    std::string name;
    std::vector<PropertyDef> structure; // declared (own) properties
    std::vector<std::string> supers;    // direct supers, declaration order
    std::optional<MappingExpr> mapping;
    Filters filters;                    // own filters
    std::vector<SourceOperation> operations;
    SourcePos pos;

    PropertyDef const *own_property(std::string_view name) const;
    bool operator==(WarehouseClass const &) const = default;
};

struct Environment {
    std::string name;
    std::vector<std::string> classes;
    RetentionConfig config; // local entries only; see effective_config
    SourcePos pos;
    bool operator==(Environment const &) const = default;
};

struct WarehouseSchema {
    std::string name;
    std::map<std::string, WarehouseClass> classes;
    std::map<std::string, Environment> environments;
    RetentionConfig global_config;

    WarehouseClass const *find(std::string_view name) const;
    WarehouseClass const &get(std::string_view name) const; // throws UnknownClass
    bool operator==(WarehouseSchema const &) const = default;
};

// Own plus inherited properties: supers first (depth-first, declaration
// order, each property once), then the class's own. Properties reached
// through several supers merge when their definitions agree.
// Throws UnknownClass, InheritanceCycle, PropertyConflict.
std::vector<PropertyDef> flatten_type(WarehouseSchema const &schema, std::string_view class_name);

// Reflexive, transitive.
bool is_subclass(WarehouseSchema const &schema, std::string_view ci, std::string_view cj);

// All transitive supers, excluding the class itself, sorted by name.
std::vector<std::string> ancestors(WarehouseSchema const &schema, std::string_view class_name);
// The class itself and every class below it, sorted by name.
std::vector<std::string> descendants(WarehouseSchema const &schema, std::string_view class_name);

// Name of the environment holding the class (first match), if any.
std::optional<std::string> environment_of(WarehouseSchema const &schema, std::string_view class_name);

// Own filters merged with those of every transitive super in the same
// environment. Empty for a class outside any environment.
Filters effective_filters(WarehouseSchema const &schema, std::string_view class_name);

// Environment entries over warehouse-wide defaults. Throws UnknownEnvironment.
RetentionConfig effective_config(WarehouseSchema const &schema, std::string_view env);

enum class HistorizationLevel { attribute, class_level, graph };
std::string_view to_string(HistorizationLevel level);
// Throws UnknownEnvironment.
HistorizationLevel historization_level(WarehouseSchema const &schema, std::string_view env);

// Every structural violation, each with class/property coordinates. Never
// throws. Checks: relation endpoints exist (one finding per missing class),
// environments are disjoint, non-empty and name known classes, classes with
// own filters live in an environment, archive keys are temporal, filter names
// resolve, supers exist and are acyclic, flattening is conflict-free,
// environments that archive have a retention bound, archive functions fit the
// archived property's type.
std::vector<Diagnostic> validate_schema(WarehouseSchema const &schema);

// Class names such that every class comes after its supers and after the
// classes its hierarchization mapping references; ties broken by name.
// Throws InheritanceCycle.
std::vector<std::string> dependency_order(WarehouseSchema const &schema);

// Whether the class's mapping is a specialization (it then owns composite
// objects) or a generalization (it owns no objects of its own).
bool is_specialized(WarehouseClass const &cls);
bool is_generalized(WarehouseClass const &cls);
bool is_extracted(WarehouseClass const &cls);

// Classes whose objects may stand for `class_name` as a relation endpoint or
// as a specialization operand: the class and, recursively, subclasses not
// produced by a specialization. Sorted by name.
std::vector<std::string> object_range(WarehouseSchema const &schema, std::string_view class_name);

} // namespace edw
