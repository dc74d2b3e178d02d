#pragma once

#include "edw/mapping.hpp"
#include "edw/property.hpp"
#include "edw/snapshot.hpp"
#include "edw/source_schema.hpp"

#include <optional>
#include <string>
#include <vector>

namespace edw {

// A property of an intermediate class, with the binder names that qualify
// it ("h" in h.nom). Relation targets name source interfaces during
// extraction and warehouse classes during specialization.
struct BuildProperty {
    PropertyDef def;
    std::vector<std::string> tags;
    bool operator==(BuildProperty const &) const = default;
};

// One member of a build. `identities` holds, per identity component, the
// bound object (a one-element Links or Oids value) that containment atoms
// test against.
struct BuildRow {
    SourceKey key;
    std::vector<Value> values; // parallel to ClassBuild::structure
    std::vector<Value> identities;
    bool operator==(BuildRow const &) const = default;
};

// Temporary class produced by one step of a mapping. Rows are kept sorted
// by source key; keys are unique.
struct ClassBuild {
    std::vector<BuildProperty> structure;
    std::vector<std::vector<std::string>> identity_tags; // binders naming each identity component
    std::vector<BuildRow> rows;
    std::vector<std::string> supers; // always empty for extraction results

    std::vector<std::string> names() const;
    std::optional<std::size_t> index_of(std::string const &name) const; // first match
    bool operator==(ClassBuild const &) const = default;
};

struct EvalContext {
    SourceSchema const *source = nullptr;
    Snapshot const *snapshot = nullptr; // null: type inference only (no rows)
};

// binder: Interface. One row per record of the interface or a
// sub-interface; structure is the flattened interface.
ClassBuild source_build(EvalContext const &ctx, std::string const &binder, std::string const &interface);

// Adds `binder` as a qualifier of every property and identity component.
ClassBuild rename_binder(ClassBuild build, std::string const &binder);

ClassBuild eval_project(std::vector<ProjectItem> const &items, ClassBuild const &child);
ClassBuild eval_hide(std::vector<ProjectItem> const &items, ClassBuild const &child);
ClassBuild eval_augment(std::vector<AugmentBinding> const &bindings, ClassBuild const &child, EvalContext const &ctx);
ClassBuild eval_select(Predicate const &predicate, ClassBuild const &child, EvalContext const &ctx);
ClassBuild eval_join(Predicate const &predicate, ClassBuild const &left, ClassBuild const &right,
                     EvalContext const &ctx);

// Bottom-up evaluation of a pure extraction expression. Throws on any
// hierarchization node.
ClassBuild eval_extraction(MappingExpr const &expr, EvalContext const &ctx);

// Λ over already-built operand extensions: structure = items, rows = union
// of the operands' rows restricted to the items (first occurrence of a key wins).
ClassBuild eval_generalize(std::vector<ProjectItem> const &items, std::vector<ClassBuild> const &operands);
// Σ over already-built operands: tuples of operand rows satisfying the
// predicate; values and keys are concatenated in operand order.
ClassBuild eval_specialize(Predicate const &predicate, std::vector<ClassBuild> const &operands,
                           EvalContext const &ctx);

// Predicate value on one row (the predicate must already type-check).
bool eval_predicate(Predicate const &predicate, ClassBuild const &build, BuildRow const &row, EvalContext const &ctx);
// Throws UnknownPath, AmbiguousProperty or TypeMismatchInPredicate.
void check_predicate(Predicate const &predicate, ClassBuild const &build, EvalContext const &ctx);

// Comparison used by select atoms: numbers numerically, everything else by
// the canonical value order. A null value only satisfies "= null" and "!=".
bool compare_values(Value const &value, CompareOp op, Value const &literal);

} // namespace edw
