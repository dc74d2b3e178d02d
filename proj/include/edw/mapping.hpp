#pragma once

#include "edw/error.hpp"
#include "edw/value.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace edw {

class TokenStream;

// binder.property[.field...] or an unqualified property[.field...].
struct Path {
    std::vector<std::string> segments;
    SourcePos pos;

    std::string text() const;
    bool operator==(Path const &) const = default;
};

enum class CompareOp { eq, ne, lt, le, gt, ge };

std::string_view to_string(CompareOp op);

struct Atom {
    enum class Kind { compare, contains };

    Kind kind = Kind::compare;
    Path path;
    CompareOp op = CompareOp::eq;
    Value literal;      // compare: null, integer, real or string
    std::string binder; // contains: the bound object that must be a member of `path`
    SourcePos pos;

    bool operator==(Atom const &) const = default;
};

// Conjunction of atoms; no atoms means "true".
struct Predicate {
    std::vector<Atom> atoms;
    bool operator==(Predicate const &) const = default;
};

enum class AggregateFn { count, sum, avg, max, min };

std::string_view to_string(AggregateFn fn);
bool parse_aggregate_fn(std::string_view name, AggregateFn &out);

// name := fn(path) introduces a computed attribute; name : Type a specific one.
struct AugmentBinding {
    std::string name;
    bool computed = true;
    AggregateFn fn = AggregateFn::count;
    Path argument;
    Type type;
    SourcePos pos;

    bool operator==(AugmentBinding const &) const = default;
};

struct ProjectItem {
    Path path;
    std::string alias; // empty: the last path segment names the result

    std::string result_name() const { return alias.empty() ? path.segments.back() : alias; }
    bool operator==(ProjectItem const &) const = default;
};

enum class MappingKind { source, project, hide, augment, select, join, generalize, specialize };

std::string_view to_string(MappingKind kind);

// What a `binder: Name` leaf denotes once resolved against the schemas.
enum class RefKind { unresolved, source_interface, warehouse_class };

// Construction expression. Extraction nodes (source, project, hide,
// augment, select, join) build a class from source interfaces;
// generalize and specialize organize warehouse classes.
struct MappingExpr {
    MappingKind kind = MappingKind::source;
    std::string binder;                   // leaf binder, or the "as" name of a call
    std::string target;                   // leaf only: interface or class name
    RefKind ref = RefKind::unresolved;
    std::vector<ProjectItem> items;       // project, hide, generalize
    std::vector<AugmentBinding> bindings; // augment
    Predicate predicate;                  // select, join, specialize
    std::vector<MappingExpr> operands;
    SourcePos pos;

    bool is_hierarchization() const { return kind == MappingKind::generalize || kind == MappingKind::specialize; }
    bool operator==(MappingExpr const &) const = default;
};

// Grammar:
//   expr     := NAME ':' NAME | call ['as' NAME]
//   call     := select(expr, pred) | join(expr, expr, pred) | project(item+, expr)
//             | hide(item+, expr) | augment(binding+, expr)
//             | generalize(item+, expr+) | specialize(expr+, pred)
//   item     := path ['as' NAME]
//   binding  := NAME ':=' (count|sum|avg|max|min) '(' path ')' | NAME ':' TYPE
//   pred     := 'true' | atom (('and' | '∧' | '&&') atom)*
//   atom     := path op literal | path ('∋' | 'contains') NAME | path '=' NAME
// Throws Error(SyntaxError | UnknownFunction).
MappingExpr parse_mapping(std::string_view text);
MappingExpr parse_mapping(TokenStream &tokens);
Predicate parse_predicate(TokenStream &tokens);
std::string print_mapping(MappingExpr const &expr);
std::string print_predicate(Predicate const &predicate);

// Leaves (binder: Name) reachable from `expr`, left to right.
std::vector<MappingExpr const *> mapping_leaves(MappingExpr const &expr);

} // namespace edw
