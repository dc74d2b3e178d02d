#pragma once

#include "edw/algebra.hpp"
#include "edw/source_schema.hpp"
#include "edw/warehouse.hpp"
#include "edw/warehouse_def.hpp"

#include <functional>
#include <set>
#include <string>
#include <vector>

namespace edw {

struct Resolution {
    WarehouseSchema schema;
    std::vector<Diagnostic> diagnostics; // empty iff the schema is valid
};

// Binds a warehouse definition to a source schema: attaches mappings,
// applies generalizations to the class lattice, matches derived properties
// to source properties, infers and checks computed types, type-checks
// mappings, then runs validate_schema. Never throws for semantic problems.
Resolution resolve_collect(WarehouseDef const &def, SourceSchema const &source);

// As resolve_collect, but any diagnostic is fatal. Throws DiagnosticError.
WarehouseSchema resolve(WarehouseDef const &def, SourceSchema const &source);

// Output structure of a class's mapping before conformance (extraction
// mappings only); used by reports and tests.
std::vector<PropertyDef> mapping_output(WarehouseClass const &cls, SourceSchema const &source);

// Source interfaces whose records end up (directly or through operands) in
// the class.
std::set<std::string> class_sources(WarehouseSchema const &schema, std::string const &class_name);

// Shape of a warehouse class seen as an operand: its flattened structure,
// qualified by `binder`, with no rows.
ClassBuild class_shape(WarehouseSchema const &schema, std::string const &class_name, std::string const &binder);

// Supplies the rows of a class operand (empty during type checking).
using ClassRows = std::function<std::vector<BuildRow>(std::string const &class_name, ClassBuild const &shape)>;

// Evaluates one hierarchization operand: "b: Class" or
// "select(b: Class, pred) [as e]".
ClassBuild eval_class_operand(MappingExpr const &operand, WarehouseSchema const &schema, ClassRows const &rows,
                              EvalContext const &ctx);

} // namespace edw
