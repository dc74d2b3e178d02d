#include "edw/resolver.hpp"

#include <algorithm>

namespace edw {

namespace {

struct Resolver {
    WarehouseDef const &def;
    SourceSchema const &source;
    WarehouseSchema schema;
    std::vector<Diagnostic> out;

    void report(ErrorKind kind, std::string message, SourcePos pos, std::string cls = {}, std::string prop = {})
    {
        out.push_back(Diagnostic{kind, std::move(message), pos, std::move(cls), std::move(prop)});
    }
    void report(Error const &e, std::string cls, std::string prop = {})
    {
        report(e.kind(), e.detail(), e.pos(), std::move(cls), std::move(prop));
    }

    void build_classes();
    void attach_mappings();
    bool bind_extraction(MappingExpr &expr, std::string const &cls);
    bool bind_hierarchization(MappingExpr &expr, std::string const &cls);
    void apply_generalizations();
    void apply_specializations();
    void check_extracted(WarehouseClass &cls);
    void check_specialized(WarehouseClass const &cls);
    void check_unmapped(WarehouseClass const &cls);
    void check_inverses();
};

void Resolver::build_classes()
{
    if (!def.name.empty())
        schema.name = def.name;
    if (def.config)
        schema.global_config = def.config->config;
    for (auto const &decl : def.classes) {
        if (schema.classes.count(decl.name)) {
            report(ErrorKind::InvalidSchema, "class '" + decl.name + "' is declared twice", decl.pos, decl.name);
            continue;
        }
        WarehouseClass cls;
        cls.name = decl.name;
        cls.supers = decl.supers;
        cls.operations = decl.operations;
        cls.pos = decl.pos;
        for (auto const &p : decl.properties) {
            if (cls.own_property(p.def.name)) {
                report(ErrorKind::PropertyConflict, "property '" + p.def.name + "' is declared twice", p.def.pos,
                       decl.name, p.def.name);
                continue;
            }
            cls.structure.push_back(p.def);
        }
        if (decl.filters) {
            cls.filters.tempo.insert(decl.filters->temporal.begin(), decl.filters->temporal.end());
            for (auto const &a : decl.filters->archive) {
                auto [it, fresh] = cls.filters.archi.emplace(a.property, a.fn);
                if (!fresh && it->second != a.fn)
                    report(ErrorKind::InvalidSchema, "property '" + a.property + "' is archived with two functions",
                           a.pos, decl.name, a.property);
            }
        }
        schema.classes.emplace(cls.name, std::move(cls));
    }
    for (auto const &decl : def.environments) {
        if (schema.environments.count(decl.name)) {
            report(ErrorKind::InvalidSchema, "environment '" + decl.name + "' is declared twice", decl.pos);
            continue;
        }
        Environment env;
        env.name = decl.name;
        env.classes = decl.classes;
        env.pos = decl.pos;
        if (decl.config)
            env.config = decl.config->config;
        schema.environments.emplace(env.name, std::move(env));
    }
}

bool Resolver::bind_extraction(MappingExpr &expr, std::string const &cls)
{
    if (expr.is_hierarchization()) {
        report(ErrorKind::InvalidSchema,
               std::string(to_string(expr.kind)) + " cannot be nested inside an extraction mapping", expr.pos, cls);
        return false;
    }
    if (expr.kind == MappingKind::source) {
        if (source.find(expr.target)) {
            expr.ref = RefKind::source_interface;
            return true;
        }
        if (schema.find(expr.target))
            report(ErrorKind::InvalidSchema,
                   "extraction mapping reads warehouse class '" + expr.target + "'; only source interfaces are allowed",
                   expr.pos, cls);
        else
            report(ErrorKind::UnknownInterface, "unknown source interface '" + expr.target + "'", expr.pos, cls);
        return false;
    }
    bool ok = true;
    for (auto &op : expr.operands)
        ok = bind_extraction(op, cls) && ok;
    return ok;
}

bool Resolver::bind_hierarchization(MappingExpr &expr, std::string const &cls)
{
    bool ok = true;
    for (auto &op : expr.operands) {
        MappingExpr *leaf = &op;
        if (op.kind == MappingKind::select && expr.kind == MappingKind::specialize &&
            op.operands.size() == 1 && op.operands[0].kind == MappingKind::source)
            leaf = &op.operands[0];
        if (leaf->kind != MappingKind::source) {
            report(ErrorKind::InvalidSchema,
                   std::string(to_string(expr.kind)) + " operands must be warehouse classes (\"b: Class\")", op.pos,
                   cls);
            ok = false;
            continue;
        }
        if (!schema.find(leaf->target)) {
            if (source.find(leaf->target))
                report(ErrorKind::InvalidSchema,
                       std::string(to_string(expr.kind)) + " organizes warehouse classes; '" + leaf->target +
                           "' is a source interface",
                       leaf->pos, cls);
            else
                report(ErrorKind::UnknownClass, "unknown class '" + leaf->target + "'", leaf->pos, cls);
            ok = false;
            continue;
        }
        if (leaf->target == cls) {
            report(ErrorKind::InvalidSchema, "class '" + cls + "' cannot be its own operand", leaf->pos, cls);
            ok = false;
            continue;
        }
        leaf->ref = RefKind::warehouse_class;
    }
    if (expr.operands.empty()) {
        report(ErrorKind::EmptyOperands, std::string(to_string(expr.kind)) + " needs at least one operand", expr.pos,
               cls);
        ok = false;
    }
    return ok;
}

void Resolver::attach_mappings()
{
    for (auto const &m : def.mappings) {
        auto it = schema.classes.find(m.class_name);
        if (it == schema.classes.end()) {
            report(ErrorKind::UnknownClass, "mapping for unknown class '" + m.class_name + "'", m.pos, m.class_name);
            continue;
        }
        if (it->second.mapping) {
            report(ErrorKind::InvalidSchema, "class '" + m.class_name + "' has two mappings", m.pos, m.class_name);
            continue;
        }
        MappingExpr expr = m.expr;
        bool ok = expr.is_hierarchization() ? bind_hierarchization(expr, m.class_name)
                                            : bind_extraction(expr, m.class_name);
        if (ok)
            it->second.mapping = std::move(expr);
    }
}

std::string item_name(ProjectItem const &item)
{
    return item.path.segments.back();
}

bool same_shape(PropertyDef const &a, PropertyDef const &b)
{
    return a.kind == b.kind && a.type == b.type && a.target == b.target && a.cardinality == b.cardinality;
}

void Resolver::apply_generalizations()
{
    for (auto const &decl : def.classes) {
        auto cit = schema.classes.find(decl.name);
        if (cit == schema.classes.end() || !is_generalized(cit->second))
            continue;
        WarehouseClass &c0 = cit->second;
        MappingExpr const &m = *c0.mapping;
        std::vector<std::string> operands;
        for (auto const &op : m.operands)
            operands.push_back(op.target);

        std::vector<std::string> names;
        for (auto const &item : m.items) {
            std::string n = item_name(item);
            if (std::find(names.begin(), names.end(), n) != names.end()) {
                report(ErrorKind::NameCollision, "generalize lists '" + n + "' twice", item.path.pos, c0.name, n);
                continue;
            }
            names.push_back(n);
        }

        // The lifted properties as seen by each operand, before patching.
        std::vector<PropertyDef> lifted;
        bool ok = true;
        for (std::size_t i = 0; i < operands.size() && ok; ++i) {
            std::vector<PropertyDef> flat;
            try {
                flat = flatten_type(schema, operands[i]);
            } catch (Error const &e) {
                report(e, c0.name);
                ok = false;
                break;
            }
            for (std::size_t k = 0; k < names.size(); ++k) {
                auto it = std::find_if(flat.begin(), flat.end(), [&](auto const &p) { return p.name == names[k]; });
                if (it == flat.end()) {
                    report(ErrorKind::NotCommonProperty,
                           "'" + names[k] + "' is not a property of operand '" + operands[i] + "'", m.pos, c0.name,
                           names[k]);
                    ok = false;
                    continue;
                }
                if (i == 0) {
                    PropertyDef p = *it;
                    if (p.source_path.empty())
                        p.source_path = operands[i] + "." + p.name;
                    lifted.push_back(p);
                } else if (k < lifted.size() && !same_shape(lifted[k], *it)) {
                    report(ErrorKind::NotCommonProperty,
                           "'" + names[k] + "' has different definitions in '" + operands[0] + "' and '" +
                               operands[i] + "'",
                           m.pos, c0.name, names[k]);
                    ok = false;
                }
            }
        }
        if (!ok)
            continue;

        if (c0.structure.empty()) {
            for (auto &p : lifted)
                p.pos = c0.pos;
            c0.structure = lifted;
        } else {
            for (auto const &p : c0.structure)
                if (std::find(names.begin(), names.end(), p.name) == names.end())
                    report(ErrorKind::NotCommonProperty,
                           "'" + p.name + "' is declared by generalized class '" + c0.name +
                               "' but not lifted by its mapping",
                           p.pos, c0.name, p.name);
            for (auto const &l : lifted) {
                PropertyDef *own = nullptr;
                for (auto &p : c0.structure)
                    if (p.name == l.name)
                        own = &p;
                if (!own) {
                    report(ErrorKind::NotCommonProperty,
                           "lifted property '" + l.name + "' is missing from class '" + c0.name + "'", c0.pos, c0.name,
                           l.name);
                    continue;
                }
                if (!same_shape(*own, l)) {
                    report(ErrorKind::TypeMismatch,
                           "'" + format_property(*own) + "' does not match the operands' " + format_property(l),
                           own->pos, c0.name, l.name);
                    continue;
                }
                if (own->origin == Origin::derived)
                    own->source_path = l.source_path;
            }
        }

        if (c0.supers.empty()) {
            std::vector<std::string> common;
            bool first = true;
            for (auto const &o : operands) {
                std::vector<std::string> s;
                for (auto const &x : schema.get(o).supers)
                    if (x != c0.name)
                        s.push_back(x);
                std::sort(s.begin(), s.end());
                if (first)
                    common = s;
                else {
                    std::vector<std::string> both;
                    std::set_intersection(common.begin(), common.end(), s.begin(), s.end(), std::back_inserter(both));
                    common = both;
                }
                first = false;
            }
            c0.supers = common;
        }
        std::vector<std::string> c0_supers = c0.supers;
        for (auto const &o : operands) {
            WarehouseClass &ci = schema.classes.at(o);
            std::erase_if(ci.structure, [&](PropertyDef const &p) {
                return std::find(names.begin(), names.end(), p.name) != names.end();
            });
            std::erase_if(ci.supers, [&](std::string const &s) {
                return s == c0.name || std::find(c0_supers.begin(), c0_supers.end(), s) != c0_supers.end();
            });
            ci.supers.push_back(c0.name);
        }
    }
}

void Resolver::apply_specializations()
{
    for (auto &[name, cls] : schema.classes) {
        if (!is_specialized(cls))
            continue;
        if (!cls.structure.empty())
            report(ErrorKind::InvalidSchema,
                   "specialized class '" + name + "' inherits its whole structure and cannot declare properties",
                   cls.structure.front().pos, name, cls.structure.front().name);
        std::vector<std::string> operands;
        for (auto const *leaf : mapping_leaves(*cls.mapping))
            if (std::find(operands.begin(), operands.end(), leaf->target) == operands.end())
                operands.push_back(leaf->target);
        if (cls.supers.empty()) {
            cls.supers = operands;
            continue;
        }
        auto a = cls.supers, b = operands;
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        if (a != b)
            report(ErrorKind::InvalidSchema,
                   "specialized class '" + name + "' must extend exactly its operands", cls.pos, name);
    }
}

bool compatible_computed(Type const &declared, Type const &inferred)
{
    if (declared == inferred)
        return true;
    if (declared.is_integer() && inferred.is_integer())
        return true;
    return declared.kind() == Type::Kind::Double && inferred.is_numeric();
}

void Resolver::check_extracted(WarehouseClass &cls)
{
    ClassBuild shape;
    try {
        shape = eval_extraction(*cls.mapping, EvalContext{&source, nullptr});
    } catch (Error const &e) {
        report(e, cls.name);
        return;
    }
    std::vector<PropertyDef> flat;
    try {
        flat = flatten_type(schema, cls.name);
    } catch (Error const &) {
        return; // reported by validate_schema
    }
    for (auto const &p : flat) {
        auto idx = shape.index_of(p.name);
        PropertyDef const *o = idx ? &shape.structure[*idx].def : nullptr;
        bool own = cls.own_property(p.name) != nullptr;
        SourcePos pos = own ? cls.own_property(p.name)->pos : cls.mapping->pos;
        switch (p.origin) {
        case Origin::derived:
            if (!o || o->origin != Origin::derived) {
                report(ErrorKind::UnresolvedSourceProperty,
                       "derived property '" + p.name + "' is not produced from the source by the mapping of '" +
                           cls.name + "'",
                       pos, cls.name, p.name);
                continue;
            }
            if (p.is_relation() != o->is_relation() || (p.is_relation() && p.kind != o->kind)) {
                report(ErrorKind::TypeMismatch,
                       "'" + format_property(p) + "' does not match source " + std::string(to_string(o->kind)) + " " +
                           o->source_path,
                       pos, cls.name, p.name);
                continue;
            }
            if (!p.is_relation() && p.type != o->type) {
                report(ErrorKind::TypeMismatch,
                       "'" + p.name + "' is declared " + format_type(p.type) + " but " + o->source_path + " is " +
                           format_type(o->type),
                       pos, cls.name, p.name);
                continue;
            }
            if (p.is_relation()) {
                if (p.cardinality != o->cardinality) {
                    report(ErrorKind::TypeMismatch, "'" + p.name + "' and " + o->source_path + " differ in cardinality",
                           pos, cls.name, p.name);
                    continue;
                }
                if (schema.find(p.target)) {
                    bool fits = false;
                    for (auto const &iface : class_sources(schema, p.target))
                        if (source.extends(iface, o->target) || source.extends(o->target, iface))
                            fits = true;
                    if (!fits)
                        report(ErrorKind::TypeMismatch,
                               "'" + p.name + "' targets class '" + p.target + "', which is not built from '" +
                                   o->target + "' records",
                               pos, cls.name, p.name);
                }
            }
            if (own)
                for (auto &q : cls.structure)
                    if (q.name == p.name)
                        q.source_path = o->source_path;
            break;
        case Origin::computed:
            if (!o || o->origin != Origin::computed) {
                report(ErrorKind::TypeInferenceError,
                       "computed property '" + p.name + "' has no augment binding in the mapping of '" + cls.name + "'",
                       pos, cls.name, p.name);
                continue;
            }
            if (!compatible_computed(p.type, o->type)) {
                report(ErrorKind::TypeInferenceError,
                       "'" + p.name + "' is declared " + format_type(p.type) + " but " + o->source_path + " yields " +
                           format_type(o->type),
                       pos, cls.name, p.name);
                continue;
            }
            if (own)
                for (auto &q : cls.structure)
                    if (q.name == p.name)
                        q.source_path = o->source_path;
            break;
        case Origin::specific:
            if (o && o->origin == Origin::specific && o->type != p.type)
                report(ErrorKind::TypeMismatch,
                       "'" + p.name + "' is declared " + format_type(p.type) + " but augment gives " +
                           format_type(o->type),
                       pos, cls.name, p.name);
            break;
        }
    }
}

void Resolver::check_specialized(WarehouseClass const &cls)
{
    MappingExpr const &m = *cls.mapping;
    EvalContext ctx{&source, nullptr};
    ClassRows none = [](std::string const &, ClassBuild const &) { return std::vector<BuildRow>{}; };
    try {
        std::vector<ClassBuild> ops;
        for (auto const &op : m.operands)
            ops.push_back(eval_class_operand(op, schema, none, ctx));
        eval_specialize(m.predicate, ops, ctx);
    } catch (Error const &e) {
        report(e, cls.name);
    }
}

void Resolver::check_unmapped(WarehouseClass const &cls)
{
    for (auto const &p : cls.structure) {
        if (p.origin == Origin::derived)
            report(ErrorKind::UnresolvedSourceProperty,
                   "derived property '" + p.name + "' needs a mapping for class '" + cls.name + "'", p.pos, cls.name,
                   p.name);
        else if (p.origin == Origin::computed)
            report(ErrorKind::TypeInferenceError,
                   "computed property '" + p.name + "' needs a mapping for class '" + cls.name + "'", p.pos, cls.name,
                   p.name);
    }
}

void Resolver::check_inverses()
{
    for (auto const &[name, cls] : schema.classes)
        for (auto const &p : cls.structure) {
            if (!p.inverse || !schema.find(p.target) || !schema.find(p.inverse->interface))
                continue;
            std::vector<PropertyDef> flat;
            try {
                flat = flatten_type(schema, p.inverse->interface);
            } catch (Error const &) {
                continue;
            }
            auto it = std::find_if(flat.begin(), flat.end(),
                                   [&](auto const &q) { return q.name == p.inverse->property; });
            bool ok = p.inverse->interface == p.target && it != flat.end() && it->is_relation() &&
                      (is_subclass(schema, name, it->target) || is_subclass(schema, it->target, name));
            if (!ok)
                report(ErrorKind::InverseMismatch,
                       "inverse " + p.inverse->interface + "::" + p.inverse->property + " of '" + p.name +
                           "' is not a relation back to '" + name + "'",
                       p.pos, name, p.name);
        }
}

} // namespace

std::set<std::string> class_sources(WarehouseSchema const &schema, std::string const &class_name)
{
    std::set<std::string> out;
    std::set<std::string> seen;
    std::vector<std::string> todo{class_name};
    while (!todo.empty()) {
        std::string c = todo.back();
        todo.pop_back();
        if (!seen.insert(c).second)
            continue;
        auto const *cls = schema.find(c);
        if (!cls || !cls->mapping)
            continue;
        for (auto const *leaf : mapping_leaves(*cls->mapping)) {
            if (cls->mapping->is_hierarchization())
                todo.push_back(leaf->target);
            else
                out.insert(leaf->target);
        }
    }
    return out;
}

ClassBuild class_shape(WarehouseSchema const &schema, std::string const &class_name, std::string const &binder)
{
    ClassBuild out;
    for (auto const &p : flatten_type(schema, class_name))
        out.structure.push_back(BuildProperty{p, {binder}});
    out.identity_tags = {{binder}};
    return out;
}

ClassBuild eval_class_operand(MappingExpr const &operand, WarehouseSchema const &schema, ClassRows const &rows,
                              EvalContext const &ctx)
{
    if (operand.kind == MappingKind::source) {
        ClassBuild b = class_shape(schema, operand.target, operand.binder);
        b.rows = rows(operand.target, b);
        return b;
    }
    if (operand.kind != MappingKind::select || operand.operands.size() != 1)
        throw Error(ErrorKind::InvalidSchema, "unsupported hierarchization operand", operand.pos);
    ClassBuild b = eval_select(operand.predicate, eval_class_operand(operand.operands[0], schema, rows, ctx), ctx);
    if (!operand.binder.empty())
        b = rename_binder(std::move(b), operand.binder);
    return b;
}

std::vector<PropertyDef> mapping_output(WarehouseClass const &cls, SourceSchema const &source)
{
    std::vector<PropertyDef> out;
    if (!is_extracted(cls))
        return out;
    for (auto const &p : eval_extraction(*cls.mapping, EvalContext{&source, nullptr}).structure)
        out.push_back(p.def);
    return out;
}

Resolution resolve_collect(WarehouseDef const &def, SourceSchema const &source)
{
    Resolver r{def, source, {}, {}};
    r.build_classes();
    r.attach_mappings();
    r.apply_generalizations();
    r.apply_specializations();
    std::vector<Diagnostic> structural = validate_schema(r.schema);
    for (auto &[name, cls] : r.schema.classes) {
        if (is_extracted(cls))
            r.check_extracted(cls);
        else if (is_specialized(cls))
            r.check_specialized(cls);
        else if (!cls.mapping)
            r.check_unmapped(cls);
    }
    r.check_inverses();
    r.out.insert(r.out.end(), structural.begin(), structural.end());
    return Resolution{std::move(r.schema), std::move(r.out)};
}

WarehouseSchema resolve(WarehouseDef const &def, SourceSchema const &source)
{
    Resolution res = resolve_collect(def, source);
    if (!res.diagnostics.empty())
        throw DiagnosticError(std::move(res.diagnostics));
    return std::move(res.schema);
}

} // namespace edw
