#include "edw/algebra.hpp"

#include <algorithm>
#include <set>

namespace edw {

std::vector<std::string> ClassBuild::names() const
{
    std::vector<std::string> out;
    for (auto const &p : structure)
        out.push_back(p.def.name);
    return out;
}

std::optional<std::size_t> ClassBuild::index_of(std::string const &name) const
{
    for (std::size_t i = 0; i < structure.size(); ++i)
        if (structure[i].def.name == name)
            return i;
    return std::nullopt;
}

namespace {

bool has_tag(std::vector<std::string> const &tags, std::string const &t)
{
    return std::find(tags.begin(), tags.end(), t) != tags.end();
}

std::set<std::string> all_tags(ClassBuild const &b)
{
    std::set<std::string> out;
    for (auto const &p : b.structure)
        out.insert(p.tags.begin(), p.tags.end());
    for (auto const &t : b.identity_tags)
        out.insert(t.begin(), t.end());
    return out;
}

void sort_rows(ClassBuild &b)
{
    std::sort(b.rows.begin(), b.rows.end(), [](BuildRow const &x, BuildRow const &y) { return x.key < y.key; });
}

// Where a path lands in a build, and what it denotes there.
struct Resolved {
    std::size_t slot = 0;
    std::vector<std::string> rest; // segments after the property
    bool through_relation = false;
    bool multi = false; // some step fans out over a set
    bool relation = false;
    Cardinality cardinality = Cardinality::one;
    std::string target;
    Type type;

    bool set_valued() const
    {
        return multi || (relation && cardinality == Cardinality::many) || (!relation && type.kind() == Type::Kind::Set);
    }
    // Element type for aggregates over attributes.
    Type element() const { return !relation && type.kind() == Type::Kind::Set ? type.element() : type; }
};

Resolved resolve(ClassBuild const &b, Path const &path, EvalContext const &ctx, ErrorKind unknown)
{
    auto const &s = path.segments;
    std::set<std::string> tags = all_tags(b);
    std::size_t start = 1;
    std::vector<std::size_t> candidates;
    if (s.size() >= 2 && tags.count(s[0])) {
        start = 2;
        for (std::size_t i = 0; i < b.structure.size(); ++i)
            if (b.structure[i].def.name == s[1] && has_tag(b.structure[i].tags, s[0]))
                candidates.push_back(i);
    } else {
        for (std::size_t i = 0; i < b.structure.size(); ++i)
            if (b.structure[i].def.name == s[0])
                candidates.push_back(i);
    }
    if (candidates.empty())
        throw Error(unknown, "no property '" + path.text() + "'", path.pos);
    if (candidates.size() > 1)
        throw Error(ErrorKind::AmbiguousProperty,
                    "'" + path.text() + "' matches several properties; qualify it with a binder", path.pos);
    Resolved r;
    r.slot = candidates.front();
    r.rest.assign(s.begin() + static_cast<std::ptrdiff_t>(start), s.end());
    PropertyDef const &def = b.structure[r.slot].def;
    r.relation = def.is_relation();
    r.cardinality = def.cardinality;
    r.target = def.target;
    r.type = def.type;
    for (auto const &seg : r.rest) {
        if (r.relation) {
            SourceProperty const *sp = ctx.source ? ctx.source->find_property(r.target, seg) : nullptr;
            if (!sp)
                throw Error(ErrorKind::UnknownPath, "'" + r.target + "' has no property '" + seg + "' (in '" +
                                                        path.text() + "')",
                            path.pos);
            r.through_relation = true;
            if (r.cardinality == Cardinality::many)
                r.multi = true;
            r.relation = sp->is_relation();
            r.cardinality = sp->cardinality;
            r.target = sp->target;
            r.type = sp->type;
            continue;
        }
        Type const *t = &r.type;
        if (t->kind() == Type::Kind::Set && t->element().kind() == Type::Kind::Struct) {
            r.multi = true;
            t = &t->element();
        }
        Type const *f = t->kind() == Type::Kind::Struct ? t->field(seg) : nullptr;
        if (!f)
            throw Error(ErrorKind::UnknownPath, "no field '" + seg + "' in '" + path.text() + "'", path.pos);
        r.type = *f;
    }
    return r;
}

// Struct-field navigation; null propagates.
Value navigate(Value const &v, std::vector<std::string> const &rest)
{
    Value const *cur = &v;
    for (auto const &seg : rest) {
        if (!cur->is_struct())
            return Value::null();
        auto const &fields = cur->as_struct();
        auto it = fields.find(seg);
        if (it == fields.end())
            return Value::null();
        cur = &it->second;
    }
    return *cur;
}

// Every terminal item reached by `rest` from `v`, fanning out over sets and
// relation targets (looked up in the snapshot).
void collect(Value const &v, std::vector<std::string> const &rest, std::size_t at, EvalContext const &ctx,
             std::vector<Value> &out)
{
    if (v.is_null())
        return;
    if (at == rest.size()) {
        if (v.is_set())
            out.insert(out.end(), v.as_set().begin(), v.as_set().end());
        else if (v.is_links())
            for (auto const &l : v.as_links())
                out.push_back(Value::links({l}));
        else if (v.is_oids())
            for (auto const &o : v.as_oids())
                out.push_back(Value::oids({o}));
        else
            out.push_back(v);
        return;
    }
    std::string const &seg = rest[at];
    if (v.is_struct()) {
        auto it = v.as_struct().find(seg);
        if (it != v.as_struct().end())
            collect(it->second, rest, at + 1, ctx, out);
    } else if (v.is_set()) {
        for (auto const &item : v.as_set())
            collect(item, rest, at, ctx, out);
    } else if (v.is_links() && ctx.snapshot) {
        for (auto const &l : v.as_links()) {
            SourceRecord const *rec = ctx.snapshot->find(l);
            if (!rec)
                continue;
            if (auto it = rec->values.find(seg); it != rec->values.end())
                collect(it->second, rest, at + 1, ctx, out);
            else if (auto lt = rec->links.find(seg); lt != rec->links.end())
                collect(Value::links(lt->second), rest, at + 1, ctx, out);
        }
    }
}

struct CompiledAtom {
    Atom const *atom;
    Resolved path;
    std::size_t identity = 0; // contains only
};

std::size_t identity_index(ClassBuild const &b, Atom const &a)
{
    std::vector<std::size_t> hits;
    for (std::size_t i = 0; i < b.identity_tags.size(); ++i)
        if (has_tag(b.identity_tags[i], a.binder))
            hits.push_back(i);
    if (hits.empty())
        throw Error(ErrorKind::UnknownPath, "'" + a.binder + "' is not a bound object here", a.pos);
    if (hits.size() > 1)
        throw Error(ErrorKind::AmbiguousProperty, "'" + a.binder + "' names several bound objects", a.pos);
    return hits.front();
}

bool literal_fits(Type const &t, Value const &lit)
{
    if (lit.is_null())
        return true;
    if (lit.is_number())
        return t.is_numeric();
    if (lit.is_string())
        return t.kind() == Type::Kind::String || t.kind() == Type::Kind::Date || t.kind() == Type::Kind::Image;
    return false;
}

std::vector<CompiledAtom> compile(Predicate const &pred, ClassBuild const &b, EvalContext const &ctx)
{
    std::vector<CompiledAtom> out;
    for (auto const &a : pred.atoms) {
        CompiledAtom c{&a, resolve(b, a.path, ctx, ErrorKind::UnknownPath), 0};
        if (a.kind == Atom::Kind::contains) {
            bool setlike = c.path.relation || c.path.type.kind() == Type::Kind::Set;
            if (!setlike || c.path.through_relation)
                throw Error(ErrorKind::TypeMismatchInPredicate,
                            "'" + a.path.text() + "' is not a relation or set; it cannot contain '" + a.binder + "'",
                            a.pos);
            c.identity = identity_index(b, a);
        } else {
            if (c.path.relation || c.path.through_relation || c.path.multi || !c.path.type.is_scalar())
                throw Error(ErrorKind::TypeMismatchInPredicate,
                            "'" + a.path.text() + "' is not a single scalar value", a.pos);
            if (!literal_fits(c.path.type, a.literal))
                throw Error(ErrorKind::TypeMismatchInPredicate,
                            "cannot compare " + format_type(c.path.type) + " '" + a.path.text() + "' with " +
                                format_value(a.literal),
                            a.pos);
            if (a.literal.is_null() && a.op != CompareOp::eq && a.op != CompareOp::ne)
                throw Error(ErrorKind::TypeMismatchInPredicate, "null only supports = and !=", a.pos);
        }
        out.push_back(std::move(c));
    }
    return out;
}

bool holds(std::vector<CompiledAtom> const &atoms, BuildRow const &row)
{
    for (auto const &c : atoms) {
        Value v = navigate(row.values[c.path.slot], c.path.rest);
        if (c.atom->kind == Atom::Kind::compare) {
            if (!compare_values(v, c.atom->op, c.atom->literal))
                return false;
            continue;
        }
        Value const &id = row.identities[c.identity];
        bool found = false;
        if (v.is_links() && id.is_links() && !id.as_links().empty()) {
            auto const &ls = v.as_links();
            found = std::binary_search(ls.begin(), ls.end(), id.as_links().front());
        } else if (v.is_oids() && id.is_oids() && !id.as_oids().empty()) {
            auto const &os = v.as_oids();
            found = std::binary_search(os.begin(), os.end(), id.as_oids().front());
        } else if (v.is_set()) {
            found = std::binary_search(v.as_set().begin(), v.as_set().end(), id);
        }
        if (!found)
            return false;
    }
    return true;
}

ClassBuild product(std::vector<ClassBuild const *> const &operands)
{
    ClassBuild out;
    std::set<std::string> seen;
    for (auto const *b : operands) {
        for (auto const &t : all_tags(*b))
            if (!seen.insert(t).second)
                throw Error(ErrorKind::NameCollision, "binder '" + t + "' is bound twice");
        out.structure.insert(out.structure.end(), b->structure.begin(), b->structure.end());
        out.identity_tags.insert(out.identity_tags.end(), b->identity_tags.begin(), b->identity_tags.end());
    }
    return out;
}

template <typename Emit>
void for_each_tuple(std::vector<ClassBuild const *> const &operands, std::size_t at, BuildRow &acc, Emit const &emit)
{
    if (at == operands.size()) {
        emit(acc);
        return;
    }
    for (auto const &r : operands[at]->rows) {
        std::size_t k = acc.key.size(), v = acc.values.size(), i = acc.identities.size();
        acc.key.insert(acc.key.end(), r.key.begin(), r.key.end());
        acc.values.insert(acc.values.end(), r.values.begin(), r.values.end());
        acc.identities.insert(acc.identities.end(), r.identities.begin(), r.identities.end());
        for_each_tuple(operands, at + 1, acc, emit);
        acc.key.resize(k);
        acc.values.resize(v);
        acc.identities.resize(i);
    }
}

ClassBuild filtered_product(Predicate const &pred, std::vector<ClassBuild const *> const &operands,
                            EvalContext const &ctx)
{
    ClassBuild out = product(operands);
    auto atoms = compile(pred, out, ctx);
    BuildRow acc;
    for_each_tuple(operands, 0, acc, [&](BuildRow const &row) {
        if (holds(atoms, row))
            out.rows.push_back(row);
    });
    sort_rows(out);
    return out;
}

} // namespace

bool compare_values(Value const &value, CompareOp op, Value const &literal)
{
    if (value.is_null() || literal.is_null()) {
        bool both = value.is_null() && literal.is_null();
        if (op == CompareOp::eq)
            return both;
        if (op == CompareOp::ne)
            return !both;
        return false;
    }
    int c;
    if (value.is_number() && literal.is_number()) {
        double x = value.as_number(), y = literal.as_number();
        c = x < y ? -1 : (y < x ? 1 : 0);
    } else {
        c = compare(value, literal);
    }
    switch (op) {
    case CompareOp::eq: return c == 0;
    case CompareOp::ne: return c != 0;
    case CompareOp::lt: return c < 0;
    case CompareOp::le: return c <= 0;
    case CompareOp::gt: return c > 0;
    case CompareOp::ge: return c >= 0;
    }
    return false;
}

ClassBuild source_build(EvalContext const &ctx, std::string const &binder, std::string const &interface)
{
    if (!ctx.source || !ctx.source->find(interface))
        throw Error(ErrorKind::UnknownInterface, "unknown source interface '" + interface + "'");
    ClassBuild out;
    for (auto const &sp : ctx.source->flatten(interface)) {
        BuildProperty p;
        p.def.name = sp.name;
        p.def.origin = Origin::derived;
        p.def.kind = sp.kind;
        p.def.type = sp.type;
        p.def.target = sp.target;
        p.def.cardinality = sp.cardinality;
        p.def.source_path = interface + "." + sp.name;
        p.tags = {binder};
        out.structure.push_back(std::move(p));
    }
    out.identity_tags = {{binder}};
    if (!ctx.snapshot)
        return out;
    for (SourceRecord const *rec : ctx.snapshot->extension(*ctx.source, interface)) {
        BuildRow row;
        row.key = {rec->link()};
        row.identities = {Value::links({rec->link()})};
        for (auto const &p : out.structure) {
            if (p.def.is_relation()) {
                auto it = rec->links.find(p.def.name);
                row.values.push_back(Value::links(it == rec->links.end() ? std::vector<SourceLink>{} : it->second));
            } else {
                auto it = rec->values.find(p.def.name);
                row.values.push_back(it == rec->values.end() ? Value::null() : it->second);
            }
        }
        out.rows.push_back(std::move(row));
    }
    sort_rows(out);
    return out;
}

ClassBuild rename_binder(ClassBuild build, std::string const &binder)
{
    for (auto &p : build.structure)
        if (!has_tag(p.tags, binder))
            p.tags.push_back(binder);
    for (auto &t : build.identity_tags)
        if (!has_tag(t, binder))
            t.push_back(binder);
    return build;
}

ClassBuild eval_project(std::vector<ProjectItem> const &items, ClassBuild const &child)
{
    ClassBuild out;
    out.identity_tags = child.identity_tags;
    std::vector<Resolved> picks;
    std::set<std::string> names;
    for (auto const &item : items) {
        Resolved r = resolve(child, item.path, {}, ErrorKind::UnknownProperty);
        if (r.through_relation || r.multi)
            throw Error(ErrorKind::UnknownPath, "projection cannot follow a relation or set in '" + item.path.text() + "'",
                        item.path.pos);
        BuildProperty p = child.structure[r.slot];
        p.def.name = item.result_name();
        p.def.pos = item.path.pos;
        if (!r.rest.empty()) {
            p.def.kind = PropertyKind::attribute;
            p.def.type = r.type;
            for (auto const &seg : r.rest)
                p.def.source_path += "." + seg;
        }
        if (!names.insert(p.def.name).second)
            throw Error(ErrorKind::NameCollision, "projection yields '" + p.def.name + "' twice", item.path.pos);
        out.structure.push_back(std::move(p));
        picks.push_back(std::move(r));
    }
    for (auto const &row : child.rows) {
        BuildRow nr{row.key, {}, row.identities};
        for (auto const &r : picks)
            nr.values.push_back(navigate(row.values[r.slot], r.rest));
        out.rows.push_back(std::move(nr));
    }
    return out;
}

ClassBuild eval_hide(std::vector<ProjectItem> const &items, ClassBuild const &child)
{
    std::set<std::size_t> hidden;
    for (auto const &item : items) {
        Resolved r = resolve(child, item.path, {}, ErrorKind::UnknownProperty);
        if (!r.rest.empty())
            throw Error(ErrorKind::UnknownProperty, "hide takes whole properties, not '" + item.path.text() + "'",
                        item.path.pos);
        hidden.insert(r.slot);
    }
    ClassBuild out;
    out.identity_tags = child.identity_tags;
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < child.structure.size(); ++i)
        if (!hidden.count(i)) {
            keep.push_back(i);
            out.structure.push_back(child.structure[i]);
        }
    for (auto const &row : child.rows) {
        BuildRow nr{row.key, {}, row.identities};
        for (auto i : keep)
            nr.values.push_back(row.values[i]);
        out.rows.push_back(std::move(nr));
    }
    return out;
}

ClassBuild eval_augment(std::vector<AugmentBinding> const &bindings, ClassBuild const &child, EvalContext const &ctx)
{
    ClassBuild out = child;
    std::set<std::string> names;
    for (auto const &p : child.structure)
        names.insert(p.def.name);
    std::vector<std::string> tags;
    for (auto const &t : all_tags(child))
        tags.push_back(t);

    std::vector<std::optional<Resolved>> args;
    for (auto const &b : bindings) {
        if (!names.insert(b.name).second)
            throw Error(ErrorKind::NameCollision, "augment introduces '" + b.name + "', which already exists", b.pos);
        BuildProperty p;
        p.def.name = b.name;
        p.def.pos = b.pos;
        p.tags = tags;
        if (!b.computed) {
            p.def.origin = Origin::specific;
            p.def.type = b.type;
            args.emplace_back();
            out.structure.push_back(std::move(p));
            continue;
        }
        Resolved r = resolve(child, b.argument, ctx, ErrorKind::UnknownPath);
        p.def.origin = Origin::computed;
        p.def.source_path = std::string(to_string(b.fn)) + "(" + b.argument.text() + ")";
        if (b.fn == AggregateFn::count) {
            if (!r.set_valued())
                throw Error(ErrorKind::TypeInferenceError,
                            "count needs a set-valued path; '" + b.argument.text() + "' is single-valued", b.pos);
            p.def.type = Type::scalar(Type::Kind::Long);
        } else {
            Type elem = r.element();
            if (r.relation || !elem.is_numeric())
                throw Error(ErrorKind::NonNumericAggregate,
                            std::string(to_string(b.fn)) + " needs numeric values; '" + b.argument.text() +
                                "' is not numeric",
                            b.pos);
            p.def.type = (b.fn == AggregateFn::max || b.fn == AggregateFn::min) ? elem : Type::scalar(Type::Kind::Double);
        }
        args.emplace_back(std::move(r));
        out.structure.push_back(std::move(p));
    }

    for (auto &row : out.rows) {
        for (std::size_t i = 0; i < bindings.size(); ++i) {
            auto const &b = bindings[i];
            if (!b.computed) {
                row.values.push_back(Value::null());
                continue;
            }
            std::vector<Value> items;
            collect(row.values[args[i]->slot], args[i]->rest, 0, ctx, items);
            Value v;
            switch (b.fn) {
            case AggregateFn::count: v = Value::integer(static_cast<std::int64_t>(items.size())); break;
            case AggregateFn::sum:
            case AggregateFn::avg: {
                double s = 0;
                std::int64_t n = 0;
                for (auto const &x : items)
                    if (x.is_number()) {
                        s += x.as_number();
                        ++n;
                    }
                if (b.fn == AggregateFn::sum)
                    v = Value::real(s);
                else
                    v = n ? Value::real(s / static_cast<double>(n)) : Value::null();
                break;
            }
            case AggregateFn::max:
            case AggregateFn::min:
                for (auto const &x : items) {
                    if (!x.is_number())
                        continue;
                    bool better = v.is_null() || (b.fn == AggregateFn::max ? x.as_number() > v.as_number()
                                                                            : x.as_number() < v.as_number());
                    if (better)
                        v = x;
                }
                break;
            }
            row.values.push_back(std::move(v));
        }
    }
    return out;
}

ClassBuild eval_select(Predicate const &predicate, ClassBuild const &child, EvalContext const &ctx)
{
    auto atoms = compile(predicate, child, ctx);
    ClassBuild out;
    out.structure = child.structure;
    out.identity_tags = child.identity_tags;
    out.supers = child.supers;
    for (auto const &row : child.rows)
        if (holds(atoms, row))
            out.rows.push_back(row);
    return out;
}

ClassBuild eval_join(Predicate const &predicate, ClassBuild const &left, ClassBuild const &right,
                     EvalContext const &ctx)
{
    return filtered_product(predicate, {&left, &right}, ctx);
}

ClassBuild eval_extraction(MappingExpr const &expr, EvalContext const &ctx)
{
    ClassBuild out;
    switch (expr.kind) {
    case MappingKind::source:
        if (expr.ref == RefKind::warehouse_class)
            throw Error(ErrorKind::InvalidSchema,
                        "extraction reads source interfaces; '" + expr.target + "' is a warehouse class", expr.pos);
        return source_build(ctx, expr.binder, expr.target);
    case MappingKind::project: out = eval_project(expr.items, eval_extraction(expr.operands.at(0), ctx)); break;
    case MappingKind::hide: out = eval_hide(expr.items, eval_extraction(expr.operands.at(0), ctx)); break;
    case MappingKind::augment:
        out = eval_augment(expr.bindings, eval_extraction(expr.operands.at(0), ctx), ctx);
        break;
    case MappingKind::select:
        out = eval_select(expr.predicate, eval_extraction(expr.operands.at(0), ctx), ctx);
        break;
    case MappingKind::join:
        out = eval_join(expr.predicate, eval_extraction(expr.operands.at(0), ctx),
                        eval_extraction(expr.operands.at(1), ctx), ctx);
        break;
    case MappingKind::generalize:
    case MappingKind::specialize:
        throw Error(ErrorKind::InvalidSchema,
                    std::string(to_string(expr.kind)) + " cannot appear inside an extraction mapping", expr.pos);
    }
    if (!expr.binder.empty())
        out = rename_binder(std::move(out), expr.binder);
    return out;
}

ClassBuild eval_generalize(std::vector<ProjectItem> const &items, std::vector<ClassBuild> const &operands)
{
    if (operands.empty())
        throw Error(ErrorKind::EmptyOperands, "generalize needs at least one operand");
    std::vector<ProjectItem> bare;
    for (auto const &item : items) {
        ProjectItem b;
        b.path.segments = {item.path.segments.back()};
        b.path.pos = item.path.pos;
        bare.push_back(std::move(b));
    }
    ClassBuild out;
    std::set<SourceKey> seen;
    for (std::size_t i = 0; i < operands.size(); ++i) {
        ClassBuild part;
        try {
            part = eval_project(bare, operands[i]);
        } catch (Error const &e) {
            if (e.kind() != ErrorKind::UnknownProperty)
                throw;
            throw Error(ErrorKind::NotCommonProperty, e.detail() + " in operand " + std::to_string(i + 1), e.pos());
        }
        if (i == 0) {
            out.structure = part.structure;
            for (auto &p : out.structure)
                p.tags.clear();
            out.identity_tags = {{}};
        } else {
            for (std::size_t k = 0; k < part.structure.size(); ++k)
                if (!(part.structure[k].def.type == out.structure[k].def.type &&
                      part.structure[k].def.kind == out.structure[k].def.kind &&
                      part.structure[k].def.target == out.structure[k].def.target))
                    throw Error(ErrorKind::NotCommonProperty,
                                "'" + out.structure[k].def.name + "' has different definitions across operands");
        }
        for (auto &row : part.rows) {
            if (!seen.insert(row.key).second)
                continue;
            row.identities.resize(1);
            out.rows.push_back(std::move(row));
        }
    }
    sort_rows(out);
    return out;
}

ClassBuild eval_specialize(Predicate const &predicate, std::vector<ClassBuild> const &operands,
                           EvalContext const &ctx)
{
    if (operands.empty())
        throw Error(ErrorKind::EmptyOperands, "specialize needs at least one operand");
    std::vector<ClassBuild const *> ptrs;
    for (auto const &b : operands)
        ptrs.push_back(&b);
    return filtered_product(predicate, ptrs, ctx);
}

bool eval_predicate(Predicate const &predicate, ClassBuild const &build, BuildRow const &row, EvalContext const &ctx)
{
    return holds(compile(predicate, build, ctx), row);
}

void check_predicate(Predicate const &predicate, ClassBuild const &build, EvalContext const &ctx)
{
    compile(predicate, build, ctx);
}

} // namespace edw
