#include "edw/warehouse.hpp"

#include <algorithm>
#include <functional>
#include <queue>

namespace edw {

PropertyDef const *WarehouseClass::own_property(std::string_view n) const
{
    for (auto const &p : structure)
        if (p.name == n)
            return &p;
    return nullptr;
}

WarehouseClass const *WarehouseSchema::find(std::string_view n) const
{
    auto it = classes.find(std::string(n));
    return it == classes.end() ? nullptr : &it->second;
}

WarehouseClass const &WarehouseSchema::get(std::string_view n) const
{
    if (auto const *c = find(n))
        return *c;
    throw Error(ErrorKind::UnknownClass, "unknown class '" + std::string(n) + "'");
}

namespace {

void merge_property(std::vector<PropertyDef> &out, PropertyDef const &p, std::string_view class_name)
{
    for (auto const &q : out) {
        if (q.name != p.name)
            continue;
        if (q.same_definition(p))
            return;
        throw Error(ErrorKind::PropertyConflict,
                    "class '" + std::string(class_name) + "' receives two different definitions of '" + p.name +
                        "': " + format_property(q) + " and " + format_property(p),
                    p.pos);
    }
    out.push_back(p);
}

std::vector<PropertyDef> flatten_rec(WarehouseSchema const &schema, std::string const &name,
                                     std::vector<std::string> &stack)
{
    if (std::find(stack.begin(), stack.end(), name) != stack.end())
        throw Error(ErrorKind::InheritanceCycle, "inheritance cycle through '" + name + "'");
    WarehouseClass const &cls = schema.get(name);
    stack.push_back(name);
    std::vector<PropertyDef> out;
    for (auto const &s : cls.supers)
        for (auto const &p : flatten_rec(schema, s, stack))
            merge_property(out, p, name);
    for (auto const &p : cls.structure)
        merge_property(out, p, name);
    stack.pop_back();
    return out;
}

void collect_ancestors(WarehouseSchema const &schema, std::string const &name, std::set<std::string> &seen)
{
    auto const *cls = schema.find(name);
    if (!cls)
        return;
    for (auto const &s : cls->supers)
        if (seen.insert(s).second)
            collect_ancestors(schema, s, seen);
}

} // namespace

std::vector<PropertyDef> flatten_type(WarehouseSchema const &schema, std::string_view class_name)
{
    std::vector<std::string> stack;
    return flatten_rec(schema, std::string(class_name), stack);
}

std::vector<std::string> ancestors(WarehouseSchema const &schema, std::string_view class_name)
{
    std::set<std::string> seen;
    collect_ancestors(schema, std::string(class_name), seen);
    seen.erase(std::string(class_name));
    return {seen.begin(), seen.end()};
}

bool is_subclass(WarehouseSchema const &schema, std::string_view ci, std::string_view cj)
{
    schema.get(ci);
    schema.get(cj);
    if (ci == cj)
        return true;
    auto up = ancestors(schema, ci);
    return std::binary_search(up.begin(), up.end(), std::string(cj));
}

std::vector<std::string> descendants(WarehouseSchema const &schema, std::string_view class_name)
{
    std::vector<std::string> out;
    for (auto const &[name, cls] : schema.classes) {
        (void)cls;
        if (name == class_name) {
            out.push_back(name);
            continue;
        }
        auto up = ancestors(schema, name);
        if (std::binary_search(up.begin(), up.end(), std::string(class_name)))
            out.push_back(name);
    }
    return out;
}

std::optional<std::string> environment_of(WarehouseSchema const &schema, std::string_view class_name)
{
    for (auto const &[name, env] : schema.environments)
        if (std::find(env.classes.begin(), env.classes.end(), class_name) != env.classes.end())
            return name;
    return std::nullopt;
}

Filters effective_filters(WarehouseSchema const &schema, std::string_view class_name)
{
    auto env = environment_of(schema, class_name);
    if (!env)
        return {};
    Filters out = schema.get(class_name).filters;
    for (auto const &a : ancestors(schema, class_name)) {
        if (environment_of(schema, a) != env)
            continue;
        auto const &f = schema.get(a).filters;
        out.tempo.insert(f.tempo.begin(), f.tempo.end());
        for (auto const &[p, fn] : f.archi)
            out.archi.emplace(p, fn); // the subclass's own choice wins
    }
    return out;
}

RetentionConfig effective_config(WarehouseSchema const &schema, std::string_view env)
{
    auto it = schema.environments.find(std::string(env));
    if (it == schema.environments.end())
        throw Error(ErrorKind::UnknownEnvironment, "unknown environment '" + std::string(env) + "'");
    return merge_config(it->second.config, schema.global_config);
}

std::string_view to_string(HistorizationLevel level)
{
    switch (level) {
    case HistorizationLevel::attribute: return "attribute";
    case HistorizationLevel::class_level: return "class";
    case HistorizationLevel::graph: return "graph";
    }
    return "?";
}

HistorizationLevel historization_level(WarehouseSchema const &schema, std::string_view env)
{
    auto it = schema.environments.find(std::string(env));
    if (it == schema.environments.end())
        throw Error(ErrorKind::UnknownEnvironment, "unknown environment '" + std::string(env) + "'");
    auto const &classes = it->second.classes;
    if (classes.size() > 1)
        return HistorizationLevel::graph;
    if (classes.empty())
        return HistorizationLevel::attribute;
    Filters f = effective_filters(schema, classes.front());
    for (auto const &p : flatten_type(schema, classes.front()))
        if (!p.is_relation() && !f.tempo.count(p.name))
            return HistorizationLevel::attribute;
    return HistorizationLevel::class_level;
}

bool is_specialized(WarehouseClass const &cls)
{
    return cls.mapping && cls.mapping->kind == MappingKind::specialize;
}

bool is_generalized(WarehouseClass const &cls)
{
    return cls.mapping && cls.mapping->kind == MappingKind::generalize;
}

bool is_extracted(WarehouseClass const &cls)
{
    return cls.mapping && !cls.mapping->is_hierarchization();
}

std::vector<std::string> object_range(WarehouseSchema const &schema, std::string_view class_name)
{
    std::set<std::string> out{std::string(class_name)};
    std::vector<std::string> todo{std::string(class_name)};
    while (!todo.empty()) {
        std::string c = todo.back();
        todo.pop_back();
        for (auto const &[name, cls] : schema.classes) {
            if (is_specialized(cls) || out.count(name))
                continue;
            if (std::find(cls.supers.begin(), cls.supers.end(), c) != cls.supers.end()) {
                out.insert(name);
                todo.push_back(name);
            }
        }
    }
    return {out.begin(), out.end()};
}

std::vector<std::string> dependency_order(WarehouseSchema const &schema)
{
    std::map<std::string, std::set<std::string>> deps;
    for (auto const &[name, cls] : schema.classes) {
        auto &d = deps[name];
        for (auto const &s : cls.supers)
            if (schema.find(s))
                d.insert(s);
        if (is_specialized(cls))
            for (auto const *leaf : mapping_leaves(*cls.mapping))
                if (schema.find(leaf->target) && leaf->target != name)
                    d.insert(leaf->target);
    }
    std::priority_queue<std::string, std::vector<std::string>, std::greater<>> ready;
    std::map<std::string, std::size_t> pending;
    std::map<std::string, std::vector<std::string>> users;
    for (auto const &[name, d] : deps) {
        pending[name] = d.size();
        for (auto const &x : d)
            users[x].push_back(name);
        if (d.empty())
            ready.push(name);
    }
    std::vector<std::string> out;
    while (!ready.empty()) {
        std::string c = ready.top();
        ready.pop();
        out.push_back(c);
        for (auto const &u : users[c])
            if (--pending[u] == 0)
                ready.push(u);
    }
    if (out.size() != deps.size()) {
        std::string stuck;
        for (auto const &[name, n] : pending)
            if (n > 0) {
                stuck = name;
                break;
            }
        throw Error(ErrorKind::InheritanceCycle, "class dependencies form a cycle through '" + stuck + "'");
    }
    return out;
}

namespace {

Diagnostic diag(ErrorKind kind, std::string message, SourcePos pos, std::string cls, std::string prop = {})
{
    return Diagnostic{kind, std::move(message), pos, std::move(cls), std::move(prop)};
}

bool archive_fn_fits(ArchiveFn fn, PropertyDef const &p)
{
    switch (fn) {
    case ArchiveFn::avg:
    case ArchiveFn::sum: return !p.is_relation() && p.type.is_numeric();
    case ArchiveFn::min:
    case ArchiveFn::max: return !p.is_relation() && p.type.is_scalar();
    case ArchiveFn::count:
    case ArchiveFn::last: return true;
    }
    return false;
}

// Classes whose supers chain is broken (unknown super or cycle); flattening
// them would only repeat the root cause.
std::set<std::string> check_inheritance(WarehouseSchema const &schema, std::vector<Diagnostic> &out)
{
    std::set<std::string> broken;
    for (auto const &[name, cls] : schema.classes)
        for (auto const &s : cls.supers)
            if (!schema.find(s)) {
                out.push_back(diag(ErrorKind::UnknownClass, "super class '" + s + "' is not defined", cls.pos, name));
                broken.insert(name);
            }
    // Colour-marking DFS; one finding per back edge.
    std::map<std::string, int> colour;
    std::function<void(std::string const &)> visit = [&](std::string const &n) {
        colour[n] = 1;
        for (auto const &s : schema.get(n).supers) {
            if (!schema.find(s))
                continue;
            if (colour[s] == 1) {
                out.push_back(diag(ErrorKind::InheritanceCycle, "inheritance cycle: '" + n + "' extends '" + s +
                                                                    "' which already inherits from '" + n + "'",
                                   schema.get(n).pos, n));
                broken.insert(n);
            } else if (colour[s] == 0) {
                visit(s);
            }
        }
        colour[n] = 2;
    };
    for (auto const &[name, cls] : schema.classes) {
        (void)cls;
        if (colour[name] == 0)
            visit(name);
    }
    // Classes inheriting from a broken class cannot be flattened either.
    for (auto const &[name, cls] : schema.classes) {
        (void)cls;
        for (auto const &a : ancestors(schema, name))
            if (broken.count(a) || !schema.find(a))
                broken.insert(name);
    }
    return broken;
}

} // namespace

std::vector<Diagnostic> validate_schema(WarehouseSchema const &schema)
{
    std::vector<Diagnostic> out;
    std::set<std::string> broken = check_inheritance(schema, out);

    std::map<std::string, std::vector<PropertyDef>> flat;
    for (auto const &[name, cls] : schema.classes) {
        (void)cls;
        if (broken.count(name))
            continue;
        try {
            flat[name] = flatten_type(schema, name);
        } catch (Error const &e) {
            out.push_back(diag(e.kind(), e.detail(), e.pos(), name));
        }
    }

    // Relation endpoints, grouped by the missing class.
    std::map<std::string, std::vector<std::pair<std::string, PropertyDef const *>>> missing;
    for (auto const &[name, cls] : schema.classes)
        for (auto const &p : cls.structure)
            if (p.is_relation() && !schema.find(p.target))
                missing[p.target].emplace_back(name, &p);
    for (auto const &[target, uses] : missing) {
        std::string list;
        for (auto const &[c, p] : uses)
            list += (list.empty() ? "" : ", ") + c + "." + p->name;
        out.push_back(diag(ErrorKind::RelationClosure,
                           "relation endpoint class '" + target + "' is not in the warehouse (used by " + list + ")",
                           uses.front().second->pos, uses.front().first, uses.front().second->name));
    }

    std::map<std::string, std::string> home;
    for (auto const &[ename, env] : schema.environments) {
        if (env.classes.empty())
            out.push_back(diag(ErrorKind::EmptyEnvironment, "environment '" + ename + "' has no classes", env.pos, ""));
        for (auto const &c : env.classes) {
            if (!schema.find(c)) {
                out.push_back(diag(ErrorKind::UnknownClass,
                                   "environment '" + ename + "' names unknown class '" + c + "'", env.pos, c));
                continue;
            }
            auto [it, fresh] = home.emplace(c, ename);
            if (!fresh)
                out.push_back(diag(ErrorKind::EnvironmentOverlap,
                                   "class '" + c + "' belongs to environments '" + it->second + "' and '" + ename + "'",
                                   env.pos, c));
        }
    }

    for (auto const &[name, cls] : schema.classes) {
        if (!cls.filters.empty() && !home.count(name))
            out.push_back(diag(ErrorKind::FilterOutsideEnvironment,
                               "class '" + name + "' declares filters but belongs to no environment", cls.pos, name));
        auto fit = flat.find(name);
        if (fit == flat.end())
            continue;
        auto lookup = [&](std::string const &p) -> PropertyDef const * {
            for (auto const &q : fit->second)
                if (q.name == p)
                    return &q;
            return nullptr;
        };
        for (auto const &t : cls.filters.tempo)
            if (!lookup(t))
                out.push_back(diag(ErrorKind::UnknownFilterProperty,
                                   "temporal filter names unknown property '" + t + "'", cls.pos, name, t));
        Filters eff = broken.count(name) ? cls.filters : effective_filters(schema, name);
        for (auto const &[p, fn] : cls.filters.archi) {
            PropertyDef const *def = lookup(p);
            if (!def) {
                out.push_back(diag(ErrorKind::UnknownFilterProperty,
                                   "archive filter names unknown property '" + p + "'", cls.pos, name, p));
                continue;
            }
            if (!cls.filters.tempo.count(p) && !eff.tempo.count(p))
                out.push_back(diag(ErrorKind::ArchiveNotTemporal,
                                   "archived property '" + p + "' is not in the temporal filter", cls.pos, name, p));
            if (!archive_fn_fits(fn, *def))
                out.push_back(diag(ErrorKind::TypeMismatch,
                                   std::string("archive function ") + std::string(to_string(fn)) + " does not apply to " +
                                       format_property(*def),
                                   cls.pos, name, p));
        }
    }

    for (auto const &[ename, env] : schema.environments) {
        bool archives = false;
        for (auto const &c : env.classes)
            if (schema.find(c) && !broken.count(c) && !effective_filters(schema, c).archi.empty())
                archives = true;
        if (archives && !effective_config(schema, ename).has_retention_bound())
            out.push_back(diag(ErrorKind::MissingRetentionBound,
                               "environment '" + ename +
                                   "' archives properties but sets neither keep_past nor keep_duration",
                               env.pos, ""));
    }
    return out;
}

} // namespace edw
