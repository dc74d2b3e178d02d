#include "edw/refresh.hpp"

#include "edw/algebra.hpp"
#include "edw/resolver.hpp"

#include <algorithm>
#include <set>

namespace edw {

nlohmann::json RefreshReport::to_json() const
{
    nlohmann::json classes_json = nlohmann::json::object();
    for (auto const &[name, c] : classes)
        classes_json[name] = {{"previous", c.previous}, {"created", c.created},     {"carried", c.carried},
                              {"updated", c.updated},   {"historized", c.historized}, {"frozen", c.frozen},
                              {"evicted", c.evicted}};
    return {{"at", format_instant(at)},
            {"kind", initial ? "initial_load" : "refresh"},
            {"classes", classes_json},
            {"warnings", warnings}};
}

namespace {

// A mapping result row bound to its (possibly new) object.
struct Pending {
    SourceKey key;
    StateValue value;
    Oid oid;
};

void close_current(State &current, Instant end)
{
    current.domain.intervals.back().end = end;
}

void extend_current(State &current, Instant t)
{
    close_current(current, t);
}

class ExtractionPoint {
public:
    ExtractionPoint(Store &store, Snapshot const &snapshot, Instant t, RefreshReport &report)
        : s_(store), snap_(snapshot), t_(t), report_(report), ctx_{&store.source, &snapshot}
    {
    }

    void run()
    {
        for (auto const &[name, cls] : s_.schema.classes) {
            (void)cls;
            report_.classes[name].previous = s_.direct_members(name, true).size();
        }
        order_ = dependency_order(s_.schema);
        for (auto const &name : order_)
            if (is_extracted(s_.schema.get(name)))
                extract(name);
        for (auto const &name : order_)
            if (is_extracted(s_.schema.get(name)))
                assign(name);
        for (auto const &name : order_)
            if (is_extracted(s_.schema.get(name)))
                link(name);
        for (auto const &name : order_)
            if (is_extracted(s_.schema.get(name)))
                apply(name);
        for (auto const &name : order_)
            if (is_specialized(s_.schema.get(name)))
                specialize(name);
        for (auto const &[env, e] : s_.schema.environments) {
            (void)e;
            for (auto const &[cls, n] : apply_archival(s_, env, t_))
                report_.classes[cls].evicted += n;
        }
        s_.last_refresh = t_;
    }

private:
    Store &s_;
    Snapshot const &snap_;
    Instant t_;
    RefreshReport &report_;
    EvalContext ctx_;
    std::vector<std::string> order_;
    std::map<std::string, std::vector<Pending>> rows_;
    std::map<std::string, std::vector<PropertyDef>> flat_;

    std::vector<PropertyDef> const &flat(std::string const &cls)
    {
        auto it = flat_.find(cls);
        if (it == flat_.end())
            it = flat_.emplace(cls, flatten_type(s_.schema, cls)).first;
        return it->second;
    }

    // Mapping output reshaped to the class's flattened structure; specific
    // slots start out null.
    StateValue conform(ClassBuild const &build, BuildRow const &row, std::vector<PropertyDef> const &props)
    {
        StateValue v;
        for (auto const &p : props) {
            auto idx = build.index_of(p.name);
            bool take = idx && p.origin != Origin::specific;
            v[p.name] = take ? row.values[*idx] : Value::null();
        }
        return v;
    }

    void extract(std::string const &cls)
    {
        ClassBuild build = eval_extraction(*s_.schema.get(cls).mapping, ctx_);
        auto const &props = flat(cls);
        auto &out = rows_[cls];
        for (auto const &row : build.rows)
            out.push_back(Pending{row.key, conform(build, row, props), Oid{}});
    }

    std::optional<Oid> active_oid(std::string const &cls, SourceKey const &key) const
    {
        auto oid = s_.identity.latest(cls, key);
        if (!oid)
            return std::nullopt;
        auto it = s_.objects.find(*oid);
        if (it == s_.objects.end() || !it->second.active())
            return std::nullopt;
        return oid;
    }

    Oid allocate(std::string const &cls, SourceKey const &key)
    {
        Oid oid{s_.next_oid++};
        s_.identity.add(cls, key, oid);
        return oid;
    }

    void assign(std::string const &cls)
    {
        for (auto &p : rows_[cls]) {
            auto existing = active_oid(cls, p.key);
            p.oid = existing ? *existing : allocate(cls, p.key);
        }
    }

    // Source link -> oids of this extraction point's objects that may stand
    // for the target class.
    std::map<SourceLink, std::set<Oid>> const &link_index(std::string const &target)
    {
        auto it = index_.find(target);
        if (it != index_.end())
            return it->second;
        auto &idx = index_[target];
        for (auto const &c : object_range(s_.schema, target)) {
            auto rit = rows_.find(c);
            if (rit == rows_.end())
                continue;
            for (auto const &p : rit->second)
                for (auto const &l : p.key)
                    idx[l].insert(p.oid);
        }
        return idx;
    }
    std::map<std::string, std::map<SourceLink, std::set<Oid>>> index_;

    void link(std::string const &cls)
    {
        for (auto const &prop : flat(cls)) {
            if (!prop.is_relation() || prop.origin == Origin::specific)
                continue;
            auto const &idx = link_index(prop.target);
            for (auto &p : rows_[cls]) {
                Value &slot = p.value[prop.name];
                if (!slot.is_links())
                    continue;
                std::vector<Oid> oids;
                for (auto const &l : slot.as_links()) {
                    auto hit = idx.find(l);
                    if (hit == idx.end() || hit->second.empty())
                        throw Error(ErrorKind::DanglingRelationTarget,
                                    cls + " " + format_source_key(p.key) + ": relation '" + prop.name + "' points to " +
                                        l.interface + ":" + l.id + ", which is not in class '" + prop.target + "'");
                    if (hit->second.size() > 1)
                        throw Error(ErrorKind::AmbiguousRelationTarget,
                                    cls + " " + format_source_key(p.key) + ": relation '" + prop.name + "' target " +
                                        l.interface + ":" + l.id + " matches several objects of '" + prop.target + "'");
                    oids.push_back(*hit->second.begin());
                }
                slot = Value::oids(std::move(oids));
            }
        }
    }

    // Carry, update in place or historize an existing object.
    void evolve(WarehouseObject &o, StateValue value, std::vector<PropertyDef> const &props, ClassCounts &counts)
    {
        for (auto const &p : props)
            if (p.origin == Origin::specific) {
                auto it = o.current.value.find(p.name);
                value[p.name] = it == o.current.value.end() ? Value::null() : it->second;
            }
        if (value == o.current.value) {
            extend_current(o.current, t_);
            ++counts.carried;
            return;
        }
        Filters f = effective_filters(s_.schema, o.class_name);
        bool temporal = false;
        for (auto const &[name, v] : value) {
            auto it = o.current.value.find(name);
            bool differs = it == o.current.value.end() || !(it->second == v);
            if (differs && f.tempo.count(name))
                temporal = true;
        }
        if (temporal && o.current.domain.intervals.front().start < t_) {
            State old = o.current;
            close_current(old, t_.plus(-1));
            o.past.push_back(std::move(old));
            o.current = State{single_interval_domain(Interval{t_, t_}), std::move(value)};
            ++counts.historized;
        } else {
            o.current.value = std::move(value);
            extend_current(o.current, t_);
            ++counts.updated;
        }
    }

    void settle(std::string const &cls, std::vector<Pending> &rows)
    {
        auto const &props = flat(cls);
        ClassCounts &counts = report_.classes[cls];
        std::set<Oid> seen;
        for (auto &p : rows) {
            if (!seen.insert(p.oid).second)
                throw Error(ErrorKind::DuplicateKey, cls + ": key " + format_source_key(p.key) + " occurs twice");
            auto it = s_.objects.find(p.oid);
            if (it == s_.objects.end()) {
                WarehouseObject o;
                o.oid = p.oid;
                o.class_name = cls;
                o.source_key = p.key;
                o.current = State{single_interval_domain(Interval{t_, t_}), std::move(p.value)};
                s_.objects.emplace(o.oid, std::move(o));
                ++counts.created;
            } else {
                evolve(it->second, std::move(p.value), props, counts);
            }
        }
        for (auto &[oid, o] : s_.objects)
            if (o.class_name == cls && o.active() && !seen.count(oid)) {
                o.status = ObjectStatus::frozen;
                close_current(o.current, t_.plus(-1));
                ++counts.frozen;
            }
    }

    void apply(std::string const &cls)
    {
        settle(cls, rows_[cls]);
    }

    void specialize(std::string const &cls)
    {
        WarehouseClass const &c = s_.schema.get(cls);
        ClassRows rows = [&](std::string const &operand, ClassBuild const &shape) {
            std::vector<BuildRow> out;
            for (auto const &r : object_range(s_.schema, operand))
                for (auto const &[oid, o] : s_.objects) {
                    if (o.class_name != r || !o.active())
                        continue;
                    BuildRow row;
                    row.key = o.source_key;
                    row.identities = {Value::oids({oid})};
                    for (auto const &p : shape.structure) {
                        auto it = o.current.value.find(p.def.name);
                        row.values.push_back(it == o.current.value.end() ? Value::null() : it->second);
                    }
                    out.push_back(std::move(row));
                }
            std::sort(out.begin(), out.end(), [](auto const &a, auto const &b) { return a.key < b.key; });
            return out;
        };
        std::vector<ClassBuild> operands;
        for (auto const &op : c.mapping->operands)
            operands.push_back(eval_class_operand(op, s_.schema, rows, ctx_));
        ClassBuild build = eval_specialize(c.mapping->predicate, operands, ctx_);
        auto const &props = flat(cls);
        std::vector<Pending> pending;
        std::set<SourceKey> keys;
        for (auto const &row : build.rows) {
            if (!keys.insert(row.key).second)
                throw Error(ErrorKind::DuplicateKey, cls + ": key " + format_source_key(row.key) + " occurs twice");
            auto existing = active_oid(cls, row.key);
            Oid oid = existing ? *existing : allocate(cls, row.key);
            pending.push_back(Pending{row.key, conform(build, row, props), oid});
        }
        settle(cls, pending);
    }
};

void check_instant(Store const &store, Instant t)
{
    if (!store.last_refresh)
        return;
    if (t.unit != store.last_refresh->unit)
        throw Error(ErrorKind::UnitMismatch, "extraction point " + format_instant(t) + " is not in the store's unit (" +
                                                 std::string(to_string(store.last_refresh->unit)) + ")");
    if (!(*store.last_refresh < t))
        throw Error(ErrorKind::NonMonotonicInstant, "extraction point " + format_instant(t) +
                                                        " is not after the last refresh " +
                                                        format_instant(*store.last_refresh));
}

void period_warnings(Store const &store, Instant t, RefreshReport &report)
{
    if (!store.last_refresh)
        return;
    std::int64_t delta = t.tick - store.last_refresh->tick;
    for (auto const &[name, env] : store.schema.environments) {
        (void)env;
        auto period = effective_config(store.schema, name).refresh_period;
        if (!period)
            continue;
        std::int64_t expected;
        try {
            expected = rescale_duration(period->count, period->unit, t.unit);
        } catch (Error const &) {
            report.warnings.push_back("environment " + name + ": refresh period unit " +
                                      std::string(to_string(period->unit)) + " is not comparable with " +
                                      std::string(to_string(t.unit)));
            continue;
        }
        if (expected != delta)
            report.warnings.push_back("environment " + name + ": expected a refresh every " +
                                      std::to_string(period->count) + " " + std::string(to_string(period->unit)) +
                                      ", this one comes " + std::to_string(delta) + " " +
                                      std::string(to_string(t.unit)) + "(s) after the previous one");
    }
}

void archive_object(WarehouseObject &o, RetentionConfig const &cfg, std::map<std::string, ArchiveFn> const &archi,
                    Instant t, std::size_t &evicted)
{
    std::optional<std::int64_t> max_age;
    if (cfg.keep_past_duration)
        max_age = rescale_duration(cfg.keep_past_duration->count, cfg.keep_past_duration->unit, t.unit);
    while (!o.past.empty()) {
        bool over = cfg.keep_past_count && static_cast<std::int64_t>(o.past.size()) > *cfg.keep_past_count;
        bool old = max_age && t.tick - domain_span(o.past.front().domain).end.tick > *max_age;
        if (!over && !old)
            break;
        State ev = std::move(o.past.front());
        o.past.erase(o.past.begin());
        if (!archi.empty()) {
            std::optional<ArchiveState> prev;
            if (!o.archives.empty())
                prev = o.archives.front();
            o.archives = {merge_archive(prev, ev, archi)};
        }
        ++evicted;
    }
}

} // namespace

std::map<std::string, std::size_t> apply_archival(Store &store, std::string const &env, Instant t)
{
    RetentionConfig cfg = effective_config(store.schema, env);
    std::map<std::string, std::size_t> out;
    if (!cfg.has_retention_bound())
        return out;
    auto const &classes = store.schema.environments.at(env).classes;
    std::map<std::string, std::map<std::string, ArchiveFn>> archi;
    for (auto const &c : classes)
        archi[c] = effective_filters(store.schema, c).archi;
    for (auto &[oid, o] : store.objects) {
        (void)oid;
        auto it = archi.find(o.class_name);
        if (it == archi.end() || !o.active())
            continue;
        std::size_t n = 0;
        archive_object(o, cfg, it->second, t, n);
        if (n)
            out[o.class_name] += n;
    }
    return out;
}

RefreshReport initial_load(Store &store, Snapshot const &snapshot, Instant t)
{
    if (!store.objects.empty() || store.last_refresh)
        throw Error(ErrorKind::NonEmptyStore, "initial load needs an empty store");
    Store work = store;
    RefreshReport report;
    report.at = t;
    report.initial = true;
    ExtractionPoint(work, snapshot, t, report).run();
    store = std::move(work);
    return report;
}

RefreshReport refresh(Store &store, Snapshot const &snapshot, Instant t)
{
    if (!store.last_refresh)
        throw Error(ErrorKind::NonMonotonicInstant, "store has never been loaded; run the initial load first");
    check_instant(store, t);
    Store work = store;
    RefreshReport report;
    report.at = t;
    period_warnings(store, t, report);
    ExtractionPoint(work, snapshot, t, report).run();
    store = std::move(work);
    return report;
}

void patch_specific(Store &store, Oid oid, std::string const &property, Value const &value, Instant t)
{
    WarehouseObject const &current = store.object(oid);
    PropertyDef const *prop = nullptr;
    auto props = flatten_type(store.schema, current.class_name);
    for (auto const &p : props)
        if (p.name == property)
            prop = &p;
    if (!prop)
        throw Error(ErrorKind::UnknownProperty, "class '" + current.class_name + "' has no property '" + property + "'");
    if (prop->origin != Origin::specific)
        throw Error(ErrorKind::NotSpecificProperty, "'" + property + "' is " + std::string(to_string(prop->origin)) +
                                                        "; only specific properties can be set by hand");
    if (prop->is_relation())
        throw Error(ErrorKind::TypeMismatch, "relation '" + property + "' cannot be patched");
    if (!current.active())
        throw Error(ErrorKind::FrozenObject, "object " + std::to_string(oid.value) + " is frozen");
    if (!store.last_refresh)
        throw Error(ErrorKind::NonMonotonicInstant, "store has never been loaded");
    if (t.unit != store.last_refresh->unit)
        throw Error(ErrorKind::UnitMismatch, "instant " + format_instant(t) + " is not in the store's unit");
    if (!(t == *store.last_refresh))
        throw Error(ErrorKind::NonMonotonicInstant, "patches apply at the latest extraction point (" +
                                                        format_instant(*store.last_refresh) + "), not " +
                                                        format_instant(t));
    // Re-check the value against the declared type.
    Value typed = typed_value_from_json(to_json(value), prop->type, property);

    WarehouseObject o = current;
    auto slot = o.current.value.find(property);
    if (slot != o.current.value.end() && slot->second == typed)
        return;
    Filters f = effective_filters(store.schema, o.class_name);
    if (f.tempo.count(property) && o.current.domain.intervals.front().start < t) {
        State old = o.current;
        close_current(old, t.plus(-1));
        o.past.push_back(std::move(old));
        o.current.domain = single_interval_domain(Interval{t, t});
    }
    o.current.value[property] = typed;
    if (auto env = environment_of(store.schema, o.class_name)) {
        RetentionConfig cfg = effective_config(store.schema, *env);
        if (cfg.has_retention_bound()) {
            std::size_t n = 0;
            archive_object(o, cfg, f.archi, t, n);
        }
    }
    store.objects[oid] = std::move(o);
}

} // namespace edw
