#include "edw/store.hpp"

#include "edw/resolver.hpp"
#include "edw/warehouse_def.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fcntl.h>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace edw {

using nlohmann::json;

std::optional<Oid> IdentityMap::latest(std::string const &class_name, SourceKey const &key) const
{
    auto c = entries.find(class_name);
    if (c == entries.end())
        return std::nullopt;
    auto k = c->second.find(key);
    if (k == c->second.end() || k->second.empty())
        return std::nullopt;
    return k->second.back();
}

void IdentityMap::add(std::string const &class_name, SourceKey const &key, Oid oid)
{
    entries[class_name][key].push_back(oid);
}

Store Store::create(std::string source_text, std::string warehouse_text)
{
    Store s;
    s.source = parse_source_schema(source_text);
    s.schema = resolve(parse_warehouse_def(warehouse_text), s.source);
    s.source_text = std::move(source_text);
    s.warehouse_text = std::move(warehouse_text);
    return s;
}

WarehouseObject const &Store::object(Oid oid) const
{
    auto it = objects.find(oid);
    if (it == objects.end())
        throw Error(ErrorKind::UnknownOid, "no object with oid " + std::to_string(oid.value));
    return it->second;
}

std::vector<Oid> Store::extension(std::string const &class_name, bool active_only) const
{
    schema.get(class_name);
    auto below = descendants(schema, class_name);
    std::vector<Oid> out;
    for (auto const &[oid, o] : objects)
        if (std::binary_search(below.begin(), below.end(), o.class_name) && (!active_only || o.active()))
            out.push_back(oid);
    return out;
}

std::vector<Oid> Store::direct_members(std::string const &class_name, bool active_only) const
{
    schema.get(class_name);
    std::vector<Oid> out;
    for (auto const &[oid, o] : objects)
        if (o.class_name == class_name && (!active_only || o.active()))
            out.push_back(oid);
    return out;
}

std::string_view to_string(ValueAt::Kind kind)
{
    switch (kind) {
    case ValueAt::Kind::current: return "current";
    case ValueAt::Kind::past: return "past";
    case ValueAt::Kind::archive: return "archive";
    case ValueAt::Kind::absent: return "absent";
    }
    return "?";
}

ValueAt value_at(Store const &store, Oid oid, Instant t)
{
    WarehouseObject const &o = store.object(oid);
    if (t.unit != o.current.domain.unit)
        throw Error(ErrorKind::UnitMismatch, "instant " + format_instant(t) + " is not in the store's unit (" +
                                                 std::string(to_string(o.current.domain.unit)) + ")");
    ValueAt out;
    if (domain_contains(o.current.domain, t)) {
        out.kind = ValueAt::Kind::current;
        out.value = o.current.value;
        return out;
    }
    for (auto const &p : o.past)
        if (domain_contains(p.domain, t)) {
            out.kind = ValueAt::Kind::past;
            out.value = p.value;
            return out;
        }
    for (auto const &a : o.archives)
        if (domain_contains(a.domain, t)) {
            out.kind = ValueAt::Kind::archive;
            out.archive = &a;
            return out;
        }
    return out;
}

namespace {

json key_to_json(SourceKey const &key)
{
    json out = json::array();
    for (auto const &l : key)
        out.push_back(json::array({l.interface, l.id}));
    return out;
}

SourceKey key_from_json(json const &j)
{
    SourceKey key;
    for (auto const &l : j)
        key.push_back(SourceLink{l.at(0).get<std::string>(), l.at(1).get<std::string>()});
    return key;
}

json domain_to_json(TemporalDomain const &d)
{
    json out = json::array();
    for (auto const &i : d.intervals)
        out.push_back(json::array({format_instant(i.start), format_instant(i.end)}));
    return out;
}

TemporalDomain domain_from_json(json const &j)
{
    std::vector<Interval> intervals;
    for (auto const &i : j)
        intervals.push_back(make_interval(parse_instant(i.at(0).get<std::string>()),
                                          parse_instant(i.at(1).get<std::string>())));
    if (intervals.empty())
        throw Error(ErrorKind::CorruptStore, "empty temporal domain");
    TemporalDomain d{intervals.front().start.unit, intervals};
    if (!validate_domain(d).empty())
        throw Error(ErrorKind::CorruptStore, "temporal domain " + format_domain(d) + " is not canonical");
    return d;
}

json state_to_json(State const &s)
{
    return json{{"domain", domain_to_json(s.domain)}, {"value", to_json(s.value)}};
}

State state_from_json(json const &j)
{
    return State{domain_from_json(j.at("domain")), state_value_from_json(j.at("value"))};
}

json archive_to_json(ArchiveState const &a)
{
    json aggs = json::object();
    for (auto const &[name, agg] : a.aggregates)
        aggs[name] = json{{"fn", std::string(to_string(agg.fn))},
                          {"value", to_json(agg.value)},
                          {"count", agg.count},
                          {"sum", format_rational(agg.sum)}};
    return json{{"domain", domain_to_json(a.domain)}, {"aggregates", aggs}};
}

ArchiveState archive_from_json(json const &j)
{
    ArchiveState a;
    a.domain = domain_from_json(j.at("domain"));
    for (auto const &[name, agg] : j.at("aggregates").items()) {
        ArchiveAggregate x;
        if (!parse_archive_fn(agg.at("fn").get<std::string>(), x.fn))
            throw Error(ErrorKind::CorruptStore, "unknown archive function in '" + name + "'");
        x.value = value_from_json(agg.at("value"));
        x.count = agg.at("count").get<std::int64_t>();
        x.sum = parse_rational(agg.at("sum").get<std::string>());
        a.aggregates.emplace(name, std::move(x));
    }
    return a;
}

} // namespace

std::string serialize_store(Store const &store)
{
    json doc;
    doc["format"] = "edw-store";
    doc["version"] = 1;
    doc["source_schema"] = store.source_text;
    doc["warehouse"] = store.warehouse_text;
    doc["last_refresh"] = store.last_refresh ? json(format_instant(*store.last_refresh)) : json(nullptr);
    doc["next_oid"] = store.next_oid;
    json identity = json::object();
    for (auto const &[cls, keys] : store.identity.entries) {
        json list = json::array();
        for (auto const &[key, oids] : keys) {
            json ids = json::array();
            for (auto const &o : oids)
                ids.push_back(o.value);
            list.push_back(json{{"key", key_to_json(key)}, {"oids", ids}});
        }
        identity[cls] = list;
    }
    doc["identity"] = identity;
    json objects = json::array();
    for (auto const &[oid, o] : store.objects) {
        json past = json::array();
        for (auto const &p : o.past)
            past.push_back(state_to_json(p));
        json archives = json::array();
        for (auto const &a : o.archives)
            archives.push_back(archive_to_json(a));
        objects.push_back(json{{"oid", oid.value},
                               {"class", o.class_name},
                               {"status", std::string(to_string(o.status))},
                               {"source_key", key_to_json(o.source_key)},
                               {"current", state_to_json(o.current)},
                               {"past", past},
                               {"archives", archives}});
    }
    doc["objects"] = objects;
    return doc.dump(1) + "\n";
}

Store deserialize_store(std::string const &text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (json::exception const &e) {
        throw Error(ErrorKind::CorruptStore, std::string("store is not valid JSON: ") + e.what());
    }
    try {
        if (doc.at("format") != "edw-store" || doc.at("version") != 1)
            throw Error(ErrorKind::CorruptStore, "unsupported store format");
        Store s = Store::create(doc.at("source_schema").get<std::string>(), doc.at("warehouse").get<std::string>());
        if (!doc.at("last_refresh").is_null())
            s.last_refresh = parse_instant(doc.at("last_refresh").get<std::string>());
        s.next_oid = doc.at("next_oid").get<std::uint64_t>();
        for (auto const &[cls, list] : doc.at("identity").items())
            for (auto const &entry : list) {
                SourceKey key = key_from_json(entry.at("key"));
                for (auto const &o : entry.at("oids"))
                    s.identity.add(cls, key, Oid{o.get<std::uint64_t>()});
            }
        for (auto const &j : doc.at("objects")) {
            WarehouseObject o;
            o.oid = Oid{j.at("oid").get<std::uint64_t>()};
            o.class_name = j.at("class").get<std::string>();
            if (!s.schema.find(o.class_name))
                throw Error(ErrorKind::CorruptStore, "object " + std::to_string(o.oid.value) + " has unknown class '" +
                                                         o.class_name + "'");
            std::string status = j.at("status").get<std::string>();
            if (status != "active" && status != "frozen")
                throw Error(ErrorKind::CorruptStore, "bad status '" + status + "'");
            o.status = status == "active" ? ObjectStatus::active : ObjectStatus::frozen;
            o.source_key = key_from_json(j.at("source_key"));
            o.current = state_from_json(j.at("current"));
            for (auto const &p : j.at("past"))
                o.past.push_back(state_from_json(p));
            for (auto const &a : j.at("archives"))
                o.archives.push_back(archive_from_json(a));
            if (o.oid.value == 0 || o.oid.value >= s.next_oid)
                throw Error(ErrorKind::CorruptStore, "oid " + std::to_string(o.oid.value) + " is out of range");
            if (!s.objects.emplace(o.oid, o).second)
                throw Error(ErrorKind::CorruptStore, "duplicate oid " + std::to_string(o.oid.value));
        }
        return s;
    } catch (json::exception const &e) {
        throw Error(ErrorKind::CorruptStore, std::string("malformed store: ") + e.what());
    }
}

std::string read_text_file(std::filesystem::path const &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorKind::Io, "cannot read '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void save_store(Store const &store, std::filesystem::path const &path)
{
    std::string text = serialize_store(store);
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw Error(ErrorKind::Io, "cannot write '" + tmp.string() + "'");
        out << text;
        out.flush();
        if (!out)
            throw Error(ErrorKind::Io, "cannot write '" + tmp.string() + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw Error(ErrorKind::Io, "cannot replace '" + path.string() + "'");
    }
}

Store load_store(std::filesystem::path const &path)
{
    return deserialize_store(read_text_file(path));
}

StoreLock::StoreLock(std::filesystem::path const &store_path) : path_(store_path)
{
    path_ += ".lock";
    int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0) {
        if (errno == EEXIST)
            throw Error(ErrorKind::Locked, "store is locked by another writer ('" + path_.string() + "' exists)");
        throw Error(ErrorKind::Io, "cannot create '" + path_.string() + "': " + std::strerror(errno));
    }
    std::string pid = std::to_string(::getpid()) + "\n";
    [[maybe_unused]] auto n = ::write(fd, pid.data(), pid.size());
    ::close(fd);
}

StoreLock::~StoreLock()
{
    std::error_code ec;
    std::filesystem::remove(path_, ec);
}

} // namespace edw
