#include "edw/snapshot.hpp"

#include "edw/error.hpp"

#include <algorithm>
#include <istream>
#include <set>

namespace edw {

using nlohmann::json;

SourceRecord const *Snapshot::find(SourceLink const &link) const
{
    auto it = records_.find(link);
    return it == records_.end() ? nullptr : &it->second;
}

std::vector<SourceRecord const *> Snapshot::extension(SourceSchema const &schema, std::string const &interface) const
{
    std::vector<SourceRecord const *> out;
    for (auto const &[key, rec] : records_)
        if (schema.extends(rec.interface, interface))
            out.push_back(&rec);
    return out;
}

namespace {

std::string describe(SourceLink const &l) { return l.interface + ":" + l.id; }

std::string expect_string(json const &obj, char const *field)
{
    auto it = obj.find(field);
    if (it == obj.end() || !it->is_string())
        throw Error(ErrorKind::TypeMismatch, std::string("record field '") + field + "' must be a string");
    return it->get<std::string>();
}

SourceRecord type_record(SourceSchema const &schema, json const &raw)
{
    if (!raw.is_object())
        throw Error(ErrorKind::TypeMismatch, "record must be a JSON object");
    for (auto const &[k, v] : raw.items())
        if (k != "interface" && k != "id" && k != "values" && k != "links")
            throw Error(ErrorKind::TypeMismatch, "unknown record field '" + k + "'");
    SourceRecord rec;
    rec.interface = expect_string(raw, "interface");
    rec.id = expect_string(raw, "id");
    if (!schema.find(rec.interface))
        throw Error(ErrorKind::UnknownInterface, "record " + rec.id + " names unknown interface '" + rec.interface + "'");

    json values = raw.value("values", json::object());
    json links = raw.value("links", json::object());
    if (!values.is_object() || !links.is_object())
        throw Error(ErrorKind::TypeMismatch, "record " + rec.id + ": values and links must be objects");

    auto flat = schema.flatten(rec.interface);
    auto lookup = [&](std::string const &name) -> SourceProperty const * {
        for (auto const &p : flat)
            if (p.name == name)
                return &p;
        return nullptr;
    };
    for (auto const &[k, v] : values.items()) {
        auto const *p = lookup(k);
        if (!p || p->is_relation())
            throw Error(ErrorKind::TypeMismatch, rec.interface + ":" + rec.id + " has no attribute '" + k + "'");
    }
    for (auto const &[k, v] : links.items()) {
        auto const *p = lookup(k);
        if (!p || !p->is_relation())
            throw Error(ErrorKind::TypeMismatch, rec.interface + ":" + rec.id + " has no relationship '" + k + "'");
    }
    for (auto const &p : flat) {
        if (!p.is_relation()) {
            auto it = values.find(p.name);
            rec.values.emplace(p.name, it == values.end()
                                           ? Value::null()
                                           : typed_value_from_json(*it, p.type, rec.interface + "." + p.name));
        }
    }
    // Link ids stay unresolved (interface = declared target) until all records are known.
    for (auto const &p : flat) {
        if (!p.is_relation())
            continue;
        std::vector<SourceLink> targets;
        if (auto it = links.find(p.name); it != links.end() && !it->is_null()) {
            if (!it->is_array())
                throw Error(ErrorKind::TypeMismatch, rec.interface + "." + p.name + ": links must be an id list");
            for (auto const &id : *it) {
                if (!id.is_string())
                    throw Error(ErrorKind::TypeMismatch, rec.interface + "." + p.name + ": link ids must be strings");
                targets.push_back({p.target, id.get<std::string>()});
            }
            if (p.cardinality == Cardinality::one && targets.size() > 1)
                throw Error(ErrorKind::TypeMismatch,
                            rec.interface + ":" + rec.id + "." + p.name + " is single-valued but has " +
                                std::to_string(targets.size()) + " links");
        }
        rec.links.emplace(p.name, std::move(targets));
    }
    return rec;
}

// Declared-target links become links to the concrete interface holding the id.
void resolve_links(SourceSchema const &schema, std::map<SourceLink, SourceRecord> &records)
{
    std::map<std::string, std::vector<std::string>> families;
    for (auto &[key, rec] : records) {
        for (auto &[rel, targets] : rec.links) {
            std::vector<SourceLink> resolved;
            for (auto const &t : targets) {
                auto &fam = families[t.interface];
                if (fam.empty())
                    fam = schema.family(t.interface);
                std::vector<SourceLink> hits;
                for (auto const &iface : fam)
                    if (records.count({iface, t.id}))
                        hits.push_back({iface, t.id});
                if (hits.empty())
                    throw Error(ErrorKind::DanglingReference, describe(key) + "." + rel + " references missing " +
                                                                  t.interface + " '" + t.id + "'");
                if (hits.size() > 1)
                    throw Error(ErrorKind::DanglingReference, describe(key) + "." + rel + " reference '" + t.id +
                                                                  "' is ambiguous among " + t.interface + " subtypes");
                resolved.push_back(hits.front());
            }
            std::sort(resolved.begin(), resolved.end());
            resolved.erase(std::unique(resolved.begin(), resolved.end()), resolved.end());
            targets = std::move(resolved);
        }
    }
}

void check_compositions(SourceSchema const &schema, std::map<SourceLink, SourceRecord> const &records)
{
    // (declaring interface, relation, component) -> composite
    std::map<std::tuple<std::string, std::string, SourceLink>, SourceLink> owner;
    for (auto const &[key, rec] : records) {
        for (auto const &[rel, targets] : rec.links) {
            auto const *p = schema.find_property(rec.interface, rel);
            if (!p || p->kind != PropertyKind::composition)
                continue;
            for (auto const &t : targets) {
                auto [it, fresh] = owner.emplace(std::make_tuple(p->declared_in, rel, t), key);
                if (!fresh)
                    throw Error(ErrorKind::CompositionShared, describe(t) + " is a component of both " +
                                                                  describe(it->second) + " and " + describe(key) +
                                                                  " via " + rel);
            }
        }
    }
}

} // namespace

std::vector<std::string> inverse_violations_from(SourceSchema const &schema,
                                                 std::map<SourceLink, SourceRecord> const &records,
                                                 std::string const &interface)
{
    std::vector<std::string> out;
    for (auto const &[key, rec] : records) {
        if (!schema.extends(rec.interface, interface))
            continue;
        for (auto const &p : schema.flatten(rec.interface)) {
            if (!p.inverse)
                continue;
            auto const &forward = rec.links.at(p.name);
            std::set<SourceLink> declared(forward.begin(), forward.end());
            std::set<SourceLink> pointing_back;
            for (auto const &[okey, other] : records) {
                if (!schema.extends(other.interface, p.target))
                    continue;
                auto it = other.links.find(p.inverse->property);
                if (it != other.links.end() && std::count(it->second.begin(), it->second.end(), key))
                    pointing_back.insert(okey);
            }
            if (declared != pointing_back)
                out.push_back(describe(key) + "." + p.name + " disagrees with inverse " + p.inverse->interface +
                              "::" + p.inverse->property);
        }
    }
    return out;
}

Snapshot ingest_snapshot(SourceSchema const &schema, std::span<json const> raw_records, Instant at)
{
    std::map<SourceLink, SourceRecord> records;
    for (auto const &raw : raw_records) {
        SourceRecord rec = type_record(schema, raw);
        auto key = rec.link();
        if (!records.emplace(key, std::move(rec)).second)
            throw Error(ErrorKind::DuplicateId, "duplicate record " + describe(key));
    }
    resolve_links(schema, records);
    check_compositions(schema, records);
    for (auto const &iface : schema.interfaces()) {
        auto violations = inverse_violations_from(schema, records, iface.name);
        if (!violations.empty())
            throw Error(ErrorKind::InverseViolation, violations.front());
    }
    return Snapshot(at, std::move(records));
}

Snapshot ingest_snapshot(SourceSchema const &schema, std::istream &lines, Instant at)
{
    std::vector<json> raw;
    std::string line;
    int number = 0;
    while (std::getline(lines, line)) {
        ++number;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        try {
            raw.push_back(json::parse(line));
        } catch (json::parse_error const &e) {
            throw Error(ErrorKind::SyntaxError, std::string("invalid record: ") + e.what(), {number, 1});
        }
    }
    return ingest_snapshot(schema, raw, at);
}

std::string record_to_line(SourceRecord const &record)
{
    json values = json::object();
    for (auto const &[k, v] : record.values)
        if (!v.is_null())
            values[k] = to_json(v);
    json links = json::object();
    for (auto const &[k, targets] : record.links) {
        if (targets.empty())
            continue;
        json ids = json::array();
        for (auto const &t : targets)
            ids.push_back(t.id);
        links[k] = ids;
    }
    json out = {{"interface", record.interface}, {"id", record.id}, {"values", values}, {"links", links}};
    return out.dump();
}

} // namespace edw
