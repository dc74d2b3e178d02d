#include "edw/property.hpp"

namespace edw {

std::string_view to_string(Origin origin)
{
    switch (origin) {
    case Origin::derived: return "derived";
    case Origin::computed: return "computed";
    case Origin::specific: return "specific";
    }
    return "?";
}

std::string_view origin_prefix(Origin origin)
{
    switch (origin) {
    case Origin::derived: return "D_";
    case Origin::computed: return "C_";
    case Origin::specific: return "S_";
    }
    return "";
}

std::string_view to_string(ArchiveFn fn)
{
    switch (fn) {
    case ArchiveFn::avg: return "avg";
    case ArchiveFn::sum: return "sum";
    case ArchiveFn::min: return "min";
    case ArchiveFn::max: return "max";
    case ArchiveFn::count: return "count";
    case ArchiveFn::last: return "last";
    }
    return "?";
}

bool parse_archive_fn(std::string_view name, ArchiveFn &out)
{
    for (auto fn : {ArchiveFn::avg, ArchiveFn::sum, ArchiveFn::min, ArchiveFn::max, ArchiveFn::count, ArchiveFn::last})
        if (to_string(fn) == name) {
            out = fn;
            return true;
        }
    return false;
}

bool PropertyDef::same_definition(PropertyDef const &other) const
{
    return name == other.name && origin == other.origin && kind == other.kind && type == other.type &&
           target == other.target && cardinality == other.cardinality && inverse == other.inverse;
}

std::string format_property(PropertyDef const &p)
{
    std::string out = std::string(origin_prefix(p.origin)) + std::string(to_string(p.kind)) + " ";
    if (p.is_relation())
        out += std::string(p.cardinality == Cardinality::many ? "Set" : "") + "<" + p.target + ">";
    else
        out += format_type(p.type);
    out += " " + p.name;
    if (p.inverse)
        out += " inverse " + p.inverse->interface + "::" + p.inverse->property;
    return out;
}

RetentionConfig merge_config(RetentionConfig const &local, RetentionConfig const &defaults)
{
    RetentionConfig out = defaults;
    if (local.refresh_period)
        out.refresh_period = local.refresh_period;
    if (local.keep_past_count)
        out.keep_past_count = local.keep_past_count;
    if (local.keep_past_duration)
        out.keep_past_duration = local.keep_past_duration;
    return out;
}

std::string format_config(RetentionConfig const &c)
{
    std::string out;
    auto add = [&](std::string s) {
        if (!out.empty())
            out += ", ";
        out += s;
    };
    if (c.refresh_period)
        add("refresh every " + std::to_string(c.refresh_period->count) + " " + std::string(to_string(c.refresh_period->unit)));
    if (c.keep_past_count)
        add("keep at most " + std::to_string(*c.keep_past_count) + " past states");
    if (c.keep_past_duration)
        add("keep past states for " + std::to_string(c.keep_past_duration->count) + " " +
            std::string(to_string(c.keep_past_duration->unit)));
    return out.empty() ? "no retention rules" : out;
}

} // namespace edw
