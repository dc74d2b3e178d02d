#include "edw/inspect.hpp"

#include <algorithm>
#include <sstream>

namespace edw {

namespace {

void render_value(std::ostream &out, StateValue const &value)
{
    for (auto const &[name, v] : value)
        out << "    " << name << " = " << format_value(v) << "\n";
}

void render_archive(std::ostream &out, ArchiveState const &a)
{
    for (auto const &[name, agg] : a.aggregates) {
        out << "    " << name << " = " << to_string(agg.fn) << " " << format_value(agg.value);
        if (agg.fn == ArchiveFn::avg && agg.exact_mean())
            out << " (exact " << format_rational(*agg.exact_mean()) << ", over " << agg.count << ")";
        else if (agg.fn == ArchiveFn::sum)
            out << " (exact " << format_rational(agg.sum) << ", over " << agg.count << ")";
        else if (agg.fn == ArchiveFn::count)
            out << " (states)";
        out << "\n";
    }
}

void render_header(std::ostream &out, WarehouseObject const &o)
{
    out << "object " << o.oid.value << " " << o.class_name << " " << to_string(o.status) << " key "
        << format_source_key(o.source_key) << " lifecycle " << format_interval(lifecycle_span(o)) << "\n";
}

void render_object(std::ostream &out, Store const &store, WarehouseObject const &o, InspectQuery const &q)
{
    render_header(out, o);
    if (q.history) {
        out << "  current " << format_domain(o.current.domain) << "\n";
        render_value(out, o.current.value);
        for (auto it = o.past.rbegin(); it != o.past.rend(); ++it) {
            out << "  past " << format_domain(it->domain) << "\n";
            render_value(out, it->value);
        }
        for (auto const &a : o.archives) {
            out << "  archive " << format_domain(a.domain) << "\n";
            render_archive(out, a);
        }
        return;
    }
    if (q.at) {
        ValueAt v = value_at(store, o.oid, *q.at);
        out << "  at " << format_instant(*q.at) << ": " << to_string(v.kind) << "\n";
        if (v.kind == ValueAt::Kind::archive)
            render_archive(out, *v.archive);
        else
            render_value(out, v.value);
        return;
    }
    out << "  current " << format_domain(o.current.domain) << "\n";
    render_value(out, o.current.value);
}

} // namespace

std::string render_inspect(Store const &store, InspectQuery const &q)
{
    std::vector<Oid> oids = store.extension(q.class_name);
    std::ostringstream out;
    if (q.oid) {
        if (!std::binary_search(oids.begin(), oids.end(), *q.oid))
            throw Error(ErrorKind::UnknownOid,
                        "no object with oid " + std::to_string(q.oid->value) + " in class '" + q.class_name + "'");
        render_object(out, store, store.object(*q.oid), q);
        return out.str();
    }
    out << "class " << q.class_name << ": " << oids.size() << " object(s)\n";
    for (auto oid : oids)
        render_object(out, store, store.object(oid), q);
    return out.str();
}

} // namespace edw
