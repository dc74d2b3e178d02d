#include "edw/inspect.hpp"
#include "edw/plan.hpp"
#include "edw/refresh.hpp"
#include "edw/resolver.hpp"
#include "edw/snapshot.hpp"
#include "edw/store.hpp"
#include "edw/warehouse_def.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace edw;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_domain = 1;
constexpr int exit_io = 2;

// An error tagged with the file it came from, so positions print as file:line:col.
struct FileError {
    std::string file;
    Error error;
};

template <class F>
auto in_file(std::string const &file, F &&f)
{
    try {
        return f();
    } catch (DiagnosticError const &) {
        throw;
    } catch (Error const &e) {
        if (e.kind() == ErrorKind::Io)
            throw;
        throw FileError{file, e};
    }
}

int exit_code(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::Io:
    case ErrorKind::Locked:
    case ErrorKind::CorruptStore:
        return exit_io;
    default:
        return exit_domain;
    }
}

std::string format_error(Error const &e, std::string const &file = {})
{
    std::string out;
    if (!file.empty()) {
        out += file;
        if (e.pos().valid())
            out += ":" + std::to_string(e.pos().line) + ":" + std::to_string(e.pos().column);
        out += ": ";
    }
    return out + "error: " + std::string(to_string(e.kind())) + ": " + e.detail();
}

struct Inputs {
    std::string odl_path;
    std::string edw_path;
};

std::pair<SourceSchema, WarehouseDef> parse_inputs(Inputs const &in, std::string &odl, std::string &edw)
{
    odl = read_text_file(in.odl_path);
    edw = read_text_file(in.edw_path);
    SourceSchema src = in_file(in.odl_path, [&] { return parse_source_schema(odl); });
    WarehouseDef def = in_file(in.edw_path, [&] { return parse_warehouse_def(edw); });
    return {std::move(src), std::move(def)};
}

Snapshot read_snapshot(SourceSchema const &schema, std::string const &path, Instant at)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw Error(ErrorKind::Io, "cannot read '" + path + "'");
    return in_file(path, [&] { return ingest_snapshot(schema, f, at); });
}

Instant parse_at(std::string const &text)
{
    return parse_instant(text);
}

void print_report(RefreshReport const &r)
{
    std::cout << (r.initial ? "initial load" : "refresh") << " at " << format_instant(r.at) << "\n";
    for (auto const &[name, c] : r.classes)
        std::cout << "  " << name << ": previous " << c.previous << ", created " << c.created << ", carried "
                  << c.carried << ", updated " << c.updated << ", historized " << c.historized << ", frozen "
                  << c.frozen << ", evicted " << c.evicted << "\n";
    for (auto const &w : r.warnings)
        std::cout << "warning: " << w << "\n";
}

void write_report(RefreshReport const &r, std::string const &path)
{
    if (path.empty())
        return;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error(ErrorKind::Io, "cannot write '" + path + "'");
    out << r.to_json().dump(1) << "\n";
}

int cmd_validate(Inputs const &in)
{
    std::string odl, edw;
    auto [src, def] = parse_inputs(in, odl, edw);
    Resolution r = resolve_collect(def, src);
    for (auto const &d : r.diagnostics)
        std::cout << d.format(in.edw_path) << "\n";
    if (!r.diagnostics.empty()) {
        std::cout << r.diagnostics.size() << " violation(s)\n";
        return exit_domain;
    }
    std::cout << "ok: " << r.schema.classes.size() << " classes, " << r.schema.environments.size()
              << " environment(s)\n";
    return exit_ok;
}

int cmd_build(Inputs const &in, std::string const &snapshot, std::string const &at, std::string const &store_path,
              std::string const &report)
{
    Instant t = parse_at(at);
    std::string odl, edw;
    parse_inputs(in, odl, edw);
    if (fs::exists(store_path))
        throw Error(ErrorKind::NonEmptyStore, "store '" + store_path + "' already exists");
    StoreLock lock(store_path);
    Store store = Store::create(odl, edw);
    Snapshot snap = read_snapshot(store.source, snapshot, t);
    RefreshReport r = initial_load(store, snap, t);
    save_store(store, store_path);
    write_report(r, report);
    print_report(r);
    return exit_ok;
}

int cmd_refresh(std::string const &store_path, std::string const &snapshot, std::string const &at,
                std::string const &report)
{
    Instant t = parse_at(at);
    StoreLock lock(store_path);
    Store store = load_store(store_path);
    Snapshot snap = read_snapshot(store.source, snapshot, t);
    RefreshReport r = refresh(store, snap, t);
    save_store(store, store_path);
    write_report(r, report);
    print_report(r);
    return exit_ok;
}

int cmd_patch(std::string const &store_path, std::uint64_t oid, std::string const &assignment, std::string const &at)
{
    auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw CLI::ValidationError("--set", "expected prop=value, got '" + assignment + "'");
    std::string prop = assignment.substr(0, eq);
    std::string text = assignment.substr(eq + 1);
    nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded())
        j = text;
    Instant t = parse_at(at);
    StoreLock lock(store_path);
    Store store = load_store(store_path);
    patch_specific(store, Oid{oid}, prop, value_from_json(j), t);
    save_store(store, store_path);
    std::cout << "patched object " << oid << ": " << prop << " = "
              << format_value(store.object(Oid{oid}).current.value.at(prop)) << "\n";
    return exit_ok;
}

int cmd_inspect(std::string const &store_path, std::string const &cls, std::optional<std::uint64_t> oid,
                std::string const &at, bool history)
{
    InspectQuery q;
    q.class_name = cls;
    if (oid)
        q.oid = Oid{*oid};
    if (!at.empty())
        q.at = parse_at(at);
    q.history = history;
    Store store = load_store(store_path);
    std::cout << render_inspect(store, q);
    return exit_ok;
}

int cmd_plan(Inputs const &in)
{
    std::string odl, edw;
    auto [src, def] = parse_inputs(in, odl, edw);
    Resolution r = resolve_collect(def, src);
    if (!r.diagnostics.empty()) {
        for (auto const &d : r.diagnostics)
            std::cerr << d.format(in.edw_path) << "\n";
        return exit_domain;
    }
    std::cout << render_plan(elaboration_plan(r.schema));
    return exit_ok;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Evolutive data warehouse: build, refresh and inspect a historized warehouse"};
    app.require_subcommand(1);

    Inputs in;
    std::string snapshot, at, store, report, set, cls;
    std::uint64_t oid_value = 0;
    bool history = false;

    auto *validate = app.add_subcommand("validate", "Check a warehouse definition against its source schema");
    validate->add_option("--source-schema", in.odl_path, "Source schema (.odl)")->required();
    validate->add_option("--warehouse", in.edw_path, "Warehouse definition (.edw)")->required();

    auto *build = app.add_subcommand("build", "Create a store from an initial snapshot");
    build->add_option("--warehouse", in.edw_path, "Warehouse definition (.edw)")->required();
    build->add_option("--source-schema", in.odl_path, "Source schema (.odl)")->required();
    build->add_option("--snapshot", snapshot, "Source snapshot (JSON lines)")->required();
    build->add_option("--at", at, "Extraction instant, e.g. 1990 or 1990-03 or month:243")->required();
    build->add_option("--store", store, "Store file to create")->required();
    build->add_option("--report", report, "Also write the report as JSON");

    auto *refresh_cmd = app.add_subcommand("refresh", "Apply one extraction point to a store");
    refresh_cmd->add_option("--store", store, "Store file")->required();
    refresh_cmd->add_option("--snapshot", snapshot, "Source snapshot (JSON lines)")->required();
    refresh_cmd->add_option("--at", at, "Extraction instant")->required();
    refresh_cmd->add_option("--report", report, "Also write the report as JSON");

    auto *patch = app.add_subcommand("patch", "Set a specific property of an object");
    patch->add_option("--store", store, "Store file")->required();
    patch->add_option("--oid", oid_value, "Object id")->required();
    patch->add_option("--set", set, "prop=value (value read as JSON, else as text)")->required();
    patch->add_option("--at", at, "Latest extraction instant")->required();

    auto *inspect = app.add_subcommand("inspect", "Print objects of a class");
    inspect->add_option("--store", store, "Store file")->required();
    inspect->add_option("--class", cls, "Class name")->required();
    auto *oid_opt = inspect->add_option("--oid", oid_value, "Only this object");
    inspect->add_option("--at", at, "Show values as of this instant");
    inspect->add_flag("--history", history, "Show every state");

    auto *plan = app.add_subcommand("plan", "Print the elaboration plan");
    plan->add_option("--warehouse", in.edw_path, "Warehouse definition (.edw)")->required();
    plan->add_option("--source-schema", in.odl_path, "Source schema (.odl)")->required();

    try {
        app.parse(argc, argv);
    } catch (CLI::ParseError const &e) {
        int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_io;
    }

    try {
        if (*validate)
            return cmd_validate(in);
        if (*build)
            return cmd_build(in, snapshot, at, store, report);
        if (*refresh_cmd)
            return cmd_refresh(store, snapshot, at, report);
        if (*patch)
            return cmd_patch(store, oid_value, set, at);
        if (*inspect)
            return cmd_inspect(store, cls, oid_opt->count() ? std::optional(oid_value) : std::nullopt, at, history);
        if (*plan)
            return cmd_plan(in);
    } catch (DiagnosticError const &e) {
        for (auto const &d : e.diagnostics())
            std::cerr << d.format(in.edw_path) << "\n";
        return exit_domain;
    } catch (FileError const &e) {
        std::cerr << format_error(e.error, e.file) << "\n";
        return exit_code(e.error.kind());
    } catch (Error const &e) {
        std::cerr << format_error(e) << "\n";
        return exit_code(e.kind());
    } catch (CLI::ValidationError const &e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_io;
    }
    return exit_io;
}
