// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

#include "algebra_oracle.hpp"
#include "support.hpp"

#include <bitset>
#include <chrono>
#include <filesystem>
#include <functional>
#include <iostream>
#include <set>
#include <unistd.h>

using namespace edw;
using nlohmann::json;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, std::string const &what)
    {
        if (!ok && pass) {
            pass = false;
            detail = what;
        }
    }
};

using Records = std::vector<json>;

Records with(Records r, std::string const &id, std::function<void(json &)> const &f)
{
    json *rec = support::find_record(r, id);
    if (!rec)
        throw std::runtime_error("no record " + id);
    f(*rec);
    return r;
}

Snapshot snap(Store const &s, Records const &r, int year)
{
    return support::snapshot_from(s.source, r, year_instant(year));
}

json surgeon(std::string const &id, int born)
{
    return json{{"interface", "PRATICIEN"},
                {"id", id},
                {"values",
                 {{"nom", "Nom " + id},
                  {"prénom", "P"},
                  {"adresse", {{"libelle", "rue"}, {"ville", "Albi"}, {"code_postal", 81000}}},
                  {"année_naissance", born},
                  {"no_praticien", "81-" + id},
                  {"catégorie", "chirurgie"},
                  {"spécialité", "orthopédie"},
                  {"revenus", 30000.0}}},
                {"links", {{"travaille", json::array()}, {"dirige", json::array()}}}};
}

Outcome elaboration()
{
    Outcome o;
    auto start = std::chrono::steady_clock::now();
    SourceSchema src = parse_source_schema(support::fixture("medical.odl"));
    WarehouseDef def = parse_warehouse_def(support::fixture("medical.edw"));
    Resolution r = resolve_collect(def, src);
    o.require(r.diagnostics.empty(), "fixture resolves with diagnostics");
    o.require(r.schema.classes.size() == 6, "expected 6 classes");
    o.require(r.schema.environments.size() == 1, "expected 1 environment");
    o.require(r.schema.environments.size() == 1 && r.schema.environments.begin()->second.classes.size() == 4,
              "expected 4 classes in the environment");
    o.require(validate_schema(r.schema).empty(), "validate_schema reports violations");

    WarehouseDef cut = def;
    std::erase_if(cut.classes, [](ClassDecl const &c) { return c.name == "Services"; });
    std::erase_if(cut.mappings, [](MappingDecl const &m) { return m.class_name == "Services"; });
    for (auto &e : cut.environments)
        std::erase(e.classes, "Services");
    Resolution bad = resolve_collect(cut, src);
    std::size_t closure = 0;
    for (auto const &d : bad.diagnostics)
        closure += d.kind == ErrorKind::RelationClosure;
    o.require(closure == 1, "expected one relation-closure violation, got " + std::to_string(closure));
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
    o.require(ms < 1000, "took " + std::to_string(ms) + " ms");
    if (o.pass)
        o.detail = "6 classes, 1 environment of 4, valid; without Services: 1 closure violation; " +
                   std::to_string(ms) + " ms";
    return o;
}

Outcome mapping_semantics()
{
    Outcome o;
    std::mt19937 rng(424242);
    oracle::Tally t;
    for (int round = 0; round < 1000; ++round)
        oracle::run_round(rng, t);
    o.require(t.project == 0, "project mismatches: " + std::to_string(t.project));
    o.require(t.hide == 0, "hide mismatches: " + std::to_string(t.hide));
    o.require(t.select == 0, "select mismatches: " + std::to_string(t.select));
    o.require(t.join == 0, "join mismatches: " + std::to_string(t.join));
    o.require(t.augment == 0, "augment mismatches: " + std::to_string(t.augment));

    // The hand-built medical snapshot: selection by category against a filter oracle.
    SourceSchema src = support::medical_source();
    Records recs = support::records_from_file("snapshot_1990.jsonl");
    Snapshot s = support::snapshot_from(src, recs, year_instant(1990));
    auto build = eval_extraction(parse_mapping("select(p: PRATICIEN, p.catégorie = \"chirurgie\")"),
                                 EvalContext{&src, &s});
    std::set<std::string> expect, got;
    for (auto const &r : recs)
        if (r["interface"] == "PRATICIEN" && r["values"]["catégorie"] == "chirurgie")
            expect.insert(r["id"].get<std::string>());
    for (auto const &row : build.rows)
        got.insert(row.key.front().id);
    o.require(!expect.empty() && got == expect, "medical selection differs from the filter oracle");
    if (o.pass)
        o.detail = "1000 random instances x 5 operators, 0 mismatches";
    return o;
}

Outcome hierarchization()
{
    Outcome o;
    Store s = support::medical_store();
    WarehouseSchema const &w = s.schema;
    std::pair<char const *, char const *> pairs[] = {{"Chirurgiens", "Personnes"},
                                                     {"Jeunes_Chirurgiens", "Chirurgiens"},
                                                     {"Etablissements", "Hôpitaux_Publics"},
                                                     {"Etablissements", "Services"}};
    Records recs = support::records_from_file("snapshot_1990.jsonl");
    initial_load(s, snap(s, recs, 1990), year_instant(1990));
    for (auto const &[sub, sup] : pairs) {
        o.require(is_subclass(w, sub, sup), std::string(sub) + " is not a subclass of " + sup);
        // Type law: the subclass structure includes every property of the super.
        auto sub_props = flatten_type(w, sub);
        for (auto const &p : flatten_type(w, sup)) {
            bool found = false;
            for (auto const &q : sub_props)
                found |= q.same_definition(p);
            o.require(found, std::string(sub) + " lacks " + sup + "." + p.name);
        }
        // Extension law.
        auto sub_ext = s.extension(sub);
        auto sup_ext = s.extension(sup);
        o.require(std::includes(sup_ext.begin(), sup_ext.end(), sub_ext.begin(), sub_ext.end()),
                  std::string("extension of ") + sub + " is not inside " + sup);
        o.require(!sub_ext.empty(), std::string("empty extension for ") + sub);
    }
    Filters c = effective_filters(w, "Chirurgiens");
    o.require(c.tempo.count("adresse") == 1, "Chirurgiens does not inherit the temporal filter on adresse");
    o.require(effective_filters(w, "Jeunes_Chirurgiens").empty(), "Jeunes_Chirurgiens inherits filters");
    if (o.pass)
        o.detail = "4 subclass pairs, type and extension laws hold; filters inherited in Evolutions only";
    return o;
}

Outcome history_replay()
{
    Outcome o;
    Store s = support::medical_store();
    Records base = support::records_from_file("snapshot_1990.jsonl");
    base.push_back(json{{"interface", "SERVICE"},
                        {"id", "s5"},
                        {"values", {{"nom", "Radiologie"}, {"téléphone", "0142000005"}}},
                        {"links", {{"équipe", json::array()}, {"est_dirigé", json::array()}}}});
    auto at = [&](int year) {
        double budget = 2500000.0 + 1234.1 * (year - 1990);
        json org = year % 2 ? json{"s4", "s5"} : json{"s4"};
        return with(base, "e2", [&](json &r) {
            r["values"]["budget"] = budget;
            r["links"]["organisation"] = org;
        });
    };
    initial_load(s, snap(s, at(1990), 1990), year_instant(1990));
    SourceKey key{{"ETABLISSEMENT", "e2"}};
    Oid oid = *s.identity.latest("Hôpitaux_Publics", key);
    std::vector<State> timeline{s.object(oid).current};
    for (int k = 1; k <= 11; ++k) {
        int year = 1990 + k;
        refresh(s, snap(s, at(year), year), year_instant(year));
        WarehouseObject const &h = s.object(oid);
        timeline.push_back(h.current);
        if (k < 4)
            continue;
        std::string tag = "refresh " + std::to_string(k) + ": ";
        o.require(h.active() && h.past.size() == 2 && h.archives.size() == 1,
                  tag + "expected 1 current + 2 past + 1 archive, got " + std::to_string(h.past.size()) + " past and " +
                      std::to_string(h.archives.size()) + " archive");
        if (h.archives.size() != 1)
            continue;
        // Brute force: every state but the newest three has been evicted.
        std::size_t evicted = timeline.size() - 3;
        for (std::string prop : {"budget", "nb_services"}) {
            Rational sum = 0;
            for (std::size_t i = 0; i < evicted; ++i) {
                Value const &v = timeline[i].value.at(prop);
                sum += v.is_integer() ? Rational(v.as_integer()) : to_rational(v.as_real());
            }
            Rational mean = sum / static_cast<long>(evicted);
            auto got = h.archives[0].aggregates.at(prop).exact_mean();
            o.require(got && *got == mean, tag + prop + " archive mean " + (got ? format_rational(*got) : "none") +
                                               " differs from " + format_rational(mean));
        }
    }
    if (o.pass)
        o.detail = "1/2/1 states from the 4th refresh on; archived means exact";
    return o;
}

Outcome temporal_invariants()
{
    Outcome o;
    constexpr int span = 96;
    std::mt19937 rng(1001);
    std::size_t failures = 0;
    auto random_set = [&] {
        std::vector<Interval> v;
        for (int n = static_cast<int>(rng() % 8); n > 0; --n) {
            int a = static_cast<int>(rng() % span);
            int b = std::min(span - 1, a + static_cast<int>(rng() % 12));
            v.push_back(make_interval(Instant{TimeUnit::month, a}, Instant{TimeUnit::month, b}));
        }
        return v;
    };
    auto bits = [](std::vector<Interval> const &v) {
        std::bitset<span> b;
        for (auto const &i : v)
            for (auto t = i.start.tick; t <= i.end.tick; ++t)
                b.set(static_cast<std::size_t>(t));
        return b;
    };
    for (int round = 0; round < 10000; ++round) {
        auto s1 = random_set(), s2 = random_set();
        auto d1 = coalesce(s1, TimeUnit::month), d2 = coalesce(s2, TimeUnit::month);
        failures += !validate_domain(d1).empty();
        auto u = domain_union(d1, d2);
        failures += !validate_domain(u).empty();
        failures += bits(u.intervals) != (bits(s1) | bits(s2));
        auto b1 = bits(s1);
        for (int t = 0; t < span; ++t)
            failures += domain_contains(d1, Instant{TimeUnit::month, t}) != b1.test(static_cast<std::size_t>(t));
    }
    o.require(failures == 0, std::to_string(failures) + " failures");
    if (o.pass)
        o.detail = "10000 random interval sets, 0 failures";
    return o;
}

std::string replay_run(std::filesystem::path const &file)
{
    Store s = support::medical_store();
    Records base = support::records_from_file("snapshot_1990.jsonl");
    initial_load(s, snap(s, base, 1990), year_instant(1990));
    save_store(s, file);
    for (int k = 1; k <= 10; ++k) {
        Store cur = load_store(file);
        Records r = with(base, "e1", [&](json &x) { x["values"]["budget"] = 1200000.0 + 0.1 * k; });
        r = with(r, "p1", [&](json &x) { x["values"]["revenus"] = 52000.0 + 7.7 * (k % 3); });
        if (k % 4 == 0)
            r = with(r, "p4", [](json &x) { x["values"]["catégorie"] = "médecine"; });
        if (k >= 5)
            r.push_back(surgeon("p9", 1980 + k % 2));
        refresh(cur, snap(cur, r, 1990 + k), year_instant(1990 + k));
        save_store(cur, file);
    }
    return read_text_file(file);
}

Outcome determinism()
{
    Outcome o;
    auto dir = std::filesystem::temp_directory_path() / ("edw_acceptance_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    std::string a = replay_run(dir / "a.json");
    std::string b = replay_run(dir / "b.json");
    std::filesystem::remove_all(dir);
    o.require(a == b, "store files differ");
    if (o.pass)
        o.detail = "build + 10 refreshes twice: identical " + std::to_string(a.size()) + "-byte stores";
    return o;
}

Outcome freezing()
{
    Outcome o;
    Store s = support::medical_store();
    Records base = support::records_from_file("snapshot_1990.jsonl");
    base.push_back(surgeon("p5", 1975));
    base.push_back(surgeon("p6", 1950));
    initial_load(s, snap(s, base, 1990), year_instant(1990));
    refresh(s, snap(s, base, 1991), year_instant(1991));

    // p5 disappears from the source, p4 leaves the selection.
    Records next = base;
    std::erase_if(next, [](json const &r) { return r["id"] == "p5"; });
    next = with(next, "p4", [](json &r) { r["values"]["catégorie"] = "médecine"; });

    std::set<Oid> expect;
    for (auto const &[oid, obj] : s.objects)
        for (auto const &l : obj.source_key)
            if (l == SourceLink{"PRATICIEN", "p5"} || l == SourceLink{"PRATICIEN", "p4"})
                expect.insert(oid);
    refresh(s, snap(s, next, 1992), year_instant(1992));
    std::set<Oid> frozen;
    for (auto const &[oid, obj] : s.objects)
        if (!obj.active())
            frozen.insert(oid);
    o.require(!expect.empty() && frozen == expect, "frozen set differs from the affected objects");
    for (Oid oid : frozen)
        o.require(domain_span(s.object(oid).current.domain).end == year_instant(1991), "freeze instant is not t-1");

    auto frozen_json = [&](Store const &st) {
        auto doc = json::parse(serialize_store(st));
        json out = json::array();
        for (auto const &x : doc["objects"])
            if (expect.count(Oid{x["oid"].get<std::uint64_t>()}))
                out.push_back(x);
        return out.dump();
    };
    std::string before = frozen_json(s);
    Records r = next;
    for (int k = 1; k <= 5; ++k) {
        r = with(r, "p1", [&](json &x) { x["values"]["revenus"] = 60000.0 + k; });
        refresh(s, snap(s, r, 1992 + k), year_instant(1992 + k));
        o.require(frozen_json(s) == before, "frozen objects changed at refresh " + std::to_string(k));
    }
    if (o.pass)
        o.detail = std::to_string(frozen.size()) + " objects frozen at t-1, unchanged over 5 refreshes";
    return o;
}

} // namespace

int main()
{
    std::pair<char const *, std::function<Outcome()>> criteria[] = {
        {"1 elaboration of the medical fixture", elaboration},
        {"2 mapping semantics vs brute-force oracles", mapping_semantics},
        {"3 hierarchization laws", hierarchization},
        {"4 yearly history replay with retention", history_replay},
        {"5 temporal-domain invariants", temporal_invariants},
        {"6 replay determinism", determinism},
        {"7 freeze semantics", freezing},
    };
    int failed = 0;
    for (auto const &[name, run] : criteria) {
        Outcome o;
        try {
            o = run();
        } catch (std::exception const &e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        failed += !o.pass;
        std::cout << (o.pass ? "PASS " : "FAIL ") << name << " -- " << o.detail << "\n";
    }
    return failed ? 1 : 0;
}
