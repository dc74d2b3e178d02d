#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

#include <functional>

using namespace edw;
using nlohmann::json;

namespace {

ErrorKind kind_of(auto &&f)
{
    try {
        f();
    } catch (Error const &e) {
        return e.kind();
    }
    FAIL("no error thrown");
    return ErrorKind::Io;
}

using Records = std::vector<json>;

struct Scenario {
    Store store = support::medical_store();
    Records base = support::records_from_file("snapshot_1990.jsonl");

    Snapshot snap(Records const &r, int year) const { return support::snapshot_from(store.source, r, year_instant(year)); }

    RefreshReport load(int year = 1990) { return initial_load(store, snap(base, year), year_instant(year)); }
    RefreshReport step(Records const &r, int year) { return refresh(store, snap(r, year), year_instant(year)); }

    Oid oid(std::string const &cls, SourceKey const &key) const
    {
        auto o = store.identity.latest(cls, key);
        REQUIRE(o);
        return *o;
    }
    WarehouseObject const &obj(std::string const &cls, SourceKey const &key) const
    {
        return store.object(oid(cls, key));
    }
};

SourceKey praticien(std::string id) { return {{"PRATICIEN", id}}; }
SourceKey etab(std::string id) { return {{"ETABLISSEMENT", id}}; }

Records with(Records r, std::string const &id, std::function<void(json &)> const &f)
{
    json *rec = support::find_record(r, id);
    REQUIRE(rec);
    f(*rec);
    return r;
}

Records without(Records r, std::string const &id)
{
    std::erase_if(r, [&](json const &x) { return x.at("id") == id; });
    return r;
}

Interval years(int a, int b) { return make_interval(year_instant(a), year_instant(b)); }

} // namespace

TEST_CASE("initial load populates every class")
{
    Scenario s;
    auto r = s.load();
    std::size_t surgeons = 0, young = 0, publics = 0, services = 0;
    for (auto const &j : s.base) {
        if (j["interface"] == "PRATICIEN" && j["values"]["catégorie"] == "chirurgie") {
            ++surgeons;
            young += j["values"]["année_naissance"].get<int>() >= 1970;
        }
        if (j["interface"] == "ETABLISSEMENT" && j["values"]["statut"] == "public") {
            ++publics;
            services += j["links"]["organisation"].size();
        }
    }
    CHECK(r.initial);
    CHECK(r.classes.at("Chirurgiens").created == surgeons);
    CHECK(r.classes.at("Jeunes_Chirurgiens").created == young);
    CHECK(r.classes.at("Hôpitaux_Publics").created == publics);
    CHECK(r.classes.at("Services").created == services);
    CHECK(r.classes.at("Personnes").created == 0);
    CHECK(s.store.extension("Personnes").size() == surgeons + young);
    CHECK(s.store.extension("Chirurgiens").size() == surgeons + young);
    CHECK(s.store.last_refresh == year_instant(1990));
    for (auto const &[oid, o] : s.store.objects) {
        CHECK(o.current.domain.intervals == std::vector<Interval>{years(1990, 1990)});
        CHECK(o.past.empty());
    }
    // Relations point at warehouse objects.
    auto const &p1 = s.obj("Chirurgiens", praticien("p1"));
    auto const &svc = p1.current.value.at("travaille").as_oids();
    REQUIRE(svc.size() == 1);
    CHECK(s.store.object(svc[0]).class_name == "Services");
    CHECK(s.store.object(svc[0]).source_key.back() == SourceLink{"SERVICE", "s1"});
    CHECK(kind_of([&] { s.load(1991); }) == ErrorKind::NonEmptyStore);
}

TEST_CASE("an empty snapshot builds an empty store")
{
    Scenario s;
    initial_load(s.store, s.snap({}, 1990), year_instant(1990));
    CHECK(s.store.objects.empty());
    CHECK(s.store.last_refresh == year_instant(1990));
}

TEST_CASE("a refresh without changes carries every object")
{
    Scenario s;
    s.load();
    auto r = s.step(s.base, 1991);
    for (auto const &[cls, c] : r.classes) {
        CHECK(c.carried == c.previous);
        CHECK(c.created + c.updated + c.historized + c.frozen == 0);
    }
    for (auto const &[oid, o] : s.store.objects)
        CHECK(o.current.domain.intervals == std::vector<Interval>{years(1990, 1991)});
    CHECK(r.warnings.empty());
}

TEST_CASE("temporal changes are historized, others updated in place")
{
    Scenario s;
    s.load();
    s.step(s.base, 1991);
    auto next = with(s.base, "p1", [](json &r) {
        r["values"]["revenus"] = 55000.0;
        r["values"]["no_praticien"] = "31-9999";
    });
    auto r = s.step(next, 1992);
    CHECK(r.classes.at("Chirurgiens").historized == 1);
    auto const &p1 = s.obj("Chirurgiens", praticien("p1"));
    REQUIRE(p1.past.size() == 1);
    CHECK(p1.past[0].domain.intervals == std::vector<Interval>{years(1990, 1991)});
    CHECK(p1.past[0].value.at("revenus") == Value::real(52000.0));
    CHECK(p1.current.domain.intervals == std::vector<Interval>{years(1992, 1992)});
    CHECK(p1.current.value.at("revenus") == Value::real(55000.0));

    auto next2 = with(next, "p1", [](json &r) { r["values"]["no_praticien"] = "31-0001"; });
    r = s.step(next2, 1993);
    CHECK(r.classes.at("Chirurgiens").updated == 1);
    auto const &again = s.obj("Chirurgiens", praticien("p1"));
    CHECK(again.past.size() == 1);
    CHECK(again.current.domain.intervals == std::vector<Interval>{years(1992, 1993)});
    CHECK(again.current.value.at("no_praticien") == Value::string("31-0001"));
}

TEST_CASE("classes outside an environment update in place")
{
    Scenario s;
    s.load();
    auto r = s.step(with(s.base, "p2", [](json &r) { r["values"]["revenus"] = 1.0; }), 1991);
    CHECK(r.classes.at("Chirurgiens").historized == 1);
    CHECK(r.classes.at("Jeunes_Chirurgiens").updated == 1);
    auto const &young = s.obj("Jeunes_Chirurgiens", praticien("p2"));
    CHECK(young.past.empty());
    CHECK(young.current.value.at("revenus") == Value::real(1.0));
}

TEST_CASE("removed or deselected records freeze their objects at t-1")
{
    Scenario s;
    s.load();
    Oid p4 = s.oid("Chirurgiens", praticien("p4"));
    auto moved = with(s.base, "p4", [](json &r) { r["values"]["catégorie"] = "médecine"; });
    auto r = s.step(moved, 1991);
    CHECK(r.classes.at("Chirurgiens").frozen == 1);
    auto const &o = s.store.object(p4);
    CHECK(o.status == ObjectStatus::frozen);
    CHECK(o.current.domain.intervals == std::vector<Interval>{years(1990, 1990)});
    // Only that object changed status.
    std::size_t frozen = 0;
    for (auto const &[oid, x] : s.store.objects)
        frozen += !x.active();
    CHECK(frozen == 1);

    auto gone = without(moved, "p4");
    r = s.step(gone, 1992);
    CHECK(r.classes.at("Chirurgiens").frozen == 0);

    // A returning key gets a fresh object.
    r = s.step(s.base, 1993);
    CHECK(r.classes.at("Chirurgiens").created == 1);
    Oid again = s.oid("Chirurgiens", praticien("p4"));
    CHECK(again != p4);
    CHECK(s.store.object(p4).status == ObjectStatus::frozen);
    CHECK(s.store.identity.entries.at("Chirurgiens").at(praticien("p4")).size() == 2);
}

TEST_CASE("retention keeps two past states and archives the rest")
{
    Scenario s;
    s.load();
    Records r = s.base;
    Rational evicted_sum = 0;
    std::vector<double> budgets{1200000.0};
    for (int year = 1991; year <= 1996; ++year) {
        double b = 1200000.0 + 1000.1 * (year - 1990);
        budgets.push_back(b);
        r = with(r, "e1", [&](json &x) { x["values"]["budget"] = b; });
        auto rep = s.step(r, year);
        auto const &h = s.obj("Hôpitaux_Publics", etab("e1"));
        CHECK(h.past.size() == std::min<std::size_t>(2, static_cast<std::size_t>(year - 1990)));
        if (year >= 1993) {
            CHECK(rep.classes.at("Hôpitaux_Publics").evicted == 1);
            REQUIRE(h.archives.size() == 1);
            evicted_sum += to_rational(budgets[static_cast<std::size_t>(year - 1993)]);
            auto mean = h.archives[0].aggregates.at("budget").exact_mean();
            CHECK(*mean == evicted_sum / (year - 1992));
            CHECK(h.archives[0].domain.intervals == std::vector<Interval>{years(1990, year - 3)});
        }
    }
}

TEST_CASE("failed refreshes leave the store untouched")
{
    Scenario s;
    s.load();
    std::string before = serialize_store(s.store);
    CHECK(kind_of([&] { s.step(s.base, 1990); }) == ErrorKind::NonMonotonicInstant);
    CHECK(kind_of([&] { refresh(s.store, s.snap(s.base, 1991), month_instant(1991, 1)); }) == ErrorKind::UnitMismatch);
    // p3 is not a surgeon; putting it on a public team leaves no target for the relation.
    auto bad = with(s.base, "s1", [](json &r) { r["links"]["équipe"] = {"p1", "p2", "p3"}; });
    bad = with(bad, "p3", [](json &r) { r["links"]["travaille"] = {"s1", "s3"}; });
    CHECK(kind_of([&] { s.step(bad, 1991); }) == ErrorKind::DanglingRelationTarget);
    CHECK(serialize_store(s.store) == before);
    Store empty = support::medical_store();
    CHECK(kind_of([&] { refresh(empty, s.snap(s.base, 1991), year_instant(1991)); }) ==
          ErrorKind::NonMonotonicInstant);
}

TEST_CASE("refresh period mismatches are reported as warnings")
{
    Scenario s;
    s.load();
    auto r = s.step(s.base, 1993);
    REQUIRE(r.warnings.size() == 1);
    CHECK(r.warnings[0].find("Evolutions") != std::string::npos);
}

TEST_CASE("specific properties are patched and survive refreshes")
{
    Scenario s;
    s.load();
    Oid h = s.oid("Hôpitaux_Publics", etab("e2"));
    patch_specific(s.store, h, "année_création", Value::integer(1974), year_instant(1990));
    CHECK(s.store.object(h).current.value.at("année_création") == Value::integer(1974));
    s.step(s.base, 1991);
    CHECK(s.store.object(h).current.value.at("année_création") == Value::integer(1974));
    CHECK(s.store.object(h).current.domain.intervals == std::vector<Interval>{years(1990, 1991)});

    CHECK(kind_of([&] { patch_specific(s.store, h, "nom", Value::string("x"), year_instant(1991)); }) ==
          ErrorKind::NotSpecificProperty);
    CHECK(kind_of([&] { patch_specific(s.store, h, "zz", Value::integer(1), year_instant(1991)); }) ==
          ErrorKind::UnknownProperty);
    CHECK(kind_of([&] { patch_specific(s.store, h, "année_création", Value::string("old"), year_instant(1991)); }) ==
          ErrorKind::TypeMismatch);
    CHECK(kind_of([&] { patch_specific(s.store, h, "année_création", Value::integer(1), year_instant(1990)); }) ==
          ErrorKind::NonMonotonicInstant);
    CHECK(kind_of([&] { patch_specific(s.store, Oid{999}, "année_création", Value::integer(1), year_instant(1991)); }) ==
          ErrorKind::UnknownOid);

    s.step(with(s.base, "e2", [](json &r) { r["values"]["statut"] = "privé"; }), 1992);
    CHECK(kind_of([&] { patch_specific(s.store, h, "année_création", Value::integer(1), year_instant(1992)); }) ==
          ErrorKind::FrozenObject);
}

TEST_CASE("value_at walks current, past and archive states")
{
    Scenario s;
    s.load();
    Records r = s.base;
    for (int year = 1991; year <= 1994; ++year) {
        r = with(r, "e2", [&](json &x) { x["values"]["budget"] = 100.0 * year; });
        s.step(r, year);
    }
    Oid h = s.oid("Hôpitaux_Publics", etab("e2"));
    CHECK(value_at(s.store, h, year_instant(1994)).kind == ValueAt::Kind::current);
    auto past = value_at(s.store, h, year_instant(1993));
    CHECK(past.kind == ValueAt::Kind::past);
    CHECK(past.value.at("budget") == Value::real(199300.0));
    auto arch = value_at(s.store, h, year_instant(1990));
    REQUIRE(arch.kind == ValueAt::Kind::archive);
    CHECK(arch.archive->aggregates.count("budget") == 1);
    CHECK(value_at(s.store, h, year_instant(1989)).kind == ValueAt::Kind::absent);
    CHECK(kind_of([&] { value_at(s.store, h, month_instant(1990, 1)); }) == ErrorKind::UnitMismatch);
}

TEST_CASE("composite objects freeze with their members")
{
    Scenario s;
    s.load();
    auto r0 = s.store.direct_members("Etablissements", true);
    REQUIRE(r0.size() == 2);
    auto next = with(s.base, "e1", [](json &r) { r["links"]["organisation"] = {"s1"}; });
    next = with(next, "e3", [](json &r) { r["links"]["organisation"] = {"s3", "s2"}; });
    next = with(next, "s2", [](json &r) {
        r["links"]["équipe"] = json::array();
        r["links"]["est_dirigé"] = json::array();
    });
    next = with(next, "p2", [](json &r) {
        r["links"]["travaille"] = {"s1"};
        r["links"]["dirige"] = json::array();
    });
    auto r = s.step(next, 1991);
    CHECK(r.classes.at("Services").frozen == 1);
    CHECK(r.classes.at("Etablissements").frozen == 1);
    CHECK(r.classes.at("Etablissements").carried + r.classes.at("Etablissements").historized +
              r.classes.at("Etablissements").updated ==
          1);
    CHECK(s.store.direct_members("Etablissements", true).size() == 1);
    SourceKey gone{{"ETABLISSEMENT", "e1"}, {"ETABLISSEMENT", "e1"}, {"SERVICE", "s2"}};
    CHECK_FALSE(s.store.object(s.oid("Etablissements", gone)).active());
    // The hospital's own organisation is a temporal property: its change is historized.
    CHECK(r.classes.at("Hôpitaux_Publics").historized == 1);
}
