#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

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

json surgeon(std::string id, std::vector<std::string> services = {})
{
    return json{{"interface", "PRATICIEN"},
                {"id", id},
                {"values", {{"nom", "N" + id}, {"catégorie", "chirurgie"}, {"revenus", 100.0}}},
                {"links", {{"travaille", services}, {"dirige", json::array()}}}};
}

json service(std::string id, std::vector<std::string> team = {})
{
    return json{{"interface", "SERVICE"},
                {"id", id},
                {"values", {{"nom", "S" + id}}},
                {"links", {{"équipe", team}, {"est_dirigé", json::array()}}}};
}

} // namespace

TEST_CASE("the medical schema parses and flattens")
{
    SourceSchema s = support::medical_source();
    CHECK(s.interfaces().size() == 6);
    auto flat = s.flatten("PRATICIEN");
    REQUIRE(flat.size() == 10);
    CHECK(flat[0].name == "nom");
    CHECK(flat[0].declared_in == "PERSONNE");
    CHECK(flat[9].name == "dirige");
    CHECK(flat[9].cardinality == Cardinality::one);
    CHECK(s.extends("PATIENT", "PERSONNE"));
    CHECK_FALSE(s.extends("PERSONNE", "PATIENT"));
    CHECK(s.family("PERSONNE") == std::vector<std::string>{"PERSONNE", "PATIENT", "PRATICIEN"});
    auto const *adresse = s.find_property("PRATICIEN", "adresse");
    REQUIRE(adresse);
    CHECK(adresse->type.kind() == Type::Kind::Struct);
    CHECK(adresse->type.field("ville")->kind() == Type::Kind::String);
    CHECK(s.get("PERSONNE").operations.size() == 2);
}

TEST_CASE("printing and reparsing preserves the schema")
{
    SourceSchema s = support::medical_source();
    CHECK(parse_source_schema(print_source_schema(s)) == s);
}

TEST_CASE("schema errors")
{
    CHECK(kind_of([] { parse_source_schema("interface A { attribute Strin x; }"); }) == ErrorKind::SyntaxError);
    CHECK(kind_of([] { parse_source_schema("interface A (extend B) { }"); }) == ErrorKind::UnknownInterface);
    CHECK(kind_of([] {
              parse_source_schema("interface A { relationship <B> b inverse B::x; }\n"
                                  "interface B { relationship <A> a inverse A::b; }");
          }) == ErrorKind::InverseMismatch);
    try {
        parse_source_schema("interface A {\n  attribute String x\n}");
        FAIL("expected a syntax error");
    } catch (Error const &e) {
        CHECK(e.kind() == ErrorKind::SyntaxError);
        CHECK(e.pos().line == 3);
    }
}

TEST_CASE("snapshot ingestion types and checks records")
{
    SourceSchema s = support::medical_source();
    Snapshot snap = support::snapshot_from_file(s, "snapshot_1990.jsonl", year_instant(1990));
    CHECK(snap.size() == 12);
    auto const *p1 = snap.find({"PRATICIEN", "p1"});
    REQUIRE(p1);
    CHECK(p1->values.at("année_naissance") == Value::integer(1952));
    CHECK(p1->values.at("adresse").as_struct().at("ville") == Value::string("Toulouse"));
    CHECK(p1->links.at("travaille") == std::vector<SourceLink>{{"SERVICE", "s1"}});
    auto const *x1 = snap.find({"PATIENT", "x1"});
    REQUIRE(x1);
    CHECK(snap.extension(s, "PERSONNE").size() == 5);
    CHECK(snap.extension(s, "PRATICIEN").size() == 4);
    // Every line re-encodes canonically and reingests to the same record.
    std::vector<json> lines;
    for (auto const &[link, rec] : snap.records())
        lines.push_back(json::parse(record_to_line(rec)));
    CHECK(support::snapshot_from(s, lines, year_instant(1990)).records() == snap.records());
}

TEST_CASE("snapshot errors")
{
    SourceSchema s = support::medical_source();
    auto at = year_instant(1990);
    auto ingest = [&](std::vector<json> records) { return support::snapshot_from(s, records, at); };
    CHECK(kind_of([&] { ingest({json{{"interface", "NOPE"}, {"id", "a"}}}); }) == ErrorKind::UnknownInterface);
    CHECK(kind_of([&] {
              json r = surgeon("p1");
              r["values"]["revenus"] = "lots";
              ingest({r});
          }) == ErrorKind::TypeMismatch);
    CHECK(kind_of([&] { ingest({surgeon("p1", {"s9"})}); }) == ErrorKind::DanglingReference);
    CHECK(kind_of([&] { ingest({surgeon("p1", {"s1"}), service("s1")}); }) == ErrorKind::InverseViolation);
    CHECK(kind_of([&] { ingest({surgeon("p1"), surgeon("p1")}); }) == ErrorKind::DuplicateId);
    CHECK(kind_of([&] {
              auto org = [](std::string id) {
                  return json{{"interface", "ETABLISSEMENT"}, {"id", id}, {"values", json::object()},
                              {"links", {{"organisation", {"s1"}}}}};
              };
              ingest({org("e1"), org("e2"), service("s1")});
          }) == ErrorKind::CompositionShared);
    CHECK_NOTHROW(ingest({surgeon("p1", {"s1"}), service("s1", {"p1"})}));
    CHECK(ingest({}).size() == 0);
}

TEST_CASE("line numbers are reported for bad snapshot lines")
{
    SourceSchema s = support::medical_source();
    std::istringstream in(surgeon("p1").dump() + "\n\n{not json\n");
    try {
        ingest_snapshot(s, in, year_instant(1990));
        FAIL("expected an error");
    } catch (Error const &e) {
        CHECK(e.pos().line == 3);
    }
}
