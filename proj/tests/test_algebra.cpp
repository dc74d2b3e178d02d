#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "algebra_oracle.hpp"
#include "support.hpp"

using namespace edw;
using oracle::Row;

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

} // namespace

using oracle::World;

TEST_CASE("project, hide, select, join and augment agree with brute-force oracles")
{
    std::mt19937 rng(7321);
    oracle::Tally t;
    for (int round = 0; round < 1000; ++round)
        oracle::run_round(rng, t);
    CHECK(t.project == 0);
    CHECK(t.hide == 0);
    CHECK(t.select == 0);
    CHECK(t.join == 0);
    CHECK(t.augment == 0);
}

TEST_CASE("augment infers aggregate types")
{
    World w(oracle::Instance{});
    auto b = w.eval("augment(c := count(a.bs), s := sum(a.n), hi := max(a.bs.w), lo := min(a.x), z : Short, a: A)");
    auto type_of = [&](std::string const &n) { return b.structure[*b.index_of(n)].def.type.kind(); };
    CHECK(type_of("c") == Type::Kind::Long);
    CHECK(type_of("s") == Type::Kind::Double);
    CHECK(type_of("hi") == Type::Kind::Long);
    CHECK(type_of("lo") == Type::Kind::Double);
    CHECK(type_of("z") == Type::Kind::Short);
    CHECK(b.structure[*b.index_of("c")].def.origin == Origin::computed);
    CHECK(b.structure[*b.index_of("z")].def.origin == Origin::specific);
    CHECK(kind_of([&] { w.eval("augment(c := count(a.n), a: A)"); }) == ErrorKind::TypeInferenceError);
    CHECK(kind_of([&] { w.eval("augment(c := avg(a.k), a: A)"); }) == ErrorKind::NonNumericAggregate);
    CHECK(kind_of([&] { w.eval("augment(n := count(a.bs), a: A)"); }) == ErrorKind::NameCollision);
}

TEST_CASE("operator errors")
{
    World w(oracle::Instance{});
    CHECK(kind_of([&] { w.eval("project(a.zz, a: A)"); }) == ErrorKind::UnknownProperty);
    CHECK(kind_of([&] { w.eval("hide(a.zz, a: A)"); }) == ErrorKind::UnknownProperty);
    CHECK(kind_of([&] { w.eval("select(a: A, a.zz = 1)"); }) == ErrorKind::UnknownPath);
    CHECK(kind_of([&] { w.eval("select(a: A, a.k < 1)"); }) == ErrorKind::TypeMismatchInPredicate);
    CHECK(kind_of([&] { w.eval("join(a: A, b: B, k = \"p\")"); }) == ErrorKind::AmbiguousProperty);
    CHECK(kind_of([&] { w.eval("join(a: A, a: B, true)"); }) == ErrorKind::NameCollision);
    CHECK(kind_of([&] { w.eval("select(a: Q, true)"); }) == ErrorKind::UnknownInterface);
    CHECK(kind_of([] { parse_mapping("frob(a: A)"); }) == ErrorKind::UnknownFunction);
    CHECK(kind_of([] { parse_mapping("select(a: A, a.n = )"); }) == ErrorKind::SyntaxError);
}

TEST_CASE("empty aggregates and identities")
{
    oracle::Instance in;
    in.as.push_back({"a0", "p", 1, 1.0, {}});
    World w(in);
    auto b = w.eval("augment(s := sum(a.bs.w), v := avg(a.bs.w), a: A)");
    REQUIRE(b.rows.size() == 1);
    CHECK(b.rows[0].values[4] == Value::real(0));
    CHECK(b.rows[0].values[5].is_null());
    CHECK(oracle::rows_of(w.eval("select(a: A, true)")) == oracle::rows_of(w.eval("a: A")));
    CHECK(w.eval("project(a.k, a.n, a.x, a.bs, a: A)").rows == w.eval("a: A").rows);
    CHECK(w.eval("join(a: A, b: B, true)").rows.empty());
}

TEST_CASE("medical extraction mappings")
{
    SourceSchema s = support::medical_source();
    Snapshot snap = support::snapshot_from_file(s, "snapshot_1990.jsonl", year_instant(1990));
    EvalContext ctx{&s, &snap};
    WarehouseDef def = support::medical_def();
    auto eval = [&](std::string const &cls) { return eval_extraction(def.find_mapping(cls)->expr, ctx); };

    auto chir = eval("Chirurgiens");
    CHECK(chir.structure.size() == 10);
    std::size_t surgeons = 0;
    for (auto const &[link, rec] : snap.records())
        surgeons += link.interface == "PRATICIEN" && rec.values.at("catégorie") == Value::string("chirurgie");
    CHECK(chir.rows.size() == surgeons);
    CHECK(chir.supers.empty());

    auto hop = eval("Hôpitaux_Publics");
    CHECK(hop.names() == std::vector<std::string>{"nom", "ville", "budget", "organisation", "nb_services",
                                                  "année_création"});
    std::size_t publics = 0;
    for (auto const &[link, rec] : snap.records())
        publics += link.interface == "ETABLISSEMENT" && rec.values.at("statut") == Value::string("public");
    REQUIRE(hop.rows.size() == publics);
    for (auto const &row : hop.rows) {
        auto const *rec = snap.find(row.key.front());
        CHECK(row.values[4] == Value::integer(static_cast<std::int64_t>(rec->links.at("organisation").size())));
        CHECK(row.values[5].is_null());
    }

    auto serv = eval("Services");
    CHECK(serv.names() == std::vector<std::string>{"nom", "équipe", "est_dirigé"});
    std::size_t pairs = 0;
    for (auto const &[link, rec] : snap.records())
        if (link.interface == "ETABLISSEMENT" && rec.values.at("statut") == Value::string("public"))
            pairs += rec.links.at("organisation").size();
    CHECK(serv.rows.size() == pairs);
}

TEST_CASE("generalize and specialize over class builds")
{
    std::mt19937 rng(99);
    World w(oracle::random_instance(rng));
    auto items = parse_mapping("generalize(x.k, x.n, a: A)").items;
    auto left = rename_binder(w.eval("select(a: A, a.n >= 0)"), "x");
    auto right = rename_binder(w.eval("select(a: A, a.n < 2)"), "x");
    auto g = eval_generalize(items, {left, right});
    CHECK(g.names() == std::vector<std::string>{"k", "n"});
    std::set<SourceKey> keys;
    for (auto const *b : {&left, &right})
        for (auto const &r : b->rows)
            keys.insert(r.key);
    std::set<SourceKey> got;
    for (auto const &r : g.rows)
        got.insert(r.key);
    CHECK(got == keys);
    CHECK(kind_of([&] { eval_generalize(parse_mapping("generalize(x.zz, a: A)").items, {left}); }) ==
          ErrorKind::NotCommonProperty);
    CHECK(kind_of([&] { eval_generalize(items, {}); }) == ErrorKind::EmptyOperands);

    EvalContext ctx{&w.schema, &w.snapshot};
    auto all = w.eval("a: A");
    auto t = eval_specialize(Predicate{}, {all}, ctx);
    CHECK(t.rows.size() == all.rows.size());
    auto sub = eval_specialize(parse_mapping("select(a: A, a.n >= 1)").predicate, {all}, ctx);
    for (auto const &r : sub.rows)
        CHECK(std::any_of(all.rows.begin(), all.rows.end(), [&](auto const &x) { return x.key == r.key; }));
}
