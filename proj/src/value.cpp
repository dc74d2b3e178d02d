#include "edw/value.hpp"

#include "edw/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace edw {

Type Type::scalar(Kind kind)
{
    Type t;
    t.kind_ = kind;
    return t;
}

Type Type::structure(std::string name, std::vector<std::string> field_names, std::vector<Type> field_types)
{
    Type t;
    t.kind_ = Kind::Struct;
    t.struct_name_ = std::move(name);
    t.field_names_ = std::move(field_names);
    t.field_types_ = std::move(field_types);
    return t;
}

Type Type::set_of(Type element)
{
    Type t;
    t.kind_ = Kind::Set;
    t.element_.push_back(std::move(element));
    return t;
}

Type const *Type::field(std::string const &name) const
{
    for (std::size_t i = 0; i < field_names_.size(); ++i)
        if (field_names_[i] == name)
            return &field_types_[i];
    return nullptr;
}

namespace {

struct Keyword {
    char const *word;
    Type::Kind kind;
};

constexpr Keyword kScalarKeywords[] = {
    {"String", Type::Kind::String}, {"Short", Type::Kind::Short}, {"Long", Type::Kind::Long},
    {"Double", Type::Kind::Double}, {"Date", Type::Kind::Date},   {"Image", Type::Kind::Image},
};

} // namespace

bool scalar_kind_from_keyword(std::string const &word, Type::Kind &out)
{
    for (auto const &k : kScalarKeywords)
        if (word == k.word) {
            out = k.kind;
            return true;
        }
    return false;
}

std::string format_type(Type const &type)
{
    switch (type.kind()) {
    case Type::Kind::Struct: {
        std::string out = "Struct " + type.struct_name() + " { ";
        for (std::size_t i = 0; i < type.field_names().size(); ++i) {
            if (i)
                out += ", ";
            out += format_type(type.field_types()[i]) + " " + type.field_names()[i];
        }
        return out + " }";
    }
    case Type::Kind::Set:
        return "Set<" + format_type(type.element()) + ">";
    default:
        for (auto const &k : kScalarKeywords)
            if (k.kind == type.kind())
                return k.word;
    }
    return "?";
}

std::string format_source_key(SourceKey const &key)
{
    std::string out;
    for (std::size_t i = 0; i < key.size(); ++i) {
        if (i)
            out += "+";
        out += key[i].interface + ":" + key[i].id;
    }
    return out;
}

Value Value::integer(std::int64_t v)
{
    Value out;
    out.data_ = v;
    return out;
}

Value Value::real(double v)
{
    Value out;
    out.data_ = v;
    return out;
}

Value Value::string(std::string v)
{
    Value out;
    out.data_ = std::move(v);
    return out;
}

Value Value::structure(Struct fields)
{
    Value out;
    out.data_ = std::move(fields);
    return out;
}

Value Value::set(std::vector<Value> items)
{
    std::sort(items.begin(), items.end());
    items.erase(std::unique(items.begin(), items.end()), items.end());
    Value out;
    out.data_ = Set{std::move(items)};
    return out;
}

Value Value::links(std::vector<SourceLink> items)
{
    std::sort(items.begin(), items.end());
    items.erase(std::unique(items.begin(), items.end()), items.end());
    Value out;
    out.data_ = Links{std::move(items)};
    return out;
}

Value Value::oids(std::vector<Oid> items)
{
    std::sort(items.begin(), items.end());
    items.erase(std::unique(items.begin(), items.end()), items.end());
    Value out;
    out.data_ = Oids{std::move(items)};
    return out;
}

namespace {

template <typename T>
int three_way(T const &a, T const &b)
{
    return a < b ? -1 : (b < a ? 1 : 0);
}

template <typename Seq>
int compare_seq(Seq const &a, Seq const &b)
{
    std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
        int c;
        if constexpr (std::is_same_v<typename Seq::value_type, Value>)
            c = compare(a[i], b[i]);
        else
            c = three_way(a[i], b[i]);
        if (c)
            return c;
    }
    return three_way(a.size(), b.size());
}

} // namespace

int compare(Value const &a, Value const &b)
{
    if (a.data_.index() != b.data_.index())
        return three_way(a.data_.index(), b.data_.index());
    return std::visit(
        [&](auto const &lhs) -> int {
            using T = std::decay_t<decltype(lhs)>;
            auto const &rhs = std::get<T>(b.data_);
            if constexpr (std::is_same_v<T, Value::Null>) {
                return 0;
            } else if constexpr (std::is_same_v<T, Value::Struct>) {
                auto ia = lhs.begin();
                auto ib = rhs.begin();
                for (; ia != lhs.end() && ib != rhs.end(); ++ia, ++ib) {
                    if (int c = three_way(ia->first, ib->first))
                        return c;
                    if (int c = compare(ia->second, ib->second))
                        return c;
                }
                return three_way(lhs.size(), rhs.size());
            } else if constexpr (std::is_same_v<T, Value::Set> || std::is_same_v<T, Value::Links> ||
                                 std::is_same_v<T, Value::Oids>) {
                return compare_seq(lhs.items, rhs.items);
            } else {
                return three_way(lhs, rhs);
            }
        },
        a.data_);
}

nlohmann::json to_json(Value const &value)
{
    using nlohmann::json;
    if (value.is_null())
        return nullptr;
    if (value.is_integer())
        return value.as_integer();
    if (value.is_real())
        return value.as_real();
    if (value.is_string())
        return value.as_string();
    if (value.is_struct()) {
        json out = json::object();
        for (auto const &[k, v] : value.as_struct())
            out[k] = to_json(v);
        return out;
    }
    if (value.is_set()) {
        json out = json::array();
        for (auto const &v : value.as_set())
            out.push_back(to_json(v));
        return out;
    }
    if (value.is_oids()) {
        json ids = json::array();
        for (auto oid : value.as_oids())
            ids.push_back(oid.value);
        return json{{"$oids", ids}};
    }
    json links = json::array();
    for (auto const &l : value.as_links())
        links.push_back(json::array({l.interface, l.id}));
    return json{{"$links", links}};
}

Value value_from_json(nlohmann::json const &json)
{
    switch (json.type()) {
    case nlohmann::json::value_t::null: return Value::null();
    case nlohmann::json::value_t::boolean: throw Error(ErrorKind::TypeMismatch, "boolean values are not supported");
    case nlohmann::json::value_t::number_integer: return Value::integer(json.get<std::int64_t>());
    case nlohmann::json::value_t::number_unsigned: return Value::integer(static_cast<std::int64_t>(json.get<std::uint64_t>()));
    case nlohmann::json::value_t::number_float: return Value::real(json.get<double>());
    case nlohmann::json::value_t::string: return Value::string(json.get<std::string>());
    case nlohmann::json::value_t::array: {
        std::vector<Value> items;
        for (auto const &item : json)
            items.push_back(value_from_json(item));
        return Value::set(std::move(items));
    }
    case nlohmann::json::value_t::object: {
        if (json.size() == 1 && json.contains("$oids")) {
            std::vector<Oid> ids;
            for (auto const &id : json.at("$oids"))
                ids.push_back(Oid{id.get<std::uint64_t>()});
            return Value::oids(std::move(ids));
        }
        if (json.size() == 1 && json.contains("$links")) {
            std::vector<SourceLink> links;
            for (auto const &l : json.at("$links"))
                links.push_back({l.at(0).get<std::string>(), l.at(1).get<std::string>()});
            return Value::links(std::move(links));
        }
        Value::Struct fields;
        for (auto const &[k, v] : json.items())
            fields.emplace(k, value_from_json(v));
        return Value::structure(std::move(fields));
    }
    default: throw Error(ErrorKind::TypeMismatch, "unsupported JSON value");
    }
}

nlohmann::json to_json(StateValue const &value)
{
    nlohmann::json out = nlohmann::json::object();
    for (auto const &[k, v] : value)
        out[k] = to_json(v);
    return out;
}

StateValue state_value_from_json(nlohmann::json const &json)
{
    StateValue out;
    for (auto const &[k, v] : json.items())
        out.emplace(k, value_from_json(v));
    return out;
}

std::string format_value(Value const &value) { return to_json(value).dump(); }

namespace {

bool is_date(std::string const &s)
{
    auto digits = [&](std::size_t from, std::size_t n) {
        for (std::size_t i = from; i < from + n; ++i)
            if (s[i] < '0' || s[i] > '9')
                return false;
        return true;
    };
    if (s.size() != 10 || s[4] != '-' || s[7] != '-' || !digits(0, 4) || !digits(5, 2) || !digits(8, 2))
        return false;
    int month = std::stoi(s.substr(5, 2));
    int day = std::stoi(s.substr(8, 2));
    return month >= 1 && month <= 12 && day >= 1 && day <= 31;
}

[[noreturn]] void mismatch(std::string const &what, Type const &type, nlohmann::json const &json)
{
    throw Error(ErrorKind::TypeMismatch, what + ": expected " + format_type(type) + ", got " + json.dump());
}

} // namespace

Value typed_value_from_json(nlohmann::json const &json, Type const &type, std::string const &what)
{
    if (json.is_null())
        return Value::null();
    switch (type.kind()) {
    case Type::Kind::String:
    case Type::Kind::Image:
        if (!json.is_string())
            mismatch(what, type, json);
        return Value::string(json.get<std::string>());
    case Type::Kind::Date:
        if (!json.is_string() || !is_date(json.get<std::string>()))
            mismatch(what, type, json);
        return Value::string(json.get<std::string>());
    case Type::Kind::Short:
    case Type::Kind::Long: {
        if (!json.is_number_integer())
            mismatch(what, type, json);
        std::int64_t v = json.is_number_unsigned() ? static_cast<std::int64_t>(json.get<std::uint64_t>())
                                                    : json.get<std::int64_t>();
        if (type.kind() == Type::Kind::Short &&
            (v < std::numeric_limits<std::int16_t>::min() || v > std::numeric_limits<std::int16_t>::max()))
            mismatch(what, type, json);
        return Value::integer(v);
    }
    case Type::Kind::Double: {
        if (!json.is_number())
            mismatch(what, type, json);
        double v = json.get<double>();
        if (!std::isfinite(v))
            mismatch(what, type, json);
        return Value::real(v);
    }
    case Type::Kind::Struct: {
        if (!json.is_object())
            mismatch(what, type, json);
        Value::Struct fields;
        for (auto const &[k, v] : json.items())
            if (!type.field(k))
                throw Error(ErrorKind::TypeMismatch, what + ": unknown struct field '" + k + "'");
        for (std::size_t i = 0; i < type.field_names().size(); ++i) {
            auto const &name = type.field_names()[i];
            auto it = json.find(name);
            fields.emplace(name, it == json.end() ? Value::null()
                                                  : typed_value_from_json(*it, type.field_types()[i], what + "." + name));
        }
        return Value::structure(std::move(fields));
    }
    case Type::Kind::Set: {
        if (!json.is_array())
            mismatch(what, type, json);
        std::vector<Value> items;
        for (auto const &item : json)
            items.push_back(typed_value_from_json(item, type.element(), what + "[]"));
        return Value::set(std::move(items));
    }
    }
    mismatch(what, type, json);
}

} // namespace edw
