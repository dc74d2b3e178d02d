#include "edw/source_schema.hpp"

#include "edw/lexer.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace edw {

std::string_view to_string(PropertyKind kind)
{
    switch (kind) {
    case PropertyKind::attribute: return "attribute";
    case PropertyKind::association: return "relationship";
    case PropertyKind::composition: return "composition";
    }
    return "?";
}

bool SourceProperty::same_definition(SourceProperty const &other) const
{
    return name == other.name && kind == other.kind && type == other.type && target == other.target &&
           cardinality == other.cardinality && inverse == other.inverse;
}

bool SourceProperty::operator==(SourceProperty const &other) const
{
    return same_definition(other) && declared_in == other.declared_in;
}

SourceProperty const *SourceInterface::own_property(std::string_view n) const
{
    for (auto const &p : properties)
        if (p.name == n)
            return &p;
    return nullptr;
}

namespace {

// Image is a built-in reference type, not an interface.
bool is_builtin_target(std::string const &name) { return name == "Image"; }

} // namespace

SourceSchema::SourceSchema(std::vector<SourceInterface> interfaces) : interfaces_(std::move(interfaces))
{
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < interfaces_.size(); ++i) {
        auto &iface = interfaces_[i];
        if (!index.emplace(iface.name, i).second)
            throw Error(ErrorKind::DuplicateId, "interface '" + iface.name + "' declared twice", iface.pos);
        for (auto &p : iface.properties)
            p.declared_in = iface.name;
    }
    for (auto const &iface : interfaces_) {
        for (auto const &s : iface.supers)
            if (!index.count(s))
                throw Error(ErrorKind::UnknownInterface,
                            "interface '" + iface.name + "' extends unknown interface '" + s + "'", iface.pos);
        for (auto const &p : iface.properties)
            if (p.is_relation() && !index.count(p.target))
                throw Error(ErrorKind::UnknownInterface,
                            iface.name + "::" + p.name + " targets unknown interface '" + p.target + "'", p.pos);
    }

    // Cycle check and flattening, depth-first with colors.
    flattened_.resize(interfaces_.size());
    std::vector<int> color(interfaces_.size(), 0);
    std::function<void(std::size_t)> visit = [&](std::size_t i) {
        if (color[i] == 2)
            return;
        if (color[i] == 1)
            throw Error(ErrorKind::InheritanceCycle, "inheritance cycle through '" + interfaces_[i].name + "'",
                        interfaces_[i].pos);
        color[i] = 1;
        std::vector<SourceProperty> flat;
        auto add = [&](SourceProperty const &p) {
            auto it = std::find_if(flat.begin(), flat.end(), [&](auto const &q) { return q.name == p.name; });
            if (it == flat.end()) {
                flat.push_back(p);
            } else if (!it->same_definition(p)) {
                throw Error(ErrorKind::PropertyConflict,
                            "property '" + p.name + "' of '" + interfaces_[i].name + "' conflicts between '" +
                                it->declared_in + "' and '" + p.declared_in + "'",
                            p.pos);
            }
        };
        for (auto const &s : interfaces_[i].supers) {
            std::size_t j = index.at(s);
            visit(j);
            for (auto const &p : flattened_[j])
                add(p);
        }
        for (auto const &p : interfaces_[i].properties)
            add(p);
        flattened_[i] = std::move(flat);
        color[i] = 2;
    };
    for (std::size_t i = 0; i < interfaces_.size(); ++i)
        visit(i);

    for (auto const &iface : interfaces_) {
        for (auto const &p : iface.properties) {
            if (!p.inverse)
                continue;
            auto const &inv = *p.inverse;
            auto where = iface.name + "::" + p.name;
            if (inv.interface != p.target)
                throw Error(ErrorKind::InverseMismatch,
                            where + " declares inverse on '" + inv.interface + "' but targets '" + p.target + "'", p.pos);
            auto const *back = find_property(inv.interface, inv.property);
            if (!back || !back->is_relation())
                throw Error(ErrorKind::InverseMismatch,
                            where + ": inverse " + inv.interface + "::" + inv.property + " does not exist", p.pos);
            if (!extends(iface.name, back->target) || !back->inverse || back->inverse->property != p.name)
                throw Error(ErrorKind::InverseMismatch,
                            where + ": " + inv.interface + "::" + inv.property + " does not declare it as inverse",
                            p.pos);
        }
    }
}

SourceInterface const *SourceSchema::find(std::string_view name) const
{
    for (auto const &i : interfaces_)
        if (i.name == name)
            return &i;
    return nullptr;
}

SourceInterface const &SourceSchema::get(std::string_view name) const
{
    if (auto const *i = find(name))
        return *i;
    throw Error(ErrorKind::UnknownInterface, "unknown source interface '" + std::string(name) + "'");
}

std::vector<SourceProperty> SourceSchema::flatten(std::string_view name) const
{
    for (std::size_t i = 0; i < interfaces_.size(); ++i)
        if (interfaces_[i].name == name)
            return flattened_[i];
    throw Error(ErrorKind::UnknownInterface, "unknown source interface '" + std::string(name) + "'");
}

SourceProperty const *SourceSchema::find_property(std::string_view interface, std::string_view property) const
{
    for (std::size_t i = 0; i < interfaces_.size(); ++i) {
        if (interfaces_[i].name != interface)
            continue;
        for (auto const &p : flattened_[i])
            if (p.name == property)
                return &p;
        return nullptr;
    }
    return nullptr;
}

bool SourceSchema::extends(std::string_view sub, std::string_view base) const
{
    if (sub == base)
        return true;
    auto const *iface = find(sub);
    if (!iface)
        return false;
    return std::any_of(iface->supers.begin(), iface->supers.end(), [&](auto const &s) { return extends(s, base); });
}

std::vector<std::string> SourceSchema::family(std::string_view name) const
{
    std::vector<std::string> out{std::string(name)};
    std::vector<std::string> subs;
    for (auto const &i : interfaces_)
        if (i.name != name && extends(i.name, name))
            subs.push_back(i.name);
    std::sort(subs.begin(), subs.end());
    out.insert(out.end(), subs.begin(), subs.end());
    return out;
}

Type parse_type(TokenStream &tokens)
{
    Token const &t = tokens.peek();
    if (t.is_word("Set")) {
        tokens.next();
        tokens.expect(Token::Kind::Less, "'<'");
        Type element = parse_type(tokens);
        tokens.expect(Token::Kind::Greater, "'>'");
        return Type::set_of(std::move(element));
    }
    if (t.is_word("Struct")) {
        tokens.next();
        std::string name = tokens.expect_identifier("struct name").text;
        tokens.expect(Token::Kind::LBrace, "'{'");
        std::vector<std::string> names;
        std::vector<Type> types;
        do {
            Type ft = parse_type(tokens);
            Token const &fname = tokens.expect_identifier("field name");
            if (std::find(names.begin(), names.end(), fname.text) != names.end())
                throw Error(ErrorKind::SyntaxError, "duplicate struct field '" + fname.text + "'", fname.pos);
            names.push_back(fname.text);
            types.push_back(std::move(ft));
        } while (tokens.accept(Token::Kind::Comma));
        tokens.expect(Token::Kind::RBrace, "'}'");
        return Type::structure(std::move(name), std::move(names), std::move(types));
    }
    Type::Kind kind;
    if (t.is(Token::Kind::Identifier) && scalar_kind_from_keyword(t.text, kind)) {
        tokens.next();
        return Type::scalar(kind);
    }
    tokens.fail("type");
}

void parse_relation_target(TokenStream &tokens, std::string &target, Cardinality &cardinality)
{
    cardinality = tokens.accept_word("Set") ? Cardinality::many : Cardinality::one;
    tokens.expect(Token::Kind::Less, "'<'");
    target = tokens.expect_identifier("target name").text;
    tokens.expect(Token::Kind::Greater, "'>'");
}

namespace {

std::string skip_operation_params(TokenStream &tokens)
{
    std::string params;
    tokens.expect(Token::Kind::LParen, "'('");
    int depth = 1;
    while (depth > 0) {
        Token const &t = tokens.next();
        if (t.is(Token::Kind::End))
            tokens.fail_at(t, "')'");
        if (t.is(Token::Kind::LParen))
            ++depth;
        if (t.is(Token::Kind::RParen) && --depth == 0)
            break;
        if (!params.empty())
            params += ' ';
        params += t.is(Token::Kind::String) ? quote_string(t.text) : t.text;
    }
    return params;
}

SourceInterface parse_interface(TokenStream &tokens)
{
    SourceInterface iface;
    iface.pos = tokens.expect_word("interface").pos;
    iface.name = tokens.expect_identifier("interface name").text;
    if (tokens.accept(Token::Kind::LParen)) {
        tokens.expect_word("extend");
        do
            iface.supers.push_back(tokens.expect_identifier("interface name").text);
        while (tokens.accept(Token::Kind::Comma));
        tokens.expect(Token::Kind::RParen, "')'");
    }
    tokens.expect(Token::Kind::LBrace, "'{'");
    while (!tokens.accept(Token::Kind::RBrace)) {
        Token const &head = tokens.peek();
        SourceProperty prop;
        prop.pos = head.pos;
        if (head.is_word("attribute")) {
            tokens.next();
            prop.type = parse_type(tokens);
        } else if (head.is_word("relationship") || head.is_word("composition")) {
            bool composition = head.is_word("composition");
            tokens.next();
            parse_relation_target(tokens, prop.target, prop.cardinality);
            if (is_builtin_target(prop.target)) {
                // Set<Image> references are opaque strings, i.e. an attribute.
                Type ref = Type::scalar(Type::Kind::Image);
                prop.type = prop.cardinality == Cardinality::many ? Type::set_of(ref) : ref;
                prop.target.clear();
                prop.cardinality = Cardinality::one;
            } else {
                prop.kind = composition ? PropertyKind::composition : PropertyKind::association;
            }
        } else if (head.is(Token::Kind::Identifier)) {
            // Return types may name interfaces or void; only the spelling is kept.
            Type::Kind scalar;
            std::string ret;
            if (head.is_word("Set") || head.is_word("Struct") || scalar_kind_from_keyword(head.text, scalar))
                ret = format_type(parse_type(tokens));
            else
                ret = tokens.next().text;
            SourceOperation op;
            op.name = tokens.expect_identifier("operation name").text;
            op.signature = ret + " " + op.name + "(" + skip_operation_params(tokens) + ")";
            tokens.expect(Token::Kind::Semicolon, "';'");
            iface.operations.push_back(std::move(op));
            continue;
        } else {
            tokens.fail("member declaration or '}'");
        }
        Token const &name = tokens.expect_identifier("property name");
        prop.name = name.text;
        if (prop.is_relation() && tokens.accept_word("inverse")) {
            if (prop.kind == PropertyKind::composition)
                tokens.fail_at(tokens.peek(), "';' (compositions have no inverse)");
            InverseRef inv;
            inv.interface = tokens.expect_identifier("interface name").text;
            tokens.expect(Token::Kind::DoubleColon, "'::'");
            inv.property = tokens.expect_identifier("property name").text;
            prop.inverse = inv;
        }
        tokens.expect(Token::Kind::Semicolon, "';'");
        if (iface.own_property(prop.name))
            throw Error(ErrorKind::SyntaxError, "duplicate property '" + prop.name + "'", name.pos);
        iface.properties.push_back(std::move(prop));
    }
    tokens.accept(Token::Kind::Semicolon);
    return iface;
}

} // namespace

SourceSchema parse_source_schema(std::string_view text)
{
    TokenStream tokens(tokenize(text));
    std::vector<SourceInterface> interfaces;
    while (!tokens.at_end())
        interfaces.push_back(parse_interface(tokens));
    return SourceSchema(std::move(interfaces));
}

std::string print_source_schema(SourceSchema const &schema)
{
    std::ostringstream out;
    bool first = true;
    for (auto const &iface : schema.interfaces()) {
        if (!first)
            out << '\n';
        first = false;
        out << "interface " << iface.name;
        if (!iface.supers.empty()) {
            out << " (extend ";
            for (std::size_t i = 0; i < iface.supers.size(); ++i)
                out << (i ? ", " : "") << iface.supers[i];
            out << ')';
        }
        out << " {\n";
        for (auto const &p : iface.properties) {
            out << "    " << to_string(p.kind) << ' ';
            if (p.is_relation())
                out << (p.cardinality == Cardinality::many ? "Set" : "") << '<' << p.target << '>';
            else
                out << format_type(p.type);
            out << ' ' << p.name;
            if (p.inverse)
                out << " inverse " << p.inverse->interface << "::" << p.inverse->property;
            out << ";\n";
        }
        for (auto const &op : iface.operations)
            out << "    " << op.signature << ";\n";
        out << "}\n";
    }
    return out.str();
}

} // namespace edw
