#include "edw/warehouse_def.hpp"

#include "edw/lexer.hpp"

#include <sstream>

namespace edw {

ClassDecl const *WarehouseDef::find_class(std::string_view n) const
{
    for (auto const &c : classes)
        if (c.name == n)
            return &c;
    return nullptr;
}

MappingDecl const *WarehouseDef::find_mapping(std::string_view n) const
{
    for (auto const &m : mappings)
        if (m.class_name == n)
            return &m;
    return nullptr;
}

namespace {

struct MemberKeyword {
    Origin origin;
    bool explicit_origin;
    PropertyKind kind;
};

bool member_keyword(std::string const &word, MemberKeyword &out)
{
    std::string rest = word;
    out.explicit_origin = true;
    if (word.rfind("D_", 0) == 0)
        out.origin = Origin::derived;
    else if (word.rfind("C_", 0) == 0)
        out.origin = Origin::computed;
    else if (word.rfind("S_", 0) == 0)
        out.origin = Origin::specific;
    else {
        out.origin = Origin::derived;
        out.explicit_origin = false;
    }
    if (out.explicit_origin)
        rest = word.substr(2);
    if (rest == "attribute")
        out.kind = PropertyKind::attribute;
    else if (rest == "relationship")
        out.kind = PropertyKind::association;
    else if (rest == "composition")
        out.kind = PropertyKind::composition;
    else
        return false;
    return true;
}

std::vector<std::string> parse_names(TokenStream &tokens, std::string_view what)
{
    std::vector<std::string> out;
    do
        out.push_back(tokens.expect_identifier(what).text);
    while (tokens.accept(Token::Kind::Comma));
    return out;
}

std::int64_t parse_count(TokenStream &tokens)
{
    Token const &t = tokens.expect(Token::Kind::Integer, "count");
    std::int64_t v = std::stoll(t.text);
    if (v < 0)
        throw Error(ErrorKind::SyntaxError, "count must be non-negative", t.pos);
    return v;
}

Period parse_period(TokenStream &tokens)
{
    Period p;
    p.count = parse_count(tokens);
    Token const &unit = tokens.expect_identifier("time unit");
    try {
        p.unit = parse_unit(unit.text);
    } catch (Error const &) {
        throw Error(ErrorKind::SyntaxError, "unknown time unit '" + unit.text + "'", unit.pos);
    }
    return p;
}

ConfigDecl parse_config(TokenStream &tokens)
{
    ConfigDecl decl;
    decl.pos = tokens.expect_word("config").pos;
    tokens.expect(Token::Kind::LBrace, "'{'");
    while (!tokens.accept(Token::Kind::RBrace)) {
        if (tokens.accept_word("refresh"))
            decl.config.refresh_period = parse_period(tokens);
        else if (tokens.accept_word("keep_past"))
            decl.config.keep_past_count = parse_count(tokens);
        else if (tokens.accept_word("keep_duration"))
            decl.config.keep_past_duration = parse_period(tokens);
        else
            tokens.fail("'refresh', 'keep_past', 'keep_duration' or '}'");
        tokens.expect(Token::Kind::Semicolon, "';'");
    }
    tokens.accept(Token::Kind::Semicolon);
    return decl;
}

FiltersDecl parse_filters(TokenStream &tokens)
{
    FiltersDecl f;
    f.pos = tokens.expect_word("with").pos;
    tokens.expect_word("filters");
    tokens.expect(Token::Kind::LBrace, "'{'");
    while (!tokens.accept(Token::Kind::RBrace)) {
        if (tokens.accept_word("temporal")) {
            auto names = parse_names(tokens, "property name");
            f.temporal.insert(f.temporal.end(), names.begin(), names.end());
        } else if (tokens.accept_word("archive")) {
            do {
                ArchiveDecl a;
                Token const &fn = tokens.expect_identifier("archive function");
                a.pos = fn.pos;
                if (!parse_archive_fn(fn.text, a.fn))
                    throw Error(ErrorKind::UnknownFunction, "unknown archive function '" + fn.text + "'", fn.pos);
                tokens.expect(Token::Kind::LParen, "'('");
                a.property = tokens.expect_identifier("property name").text;
                tokens.expect(Token::Kind::RParen, "')'");
                f.archive.push_back(std::move(a));
            } while (tokens.accept(Token::Kind::Comma));
        } else {
            tokens.fail("'temporal', 'archive' or '}'");
        }
        tokens.expect(Token::Kind::Semicolon, "';'");
    }
    return f;
}

ClassDecl parse_class(TokenStream &tokens)
{
    ClassDecl c;
    c.pos = tokens.expect_word("interface").pos;
    c.name = tokens.expect_identifier("class name").text;
    if (tokens.accept(Token::Kind::LParen)) {
        tokens.expect_word("extend");
        c.supers = parse_names(tokens, "class name");
        tokens.expect(Token::Kind::RParen, "')'");
    }
    tokens.expect(Token::Kind::LBrace, "'{'");
    while (!tokens.accept(Token::Kind::RBrace)) {
        Token const &head = tokens.peek();
        if (!head.is(Token::Kind::Identifier))
            tokens.fail("member declaration or '}'");
        MemberKeyword kw;
        if (!member_keyword(head.text, kw)) {
            // Operation: TYPE name(...);  kept by name only.
            Type::Kind scalar;
            std::string ret;
            if (head.is_word("Set") || head.is_word("Struct") || scalar_kind_from_keyword(head.text, scalar))
                ret = format_type(parse_type(tokens));
            else
                ret = tokens.next().text;
            SourceOperation op;
            op.name = tokens.expect_identifier("operation name").text;
            tokens.expect(Token::Kind::LParen, "'('");
            tokens.expect(Token::Kind::RParen, "')'");
            tokens.expect(Token::Kind::Semicolon, "';'");
            op.signature = ret + " " + op.name + "()";
            c.operations.push_back(std::move(op));
            continue;
        }
        tokens.next();
        PropertyDecl decl;
        decl.explicit_origin = kw.explicit_origin;
        PropertyDef &p = decl.def;
        p.origin = kw.origin;
        p.kind = kw.kind;
        p.pos = head.pos;
        if (p.origin == Origin::computed && p.is_relation())
            throw Error(ErrorKind::SyntaxError, "computed properties must be attributes", head.pos);
        if (p.is_relation())
            parse_relation_target(tokens, p.target, p.cardinality);
        else
            p.type = parse_type(tokens);
        p.name = tokens.expect_identifier("property name").text;
        if (p.kind == PropertyKind::association && tokens.accept_word("inverse")) {
            InverseRef inv;
            inv.interface = tokens.expect_identifier("class name").text;
            tokens.expect(Token::Kind::DoubleColon, "'::'");
            inv.property = tokens.expect_identifier("property name").text;
            p.inverse = inv;
        }
        tokens.expect(Token::Kind::Semicolon, "';'");
        c.properties.push_back(std::move(decl));
    }
    tokens.accept(Token::Kind::Semicolon);
    if (tokens.peek().is_word("with"))
        c.filters = parse_filters(tokens);
    tokens.accept(Token::Kind::Semicolon);
    return c;
}

EnvironmentDecl parse_environment(TokenStream &tokens)
{
    EnvironmentDecl env;
    env.pos = tokens.next().pos; // 'environment' or 'Environment'
    env.name = tokens.expect_identifier("environment name").text;
    tokens.expect(Token::Kind::LBrace, "'{'");
    while (!tokens.accept(Token::Kind::RBrace)) {
        if (tokens.accept_word("class")) {
            auto names = parse_names(tokens, "class name");
            env.classes.insert(env.classes.end(), names.begin(), names.end());
            tokens.expect(Token::Kind::Semicolon, "';'");
        } else if (tokens.peek().is_word("config")) {
            if (env.config)
                tokens.fail("'class' or '}' (config already given)");
            env.config = parse_config(tokens);
        } else {
            tokens.fail("'class', 'config' or '}'");
        }
    }
    tokens.accept(Token::Kind::Semicolon);
    return env;
}

} // namespace

WarehouseDef parse_warehouse_def(std::string_view text)
{
    TokenStream tokens(tokenize(text));
    WarehouseDef def;
    while (!tokens.at_end()) {
        Token const &head = tokens.peek();
        if (head.is_word("interface")) {
            def.classes.push_back(parse_class(tokens));
        } else if (head.is_word("environment") || head.is_word("Environment")) {
            def.environments.push_back(parse_environment(tokens));
        } else if (head.is_word("config")) {
            if (def.config)
                tokens.fail("declaration (warehouse config already given)");
            def.config = parse_config(tokens);
        } else if (head.is_word("mapping")) {
            MappingDecl m;
            m.pos = tokens.next().pos;
            m.class_name = tokens.expect_identifier("class name").text;
            tokens.expect(Token::Kind::Equal, "'='");
            m.expr = parse_mapping(tokens);
            tokens.expect(Token::Kind::Semicolon, "';'");
            def.mappings.push_back(std::move(m));
        } else if (head.is_word("warehouse")) {
            tokens.next();
            def.name = tokens.expect_identifier("warehouse name").text;
            tokens.expect(Token::Kind::Semicolon, "';'");
        } else {
            tokens.fail("'interface', 'environment', 'config', 'mapping' or 'warehouse'");
        }
    }
    return def;
}

namespace {

void print_config(std::ostream &out, RetentionConfig const &c, std::string const &indent)
{
    out << indent << "config {\n";
    if (c.refresh_period)
        out << indent << "    refresh " << c.refresh_period->count << ' ' << to_string(c.refresh_period->unit) << ";\n";
    if (c.keep_past_count)
        out << indent << "    keep_past " << *c.keep_past_count << ";\n";
    if (c.keep_past_duration)
        out << indent << "    keep_duration " << c.keep_past_duration->count << ' '
            << to_string(c.keep_past_duration->unit) << ";\n";
    out << indent << "}\n";
}

void print_names(std::ostream &out, std::vector<std::string> const &names)
{
    for (std::size_t i = 0; i < names.size(); ++i)
        out << (i ? ", " : "") << names[i];
}

} // namespace

std::string print_warehouse_def(WarehouseDef const &def)
{
    std::ostringstream out;
    if (!def.name.empty())
        out << "warehouse " << def.name << ";\n\n";
    if (def.config) {
        print_config(out, def.config->config, "");
        out << '\n';
    }
    for (auto const &c : def.classes) {
        out << "interface " << c.name;
        if (!c.supers.empty()) {
            out << " (extend ";
            print_names(out, c.supers);
            out << ')';
        }
        out << " {\n";
        for (auto const &p : c.properties) {
            std::string line = format_property(p.def);
            if (!p.explicit_origin)
                line = line.substr(2);
            out << "    " << line << ";\n";
        }
        for (auto const &op : c.operations)
            out << "    " << op.signature << ";\n";
        out << "}\n";
        if (c.filters) {
            out << "with filters {\n";
            if (!c.filters->temporal.empty()) {
                out << "    temporal ";
                print_names(out, c.filters->temporal);
                out << ";\n";
            }
            if (!c.filters->archive.empty()) {
                out << "    archive ";
                for (std::size_t i = 0; i < c.filters->archive.size(); ++i)
                    out << (i ? ", " : "") << to_string(c.filters->archive[i].fn) << '('
                        << c.filters->archive[i].property << ')';
                out << ";\n";
            }
            out << "}\n";
        }
        out << '\n';
    }
    for (auto const &env : def.environments) {
        out << "environment " << env.name << " {\n    class ";
        print_names(out, env.classes);
        out << ";\n";
        if (env.config)
            print_config(out, env.config->config, "    ");
        out << "}\n\n";
    }
    for (auto const &m : def.mappings)
        out << "mapping " << m.class_name << " = " << print_mapping(m.expr) << ";\n";
    return out.str();
}

} // namespace edw
