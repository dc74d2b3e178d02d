#include "edw/mapping.hpp"

#include "edw/lexer.hpp"
#include "edw/source_schema.hpp"

#include <sstream>

namespace edw {

std::string Path::text() const
{
    std::string out;
    for (std::size_t i = 0; i < segments.size(); ++i) {
        if (i)
            out += '.';
        out += segments[i];
    }
    return out;
}

std::string_view to_string(CompareOp op)
{
    switch (op) {
    case CompareOp::eq: return "=";
    case CompareOp::ne: return "!=";
    case CompareOp::lt: return "<";
    case CompareOp::le: return "<=";
    case CompareOp::gt: return ">";
    case CompareOp::ge: return ">=";
    }
    return "?";
}

std::string_view to_string(AggregateFn fn)
{
    switch (fn) {
    case AggregateFn::count: return "count";
    case AggregateFn::sum: return "sum";
    case AggregateFn::avg: return "avg";
    case AggregateFn::max: return "max";
    case AggregateFn::min: return "min";
    }
    return "?";
}

bool parse_aggregate_fn(std::string_view name, AggregateFn &out)
{
    for (auto fn : {AggregateFn::count, AggregateFn::sum, AggregateFn::avg, AggregateFn::max, AggregateFn::min})
        if (to_string(fn) == name) {
            out = fn;
            return true;
        }
    return false;
}

std::string_view to_string(MappingKind kind)
{
    switch (kind) {
    case MappingKind::source: return "source";
    case MappingKind::project: return "project";
    case MappingKind::hide: return "hide";
    case MappingKind::augment: return "augment";
    case MappingKind::select: return "select";
    case MappingKind::join: return "join";
    case MappingKind::generalize: return "generalize";
    case MappingKind::specialize: return "specialize";
    }
    return "?";
}

namespace {

bool function_kind(std::string_view name, MappingKind &out)
{
    for (auto k : {MappingKind::project, MappingKind::hide, MappingKind::augment, MappingKind::select,
                   MappingKind::join, MappingKind::generalize, MappingKind::specialize})
        if (to_string(k) == name) {
            out = k;
            return true;
        }
    return false;
}

bool is_type_start(Token const &t)
{
    Type::Kind k;
    return t.is_word("Set") || t.is_word("Struct") || (t.is(Token::Kind::Identifier) && scalar_kind_from_keyword(t.text, k));
}

// An operand starts with "NAME :" (leaf) or "NAME (" (call).
bool at_operand(TokenStream const &tokens)
{
    return tokens.peek().is(Token::Kind::Identifier) &&
           (tokens.peek(1).is(Token::Kind::Colon) || tokens.peek(1).is(Token::Kind::LParen));
}

Path parse_path(TokenStream &tokens)
{
    Path p;
    Token const &first = tokens.expect_identifier("property path");
    p.pos = first.pos;
    p.segments.push_back(first.text);
    while (tokens.accept(Token::Kind::Dot))
        p.segments.push_back(tokens.expect_identifier("path segment").text);
    return p;
}

ProjectItem parse_item(TokenStream &tokens)
{
    ProjectItem item;
    item.path = parse_path(tokens);
    if (tokens.accept_word("as"))
        item.alias = tokens.expect_identifier("alias").text;
    return item;
}

Value parse_literal(TokenStream &tokens)
{
    Token const &t = tokens.peek();
    if (t.is(Token::Kind::String)) {
        tokens.next();
        return Value::string(t.text);
    }
    if (t.is(Token::Kind::Integer)) {
        tokens.next();
        return Value::integer(std::stoll(t.text));
    }
    if (t.is(Token::Kind::Real)) {
        tokens.next();
        return Value::real(std::stod(t.text));
    }
    if (t.is_word("null")) {
        tokens.next();
        return Value::null();
    }
    tokens.fail("literal");
}

Atom parse_atom(TokenStream &tokens)
{
    Atom atom;
    atom.path = parse_path(tokens);
    atom.pos = atom.path.pos;
    Token const &op = tokens.peek();
    if (op.is(Token::Kind::Contains) || op.is_word("contains")) {
        tokens.next();
        atom.kind = Atom::Kind::contains;
        atom.binder = tokens.expect_identifier("binder").text;
        return atom;
    }
    switch (op.kind) {
    case Token::Kind::Equal: atom.op = CompareOp::eq; break;
    case Token::Kind::NotEqual: atom.op = CompareOp::ne; break;
    case Token::Kind::Less: atom.op = CompareOp::lt; break;
    case Token::Kind::LessEqual: atom.op = CompareOp::le; break;
    case Token::Kind::Greater: atom.op = CompareOp::gt; break;
    case Token::Kind::GreaterEqual: atom.op = CompareOp::ge; break;
    default: tokens.fail("comparison operator");
    }
    tokens.next();
    // "set = binder" is the membership form.
    if (atom.op == CompareOp::eq && tokens.peek().is(Token::Kind::Identifier) && !tokens.peek().is_word("null") &&
        !tokens.peek(1).is(Token::Kind::Dot)) {
        atom.kind = Atom::Kind::contains;
        atom.binder = tokens.next().text;
        return atom;
    }
    atom.literal = parse_literal(tokens);
    return atom;
}

AugmentBinding parse_binding(TokenStream &tokens)
{
    AugmentBinding b;
    Token const &name = tokens.expect_identifier("attribute name");
    b.name = name.text;
    b.pos = name.pos;
    if (tokens.accept(Token::Kind::Assign)) {
        Token const &fn = tokens.expect_identifier("aggregate function");
        if (!parse_aggregate_fn(fn.text, b.fn))
            throw Error(ErrorKind::UnknownFunction, "unknown aggregate function '" + fn.text + "'", fn.pos);
        b.computed = true;
        tokens.expect(Token::Kind::LParen, "'('");
        b.argument = parse_path(tokens);
        tokens.expect(Token::Kind::RParen, "')'");
        return b;
    }
    tokens.expect(Token::Kind::Colon, "':=' or ':'");
    b.computed = false;
    b.type = parse_type(tokens);
    return b;
}

} // namespace

Predicate parse_predicate(TokenStream &tokens)
{
    Predicate pred;
    if (tokens.accept_word("true"))
        return pred;
    do
        pred.atoms.push_back(parse_atom(tokens));
    while (tokens.accept(Token::Kind::And) || tokens.accept_word("and"));
    return pred;
}

MappingExpr parse_mapping(TokenStream &tokens)
{
    MappingExpr expr;
    Token const &head = tokens.expect_identifier("mapping expression");
    expr.pos = head.pos;
    if (tokens.accept(Token::Kind::Colon)) {
        expr.kind = MappingKind::source;
        expr.binder = head.text;
        expr.target = tokens.expect_identifier("interface or class name").text;
        return expr;
    }
    if (!tokens.peek().is(Token::Kind::LParen))
        tokens.fail("':' or '('");
    if (!function_kind(head.text, expr.kind))
        throw Error(ErrorKind::UnknownFunction, "unknown function '" + head.text + "'", head.pos);
    tokens.next();

    auto comma = [&] { tokens.expect(Token::Kind::Comma, "','"); };
    switch (expr.kind) {
    case MappingKind::select:
        expr.operands.push_back(parse_mapping(tokens));
        comma();
        expr.predicate = parse_predicate(tokens);
        break;
    case MappingKind::join:
        expr.operands.push_back(parse_mapping(tokens));
        comma();
        expr.operands.push_back(parse_mapping(tokens));
        comma();
        expr.predicate = parse_predicate(tokens);
        break;
    case MappingKind::specialize:
        expr.operands.push_back(parse_mapping(tokens));
        for (comma(); at_operand(tokens); comma())
            expr.operands.push_back(parse_mapping(tokens));
        expr.predicate = parse_predicate(tokens);
        break;
    case MappingKind::project:
    case MappingKind::hide:
    case MappingKind::generalize:
        while (!at_operand(tokens)) {
            expr.items.push_back(parse_item(tokens));
            comma();
        }
        expr.operands.push_back(parse_mapping(tokens));
        if (expr.kind == MappingKind::generalize)
            while (tokens.accept(Token::Kind::Comma))
                expr.operands.push_back(parse_mapping(tokens));
        break;
    case MappingKind::augment:
        // A "NAME : TYPE" argument is a specific binding; "NAME : Other" is the operand.
        while (!(at_operand(tokens) && !(tokens.peek(1).is(Token::Kind::Colon) && is_type_start(tokens.peek(2))))) {
            expr.bindings.push_back(parse_binding(tokens));
            comma();
        }
        expr.operands.push_back(parse_mapping(tokens));
        break;
    case MappingKind::source:
        break;
    }
    tokens.expect(Token::Kind::RParen, "')'");
    if (tokens.accept_word("as"))
        expr.binder = tokens.expect_identifier("binder").text;
    return expr;
}

MappingExpr parse_mapping(std::string_view text)
{
    TokenStream tokens(tokenize(text));
    MappingExpr expr = parse_mapping(tokens);
    if (!tokens.at_end())
        tokens.fail("end of mapping");
    return expr;
}

namespace {

void print_literal(std::ostream &out, Value const &v)
{
    if (v.is_string())
        out << quote_string(v.as_string());
    else if (v.is_real()) {
        std::string s = to_json(v).dump();
        out << s;
    } else
        out << format_value(v);
}

void print_expr(std::ostream &out, MappingExpr const &e)
{
    if (e.kind == MappingKind::source) {
        out << e.binder << ": " << e.target;
        return;
    }
    out << to_string(e.kind) << '(';
    bool first = true;
    auto sep = [&] {
        if (!first)
            out << ", ";
        first = false;
    };
    for (auto const &item : e.items) {
        sep();
        out << item.path.text();
        if (!item.alias.empty())
            out << " as " << item.alias;
    }
    for (auto const &b : e.bindings) {
        sep();
        if (b.computed)
            out << b.name << " := " << to_string(b.fn) << '(' << b.argument.text() << ')';
        else
            out << b.name << " : " << format_type(b.type);
    }
    for (auto const &op : e.operands) {
        sep();
        print_expr(out, op);
    }
    if (e.kind == MappingKind::select || e.kind == MappingKind::join || e.kind == MappingKind::specialize) {
        sep();
        out << print_predicate(e.predicate);
    }
    out << ')';
    if (!e.binder.empty())
        out << " as " << e.binder;
}

} // namespace

std::string print_predicate(Predicate const &predicate)
{
    if (predicate.atoms.empty())
        return "true";
    std::ostringstream out;
    for (std::size_t i = 0; i < predicate.atoms.size(); ++i) {
        auto const &a = predicate.atoms[i];
        if (i)
            out << " and ";
        out << a.path.text();
        if (a.kind == Atom::Kind::contains) {
            out << " contains " << a.binder;
        } else {
            out << ' ' << to_string(a.op) << ' ';
            print_literal(out, a.literal);
        }
    }
    return out.str();
}

std::string print_mapping(MappingExpr const &expr)
{
    std::ostringstream out;
    print_expr(out, expr);
    return out.str();
}

std::vector<MappingExpr const *> mapping_leaves(MappingExpr const &expr)
{
    std::vector<MappingExpr const *> out;
    if (expr.kind == MappingKind::source) {
        out.push_back(&expr);
        return out;
    }
    for (auto const &op : expr.operands) {
        auto sub = mapping_leaves(op);
        out.insert(out.end(), sub.begin(), sub.end());
    }
    return out;
}

} // namespace edw
