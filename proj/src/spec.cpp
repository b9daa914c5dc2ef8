#include "meadowprob/spec.hpp"

#include "meadowprob/config.hpp"
#include "meadowprob/errors.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <set>
#include <sstream>

namespace meadowprob {

// ---------------------------------------------------------------------------
// StalkExpr

struct StalkExpr::Node {
    Kind kind;
    Stalk value;       // Const
    std::string name;  // Var
    EventTerm ev, gv;  // Prob / Cond
    Ptr a, b;
};

StalkExpr::StalkExpr() : node_(constant(Stalk()).node_) {}

StalkExpr::Kind StalkExpr::kind() const { return node_->kind; }

StalkExpr StalkExpr::constant(Stalk value) {
    return StalkExpr(std::make_shared<Node>(Node{Kind::Const, std::move(value), {}, {}, {}, nullptr, nullptr}));
}

StalkExpr StalkExpr::variable(std::string name) {
    return StalkExpr(std::make_shared<Node>(Node{Kind::Var, {}, std::move(name), {}, {}, nullptr, nullptr}));
}

StalkExpr StalkExpr::prob(EventTerm t) {
    return StalkExpr(std::make_shared<Node>(Node{Kind::Prob, {}, {}, std::move(t), {}, nullptr, nullptr}));
}

StalkExpr StalkExpr::cond(EventTerm x, EventTerm y) {
    return StalkExpr(std::make_shared<Node>(Node{Kind::Cond, {}, {}, std::move(x), std::move(y), nullptr, nullptr}));
}

namespace {
StalkExpr::Kind constexpr kAdd = StalkExpr::Kind::Add;
}

#define MEADOWPROB_BINARY(fn, K)                                                            \
    StalkExpr StalkExpr::fn(const StalkExpr& a, const StalkExpr& b) {                       \
        return StalkExpr(std::make_shared<Node>(Node{Kind::K, {}, {}, {}, {}, a.node_, b.node_})); \
    }

MEADOWPROB_BINARY(add, Add)
MEADOWPROB_BINARY(sub, Sub)
MEADOWPROB_BINARY(mul, Mul)
MEADOWPROB_BINARY(div, Div)
#undef MEADOWPROB_BINARY

#define MEADOWPROB_UNARY(fn, K)                                                             \
    StalkExpr StalkExpr::fn(const StalkExpr& a) {                                           \
        return StalkExpr(std::make_shared<Node>(Node{Kind::K, {}, {}, {}, {}, a.node_, nullptr})); \
    }

MEADOWPROB_UNARY(neg, Neg)
MEADOWPROB_UNARY(inv, Inv)
MEADOWPROB_UNARY(sign, Sign)
#undef MEADOWPROB_UNARY

const Stalk& StalkExpr::value() const {
    if (kind() != Kind::Const) throw Error("value() on a non-constant stalk node");
    return node_->value;
}

const std::string& StalkExpr::name() const {
    if (kind() != Kind::Var) throw Error("name() on a non-variable stalk node");
    return node_->name;
}

const EventTerm& StalkExpr::event() const {
    if (kind() != Kind::Prob && kind() != Kind::Cond)
        throw Error("event() on a non-probability stalk node");
    return node_->ev;
}

const EventTerm& StalkExpr::given() const {
    if (kind() != Kind::Cond) throw Error("given() on a non-conditional stalk node");
    return node_->gv;
}

StalkExpr StalkExpr::left() const {
    if (!node_->a) throw Error("left() on a leaf stalk node");
    return StalkExpr(node_->a);
}

StalkExpr StalkExpr::right() const {
    if (!node_->b) throw Error("right() on a non-binary stalk node");
    return StalkExpr(node_->b);
}

bool StalkExpr::same(const StalkExpr& other) const {
    if (node_ == other.node_) return true;
    if (kind() != other.kind()) return false;
    switch (kind()) {
        case Kind::Const: return value() == other.value();
        case Kind::Var: return name() == other.name();
        case Kind::Prob: return event() == other.event();
        case Kind::Cond: return event() == other.event() && given() == other.given();
        case Kind::Neg:
        case Kind::Inv:
        case Kind::Sign: return left().same(other.left());
        case Kind::Add:
        case Kind::Sub:
        case Kind::Mul:
        case Kind::Div:
            return left().same(other.left()) && right().same(other.right());
    }
    return false;
}

namespace {

// Event expressions at the top level of a P(...) argument: `|` there is the
// conditioning separator, so a top-level OR needs parentheses.
std::string event_arg_str(const EventTerm& t) {
    if (t.kind() == EventTerm::Kind::Or) return "(" + t.str() + ")";
    return t.str();
}

int sprec(StalkExpr::Kind k) {
    switch (k) {
        case StalkExpr::Kind::Add:
        case StalkExpr::Kind::Sub: return 1;
        case StalkExpr::Kind::Mul:
        case StalkExpr::Kind::Div: return 2;
        case StalkExpr::Kind::Neg: return 3;
        default: return 4;
    }
}

void srender(const StalkExpr& e, int parent_prec, std::string& out) {
    int prec = sprec(e.kind());
    bool parens = prec < parent_prec;
    if (parens) out += '(';
    switch (e.kind()) {
        case StalkExpr::Kind::Const: out += e.value().str(); break;
        case StalkExpr::Kind::Var: out += e.name(); break;
        case StalkExpr::Kind::Prob:
            out += "P(" + event_arg_str(e.event()) + ")";
            break;
        case StalkExpr::Kind::Cond:
            out += "P(" + event_arg_str(e.event()) + " | " + event_arg_str(e.given()) + ")";
            break;
        case StalkExpr::Kind::Inv:
            out += "inv(";
            srender(e.left(), 0, out);
            out += ')';
            break;
        case StalkExpr::Kind::Sign:
            out += "s(";
            srender(e.left(), 0, out);
            out += ')';
            break;
        case StalkExpr::Kind::Neg:
            out += '-';
            srender(e.left(), prec, out);
            break;
        case StalkExpr::Kind::Add:
            srender(e.left(), prec, out);
            out += " + ";
            srender(e.right(), prec + 1, out);
            break;
        case StalkExpr::Kind::Sub:
            srender(e.left(), prec, out);
            out += " - ";
            srender(e.right(), prec + 1, out);
            break;
        case StalkExpr::Kind::Mul:
            srender(e.left(), prec, out);
            out += " * ";
            srender(e.right(), prec + 1, out);
            break;
        case StalkExpr::Kind::Div:
            srender(e.left(), prec, out);
            out += " / ";
            srender(e.right(), prec + 1, out);
            break;
    }
    if (parens) out += ')';
}

} // namespace

std::string StalkExpr::str() const {
    std::string out;
    srender(*this, 0, out);
    return out;
}

// ---------------------------------------------------------------------------
// Lexer

namespace {

enum class Tok {
    Ident, Int, Decimal,
    Semi, Comma, LParen, RParen, LBrace, RBrace,
    Pipe, Amp, Bang, Plus, Minus, Star, Slash,
    Eq, Lt, Le, Gt, Ge,
    End
};

struct Token {
    Tok kind;
    std::string text;
    int line;
    int col;
};

const char* tok_name(Tok t) {
    switch (t) {
        case Tok::Ident: return "identifier";
        case Tok::Int: return "integer";
        case Tok::Decimal: return "decimal";
        case Tok::Semi: return "';'";
        case Tok::Comma: return "','";
        case Tok::LParen: return "'('";
        case Tok::RParen: return "')'";
        case Tok::LBrace: return "'{'";
        case Tok::RBrace: return "'}'";
        case Tok::Pipe: return "'|'";
        case Tok::Amp: return "'&'";
        case Tok::Bang: return "'!'";
        case Tok::Plus: return "'+'";
        case Tok::Minus: return "'-'";
        case Tok::Star: return "'*'";
        case Tok::Slash: return "'/'";
        case Tok::Eq: return "'='";
        case Tok::Lt: return "'<'";
        case Tok::Le: return "'<='";
        case Tok::Gt: return "'>'";
        case Tok::Ge: return "'>='";
        case Tok::End: return "end of input";
    }
    return "?";
}

std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> out;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k, ++i) {
            if (text[i] == '\n') { ++line; col = 1; } else { ++col; }
        }
    };
    while (i < text.size()) {
        char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) { advance(1); continue; }
        if (c == '#') {
            while (i < text.size() && text[i] != '\n') advance(1);
            continue;
        }
        int tl = line, tc = col;
        auto push = [&](Tok k, std::size_t n) {
            out.push_back({k, std::string(text.substr(i, n)), tl, tc});
            advance(n);
        };
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i + 1;
            while (j < text.size() &&
                   (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_' || text[j] == '.'))
                ++j;
            push(Tok::Ident, j - i);
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i + 1;
            while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
            bool decimal = false;
            if (j + 1 < text.size() && text[j] == '.' &&
                std::isdigit(static_cast<unsigned char>(text[j + 1]))) {
                decimal = true;
                ++j;
                while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
            }
            push(decimal ? Tok::Decimal : Tok::Int, j - i);
            continue;
        }
        switch (c) {
            case ';': push(Tok::Semi, 1); break;
            case ',': push(Tok::Comma, 1); break;
            case '(': push(Tok::LParen, 1); break;
            case ')': push(Tok::RParen, 1); break;
            case '{': push(Tok::LBrace, 1); break;
            case '}': push(Tok::RBrace, 1); break;
            case '|': push(Tok::Pipe, 1); break;
            case '&': push(Tok::Amp, 1); break;
            case '!': push(Tok::Bang, 1); break;
            case '+': push(Tok::Plus, 1); break;
            case '-': push(Tok::Minus, 1); break;
            case '*': push(Tok::Star, 1); break;
            case '/': push(Tok::Slash, 1); break;
            case '=': push(Tok::Eq, 1); break;
            case '<':
                if (i + 1 < text.size() && text[i + 1] == '=') push(Tok::Le, 2);
                else push(Tok::Lt, 1);
                break;
            case '>':
                if (i + 1 < text.size() && text[i + 1] == '=') push(Tok::Ge, 2);
                else push(Tok::Gt, 1);
                break;
            default:
                throw ParseError(std::string("unexpected character '") + c + "'", line, col);
        }
    }
    out.push_back({Tok::End, "", line, col});
    return out;
}

// ---------------------------------------------------------------------------
// Parser

struct PTerm {
    EventTerm event;
    std::optional<EventTerm> joint;
    std::optional<EventTerm> given;

    EventTerm folded() const { return joint ? (event & *joint) : event; }
};

class Parser {
public:
    Parser(std::string_view text, ResolveContext ctx)
        : tokens_(tokenize(text)), ctx_(std::move(ctx)) {}

    SpecDocument parse_document() {
        SpecDocument doc;
        while (peek().kind != Tok::End) {
            const Token& t = peek();
            if (t.kind == Tok::Ident && t.text == "event") {
                parse_event_decl(doc);
            } else if (t.kind == Tok::Ident && t.text == "var") {
                parse_var_decl(doc);
            } else if (t.kind == Tok::Ident && t.text == "eval") {
                next();
                doc.queries.push_back(parse_stalk_expr());
                expect(Tok::Semi);
            } else if (t.kind == Tok::Ident && (t.text == "P" || t.text == "independent")) {
                doc.constraints.push_back(parse_constraint());
            } else {
                throw ParseError("expected a declaration ('event', 'var'), a constraint "
                                 "('P', 'independent'), or a query ('eval')",
                                 t.line, t.col);
            }
        }
        return doc;
    }

    EventTerm parse_single_event() {
        EventTerm t = parse_event_or();
        expect(Tok::End);
        return t;
    }

    StalkExpr parse_single_stalk_expr() {
        StalkExpr e = parse_stalk_expr();
        expect(Tok::End);
        return e;
    }

private:
    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    ResolveContext ctx_;

    const Token& peek(std::size_t ahead = 0) const {
        std::size_t i = std::min(pos_ + ahead, tokens_.size() - 1);
        return tokens_[i];
    }
    const Token& next() { return tokens_[std::min(pos_++, tokens_.size() - 1)]; }
    const Token& expect(Tok k) {
        const Token& t = peek();
        if (t.kind != k)
            throw ParseError(std::string("expected ") + tok_name(k) + ", found " +
                             (t.kind == Tok::End ? tok_name(Tok::End) : "'" + t.text + "'"),
                             t.line, t.col);
        return next();
    }

    bool declared(const std::string& name) const {
        return std::find(ctx_.generators.begin(), ctx_.generators.end(), name) !=
               ctx_.generators.end();
    }

    const RandomVariable* find_variable(const std::string& name) const {
        for (const auto& v : ctx_.variables)
            if (v.name == name) return &v;
        return nullptr;
    }

    void check_fresh(const std::string& name, const Token& at) {
        if (declared(name) || find_variable(name))
            throw NameError("duplicate declaration of '" + name + "' (line " +
                            std::to_string(at.line) + ")");
    }

    void parse_event_decl(SpecDocument& doc) {
        next();  // 'event'
        const Token& name = expect(Tok::Ident);
        check_fresh(name.text, name);
        expect(Tok::Semi);
        ctx_.generators.push_back(name.text);
        doc.decls.push_back(EventDecl{name.text});
    }

    void parse_var_decl(SpecDocument& doc) {
        next();  // 'var'
        const Token& name = expect(Tok::Ident);
        check_fresh(name.text, name);
        const Token& kw = expect(Tok::Ident);
        if (kw.text != "in") throw ParseError("expected 'in'", kw.line, kw.col);
        expect(Tok::LBrace);
        std::vector<std::string> labels;
        labels.push_back(expect(Tok::Ident).text);
        while (peek().kind == Tok::Comma) {
            next();
            labels.push_back(expect(Tok::Ident).text);
        }
        expect(Tok::RBrace);
        expect(Tok::Semi);
        RandomVariable v = make_random_variable(name.text, labels);
        for (const auto& g : v.generators) ctx_.generators.push_back(g);
        ctx_.variables.push_back(v);
        doc.decls.push_back(VarDecl{name.text, std::move(labels)});
    }

    // --- event expressions ---------------------------------------------

    EventTerm parse_event_or() {
        EventTerm t = parse_event_and();
        while (peek().kind == Tok::Pipe) {
            next();
            t = t | parse_event_and();
        }
        return t;
    }

    EventTerm parse_event_and() {
        EventTerm t = parse_event_unary();
        while (peek().kind == Tok::Amp) {
            next();
            t = t & parse_event_unary();
        }
        return t;
    }

    EventTerm parse_event_unary() {
        if (peek().kind == Tok::Bang) {
            next();
            return !parse_event_unary();
        }
        return parse_event_primary();
    }

    EventTerm parse_event_primary() {
        const Token& t = peek();
        if (t.kind == Tok::LParen) {
            next();
            EventTerm inner = parse_event_or();
            expect(Tok::RParen);
            return inner;
        }
        if (t.kind != Tok::Ident)
            throw ParseError("expected an event expression", t.line, t.col);
        next();
        if (t.text == "TOP") return EventTerm::top();
        if (t.text == "BOT") return EventTerm::bottom();
        if (peek().kind == Tok::Eq && peek(1).kind == Tok::Ident) {
            next();
            const Token& label = expect(Tok::Ident);
            const RandomVariable* v = find_variable(t.text);
            if (!v) {
                if (ctx_.free_names) {
                    throw NameError("'" + t.text + " = " + label.text +
                                    "' needs a declared variable; free expressions use plain generators");
                }
                throw NameError("undeclared variable '" + t.text + "' (line " +
                                std::to_string(t.line) + ")");
            }
            return rv_event(*v, label.text);
        }
        if (!ctx_.free_names && !declared(t.text))
            throw NameError("undeclared event '" + t.text + "' (line " +
                            std::to_string(t.line) + ")");
        return EventTerm::generator(t.text);
    }

    // Arguments of P(...): `|` at this level separates the conditioning
    // event, so OR must be parenthesized here.
    PTerm parse_pterm_args() {
        expect(Tok::LParen);
        PTerm p;
        p.event = parse_event_and();
        if (peek().kind == Tok::Comma) {
            next();
            p.joint = parse_event_and();
        }
        if (peek().kind == Tok::Pipe) {
            next();
            p.given = parse_event_and();
        }
        expect(Tok::RParen);
        return p;
    }

    // --- numbers ---------------------------------------------------------

    Stalk parse_number() {
        bool negative = false;
        if (peek().kind == Tok::Minus) {
            next();
            negative = true;
        }
        const Token& t = peek();
        Stalk value;
        if (t.kind == Tok::Decimal) {
            next();
            value = Stalk::from_string(t.text);
        } else if (t.kind == Tok::Int) {
            next();
            if (peek().kind == Tok::Slash && peek(1).kind == Tok::Int) {
                next();
                const Token& den = next();
                if (mpz_class(den.text) == 0)
                    throw ParseError("zero denominator", den.line, den.col);
                value = Stalk(mpq_class(mpz_class(t.text), mpz_class(den.text)));
            } else {
                value = Stalk(mpz_class(t.text));
            }
        } else {
            throw ParseError("expected a number", t.line, t.col);
        }
        return negative ? -value : value;
    }

    // --- constraints -------------------------------------------------------

    Constraint parse_constraint() {
        const Token& head = next();  // 'P' or 'independent'
        if (head.text == "independent") {
            expect(Tok::LParen);
            EventTerm a = parse_event_or();
            expect(Tok::Comma);
            EventTerm b = parse_event_or();
            expect(Tok::RParen);
            expect(Tok::Semi);
            return IndependentDecl{a, b};
        }
        PTerm lhs = parse_pterm_args();
        const Token& rel = peek();
        switch (rel.kind) {
            case Tok::Eq: {
                next();
                if (peek().kind == Tok::Ident && peek().text == "P" && peek(1).kind == Tok::LParen) {
                    next();
                    PTerm rhs = parse_pterm_args();
                    expect(Tok::Semi);
                    return CondEqCond{lhs.folded(), lhs.given.value_or(EventTerm::top()),
                                      rhs.folded(), rhs.given.value_or(EventTerm::top())};
                }
                Stalk v = parse_number();
                expect(Tok::Semi);
                if (lhs.given) return CondEq{lhs.folded(), *lhs.given, v};
                if (lhs.joint) return JointEq{lhs.event, *lhs.joint, v};
                return ProbEq{lhs.event, v};
            }
            case Tok::Lt:
            case Tok::Le:
            case Tok::Gt:
            case Tok::Ge: {
                next();
                if (lhs.given)
                    throw ParseError("comparisons of conditional probabilities are not supported",
                                     rel.line, rel.col);
                Rel r = rel.kind == Tok::Lt   ? Rel::Lt
                        : rel.kind == Tok::Le ? Rel::Le
                        : rel.kind == Tok::Gt ? Rel::Gt
                                              : Rel::Ge;
                Stalk v = parse_number();
                expect(Tok::Semi);
                return ProbCmp{lhs.folded(), r, v};
            }
            default:
                throw ParseError("expected '=', '<', '<=', '>' or '>=' after P(...)",
                                 rel.line, rel.col);
        }
    }

    // --- stalk expressions ---------------------------------------------

    StalkExpr parse_stalk_expr() {
        StalkExpr e = parse_sterm();
        while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
            bool plus = next().kind == Tok::Plus;
            StalkExpr r = parse_sterm();
            e = plus ? StalkExpr::add(e, r) : StalkExpr::sub(e, r);
        }
        return e;
    }

    StalkExpr parse_sterm() {
        StalkExpr e = parse_sunary();
        while (peek().kind == Tok::Star || peek().kind == Tok::Slash) {
            bool star = next().kind == Tok::Star;
            StalkExpr r = parse_sunary();
            e = star ? StalkExpr::mul(e, r) : StalkExpr::div(e, r);
        }
        return e;
    }

    StalkExpr parse_sunary() {
        if (peek().kind == Tok::Minus) {
            next();
            StalkExpr e = parse_sunary();
            if (e.kind() == StalkExpr::Kind::Const) return StalkExpr::constant(-e.value());
            return StalkExpr::neg(e);
        }
        return parse_satom();
    }

    StalkExpr parse_satom() {
        const Token& t = peek();
        if (t.kind == Tok::LParen) {
            next();
            StalkExpr e = parse_stalk_expr();
            expect(Tok::RParen);
            return e;
        }
        if (t.kind == Tok::Int || t.kind == Tok::Decimal) {
            if (t.kind == Tok::Int && peek(1).kind == Tok::Slash && peek(2).kind == Tok::Int) {
                return StalkExpr::constant(parse_number());
            }
            next();
            return StalkExpr::constant(Stalk::from_string(t.text));
        }
        if (t.kind == Tok::Ident) {
            if (t.text == "P" && peek(1).kind == Tok::LParen) {
                next();
                PTerm p = parse_pterm_args();
                if (p.given) return StalkExpr::cond(p.folded(), *p.given);
                return StalkExpr::prob(p.folded());
            }
            if (t.text == "s" && peek(1).kind == Tok::LParen) {
                next();
                next();
                StalkExpr e = parse_stalk_expr();
                expect(Tok::RParen);
                return StalkExpr::sign(e);
            }
            if (t.text == "inv" && peek(1).kind == Tok::LParen) {
                next();
                next();
                StalkExpr e = parse_stalk_expr();
                expect(Tok::RParen);
                return StalkExpr::inv(e);
            }
            if (!ctx_.free_names)
                throw NameError("undeclared name '" + t.text + "' in stalk expression (line " +
                                std::to_string(t.line) + ")");
            next();
            return StalkExpr::variable(t.text);
        }
        throw ParseError("expected a stalk expression", t.line, t.col);
    }
};

} // namespace

// ---------------------------------------------------------------------------
// Public parse/render surface

std::vector<std::string> SpecDocument::generators() const {
    std::vector<std::string> gens;
    for (const auto& d : decls) {
        if (const auto* e = std::get_if<EventDecl>(&d)) {
            gens.push_back(e->name);
        } else {
            const auto& v = std::get<VarDecl>(d);
            RandomVariable rv = make_random_variable(v.name, v.labels);
            gens.insert(gens.end(), rv.generators.begin(), rv.generators.end());
        }
    }
    return gens;
}

std::vector<RandomVariable> SpecDocument::variables() const {
    std::vector<RandomVariable> out;
    for (const auto& d : decls)
        if (const auto* v = std::get_if<VarDecl>(&d))
            out.push_back(make_random_variable(v->name, v->labels));
    return out;
}

ResolveContext ResolveContext::for_document(const SpecDocument& doc) {
    ResolveContext ctx;
    ctx.generators = doc.generators();
    ctx.variables = doc.variables();
    return ctx;
}

ResolveContext ResolveContext::free() {
    ResolveContext ctx;
    ctx.free_names = true;
    return ctx;
}

SpecDocument parse_spec(std::string_view text) {
    return Parser(text, ResolveContext{}).parse_document();
}

EventTerm parse_event_text(std::string_view text, const ResolveContext& ctx) {
    return Parser(text, ctx).parse_single_event();
}

StalkExpr parse_stalk_expr_text(std::string_view text, const ResolveContext& ctx) {
    return Parser(text, ctx).parse_single_stalk_expr();
}

std::string rel_str(Rel r) {
    switch (r) {
        case Rel::Lt: return "<";
        case Rel::Le: return "<=";
        case Rel::Gt: return ">";
        case Rel::Ge: return ">=";
    }
    return "?";
}

namespace {

std::string event_arg(const EventTerm& t) {
    if (t.kind() == EventTerm::Kind::Or) return "(" + t.str() + ")";
    return t.str();
}

std::string pterm_str(const EventTerm& e, const EventTerm& g) {
    if (g == EventTerm::top()) return "P(" + event_arg(e) + ")";
    return "P(" + event_arg(e) + " | " + event_arg(g) + ")";
}

} // namespace

std::string constraint_str(const Constraint& c) {
    struct Visitor {
        std::string operator()(const ProbEq& p) const {
            return "P(" + event_arg(p.term) + ") = " + p.value.str();
        }
        std::string operator()(const CondEq& p) const {
            return "P(" + event_arg(p.event) + " | " + event_arg(p.given) + ") = " + p.value.str();
        }
        std::string operator()(const CondEqCond& p) const {
            return pterm_str(p.e1, p.g1) + " = " + pterm_str(p.e2, p.g2);
        }
        std::string operator()(const ProbCmp& p) const {
            return "P(" + event_arg(p.term) + ") " + rel_str(p.rel) + " " + p.value.str();
        }
        std::string operator()(const JointEq& p) const {
            return "P(" + event_arg(p.a) + ", " + event_arg(p.b) + ") = " + p.value.str();
        }
        std::string operator()(const IndependentDecl& p) const {
            return "independent(" + p.a.str() + ", " + p.b.str() + ")";
        }
    };
    return std::visit(Visitor{}, c);
}

std::string render_spec(const SpecDocument& doc) {
    std::ostringstream out;
    for (const auto& d : doc.decls) {
        if (const auto* e = std::get_if<EventDecl>(&d)) {
            out << "event " << e->name << ";\n";
        } else {
            const auto& v = std::get<VarDecl>(d);
            out << "var " << v.name << " in {";
            for (std::size_t i = 0; i < v.labels.size(); ++i)
                out << (i ? ", " : "") << v.labels[i];
            out << "};\n";
        }
    }
    for (const auto& c : doc.constraints) out << constraint_str(c) << ";\n";
    for (const auto& q : doc.queries) out << "eval " << q.str() << ";\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// Lowering

std::string ConstraintSystem::bits(uint32_t index) const {
    return minterm_bits(index, static_cast<int>(gens.size()));
}

namespace {

std::vector<Stalk> indicator(const EventTerm& t, const std::vector<std::string>& gens,
                             uint32_t n) {
    std::vector<Stalk> coeffs(n);
    for (uint32_t idx : minterms(t, gens).indices) coeffs[idx] = Stalk(1);
    return coeffs;
}

} // namespace

ConstraintSystem lower(const SpecDocument& doc) {
    ConstraintSystem cs;
    cs.gens = doc.generators();
    int cap = config::max_generators();
    if (static_cast<int>(cs.gens.size()) > cap)
        throw CapError("generator count " + std::to_string(cs.gens.size()) +
                       " exceeds the cap of " + std::to_string(cap));
    uint32_t n = 1u << cs.gens.size();
    for (uint32_t i = 0; i < n; ++i) cs.base.vars.push_back("u" + cs.bits(i));

    // sum(u) = 1
    cs.base.equalities.push_back(EqRow{std::vector<Stalk>(n, Stalk(1)), Stalk(1)});

    // encodings with no label carry no weight
    for (const auto& v : doc.variables())
        for (const auto& code : v.unused_codes)
            cs.base.equalities.push_back(EqRow{indicator(code, cs.gens, n), Stalk()});

    for (const auto& c : doc.constraints) {
        std::string text = constraint_str(c);
        if (const auto* p = std::get_if<ProbEq>(&c)) {
            cs.base.equalities.push_back(EqRow{indicator(p->term, cs.gens, n), p->value});
        } else if (const auto* p = std::get_if<JointEq>(&c)) {
            cs.base.equalities.push_back(EqRow{indicator(p->a & p->b, cs.gens, n), p->value});
        } else if (const auto* p = std::get_if<ProbCmp>(&c)) {
            std::vector<Stalk> coeffs = indicator(p->term, cs.gens, n);
            Stalk rhs = p->value;
            bool strict = p->rel == Rel::Lt || p->rel == Rel::Gt;
            if (p->rel == Rel::Lt || p->rel == Rel::Le) {
                for (auto& x : coeffs) x = -x;
                rhs = -rhs;
            }
            cs.base.inequalities.push_back(LinRow{std::move(coeffs), rhs, strict});
        } else if (const auto* p = std::get_if<CondEq>(&c)) {
            ConditionalConstraint cc;
            cc.text = text;
            cc.guard = indicator(p->given, cs.gens, n);
            cc.positive_equation.coeffs = indicator(p->event & p->given, cs.gens, n);
            for (uint32_t i = 0; i < n; ++i)
                cc.positive_equation.coeffs[i] -= p->value * cc.guard[i];
            cc.positive_equation.rhs = Stalk();
            cc.zero_branch_ok = p->value.is_zero();
            cs.conditionals.push_back(std::move(cc));
        } else if (const auto* p = std::get_if<CondEqCond>(&c)) {
            if (!equivalent(p->g1, p->g2))
                throw LoweringError("constraint '" + text +
                                    "' has no linear lowering: the conditioning events differ");
            ConditionalConstraint cc;
            cc.text = text;
            cc.guard = indicator(p->g1, cs.gens, n);
            std::vector<Stalk> lhs = indicator(p->e1 & p->g1, cs.gens, n);
            std::vector<Stalk> rhs = indicator(p->e2 & p->g2, cs.gens, n);
            for (uint32_t i = 0; i < n; ++i) lhs[i] -= rhs[i];
            cc.positive_equation = EqRow{std::move(lhs), Stalk()};
            cc.zero_branch_ok = true;  // both sides are 0 when the condition has weight 0
            cs.conditionals.push_back(std::move(cc));
        } else {
            throw LoweringError("constraint '" + text +
                                "' has no linear lowering: independence is quadratic in the weights");
        }
    }

    // u >= 0 for every minterm weight
    for (uint32_t i = 0; i < n; ++i) {
        std::vector<Stalk> coeffs(n);
        coeffs[i] = Stalk(1);
        cs.base.inequalities.push_back(LinRow{std::move(coeffs), Stalk(), false});
    }
    return cs;
}

} // namespace meadowprob
