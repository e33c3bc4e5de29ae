#include "chor/lang.hpp"

#include <cctype>
#include <charconv>
#include <unordered_set>

namespace chor {

namespace {

enum class Tok {
    Ident,
    Int,
    String,
    Punct,
    End,
};

struct Token {
    Tok kind;
    std::string text;
    SourceSpan span;
};

struct ParseError {
    Diagnostic diag;
};

[[noreturn]] void fail(SourceSpan sp, std::string rule, std::string msg) {
    throw ParseError{Diagnostic{sp, std::move(rule), std::move(msg)}};
}

const std::unordered_set<std::string> kKeywords = {
    "comp", "var", "port", "of", "binds", "choreography", "choice", "while", "nil", "skip", "true", "false",
};

std::vector<Token> lex(std::string_view src) {
    std::vector<Token> out;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    static const char* puncts[] = {"->", "=>", ":=", "||", "&&", "==", "!=", "<=", ">=", "{", "}", "[", "]",
                                   "(",  ")",  ",",  ";",  ":",  ".",  "|",  "=",  "<",  ">",  "+", "-", "*",
                                   "/",  "%",  "!"};
    while (i < src.size()) {
        char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
            while (i < src.size() && src[i] != '\n') advance(1);
            continue;
        }
        if (c == '/' && i + 1 < src.size() && src[i + 1] == '*') {
            SourceSpan start{line, col};
            advance(2);
            while (i < src.size() && !(src[i] == '*' && i + 1 < src.size() && src[i + 1] == '/')) advance(1);
            if (i >= src.size()) fail(start, "lex", "unterminated block comment");
            advance(2);
            continue;
        }
        SourceSpan sp{line, col};
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
            out.push_back({Tok::Ident, std::string(src.substr(i, j - i)), sp});
            advance(j - i);
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            out.push_back({Tok::Int, std::string(src.substr(i, j - i)), sp});
            advance(j - i);
            continue;
        }
        if (c == '"') {
            std::string s;
            advance(1);
            while (true) {
                if (i >= src.size() || src[i] == '\n') fail(sp, "lex", "unterminated string literal");
                char d = src[i];
                if (d == '"') break;
                if (d == '\\' && i + 1 < src.size()) {
                    char e = src[i + 1];
                    s += e == 'n' ? '\n' : e == 't' ? '\t' : e;
                    advance(2);
                    continue;
                }
                s += d;
                advance(1);
            }
            advance(1);
            out.push_back({Tok::String, s, sp});
            continue;
        }
        bool matched = false;
        for (const char* p : puncts) {
            std::string_view pv(p);
            if (src.substr(i, pv.size()) == pv) {
                out.push_back({Tok::Punct, std::string(pv), sp});
                advance(pv.size());
                matched = true;
                break;
            }
        }
        if (!matched) fail(sp, "lex", std::string("unexpected character '") + c + "'");
    }
    out.push_back({Tok::End, "", {line, col}});
    return out;
}

class Parser {
public:
    Parser(std::vector<Token> toks, SystemDecl decl) : toks_(std::move(toks)), decl_(std::move(decl)) {}

    void parse_decls() {
        while (is_kw("comp")) parse_component();
    }

    Program parse_choreography() {
        expect_kw("choreography");
        Program p;
        p.name = expect_ident("choreography name").text;
        expect("=");
        p.main = parse_term();
        p.decl = decl_;
        return p;
    }

    void expect_end() {
        if (peek().kind != Tok::End) fail(peek().span, "syntax", "unexpected '" + peek().text + "' after end of input");
    }

    bool at(std::string_view kw) const { return is_kw(kw); }
    const Token& peek() const { return toks_[pos_]; }
    SystemDecl& decl() { return decl_; }

private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    SystemDecl decl_;

    const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

    bool is_punct(std::string_view p) const { return peek().kind == Tok::Punct && peek().text == p; }
    bool is_kw(std::string_view k) const { return peek().kind == Tok::Ident && peek().text == k; }

    bool accept(std::string_view p) {
        if (is_punct(p)) {
            next();
            return true;
        }
        return false;
    }

    std::string describe(const Token& t) const {
        if (t.kind == Tok::End) return "end of input";
        return "'" + t.text + "'";
    }

    const Token& expect(std::string_view p) {
        if (!is_punct(p)) fail(peek().span, "syntax", "expected '" + std::string(p) + "', found " + describe(peek()));
        return next();
    }

    void expect_kw(std::string_view k) {
        if (!is_kw(k)) fail(peek().span, "syntax", "expected '" + std::string(k) + "', found " + describe(peek()));
        next();
    }

    const Token& expect_ident(std::string_view what) {
        if (peek().kind != Tok::Ident || kKeywords.count(peek().text))
            fail(peek().span, "syntax", "expected " + std::string(what) + ", found " + describe(peek()));
        return next();
    }

    // ---- declarations ------------------------------------------------------

    DataType parse_type() {
        const Token& t = expect_ident("type");
        auto dt = parse_datatype(t.text);
        if (!dt) fail(t.span, "syntax", "unknown type '" + t.text + "'");
        return *dt;
    }

    Value parse_literal(DataType want) {
        SourceSpan sp = peek().span;
        bool neg = accept("-");
        const Token& t = next();
        Value v;
        if (t.kind == Tok::Int) {
            v = Value(parse_int(t, neg));
        } else if (neg) {
            fail(sp, "syntax", "expected integer after '-'");
        } else if (t.kind == Tok::String) {
            v = Value(t.text);
        } else if (t.kind == Tok::Ident && (t.text == "true" || t.text == "false")) {
            v = Value(t.text == "true");
        } else {
            fail(t.span, "syntax", "expected literal, found " + describe(t));
        }
        if (!v.has_type(want))
            fail(sp, "type-error", "initial value " + v.str() + " is not of type " + std::string(to_string(want)));
        return v;
    }

    std::int64_t parse_int(const Token& t, bool neg) {
        std::string digits = (neg ? "-" : "") + t.text;
        std::int64_t out = 0;
        auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), out);
        if (ec != std::errc() || p != digits.data() + digits.size())
            fail(t.span, "lex", "integer literal out of range: " + digits);
        return out;
    }

    void parse_component() {
        SourceSpan sp = peek().span;
        expect_kw("comp");
        const Token& id = expect_ident("component name");
        if (decl_.find(id.text)) fail(id.span, "duplicate", "component '" + id.text + "' declared twice");
        ComponentDecl c;
        c.id = id.text;
        c.span = sp;
        expect("{");
        while (!is_punct("}")) {
            if (is_kw("var")) {
                next();
                const Token& name = expect_ident("variable name");
                if (c.find_var(name.text)) fail(name.span, "duplicate", "variable '" + name.text + "' declared twice");
                expect(":");
                DataType dt = parse_type();
                Value init = Value::default_for(dt);
                if (accept("=")) init = parse_literal(dt);
                expect(";");
                c.vars.push_back({Variable{VarId{c.id, name.text}, dt}, init});
            } else if (is_kw("port")) {
                next();
                const Token& name = expect_ident("port name");
                if (c.find_port(name.text)) fail(name.span, "duplicate", "port '" + name.text + "' declared twice");
                expect(":");
                const Token& kind = expect_ident("port type (ss, as, r, in)");
                auto pt = parse_porttype(kind.text);
                if (!pt) fail(kind.span, "syntax", "unknown port type '" + kind.text + "'");
                expect_kw("of");
                DataType dt = parse_type();
                Port p;
                p.id = c.id + "." + name.text;
                p.owner = c.id;
                p.dtype = dt;
                p.ctype = *pt;
                if (is_kw("binds")) {
                    next();
                    const Token& v = expect_ident("variable name");
                    const VarDecl* vd = c.find_var(v.text);
                    if (!vd) fail(v.span, "unknown-variable", "port binds undeclared variable '" + v.text + "'");
                    if (vd->var.dtype != dt)
                        fail(v.span, "dtype-mismatch",
                             "port '" + name.text + "' of type " + std::string(to_string(dt)) + " binds variable '" +
                                 v.text + "' of type " + std::string(to_string(vd->var.dtype)));
                    p.var = v.text;
                } else if (*pt != PortType::Internal) {
                    fail(peek().span, "syntax", "non-internal port '" + name.text + "' must bind a variable");
                }
                expect(";");
                c.ports.push_back(p);
            } else {
                fail(peek().span, "syntax", "expected 'var', 'port' or '}', found " + describe(peek()));
            }
        }
        expect("}");
        decl_.components.push_back(std::move(c));
    }

    // ---- choreography terms ------------------------------------------------

    Chor parse_term() {
        SourceSpan sp = peek().span;
        Chor left = parse_seq();
        if (accept("||")) return make_par(left, parse_term(), sp);
        return left;
    }

    Chor parse_seq() {
        SourceSpan sp = peek().span;
        Chor left = parse_atom();
        if (accept(";")) return make_seq(left, parse_seq(), sp);
        return left;
    }

    Chor parse_atom() {
        SourceSpan sp = peek().span;
        if (is_kw("nil")) {
            next();
            return make_nil(sp);
        }
        if (accept("(")) {
            Chor inner = parse_term();
            expect(")");
            return inner;
        }
        if (is_kw("choice")) return parse_choice();
        if (is_kw("while")) return parse_while();
        if (peek().kind == Tok::Ident && !kKeywords.count(peek().text)) return parse_comm();
        fail(sp, "syntax", "expected choreography term, found " + describe(peek()));
    }

    const ComponentDecl& lookup_component(const Token& t) {
        const ComponentDecl* c = decl_.find(t.text);
        if (!c) fail(t.span, "unknown-component", "unknown component '" + t.text + "'");
        return *c;
    }

    // Comp.port, or a bare port name resolved in `scope` when given.
    Port parse_portref(const ComponentDecl* scope = nullptr) {
        const Token& first = expect_ident("port reference");
        if (accept(".")) {
            const Token& second = expect_ident("port name");
            const ComponentDecl& c = lookup_component(first);
            const Port* p = c.find_port(second.text);
            if (!p) fail(second.span, "unknown-port", "component '" + c.id + "' has no port '" + second.text + "'");
            return *p;
        }
        if (!scope) fail(first.span, "syntax", "port reference must be qualified as Component.port");
        const Port* p = scope->find_port(first.text);
        if (!p) fail(first.span, "unknown-port", "component '" + scope->id + "' has no port '" + first.text + "'");
        return *p;
    }

    GuardedSend parse_guarded(const ComponentDecl* scope = nullptr) {
        SourceSpan sp = peek().span;
        GuardedSend gs;
        gs.port = parse_portref(scope);
        gs.span = sp;
        expect("[");
        gs.guard = parse_expr(gs.port.owner);
        expect(",");
        gs.update = parse_update(gs.port.owner);
        expect("]");
        return gs;
    }

    Chor parse_comm() {
        SourceSpan sp = peek().span;
        GuardedSend send = parse_guarded();
        expect("->");
        SourceSpan rsp = peek().span;
        expect("{");
        std::vector<Receive> rcvs;
        if (!is_punct("}")) {
            do {
                Receive r;
                r.span = peek().span;
                r.port = parse_portref();
                expect("[");
                r.update = parse_update(r.port.owner);
                expect("]");
                rcvs.push_back(std::move(r));
            } while (accept(","));
        }
        expect("}");
        if (rcvs.empty()) fail(rsp, "empty-receivers", "communication from " + send.port.id + " has an empty receiver list");
        Comm c{std::move(send), std::move(rcvs), DataType::Int, false};
        c.dtype = c.send.port.dtype;
        if (accept(":")) {
            expect("<");
            c.dtype = parse_type();
            c.annotated = true;
            expect(">");
        }
        return std::make_shared<ChorNode>(ChorNode{std::move(c), sp});
    }

    Chor parse_choice() {
        SourceSpan sp = peek().span;
        expect_kw("choice");
        const Token& m = expect_ident("master component");
        const ComponentDecl& master = lookup_component(m);
        expect("{");
        std::vector<Continuation> conts;
        do {
            Continuation c;
            c.send = parse_guarded(&master);
            expect("=>");
            c.body = parse_term();
            conts.push_back(std::move(c));
        } while (accept("|"));
        expect("}");
        return make_branch(master.id, std::move(conts), sp);
    }

    Chor parse_while() {
        SourceSpan sp = peek().span;
        expect_kw("while");
        expect("(");
        GuardedSend cond = parse_guarded();
        expect(")");
        expect("{");
        Chor body = parse_term();
        expect("}");
        return make_loop(std::move(cond), std::move(body), sp);
    }

    // ---- expressions -------------------------------------------------------

    VarId parse_varref(const std::string& scope) {
        const Token& first = expect_ident("variable");
        if (accept(".")) {
            const Token& second = expect_ident("variable name");
            const ComponentDecl& c = lookup_component(first);
            if (!c.find_var(second.text))
                fail(second.span, "unknown-variable", "component '" + c.id + "' has no variable '" + second.text + "'");
            return VarId{c.id, second.text};
        }
        const ComponentDecl* c = decl_.find(scope);
        if (!c || !c->find_var(first.text))
            fail(first.span, "unknown-variable", "component '" + scope + "' has no variable '" + first.text + "'");
        return VarId{scope, first.text};
    }

    Update parse_update(const std::string& scope) {
        Update u;
        if (is_kw("skip")) {
            next();
            return u;
        }
        do {
            VarId target = parse_varref(scope);
            expect(":=");
            u.assignments.push_back({target, parse_expr(scope)});
        } while (accept(";"));
        return u;
    }

    Expr parse_expr(const std::string& scope) { return parse_or(scope); }

    Expr parse_or(const std::string& s) {
        Expr l = parse_and(s);
        while (accept("||")) l = binary(BinOp::Or, l, parse_and(s));
        return l;
    }

    Expr parse_and(const std::string& s) {
        Expr l = parse_eq(s);
        while (accept("&&")) l = binary(BinOp::And, l, parse_eq(s));
        return l;
    }

    Expr parse_eq(const std::string& s) {
        Expr l = parse_rel(s);
        while (true) {
            if (accept("==")) l = binary(BinOp::Eq, l, parse_rel(s));
            else if (accept("!=")) l = binary(BinOp::Ne, l, parse_rel(s));
            else return l;
        }
    }

    Expr parse_rel(const std::string& s) {
        Expr l = parse_add(s);
        while (true) {
            if (accept("<=")) l = binary(BinOp::Le, l, parse_add(s));
            else if (accept(">=")) l = binary(BinOp::Ge, l, parse_add(s));
            else if (accept("<")) l = binary(BinOp::Lt, l, parse_add(s));
            else if (accept(">")) l = binary(BinOp::Gt, l, parse_add(s));
            else return l;
        }
    }

    Expr parse_add(const std::string& s) {
        Expr l = parse_mul(s);
        while (true) {
            if (accept("+")) l = binary(BinOp::Add, l, parse_mul(s));
            else if (accept("-")) l = binary(BinOp::Sub, l, parse_mul(s));
            else return l;
        }
    }

    Expr parse_mul(const std::string& s) {
        Expr l = parse_unary(s);
        while (true) {
            if (accept("*")) l = binary(BinOp::Mul, l, parse_unary(s));
            else if (accept("/")) l = binary(BinOp::Div, l, parse_unary(s));
            else if (accept("%")) l = binary(BinOp::Mod, l, parse_unary(s));
            else return l;
        }
    }

    Expr parse_unary(const std::string& s) {
        if (accept("!")) return unary(UnOp::Not, parse_unary(s));
        if (is_punct("-")) {
            next();
            // "-12" is a literal; "-(12)" and "-x" are negations
            if (peek().kind == Tok::Int) return lit(Value(parse_int(next(), true)));
            return unary(UnOp::Neg, parse_unary(s));
        }
        return parse_primary(s);
    }

    Expr parse_primary(const std::string& s) {
        const Token& t = peek();
        if (accept("(")) {
            Expr e = parse_expr(s);
            expect(")");
            return e;
        }
        if (t.kind == Tok::Int) return lit(Value(parse_int(next(), false)));
        if (t.kind == Tok::String) return lit(Value(next().text));
        if (is_kw("true") || is_kw("false")) return lit(Value(next().text == "true"));
        if (t.kind == Tok::Ident && !kKeywords.count(t.text)) return var(parse_varref(s));
        fail(t.span, "syntax", "expected expression, found " + describe(t));
    }
};

ParseResult run(std::string_view config, std::string_view chor, bool split) {
    ParseResult r;
    try {
        SystemDecl decl;
        if (split) {
            Parser cp(lex(config), {});
            cp.parse_decls();
            cp.expect_end();
            decl = cp.decl();
        }
        Parser p(lex(chor), decl);
        if (!split) p.parse_decls();
        else if (p.at("comp"))
            fail(p.peek().span, "syntax", "component blocks belong in the configuration file in split mode");
        Program prog = p.parse_choreography();
        p.expect_end();
        r.program = std::move(prog);
    } catch (const ParseError& e) {
        r.diagnostics.push_back(e.diag);
    }
    return r;
}

} // namespace

ParseResult parse(std::string_view source) { return run({}, source, false); }

ParseResult parse_split(std::string_view config, std::string_view choreography) {
    return run(config, choreography, true);
}

} // namespace chor
