#include "chor/promela.hpp"

#include <cctype>
#include <map>
#include <set>
#include <vector>

namespace chor {

namespace {

struct Macro {
    std::vector<std::string> params;
    std::string body;
    bool function_like = false;
};

struct PTok {
    enum Kind { Ident, Number, Punct, End } kind;
    std::string text;
    int line;
};

class Failure {
public:
    Failure(int line, std::string rule, std::string msg) : d{{line, 0}, std::move(rule), std::move(msg)} {}
    Diagnostic d;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::string strip_comments(std::string_view s) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s.compare(i, 2, "/*") == 0) {
            auto e = s.find("*/", i + 2);
            if (e == std::string_view::npos) throw Failure(0, "lex", "unterminated comment");
            for (std::size_t k = i; k < e + 2; ++k)
                if (s[k] == '\n') out += '\n';
            i = e + 1;
        } else if (s.compare(i, 2, "//") == 0) {
            while (i < s.size() && s[i] != '\n') ++i;
            if (i < s.size()) out += '\n';
        } else {
            out += s[i];
        }
    }
    return out;
}

// Expands identifiers in `text` against the macro table.
std::string expand(const std::string& text, const std::map<std::string, Macro>& macros, int depth, int line) {
    if (depth > 32) throw Failure(line, "macro", "macro expansion too deep");
    std::string out;
    std::size_t i = 0;
    while (i < text.size()) {
        if (!ident_start(text[i])) {
            out += text[i++];
            continue;
        }
        std::size_t j = i;
        while (j < text.size() && ident_char(text[j])) ++j;
        std::string id = text.substr(i, j - i);
        auto it = macros.find(id);
        if (it == macros.end()) {
            out += id;
            i = j;
            continue;
        }
        const Macro& m = it->second;
        if (!m.function_like) {
            out += expand(m.body, macros, depth + 1, line);
            i = j;
            continue;
        }
        std::size_t k = j;
        while (k < text.size() && text[k] == ' ') ++k;
        if (k >= text.size() || text[k] != '(') {
            out += id;
            i = j;
            continue;
        }
        std::vector<std::string> args(1);
        int nest = 0;
        ++k;
        for (; k < text.size(); ++k) {
            char c = text[k];
            if (c == '(') ++nest;
            if (c == ')') {
                if (nest == 0) break;
                --nest;
            }
            if (c == ',' && nest == 0) args.emplace_back();
            else args.back() += c;
        }
        if (k >= text.size()) throw Failure(line, "macro", "unterminated argument list for " + id);
        if (args.size() == 1 && args[0].find_first_not_of(' ') == std::string::npos && m.params.empty()) args.clear();
        if (args.size() != m.params.size())
            throw Failure(line, "macro", id + " expects " + std::to_string(m.params.size()) + " argument(s)");
        std::string body;
        for (std::size_t b = 0; b < m.body.size();) {
            if (ident_start(m.body[b])) {
                std::size_t e = b;
                while (e < m.body.size() && ident_char(m.body[e])) ++e;
                std::string w = m.body.substr(b, e - b);
                bool replaced = false;
                for (std::size_t p = 0; p < m.params.size(); ++p)
                    if (m.params[p] == w) {
                        body += args[p];
                        replaced = true;
                    }
                if (!replaced) body += w;
                b = e;
            } else {
                body += m.body[b++];
            }
        }
        out += expand(body, macros, depth + 1, line);
        i = k + 1;
    }
    return out;
}

std::string trim(std::string s) {
    auto a = s.find_first_not_of(" \t");
    auto b = s.find_last_not_of(" \t");
    return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

// Handles #define lines and expands the rest; returns one expanded line per
// input line so that line numbers survive.
std::vector<std::string> preprocess(std::string_view src, std::map<std::string, Macro>& macros) {
    std::vector<std::string> lines;
    std::string text = strip_comments(src);
    std::size_t start = 0;
    int line = 0;
    while (start <= text.size()) {
        auto nl = text.find('\n', start);
        std::string l = text.substr(start, nl == std::string::npos ? std::string::npos : nl - start);
        ++line;
        std::string t = trim(l);
        if (!t.empty() && t[0] == '#') {
            if (t.rfind("#define", 0) != 0) throw Failure(line, "preprocessor", "unsupported directive: " + t);
            std::string rest = trim(t.substr(7));
            std::size_t e = 0;
            while (e < rest.size() && ident_char(rest[e])) ++e;
            if (e == 0) throw Failure(line, "preprocessor", "#define without a name");
            std::string name = rest.substr(0, e);
            Macro m;
            if (e < rest.size() && rest[e] == '(') {
                auto close = rest.find(')', e);
                if (close == std::string::npos) throw Failure(line, "preprocessor", "unterminated parameter list");
                m.function_like = true;
                std::string ps = rest.substr(e + 1, close - e - 1);
                std::size_t p0 = 0;
                while (!trim(ps).empty()) {
                    auto comma = ps.find(',', p0);
                    m.params.push_back(trim(ps.substr(p0, comma == std::string::npos ? std::string::npos : comma - p0)));
                    if (comma == std::string::npos) break;
                    p0 = comma + 1;
                }
                m.body = trim(rest.substr(close + 1));
            } else {
                m.body = trim(rest.substr(e));
            }
            if (macros.count(name)) throw Failure(line, "preprocessor", "macro " + name + " defined twice");
            macros[name] = m;
            lines.emplace_back();
        } else {
            lines.push_back(expand(l, macros, 0, line));
        }
        if (nl == std::string::npos) break;
        start = nl + 1;
    }
    return lines;
}

std::vector<PTok> lex(const std::vector<std::string>& lines) {
    static const char* puncts[] = {"::", "->", "==", "!=", "<=", ">=", "&&", "||", "++", "--", "{", "}", "(", ")",
                                   "[",  "]",  ";",  ",",  "=",  "!",  "?",  "+",  "-",  "*",  "/",  "%", "<", ">", ":"};
    std::vector<PTok> out;
    for (std::size_t n = 0; n < lines.size(); ++n) {
        const std::string& s = lines[n];
        int line = static_cast<int>(n) + 1;
        std::size_t i = 0;
        while (i < s.size()) {
            char c = s[i];
            if (std::isspace(static_cast<unsigned char>(c))) {
                ++i;
                continue;
            }
            if (ident_start(c)) {
                std::size_t j = i;
                while (j < s.size() && ident_char(s[j])) ++j;
                out.push_back({PTok::Ident, s.substr(i, j - i), line});
                i = j;
                continue;
            }
            if (std::isdigit(static_cast<unsigned char>(c))) {
                std::size_t j = i;
                while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
                out.push_back({PTok::Number, s.substr(i, j - i), line});
                i = j;
                continue;
            }
            bool matched = false;
            for (const char* p : puncts) {
                std::string_view pv(p);
                if (s.compare(i, pv.size(), pv) == 0) {
                    out.push_back({PTok::Punct, std::string(pv), line});
                    i += pv.size();
                    matched = true;
                    break;
                }
            }
            if (!matched) throw Failure(line, "lex", std::string("unexpected character '") + c + "'");
        }
    }
    out.push_back({PTok::End, "", lines.empty() ? 0 : static_cast<int>(lines.size())});
    return out;
}

const std::set<std::string> kTypes = {"int", "bool", "bit", "byte", "short", "chan"};

class Checker {
public:
    Checker(std::vector<PTok> toks, const std::map<std::string, Macro>& macros) : t_(std::move(toks)) {
        for (const auto& [name, m] : macros)
            if (!m.function_like) globals_.insert(name);
        globals_.insert("_");
    }

    void program() {
        // Proctype names may be used by `run` before their definition.
        for (std::size_t i = 0; i + 1 < t_.size(); ++i)
            if (t_[i].kind == PTok::Ident && t_[i].text == "proctype") procs_.insert(t_[i + 1].text);
        while (peek().kind != PTok::End) {
            if (is("proctype") || is("active")) proctype();
            else if (is("init")) init();
            else if (is("ltl")) ltl();
            else {
                decl(globals_);
                expect(";");
            }
        }
    }

private:
    std::vector<PTok> t_;
    std::size_t pos_ = 0;
    std::set<std::string> globals_;
    std::set<std::string> locals_;
    std::set<std::string> procs_;
    std::set<std::string> defined_procs_;
    int loop_depth_ = 0;

    const PTok& peek(std::size_t k = 0) const { return t_[std::min(pos_ + k, t_.size() - 1)]; }
    bool is(std::string_view s, std::size_t k = 0) const { return peek(k).kind != PTok::End && peek(k).text == s; }
    [[noreturn]] void fail(const std::string& msg) const { throw Failure(peek().line, "syntax", msg); }
    const PTok& take() { return t_[pos_ < t_.size() - 1 ? pos_++ : pos_]; }
    void expect(std::string_view s) {
        if (!is(s)) fail("expected '" + std::string(s) + "', found '" + peek().text + "'");
        take();
    }
    std::string ident() {
        if (peek().kind != PTok::Ident) fail("expected identifier, found '" + peek().text + "'");
        return take().text;
    }
    bool known(const std::string& n) const { return globals_.count(n) || locals_.count(n); }
    void use(const std::string& n) {
        if (!known(n)) throw Failure(t_[pos_ - 1].line, "undeclared", "undeclared identifier '" + n + "'");
    }

    void decl(std::set<std::string>& scope) {
        std::string type = ident();
        if (!kTypes.count(type)) fail("expected declaration, found '" + type + "'");
        do {
            std::string name = ident();
            if (scope.count(name)) throw Failure(t_[pos_ - 1].line, "duplicate", "'" + name + "' declared twice");
            if (type == "chan") {
                expect("=");
                expect("[");
                expr();
                expect("]");
                if (ident() != "of") fail("expected 'of'");
                expect("{");
                do {
                    std::string et = ident();
                    if (!kTypes.count(et) || et == "chan") fail("bad channel element type '" + et + "'");
                } while (is(",") && (take(), true));
                expect("}");
            } else if (is("=")) {
                take();
                expr();
            }
            scope.insert(name);
        } while (is(",") && (take(), true));
    }

    void proctype() {
        if (is("active")) take();
        expect("proctype");
        std::string name = ident();
        if (!defined_procs_.insert(name).second) fail("proctype " + name + " defined twice");
        expect("(");
        expect(")");
        locals_.clear();
        block();
        locals_.clear();
    }

    void init() {
        expect("init");
        locals_.clear();
        block();
    }

    void ltl() {
        expect("ltl");
        ident();
        expect("{");
        ltl_impl();
        expect("}");
    }

    void ltl_impl() {
        ltl_or();
        if (is("->")) {
            take();
            ltl_impl();
        }
    }

    void ltl_or() {
        ltl_and();
        while (is("||")) {
            take();
            ltl_and();
        }
    }

    void ltl_and() {
        ltl_until();
        while (is("&&")) {
            take();
            ltl_until();
        }
    }

    void ltl_until() {
        ltl_unary();
        while (is("U") || is("V")) {
            take();
            ltl_unary();
        }
    }

    void ltl_unary() {
        if (is("!") || is("X")) {
            take();
            ltl_unary();
        } else if (is("[") && is("]", 1)) {
            take();
            take();
            ltl_unary();
        } else if (is("<") && is(">", 1)) {
            take();
            take();
            ltl_unary();
        } else {
            ltl_primary();
            if (peek().kind == PTok::Punct && prec(peek().text) >= 3) {
                take();
                binary(3);
            }
        }
    }

    void ltl_primary() {
        if (is("(")) {
            take();
            ltl_impl();
            expect(")");
        } else {
            unary_expr();
        }
    }

    void block() {
        expect("{");
        sequence({"}"});
        expect("}");
    }

    // Steps separated by ';' or '->' until one of the terminators.
    void sequence(std::initializer_list<std::string_view> stop) {
        auto at_stop = [&] {
            for (auto s : stop)
                if (is(s)) return true;
            return peek().kind == PTok::End;
        };
        bool any = false;
        while (!at_stop()) {
            step();
            any = true;
            while (is(";") || is("->")) take();
        }
        if (!any) fail("empty statement sequence");
    }

    void step() {
        if (peek().kind == PTok::Ident && kTypes.count(peek().text)) {
            decl(locals_);
            return;
        }
        statement();
    }

    void options(std::string_view close) {
        if (!is("::")) fail("expected '::' option");
        while (is("::")) {
            take();
            if (is("else")) take();
            sequence({"::", close});
        }
        expect(close);
    }

    void statement() {
        if (is("do")) {
            take();
            ++loop_depth_;
            options("od");
            --loop_depth_;
        } else if (is("if")) {
            take();
            options("fi");
        } else if (is("atomic") || is("d_step")) {
            take();
            block();
        } else if (is("break")) {
            if (loop_depth_ == 0) fail("break outside do");
            take();
        } else if (is("skip")) {
            take();
        } else if (is("run")) {
            take();
            std::string p = ident();
            if (!procs_.count(p)) throw Failure(peek().line, "undeclared", "run of unknown proctype '" + p + "'");
            expect("(");
            expect(")");
        } else if (peek().kind == PTok::Ident && (is("!", 1) || is("?", 1))) {
            std::string ch = ident();
            use(ch);
            bool recv = take().text == "?";
            args(recv);
        } else if (peek().kind == PTok::Ident && is("=", 1)) {
            std::string v = ident();
            use(v);
            take();
            expr();
        } else if (peek().kind == PTok::Ident && (is("++", 1) || is("--", 1))) {
            use(ident());
            take();
        } else {
            expr();
        }
    }

    void args(bool recv) {
        bool paren = is("(");
        if (paren) take();
        do {
            if (recv) {
                if (peek().kind == PTok::Number) take();
                else use(ident());
            } else {
                expr();
            }
        } while (is(",") && (take(), true));
        if (paren) expect(")");
    }

    // Precedence climbing over the usual C-like operators.
    void expr() { binary(0); }

    static int prec(const std::string& op) {
        static const std::map<std::string, int> p = {{"||", 1}, {"&&", 2}, {"==", 3}, {"!=", 3}, {"<", 4},
                                                      {"<=", 4}, {">", 4},  {">=", 4}, {"+", 5},  {"-", 5},
                                                      {"*", 6},  {"/", 6},  {"%", 6}};
        auto it = p.find(op);
        return it == p.end() ? -1 : it->second;
    }

    void binary(int min) {
        unary_expr();
        while (peek().kind == PTok::Punct && prec(peek().text) > min) {
            int p = prec(take().text);
            binary(p);
        }
    }

    void unary_expr() {
        if (is("!") || is("-")) {
            take();
            unary_expr();
            return;
        }
        if (is("(")) {
            take();
            expr();
            expect(")");
            return;
        }
        if (peek().kind == PTok::Number) {
            take();
            return;
        }
        if (is("true") || is("false")) {
            take();
            return;
        }
        if (peek().kind == PTok::Ident) {
            use(ident());
            return;
        }
        fail("expected expression, found '" + peek().text + "'");
    }
};

} // namespace

Diagnostics validate_promela(std::string_view text) {
    try {
        std::map<std::string, Macro> macros;
        auto lines = preprocess(text, macros);
        Checker c(lex(lines), macros);
        c.program();
        return {};
    } catch (const Failure& f) {
        return {f.d};
    }
}

} // namespace chor
