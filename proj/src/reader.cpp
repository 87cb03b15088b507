#include "unexpand/reader.hpp"

#include <cctype>

namespace unexpand {

namespace {

enum class Tok { name, qname, var, integer, punct, end };

struct Token {
    Tok kind;
    std::string text;
    Integer value;
    int line, col, end_line, end_col;
    bool layout_before = false;
};

bool is_graphic(char c) {
    switch (c) {
        case '+': case '-': case '*': case '/': case '\\': case '^': case '<': case '>':
        case '=': case '~': case ':': case '.': case '?': case '@': case '#': case '&':
        case '$':
            return true;
        default: return false;
    }
}

bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

struct PNode {
    Term term;
    int line, col, end_line, end_col;
    int prec = 0;
    std::vector<PNode> kids;
};

class Lexer {
public:
    Lexer(const std::string& text, std::size_t& pos, int& line, int& col, const std::string& module)
        : text_(text), pos_(pos), line_(line), col_(col), module_(module) {}

    // Tokens of the next sentence, including its end token; empty at end of input.
    std::vector<Token> sentence() {
        std::vector<Token> out;
        for (;;) {
            bool layout = skip_layout();
            if (pos_ >= text_.size()) {
                if (out.empty()) return out;
                throw syntax_error(module_, line_, col_, "unexpected end of input (missing '.')");
            }
            Token t = token();
            t.layout_before = layout;
            bool end = t.kind == Tok::end;
            out.push_back(std::move(t));
            if (end) return out;
        }
    }

private:
    char peek(std::size_t ahead = 0) const {
        return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
    }

    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    bool skip_layout() {
        bool any = false;
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
                any = true;
            } else if (c == '%') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
                any = true;
            } else {
                break;
            }
        }
        return any;
    }

    Token token() {
        Token t{};
        t.line = line_;
        t.col = col_;
        char c = peek();
        auto finish = [&](Tok kind) {
            t.kind = kind;
            t.end_line = line_;
            t.end_col = col_ - 1;
            return t;
        };
        if (std::isdigit(static_cast<unsigned char>(c))) {
            while (std::isdigit(static_cast<unsigned char>(peek()))) {
                t.text += peek();
                advance();
            }
            t.value = Integer(t.text);
            return finish(Tok::integer);
        }
        if (std::islower(static_cast<unsigned char>(c))) {
            while (is_alnum(peek())) {
                t.text += peek();
                advance();
            }
            return finish(Tok::name);
        }
        if (std::isupper(static_cast<unsigned char>(c)) || c == '_') {
            while (is_alnum(peek())) {
                t.text += peek();
                advance();
            }
            return finish(Tok::var);
        }
        if (c == '\'') return quoted(t);
        if (c == '(' || c == ')' || c == '[' || c == ']' || c == '{' || c == '}' || c == ',' ||
            c == '|') {
            t.text = c;
            advance();
            return finish(Tok::punct);
        }
        if (c == '!' || c == ';') {
            t.text = c;
            advance();
            return finish(Tok::name);
        }
        if (is_graphic(c)) {
            if (c == '.') {
                char n = peek(1);
                if (n == '\0' || n == '%' || std::isspace(static_cast<unsigned char>(n))) {
                    t.text = ".";
                    advance();
                    return finish(Tok::end);
                }
            }
            while (is_graphic(peek())) {
                t.text += peek();
                advance();
            }
            return finish(Tok::name);
        }
        throw syntax_error(module_, line_, col_, std::string("unexpected character '") + c + "'");
    }

    Token quoted(Token& t) {
        advance();  // opening quote
        for (;;) {
            if (pos_ >= text_.size())
                throw syntax_error(module_, t.line, t.col, "unterminated quoted atom");
            char c = peek();
            if (c == '\'') {
                if (peek(1) == '\'') {
                    t.text += '\'';
                    advance();
                    advance();
                    continue;
                }
                advance();
                break;
            }
            if (c == '\\') {
                advance();
                char e = peek();
                switch (e) {
                    case 'n': t.text += '\n'; break;
                    case 't': t.text += '\t'; break;
                    case '\\': t.text += '\\'; break;
                    case '\'': t.text += '\''; break;
                    default:
                        throw syntax_error(module_, line_, col_,
                                           std::string("unknown escape \\") + e);
                }
                advance();
                continue;
            }
            t.text += c;
            advance();
        }
        t.kind = Tok::qname;
        t.end_line = line_;
        t.end_col = col_ - 1;
        return t;
    }

    const std::string& text_;
    std::size_t& pos_;
    int& line_;
    int& col_;
    const std::string& module_;
};

class Parser {
public:
    Parser(const std::vector<Token>& toks, const OperatorTable& ops, const std::string& module,
           VarSource& vars)
        : toks_(toks), ops_(ops), module_(module), vars_(vars) {}

    Sentence sentence() {
        PNode root = parse(1200);
        if (at().kind != Tok::end) fail(at(), "operator expected");
        Sentence s{root.term, {}, std::move(names_), {}};
        const Token& end = at();
        s.span = {module_, toks_.front().line, toks_.front().col, end.end_line, end.end_col};
        TermPath path;
        flatten(root, path, s.subterm_spans);
        return s;
    }

private:
    const Token& at(std::size_t ahead = 0) const {
        std::size_t i = std::min(i_ + ahead, toks_.size() - 1);
        return toks_[i];
    }

    bool is_punct(const Token& t, char c) const {
        return t.kind == Tok::punct && t.text.size() == 1 && t.text[0] == c;
    }

    [[noreturn]] void fail(const Token& t, const std::string& msg) const {
        throw syntax_error(module_, t.line, t.col, msg);
    }

    void expect(char c) {
        if (!is_punct(at(), c)) fail(at(), std::string("expected '") + c + "'");
        ++i_;
    }

    void flatten(const PNode& n, TermPath& path, std::map<TermPath, SourceSpan>& out) const {
        out.emplace(path, SourceSpan{module_, n.line, n.col, n.end_line, n.end_col});
        for (std::uint32_t k = 0; k < n.kids.size(); ++k) {
            path.push_back(k);
            flatten(n.kids[k], path, out);
            path.pop_back();
        }
    }

    static PNode leaf(Term t, const Token& tok) {
        return PNode{std::move(t), tok.line, tok.col, tok.end_line, tok.end_col, 0, {}};
    }

    static PNode make(Term t, const PNode& first, int end_line, int end_col, int prec,
                      std::vector<PNode> kids) {
        return PNode{std::move(t), first.line, first.col, end_line, end_col, prec, std::move(kids)};
    }

    bool can_start_term(std::size_t ahead) const {
        const Token& t = at(ahead);
        switch (t.kind) {
            case Tok::integer:
            case Tok::var:
            case Tok::qname: return true;
            case Tok::punct: return is_punct(t, '(') || is_punct(t, '[') || is_punct(t, '{');
            case Tok::name: {
                const Token& after = at(ahead + 1);
                if (is_punct(after, '(') && !after.layout_before) return true;
                bool infixish = ops_.lookup(t.text, Fixity::infix) ||
                                ops_.lookup(t.text, Fixity::postfix);
                return !infixish || ops_.lookup(t.text, Fixity::prefix).has_value();
            }
            case Tok::end: return false;
        }
        return false;
    }

    PNode parse(int max_prec) {
        PNode left = primary(max_prec);
        return infix(std::move(left), max_prec);
    }

    Term variable(const std::string& name) {
        if (name == "_") return vars_.fresh();
        auto it = vars_by_name_.find(name);
        if (it != vars_by_name_.end()) return it->second;
        Term v = vars_.fresh(name);
        vars_by_name_.emplace(name, v);
        names_.emplace(v.var_id(), name);
        return v;
    }

    std::vector<PNode> arguments() {
        std::vector<PNode> args;
        args.push_back(parse(999));
        while (is_punct(at(), ',')) {
            ++i_;
            args.push_back(parse(999));
        }
        return args;
    }

    PNode list(const Token& open) {
        std::vector<PNode> items = arguments();
        std::optional<PNode> tail;
        if (is_punct(at(), '|')) {
            ++i_;
            tail = parse(999);
        }
        const Token& close = at();
        expect(']');
        PNode rest = tail ? std::move(*tail) : leaf(Term::atom("[]"), close);
        for (auto it = items.rbegin(); it != items.rend(); ++it) {
            PNode head = std::move(*it);
            Term cell = Term::compound(".", {head.term, rest.term});
            PNode n = make(cell, head, rest.end_line, rest.end_col, 0, {});
            n.kids.push_back(std::move(head));
            n.kids.push_back(std::move(rest));
            rest = std::move(n);
        }
        // the outermost cell spans the brackets
        rest.line = open.line;
        rest.col = open.col;
        rest.end_line = close.end_line;
        rest.end_col = close.end_col;
        return rest;
    }

    PNode primary(int max_prec) {
        const Token& t = at();
        switch (t.kind) {
            case Tok::integer: ++i_; return leaf(Term::integer(t.value), t);
            case Tok::var: ++i_; return leaf(variable(t.text), t);
            case Tok::end: fail(t, "unexpected end of clause");
            case Tok::punct: {
                if (is_punct(t, '(')) {
                    ++i_;
                    PNode inner = parse(1200);
                    const Token& close = at();
                    expect(')');
                    inner.line = t.line;
                    inner.col = t.col;
                    inner.end_line = close.end_line;
                    inner.end_col = close.end_col;
                    inner.prec = 0;
                    return inner;
                }
                if (is_punct(t, '[')) {
                    ++i_;
                    if (is_punct(at(), ']')) {
                        const Token& close = at();
                        ++i_;
                        PNode n = leaf(Term::atom("[]"), t);
                        n.end_line = close.end_line;
                        n.end_col = close.end_col;
                        return n;
                    }
                    return list(t);
                }
                if (is_punct(t, '{')) {
                    ++i_;
                    if (is_punct(at(), '}')) {
                        const Token& close = at();
                        ++i_;
                        PNode n = leaf(Term::atom("{}"), t);
                        n.end_line = close.end_line;
                        n.end_col = close.end_col;
                        return n;
                    }
                    PNode inner = parse(1200);
                    const Token& close = at();
                    expect('}');
                    PNode n = leaf(Term::compound("{}", {inner.term}), t);
                    n.end_line = close.end_line;
                    n.end_col = close.end_col;
                    n.kids.push_back(std::move(inner));
                    return n;
                }
                fail(t, "unexpected '" + t.text + "'");
            }
            case Tok::name:
            case Tok::qname: break;
        }
        ++i_;
        const Token& next = at();
        if (is_punct(next, '(') && !next.layout_before) {
            ++i_;
            std::vector<PNode> args = arguments();
            const Token& close = at();
            expect(')');
            std::vector<Term> terms;
            for (const auto& a : args) terms.push_back(a.term);
            PNode n = leaf(Term::compound(t.text, std::move(terms)), t);
            n.end_line = close.end_line;
            n.end_col = close.end_col;
            n.kids = std::move(args);
            return n;
        }
        if (t.kind == Tok::name && t.text == "-" && next.kind == Tok::integer && !next.layout_before) {
            ++i_;
            PNode n = leaf(Term::integer(-next.value), t);
            n.end_line = next.end_line;
            n.end_col = next.end_col;
            return n;
        }
        if (t.kind == Tok::name) {
            if (auto def = ops_.lookup(t.text, Fixity::prefix); def && can_start_term(0)) {
                if (def->priority > max_prec)
                    fail(t, "operator priority clash for prefix '" + t.text + "'");
                int arg_max = def->type == OpType::fy ? def->priority : def->priority - 1;
                PNode arg = parse(arg_max);
                int el = arg.end_line, ec = arg.end_col;
                PNode n = leaf(Term::compound(t.text, {arg.term}), t);
                n.end_line = el;
                n.end_col = ec;
                n.prec = def->priority;
                n.kids.push_back(std::move(arg));
                return n;
            }
        }
        return leaf(Term::atom(t.text), t);
    }

    PNode infix(PNode left, int max_prec) {
        for (;;) {
            const Token& t = at();
            std::string name;
            if (t.kind == Tok::name) name = t.text;
            else if (is_punct(t, ',') || is_punct(t, '|')) name = t.text;
            else break;

            if (auto def = ops_.lookup(name, Fixity::infix)) {
                int p = def->priority;
                int lmax = def->type == OpType::yfx ? p : p - 1;
                int rmax = def->type == OpType::xfy ? p : p - 1;
                if (p <= max_prec && left.prec <= lmax) {
                    ++i_;
                    PNode right = parse(rmax);
                    int el = right.end_line, ec = right.end_col;
                    Term term = Term::compound(name, {left.term, right.term});
                    std::vector<PNode> kids;
                    kids.push_back(std::move(left));
                    kids.push_back(std::move(right));
                    PNode n{std::move(term), kids[0].line, kids[0].col, el, ec, p, {}};
                    n.kids = std::move(kids);
                    left = std::move(n);
                    continue;
                }
            }
            if (auto def = ops_.lookup(name, Fixity::postfix)) {
                int p = def->priority;
                int lmax = def->type == OpType::yf ? p : p - 1;
                if (p <= max_prec && left.prec <= lmax) {
                    ++i_;
                    Term term = Term::compound(name, {left.term});
                    PNode n{std::move(term), left.line, left.col, t.end_line, t.end_col, p, {}};
                    n.kids.push_back(std::move(left));
                    left = std::move(n);
                    continue;
                }
            }
            break;
        }
        return left;
    }

    const std::vector<Token>& toks_;
    const OperatorTable& ops_;
    const std::string& module_;
    VarSource& vars_;
    std::size_t i_ = 0;
    std::unordered_map<std::string, Term> vars_by_name_;
    std::unordered_map<VarId, std::string> names_;
};

}  // namespace

bool SourceSpan::contains(const SourceSpan& inner) const {
    auto before = [](int l1, int c1, int l2, int c2) { return l1 < l2 || (l1 == l2 && c1 <= c2); };
    return before(start_line, start_col, inner.start_line, inner.start_col) &&
           before(inner.end_line, inner.end_col, end_line, end_col);
}

SourceSpan Sentence::span_of(const TermPath& path) const {
    TermPath p = path;
    for (;;) {
        auto it = subterm_spans.find(p);
        if (it != subterm_spans.end()) return it->second;
        if (p.empty()) return span;
        p.pop_back();
    }
}

syntax_error::syntax_error(const std::string& module, int line, int col, const std::string& message)
    : error(module + ":" + std::to_string(line) + ":" + std::to_string(col) +
            ": syntax error: " + message),
      line_(line),
      col_(col) {}

Reader::Reader(std::string_view text, const OperatorTable& ops, std::string module, VarSource& vars)
    : text_(text), ops_(&ops), module_(std::move(module)), vars_(&vars) {}

std::optional<Sentence> Reader::next() {
    Lexer lexer(text_, pos_, line_, col_, module_);
    std::vector<Token> toks = lexer.sentence();
    if (toks.empty()) return std::nullopt;
    if (toks.size() == 1) throw syntax_error(module_, toks[0].line, toks[0].col, "empty clause");
    Parser parser(toks, *ops_, module_, *vars_);
    return parser.sentence();
}

std::optional<Sentence> read_sentence(std::string_view text, const OperatorTable& ops,
                                      const std::string& module) {
    Reader reader(text, ops, module);
    return reader.next();
}

Sentence read_term(std::string_view text, const OperatorTable& ops, const std::string& module) {
    std::string buf(text);
    auto last = buf.find_last_not_of(" \t\r\n");
    if (last == std::string::npos) throw syntax_error(module, 1, 1, "empty query");
    buf.resize(last + 1);
    if (buf.back() != '.' || (buf.size() > 1 && is_graphic(buf[buf.size() - 2]))) buf += " .";
    Reader reader(buf, ops, module);
    auto s = reader.next();
    if (!s) throw syntax_error(module, 1, 1, "empty query");
    if (reader.next()) throw syntax_error(module, 1, 1, "more than one term in query");
    return *s;
}

}  // namespace unexpand
