#include "unexpand/writer.hpp"

#include <cctype>
#include <unordered_map>
#include <unordered_set>

namespace unexpand {

namespace {

bool graphic_char(char c) {
    switch (c) {
        case '+': case '-': case '*': case '/': case '\\': case '^': case '<': case '>':
        case '=': case '~': case ':': case '.': case '?': case '@': case '#': case '&':
        case '$':
            return true;
        default: return false;
    }
}

bool alnum_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

bool alpha_name(std::string_view s) {
    if (s.empty() || !std::islower(static_cast<unsigned char>(s[0]))) return false;
    for (char c : s)
        if (!alnum_char(c)) return false;
    return true;
}

class Writer {
public:
    explicit Writer(const WriteOptions& opts) : opts_(opts) {}

    void set_mark(const TermPath& path) { mark_path_ = path; }
    std::optional<std::pair<std::size_t, std::size_t>> mark() const { return mark_; }
    std::string& out() { return out_; }

    void prepare_names(const Term& t) {
        if (opts_.var_naming != VarNaming::canonical) return;
        std::vector<Term> vars;
        collect(t, vars);
        for (const auto& v : vars) {
            if (names_.contains(v.var_id())) continue;
            std::string name = v.var_name();
            if (name.empty() || name == "_") {
                do name = "_" + std::to_string(++counter_);
                while (used_.contains(name));
            } else if (used_.contains(name)) {
                std::string base = name;
                int k = 1;
                do name = base + "_" + std::to_string(k++);
                while (used_.contains(name));
            }
            used_.insert(name);
            names_.emplace(v.var_id(), name);
        }
    }

    void emit(std::string_view tok) {
        if (tok.empty()) return;
        if (!out_.empty()) {
            char a = out_.back(), b = tok.front();
            if ((alnum_char(a) && alnum_char(b)) || (graphic_char(a) && graphic_char(b))) {
                out_ += ' ';
            }
        }
        out_ += tok;
    }

    void write(const Term& raw, int max_prec, bool top) {
        Term t = opts_.bindings ? opts_.bindings->deref(raw) : raw;
        const bool marked = mark_path_ && path_ == *mark_path_;
        const std::size_t start = out_.size();
        write_node(t, max_prec, top);
        if (marked) {
            std::size_t s = start;
            while (s < out_.size() && out_[s] == ' ') ++s;
            mark_ = {s, out_.size()};
        }
    }

private:
    void collect(const Term& raw, std::vector<Term>& vars) const {
        Term t = opts_.bindings ? opts_.bindings->deref(raw) : raw;
        if (t.is_var()) vars.push_back(t);
        for (const auto& a : t.args()) collect(a, vars);
    }

    std::string var_text(const Term& v) {
        if (opts_.var_naming == VarNaming::canonical) {
            auto it = names_.find(v.var_id());
            if (it != names_.end()) return it->second;
            prepare_names(v);
            return names_.at(v.var_id());
        }
        if (opts_.var_naming == VarNaming::display && !v.var_name().empty() && v.var_name() != "_")
            return v.var_name();
        return "_G" + std::to_string(v.var_id());
    }

    void arg(const Term& t, std::uint32_t index, int max_prec) {
        path_.push_back(index);
        write(t, max_prec, false);
        path_.pop_back();
    }

    void write_node(const Term& t, int max_prec, bool top) {
        switch (t.kind()) {
            case Term::Kind::var: emit(var_text(t)); return;
            case Term::Kind::integer: emit(t.value().str()); return;
            case Term::Kind::atom: write_atom(t.name(), max_prec); return;
            case Term::Kind::compound: break;
        }
        const std::string& f = t.name();
        if (f == "." && t.arity() == 2) return write_list(t);
        if (f == "{}" && t.arity() == 1 && !(top && opts_.canonical_top)) {
            emit("{");
            arg(t.arg(0), 0, 1200);
            emit("}");
            return;
        }
        if (opts_.ops && !(top && opts_.canonical_top)) {
            if (t.arity() == 2) {
                if (auto def = opts_.ops->lookup(f, Fixity::infix)) return write_infix(t, *def, max_prec);
            } else if (t.arity() == 1) {
                if (auto def = opts_.ops->lookup(f, Fixity::prefix)) return write_prefix(t, *def, max_prec);
                if (auto def = opts_.ops->lookup(f, Fixity::postfix))
                    return write_postfix(t, *def, max_prec);
            }
        }
        emit(quote_atom(f));
        out_ += '(';
        for (std::uint32_t i = 0; i < t.arity(); ++i) {
            if (i) out_ += ',';
            arg(t.arg(i), i, 999);
        }
        out_ += ')';
    }

    void write_atom(const std::string& name, int max_prec) {
        std::string text = quote_atom(name);
        bool is_op = opts_.ops && opts_.ops->is_operator(name);
        int prio = 0;
        if (is_op)
            for (auto fx : {Fixity::prefix, Fixity::infix, Fixity::postfix})
                if (auto d = opts_.ops->lookup(name, fx)) prio = std::max(prio, d->priority);
        if (is_op && prio > max_prec) {
            emit("(");
            emit(text);
            emit(")");
        } else {
            emit(text);
        }
    }

    void write_list(const Term& t) {
        emit("[");
        arg(t.arg(0), 0, 999);
        Term tail = t.arg(1);
        path_.push_back(1);
        std::size_t depth = 1;
        for (;;) {
            Term d = opts_.bindings ? opts_.bindings->deref(tail) : tail;
            if (d.has_functor(".", 2)) {
                out_ += ',';
                arg(d.arg(0), 0, 999);
                tail = d.arg(1);
                path_.push_back(1);
                ++depth;
                continue;
            }
            if (!d.is_atom("[]")) {
                out_ += '|';
                write(d, 999, false);
            }
            break;
        }
        path_.resize(path_.size() - depth);
        out_ += ']';
    }

    void write_operator(const std::string& name, int priority) {
        if (name == ",") {
            out_ += ',';
            return;
        }
        std::string text = name == "|" ? "|" : quote_atom(name);
        if (alpha_name(name) || priority >= opts_.spacing_threshold) {
            out_ += ' ';
            out_ += text;
            out_ += ' ';
        } else {
            emit(text);
        }
    }

    void write_infix(const Term& t, OpDef def, int max_prec) {
        int p = def.priority;
        int lmax = def.type == OpType::yfx ? p : p - 1;
        int rmax = def.type == OpType::xfy ? p : p - 1;
        bool paren = p > max_prec;
        if (paren) emit("(");
        arg(t.arg(0), 0, lmax);
        write_operator(t.name(), p);
        arg(t.arg(1), 1, rmax);
        if (paren) out_ += ')';
    }

    void write_prefix(const Term& t, OpDef def, int max_prec) {
        int p = def.priority;
        int amax = def.type == OpType::fy ? p : p - 1;
        bool paren = p > max_prec;
        if (paren) emit("(");
        emit(quote_atom(t.name()));
        Term a = opts_.bindings ? opts_.bindings->deref(t.arg(0)) : t.arg(0);
        bool needs_space = alpha_name(t.name()) || a.is_integer() ||
                           (a.is_compound() && !a.has_functor(".", 2) && !a.has_functor("{}", 1)) ||
                           (a.is_atom() && opts_.ops->is_operator(a.name()));
        if (needs_space) out_ += ' ';
        arg(t.arg(0), 0, amax);
        if (paren) out_ += ')';
    }

    void write_postfix(const Term& t, OpDef def, int max_prec) {
        int p = def.priority;
        int amax = def.type == OpType::yf ? p : p - 1;
        bool paren = p > max_prec;
        if (paren) emit("(");
        arg(t.arg(0), 0, amax);
        emit(quote_atom(t.name()));
        if (paren) out_ += ')';
    }

    const WriteOptions& opts_;
    std::string out_;
    TermPath path_;
    std::optional<TermPath> mark_path_;
    std::optional<std::pair<std::size_t, std::size_t>> mark_;
    std::unordered_map<VarId, std::string> names_;
    std::unordered_set<std::string> used_;
    int counter_ = 0;
};

}  // namespace

std::string quote_atom(std::string_view name) {
    if (name == "[]" || name == "{}" || name == "!" || name == ";") return std::string(name);
    if (alpha_name(name)) return std::string(name);
    bool all_graphic = !name.empty();
    for (char c : name) all_graphic = all_graphic && graphic_char(c);
    if (all_graphic && name != ".") return std::string(name);
    std::string out = "'";
    for (char c : name) {
        switch (c) {
            case '\'': out += "\\'"; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    out += '\'';
    return out;
}

std::string write_term(const Term& t, const WriteOptions& opts) {
    Writer w(opts);
    w.prepare_names(t);
    w.write(t, opts.max_priority, true);
    return std::move(w.out());
}

std::string write_term(const Term& t, const OperatorTable& ops, const Substitution& s) {
    WriteOptions opts;
    opts.ops = &ops;
    opts.bindings = &s;
    return write_term(t, opts);
}

MarkedText write_term_marked(const Term& t, const WriteOptions& opts, const TermPath& mark) {
    Writer w(opts);
    w.set_mark(mark);
    w.prepare_names(t);
    w.write(t, opts.max_priority, true);
    return {std::move(w.out()), w.mark()};
}

std::string format_clause(const Term& clause, const WriteOptions& opts) {
    Writer w(opts);
    w.prepare_names(clause);
    if (clause.has_functor(":-", 2) && !clause.arg(1).is_atom("true")) {
        w.write(clause.arg(0), 1199, false);
        w.out() += " :-";
        auto goals = conjunction_goals(clause.arg(1));
        for (std::size_t i = 0; i < goals.size(); ++i) {
            w.out() += "\n    ";
            w.write(goals[i], 999, false);
            if (i + 1 < goals.size()) w.out() += ',';
        }
    } else if (clause.has_functor(":-", 1)) {
        w.out() += ":- ";
        w.write(clause.arg(0), 1199, false);
    } else {
        w.write(clause.has_functor(":-", 2) ? clause.arg(0) : clause, 1199, false);
    }
    w.emit(".");
    w.out() += '\n';
    return std::move(w.out());
}

}  // namespace unexpand
