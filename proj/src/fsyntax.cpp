#include "unexpand/fsyntax.hpp"

#include <string>

namespace unexpand {

namespace {

TermPath child(TermPath p, std::uint32_t k) {
    p.push_back(k);
    return p;
}

bool is_control(const Term& g) {
    return g.has_functor(",", 2) || g.has_functor(";", 2) || g.has_functor("->", 2) || g.is_atom("!");
}

class Flattener {
public:
    explicit Flattener(const FunctionSet* fns) : fns_(fns) {}

    Flattened run(const Term& e, const std::optional<Term>& out, const TermPath& path) {
        Term r = expr(e, out, path);
        return {std::move(goals_), r};
    }

    std::vector<FlatGoal> goal(const Term& g, const TermPath& path) {
        if (g.is_compound() && !g.has_functor("call", g.arity())) {
            std::vector<Term> args;
            bool changed = false;
            for (std::uint32_t i = 0; i < g.arity(); ++i) {
                args.push_back(data(g.arg(i), child(path, i)));
                changed = changed || args.back().identity() != g.arg(i).identity();
            }
            goals_.push_back({changed ? Term::compound(g.name(), std::move(args)) : g, path});
        } else {
            goals_.push_back({g, path});
        }
        return std::move(goals_);
    }

private:
    bool is_call(const Term& t) const {
        if (!t.is_compound() || t.has_functor(".", 2) || is_arith_expr(t)) return false;
        if (!fns_) return true;
        return fns_->contains({t.name(), t.arity()});
    }

    Term fresh_temp() { return global_var_source().fresh("T" + std::to_string(++temps_)); }

    // Value of an expression in evaluated position.
    Term expr(const Term& e, const std::optional<Term>& out, const TermPath& path) {
        if (is_arith_expr(e)) {
            Term inline_expr = arith(e, path);
            Term t = out ? *out : fresh_temp();
            goals_.push_back({Term::compound("is", {t, inline_expr}), path});
            return t;
        }
        if (is_call(e)) return call(e, out, path);
        return data(e, path);
    }

    Term call(const Term& e, const std::optional<Term>& out, const TermPath& path) {
        std::vector<Term> args;
        for (std::uint32_t i = 0; i < e.arity(); ++i) {
            // arguments of a ':=' function call are evaluated; elsewhere only nested calls are
            args.push_back(fns_ ? data(e.arg(i), child(path, i)) : expr(e.arg(i), std::nullopt, child(path, i)));
        }
        Term t = out ? *out : fresh_temp();
        args.push_back(t);
        goals_.push_back({Term::compound(e.name(), std::move(args)), path});
        return t;
    }

    // Operands of an arithmetic expression: nested arithmetic stays inline.
    Term arith(const Term& e, const TermPath& path) {
        if (is_arith_expr(e)) {
            std::vector<Term> args;
            for (std::uint32_t i = 0; i < e.arity(); ++i) args.push_back(arith(e.arg(i), child(path, i)));
            return Term::compound(e.name(), std::move(args));
        }
        if (is_call(e)) return call(e, std::nullopt, path);
        return data(e, path);
    }

    // Data position: keep the term, flattening calls found inside it.
    Term data(const Term& e, const TermPath& path) {
        if (!e.is_compound()) return e;
        if (is_call(e)) return call(e, std::nullopt, path);
        std::vector<Term> args;
        bool changed = false;
        for (std::uint32_t i = 0; i < e.arity(); ++i) {
            const Term& a = e.arg(i);
            args.push_back(data(a, child(path, i)));
            changed = changed || args.back().identity() != a.identity();
        }
        return changed ? Term::compound(e.name(), std::move(args)) : e;
    }

    const FunctionSet* fns_;
    std::vector<FlatGoal> goals_;
    int temps_ = 0;
};

struct Option {
    std::optional<Term> cond;
    Term value;
    TermPath cond_path, value_path;
};

std::vector<Option> options_of(const Term& rhs, const TermPath& path, const AnnotatedClause& s) {
    std::vector<Option> out;
    Term cur = rhs;
    TermPath p = path;
    for (;;) {
        Term opt = cur;
        TermPath op = p;
        bool more = cur.has_functor("|", 2);
        if (more) {
            opt = cur.arg(0);
            op = child(p, 0);
        }
        if (opt.has_functor("?", 2)) {
            Term v = opt.arg(1);
            if (v.has_functor("|", 2) || v.has_functor("?", 2))
                throw translation_error(s.span_of(child(op, 1)), "nested alternatives in a guarded value");
            out.push_back({opt.arg(0), v, child(op, 0), child(op, 1)});
        } else {
            if (opt.has_functor("|", 2)) throw translation_error(s.span_of(op), "malformed alternatives");
            out.push_back({std::nullopt, opt, {}, op});
        }
        if (!more) break;
        cur = cur.arg(1);
        p = child(p, 1);
    }
    return out;
}

Term add_arg(const Term& head, const Term& extra) {
    std::vector<Term> args;
    if (head.is_compound())
        for (const auto& a : head.args()) args.push_back(a);
    args.push_back(extra);
    return Term::compound(head.name(), std::move(args));
}

Term goal_info(const Term& g, const Term& si) { return Term::compound("$goal_info", {g, si}); }

// Builds a clause body; records wrapper spans in depth-first order.
class BodyBuilder {
public:
    BodyBuilder(const AnnotatedClause& s, const Term& si, bool annotate)
        : s_(s), si_(si), annotate_(annotate) {}

    void plain(const Term& g) { goals_.push_back(g); }

    // A group of generated goals, wrapped as a whole and (when it holds more
    // than one traced goal) individually.
    void group(const std::vector<FlatGoal>& gs, const TermPath& group_path, bool cut = false) {
        if (!annotate_) {
            if (cut) goals_.push_back(Term::atom("!"));
            for (const auto& g : gs) goals_.push_back(g.goal);
            return;
        }
        if (gs.empty() && !cut) return;
        if (gs.size() == 1 && !cut) {
            spans_.push_back(s_.span_of(gs[0].path));
            goals_.push_back(goal_info(gs[0].goal, si_));
            return;
        }
        spans_.push_back(s_.span_of(group_path));
        std::vector<Term> inner;
        if (cut) inner.push_back(Term::atom("!"));
        for (const auto& g : gs) {
            spans_.push_back(s_.span_of(g.path));
            inner.push_back(goal_info(g.goal, si_));
        }
        goals_.push_back(goal_info(make_conjunction(inner), si_));
    }

    Term body() const { return make_conjunction(goals_); }
    std::vector<SourceSpan> take_spans() { return std::move(spans_); }

private:
    const AnnotatedClause& s_;
    Term si_;
    bool annotate_;
    std::vector<Term> goals_;
    std::vector<SourceSpan> spans_;
};

std::vector<FlatGoal> expand_conjunction(const Term& body, const FunctionSet& fns, const TermPath& path) {
    std::vector<FlatGoal> out;
    Term cur = body;
    TermPath p = path;
    while (cur.has_functor(",", 2)) {
        for (auto& g : fsyntax_goal_expand(cur.arg(0), fns, child(p, 0))) out.push_back(std::move(g));
        cur = cur.arg(1);
        p = child(p, 1);
    }
    if (!cur.is_atom("true"))
        for (auto& g : fsyntax_goal_expand(cur, fns, p)) out.push_back(std::move(g));
    return out;
}

}  // namespace

bool is_arith_expr(const Term& t) {
    if (!t.is_compound()) return false;
    if (t.arity() == 2) {
        const auto& f = t.name();
        return f == "+" || f == "-" || f == "*" || f == "//" || f == "mod";
    }
    return t.arity() == 1 && t.name() == "-";
}

FunctionSet collect_functions(const std::vector<AnnotatedClause>& items) {
    FunctionSet fns;
    for (const auto& item : items) {
        Term t = item.payload;
        if (t.has_functor(":-", 2)) t = t.arg(0);
        if (t.has_functor(":=", 2) && t.arg(0).is_callable())
            fns.insert({t.arg(0).name(), t.arg(0).is_compound() ? t.arg(0).arity() : 0});
    }
    return fns;
}

Flattened flatten_expr(const Term& e, const std::optional<Term>& out, const FunctionSet* fns,
                       const TermPath& path) {
    return Flattener(fns).run(e, out, path);
}

std::vector<FlatGoal> fsyntax_goal_expand(const Term& goal, const FunctionSet& fns, const TermPath& path) {
    if (goal.is_var() || is_control(goal)) return {{goal, path}};
    return Flattener(&fns).goal(goal, path);
}

std::vector<AnnotatedClause> defunc(const AnnotatedClause& s, const FunctionSet& fns, bool annotate) {
    Term sentence = s.payload;
    TermPath def_path;
    std::optional<Term> extra_body;
    if (sentence.has_functor(":-", 2)) {
        extra_body = sentence.arg(1);
        def_path = {0};
        sentence = sentence.arg(0);
    }
    if (!sentence.has_functor(":=", 2)) throw translation_error(s.span, "not a ':=' definition");
    const Term& head = sentence.arg(0);
    if (!head.is_callable() || is_control(head))
        throw translation_error(s.span_of(child(def_path, 0)), "function head must be an atom or compound term");

    // The whole source sentence is the symbolic information of every part.
    const Term& si = s.payload;
    std::vector<Term> clauses;
    std::vector<SourceSpan> spans;
    for (const auto& opt : options_of(sentence.arg(1), child(def_path, 1), s)) {
        BodyBuilder b(s, si, annotate);
        if (extra_body) {
            auto goals = expand_conjunction(*extra_body, fns, {1});
            for (const auto& g : goals) b.plain(g.goal);
        }
        Term res = global_var_source().fresh("Res");
        Term clause_head = head;
        if (opt.cond) {
            b.group(expand_conjunction(*opt.cond, fns, opt.cond_path), opt.cond_path);
            Flattened v = flatten_expr(opt.value, std::nullopt, nullptr, opt.value_path);
            b.group(v.goals, opt.value_path, true);
            // the result unification has no source counterpart
            b.plain(Term::compound("=", {res, v.result}));
            clause_head = add_arg(head, res);
        } else {
            Flattened v = flatten_expr(opt.value, res, nullptr, opt.value_path);
            b.group(v.goals, opt.value_path);
            clause_head = add_arg(head, v.result);
        }
        Term body = b.body();
        clauses.push_back(body.is_atom("true") ? clause_head : Term::compound(":-", {clause_head, body}));
        for (auto& sp : b.take_spans()) spans.push_back(sp);
    }

    if (!annotate) {
        std::vector<AnnotatedClause> out;
        for (auto& c : clauses) out.push_back({c, s.span, {}, false, {}});
        return out;
    }
    Term payload = Term::compound("$clause_info", {make_list(clauses), si});
    return {AnnotatedClause{payload, s.span, std::move(spans), false, {}}};
}

namespace {

// Plain clauses whose body goals call ':=' functions.
std::optional<std::vector<AnnotatedClause>> expand_clause(const AnnotatedClause& s, const FunctionSet& fns,
                                                         bool annotate) {
    const Term& t = s.payload;
    if (!t.has_functor(":-", 2) || fns.empty()) return std::nullopt;
    std::vector<Term> goals;
    std::vector<SourceSpan> spans;
    bool changed = false;
    Term cur = t.arg(1);
    TermPath p{1};
    auto one = [&](const Term& g, const TermPath& gp) {
        auto flat = fsyntax_goal_expand(g, fns, gp);
        if (flat.size() == 1 && flat[0].goal.identity() == g.identity()) {
            goals.push_back(g);
            return;
        }
        changed = true;
        std::vector<Term> gs;
        for (const auto& f : flat) gs.push_back(f.goal);
        if (!annotate) {
            for (auto& x : gs) goals.push_back(x);
            return;
        }
        spans.push_back(s.span_of(gp));
        goals.push_back(goal_info(make_conjunction(gs), g));
    };
    while (cur.has_functor(",", 2)) {
        one(cur.arg(0), child(p, 0));
        cur = cur.arg(1);
        p = child(p, 1);
    }
    one(cur, p);
    if (!changed) return std::nullopt;
    Term clause = Term::compound(":-", {t.arg(0), make_conjunction(goals)});
    if (!annotate) return std::vector<AnnotatedClause>{{clause, s.span, {}, false, {}}};
    Term payload = Term::compound("$clause_info", {make_list({clause}), t});
    return std::vector<AnnotatedClause>{{payload, s.span, std::move(spans), false, {}}};
}

}  // namespace

Package fsyntax_package(bool annotate) {
    Package p;
    p.name = "fsyntax";
    p.operators = {{1150, OpType::xfx, ":="}, {1100, OpType::xfy, "|"}, {1050, OpType::xfx, "?"}};
    p.make_rule = [annotate](const std::vector<AnnotatedClause>& items) -> SentenceRule {
        FunctionSet fns = collect_functions(items);
        return [fns, annotate](const AnnotatedClause& s) -> std::optional<std::vector<AnnotatedClause>> {
            const Term& t = s.payload;
            if (t.has_functor(":=", 2) || (t.has_functor(":-", 2) && t.arg(0).has_functor(":=", 2)))
                return defunc(s, fns, annotate);
            return expand_clause(s, fns, annotate);
        };
    };
    return p;
}

}  // namespace unexpand
