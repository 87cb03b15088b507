#include "unexpand/dcg.hpp"

#include <string>

#include "unexpand/substitution.hpp"

namespace unexpand {

namespace {

TermPath child(TermPath p, std::uint32_t k) {
    p.push_back(k);
    return p;
}

class RuleTranslator {
public:
    RuleTranslator(const AnnotatedClause& rule, bool annotate) : rule_(rule), annotate_(annotate) {}

    AnnotatedClause run() {
        const Term& t = rule_.payload;
        const Term& head = t.arg(0);
        if (head.has_functor(",", 2))
            throw translation_error(rule_.span_of({0}), "pushback in grammar rule heads is not supported");
        if (head.is_var()) throw translation_error(rule_.span_of({0}), "grammar rule head is a variable");
        if (!head.is_callable() || head.is_atom("[]") || head.has_functor(".", 2))
            throw translation_error(rule_.span_of({0}), "grammar rule head must be a nonterminal");

        Term s0 = global_var_source().fresh("S0");
        Term last = body(t.arg(1), s0, {1});
        if (last.is_var() && last.var_id() != s0.var_id()) {
            // name the final list "S" for listings
            Term s = global_var_source().fresh("S");
            std::unordered_map<VarId, Term> ren{{last.var_id(), s}};
            for (auto& g : goals_) g = rename_with(ren, g);
            last = s;
        }
        Term clause_head = dcg_body_call(head, s0, last);
        Term clause = goals_.empty() ? clause_head
                                     : Term::compound(":-", {clause_head, make_conjunction(goals_)});
        if (!annotate_) return {clause, rule_.span, {}, false, {}};
        Term payload = Term::compound("$clause_info", {make_list({clause}), t});
        return {payload, rule_.span, std::move(spans_), false, {}};
    }

private:
    Term fresh() { return global_var_source().fresh("S" + std::to_string(++counter_)); }

    // Emits goals for `b` consuming from `in`; returns the remaining list.
    Term body(const Term& b, const Term& in, const TermPath& path) {
        if (b.is_var()) throw translation_error(rule_.span_of(path), "variable nonterminal in grammar body");
        if (b.has_functor(",", 2)) {
            Term mid = body(b.arg(0), in, child(path, 0));
            return body(b.arg(1), mid, child(path, 1));
        }
        if (b.has_functor(";", 2) || b.has_functor("|", 2) || b.has_functor("->", 2))
            throw translation_error(rule_.span_of(path), "disjunction in grammar bodies is not supported");
        if (b.is_compound() && b.name() == "call")
            throw translation_error(rule_.span_of(path), "call//N is not supported");
        if (b.is_atom("[]")) return in;
        if (b.has_functor(".", 2)) {
            auto items = list_elements(b);
            if (!items) throw translation_error(rule_.span_of(path), "terminal list must be a proper list");
            Term out = fresh();
            Term goal = Term::compound("=", {in, make_list(*items, out)});
            if (annotate_) {
                spans_.push_back(rule_.span_of(path));
                goal = Term::compound("$goal_info", {goal, b});
            }
            goals_.push_back(goal);
            return out;
        }
        if (b.has_functor("{}", 1)) {
            goals_.push_back(b.arg(0));
            return in;
        }
        if (b.is_atom("!")) {
            goals_.push_back(b);
            return in;
        }
        if (!b.is_callable()) throw translation_error(rule_.span_of(path), "grammar body is not callable");
        Term out = fresh();
        goals_.push_back(dcg_body_call(b, in, out));
        return out;
    }

    const AnnotatedClause& rule_;
    bool annotate_;
    std::vector<Term> goals_;
    std::vector<SourceSpan> spans_;
    int counter_ = 0;
};

}  // namespace

Term dcg_body_call(const Term& nt, const Term& list, const Term& rest) {
    std::vector<Term> args;
    if (nt.is_compound())
        for (const auto& a : nt.args()) args.push_back(a);
    args.push_back(list);
    args.push_back(rest);
    return Term::compound(nt.name(), std::move(args));
}

AnnotatedClause dcg_rule(const AnnotatedClause& rule, bool annotate) {
    if (!rule.payload.has_functor("-->", 2)) throw translation_error(rule.span, "not a grammar rule");
    return RuleTranslator(rule, annotate).run();
}

Package dcg_package(bool annotate) {
    Package p;
    p.name = "dcg";
    p.operators = {{1200, OpType::xfx, "-->"}};
    p.make_rule = [annotate](const std::vector<AnnotatedClause>&) -> SentenceRule {
        return [annotate](const AnnotatedClause& s) -> std::optional<std::vector<AnnotatedClause>> {
            if (!s.payload.has_functor("-->", 2)) return std::nullopt;
            return std::vector<AnnotatedClause>{dcg_rule(s, annotate)};
        };
    };
    p.runtime_source =
        "phrase(NT, List) :- phrase(NT, List, []).\n"
        "phrase(NT, List, Rest) :- call(NT, List, Rest).\n";
    return p;
}

}  // namespace unexpand
