#include "unexpand/term.hpp"

#include <stdexcept>
#include <unordered_set>

namespace unexpand {

using detail::AtomNode;
using detail::CompoundNode;
using detail::IntNode;
using detail::Node;
using detail::VarNode;

Term Term::var(VarId id, std::string name) {
    return Term(std::make_shared<const Node>(VarNode{id, std::move(name)}));
}

Term Term::atom(std::string name) {
    return Term(std::make_shared<const Node>(AtomNode{std::move(name)}));
}

Term Term::integer(Integer value) {
    return Term(std::make_shared<const Node>(IntNode{std::move(value)}));
}

Term Term::compound(std::string functor, std::vector<Term> args) {
    if (args.empty()) throw std::invalid_argument("compound term needs at least one argument");
    return Term(std::make_shared<const Node>(CompoundNode{std::move(functor), std::move(args)}));
}

VarId Term::var_id() const { return std::get<VarNode>(*node_).id; }

const std::string& Term::var_name() const { return std::get<VarNode>(*node_).name; }

const std::string& Term::name() const {
    if (auto* a = std::get_if<AtomNode>(node_.get())) return a->name;
    return std::get<CompoundNode>(*node_).functor;
}

const Integer& Term::value() const { return std::get<IntNode>(*node_).value; }

std::size_t Term::arity() const {
    if (auto* c = std::get_if<CompoundNode>(node_.get())) return c->args.size();
    return 0;
}

std::span<const Term> Term::args() const {
    if (auto* c = std::get_if<CompoundNode>(node_.get())) return c->args;
    return {};
}

bool Term::has_functor(std::string_view name, std::size_t arity) const {
    if (arity == 0) return is_atom(name);
    return is_compound() && this->arity() == arity && this->name() == name;
}

bool operator==(const Term& a, const Term& b) {
    if (a.node_ == b.node_) return true;
    if (a.kind() != b.kind()) return false;
    switch (a.kind()) {
        case Term::Kind::var: return a.var_id() == b.var_id();
        case Term::Kind::atom: return a.name() == b.name();
        case Term::Kind::integer: return a.value() == b.value();
        case Term::Kind::compound: {
            if (a.name() != b.name() || a.arity() != b.arity()) return false;
            for (std::size_t i = 0; i < a.arity(); ++i)
                if (!(a.arg(i) == b.arg(i))) return false;
            return true;
        }
    }
    return false;
}

std::optional<PredicateKey> predicate_key(const Term& t) {
    if (t.is_atom()) return PredicateKey{t.name(), 0};
    if (t.is_compound()) return PredicateKey{t.name(), t.arity()};
    return std::nullopt;
}

VarSource& global_var_source() {
    static VarSource source(global_var_base);
    return source;
}

Term make_list(const std::vector<Term>& items, Term tail) {
    Term result = std::move(tail);
    for (auto it = items.rbegin(); it != items.rend(); ++it)
        result = Term::compound(".", {*it, result});
    return result;
}

std::optional<std::vector<Term>> list_elements(const Term& t) {
    std::vector<Term> out;
    Term cur = t;
    while (cur.has_functor(".", 2)) {
        out.push_back(cur.arg(0));
        cur = cur.arg(1);
    }
    if (!cur.is_atom("[]")) return std::nullopt;
    return out;
}

Term make_conjunction(const std::vector<Term>& goals) {
    if (goals.empty()) return Term::atom("true");
    Term result = goals.back();
    for (auto it = goals.rbegin() + 1; it != goals.rend(); ++it)
        result = Term::compound(",", {*it, result});
    return result;
}

namespace {
void collect_goals(const Term& t, std::vector<Term>& out) {
    if (t.has_functor(",", 2)) {
        collect_goals(t.arg(0), out);
        collect_goals(t.arg(1), out);
    } else if (!t.is_atom("true")) {
        out.push_back(t);
    }
}

void collect_vars(const Term& t, std::unordered_set<VarId>& seen, std::vector<Term>& out) {
    if (t.is_var()) {
        if (seen.insert(t.var_id()).second) out.push_back(t);
    } else {
        for (const auto& a : t.args()) collect_vars(a, seen, out);
    }
}

bool variant_walk(const Term& a, const Term& b, std::unordered_map<VarId, VarId>& ab,
                  std::unordered_map<VarId, VarId>& ba) {
    if (a.kind() != b.kind()) return false;
    switch (a.kind()) {
        case Term::Kind::var: {
            auto [ia, newa] = ab.try_emplace(a.var_id(), b.var_id());
            auto [ib, newb] = ba.try_emplace(b.var_id(), a.var_id());
            return ia->second == b.var_id() && ib->second == a.var_id();
        }
        case Term::Kind::atom: return a.name() == b.name();
        case Term::Kind::integer: return a.value() == b.value();
        case Term::Kind::compound:
            if (a.name() != b.name() || a.arity() != b.arity()) return false;
            for (std::size_t i = 0; i < a.arity(); ++i)
                if (!variant_walk(a.arg(i), b.arg(i), ab, ba)) return false;
            return true;
    }
    return false;
}
}  // namespace

std::vector<Term> conjunction_goals(const Term& t) {
    std::vector<Term> out;
    collect_goals(t, out);
    return out;
}

std::vector<Term> term_variables(const Term& t) {
    std::unordered_set<VarId> seen;
    std::vector<Term> out;
    collect_vars(t, seen, out);
    return out;
}

bool is_variant(const Term& a, const Term& b) {
    std::unordered_map<VarId, VarId> ab, ba;
    return variant_walk(a, b, ab, ba);
}

}  // namespace unexpand
