#include "unexpand/substitution.hpp"

#include <utility>

#include "unexpand/error.hpp"

namespace unexpand {

const Term* Substitution::lookup(VarId id) const {
    auto it = bindings_.find(id);
    return it == bindings_.end() ? nullptr : &it->second;
}

void Substitution::bind(VarId id, Term value) {
    bindings_.insert_or_assign(id, std::move(value));
    trail_.push_back(id);
}

Term Substitution::deref(Term t) const {
    while (t.is_var()) {
        const Term* next = lookup(t.var_id());
        if (!next) break;
        t = *next;
    }
    return t;
}

void Substitution::undo_to(std::size_t mark) {
    while (trail_.size() > mark) {
        bindings_.erase(trail_.back());
        trail_.pop_back();
    }
}

bool occurs_in(VarId id, const Term& t, const Substitution& s) {
    std::vector<Term> stack{t};
    while (!stack.empty()) {
        Term cur = s.deref(stack.back());
        stack.pop_back();
        if (cur.is_var()) {
            if (cur.var_id() == id) return true;
        } else {
            for (const auto& a : cur.args()) stack.push_back(a);
        }
    }
    return false;
}

bool unify(const Term& a, const Term& b, Substitution& s, bool occurs_check) {
    const std::size_t mark = s.mark();
    std::vector<std::pair<Term, Term>> pending{{a, b}};
    while (!pending.empty()) {
        auto [x, y] = std::move(pending.back());
        pending.pop_back();
        x = s.deref(x);
        y = s.deref(y);
        if (x.is_var() && y.is_var()) {
            if (x.var_id() == y.var_id()) continue;
            // Younger variables point at older ones so displayed names stay stable.
            if (x.var_id() > y.var_id()) s.bind(x.var_id(), y);
            else s.bind(y.var_id(), x);
            continue;
        }
        if (y.is_var()) std::swap(x, y);
        if (x.is_var()) {
            if (occurs_check && occurs_in(x.var_id(), y, s)) {
                s.undo_to(mark);
                return false;
            }
            s.bind(x.var_id(), y);
            continue;
        }
        if (x.kind() != y.kind()) {
            s.undo_to(mark);
            return false;
        }
        switch (x.kind()) {
            case Term::Kind::atom:
                if (x.name() != y.name()) {
                    s.undo_to(mark);
                    return false;
                }
                break;
            case Term::Kind::integer:
                if (x.value() != y.value()) {
                    s.undo_to(mark);
                    return false;
                }
                break;
            case Term::Kind::compound:
                if (x.name() != y.name() || x.arity() != y.arity()) {
                    s.undo_to(mark);
                    return false;
                }
                for (std::size_t i = x.arity(); i-- > 0;) pending.emplace_back(x.arg(i), y.arg(i));
                break;
            case Term::Kind::var: break;
        }
    }
    return true;
}

std::optional<Substitution> unify_copy(const Term& a, const Term& b, const Substitution& s,
                                       bool occurs_check) {
    Substitution out = s;
    if (!unify(a, b, out, occurs_check)) return std::nullopt;
    return out;
}

Term apply(const Substitution& s, const Term& t) {
    if (s.empty()) return t;
    Term d = s.deref(t);
    if (!d.is_compound()) return d;
    std::vector<Term> args;
    args.reserve(d.arity());
    bool changed = false;
    for (const auto& a : d.args()) {
        args.push_back(apply(s, a));
        changed = changed || args.back().identity() != a.identity();
    }
    if (!changed) return d;
    return Term::compound(d.name(), std::move(args));
}

Term Renamer::operator()(const Term& t) {
    switch (t.kind()) {
        case Term::Kind::var: {
            auto it = map_.find(t.var_id());
            if (it == map_.end())
                it = map_.emplace(t.var_id(), source_.fresh(t.var_name())).first;
            return it->second;
        }
        case Term::Kind::compound: {
            std::vector<Term> args;
            args.reserve(t.arity());
            for (const auto& a : t.args()) args.push_back((*this)(a));
            return Term::compound(t.name(), std::move(args));
        }
        default: return t;
    }
}

Term rename_apart(const Term& t, VarSource& source) {
    Renamer r(source);
    return r(t);
}

Term rename_with(const std::unordered_map<VarId, Term>& map, const Term& t) {
    if (t.is_var()) {
        auto it = map.find(t.var_id());
        return it == map.end() ? t : it->second;
    }
    if (!t.is_compound()) return t;
    std::vector<Term> args;
    args.reserve(t.arity());
    for (const auto& a : t.args()) args.push_back(rename_with(map, a));
    return Term::compound(t.name(), std::move(args));
}

bool is_arithmetic_functor(std::string_view name, std::size_t arity) {
    if (arity == 2) return name == "+" || name == "-" || name == "*" || name == "//" || name == "mod";
    return arity == 1 && name == "-";
}

Integer eval_arith(const Term& t, const Substitution& s) {
    Term d = s.deref(t);
    switch (d.kind()) {
        case Term::Kind::integer: return d.value();
        case Term::Kind::var: throw instantiation_error("arithmetic: unbound variable");
        case Term::Kind::atom: throw type_error("arithmetic: not evaluable: " + d.name() + "/0");
        case Term::Kind::compound: break;
    }
    const auto& f = d.name();
    if (!is_arithmetic_functor(f, d.arity()))
        throw type_error("arithmetic: not evaluable: " + f + "/" + std::to_string(d.arity()));
    if (d.arity() == 1) return -eval_arith(d.arg(0), s);
    Integer x = eval_arith(d.arg(0), s);
    Integer y = eval_arith(d.arg(1), s);
    if (f == "+") return x + y;
    if (f == "-") return x - y;
    if (f == "*") return x * y;
    if (y == 0) throw evaluation_error("arithmetic: division by zero");
    if (f == "//") return x / y;  // truncates toward zero
    // mod takes the sign of the divisor
    Integer r = x % y;
    if (r != 0 && ((r < 0) != (y < 0))) r += y;
    return r;
}

}  // namespace unexpand
