#pragma once

#include <optional>
#include <unordered_map>
#include <vector>

#include "unexpand/term.hpp"

namespace unexpand {

/// Variable bindings with an undo trail.
///
/// Bindings may chain (X -> Y -> b); `deref` follows the chain. `mark` and
/// `undo_to` give the chronological backtracking the solver relies on.
class Substitution {
public:
    const Term* lookup(VarId id) const;
    void bind(VarId id, Term value);
    /// Follows variable bindings until an unbound variable or a non-variable.
    Term deref(Term t) const;

    std::size_t mark() const { return trail_.size(); }
    void undo_to(std::size_t mark);

    std::size_t size() const { return bindings_.size(); }
    bool empty() const { return bindings_.empty(); }
    const std::unordered_map<VarId, Term>& bindings() const { return bindings_; }

private:
    std::unordered_map<VarId, Term> bindings_;
    std::vector<VarId> trail_;
};

/// Extends `s` with a most general unifier of `a` and `b`. On failure `s` is
/// left exactly as it was.
bool unify(const Term& a, const Term& b, Substitution& s, bool occurs_check = false);

/// Value-returning form: a copy of `s` extended with the MGU, or nullopt.
std::optional<Substitution> unify_copy(const Term& a, const Term& b, const Substitution& s,
                                       bool occurs_check = false);

/// Replaces every bound variable of `t` by its full dereference.
Term apply(const Substitution& s, const Term& t);

/// True if variable `id` occurs in `t` under `s`.
bool occurs_in(VarId id, const Term& t, const Substitution& s);

/// Consistent renaming: one fresh variable per distinct input variable,
/// display names preserved. The mapping is kept so related terms (a clause
/// and its source annotation) can be renamed together.
class Renamer {
public:
    explicit Renamer(VarSource& source) : source_(source) {}
    Term operator()(const Term& t);
    const std::unordered_map<VarId, Term>& mapping() const { return map_; }

private:
    VarSource& source_;
    std::unordered_map<VarId, Term> map_;
};

Term rename_apart(const Term& t, VarSource& source = global_var_source());

/// Substitutes variables through a renaming map only (no dereferencing).
Term rename_with(const std::unordered_map<VarId, Term>& map, const Term& t);

/// Integer value of a ground arithmetic expression over + - * // mod and
/// unary minus. Throws instantiation_error, type_error or evaluation_error.
Integer eval_arith(const Term& t, const Substitution& s);

/// Functors evaluated by eval_arith.
bool is_arithmetic_functor(std::string_view name, std::size_t arity);

}  // namespace unexpand
