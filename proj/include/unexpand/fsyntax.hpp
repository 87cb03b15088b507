#pragma once

// Functional notation: ':=' definitions and nested function calls compiled
// to plain relational clauses.

#include <optional>
#include <set>
#include <vector>

#include "unexpand/expansion.hpp"

namespace unexpand {

/// Predicates defined with ':=' in the module, by source name/arity.
using FunctionSet = std::set<PredicateKey>;

/// Functors evaluated through is/2: + - * // mod and unary minus.
bool is_arith_expr(const Term& t);

FunctionSet collect_functions(const std::vector<AnnotatedClause>& items);

struct FlatGoal {
    Term goal;
    /// Path of the source subexpression the goal was generated from.
    TermPath path;
};

struct Flattened {
    std::vector<FlatGoal> goals;
    Term result;
};

/// Leftmost-innermost flattening of an expression. With `fns` null every
/// non-arithmetic compound other than a list is a call (':=' right-hand
/// sides); otherwise only members of `fns` are. A call or arithmetic
/// expression at the top delivers its value in `out` when given.
Flattened flatten_expr(const Term& e, const std::optional<Term>& out, const FunctionSet* fns,
                       const TermPath& path = {});

/// Flattens function calls in the arguments of a body goal; the generated
/// goals come first, the rewritten goal last.
std::vector<FlatGoal> fsyntax_goal_expand(const Term& goal, const FunctionSet& fns,
                                          const TermPath& path = {});

/// Translates one ':=' sentence (optionally "Head := Value :- Body").
/// Annotated output is a single '$clause_info' group; plain output is one
/// item per generated clause.
std::vector<AnnotatedClause> defunc(const AnnotatedClause& sentence, const FunctionSet& fns,
                                    bool annotate = true);

Package fsyntax_package(bool annotate = true);

}  // namespace unexpand
