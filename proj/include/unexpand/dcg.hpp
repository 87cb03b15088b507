#pragma once

// Definite clause grammars: '-->' rules compiled to difference-list clauses.

#include "unexpand/expansion.hpp"

namespace unexpand {

/// Translates one '-->' rule. Throws translation_error for pushback,
/// variable nonterminals, call//N and disjunction.
AnnotatedClause dcg_rule(const AnnotatedClause& rule, bool annotate = true);

/// Appends the two list arguments to a nonterminal.
Term dcg_body_call(const Term& nonterminal, const Term& list, const Term& rest);

Package dcg_package(bool annotate = true);

}  // namespace unexpand
