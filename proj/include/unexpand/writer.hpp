#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "unexpand/operators.hpp"
#include "unexpand/reader.hpp"
#include "unexpand/substitution.hpp"
#include "unexpand/term.hpp"

namespace unexpand {

enum class VarNaming {
    display,    ///< source name when known, else _G<id>
    generated,  ///< always _G<id>
    canonical,  ///< source names kept, the rest numbered _1, _2, ... by first occurrence
};

struct WriteOptions {
    /// Operator table for operator syntax; null writes everything canonically.
    const OperatorTable* ops = nullptr;
    /// Bound variables are written through these bindings.
    const Substitution* bindings = nullptr;
    /// Symbolic infix operators of at least this priority are surrounded by
    /// spaces; lower ones are written tight ("1+1"). Alphanumeric operators
    /// are always spaced.
    int spacing_threshold = 700;
    VarNaming var_naming = VarNaming::display;
    /// Write the principal functor in canonical form even if it is an
    /// operator ("is(_G3,3-2)").
    bool canonical_top = false;
    int max_priority = 1200;
};

std::string write_term(const Term& t, const WriteOptions& opts = {});

/// Operator-syntax rendering with bindings applied.
std::string write_term(const Term& t, const OperatorTable& ops, const Substitution& s);

struct MarkedText {
    std::string text;
    /// Byte range [first, second) of the subterm at the marked path.
    std::optional<std::pair<std::size_t, std::size_t>> mark;
};

/// Like write_term, also reporting where the subterm at `mark` was written.
MarkedText write_term_marked(const Term& t, const WriteOptions& opts, const TermPath& mark);

/// One clause laid out as a program listing: "Head :-\n    Goal,\n    Goal.\n".
/// Variable names are consistent across the whole clause.
std::string format_clause(const Term& clause, const WriteOptions& opts);

/// Atom text with quotes added when it would not read back as the same atom.
std::string quote_atom(std::string_view name);

}  // namespace unexpand
