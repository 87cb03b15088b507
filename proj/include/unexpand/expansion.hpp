#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "unexpand/error.hpp"
#include "unexpand/operators.hpp"
#include "unexpand/reader.hpp"
#include "unexpand/term.hpp"

namespace unexpand {

class translation_error : public error {
public:
    translation_error(const SourceSpan& span, const std::string& message);
    const SourceSpan& span() const { return span_; }

private:
    SourceSpan span_;
};

class extraction_error : public error {
public:
    using error::error;
};

/// Raised for malformed programs: bad directives, reserved clause heads.
class load_error : public error {
public:
    using error::error;
};

struct ClauseId {
    std::string module;
    std::uint32_t ordinal = 0;
    friend auto operator<=>(const ClauseId&, const ClauseId&) = default;
    std::string str() const { return module + ":c" + std::to_string(ordinal); }
};

struct GoalId {
    std::string module;
    std::uint32_t ordinal = 0;
    friend auto operator<=>(const GoalId&, const GoalId&) = default;
    std::string str() const { return module + ":g" + std::to_string(ordinal); }
};

/// Output of a translation rule. The payload is a plain clause or a
/// '$clause_info'(Clauses, SI) group; bodies may hold '$goal_info'(G, SI).
struct AnnotatedClause {
    Term payload;
    SourceSpan span;
    /// Spans of the source subexpressions behind each '$goal_info' wrapper,
    /// in depth-first order of the wrappers. May be shorter than the number
    /// of wrappers; missing entries fall back to `span`.
    std::vector<SourceSpan> goal_spans;
    /// Whether `payload` is still an untranslated source sentence.
    bool source = false;
    /// Reader spans of the source sentence's subterms (source items only).
    std::map<TermPath, SourceSpan> subterm_spans;

    /// Span of the source subterm at `path`, else its nearest ancestor,
    /// else the whole item.
    SourceSpan span_of(const TermPath& path) const;
};

struct OpDecl {
    int priority;
    OpType type;
    std::string name;
};

/// Sentence rule for one program: nullopt leaves the sentence to later
/// packages (or passes it through). Throws translation_error.
using SentenceRule = std::function<std::optional<std::vector<AnnotatedClause>>(const AnnotatedClause&)>;

struct Package {
    std::string name;
    std::vector<OpDecl> operators;
    /// Builds the rule for a program; sees every sentence first so rules
    /// can depend on module-wide facts (fsyntax collects its functions).
    std::function<SentenceRule(const std::vector<AnnotatedClause>&)> make_rule;
    /// Support predicates in source form, loaded into module `name`.
    std::string runtime_source;
};

class PackageRegistry {
public:
    /// Throws error on a duplicate name.
    void add(Package p);
    const Package* find(const std::string& name) const;
    std::vector<std::string> names() const;

private:
    std::map<std::string, std::shared_ptr<const Package>> packages_;
};

/// Registry holding the shipped packages (fsyntax, dcg). The plain
/// variant translates identically but emits no annotations.
const PackageRegistry& standard_registry(bool annotated = true);

/// Wraps parsed sentences as untranslated items.
std::vector<AnnotatedClause> source_items(const std::vector<Sentence>& sentences);

/// Runs the packages left to right over the whole program.
std::vector<AnnotatedClause> expand_program(const std::vector<AnnotatedClause>& items,
                                            const std::vector<const Package*>& pkgs);

struct Clause {
    Term head;
    Term body;
    ClauseId id;
    /// Head :- Body, or just Head for facts.
    Term term() const;
};

/// Splits `t` into head and body; throws load_error for reserved heads.
Clause make_clause(const Term& t, ClauseId id);

struct SourceInfo {
    /// Symbolic information; absent when the annotation left it unbound.
    std::optional<Term> si;
    SourceSpan span;
    std::vector<ClauseId> group;
};

struct SymbolTable {
    std::map<ClauseId, SourceInfo> clause_entries;
    std::map<GoalId, SourceInfo> goal_entries;

    const SourceInfo* lookup_clause(const ClauseId& id) const;
    const SourceInfo* lookup_goal(const GoalId& id) const;
    /// "id<TAB>line<TAB>si" per entry, clauses then goals.
    std::string dump(const OperatorTable& ops) const;
};

enum class ExtractMode {
    annotate,  ///< '$goal_info' becomes '$gmark'(Gid, G)
    strip,     ///< '$goal_info' erased in place, table discarded
};

struct Extraction {
    std::vector<Clause> clauses;
    SymbolTable symtab;
    std::vector<std::string> warnings;
};

Extraction extract_annotations(const std::vector<AnnotatedClause>& items, const std::string& module,
                               ExtractMode mode = ExtractMode::annotate);

/// Goal ids are encoded into '$gmark' as '$gid'(Module, N).
Term goal_id_term(const GoalId& id);
std::optional<GoalId> goal_id_from(const Term& t);

/// A fully loaded module: its source, expansion and extracted database.
struct Program {
    std::string module;
    OperatorTable ops;
    std::vector<std::string> packages;
    std::vector<AnnotatedClause> expanded;
    /// Program clauses followed by package runtime clauses.
    std::vector<Clause> clauses;
    SymbolTable symtab;
    std::vector<std::string> warnings;
};

struct LoadOptions {
    ExtractMode mode = ExtractMode::annotate;
    /// Use the annotation-free variant of every package.
    bool plain_packages = false;
};

/// Reads, expands and extracts a module. Leading directives may be
/// use_package/1 and op/3. Throws syntax_error, translation_error,
/// load_error.
Program load_program(std::string_view text, const std::string& module,
                     const LoadOptions& opts = {}, const PackageRegistry* registry = nullptr);

/// Module name for a file path: its stem.
std::string module_name_for(const std::string& path);

/// Re-readable text of the expanded program (annotated or stripped), with
/// the symbol table appended as comment lines.
std::string dump_program(const Program& p, ExtractMode mode);

}  // namespace unexpand
