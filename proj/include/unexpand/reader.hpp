#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "unexpand/error.hpp"
#include "unexpand/operators.hpp"
#include "unexpand/term.hpp"

namespace unexpand {

/// Location of a piece of source text. Lines and columns are 1-based and
/// the end position is the last character covered.
struct SourceSpan {
    std::string module;
    int start_line = 0;
    int start_col = 0;
    int end_line = 0;
    int end_col = 0;

    bool contains(const SourceSpan& inner) const;
    friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

/// Argument-index path from a sentence root to one of its subterms.
using TermPath = std::vector<std::uint32_t>;

struct Sentence {
    Term term;
    SourceSpan span;
    /// Source names of the variables that were written with a name.
    std::unordered_map<VarId, std::string> var_names;
    std::map<TermPath, SourceSpan> subterm_spans;

    /// Span of the subterm at `path`, falling back to the nearest recorded
    /// ancestor and finally the sentence span.
    SourceSpan span_of(const TermPath& path) const;
};

class syntax_error : public error {
public:
    syntax_error(const std::string& module, int line, int col, const std::string& message);
    int line() const { return line_; }
    int column() const { return col_; }

private:
    int line_;
    int col_;
};

/// Streaming reader: each call to `next` parses one sentence up to and
/// including its terminating period.
class Reader {
public:
    Reader(std::string_view text, const OperatorTable& ops, std::string module,
           VarSource& vars = global_var_source());

    /// nullopt at end of input. Throws syntax_error.
    std::optional<Sentence> next();

    /// Swap the operator table used for the remaining sentences.
    void set_operators(const OperatorTable& ops) { ops_ = &ops; }

private:
    struct Impl;
    std::string text_;
    const OperatorTable* ops_;
    std::string module_;
    VarSource* vars_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

/// Reads the first sentence of `text`, or nullopt if there is none.
std::optional<Sentence> read_sentence(std::string_view text, const OperatorTable& ops,
                                      const std::string& module = "user");

/// Reads a single term (a query); a trailing period is optional.
Sentence read_term(std::string_view text, const OperatorTable& ops,
                   const std::string& module = "user");

}  // namespace unexpand
