#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "unexpand/expansion.hpp"
#include "unexpand/solver.hpp"

namespace unexpand {

enum class View { source, target };
enum class Mode { trace, leap, skip, off };

struct DisplayedStep {
    enum class Origin { source, target, qualified };

    std::uint64_t n = 0;
    int depth = 0;
    Port port = Port::call;
    std::string text;
    Origin origin = Origin::target;
    /// Byte range of the subterm the step is about, within `text`.
    std::optional<std::pair<std::size_t, std::size_t>> focus;
    /// Source line for source-view steps.
    std::optional<int> line;
};

/// "   2  2    Call: f(3,_G1) ? ". With `color`, the focus is underlined.
std::string format_step(const DisplayedStep& s, bool color = false);

/// The raw goal as the target-level debugger prints it: "is(_G3,3-2)".
std::string target_text(const Term& goal, const OperatorTable& ops, const Substitution& bindings);

class DebugSession {
public:
    DebugSession(const Program& program, const Database& db);

    const Program& program() const { return program_; }
    const Database& database() const { return db_; }

    View view = View::source;
    Mode mode = Mode::trace;

    /// Spypoints by "name/arity"; source arities of annotated predicates
    /// are accepted. Returns false for malformed indicators.
    bool spy(std::string_view indicator);
    bool nospy(std::string_view indicator);
    const std::set<PredicateKey>& spypoints() const { return spypoints_; }
    bool at_spypoint(const TraceEvent& ev) const;

    /// Applies the current mode: whether the step is shown and waits for a
    /// command. Leaves skip mode once control is back at the skipped depth.
    bool should_stop(const TraceEvent& ev);
    /// Enter skip mode for the box of `ev`.
    void skip_from(const TraceEvent& ev);

private:
    const Program& program_;
    const Database& db_;
    std::set<PredicateKey> spypoints_;
    /// Translated predicate -> source-level functors defining it.
    std::map<PredicateKey, std::set<PredicateKey>> source_keys_;
    int skip_depth_ = 0;
};

/// Source-level rendering of one event, or nullopt when the step was
/// introduced by the translation and is hidden. In target view the raw
/// goal is always shown and the symbol table is not consulted.
std::optional<DisplayedStep> meta_controller(const TraceEvent& ev, const Substitution& bindings,
                                             const DebugSession& sess);

enum class Command { creep, skip, leap, abort, spy, nospy, toggle_view, invalid };

struct ParsedCommand {
    Command cmd = Command::invalid;
    std::string arg;
};

/// "c" or "" creep, "s" skip, "l" leap, "a" abort, "+p/n" spy, "-p/n" nospy,
/// "v" toggle view.
ParsedCommand parse_command(std::string_view line);

/// Source of commands and sink of output for the interactive loop.
class LineChannel {
public:
    virtual ~LineChannel() = default;
    /// nullopt at end of input.
    virtual std::optional<std::string> read_line() = 0;
    virtual void write(std::string_view text) = 0;
    /// Makes a blocked read_line return nullopt (called from another thread).
    virtual void interrupt() {}
};

struct LoopOptions {
    /// Print a newline after each prompt (scripts, pipes).
    bool newline_after_prompt = true;
    bool color = false;
    SolverOptions solver;
};

/// Runs the query under the debugger, prompting at each shown step.
/// Answers are printed as they are found ("no" if none); the formatted
/// answers are returned.
std::vector<std::string> interactive_loop(DebugSession& sess, const Term& query, LineChannel& io,
                                          const LoopOptions& opts = {});

}  // namespace unexpand
