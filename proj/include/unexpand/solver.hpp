#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "unexpand/expansion.hpp"
#include "unexpand/substitution.hpp"
#include "unexpand/term.hpp"

namespace unexpand {

enum class Port { call, exit, redo, fail };

/// "Call", "Exit", "Redo", "Fail".
std::string_view port_name(Port p);

/// One use of a clause: the fresh variables it was renamed to. The same
/// renaming applied to the clause's symbolic information shows the source
/// view of that use.
struct Activation {
    ClauseId clause;
    std::unordered_map<VarId, Term> renaming;
};
using ActivationPtr = std::shared_ptr<const Activation>;

struct TraceEvent {
    std::uint64_t invocation = 0;
    int depth = 0;
    Port port = Port::call;
    Term goal = Term::atom("true");
    /// Module defining the predicate (the query module for undefined ones).
    std::string module;
    /// Set when the goal was injected from a '$gmark'.
    std::optional<GoalId> goal_id;
    /// Clause whose body holds the goal; null for the query.
    ActivationPtr caller;
    /// Clause that proved the goal (Exit of user predicates only).
    ActivationPtr callee;
    std::optional<ClauseId> clause_id() const {
        if (callee) return callee->clause;
        return std::nullopt;
    }
};

enum class MonitorAction { proceed, abort };

/// Receives port events synchronously from the solving thread.
class Monitor {
public:
    virtual ~Monitor() = default;
    virtual MonitorAction on_event(const TraceEvent& ev, const Substitution& bindings) = 0;
    /// Non-fatal runtime conditions such as calls to unknown predicates.
    virtual void on_diagnostic(const std::string& message) { (void)message; }
};

class Database {
public:
    /// Throws load_error for control constructs, builtins and '$' heads.
    void add(Clause c);
    static Database consult(const std::vector<Clause>& clauses);

    const std::vector<Clause>* clauses(const PredicateKey& key) const;
    std::optional<std::string> module_of(const PredicateKey& key) const;
    std::size_t predicate_count() const { return preds_.size(); }
    std::vector<PredicateKey> predicates() const;

private:
    struct Pred {
        std::string module;
        std::vector<Clause> clauses;
    };
    std::unordered_map<PredicateKey, Pred, PredicateKeyHash> preds_;
};

bool is_builtin(const PredicateKey& key);

struct SolverOptions {
    bool occurs_check = false;
    /// Resolution steps before a resource_error; unlimited when empty.
    std::optional<std::uint64_t> step_limit;
    /// Module reported for the query and undefined predicates.
    std::string module = "user";
};

/// Lazy SLD resolution over a database, one solution per call to next().
class Solver {
public:
    Solver(const Database& db, const Term& goal, Monitor* monitor = nullptr, SolverOptions opts = {});
    ~Solver();
    Solver(const Solver&) = delete;
    Solver& operator=(const Solver&) = delete;

    /// Advances to the next answer. False once exhausted or aborted.
    /// Propagates instantiation, type, evaluation and resource errors.
    bool next();
    bool aborted() const;

    /// The query after renaming (its variables are the lowest-numbered).
    const Term& query() const;
    const Substitution& bindings() const;
    /// Named query variables with their current values, in order of first
    /// occurrence; "_"-prefixed names are left out.
    std::vector<std::pair<std::string, Term>> answer() const;

private:
    struct Engine;
    std::unique_ptr<Engine> engine_;
};

/// "X = v, Y = w" for the answer; "yes" when there are no named variables.
std::string format_answer(const Solver& s, const OperatorTable& ops);

/// Parses `text` with `ops`, solves it and prints one line per answer, or
/// "no" if there are none. `limit` caps the number of answers.
std::vector<std::string> run_query(std::string_view text, const Database& db, const OperatorTable& ops,
                                   Monitor* monitor = nullptr, SolverOptions opts = {},
                                   std::size_t limit = SIZE_MAX);

}  // namespace unexpand
