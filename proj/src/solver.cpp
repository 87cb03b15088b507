#include "unexpand/solver.hpp"

#include <algorithm>
#include <cstdint>

#include "unexpand/reader.hpp"
#include "unexpand/writer.hpp"

namespace unexpand {

std::string_view port_name(Port p) {
    switch (p) {
        case Port::call: return "Call";
        case Port::exit: return "Exit";
        case Port::redo: return "Redo";
        case Port::fail: return "Fail";
    }
    return "Call";
}

namespace {

enum class Builtin { none, true_, fail, unify, not_unify, eq, neq, is, lt, gt, le, ge, ar_eq, ar_ne, call };

Builtin builtin_of(const PredicateKey& k) {
    static const std::unordered_map<PredicateKey, Builtin, PredicateKeyHash> table = {
        {{"true", 0}, Builtin::true_}, {{"fail", 0}, Builtin::fail},   {{"=", 2}, Builtin::unify},
        {{"\\=", 2}, Builtin::not_unify}, {{"==", 2}, Builtin::eq},   {{"\\==", 2}, Builtin::neq},
        {{"is", 2}, Builtin::is},        {{"<", 2}, Builtin::lt},     {{">", 2}, Builtin::gt},
        {{"=<", 2}, Builtin::le},        {{">=", 2}, Builtin::ge},    {{"=:=", 2}, Builtin::ar_eq},
        {{"=\\=", 2}, Builtin::ar_ne},
    };
    auto it = table.find(k);
    if (it != table.end()) return it->second;
    if (k.name == "call" && k.arity >= 1 && k.arity <= 8) return Builtin::call;
    return Builtin::none;
}

bool is_control_key(const PredicateKey& k) {
    return (k.name == "," && k.arity == 2) || (k.name == "!" && k.arity == 0) ||
           (k.name == "$gmark" && k.arity == 2);
}

}  // namespace

bool is_builtin(const PredicateKey& key) { return builtin_of(key) != Builtin::none || is_control_key(key); }

void Database::add(Clause c) {
    auto key = *predicate_key(c.head);
    if (is_builtin(key) || key.name == ";" || key.name == "->" || key.name.starts_with("$"))
        throw load_error(c.id.str() + ": cannot redefine " + key.str());
    auto& p = preds_[key];
    if (p.clauses.empty()) p.module = c.id.module;
    p.clauses.push_back(std::move(c));
}

Database Database::consult(const std::vector<Clause>& clauses) {
    Database db;
    for (const auto& c : clauses) db.add(c);
    return db;
}

const std::vector<Clause>* Database::clauses(const PredicateKey& key) const {
    auto it = preds_.find(key);
    return it == preds_.end() ? nullptr : &it->second.clauses;
}

std::optional<std::string> Database::module_of(const PredicateKey& key) const {
    auto it = preds_.find(key);
    if (it == preds_.end()) return std::nullopt;
    return it->second.module;
}

std::vector<PredicateKey> Database::predicates() const {
    std::vector<PredicateKey> out;
    for (const auto& [k, _] : preds_) out.push_back(k);
    std::sort(out.begin(), out.end());
    return out;
}

// The engine keeps the rest of the computation as an immutable linked list
// of goals and box exits, so choice points can share it.
struct Solver::Engine {
    struct Box {
        std::uint64_t n;
        int depth;
        Term goal;
        std::string module;
        std::optional<GoalId> goal_id;
        ActivationPtr caller;
    };
    using BoxPtr = std::shared_ptr<const Box>;

    struct Cont;
    using ContPtr = std::shared_ptr<const Cont>;
    struct Cont {
        bool exit;
        // goal item
        Term goal;
        int parent_depth;
        ActivationPtr caller;
        std::size_t cut_barrier;
        std::optional<GoalId> goal_id;
        // exit item
        BoxPtr box;
        ActivationPtr callee;
        ContPtr next;
    };

    enum class CpKind { fail_marker, redo_marker, clauses };
    struct ChoicePoint {
        CpKind kind;
        BoxPtr box;
        std::size_t trail;
        // clauses only
        const std::vector<Clause>* alternatives = nullptr;
        std::size_t next_clause = 0;
        ContPtr cont;
    };

    const Database& db;
    Monitor* monitor;
    SolverOptions opts;
    VarSource vars{1};
    Substitution subst;
    Term query = Term::atom("true");
    std::vector<ChoicePoint> cps;
    ContPtr cont;
    bool started = false;
    bool done = false;
    bool was_aborted = false;
    std::uint64_t invocations = 1;  // the query wrapper box
    std::uint64_t steps = 0;

    Engine(const Database& d, const Term& goal, Monitor* m, SolverOptions o)
        : db(d), monitor(m), opts(std::move(o)) {
        Renamer r(vars);
        query = r(goal);
        cont = push_goal(query, 1, nullptr, 0, std::nullopt, nullptr);
    }

    static ContPtr push_goal(const Term& g, int parent_depth, ActivationPtr caller, std::size_t barrier,
                             std::optional<GoalId> gid, ContPtr next) {
        return std::make_shared<const Cont>(
            Cont{false, g, parent_depth, std::move(caller), barrier, std::move(gid), nullptr, nullptr, std::move(next)});
    }

    static ContPtr push_exit(BoxPtr box, ActivationPtr callee, ContPtr next) {
        return std::make_shared<const Cont>(
            Cont{true, Term::atom("true"), 0, nullptr, 0, std::nullopt, std::move(box), std::move(callee), std::move(next)});
    }

    // false when the monitor aborted
    bool emit(const Box& b, Port port, ActivationPtr callee = nullptr) {
        if (!monitor) return true;
        TraceEvent ev;
        ev.invocation = b.n;
        ev.depth = b.depth;
        ev.port = port;
        ev.goal = b.goal;
        ev.module = b.module;
        ev.goal_id = b.goal_id;
        ev.caller = b.caller;
        ev.callee = std::move(callee);
        if (monitor->on_event(ev, subst) == MonitorAction::abort) {
            abort();
            return false;
        }
        return true;
    }

    void abort() {
        was_aborted = true;
        done = true;
        cps.clear();
        cont = nullptr;
    }

    bool next() {
        if (done) return false;
        if (started) {
            if (!backtrack()) return false;
        }
        started = true;
        return run();
    }

    // Pops choice points until one resumes; false when none is left.
    bool backtrack() {
        while (!cps.empty()) {
            ChoicePoint cp = std::move(cps.back());
            cps.pop_back();
            subst.undo_to(cp.trail);
            switch (cp.kind) {
                case CpKind::fail_marker:
                    if (!emit(*cp.box, Port::fail)) return false;
                    break;
                case CpKind::redo_marker:
                    if (!emit(*cp.box, Port::redo)) return false;
                    break;
                case CpKind::clauses:
                    if (try_clauses(cp.box, *cp.alternatives, cp.next_clause, cp.cont)) return true;
                    break;
            }
            if (done) return false;
        }
        done = true;
        return false;
    }

    bool try_clauses(const BoxPtr& box, const std::vector<Clause>& alts, std::size_t from, const ContPtr& after) {
        const std::size_t barrier = cps.size();
        for (std::size_t i = from; i < alts.size(); ++i) {
            const Clause& c = alts[i];
            auto act = std::make_shared<Activation>();
            act->clause = c.id;
            Renamer r(vars);
            Term head = r(c.head);
            const std::size_t mark = subst.mark();
            if (!unify(head, box->goal, subst, opts.occurs_check)) continue;
            Term body = r(c.body);
            act->renaming = r.mapping();
            if (i + 1 < alts.size())
                cps.push_back({CpKind::clauses, box, mark, &alts, i + 1, after});
            ActivationPtr a = std::move(act);
            ContPtr k = push_exit(box, a, after);
            cont = body.is_atom("true") ? k : push_goal(body, box->depth, a, barrier, std::nullopt, k);
            return true;
        }
        return false;
    }

    void count_step() {
        ++steps;
        if (opts.step_limit && steps > *opts.step_limit)
            throw resource_error("resource error: step limit of " + std::to_string(*opts.step_limit) + " exceeded");
    }

    // Runs until the continuation is empty (a solution) or everything fails.
    bool run() {
        for (;;) {
            if (done) return false;
            if (!cont) return true;
            ContPtr item = cont;
            cont = item->next;
            if (item->exit) {
                const Box& b = *item->box;
                if (!cps.empty() && cps.back().kind == CpKind::fail_marker && cps.back().box == item->box)
                    cps.pop_back();  // nothing left to retry inside the box
                else
                    cps.push_back({CpKind::redo_marker, item->box, subst.mark()});
                if (!emit(b, Port::exit, item->callee)) return false;
                continue;
            }
            if (!step(*item)) {
                if (!backtrack()) return false;
            }
        }
    }

    // Executes one goal item; false means failure.
    bool step(const Cont& item) {
        Term g = subst.deref(item.goal);
        if (g.is_var()) throw instantiation_error("instantiation error: unbound goal");
        if (!g.is_callable()) throw type_error("type error: callable expected, found " + write_term(g));
        if (g.has_functor(",", 2)) {
            ContPtr rest = push_goal(g.arg(1), item.parent_depth, item.caller, item.cut_barrier, item.goal_id, cont);
            cont = push_goal(g.arg(0), item.parent_depth, item.caller, item.cut_barrier, item.goal_id, rest);
            return true;
        }
        if (g.is_atom("!")) {
            if (cps.size() > item.cut_barrier) cps.resize(item.cut_barrier);
            return true;
        }
        if (g.has_functor("$gmark", 2)) {
            cont = push_goal(g.arg(1), item.parent_depth, item.caller, item.cut_barrier, goal_id_from(g.arg(0)), cont);
            return true;
        }

        count_step();
        PredicateKey key = *predicate_key(g);
        Builtin bi = builtin_of(key);
        auto defined_in = db.module_of(key);
        auto box = std::make_shared<const Box>(Box{++invocations, item.parent_depth + 1, g,
                                                   bi == Builtin::none && defined_in ? *defined_in : opts.module,
                                                   item.goal_id, item.caller});
        if (!emit(*box, Port::call)) return false;
        cps.push_back({CpKind::fail_marker, box, subst.mark()});
        const std::size_t barrier = cps.size();

        if (bi == Builtin::call) {
            Term target = subst.deref(g.arg(0));
            if (target.is_var()) throw instantiation_error("instantiation error: call/" + std::to_string(g.arity()));
            if (!target.is_callable()) throw type_error("type error: callable expected in call/" + std::to_string(g.arity()));
            Term called = target;
            if (g.arity() > 1) {
                std::vector<Term> args;
                if (target.is_compound())
                    for (const auto& a : target.args()) args.push_back(a);
                for (std::size_t i = 1; i < g.arity(); ++i) args.push_back(g.arg(i));
                called = Term::compound(target.name(), std::move(args));
            }
            // the called goal is opaque to cut: its barrier is this box
            cont = push_goal(called, box->depth, item.caller, barrier, std::nullopt, push_exit(box, nullptr, cont));
            return true;
        }
        if (bi != Builtin::none) {
            if (!run_builtin(bi, g)) return false;
            cont = push_exit(box, nullptr, cont);
            return true;
        }
        const auto* alts = db.clauses(key);
        if (!alts) {
            if (monitor)
                monitor->on_diagnostic("existence error: unknown procedure " + opts.module + ":" + key.str());
            return false;
        }
        return try_clauses(box, *alts, 0, cont);
    }

    bool compare(Builtin bi, const Term& g) {
        Integer a = eval_arith(g.arg(0), subst);
        Integer b = eval_arith(g.arg(1), subst);
        switch (bi) {
            case Builtin::lt: return a < b;
            case Builtin::gt: return a > b;
            case Builtin::le: return a <= b;
            case Builtin::ge: return a >= b;
            case Builtin::ar_eq: return a == b;
            case Builtin::ar_ne: return a != b;
            default: return false;
        }
    }

    bool run_builtin(Builtin bi, const Term& g) {
        switch (bi) {
            case Builtin::true_: return true;
            case Builtin::fail: return false;
            case Builtin::unify: return unify(g.arg(0), g.arg(1), subst, opts.occurs_check);
            case Builtin::not_unify: {
                const std::size_t mark = subst.mark();
                bool ok = unify(g.arg(0), g.arg(1), subst, opts.occurs_check);
                subst.undo_to(mark);
                return !ok;
            }
            case Builtin::eq: return apply(subst, g.arg(0)) == apply(subst, g.arg(1));
            case Builtin::neq: return !(apply(subst, g.arg(0)) == apply(subst, g.arg(1)));
            case Builtin::is: {
                Term v = Term::integer(eval_arith(g.arg(1), subst));
                return unify(g.arg(0), v, subst);
            }
            default: return compare(bi, g);
        }
    }
};

Solver::Solver(const Database& db, const Term& goal, Monitor* monitor, SolverOptions opts)
    : engine_(std::make_unique<Engine>(db, goal, monitor, std::move(opts))) {}

Solver::~Solver() = default;

bool Solver::next() {
    try {
        return engine_->next();
    } catch (...) {
        engine_->done = true;
        throw;
    }
}

bool Solver::aborted() const { return engine_->was_aborted; }
const Term& Solver::query() const { return engine_->query; }
const Substitution& Solver::bindings() const { return engine_->subst; }

std::vector<std::pair<std::string, Term>> Solver::answer() const {
    std::vector<std::pair<std::string, Term>> out;
    for (const auto& v : term_variables(engine_->query)) {
        const auto& name = v.var_name();
        if (name.empty() || name[0] == '_') continue;
        out.emplace_back(name, apply(engine_->subst, v));
    }
    return out;
}

std::string format_answer(const Solver& s, const OperatorTable& ops) {
    auto ans = s.answer();
    if (ans.empty()) return "yes";
    WriteOptions o;
    o.ops = &ops;
    o.var_naming = VarNaming::generated;
    o.max_priority = 699;
    std::string out;
    for (const auto& [name, value] : ans) {
        if (!out.empty()) out += ", ";
        out += name + " = " + write_term(value, o);
    }
    return out;
}

std::vector<std::string> run_query(std::string_view text, const Database& db, const OperatorTable& ops,
                                   Monitor* monitor, SolverOptions opts, std::size_t limit) {
    Sentence q = read_term(text, ops, opts.module);
    Solver s(db, q.term, monitor, opts);
    std::vector<std::string> lines;
    while (lines.size() < limit && s.next()) lines.push_back(format_answer(s, ops));
    if (lines.empty()) lines.push_back("no");
    return lines;
}

}  // namespace unexpand
