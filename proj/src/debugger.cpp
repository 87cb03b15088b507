#include "unexpand/debugger.hpp"

#include <charconv>
#include <cstdio>

#include "unexpand/writer.hpp"

namespace unexpand {

namespace {

bool is_comparison(const std::string& f) {
    return f == "<" || f == ">" || f == "=<" || f == ">=" || f == "=:=" || f == "=\\=" || f == "==" ||
           f == "\\==";
}

// Source functor a target goal stands for: the expression of is/2, the
// comparison itself, or a call with its added result/list arguments.
struct FocusTarget {
    std::string name;
    std::vector<std::size_t> arities;
};

std::optional<FocusTarget> focus_target(const Term& goal) {
    if (!goal.is_callable()) return std::nullopt;
    if (goal.has_functor("is", 2)) {
        const Term& e = goal.arg(1);
        if (!e.is_compound()) return std::nullopt;
        return FocusTarget{e.name(), {e.arity()}};
    }
    if (goal.has_functor("=", 2)) return std::nullopt;
    std::size_t n = goal.is_compound() ? goal.arity() : 0;
    if (n == 2 && is_comparison(goal.name())) return FocusTarget{goal.name(), {2}};
    FocusTarget t{goal.name(), {}};
    if (n >= 1) t.arities.push_back(n - 1);
    if (n >= 2) t.arities.push_back(n - 2);
    t.arities.push_back(n);
    return t;
}

bool search(const Term& t, const FocusTarget& want, std::size_t arity, TermPath& path) {
    if (t.is_callable() && t.name() == want.name && (t.is_compound() ? t.arity() : 0) == arity) return true;
    if (!t.is_compound()) return false;
    for (std::uint32_t i = 0; i < t.arity(); ++i) {
        path.push_back(i);
        if (search(t.arg(i), want, arity, path)) return true;
        path.pop_back();
    }
    return false;
}

std::optional<TermPath> find_focus(const Term& si, const Term& goal) {
    auto want = focus_target(goal);
    if (!want) return std::nullopt;
    bool rule = si.has_functor(":=", 2) || si.has_functor("-->", 2) || si.has_functor(":-", 2);
    for (std::size_t arity : want->arities) {
        TermPath path;
        if (rule) {
            path = {1};
            if (search(si.arg(1), *want, arity, path)) return path;
            path = {0};
            if (search(si.arg(0), *want, arity, path)) return path;
        } else if (search(si, *want, arity, path)) {
            return path;
        }
    }
    return std::nullopt;
}

DisplayedStep base_step(const TraceEvent& ev) {
    DisplayedStep s;
    s.n = ev.invocation;
    s.depth = ev.depth;
    s.port = ev.port;
    return s;
}

const SourceInfo* clause_info(const SymbolTable& st, const ActivationPtr& a) {
    return a ? st.lookup_clause(a->clause) : nullptr;
}

DisplayedStep qualified(const TraceEvent& ev, const Substitution& b, const OperatorTable& ops,
                        std::optional<int> line = std::nullopt) {
    DisplayedStep s = base_step(ev);
    s.text = ev.module + ":" + target_text(ev.goal, ops, b);
    s.origin = DisplayedStep::Origin::qualified;
    s.line = line;
    return s;
}

DisplayedStep source_step(const TraceEvent& ev, const Substitution& b, const OperatorTable& ops,
                          const SourceInfo& info, const ActivationPtr& act, bool with_focus) {
    Term si = apply(b, act ? rename_with(act->renaming, *info.si) : *info.si);
    WriteOptions o;
    o.ops = &ops;
    o.spacing_threshold = 500;
    o.var_naming = VarNaming::display;
    DisplayedStep s = base_step(ev);
    std::optional<TermPath> focus;
    if (with_focus) focus = find_focus(si, apply(b, ev.goal));
    if (focus) {
        MarkedText m = write_term_marked(si, o, *focus);
        s.text = std::move(m.text);
        s.focus = m.mark;
    } else {
        s.text = write_term(si, o);
    }
    s.origin = DisplayedStep::Origin::source;
    s.line = info.span.start_line;
    return s;
}

std::optional<PredicateKey> parse_pred_indicator(std::string_view indicator) {
    auto slash = indicator.rfind('/');
    if (slash == std::string_view::npos || slash == 0) return std::nullopt;
    std::size_t arity = 0;
    auto digits = indicator.substr(slash + 1);
    auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), arity);
    if (ec != std::errc() || p != digits.data() + digits.size() || digits.empty()) return std::nullopt;
    return PredicateKey{std::string(indicator.substr(0, slash)), arity};
}

}  // namespace

std::string format_step(const DisplayedStep& s, bool color) {
    char head[32];
    std::snprintf(head, sizeof head, "%4llu %2d    ", static_cast<unsigned long long>(s.n), s.depth);
    std::string out = head;
    out += port_name(s.port);
    out += ": ";
    if (color && s.focus && s.focus->second <= s.text.size()) {
        out += s.text.substr(0, s.focus->first);
        out += "\x1b[1;4m";
        out += s.text.substr(s.focus->first, s.focus->second - s.focus->first);
        out += "\x1b[0m";
        out += s.text.substr(s.focus->second);
    } else {
        out += s.text;
    }
    out += " ? ";
    return out;
}

std::string target_text(const Term& goal, const OperatorTable& ops, const Substitution& bindings) {
    WriteOptions o;
    o.ops = &ops;
    o.bindings = &bindings;
    o.canonical_top = true;
    o.var_naming = VarNaming::generated;
    return write_term(goal, o);
}

DebugSession::DebugSession(const Program& program, const Database& db) : program_(program), db_(db) {
    for (const auto& c : program.clauses) {
        const SourceInfo* info = program.symtab.lookup_clause(c.id);
        if (!info || !info->si) continue;
        Term src = *info->si;
        if (src.has_functor(":-", 2) && src.arg(0).has_functor(":=", 2)) src = src.arg(0);
        Term head = (src.has_functor(":=", 2) || src.has_functor("-->", 2) || src.has_functor(":-", 2))
                        ? src.arg(0)
                        : src;
        if (auto k = predicate_key(head)) source_keys_[*predicate_key(c.head)].insert(*k);
    }
}

bool DebugSession::spy(std::string_view indicator) {
    auto k = parse_pred_indicator(indicator);
    if (!k) return false;
    spypoints_.insert(*k);
    return true;
}

bool DebugSession::nospy(std::string_view indicator) {
    auto k = parse_pred_indicator(indicator);
    if (!k) return false;
    spypoints_.erase(*k);
    return true;
}

bool DebugSession::at_spypoint(const TraceEvent& ev) const {
    auto k = predicate_key(ev.goal);
    if (!k) return false;
    if (spypoints_.contains(*k)) return true;
    auto it = source_keys_.find(*k);
    if (it == source_keys_.end()) return false;
    for (const auto& src : it->second)
        if (spypoints_.contains(src)) return true;
    return false;
}

bool DebugSession::should_stop(const TraceEvent& ev) {
    switch (mode) {
        case Mode::trace: return true;
        case Mode::leap: return at_spypoint(ev);
        case Mode::skip:
            if (ev.depth > skip_depth_) return false;
            mode = Mode::trace;
            return true;
        case Mode::off: return false;
    }
    return true;
}

void DebugSession::skip_from(const TraceEvent& ev) {
    if (ev.port == Port::call || ev.port == Port::redo) {
        mode = Mode::skip;
        skip_depth_ = ev.depth;
    } else {
        mode = Mode::trace;
    }
}

std::optional<DisplayedStep> meta_controller(const TraceEvent& ev, const Substitution& b, const DebugSession& sess) {
    const Program& prog = sess.program();
    if (sess.view == View::target) {
        DisplayedStep s = base_step(ev);
        s.text = target_text(ev.goal, prog.ops, b);
        s.origin = DisplayedStep::Origin::target;
        return s;
    }
    const SymbolTable& st = prog.symtab;
    const SourceInfo* caller = clause_info(st, ev.caller);

    // A proved function or grammar rule shows its own definition.
    if (ev.port == Port::exit && ev.callee && (ev.goal_id || caller)) {
        const SourceInfo* callee = clause_info(st, ev.callee);
        if (callee && callee->si) return source_step(ev, b, prog.ops, *callee, ev.callee, false);
    }
    if (ev.goal_id) {
        if (const SourceInfo* g = st.lookup_goal(*ev.goal_id)) {
            if (g->si) return source_step(ev, b, prog.ops, *g, ev.caller, true);
            return qualified(ev, b, prog.ops, g->span.start_line);
        }
    }
    if (caller) {
        // unifications added by the translation have no source counterpart
        if (ev.goal.has_functor("=", 2)) return std::nullopt;
        if (caller->si) return source_step(ev, b, prog.ops, *caller, ev.caller, true);
        return qualified(ev, b, prog.ops, caller->span.start_line);
    }
    return qualified(ev, b, prog.ops);
}

ParsedCommand parse_command(std::string_view line) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.remove_suffix(1);
    while (!line.empty() && (line.front() == ' ' || line.front() == '\t')) line.remove_prefix(1);
    if (line.empty() || line == "c") return {Command::creep, {}};
    if (line == "s") return {Command::skip, {}};
    if (line == "l") return {Command::leap, {}};
    if (line == "a") return {Command::abort, {}};
    if (line == "v") return {Command::toggle_view, {}};
    if (line.size() > 1 && (line[0] == '+' || line[0] == '-')) {
        std::string arg(line.substr(1));
        if (!parse_pred_indicator(arg)) return {Command::invalid, {}};
        return {line[0] == '+' ? Command::spy : Command::nospy, arg};
    }
    return {Command::invalid, {}};
}

namespace {

class LoopMonitor : public Monitor {
public:
    LoopMonitor(DebugSession& sess, LineChannel& io, const LoopOptions& opts) : sess_(sess), io_(io), opts_(opts) {}

    MonitorAction on_event(const TraceEvent& ev, const Substitution& b) override {
        if (!meta_controller(ev, b, sess_)) return MonitorAction::proceed;
        if (!sess_.should_stop(ev)) return MonitorAction::proceed;
        for (;;) {
            auto step = meta_controller(ev, b, sess_);
            if (!step) return MonitorAction::proceed;
            io_.write(format_step(*step, opts_.color) + (opts_.newline_after_prompt ? "\n" : ""));
            if (eof_) return MonitorAction::proceed;
            auto line = io_.read_line();
            if (!line) {
                eof_ = true;
                return MonitorAction::proceed;
            }
            ParsedCommand c = parse_command(*line);
            switch (c.cmd) {
                case Command::creep: sess_.mode = Mode::trace; return MonitorAction::proceed;
                case Command::leap: sess_.mode = Mode::leap; return MonitorAction::proceed;
                case Command::skip: sess_.skip_from(ev); return MonitorAction::proceed;
                case Command::abort: return MonitorAction::abort;
                case Command::spy:
                    sess_.spy(c.arg);
                    io_.write("% spypoint on " + c.arg + "\n");
                    break;
                case Command::nospy:
                    sess_.nospy(c.arg);
                    io_.write("% spypoint removed from " + c.arg + "\n");
                    break;
                case Command::toggle_view:
                    sess_.view = sess_.view == View::source ? View::target : View::source;
                    break;
                case Command::invalid:
                    io_.write("% unknown command; use c, s, l, a, v, +name/arity or -name/arity\n");
                    break;
            }
        }
    }

    void on_diagnostic(const std::string& message) override { io_.write("% " + message + "\n"); }

private:
    DebugSession& sess_;
    LineChannel& io_;
    const LoopOptions& opts_;
    bool eof_ = false;
};

}  // namespace

std::vector<std::string> interactive_loop(DebugSession& sess, const Term& query, LineChannel& io,
                                          const LoopOptions& opts) {
    LoopMonitor mon(sess, io, opts);
    SolverOptions so = opts.solver;
    so.module = sess.program().module;
    Solver solver(sess.database(), query, &mon, so);
    std::vector<std::string> answers;
    while (solver.next()) {
        answers.push_back(format_answer(solver, sess.program().ops));
        io.write(answers.back() + "\n");
    }
    if (solver.aborted())
        io.write("% execution aborted\n");
    else if (answers.empty())
        io.write("no\n");
    return answers;
}

}  // namespace unexpand
