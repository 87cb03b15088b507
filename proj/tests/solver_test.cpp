#include <gtest/gtest.h>

#include "support/programs.hpp"
#include "unexpand/solver.hpp"

namespace unexpand {
namespace {

using testing::load_example;
using testing::parse;

Database db_of(const std::string& text, OperatorTable* ops_out = nullptr) {
    Program p = load_program(text, "user");
    if (ops_out) *ops_out = p.ops;
    return Database::consult(p.clauses);
}

struct Recorder : Monitor {
    struct Ev {
        std::uint64_t n;
        int depth;
        Port port;
        std::string goal;
        bool gid;
    };
    std::vector<Ev> events;
    std::vector<std::string> diags;
    const OperatorTable* ops = nullptr;
    MonitorAction on_event(const TraceEvent& ev, const Substitution& b) override {
        WriteOptions o;
        o.ops = ops;
        o.bindings = &b;
        o.canonical_top = true;
        o.var_naming = VarNaming::generated;
        events.push_back({ev.invocation, ev.depth, ev.port, write_term(ev.goal, o), ev.goal_id.has_value()});
        return MonitorAction::proceed;
    }
    void on_diagnostic(const std::string& m) override { diags.push_back(m); }
};

TEST(DatabaseTest, ConsultKeepsOrder) {
    Database db = db_of("p(1).\np(2).\nq.\n");
    const auto* ps = db.clauses({"p", 1});
    ASSERT_NE(ps, nullptr);
    ASSERT_EQ(ps->size(), 2u);
    EXPECT_EQ((*ps)[0].head.arg(0).value(), 1);
    EXPECT_EQ(db.predicate_count(), 2u);
    EXPECT_EQ(db.module_of({"p", 1}), "user");
    EXPECT_EQ(Database::consult({}).predicate_count(), 0u);
}

TEST(DatabaseTest, RejectsReservedHeads) {
    Database db;
    EXPECT_THROW(db.add(make_clause(parse("(is(A,B) :- true)", default_ops()), {"t", 1})), load_error);
    EXPECT_THROW(db.add(make_clause(parse("'$x'(a)", default_ops()), {"t", 2})), load_error);
    EXPECT_THROW(make_clause(parse("(a, b)", default_ops()), {"t", 3}), load_error);
}

TEST(SolverTest, BacktrackingOrder) {
    Database db = db_of("p(1).\np(2).\n");
    EXPECT_EQ(run_query("p(X)", db, default_ops()), (std::vector<std::string>{"X = 1", "X = 2"}));
}

TEST(SolverTest, QueryOracles) {
    Database db = db_of("");
    EXPECT_EQ(run_query("fail", db, default_ops()), (std::vector<std::string>{"no"}));
    EXPECT_EQ(run_query("X = a", db, default_ops()), (std::vector<std::string>{"X = a"}));
    EXPECT_EQ(run_query("true", db, default_ops()), (std::vector<std::string>{"yes"}));
    EXPECT_EQ(run_query("X is 2 + 3 * 4, X > 10", db, default_ops()), (std::vector<std::string>{"X = 14"}));
    EXPECT_EQ(run_query("X = f(Y), Y = 1", db, default_ops()), (std::vector<std::string>{"X = f(1), Y = 1"}));
    EXPECT_EQ(run_query("_X = 1", db, default_ops()), (std::vector<std::string>{"yes"}));
}

TEST(SolverTest, FunctionalProgram) {
    Program p = load_example("ex0.pl");
    Database db = Database::consult(p.clauses);
    SolverOptions so;
    so.module = p.module;
    // Hand evaluation: m(3)=3, l(3)=1, k(1)=2, 2*3=6. A printed 12 would need k(l(m(3))) = 4.
    EXPECT_EQ(run_query("f(3,R)", db, p.ops, nullptr, so), (std::vector<std::string>{"R = 6"}));
    EXPECT_EQ(run_query("f(100,R)", db, p.ops, nullptr, so), (std::vector<std::string>{"R = 1000"}));
    EXPECT_EQ(run_query("f(41,R)", db, p.ops, nullptr, so), (std::vector<std::string>{"R = 120"}));
}

TEST(SolverTest, CutPrunesAlternatives) {
    Database db = db_of("a(1).\na(2).\nfirst(X) :- a(X), !.\nmax(X,Y,X) :- X >= Y, !.\nmax(_,Y,Y).\n");
    EXPECT_EQ(run_query("first(X)", db, default_ops()), (std::vector<std::string>{"X = 1"}));
    EXPECT_EQ(run_query("max(5,3,M)", db, default_ops()), (std::vector<std::string>{"M = 5"}));
    EXPECT_EQ(run_query("max(1,3,M)", db, default_ops()), (std::vector<std::string>{"M = 3"}));
    // cut inside call/1 is local to it
    EXPECT_EQ(run_query("call((a(X), !))", db, default_ops()), (std::vector<std::string>{"X = 1"}));
    EXPECT_EQ(run_query("call((a(X), !)), a(Y)", db, default_ops()).size(), 2u);
}

TEST(SolverTest, ComparisonsAndCall) {
    Database db = db_of("a(1).\na(2).\n");
    auto ops = default_ops();
    EXPECT_EQ(run_query("a(X), X \\= 1", db, ops), (std::vector<std::string>{"X = 2"}));
    EXPECT_EQ(run_query("a(X), X == 2", db, ops), (std::vector<std::string>{"X = 2"}));
    EXPECT_EQ(run_query("G = a(X), call(G)", db, ops).size(), 2u);
    EXPECT_EQ(run_query("call(a, X)", db, ops), (std::vector<std::string>{"X = 1", "X = 2"}));
}

TEST(SolverTest, Errors) {
    Database db = db_of("loop :- loop.\n");
    auto ops = default_ops();
    EXPECT_THROW(run_query("X is Y + 1", db, ops), instantiation_error);
    EXPECT_THROW(run_query("X is foo + 1", db, ops), type_error);
    EXPECT_THROW(run_query("X is 1 // 0", db, ops), evaluation_error);
    EXPECT_THROW(run_query("call(X)", db, ops), instantiation_error);
    SolverOptions so;
    so.step_limit = 1000;
    EXPECT_THROW(run_query("loop", db, ops, nullptr, so), resource_error);
}

TEST(SolverTest, UnknownPredicateFailsWithDiagnostic) {
    Database db = db_of("");
    Recorder r;
    EXPECT_EQ(run_query("nope(1)", db, default_ops(), &r), (std::vector<std::string>{"no"}));
    ASSERT_EQ(r.diags.size(), 1u);
    EXPECT_NE(r.diags[0].find("nope/1"), std::string::npos);
}

TEST(SolverTest, OccursCheck) {
    Database db = db_of("");
    SolverOptions so;
    so.occurs_check = true;
    EXPECT_EQ(run_query("X = f(X)", db, default_ops(), nullptr, so), (std::vector<std::string>{"no"}));
}

TEST(SolverTest, PortDiscipline) {
    Program p = load_example("lists.pl");
    Database db = Database::consult(p.clauses);
    Recorder r;
    r.ops = &p.ops;
    auto out = run_query("app(X, Y, [1,2]), len(X, N), N > 0", db, p.ops, &r);
    EXPECT_EQ(out.size(), 2u);
    // every box opens with Call; Exit/Redo/Fail only for open boxes; each box ends with Exit or Fail
    std::map<std::uint64_t, std::string> state;
    for (const auto& e : r.events) {
        auto it = state.find(e.n);
        switch (e.port) {
            case Port::call:
                EXPECT_EQ(it, state.end()) << e.n;
                state[e.n] = "in";
                break;
            case Port::exit:
                ASSERT_NE(it, state.end());
                EXPECT_TRUE(it->second == "in");
                it->second = "out";
                break;
            case Port::redo:
                ASSERT_NE(it, state.end());
                EXPECT_TRUE(it->second == "out");
                it->second = "in";
                break;
            case Port::fail:
                ASSERT_NE(it, state.end());
                EXPECT_TRUE(it->second == "in");
                it->second = "failed";
                break;
        }
    }
    std::uint64_t last = 0;
    for (const auto& e : r.events) {
        if (e.port == Port::call) {
            EXPECT_GT(e.n, last);
            last = e.n;
        }
    }
}

TEST(SolverTest, GuardedClauseLeavesNoRedo) {
    Program p = load_example("ex0.pl");
    Database db = Database::consult(p.clauses);
    Recorder r;
    r.ops = &p.ops;
    SolverOptions so;
    so.module = p.module;
    // the trailing test fails, forcing backtracking into f
    EXPECT_EQ(run_query("f(3,R), R > 100", db, p.ops, &r, so), (std::vector<std::string>{"no"}));
    for (const auto& e : r.events) EXPECT_NE(e.port, Port::redo) << e.goal;
    ASSERT_FALSE(r.events.empty());
    EXPECT_EQ(r.events.front().goal, "f(3,_G1)");
    EXPECT_EQ(r.events.front().n, 2u);
    EXPECT_EQ(r.events.front().depth, 2);
}

TEST(SolverTest, TargetTraceShape) {
    Program p = load_example("ex0.pl");
    Database db = Database::consult(p.clauses);
    Recorder r;
    r.ops = &p.ops;
    SolverOptions so;
    so.module = p.module;
    run_query("f(3,R)", db, p.ops, &r, so);
    std::vector<std::string> calls;
    for (const auto& e : r.events)
        if (e.port == Port::call)
            calls.push_back(std::to_string(e.n) + " " + std::to_string(e.depth) + " " + e.goal);
    EXPECT_EQ(calls, (std::vector<std::string>{"2 2 f(3,_G1)", "3 3 <(3,42)", "4 3 m(3,_G4)", "5 3 l(3,_G5)",
                                               "6 4 is(_G5,3-2)", "7 3 k(1,_G6)", "8 4 is(_G6,1+1)",
                                               "9 3 is(_G7,2*3)", "10 3 =(_G1,6)"}));
}

// Watching does not change what is computed.
TEST(SolverTest, MonitorIsNeutral) {
    Program p = load_example("family.pl");
    Database db = Database::consult(p.clauses);
    Recorder r;
    r.ops = &p.ops;
    for (const char* q : {"ancestor(tom, X)", "grandparent(X, Y)", "parent(X, jim)", "ancestor(jim, X)"})
        EXPECT_EQ(run_query(q, db, p.ops), run_query(q, db, p.ops, &r)) << q;
    EXPECT_FALSE(r.events.empty());
}

struct Aborter : Monitor {
    int seen = 0;
    MonitorAction on_event(const TraceEvent&, const Substitution&) override {
        return ++seen >= 3 ? MonitorAction::abort : MonitorAction::proceed;
    }
};

TEST(SolverTest, AbortStopsTheQuery) {
    Program p = load_example("ex0.pl");
    Database db = Database::consult(p.clauses);
    Aborter a;
    SolverOptions so;
    so.module = p.module;
    Solver s(db, parse("f(3,R)", p.ops), &a, so);
    EXPECT_FALSE(s.next());
    EXPECT_TRUE(s.aborted());
    EXPECT_EQ(a.seen, 3);
}

}  // namespace
}  // namespace unexpand
