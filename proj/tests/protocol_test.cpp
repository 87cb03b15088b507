#include <gtest/gtest.h>

#include <sys/socket.h>
#include <thread>
#include <unistd.h>

#include "json.hpp"
#include "support/programs.hpp"
#include "unexpand/protocol.hpp"

namespace unexpand {
namespace {

using nlohmann::json;
using testing::load_example;
using testing::parse;

// A served session on one end of a TCP connection, a client on the other.
class Session {
public:
    Session(const std::string& file, const std::string& goal) : Session(load_example(file), file, goal) {}
    Session(Program prog, const std::string& file, const std::string& goal)
        : prog_(std::move(prog)), db_(Database::consult(prog_.clauses)), server_(0) {
        Term q = parse(goal, prog_.ops);
        thread_ = std::thread([this, q, file, goal] {
            server_.serve_one([&](FdChannel& ch) {
                DebugSession sess(prog_, db_);
                serve(sess, q, ch, {file, goal});
            });
        });
        fd_ = connect_tcp("127.0.0.1", server_.port());
        client_ = std::make_unique<FdChannel>(fd_, fd_, false);
    }
    ~Session() {
        ::shutdown(fd_, SHUT_RDWR);
        thread_.join();
        client_.reset();
        ::close(fd_);
    }

    void send(const json& j) { client_->write(j.dump() + "\n"); }
    void raw(const std::string& s) { client_->write(s + "\n"); }
    std::optional<json> next() {
        auto line = client_->read_line();
        if (!line) return std::nullopt;
        json j = json::parse(*line);
        EXPECT_EQ(json::parse(j.dump()), j);
        return j;
    }
    void hang_up() { ::shutdown(fd_, SHUT_WR); }

private:
    Program prog_;
    Database db_;
    TcpServer server_;
    std::thread thread_;
    int fd_ = -1;
    std::unique_ptr<FdChannel> client_;
};

// Drives the session with `cmd` after every non-hidden port event.
std::vector<json> drive(Session& s, const json& cmd, std::size_t max_events = 500) {
    std::vector<json> all;
    while (auto j = s.next()) {
        all.push_back(*j);
        if ((*j)["type"] == "done" || all.size() > max_events) break;
        if ((*j)["type"] == "port" && !(*j)["hidden"].get<bool>()) s.send(cmd);
    }
    return all;
}

void check_port_event(const json& j) {
    ASSERT_TRUE(j["n"].is_number_integer());
    ASSERT_TRUE(j["depth"].is_number_integer());
    ASSERT_TRUE(j["port"].is_string());
    std::string port = j["port"];
    EXPECT_TRUE(port == "call" || port == "exit" || port == "redo" || port == "fail") << port;
    EXPECT_TRUE(j["source"].is_string() || j["source"].is_null());
    EXPECT_TRUE(j["target"].is_string());
    EXPECT_TRUE(j["module"].is_string());
    EXPECT_TRUE(j["line"].is_number_integer() || j["line"].is_null());
    EXPECT_TRUE(j["hidden"].is_boolean());
}

TEST(ProtocolTest, StepToCompletion) {
    Session s("ex0.pl", "f(3,R)");
    auto events = drive(s, {{"cmd", "step"}});
    ASSERT_GE(events.size(), 4u);
    EXPECT_EQ(events[0], json({{"type", "hello"}, {"version", 1}, {"file", "ex0.pl"}, {"goal", "f(3,R)"}}));
    std::vector<std::string> sources;
    std::size_t hidden = 0;
    for (std::size_t i = 1; i + 2 < events.size(); ++i) {
        ASSERT_EQ(events[i]["type"], "port") << events[i].dump();
        check_port_event(events[i]);
        if (events[i]["hidden"].get<bool>()) {
            ++hidden;
            EXPECT_TRUE(events[i]["source"].is_null());
        }
        if (events[i]["source"].is_string()) {
            std::string src = events[i]["source"];
            if (sources.empty() || sources.back() != src) sources.push_back(src);
        }
    }
    EXPECT_EQ(hidden, 2u);
    std::vector<std::string> want = {"f(3) := 3 < 42 ? k(l(m(3)))*3 | 1000", "m(3) := 3",
                                     "f(3) := 3 < 42 ? k(l(m(3)))*3 | 1000", "l(3) := 3 - 2",
                                     "f(3) := 3 < 42 ? k(l(m(3)))*3 | 1000", "k(1) := 1 + 1",
                                     "f(3) := 3 < 42 ? k(l(m(3)))*3 | 1000"};
    EXPECT_EQ(sources, want);
    EXPECT_EQ(events[events.size() - 2], json::parse(R"({"type":"solution","bindings":{"R":"6"}})"));
    EXPECT_EQ(events.back(), json({{"type", "done"}}));
}

TEST(ProtocolTest, TargetViewAfterToggle) {
    Session s("ex0.pl", "f(3,R)");
    ASSERT_EQ((*s.next())["type"], "hello");
    auto first = *s.next();
    s.send({{"cmd", "view"}, {"view", "target"}});
    auto again = *s.next();
    EXPECT_EQ(again["n"], first["n"]);
    EXPECT_EQ(again["port"], first["port"]);
    EXPECT_TRUE(again["source"].is_null());
    s.send({{"cmd", "step"}});
    auto events = drive(s, {{"cmd", "step"}});
    std::vector<std::string> calls;
    for (const auto& e : events) {
        if (e["type"] != "port") continue;
        EXPECT_TRUE(e["source"].is_null());
        EXPECT_FALSE(e["hidden"].get<bool>());
        if (e["port"] == "call") calls.push_back(e["target"]);
    }
    EXPECT_EQ(calls, (std::vector<std::string>{"<(3,42)", "m(3,_G4)", "l(3,_G5)", "is(_G5,3-2)", "k(1,_G6)",
                                               "is(_G6,1+1)", "is(_G7,2*3)", "=(_G1,6)"}));
}

// The (port, target) stream does not depend on the view.
TEST(ProtocolTest, ViewDoesNotChangeTheComputation) {
    auto pairs = [](const std::vector<json>& ev) {
        std::vector<std::string> out;
        for (const auto& e : ev)
            if (e["type"] == "port") out.push_back(e["port"].get<std::string>() + " " + e["target"].get<std::string>());
        return out;
    };
    std::vector<json> src, tgt;
    {
        Session s("ex0.pl", "f(3,R)");
        src = drive(s, {{"cmd", "step"}});
    }
    {
        Session s("ex0.pl", "f(3,R)");
        ASSERT_EQ((*s.next())["type"], "hello");
        tgt.push_back(*s.next());
        s.send({{"cmd", "view"}, {"view", "target"}});
        s.next();
        s.send({{"cmd", "step"}});
        auto rest = drive(s, {{"cmd", "step"}});
        tgt.insert(tgt.end(), rest.begin(), rest.end());
    }
    EXPECT_EQ(pairs(src), pairs(tgt));
}

TEST(ProtocolTest, ImmediateAbort) {
    Session s("ex0.pl", "f(3,R)");
    auto events = drive(s, {{"cmd", "abort"}});
    ASSERT_EQ(events.size(), 3u);
    EXPECT_EQ(events[1]["type"], "port");
    EXPECT_EQ(events[2], json({{"type", "done"}}));
}

TEST(ProtocolTest, ContinueRunsToTheEnd) {
    Session s("ex0.pl", "f(3,R)");
    auto events = drive(s, {{"cmd", "continue"}});
    ASSERT_GE(events.size(), 4u);
    EXPECT_EQ(events[events.size() - 2]["type"], "solution");
    EXPECT_EQ(events.size(), 4u);
}

TEST(ProtocolTest, SpyThenContinue) {
    Session s("ex0.pl", "f(3,R)");
    ASSERT_EQ((*s.next())["type"], "hello");
    s.next();
    s.send({{"cmd", "spy"}, {"pred", "k/1"}});
    auto again = *s.next();
    EXPECT_EQ(again["n"], 2);
    s.send({{"cmd", "continue"}});
    auto stop = *s.next();
    EXPECT_EQ(stop["type"], "port");
    EXPECT_EQ(stop["target"], "k(1,_G6)");
    s.send({{"cmd", "nospy"}, {"pred", "k/1"}});
    s.next();
    s.send({{"cmd", "continue"}});
    auto rest = drive(s, {{"cmd", "continue"}});
    ASSERT_EQ(rest.size(), 2u);
    EXPECT_EQ(rest[0]["type"], "solution");
}

TEST(ProtocolTest, OutOfTurnRequestIsAnError) {
    // long enough that the second request lands while the query is running
    Program p = load_program("count(0).\ncount(N) :- N > 0, M is N - 1, count(M).\n", "count");
    Session s(std::move(p), "count.pl", "count(100000)");
    ASSERT_EQ((*s.next())["type"], "hello");
    s.next();
    s.send({{"cmd", "continue"}});
    s.send({{"cmd", "step"}});
    std::vector<std::string> types;
    while (auto j = s.next()) {
        types.push_back((*j)["type"]);
        if (types.back() == "done") break;
    }
    EXPECT_EQ(types, (std::vector<std::string>{"error", "solution", "done"}));
}

TEST(ProtocolTest, UnknownCommandKeepsTheEvent) {
    Session s("ex0.pl", "f(3,R)");
    ASSERT_EQ((*s.next())["type"], "hello");
    auto first = *s.next();
    s.send({{"cmd", "jump"}});
    EXPECT_EQ((*s.next())["type"], "error");
    EXPECT_EQ(*s.next(), first);
    s.send({{"cmd", "abort"}});
    EXPECT_EQ(*s.next(), json({{"type", "done"}}));
}

TEST(ProtocolTest, MalformedJsonCloses) {
    Session s("ex0.pl", "f(3,R)");
    ASSERT_EQ((*s.next())["type"], "hello");
    s.next();
    s.raw("{not json");
    auto err = s.next();
    ASSERT_TRUE(err);
    EXPECT_EQ((*err)["type"], "error");
    EXPECT_FALSE(s.next());
}

TEST(ProtocolTest, HangUpAbortsTheQuery) {
    Session s("ex0.pl", "f(3,R)");
    ASSERT_EQ((*s.next())["type"], "hello");
    s.next();
    s.hang_up();
    // no solution is reported once the client is gone
    while (auto j = s.next()) EXPECT_NE((*j)["type"], "solution");
}

}  // namespace
}  // namespace unexpand
