#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unistd.h>

#include "CLI11.hpp"
#include "unexpand/debugger.hpp"
#include "unexpand/expansion.hpp"
#include "unexpand/protocol.hpp"
#include "unexpand/reader.hpp"
#include "unexpand/solver.hpp"

using namespace unexpand;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw error(path + ": cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Program load(const std::string& path, ExtractMode mode = ExtractMode::annotate) {
    LoadOptions lo;
    lo.mode = mode;
    return load_program(slurp(path), module_name_for(path), lo);
}

// Diagnostics carry the module name; users know the file.
std::string located(const std::string& msg, const std::string& path) {
    std::string mod = module_name_for(path) + ":";
    if (msg.rfind(mod, 0) == 0) return path + ":" + msg.substr(mod.size());
    return msg;
}

class StderrMonitor : public Monitor {
public:
    MonitorAction on_event(const TraceEvent&, const Substitution&) override { return MonitorAction::proceed; }
    void on_diagnostic(const std::string& m) override { std::cerr << "% " << m << "\n"; }
};

class StreamChannel : public LineChannel {
public:
    explicit StreamChannel(std::istream& in) : in_(in) {}
    std::optional<std::string> read_line() override {
        std::string line;
        if (!std::getline(in_, line)) return std::nullopt;
        return line;
    }
    void write(std::string_view text) override {
        std::cout << text;
        std::cout.flush();
    }

private:
    std::istream& in_;
};

Term parse_goal(const std::string& goal, const Program& p) { return read_term(goal, p.ops, p.module).term; }

}  // namespace

int main(int argc, char** argv) {
    std::signal(SIGPIPE, SIG_IGN);
    CLI::App app{"unexpand: source-level debugging for language extensions"};
    app.require_subcommand(1);

    std::string file, goal, view = "source", script;
    bool strip = false;
    int port = 7458;

    auto* expand = app.add_subcommand("expand", "print the expanded program and its symbol table");
    expand->add_option("file", file, "program file")->required();
    expand->add_flag("--strip", strip, "print the plain program without annotations");

    auto* run = app.add_subcommand("run", "print every solution of a goal");
    run->add_option("file", file, "program file")->required();
    run->add_option("-g,--goal", goal, "query")->required();

    auto* debug = app.add_subcommand("debug", "trace a goal interactively");
    debug->add_option("file", file, "program file")->required();
    debug->add_option("-g,--goal", goal, "query")->required();
    debug->add_option("--view", view, "source or target")->check(CLI::IsMember({"source", "target"}));
    debug->add_option("--script", script, "file with one debugger command per line");

    auto* srv = app.add_subcommand("serve", "debug a goal over the JSON line protocol");
    srv->add_option("file", file, "program file")->required();
    srv->add_option("-g,--goal", goal, "query")->required();
    srv->add_option("--port", port, "TCP port; 0 uses stdin/stdout")->check(CLI::Range(0, 65535));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*expand) {
            ExtractMode mode = strip ? ExtractMode::strip : ExtractMode::annotate;
            Program p = load(file, mode);
            std::cout << dump_program(p, mode);
            for (const auto& w : p.warnings) std::cerr << "% warning: " << w << "\n";
            return 0;
        }

        Program p = load(file);
        Database db = Database::consult(p.clauses);
        SolverOptions so;
        so.module = p.module;

        if (*run) {
            StderrMonitor mon;
            for (const auto& line : run_query(goal, db, p.ops, &mon, so)) std::cout << line << "\n";
            return 0;
        }

        Term query = parse_goal(goal, p);
        if (*debug) {
            DebugSession sess(p, db);
            sess.view = view == "target" ? View::target : View::source;
            LoopOptions lo;
            lo.solver = so;
            lo.color = ::isatty(1) && !std::getenv("UNEXPAND_NO_COLOR");
            std::ifstream sf;
            if (!script.empty()) {
                sf.open(script);
                if (!sf) throw error(script + ": cannot open file");
            }
            lo.newline_after_prompt = !script.empty() || !::isatty(0);
            StreamChannel ch(script.empty() ? std::cin : sf);
            interactive_loop(sess, query, ch, lo);
            return 0;
        }

        ServeInfo info{file, goal};
        if (port == 0) {
            DebugSession sess(p, db);
            FdChannel ch(0, 1);
            serve(sess, query, ch, info, so);
            return 0;
        }
        TcpServer server(static_cast<std::uint16_t>(port));
        std::cerr << "% listening on 127.0.0.1:" << server.port() << "\n";
        server.serve_forever([&](FdChannel& ch) {
            DebugSession sess(p, db);
            serve(sess, query, ch, info, so);
        });
    } catch (const std::exception& e) {
        std::cerr << located(e.what(), file) << "\n";
        return 1;
    }
}
