#include "unexpand/protocol.hpp"

#include <arpa/inet.h>
#include <cerrno>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <mutex>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <thread>
#include <unistd.h>

#include "json.hpp"
#include "unexpand/writer.hpp"

namespace unexpand {

using nlohmann::json;

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

class ProtocolMonitor : public Monitor {
public:
    ProtocolMonitor(DebugSession& sess, LineChannel& io) : sess_(sess), io_(io) {}

    void emit(const json& j) {
        std::lock_guard lk(write_mu_);
        io_.write(j.dump() + "\n");
    }

    void error(const std::string& msg) { emit({{"type", "error"}, {"message", msg}}); }

    // Reader side. Returns false once the connection should close.
    bool deliver(const std::string& line) {
        if (closed()) return false;
        json req = json::parse(line, nullptr, false);
        if (req.is_discarded() || !req.is_object() || !req.contains("cmd") || !req["cmd"].is_string()) {
            error("malformed request: " + line);
            close();
            return false;
        }
        std::unique_lock lk(mu_);
        if (closed_) return false;
        if (!awaiting_) {
            lk.unlock();
            error("request out of turn: " + req["cmd"].get<std::string>());
            return true;
        }
        awaiting_ = false;
        inbox_.push_back(std::move(req));
        cv_.notify_all();
        return true;
    }

    void close() {
        std::lock_guard lk(mu_);
        closed_ = true;
        cv_.notify_all();
    }

    // Marks the session finished; true if it was already closed.
    bool finish() {
        std::lock_guard lk(mu_);
        bool was = closed_;
        closed_ = true;
        cv_.notify_all();
        return was;
    }

    bool closed() {
        std::lock_guard lk(mu_);
        return closed_;
    }

    MonitorAction on_event(const TraceEvent& ev, const Substitution& b) override {
        if (closed()) return MonitorAction::abort;
        auto step = meta_controller(ev, b, sess_);
        if (!step) {
            if (sess_.mode == Mode::trace) emit(port_event(ev, b, step));
            return MonitorAction::proceed;
        }
        if (!sess_.should_stop(ev)) return MonitorAction::proceed;
        for (;;) {
            step = meta_controller(ev, b, sess_);
            {
                std::lock_guard lk(mu_);
                awaiting_ = true;
            }
            emit(port_event(ev, b, step));
            if (!step) {
                std::lock_guard lk(mu_);
                awaiting_ = false;
                return MonitorAction::proceed;
            }
            json req;
            {
                std::unique_lock lk(mu_);
                cv_.wait(lk, [&] { return closed_ || !inbox_.empty(); });
                if (closed_) return MonitorAction::abort;
                req = std::move(inbox_.front());
                inbox_.pop_front();
            }
            const std::string cmd = req["cmd"];
            if (cmd == "step") {
                sess_.mode = Mode::trace;
                return MonitorAction::proceed;
            }
            if (cmd == "continue") {
                sess_.mode = Mode::leap;
                return MonitorAction::proceed;
            }
            if (cmd == "skip") {
                sess_.skip_from(ev);
                return MonitorAction::proceed;
            }
            if (cmd == "abort") return MonitorAction::abort;
            if (cmd == "spy" || cmd == "nospy") {
                std::string pred = req.contains("pred") && req["pred"].is_string() ? req["pred"].get<std::string>() : "";
                bool ok = cmd == "spy" ? sess_.spy(pred) : sess_.nospy(pred);
                if (!ok) error("bad predicate indicator: " + pred);
                continue;
            }
            if (cmd == "view") {
                std::string v = req.contains("view") && req["view"].is_string() ? req["view"].get<std::string>() : "";
                if (v == "source")
                    sess_.view = View::source;
                else if (v == "target")
                    sess_.view = View::target;
                else
                    error("unknown view: " + v);
                continue;
            }
            error("unknown command: " + cmd);
        }
    }

private:
    json port_event(const TraceEvent& ev, const Substitution& b, const std::optional<DisplayedStep>& step) {
        const Program& prog = sess_.program();
        json j = {{"type", "port"},
                  {"n", ev.invocation},
                  {"depth", ev.depth},
                  {"port", lower(port_name(ev.port))},
                  {"source", nullptr},
                  {"target", target_text(ev.goal, prog.ops, b)},
                  {"module", ev.module},
                  {"line", nullptr},
                  {"hidden", !step.has_value()}};
        if (step && step->origin == DisplayedStep::Origin::source) j["source"] = step->text;
        if (step && step->line) j["line"] = *step->line;
        return j;
    }

    DebugSession& sess_;
    LineChannel& io_;
    std::mutex write_mu_;
    std::mutex mu_;
    std::condition_variable cv_;
    std::deque<json> inbox_;
    bool awaiting_ = false;
    bool closed_ = false;
};

}  // namespace

void serve(DebugSession& sess, const Term& query, LineChannel& transport, const ServeInfo& info,
           const SolverOptions& opts) {
    ProtocolMonitor mon(sess, transport);
    mon.emit({{"type", "hello"}, {"version", 1}, {"file", info.file}, {"goal", info.goal}});

    std::thread reader([&] {
        while (auto line = transport.read_line()) {
            if (line->find_first_not_of(" \t\r") == std::string::npos) continue;
            if (!mon.deliver(*line)) return;
        }
        mon.close();
    });

    SolverOptions so = opts;
    so.module = sess.program().module;
    try {
        Solver solver(sess.database(), query, &mon, so);
        WriteOptions w;
        w.ops = &sess.program().ops;
        w.var_naming = VarNaming::generated;
        w.max_priority = 699;
        while (solver.next()) {
            json bindings = json::object();
            for (const auto& [name, value] : solver.answer()) bindings[name] = write_term(value, w);
            mon.emit({{"type", "solution"}, {"bindings", bindings}});
        }
    } catch (const std::exception& e) {
        mon.error(e.what());
    }
    if (!mon.finish()) mon.emit({{"type", "done"}});
    transport.interrupt();
    reader.join();
}

FdChannel::FdChannel(int in_fd, int out_fd, bool owns) : in_(in_fd), out_(out_fd), owns_(owns) {}

FdChannel::~FdChannel() {
    if (!owns_) return;
    ::close(in_);
    if (out_ != in_) ::close(out_);
}

std::optional<std::string> FdChannel::read_line() {
    for (;;) {
        auto nl = buf_.find('\n');
        if (nl != std::string::npos) {
            std::string line = buf_.substr(0, nl);
            buf_.erase(0, nl + 1);
            if (!line.empty() && line.back() == '\r') line.pop_back();
            return line;
        }
        if (stop_) return std::nullopt;
        pollfd p{in_, POLLIN, 0};
        int r = ::poll(&p, 1, 50);
        if (r < 0 && errno != EINTR) return std::nullopt;
        if (r <= 0) continue;
        char tmp[4096];
        ssize_t n = ::read(in_, tmp, sizeof tmp);
        if (n < 0 && errno == EINTR) continue;
        if (n <= 0) {
            if (buf_.empty()) return std::nullopt;
            std::string line;
            line.swap(buf_);
            return line;
        }
        buf_.append(tmp, static_cast<std::size_t>(n));
    }
}

void FdChannel::write(std::string_view text) {
    while (!text.empty()) {
        ssize_t n = ::send(out_, text.data(), text.size(), MSG_NOSIGNAL);
        if (n < 0 && errno == ENOTSOCK) n = ::write(out_, text.data(), text.size());
        if (n < 0 && errno == EINTR) continue;
        if (n <= 0) return;
        text.remove_prefix(static_cast<std::size_t>(n));
    }
}

void FdChannel::interrupt() { stop_ = true; }

TcpServer::TcpServer(std::uint16_t port) {
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd_ < 0) throw error(std::string("socket: ") + std::strerror(errno));
    int one = 1;
    ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = htons(port);
    if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0 || ::listen(fd_, 8) < 0) {
        std::string msg = std::strerror(errno);
        ::close(fd_);
        throw error("cannot listen on port " + std::to_string(port) + ": " + msg);
    }
    socklen_t len = sizeof addr;
    ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
}

TcpServer::~TcpServer() {
    if (fd_ >= 0) ::close(fd_);
}

void TcpServer::serve_one(const std::function<void(FdChannel&)>& handler) {
    int c = ::accept(fd_, nullptr, nullptr);
    if (c < 0) throw error(std::string("accept: ") + std::strerror(errno));
    FdChannel ch(c, c, true);
    handler(ch);
}

void TcpServer::serve_forever(const std::function<void(FdChannel&)>& handler) {
    for (;;) {
        int c = ::accept(fd_, nullptr, nullptr);
        if (c < 0) {
            if (errno == EINTR) continue;
            throw error(std::string("accept: ") + std::strerror(errno));
        }
        std::thread([c, handler] {
            FdChannel ch(c, c, true);
            handler(ch);
        }).detach();
    }
}

int connect_tcp(const std::string& host, std::uint16_t port) {
    int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) throw error(std::string("socket: ") + std::strerror(errno));
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
        ::close(fd);
        throw error("bad address: " + host);
    }
    if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0) {
        std::string msg = std::strerror(errno);
        ::close(fd);
        throw error("connect: " + msg);
    }
    return fd;
}

}  // namespace unexpand
