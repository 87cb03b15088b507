#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "unexpand/debugger.hpp"

namespace unexpand {

struct ServeInfo {
    std::string file;
    std::string goal;
};

/// Runs one debug session over a line transport speaking newline-delimited
/// JSON. Blocks until the query is exhausted, aborted or the peer goes away.
/// Requests are read on a separate thread, so a request sent while no port
/// event is pending is answered with an error event.
void serve(DebugSession& sess, const Term& query, LineChannel& transport, const ServeInfo& info,
           const SolverOptions& opts = {});

/// Line channel over a pair of file descriptors (a socket, or stdin/stdout).
class FdChannel : public LineChannel {
public:
    FdChannel(int in_fd, int out_fd, bool owns = false);
    ~FdChannel() override;
    std::optional<std::string> read_line() override;
    void write(std::string_view text) override;
    void interrupt() override;

private:
    int in_;
    int out_;
    bool owns_;
    std::string buf_;
    std::atomic<bool> stop_{false};
};

/// Blocking TCP listener on 127.0.0.1. Port 0 picks a free port.
class TcpServer {
public:
    explicit TcpServer(std::uint16_t port);
    ~TcpServer();
    TcpServer(const TcpServer&) = delete;
    TcpServer& operator=(const TcpServer&) = delete;

    std::uint16_t port() const { return port_; }
    /// Accepts one connection and runs `handler` on it in the calling thread.
    void serve_one(const std::function<void(FdChannel&)>& handler);
    /// Accepts connections forever, one thread per connection.
    [[noreturn]] void serve_forever(const std::function<void(FdChannel&)>& handler);

private:
    int fd_ = -1;
    std::uint16_t port_ = 0;
};

/// Connected socket to host:port; throws on failure.
int connect_tcp(const std::string& host, std::uint16_t port);

}  // namespace unexpand
