#pragma once

#include "pagegate/gateway.hpp"

#include <atomic>
#include <condition_variable>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace pagegate {

// Fans gateway events out to connected UI clients. Each client has a bounded
// queue; a client that falls behind is disconnected rather than slowing the
// gateway down.
class UiHub final : public EventSink {
public:
    explicit UiHub(std::size_t queue_limit = 4096) : limit_(queue_limit) {}

    void publish(const nlohmann::ordered_json& message) override;

    struct Client;
    // Registers a connected socket; `initial` lines are queued first.
    std::shared_ptr<Client> add(int fd, const std::vector<std::string>& initial);
    void remove(const std::shared_ptr<Client>& client);
    // Queues a reply for one client only.
    void send_to(const std::shared_ptr<Client>& client, std::string line);
    // Blocks until a line is available or the client is closed.
    bool next_line(const std::shared_ptr<Client>& client, std::string& line);

    std::function<void(int fd, std::size_t queued)> on_drop;
    std::size_t client_count();

private:
    void enqueue(const std::shared_ptr<Client>& c, std::string line, std::vector<std::pair<int, std::size_t>>& dropped);

    std::size_t limit_;
    std::mutex mu_;
    std::vector<std::shared_ptr<Client>> clients_;
};

struct UiHub::Client {
    int fd = -1;
    std::deque<std::string> queue;
    std::condition_variable cv;
    bool closed = false;
};

// Loopback NDJSON listeners: one port for agents, one for UI panels.
class Server {
public:
    Server(Gateway& gateway, UiHub& hub, std::string bind, int agent_port, int ui_port);
    ~Server();

    // Throws Error{config_invalid} when a port cannot be bound.
    void start();
    void stop();
    int agent_port() const { return agent_port_; }
    int ui_port() const { return ui_port_; }

private:
    void accept_loop(int listener, bool agent);
    void serve_agent(int fd);
    void serve_ui(int fd);
    void spawn(std::function<void()> fn);

    Gateway& gateway_;
    UiHub& hub_;
    std::string bind_;
    int agent_port_;
    int ui_port_;
    int agent_fd_ = -1;
    int ui_fd_ = -1;
    std::atomic<bool> running_{false};
    std::mutex threads_mu_;
    std::vector<std::thread> threads_;
    std::vector<int> open_fds_;
};

// Reads newline-terminated lines from a socket, capping each at `limit` bytes.
class LineReader {
public:
    LineReader(int fd, std::size_t limit) : fd_(fd), limit_(limit) {}
    enum class Status { line, too_long, closed };
    Status next(std::string& line);

private:
    int fd_;
    std::size_t limit_;
    std::string buf_;
    bool discarding_ = false;
};

bool write_line(int fd, std::string_view line);

} // namespace pagegate
