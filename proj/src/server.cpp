#include "pagegate/server.hpp"

#include "pagegate/error.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>

namespace pagegate {

bool write_line(int fd, std::string_view line) {
    std::string data(line);
    data += '\n';
    std::size_t sent = 0;
    while (sent < data.size()) {
        const auto n = ::send(fd, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
        if (n < 0 && errno == EINTR) continue;
        if (n <= 0) return false;
        sent += static_cast<std::size_t>(n);
    }
    return true;
}

LineReader::Status LineReader::next(std::string& line) {
    for (;;) {
        const auto nl = buf_.find('\n');
        if (nl != std::string::npos) {
            if (discarding_) {
                buf_.erase(0, nl + 1);
                discarding_ = false;
                continue;
            }
            line = buf_.substr(0, nl);
            buf_.erase(0, nl + 1);
            if (line.size() > limit_) return Status::too_long;
            return Status::line;
        }
        if (buf_.size() > limit_) {
            // Report once, then drop bytes up to the next newline.
            const bool first = !discarding_;
            buf_.clear();
            discarding_ = true;
            if (first) return Status::too_long;
        }
        char chunk[65536];
        const auto n = ::recv(fd_, chunk, sizeof chunk, 0);
        if (n < 0 && errno == EINTR) continue;
        if (n <= 0) return Status::closed;
        buf_.append(chunk, static_cast<std::size_t>(n));
    }
}

void UiHub::enqueue(const std::shared_ptr<Client>& c, std::string line, std::vector<std::pair<int, std::size_t>>& dropped) {
    if (c->closed) return;
    if (c->queue.size() >= limit_) {
        dropped.emplace_back(c->fd, c->queue.size());
        c->closed = true;
        c->queue.clear();
        ::shutdown(c->fd, SHUT_RDWR);
        c->cv.notify_all();
        return;
    }
    c->queue.push_back(std::move(line));
    c->cv.notify_all();
}

void UiHub::publish(const nlohmann::ordered_json& message) {
    const std::string line = wire::encode(message);
    std::vector<std::pair<int, std::size_t>> dropped;
    {
        std::lock_guard lock(mu_);
        for (const auto& c : clients_) enqueue(c, line, dropped);
    }
    if (on_drop)
        for (const auto& [fd, queued] : dropped) on_drop(fd, queued);
}

std::shared_ptr<UiHub::Client> UiHub::add(int fd, const std::vector<std::string>& initial) {
    auto c = std::make_shared<Client>();
    c->fd = fd;
    std::lock_guard lock(mu_);
    for (const auto& l : initial) c->queue.push_back(l);
    clients_.push_back(c);
    return c;
}

void UiHub::remove(const std::shared_ptr<Client>& client) {
    std::lock_guard lock(mu_);
    client->closed = true;
    client->cv.notify_all();
    std::erase(clients_, client);
}

void UiHub::send_to(const std::shared_ptr<Client>& client, std::string line) {
    std::vector<std::pair<int, std::size_t>> dropped;
    {
        std::lock_guard lock(mu_);
        enqueue(client, std::move(line), dropped);
    }
    if (on_drop)
        for (const auto& [fd, queued] : dropped) on_drop(fd, queued);
}

bool UiHub::next_line(const std::shared_ptr<Client>& client, std::string& line) {
    std::unique_lock lock(mu_);
    client->cv.wait(lock, [&] { return client->closed || !client->queue.empty(); });
    if (client->closed) return false;
    line = std::move(client->queue.front());
    client->queue.pop_front();
    return true;
}

std::size_t UiHub::client_count() {
    std::lock_guard lock(mu_);
    return clients_.size();
}

namespace {

int listen_on(const std::string& bind, int& port) {
    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) throw Error(ErrorCode::config_invalid, "socket() failed");
    const int one = 1;
    ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(static_cast<std::uint16_t>(port));
    if (::inet_pton(AF_INET, bind.c_str(), &addr.sin_addr) != 1) {
        ::close(fd);
        throw Error(ErrorCode::config_invalid, "bind address must be IPv4: " + bind);
    }
    if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 || ::listen(fd, 16) != 0) {
        ::close(fd);
        throw Error(ErrorCode::config_invalid, "cannot listen on " + bind + ":" + std::to_string(port));
    }
    socklen_t len = sizeof addr;
    ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
    port = ntohs(addr.sin_port);
    return fd;
}

} // namespace

Server::Server(Gateway& gateway, UiHub& hub, std::string bind, int agent_port, int ui_port)
    : gateway_(gateway), hub_(hub), bind_(std::move(bind)), agent_port_(agent_port), ui_port_(ui_port) {}

Server::~Server() { stop(); }

void Server::spawn(std::function<void()> fn) {
    std::lock_guard lock(threads_mu_);
    threads_.emplace_back(std::move(fn));
}

void Server::start() {
    agent_fd_ = listen_on(bind_, agent_port_);
    try {
        ui_fd_ = listen_on(bind_, ui_port_);
    } catch (...) {
        ::close(agent_fd_);
        agent_fd_ = -1;
        throw;
    }
    hub_.on_drop = [this](int fd, std::size_t queued) {
        gateway_.record_client_dropped({{"fd", fd}, {"queued", queued}});
    };
    running_ = true;
    spawn([this] { accept_loop(agent_fd_, true); });
    spawn([this] { accept_loop(ui_fd_, false); });
    spawn([this] {
        while (running_) {
            gateway_.tick();
            ::poll(nullptr, 0, 250);
        }
    });
}

void Server::stop() {
    if (!running_.exchange(false)) return;
    gateway_.stop();
    {
        std::lock_guard lock(threads_mu_);
        for (int fd : open_fds_) ::shutdown(fd, SHUT_RDWR);
    }
    for (;;) {
        std::vector<std::thread> batch;
        {
            std::lock_guard lock(threads_mu_);
            batch.swap(threads_);
        }
        if (batch.empty()) break;
        for (auto& t : batch) t.join();
    }
    ::close(agent_fd_);
    ::close(ui_fd_);
}

void Server::accept_loop(int listener, bool agent) {
    while (running_) {
        pollfd p{listener, POLLIN, 0};
        if (::poll(&p, 1, 100) <= 0) continue;
        const int fd = ::accept(listener, nullptr, nullptr);
        if (fd < 0) continue;
        {
            std::lock_guard lock(threads_mu_);
            if (!running_) {
                ::close(fd);
                return;
            }
            open_fds_.push_back(fd);
            threads_.emplace_back([this, fd, agent] {
                agent ? serve_agent(fd) : serve_ui(fd);
                std::lock_guard done(threads_mu_);
                std::erase(open_fds_, fd);
                ::close(fd);
            });
        }
    }
}

void Server::serve_agent(int fd) {
    LineReader reader(fd, wire::kMaxMessageBytes);
    std::string line;
    for (;;) {
        const auto status = reader.next(line);
        if (status == LineReader::Status::closed) break;
        const std::string reply = status == LineReader::Status::too_long
                                      ? wire::encode(wire::error_message(wire::kTooLarge, "message exceeds 1 MiB"))
                                      : gateway_.handle_agent_line(line);
        if (!write_line(fd, reply)) break;
    }
    ::shutdown(fd, SHUT_RDWR);
}

void Server::serve_ui(int fd) {
    std::vector<std::string> initial;
    for (const auto& m : gateway_.sync_messages()) initial.push_back(wire::encode(m));
    auto client = hub_.add(fd, initial);
    std::thread writer([this, client, fd] {
        std::string out;
        while (hub_.next_line(client, out))
            if (!write_line(fd, out)) break;
        ::shutdown(fd, SHUT_RDWR);
    });
    LineReader reader(fd, wire::kMaxMessageBytes);
    std::string line;
    for (;;) {
        const auto status = reader.next(line);
        if (status == LineReader::Status::closed) break;
        if (status == LineReader::Status::too_long) {
            hub_.send_to(client, wire::encode(wire::error_message(wire::kTooLarge, "message exceeds 1 MiB")));
            continue;
        }
        if (auto reply = gateway_.handle_ui_line(line)) hub_.send_to(client, *reply);
    }
    hub_.remove(client);
    writer.join();
}

} // namespace pagegate
