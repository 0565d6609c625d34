#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <csignal>
#include <cstring>

#include "cohort/error.hpp"
#include "cohort/scorer.hpp"
#include "httplib.h"

namespace cohort {

namespace {

constexpr int kReadTimeoutMs = 30'000;

}  // namespace

HttpScorer::HttpScorer(std::string base_url, std::string path, std::chrono::milliseconds timeout)
    : m_base_url(std::move(base_url)), m_path(std::move(path)), m_timeout(timeout)
{}

std::vector<PairScore> HttpScorer::score(std::span<const PairRequest> batch)
{
    httplib::Client client(m_base_url);
    if (!client.is_valid()) {
        throw ConfigError("invalid scorer address \"" + m_base_url + "\"");
    }
    auto secs = std::chrono::duration_cast<std::chrono::seconds>(m_timeout);
    auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(m_timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());

    auto res = client.Post(m_path, encode_scoring_request(batch), "application/json");
    if (!res) {
        throw ScorerTransportError("POST " + m_base_url + m_path + " failed: " + httplib::to_string(res.error()));
    }
    if (res->status >= 500) {
        throw ScorerTransportError("POST " + m_base_url + m_path + " returned HTTP " + std::to_string(res->status));
    }
    if (res->status != 200) {
        throw ScorerProtocolError("POST " + m_base_url + m_path + " returned HTTP " +
                                  std::to_string(res->status) + ": " + res->body);
    }
    return parse_scoring_response(res->body);
}

ProcessScorer::ProcessScorer(std::vector<std::string> argv) : m_argv(std::move(argv))
{
    if (m_argv.empty()) {
        throw ConfigError("process scorer needs a command");
    }
    // A dead child must surface as EPIPE, not kill the caller.
    std::signal(SIGPIPE, SIG_IGN);
}

ProcessScorer::~ProcessScorer()
{
    stop();
}

void ProcessScorer::start()
{
    int to_child[2];
    int from_child[2];
    if (pipe(to_child) != 0) {
        throw ScorerTransportError(std::string("pipe: ") + std::strerror(errno));
    }
    if (pipe(from_child) != 0) {
        close(to_child[0]);
        close(to_child[1]);
        throw ScorerTransportError(std::string("pipe: ") + std::strerror(errno));
    }
    std::vector<char*> args;
    for (auto& arg : m_argv) {
        args.push_back(arg.data());
    }
    args.push_back(nullptr);

    pid_t pid = fork();
    if (pid < 0) {
        for (int fd : {to_child[0], to_child[1], from_child[0], from_child[1]}) {
            close(fd);
        }
        throw ScorerTransportError(std::string("fork: ") + std::strerror(errno));
    }
    if (pid == 0) {
        dup2(to_child[0], STDIN_FILENO);
        dup2(from_child[1], STDOUT_FILENO);
        for (int fd : {to_child[0], to_child[1], from_child[0], from_child[1]}) {
            close(fd);
        }
        execvp(args[0], args.data());
        _exit(127);
    }
    close(to_child[0]);
    close(from_child[1]);
    m_pid = pid;
    m_to_child = to_child[1];
    m_from_child = from_child[0];
    m_buffer.clear();
}

void ProcessScorer::stop() noexcept
{
    if (m_to_child >= 0) {
        close(m_to_child);
        m_to_child = -1;
    }
    if (m_from_child >= 0) {
        close(m_from_child);
        m_from_child = -1;
    }
    if (m_pid > 0) {
        kill(m_pid, SIGTERM);
        waitpid(m_pid, nullptr, 0);
        m_pid = -1;
    }
}

std::vector<PairScore> ProcessScorer::score(std::span<const PairRequest> batch)
{
    std::lock_guard lock(m_mutex);
    if (m_pid < 0) {
        start();
    }
    auto fail = [&](const std::string& what) {
        stop();
        throw ScorerTransportError("scorer process " + m_argv.front() + ": " + what);
    };

    auto request = encode_scoring_request(batch) + '\n';
    std::size_t written = 0;
    while (written < request.size()) {
        auto n = write(m_to_child, request.data() + written, request.size() - written);
        if (n < 0) {
            if (errno == EINTR) {
                continue;
            }
            fail(std::string("write: ") + std::strerror(errno));
        }
        written += static_cast<std::size_t>(n);
    }

    std::size_t newline;
    while ((newline = m_buffer.find('\n')) == std::string::npos) {
        pollfd pfd{m_from_child, POLLIN, 0};
        int ready = poll(&pfd, 1, kReadTimeoutMs);
        if (ready == 0) {
            fail("timed out waiting for a response");
        }
        if (ready < 0) {
            if (errno == EINTR) {
                continue;
            }
            fail(std::string("poll: ") + std::strerror(errno));
        }
        char chunk[4096];
        auto n = read(m_from_child, chunk, sizeof chunk);
        if (n < 0 && errno == EINTR) {
            continue;
        }
        if (n <= 0) {
            fail("closed its output before answering");
        }
        m_buffer.append(chunk, static_cast<std::size_t>(n));
    }
    auto line = m_buffer.substr(0, newline);
    m_buffer.erase(0, newline + 1);
    return parse_scoring_response(line);
}

}  // namespace cohort
