/**
 * @file protocol.hpp
 * @brief Line-based text protocol for external black-box objectives.
 *
 * Request: one line with n decimal floats, reply: one line with q decimal
 * floats. Numbers use 17 significant digits, '.' as radix, single spaces as
 * separators and '\n' as terminator. A reply starting with "ERR " reports an
 * evaluation error. One request is in flight at a time.
 *
 * The client runs the server command through /bin/sh with its stdin and
 * stdout connected to a Unix socket pair (POSIX only).
 */

#ifndef DFMO_PROTOCOL_HPP
#define DFMO_PROTOCOL_HPP

#include <cerrno>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include "types.hpp"

namespace dfmo {

/// Malformed reply: wrong count, unparsable token, missing terminator.
class ProtocolError : public OracleError {
public:
    using OracleError::OracleError;
};

/// No complete reply within the timeout.
class TimeoutError : public OracleError {
public:
    using OracleError::OracleError;
};

/// Reply parsed but contains nan or inf.
class NonFiniteReply : public OracleError {
public:
    using OracleError::OracleError;
};

/// Server answered "ERR <msg>".
class RemoteEvaluationError : public OracleError {
public:
    using OracleError::OracleError;
};

inline constexpr const char* kTimeoutEnvVar = "DFMO_EVAL_TIMEOUT_MS";
inline constexpr int kDefaultTimeoutMs = 30000;

/// 17 significant digits, enough to round-trip any double.
inline std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string encode_line(std::span<const double> values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ' ';
        out += format_real(values[i]);
    }
    out += '\n';
    return out;
}

/// Parses whitespace-separated reals (without the trailing newline). Tokens
/// "nan"/"inf" parse and are reported as NonFiniteReply.
inline Vector decode_line(std::string_view line) {
    Vector out;
    std::size_t pos = 0;
    while (pos < line.size()) {
        while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t' || line[pos] == '\r')) ++pos;
        if (pos >= line.size()) break;
        std::size_t end = pos;
        while (end < line.size() && line[end] != ' ' && line[end] != '\t' && line[end] != '\r') ++end;
        const std::string_view tok = line.substr(pos, end - pos);
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc() || ptr != tok.data() + tok.size()) {
            throw ProtocolError("protocol: cannot parse token '" + std::string(tok) + "'");
        }
        out.push_back(v);
        pos = end;
    }
    return out;
}

inline int timeout_from_env() {
    if (const char* env = std::getenv(kTimeoutEnvVar)) {
        int ms = 0;
        auto [ptr, ec] = std::from_chars(env, env + std::strlen(env), ms);
        if (ec == std::errc() && ms > 0) return ms;
    }
    return kDefaultTimeoutMs;
}

/**
 * @brief One child process speaking the line protocol.
 *
 * Not copyable; the child is terminated and reaped on destruction.
 */
class LineProtocolClient {
public:
    explicit LineProtocolClient(const std::string& command, int timeout_ms = timeout_from_env())
        : command_(command), timeout_ms_(timeout_ms) {
        int sv[2];
        if (::socketpair(AF_UNIX, SOCK_STREAM, 0, sv) != 0) {
            throw OracleError("protocol: socketpair failed: " + std::string(std::strerror(errno)));
        }
        pid_ = ::fork();
        if (pid_ < 0) {
            ::close(sv[0]);
            ::close(sv[1]);
            throw OracleError("protocol: fork failed: " + std::string(std::strerror(errno)));
        }
        if (pid_ == 0) {
            ::close(sv[0]);
            ::dup2(sv[1], STDIN_FILENO);
            ::dup2(sv[1], STDOUT_FILENO);
            ::close(sv[1]);
            ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
            ::_exit(127);
        }
        ::close(sv[1]);
        fd_ = sv[0];
    }

    LineProtocolClient(const LineProtocolClient&) = delete;
    LineProtocolClient& operator=(const LineProtocolClient&) = delete;

    ~LineProtocolClient() {
        if (fd_ >= 0) {
            ::shutdown(fd_, SHUT_WR);
            ::close(fd_);
        }
        if (pid_ > 0) {
            int status = 0;
            // Give a well-behaved server a moment to exit on EOF.
            for (int i = 0; i < 50; ++i) {
                if (::waitpid(pid_, &status, WNOHANG) == pid_) return;
                ::usleep(2000);
            }
            ::kill(pid_, SIGKILL);
            ::waitpid(pid_, &status, 0);
        }
    }

    /// Sends x, returns the q values. expected_q == 0 accepts any count >= 1.
    Vector evaluate(std::span<const double> x, std::size_t expected_q = 0) {
        const std::string request = encode_line(x);
        send_all(request);
        const std::string reply = read_line();
        if (reply.rfind("ERR", 0) == 0 && (reply.size() == 3 || reply[3] == ' ')) {
            throw RemoteEvaluationError("external objective reported an error at x = " + trimmed(request) + ": " +
                                        (reply.size() > 4 ? reply.substr(4) : std::string("(no message)")));
        }
        Vector values;
        try {
            values = decode_line(reply);
        } catch (const ProtocolError& e) {
            throw ProtocolError(std::string(e.what()) + " in reply '" + reply + "' to x = " + trimmed(request));
        }
        if (values.empty() || (expected_q != 0 && values.size() != expected_q)) {
            throw ProtocolError("protocol: expected " + std::to_string(expected_q) + " values, got " +
                                std::to_string(values.size()) + " in reply '" + reply + "' to x = " +
                                trimmed(request));
        }
        if (!detail::all_finite(values)) {
            throw NonFiniteReply("external objective returned a non-finite value at x = " + trimmed(request) +
                                 "; raw reply: '" + reply + "'");
        }
        return values;
    }

private:
    static std::string trimmed(std::string s) {
        while (!s.empty() && s.back() == '\n') s.pop_back();
        return s;
    }

    void send_all(const std::string& data) {
        std::size_t sent = 0;
        while (sent < data.size()) {
            const ssize_t k = ::send(fd_, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
            if (k < 0) {
                if (errno == EINTR) continue;
                throw ProtocolError("protocol: cannot write to '" + command_ + "': " + std::strerror(errno));
            }
            sent += static_cast<std::size_t>(k);
        }
    }

    std::string read_line() {
        const auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms_);
        while (true) {
            const auto nl = buffer_.find('\n');
            if (nl != std::string::npos) {
                std::string line = buffer_.substr(0, nl);
                buffer_.erase(0, nl + 1);
                return line;
            }
            const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
                deadline - std::chrono::steady_clock::now());
            if (left.count() <= 0) {
                throw TimeoutError("protocol: no reply from '" + command_ + "' within " +
                                   std::to_string(timeout_ms_) + " ms");
            }
            pollfd p{fd_, POLLIN, 0};
            const int ready = ::poll(&p, 1, static_cast<int>(left.count()));
            if (ready < 0) {
                if (errno == EINTR) continue;
                throw ProtocolError(std::string("protocol: poll failed: ") + std::strerror(errno));
            }
            if (ready == 0) continue;
            char chunk[4096];
            const ssize_t k = ::recv(fd_, chunk, sizeof chunk, 0);
            if (k < 0) {
                if (errno == EINTR) continue;
                throw ProtocolError(std::string("protocol: read failed: ") + std::strerror(errno));
            }
            if (k == 0) {
                throw ProtocolError("protocol: '" + command_ + "' closed the connection" +
                                    (buffer_.empty() ? std::string() : " after partial reply '" + buffer_ + "'"));
            }
            buffer_.append(chunk, static_cast<std::size_t>(k));
        }
    }

    std::string command_;
    int timeout_ms_;
    pid_t pid_ = -1;
    int fd_ = -1;
    std::string buffer_;
};

}  // namespace dfmo

#endif  // DFMO_PROTOCOL_HPP
