#include "refsol/verify.hpp"

#include <cerrno>
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <cstring>
#include <fcntl.h>
#include <filesystem>
#include <poll.h>
#include <sys/stat.h>
#include <sys/wait.h>
#include <unistd.h>

namespace refsol {

namespace {

namespace fs = std::filesystem;

bool executable(const fs::path& p) { return ::access(p.c_str(), X_OK) == 0 && !fs::is_directory(p); }

std::string resolve_interpreter() {
    std::string name = interpreter_name();
    if (name.find('/') != std::string::npos) {
        if (executable(name)) return name;
        throw InterpreterMissing("interpreter not executable: " + name);
    }
    const char* path = std::getenv("PATH");
    std::string_view dirs = path ? path : "/usr/bin:/bin";
    while (true) {
        auto colon = dirs.find(':');
        std::string_view dir = dirs.substr(0, colon);
        fs::path candidate = fs::path(dir.empty() ? "." : std::string(dir)) / name;
        if (executable(candidate)) return candidate.string();
        if (colon == std::string_view::npos) break;
        dirs.remove_prefix(colon + 1);
    }
    throw InterpreterMissing("interpreter not found on PATH: " + name);
}

class Fd {
public:
    Fd() = default;
    explicit Fd(int fd) : fd_(fd) {}
    Fd(Fd&& o) noexcept : fd_(o.release()) {}
    Fd& operator=(Fd&& o) noexcept {
        reset(o.release());
        return *this;
    }
    ~Fd() { reset(); }
    int get() const { return fd_; }
    int release() { return std::exchange(fd_, -1); }
    void reset(int fd = -1) {
        if (fd_ >= 0) ::close(fd_);
        fd_ = fd;
    }

private:
    int fd_ = -1;
};

struct Pipe {
    Fd read, write;
};

Pipe make_pipe() {
    int fds[2];
    if (::pipe2(fds, O_CLOEXEC) != 0) throw SpawnFailure(std::string("pipe: ") + std::strerror(errno));
    return {Fd(fds[0]), Fd(fds[1])};
}

class TempScript {
public:
    explicit TempScript(std::string_view source) {
        std::string tmpl = (fs::temp_directory_path() / "refsol-XXXXXX.py").string();
        int fd = ::mkstemps(tmpl.data(), 3);
        if (fd < 0) throw SpawnFailure(std::string("mkstemps: ") + std::strerror(errno));
        Fd guard(fd);
        path_ = tmpl;
        std::size_t done = 0;
        while (done < source.size()) {
            ssize_t n = ::write(fd, source.data() + done, source.size() - done);
            if (n < 0 && errno == EINTR) continue;
            if (n < 0) throw SpawnFailure(std::string("write script: ") + std::strerror(errno));
            done += static_cast<std::size_t>(n);
        }
    }
    ~TempScript() {
        std::error_code ec;
        fs::remove(path_, ec);
    }
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

std::string fold_crlf(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '\r' && i + 1 < s.size() && s[i + 1] == '\n') continue;
        out.push_back(s[i]);
    }
    return out;
}

}  // namespace

std::string interpreter_name() {
    const char* env = std::getenv("REFSOL_INTERPRETER");
    return env && *env ? env : "python3";
}

ExecutionResult run_program(std::string_view source, std::string_view input, std::int64_t timeout_ms) {
    std::string interpreter = resolve_interpreter();
    TempScript script(source);
    Pipe in = make_pipe();
    Pipe out = make_pipe();
    Pipe status = make_pipe();  // carries errno if exec fails

    auto start = std::chrono::steady_clock::now();
    pid_t pid = ::fork();
    if (pid < 0) throw SpawnFailure(std::string("fork: ") + std::strerror(errno));
    if (pid == 0) {
        ::setpgid(0, 0);
        ::dup2(in.read.get(), STDIN_FILENO);
        ::dup2(out.write.get(), STDOUT_FILENO);
        int devnull = ::open("/dev/null", O_WRONLY);
        if (devnull >= 0) ::dup2(devnull, STDERR_FILENO);
        const char* argv[] = {interpreter.c_str(), script.path().c_str(), nullptr};
        ::execv(interpreter.c_str(), const_cast<char* const*>(argv));
        int err = errno;
        [[maybe_unused]] auto n = ::write(status.write.get(), &err, sizeof err);
        ::_exit(127);
    }
    ::setpgid(pid, pid);
    in.read.reset();
    out.write.reset();
    status.write.reset();

    int exec_errno = 0;
    if (::read(status.read.get(), &exec_errno, sizeof exec_errno) == sizeof exec_errno) {
        ::waitpid(pid, nullptr, 0);
        throw SpawnFailure("exec " + interpreter + ": " + std::strerror(exec_errno));
    }

    ::fcntl(in.write.get(), F_SETFL, O_NONBLOCK);
    std::signal(SIGPIPE, SIG_IGN);

    ExecutionResult result;
    std::size_t written = 0;
    if (input.empty()) in.write.reset();
    auto deadline = start + std::chrono::milliseconds(timeout_ms);
    char buf[65536];
    while (out.read.get() >= 0) {
        auto now = std::chrono::steady_clock::now();
        if (now >= deadline) {
            result.timed_out = true;
            break;
        }
        pollfd fds[2];
        nfds_t nfds = 0;
        fds[nfds++] = {out.read.get(), POLLIN, 0};
        if (in.write.get() >= 0) fds[nfds++] = {in.write.get(), POLLOUT, 0};
        auto wait = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count();
        int ready = ::poll(fds, nfds, static_cast<int>(std::max<std::int64_t>(1, wait)));
        if (ready < 0 && errno != EINTR) break;
        if (ready <= 0) continue;
        if (fds[0].revents & (POLLIN | POLLHUP | POLLERR)) {
            ssize_t n = ::read(out.read.get(), buf, sizeof buf);
            if (n > 0) {
                result.stdout_data.append(buf, static_cast<std::size_t>(n));
            } else if (n == 0 || errno != EINTR) {
                out.read.reset();
            }
        }
        if (nfds > 1 && (fds[1].revents & (POLLOUT | POLLERR | POLLHUP))) {
            ssize_t n = ::write(in.write.get(), input.data() + written, input.size() - written);
            if (n > 0) written += static_cast<std::size_t>(n);
            if ((n < 0 && errno != EAGAIN && errno != EINTR) || written == input.size()) in.write.reset();
        }
    }
    in.write.reset();

    int wstatus = 0;
    if (result.timed_out) {
        ::kill(-pid, SIGKILL);
        ::waitpid(pid, &wstatus, 0);
    } else {
        // Stdout closed; the process may still be running.
        while (true) {
            pid_t r = ::waitpid(pid, &wstatus, WNOHANG);
            if (r == pid) break;
            if (std::chrono::steady_clock::now() >= deadline) {
                ::kill(-pid, SIGKILL);
                ::waitpid(pid, &wstatus, 0);
                result.timed_out = true;
                break;
            }
            ::usleep(1000);
        }
    }
    if (!result.timed_out && WIFEXITED(wstatus)) result.exit_status = WEXITSTATUS(wstatus);
    result.elapsed_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                            std::chrono::steady_clock::now() - start)
                            .count();
    return result;
}

std::string EquivalenceVerdict::to_string() const {
    switch (kind) {
        case Kind::Equivalent: return "Equivalent";
        case Kind::Divergent: return "Divergent(" + std::to_string(sample_index) + ")";
        case Kind::Inconclusive: return "Inconclusive(" + reason + ")";
    }
    return {};
}

EquivalenceVerdict check_equivalence(const Submission& original, std::string_view transformed,
                                     std::span<const IoSample> samples, std::int64_t timeout_ms) {
    if (samples.empty()) throw std::invalid_argument("check_equivalence needs at least one sample");
    using Kind = EquivalenceVerdict::Kind;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        ExecutionResult a, b;
        try {
            a = run_program(original.source, samples[i].input, timeout_ms);
            b = run_program(transformed, samples[i].input, timeout_ms);
        } catch (const SpawnFailure& e) {
            return {Kind::Inconclusive, i, e.what()};
        }
        if (a.timed_out || b.timed_out) {
            return {Kind::Inconclusive, i, "timeout on sample " + std::to_string(i)};
        }
        if (fold_crlf(a.stdout_data) != fold_crlf(b.stdout_data)) return {Kind::Divergent, i, {}};
    }
    return {Kind::Equivalent, 0, {}};
}

}  // namespace refsol
