#include "invsynth/subprocess.hpp"

#include <csignal>
#include <cstring>
#include <stdexcept>

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

namespace invsynth {

namespace {
// A dead solver must surface as EPIPE on write, not kill the host.
struct SigpipeGuard {
  SigpipeGuard() { std::signal(SIGPIPE, SIG_IGN); }
};
}  // namespace

Subprocess::Subprocess(const std::vector<std::string>& argv) {
  static SigpipeGuard guard;
  if (argv.empty()) throw std::invalid_argument("empty command");
  int to_child[2], from_child[2];
  if (pipe(to_child) != 0 || pipe(from_child) != 0)
    throw std::runtime_error("pipe() failed");
  pid_ = fork();
  if (pid_ < 0) throw std::runtime_error("fork() failed");
  if (pid_ == 0) {
    dup2(to_child[0], STDIN_FILENO);
    dup2(from_child[1], STDOUT_FILENO);
    close(to_child[0]);
    close(to_child[1]);
    close(from_child[0]);
    close(from_child[1]);
    std::vector<char*> cargv;
    for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
    cargv.push_back(nullptr);
    execvp(cargv[0], cargv.data());
    _exit(127);
  }
  close(to_child[0]);
  close(from_child[1]);
  in_fd_ = to_child[1];
  out_fd_ = from_child[0];
}

Subprocess::~Subprocess() {
  kill_now();
  if (in_fd_ >= 0) close(in_fd_);
  if (out_fd_ >= 0) close(out_fd_);
}

bool Subprocess::write_all(const std::string& data) {
  if (in_fd_ < 0) return false;
  std::size_t off = 0;
  while (off < data.size()) {
    ssize_t n = write(in_fd_, data.data() + off, data.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    off += static_cast<std::size_t>(n);
  }
  return true;
}

Subprocess::ReadResult Subprocess::read_chunk(std::string& out,
                                              std::chrono::steady_clock::time_point deadline) {
  if (out_fd_ < 0) return ReadResult::Eof;
  while (true) {
    auto now = std::chrono::steady_clock::now();
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count();
    if (left < 0) return ReadResult::Timeout;
    struct pollfd pfd {
      out_fd_, POLLIN, 0
    };
    int pr = poll(&pfd, 1, static_cast<int>(std::min<long long>(left, 60'000)));
    if (pr < 0) {
      if (errno == EINTR) continue;
      return ReadResult::Error;
    }
    if (pr == 0) continue;  // re-check deadline
    char buf[4096];
    ssize_t n = read(out_fd_, buf, sizeof buf);
    if (n < 0) {
      if (errno == EINTR) continue;
      return ReadResult::Error;
    }
    if (n == 0) return ReadResult::Eof;
    out.append(buf, static_cast<std::size_t>(n));
    return ReadResult::Data;
  }
}

void Subprocess::close_stdin() {
  if (in_fd_ >= 0) {
    close(in_fd_);
    in_fd_ = -1;
  }
}

void Subprocess::kill_now() {
  if (pid_ > 0 && !reaped_) {
    kill(pid_, SIGKILL);
    int status = 0;
    waitpid(pid_, &status, 0);
    reaped_ = true;
  }
}

bool Subprocess::alive() {
  if (pid_ <= 0 || reaped_) return false;
  int status = 0;
  pid_t r = waitpid(pid_, &status, WNOHANG);
  if (r == pid_) {
    reaped_ = true;
    return false;
  }
  return r == 0;
}

std::vector<std::string> Subprocess::split_command(const std::string& cmd) {
  std::vector<std::string> out;
  std::string cur;
  bool in_single = false, in_double = false, have = false;
  for (char c : cmd) {
    if (in_single) {
      if (c == '\'') in_single = false;
      else cur += c;
    } else if (in_double) {
      if (c == '"') in_double = false;
      else cur += c;
    } else if (c == '\'') {
      in_single = true;
      have = true;
    } else if (c == '"') {
      in_double = true;
      have = true;
    } else if (c == ' ' || c == '\t') {
      if (have || !cur.empty()) out.push_back(cur);
      cur.clear();
      have = false;
    } else {
      cur += c;
    }
  }
  if (have || !cur.empty()) out.push_back(cur);
  return out;
}

}  // namespace invsynth
