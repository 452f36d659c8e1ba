#pragma once

#include <chrono>
#include <string>
#include <vector>

#include <sys/types.h>

namespace invsynth {

// A child process with piped stdin/stdout. The command is an argv vector;
// no shell is involved.
class Subprocess {
 public:
  explicit Subprocess(const std::vector<std::string>& argv);
  ~Subprocess();
  Subprocess(const Subprocess&) = delete;
  Subprocess& operator=(const Subprocess&) = delete;

  // False once the child is gone (EPIPE).
  bool write_all(const std::string& data);

  enum class ReadResult { Data, Eof, Timeout, Error };
  ReadResult read_chunk(std::string& out, std::chrono::steady_clock::time_point deadline);

  void close_stdin();
  void kill_now();
  bool alive();

  // Whitespace splitting with single/double quote groups; no expansions.
  static std::vector<std::string> split_command(const std::string& cmd);

 private:
  pid_t pid_ = -1;
  int in_fd_ = -1;   // writes reach the child's stdin
  int out_fd_ = -1;  // reads come from the child's stdout
  bool reaped_ = false;
};

}  // namespace invsynth
