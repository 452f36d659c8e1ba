#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "invsynth/gate.hpp"
#include "invsynth/ir.hpp"

namespace invsynth {

class Subprocess;

struct SmtConfig {
  // Executable plus arguments; anything that speaks SMT-LIB2 on stdin and
  // answers on stdout works. INVSYNTH_SOLVER overrides the default.
  std::string command = "z3 -in";
  int per_query_ms = 10'000;
  // Deterministic solver budget per query (z3 :rlimit units per ms).
  long long rlimit_per_ms = 400;
  bool log_queries = false;
  std::function<void(const std::string&)> log_sink;

  static std::string default_command();
};

// The session is unusable after a crash or protocol desync.
struct SessionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SessionStats {
  std::uint64_t queries = 0;
  std::uint64_t sat = 0, unsat = 0, unknown = 0;
};

struct CheckOutcome {
  enum class Kind { Valid, Counterexample, Unknown };
  Kind kind = Kind::Unknown;
  PartialState cex;    // satisfies the negation; unbound entries are don't-care
  std::string reason;  // for Unknown

  bool valid() const { return kind == Kind::Valid; }
  bool counterexample() const { return kind == Kind::Counterexample; }
};

struct ModelOutcome {
  enum class Kind { Sat, Unsat, Unknown };
  Kind kind = Kind::Unknown;
  PartialState model;
  std::string reason;
};

enum class Sat3 { Sat, Unsat, Unknown };

// One solver process per session, one query per push/pop scope. Sessions
// are single-owner; create one per concurrent task.
class SmtSession {
 public:
  explicit SmtSession(SmtConfig cfg = {});
  ~SmtSession();
  SmtSession(const SmtSession&) = delete;
  SmtSession& operator=(const SmtSession&) = delete;

  // Valid iff (not f) is unsatisfiable; otherwise the counterexample is a
  // satisfying assignment of (not f) with model-omitted variables mapped
  // to don't-care.
  CheckOutcome check_valid(const FormulaPtr& f);

  // A model of f that differs from every blocked state on at least one
  // bound coordinate.
  ModelOutcome get_model(const FormulaPtr& f, const std::vector<PartialState>& block = {});

  // Satisfiability only, no model extraction.
  Sat3 check_sat(const FormulaPtr& f, std::string* reason = nullptr);

  bool poisoned() const { return poisoned_; }
  const SessionStats& stats() const { return stats_; }
  void set_gate(QueryGate* gate) { gate_ = gate; }
  void set_per_query_ms(int ms) { cfg_.per_query_ms = ms; }

 private:
  struct QueryReply {
    Sat3 verdict;
    std::optional<PartialState> model;
    std::string reason;
  };
  QueryReply run_query(const FormulaPtr& assert_me, const std::vector<PartialState>& block,
                       bool want_model);
  QueryReply run_query_inner(const FormulaPtr& assert_me, const std::vector<PartialState>& block,
                             bool want_model);
  void send(const std::string& text);
  std::string read_until_marker(const std::string& marker);
  [[noreturn]] void desync(const std::string& why);

  SmtConfig cfg_;
  std::unique_ptr<Subprocess> proc_;
  std::string rx_;  // undelivered solver output
  SessionStats stats_;
  QueryGate* gate_ = nullptr;
  bool poisoned_ = false;
  std::uint64_t marker_seq_ = 0;
};

}  // namespace invsynth
