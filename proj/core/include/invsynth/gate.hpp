#pragma once

#include <exception>

namespace invsynth {

// Thrown inside a cooperative task when it has been cancelled; unwinds the
// task up to its entry point between two solver/ILP calls.
struct TaskCancelled : std::exception {
  const char* what() const noexcept override { return "task cancelled"; }
};

// Hook a task scheduler can install around every expensive call (SMT query,
// ILP solve). acquire() may block until it is this task's turn and throws
// TaskCancelled once the task has lost its reason to run.
struct QueryGate {
  virtual ~QueryGate() = default;
  virtual void acquire() = 0;
  virtual void release() = 0;
};

struct GateScope {
  QueryGate* gate;
  explicit GateScope(QueryGate* g) : gate(g) {
    if (gate) gate->acquire();
  }
  ~GateScope() {
    if (gate) gate->release();
  }
};

}  // namespace invsynth
