#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "invsynth/rational.hpp"

namespace invsynth {

struct IlpModelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Rel { Le, Ge, Eq };

// Variable index -> coefficient; zero coefficients are dropped on insert.
struct LinExpr {
  std::map<int, Rat> coeffs;

  LinExpr& add(int var, const Rat& c) {
    if (c != 0) {
      auto [it, fresh] = coeffs.emplace(var, c);
      if (!fresh && (it->second += c) == 0) coeffs.erase(it);
    }
    return *this;
  }
};

struct IlpVar {
  std::string name;
  bool is_integer = false;
  bool lo_inf = false, hi_inf = false;  // only continuous vars may be unbounded
  Rat lo, hi;
};

struct IlpConstraint {
  LinExpr expr;
  Rel rel = Rel::Le;
  Rat rhs;
};

// Bounded integer/continuous variables, linear constraints, optional linear
// objective to minimize. Integer variables must have finite bounds; the
// exact search depends on it.
struct IlpModel {
  std::vector<IlpVar> vars;
  std::vector<IlpConstraint> cons;
  std::optional<LinExpr> objective;

  int add_int(const std::string& name, Int lo, Int hi);
  int add_int_binary(const std::string& name) { return add_int(name, 0, 1); }
  int add_continuous(const std::string& name, std::optional<Rat> lo, std::optional<Rat> hi);
  void add_constraint(LinExpr e, Rel r, Rat rhs) { cons.push_back({std::move(e), r, std::move(rhs)}); }
  void set_objective(LinExpr e) { objective = std::move(e); }

  // Throws IlpModelError on duplicate/undeclared names or unbounded integers.
  void validate() const;
};

struct IlpBudget {
  std::uint64_t max_nodes = 1'000'000;
  std::optional<std::chrono::milliseconds> time_limit;
};

struct IlpOutcome {
  enum class Kind { Optimal, Feasible, Infeasible, ResourceLimit };
  Kind kind = Kind::Infeasible;
  std::map<std::string, Rat> assignment;
  Rat objective_value;
  std::uint64_t nodes_explored = 0;

  bool has_solution() const { return kind == Kind::Optimal || kind == Kind::Feasible; }
};

// Exact depth-first branch-and-bound over the integer variables with a
// rational-arithmetic LP relaxation for bounding. Optimal is a true
// minimizer; Infeasible means no assignment exists; ResourceLimit is the
// only answer allowed to be inconclusive.
IlpOutcome solve(const IlpModel& model, const IlpBudget& budget = {});

// CPLEX-LP text form, byte-stable for identical input.
std::string export_lp(const IlpModel& model);

}  // namespace invsynth
