#include "invsynth/ilp.hpp"

#include <algorithm>
#include <set>

namespace invsynth {

int IlpModel::add_int(const std::string& name, Int lo, Int hi) {
  IlpVar v;
  v.name = name;
  v.is_integer = true;
  v.lo = rat_of(lo);
  v.hi = rat_of(hi);
  vars.push_back(std::move(v));
  return static_cast<int>(vars.size()) - 1;
}

int IlpModel::add_continuous(const std::string& name, std::optional<Rat> lo,
                             std::optional<Rat> hi) {
  IlpVar v;
  v.name = name;
  v.is_integer = false;
  v.lo_inf = !lo.has_value();
  v.hi_inf = !hi.has_value();
  if (lo) v.lo = *lo;
  if (hi) v.hi = *hi;
  vars.push_back(std::move(v));
  return static_cast<int>(vars.size()) - 1;
}

void IlpModel::validate() const {
  std::set<std::string> names;
  for (const auto& v : vars) {
    if (v.name.empty()) throw IlpModelError("empty variable name");
    if (!names.insert(v.name).second) throw IlpModelError("duplicate variable: " + v.name);
    if (v.is_integer && (v.lo_inf || v.hi_inf))
      throw IlpModelError("integer variable must have finite bounds: " + v.name);
  }
  auto check_expr = [&](const LinExpr& e) {
    for (const auto& [idx, c] : e.coeffs) {
      (void)c;
      if (idx < 0 || idx >= static_cast<int>(vars.size()))
        throw IlpModelError("constraint references undeclared variable index " +
                            std::to_string(idx));
    }
  };
  for (const auto& c : cons) check_expr(c.expr);
  if (objective) check_expr(*objective);
}

namespace {

// ---------------------------------------------------------------------------
// Node bounds and interval propagation
// ---------------------------------------------------------------------------

struct Bounds {
  std::vector<Rat> lo, hi;
  std::vector<char> lo_inf, hi_inf;

  bool fixed(int j) const { return !lo_inf[j] && !hi_inf[j] && lo[j] == hi[j]; }
};

Bounds initial_bounds(const IlpModel& m) {
  Bounds b;
  auto n = m.vars.size();
  b.lo.resize(n);
  b.hi.resize(n);
  b.lo_inf.resize(n);
  b.hi_inf.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto& v = m.vars[j];
    b.lo_inf[j] = v.lo_inf;
    b.hi_inf[j] = v.hi_inf;
    b.lo[j] = v.is_integer ? rat_ceil(v.lo) : v.lo;
    b.hi[j] = v.is_integer ? rat_floor(v.hi) : v.hi;
  }
  return b;
}

// Interval-arithmetic tightening to a fixpoint (round-capped). Returns
// false when some variable's interval empties.
bool propagate(const IlpModel& m, Bounds& b) {
  const int rounds_cap = 50;
  for (int round = 0; round < rounds_cap; ++round) {
    bool changed = false;
    for (std::size_t j = 0; j < m.vars.size(); ++j)
      if (!b.lo_inf[j] && !b.hi_inf[j] && b.lo[j] > b.hi[j]) return false;

    for (const auto& con : m.cons) {
      // One-sided activity bounds. Le needs the minimum activity, Ge the
      // maximum, Eq both.
      for (int side = 0; side < 2; ++side) {
        bool want_min = side == 0;
        if (con.rel == Rel::Le && !want_min) continue;
        if (con.rel == Rel::Ge && want_min) continue;

        Rat sum = 0;
        int inf_count = 0;
        int inf_var = -1;
        for (const auto& [j, a] : con.expr.coeffs) {
          bool use_lo = (a > 0) == want_min;
          bool is_inf = use_lo ? b.lo_inf[j] : b.hi_inf[j];
          if (is_inf) {
            inf_count++;
            inf_var = j;
            continue;
          }
          sum += a * (use_lo ? b.lo[j] : b.hi[j]);
        }
        if (inf_count == 0) {
          if (want_min && sum > con.rhs) return false;
          if (!want_min && sum < con.rhs) return false;
        }
        // Tighten each variable against the rest of the row.
        for (const auto& [j, a] : con.expr.coeffs) {
          bool use_lo = (a > 0) == want_min;
          bool own_inf = use_lo ? b.lo_inf[j] : b.hi_inf[j];
          if (inf_count > (own_inf ? 1 : 0)) continue;  // rest is unbounded
          Rat rest = own_inf ? sum : sum - a * (use_lo ? b.lo[j] : b.hi[j]);
          // want_min:  a*x <= rhs - rest ; want_max:  a*x >= rhs - rest
          Rat limit = (con.rhs - rest) / a;
          bool upper = (a > 0) == want_min;  // new upper bound on x?
          if (upper) {
            Rat nb = m.vars[j].is_integer ? rat_floor(limit) : limit;
            if (b.hi_inf[j] || nb < b.hi[j]) {
              b.hi_inf[j] = 0;
              b.hi[j] = nb;
              changed = true;
            }
          } else {
            Rat nb = m.vars[j].is_integer ? rat_ceil(limit) : limit;
            if (b.lo_inf[j] || nb > b.lo[j]) {
              b.lo_inf[j] = 0;
              b.lo[j] = nb;
              changed = true;
            }
          }
        }
      }
    }
    if (!changed) break;
  }
  for (std::size_t j = 0; j < m.vars.size(); ++j)
    if (!b.lo_inf[j] && !b.hi_inf[j] && b.lo[j] > b.hi[j]) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Bounded-variable primal simplex, exact rational arithmetic.
//
// Fixed variables are substituted away by the caller; rows become
//   sum_j a_ij x_j + s_i = rhs_i
// with slack bounds encoding the relation. Nonbasic variables rest at a
// finite bound (or at 0 when free). Phase 1 minimizes the total bound
// violation of the basic variables; phase 2 the objective.
// ---------------------------------------------------------------------------

struct LpResult {
  enum class Kind { Optimal, Infeasible, Unbounded, Stalled };
  Kind kind = Kind::Stalled;
  std::vector<Rat> x;  // structural variable values
  Rat obj;
};

class Simplex {
 public:
  Simplex(const IlpModel& model, const Bounds& nb, const std::vector<int>& free_vars,
          const std::vector<int>& col_of);

  LpResult run(bool with_objective);

 private:
  int m_ = 0, n_ = 0, nstruct_ = 0;
  std::vector<std::vector<Rat>> T_;
  std::vector<Rat> rhs_;
  std::vector<Rat> cost_;
  std::vector<Rat> lo_, hi_;
  std::vector<char> lo_inf_, hi_inf_;
  std::vector<int> basic_;    // row -> column
  std::vector<int> where_;    // column -> row, or -1 if nonbasic
  std::vector<char> at_hi_;   // nonbasic rest position
  std::vector<Rat> xb_;       // current basic values
  std::vector<Rat> d_;        // current pricing row
  long long pivots_ = 0, degenerate_streak_ = 0;
  bool bland_ = false;

  Rat nb_value(int j) const {
    if (!lo_inf_[j] && !at_hi_[j]) return lo_[j];
    if (at_hi_[j] && !hi_inf_[j]) return hi_[j];
    if (!lo_inf_[j]) return lo_[j];
    if (!hi_inf_[j]) return hi_[j];
    return Rat(0);
  }
  void compute_basics();
  Rat infeasibility() const;
  void build_phase1_costs();
  void build_phase2_costs();
  // +1: profitable to increase, -1: to decrease, 0: not eligible
  int direction(int j) const;
  bool iterate(bool phase2, bool* blocked_unbounded);
  long long pivot_cap() const { return 400 + 30LL * (m_ + n_); }
};

Simplex::Simplex(const IlpModel& model, const Bounds& nb, const std::vector<int>& free_vars,
                 const std::vector<int>& col_of) {
  nstruct_ = static_cast<int>(free_vars.size());
  m_ = 0;
  // Count usable rows first: rows whose free part is nonempty.
  std::vector<std::pair<int, Rat>> row_slack_bounds;  // (relation kind), rhs'
  std::vector<std::map<int, Rat>> rows;
  std::vector<Rat> rhs2;
  std::vector<Rel> rels;
  for (const auto& con : model.cons) {
    Rat shift = 0;
    std::map<int, Rat> row;
    for (const auto& [j, a] : con.expr.coeffs) {
      int col = col_of[j];
      if (col < 0)
        shift += a * nb.lo[j];  // fixed variable: lo == hi
      else
        row[col] = a;
    }
    if (row.empty()) continue;  // caller checked all-fixed rows already
    rows.push_back(std::move(row));
    rhs2.push_back(con.rhs - shift);
    rels.push_back(con.rel);
  }
  m_ = static_cast<int>(rows.size());
  n_ = nstruct_ + m_;
  T_.assign(m_, std::vector<Rat>(n_, Rat(0)));
  rhs_ = rhs2;
  lo_.assign(n_, Rat(0));
  hi_.assign(n_, Rat(0));
  lo_inf_.assign(n_, 0);
  hi_inf_.assign(n_, 0);
  cost_.assign(n_, Rat(0));
  at_hi_.assign(n_, 0);
  where_.assign(n_, -1);
  basic_.assign(m_, -1);

  for (int c = 0; c < nstruct_; ++c) {
    int j = free_vars[c];
    lo_inf_[c] = nb.lo_inf[j];
    hi_inf_[c] = nb.hi_inf[j];
    lo_[c] = nb.lo[j];
    hi_[c] = nb.hi[j];
    if (!lo_inf_[c] || hi_inf_[c]) at_hi_[c] = 0;
    if (lo_inf_[c] && !hi_inf_[c]) at_hi_[c] = 1;
  }
  if (model.objective)
    for (const auto& [j, a] : model.objective->coeffs) {
      int col = col_of[j];
      if (col >= 0) cost_[col] = a;
    }
  for (int i = 0; i < m_; ++i) {
    for (const auto& [c, a] : rows[i]) T_[i][c] = a;
    int s = nstruct_ + i;
    T_[i][s] = 1;
    switch (rels[i]) {
      case Rel::Le: lo_[s] = 0; hi_inf_[s] = 1; break;            // s >= 0
      case Rel::Ge: hi_[s] = 0; lo_inf_[s] = 1; at_hi_[s] = 1; break;  // s <= 0
      case Rel::Eq: lo_[s] = 0; hi_[s] = 0; break;
    }
    basic_[i] = s;
    where_[s] = i;
  }
  xb_.assign(m_, Rat(0));
  d_.assign(n_, Rat(0));
}

void Simplex::compute_basics() {
  for (int i = 0; i < m_; ++i) xb_[i] = rhs_[i];
  for (int j = 0; j < n_; ++j) {
    if (where_[j] >= 0) continue;
    Rat v = nb_value(j);
    if (v == 0) continue;
    for (int i = 0; i < m_; ++i)
      if (T_[i][j] != 0) xb_[i] -= T_[i][j] * v;
  }
}

Rat Simplex::infeasibility() const {
  Rat total = 0;
  for (int i = 0; i < m_; ++i) {
    int j = basic_[i];
    if (!lo_inf_[j] && xb_[i] < lo_[j]) total += lo_[j] - xb_[i];
    if (!hi_inf_[j] && xb_[i] > hi_[j]) total += xb_[i] - hi_[j];
  }
  return total;
}

void Simplex::build_phase1_costs() {
  std::fill(d_.begin(), d_.end(), Rat(0));
  for (int i = 0; i < m_; ++i) {
    int bj = basic_[i];
    int sign = 0;
    if (!lo_inf_[bj] && xb_[i] < lo_[bj]) sign = +1;       // below: d += T[i]
    else if (!hi_inf_[bj] && xb_[i] > hi_[bj]) sign = -1;  // above: d -= T[i]
    if (!sign) continue;
    for (int j = 0; j < n_; ++j) {
      if (where_[j] >= 0) continue;
      if (T_[i][j] != 0) d_[j] += sign > 0 ? T_[i][j] : -T_[i][j];
    }
  }
}

void Simplex::build_phase2_costs() {
  d_ = cost_;
  for (int i = 0; i < m_; ++i) {
    int bj = basic_[i];
    if (cost_[bj] == 0) continue;
    for (int j = 0; j < n_; ++j) {
      if (where_[j] >= 0) {
        d_[j] = 0;
        continue;
      }
      if (T_[i][j] != 0) d_[j] -= cost_[bj] * T_[i][j];
    }
  }
  for (int j = 0; j < n_; ++j)
    if (where_[j] >= 0) d_[j] = 0;
}

int Simplex::direction(int j) const {
  if (where_[j] >= 0) return 0;
  bool free_var = lo_inf_[j] && hi_inf_[j];
  bool at_lower = !at_hi_[j];
  if (d_[j] < 0 && (free_var || (at_lower && !lo_inf_[j]) || (lo_inf_[j] && !at_hi_[j]))) return +1;
  if (d_[j] > 0 && (free_var || at_hi_[j])) return -1;
  // nonbasic resting at its lower bound may only increase; at upper only
  // decrease; free either way
  return 0;
}

bool Simplex::iterate(bool phase2, bool* unbounded) {
  *unbounded = false;
  // entering column
  int enter = -1, dir = 0;
  if (bland_) {
    for (int j = 0; j < n_; ++j) {
      int dj = direction(j);
      if (dj != 0) {
        enter = j;
        dir = dj;
        break;
      }
    }
  } else {
    Rat best = 0;
    for (int j = 0; j < n_; ++j) {
      int dj = direction(j);
      if (dj == 0) continue;
      Rat score = dj > 0 ? -d_[j] : d_[j];
      if (enter < 0 || score > best) {
        best = score;
        enter = j;
        dir = dj;
      }
    }
  }
  if (enter < 0) return false;  // locally optimal / feasible

  // ratio test
  bool have_limit = false;
  Rat delta = 0;
  int leave_row = -1;
  char leave_at_hi = 0;
  // own opposite bound (a bound flip)
  if (!lo_inf_[enter] && !hi_inf_[enter]) {
    delta = hi_[enter] - lo_[enter];
    have_limit = true;
  }
  for (int i = 0; i < m_; ++i) {
    const Rat& t = T_[i][enter];
    if (t == 0) continue;
    Rat rate = -Rat(dir) * t;  // d(xb_i)/d(step)
    int bj = basic_[i];
    bool below = !lo_inf_[bj] && xb_[i] < lo_[bj];
    bool above = !hi_inf_[bj] && xb_[i] > hi_[bj];
    Rat cap;
    char hits_hi = 0;
    if (below) {
      if (rate <= 0) continue;  // moving further down or flat
      cap = (lo_[bj] - xb_[i]) / rate;
      hits_hi = 0;
    } else if (above) {
      if (rate >= 0) continue;
      cap = (xb_[i] - hi_[bj]) / (-rate);
      hits_hi = 1;
    } else if (rate > 0) {
      if (hi_inf_[bj]) continue;
      cap = (hi_[bj] - xb_[i]) / rate;
      hits_hi = 1;
    } else {
      if (lo_inf_[bj]) continue;
      cap = (xb_[i] - lo_[bj]) / (-rate);
      hits_hi = 0;
    }
    if (!have_limit || cap < delta ||
        (cap == delta && leave_row >= 0 && basic_[i] < basic_[leave_row])) {
      // bound flips win ties (leave_row stays -1 only while flip is best)
      if (!have_limit || cap < delta) {
        delta = cap;
        leave_row = i;
        leave_at_hi = hits_hi;
      } else if (leave_row >= 0) {
        leave_row = i;
        leave_at_hi = hits_hi;
      }
      have_limit = true;
    }
  }
  if (!have_limit) {
    if (phase2) {
      *unbounded = true;
      return false;
    }
    throw std::logic_error("phase-1 infeasibility is unbounded below");
  }
  if (delta == 0) degenerate_streak_++; else degenerate_streak_ = 0;
  if (degenerate_streak_ > 5 * (m_ + n_)) bland_ = true;

  pivots_++;
  if (leave_row < 0) {
    at_hi_[enter] ^= 1;  // bound flip, basis unchanged
    compute_basics();
    return true;
  }
  // pivot: entering enters the basis at row leave_row
  int leave_col = basic_[leave_row];
  Rat piv = T_[leave_row][enter];
  for (int j = 0; j < n_; ++j)
    if (T_[leave_row][j] != 0) T_[leave_row][j] /= piv;
  rhs_[leave_row] /= piv;
  for (int i = 0; i < m_; ++i) {
    if (i == leave_row) continue;
    const Rat f = T_[i][enter];
    if (f == 0) continue;
    for (int j = 0; j < n_; ++j)
      if (T_[leave_row][j] != 0) T_[i][j] -= f * T_[leave_row][j];
    rhs_[i] -= f * rhs_[leave_row];
  }
  basic_[leave_row] = enter;
  where_[enter] = leave_row;
  where_[leave_col] = -1;
  at_hi_[leave_col] = leave_at_hi;
  compute_basics();
  return true;
}

LpResult Simplex::run(bool with_objective) {
  LpResult res;
  compute_basics();
  // Phase 1
  while (infeasibility() > 0) {
    if (pivots_ > pivot_cap()) return res;  // Stalled
    build_phase1_costs();
    bool unbounded = false;
    if (!iterate(false, &unbounded)) {
      res.kind = LpResult::Kind::Infeasible;
      return res;
    }
  }
  // Phase 2
  if (with_objective) {
    while (true) {
      if (pivots_ > pivot_cap()) return res;  // Stalled
      build_phase2_costs();
      bool unbounded = false;
      if (!iterate(true, &unbounded)) {
        if (unbounded) {
          res.kind = LpResult::Kind::Unbounded;
          return res;
        }
        break;
      }
      if (infeasibility() > 0)
        throw std::logic_error("phase 2 lost feasibility");
    }
  }
  res.kind = LpResult::Kind::Optimal;
  res.x.assign(nstruct_, Rat(0));
  for (int c = 0; c < nstruct_; ++c)
    res.x[c] = where_[c] >= 0 ? xb_[where_[c]] : nb_value(c);
  res.obj = 0;
  for (int c = 0; c < nstruct_; ++c)
    if (cost_[c] != 0) res.obj += cost_[c] * res.x[c];
  return res;
}

// ---------------------------------------------------------------------------
// Branch and bound
// ---------------------------------------------------------------------------

struct Node {
  Bounds bounds;
  int depth = 0;
};

// Exact check of a full assignment against the model.
bool assignment_feasible(const IlpModel& m, const std::vector<Rat>& x) {
  for (std::size_t j = 0; j < m.vars.size(); ++j) {
    const auto& v = m.vars[j];
    if (!v.lo_inf && x[j] < v.lo) return false;
    if (!v.hi_inf && x[j] > v.hi) return false;
    if (v.is_integer && !rat_is_integral(x[j])) return false;
  }
  for (const auto& con : m.cons) {
    Rat acc = 0;
    for (const auto& [j, a] : con.expr.coeffs) acc += a * x[j];
    switch (con.rel) {
      case Rel::Le:
        if (acc > con.rhs) return false;
        break;
      case Rel::Ge:
        if (acc < con.rhs) return false;
        break;
      case Rel::Eq:
        if (acc != con.rhs) return false;
        break;
    }
  }
  return true;
}

Rat eval_objective(const IlpModel& m, const std::vector<Rat>& x) {
  Rat acc = 0;
  if (m.objective)
    for (const auto& [j, a] : m.objective->coeffs) acc += a * x[j];
  return acc;
}

}  // namespace

IlpOutcome solve(const IlpModel& model, const IlpBudget& budget) {
  model.validate();
  const bool minimize = model.objective.has_value();
  const auto t0 = std::chrono::steady_clock::now();
  const int nvars = static_cast<int>(model.vars.size());

  IlpOutcome out;
  bool have_incumbent = false;
  std::vector<Rat> best;
  Rat best_obj;
  bool budget_hit = false;

  std::vector<Node> stack;
  stack.push_back({initial_bounds(model), 0});
  std::uint64_t nodes = 0;
  bool root = true;

  while (!stack.empty()) {
    if (nodes >= budget.max_nodes ||
        (budget.time_limit &&
         std::chrono::steady_clock::now() - t0 > *budget.time_limit)) {
      budget_hit = true;
      break;
    }
    Node node = std::move(stack.back());
    stack.pop_back();
    nodes++;

    if (!propagate(model, node.bounds)) {
      root = false;
      continue;
    }

    // Split variables into fixed and free; rows over only fixed variables
    // are checked by propagate already (their activity interval is a point).
    std::vector<int> free_idx;
    std::vector<int> col_of(nvars, -1);
    for (int j = 0; j < nvars; ++j) {
      if (!node.bounds.fixed(j)) {
        col_of[j] = static_cast<int>(free_idx.size());
        free_idx.push_back(j);
      }
    }

    auto value_of = [&](int j, const std::vector<Rat>& lpx) -> Rat {
      return col_of[j] < 0 ? node.bounds.lo[j] : lpx[col_of[j]];
    };

    bool lp_usable = false, lp_integral = true;
    std::vector<Rat> lpx;
    Rat lp_obj = 0;
    if (free_idx.empty()) {
      lp_usable = true;
      lp_integral = true;
    } else {
      Simplex splx(model, node.bounds, free_idx, col_of);
      LpResult lr = splx.run(minimize);
      if (lr.kind == LpResult::Kind::Infeasible) {
        root = false;
        continue;
      }
      if (lr.kind == LpResult::Kind::Unbounded) {
        if (root && minimize)
          throw IlpModelError("unbounded continuous relaxation with an objective");
        // Only possible at the root; children inherit bounded regions.
        lp_usable = false;
      } else if (lr.kind == LpResult::Kind::Optimal) {
        lp_usable = true;
        lpx = std::move(lr.x);
        lp_obj = lr.obj;
        // account for fixed variables in the bound
        if (minimize)
          for (const auto& [j, a] : model.objective->coeffs)
            if (col_of[j] < 0) lp_obj += a * node.bounds.lo[j];
        for (int j : free_idx)
          if (model.vars[j].is_integer && !rat_is_integral(lpx[col_of[j]])) {
            lp_integral = false;
            break;
          }
      } else {
        lp_usable = false;  // stalled: fall back to propagation-only branching
      }
    }
    root = false;

    if (lp_usable && minimize && have_incumbent && lp_obj >= best_obj) continue;

    if (lp_usable && lp_integral) {
      std::vector<Rat> x(nvars);
      for (int j = 0; j < nvars; ++j) x[j] = value_of(j, lpx);
      if (assignment_feasible(model, x)) {
        Rat obj = eval_objective(model, x);
        if (!minimize) {
          best = std::move(x);
          have_incumbent = true;
          best_obj = obj;
          break;  // feasibility problem: first integral solution wins
        }
        if (!have_incumbent || obj < best_obj) {
          best = std::move(x);
          best_obj = obj;
          have_incumbent = true;
        }
        continue;  // leaf: nothing below can beat the LP bound here
      }
      // LP solution integral but infeasible can only mean a stalled LP lied;
      // fall through to branching.
    }

    // Branch. With LP guidance: most fractional integer variable, ties by
    // declaration order, floor branch first. Without: first unfixed integer
    // variable, split at the midpoint.
    int bvar = -1;
    Rat bval;
    if (lp_usable && !lp_integral) {
      Rat best_score(-1);
      for (int j : free_idx) {
        if (!model.vars[j].is_integer) continue;
        const Rat& v = lpx[col_of[j]];
        if (rat_is_integral(v)) continue;
        Rat frac = v - rat_floor(v);
        Rat score = frac > Rat(1, 2) ? Rat(1) - frac : frac;  // closeness to 1/2
        if (bvar < 0 || score > best_score) {
          best_score = score;
          bvar = j;
          bval = rat_floor(v);
        }
      }
    }
    if (bvar < 0) {
      for (int j : free_idx)
        if (model.vars[j].is_integer) {
          bvar = j;
          bval = rat_floor((node.bounds.lo[j] + node.bounds.hi[j]) / 2);
          break;
        }
    }
    if (bvar < 0) {
      // Only continuous variables left and the LP stalled or lied; retry
      // is pointless without new bounds. Treat as resource exhaustion.
      budget_hit = true;
      break;
    }

    Node up = node;
    up.bounds.lo[bvar] = bval + 1;
    up.bounds.lo_inf[bvar] = 0;
    up.depth++;
    Node down = std::move(node);
    down.bounds.hi[bvar] = bval;
    down.bounds.hi_inf[bvar] = 0;
    down.depth++;
    stack.push_back(std::move(up));    // explored second
    stack.push_back(std::move(down));  // floor branch first
  }

  out.nodes_explored = nodes;
  if (budget_hit && !(have_incumbent && !minimize)) {
    out.kind = IlpOutcome::Kind::ResourceLimit;
    return out;
  }
  if (!have_incumbent) {
    out.kind = IlpOutcome::Kind::Infeasible;
    return out;
  }
  if (!assignment_feasible(model, best))
    throw std::logic_error("internal: infeasible assignment escaped the search");
  out.kind = minimize ? IlpOutcome::Kind::Optimal : IlpOutcome::Kind::Feasible;
  out.objective_value = minimize ? best_obj : Rat(0);
  for (int j = 0; j < nvars; ++j) out.assignment[model.vars[j].name] = best[j];
  return out;
}

// ---------------------------------------------------------------------------

namespace {

// LP-format numbers must be decimals; constraint rows are scaled to
// integers, other spots use exact decimal when the denominator is 2^a*5^b
// and a long decimal approximation otherwise.
std::string lp_number(const Rat& r) {
  if (rat_is_integral(r)) return r.get_num().get_str();
  mpz_class den = r.get_den();
  mpz_class scale(1);
  int digits = 0;
  mpz_class d = den;
  while (d % 2 == 0) {
    d /= 2;
    digits++;
  }
  while (d % 5 == 0) {
    d /= 5;
    digits++;
  }
  if (d == 1) {
    for (int i = 0; i < digits; ++i) scale *= 10;
    mpz_class num = r.get_num() * (scale / den);
    std::string s = num.get_str();
    bool negative = s[0] == '-';
    if (negative) s = s.substr(1);
    while (static_cast<int>(s.size()) <= digits) s = "0" + s;
    s.insert(s.size() - digits, ".");
    return (negative ? "-" : "") + s;
  }
  double approx = r.get_d();
  char buf[64];
  snprintf(buf, sizeof buf, "%.12g", approx);
  return buf;
}

mpz_class row_denominator_lcm(const LinExpr& e, const Rat& rhs) {
  mpz_class l = rhs.get_den();
  for (const auto& [j, a] : e.coeffs) {
    (void)j;
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), l.get_mpz_t(), a.get_den().get_mpz_t());
    l = l / g * a.get_den();
  }
  return l;
}

void append_expr(std::string& s, const IlpModel& m, const LinExpr& e, const mpz_class& scale) {
  bool first = true;
  for (const auto& [j, a] : e.coeffs) {
    Rat c = a * Rat(scale);
    if (first) {
      if (c < 0) s += "- ";
      first = false;
    } else {
      s += c < 0 ? " - " : " + ";
    }
    Rat mag = c < 0 ? -c : c;
    if (mag != 1) {
      s += lp_number(mag);
      s += ' ';
    }
    s += m.vars[j].name;
  }
  if (first) s += "0 dummy";
}

}  // namespace

std::string export_lp(const IlpModel& model) {
  model.validate();
  std::string s = "\\ internal ILP export\n";
  s += "Minimize\n obj:";
  if (model.objective && !model.objective->coeffs.empty()) {
    s += ' ';
    append_expr(s, model, *model.objective, 1);
  }
  s += "\nSubject To\n";
  for (std::size_t i = 0; i < model.cons.size(); ++i) {
    const auto& c = model.cons[i];
    mpz_class scale = row_denominator_lcm(c.expr, c.rhs);
    s += " c" + std::to_string(i) + ": ";
    append_expr(s, model, c.expr, scale);
    s += c.rel == Rel::Le ? " <= " : c.rel == Rel::Ge ? " >= " : " = ";
    s += lp_number(c.rhs * Rat(scale));
    s += '\n';
  }
  s += "Bounds\n";
  for (const auto& v : model.vars) {
    if (v.lo_inf && v.hi_inf) {
      s += " " + v.name + " free\n";
    } else if (v.lo_inf) {
      s += " -inf <= " + v.name + " <= " + lp_number(v.hi) + "\n";
    } else if (v.hi_inf) {
      s += " " + v.name + " >= " + lp_number(v.lo) + "\n";
    } else {
      s += " " + lp_number(v.lo) + " <= " + v.name + " <= " + lp_number(v.hi) + "\n";
    }
  }
  bool any_int = false;
  for (const auto& v : model.vars) any_int |= v.is_integer;
  if (any_int) {
    s += "General\n";
    for (const auto& v : model.vars)
      if (v.is_integer) s += " " + v.name + "\n";
  }
  s += "End\n";
  return s;
}

}  // namespace invsynth
