#include "invsynth/ir.hpp"

#include <algorithm>
#include <sstream>

namespace invsynth {

TermPtr t_const(Int v) {
  auto t = std::make_shared<Term>();
  t->kind = Term::Kind::Const;
  t->value = v;
  return t;
}

TermPtr t_var(VarName name) {
  auto t = std::make_shared<Term>();
  t->kind = Term::Kind::Var;
  t->name = std::move(name);
  return t;
}

static TermPtr t_nary(Term::Kind k, std::vector<TermPtr> args) {
  auto t = std::make_shared<Term>();
  t->kind = k;
  t->args = std::move(args);
  return t;
}

TermPtr t_add(std::vector<TermPtr> args) {
  if (args.empty()) return t_const(0);
  if (args.size() == 1) return args[0];
  return t_nary(Term::Kind::Add, std::move(args));
}

TermPtr t_sub(TermPtr a, TermPtr b) { return t_nary(Term::Kind::Sub, {std::move(a), std::move(b)}); }

TermPtr t_neg(TermPtr a) { return t_nary(Term::Kind::Neg, {std::move(a)}); }

TermPtr t_mul(std::vector<TermPtr> args) {
  if (args.empty()) return t_const(1);
  if (args.size() == 1) return args[0];
  return t_nary(Term::Kind::Mul, std::move(args));
}

FormulaPtr f_bool(bool b) {
  auto f = std::make_shared<Formula>();
  f->kind = Formula::Kind::BoolConst;
  f->bval = b;
  return f;
}

FormulaPtr f_cmp(Cmp c, TermPtr lhs, TermPtr rhs) {
  auto f = std::make_shared<Formula>();
  f->kind = Formula::Kind::Atom;
  f->cmp = c;
  f->lhs = std::move(lhs);
  f->rhs = std::move(rhs);
  return f;
}

static FormulaPtr f_nary(Formula::Kind k, std::vector<FormulaPtr> args) {
  auto f = std::make_shared<Formula>();
  f->kind = k;
  f->args = std::move(args);
  return f;
}

FormulaPtr f_and(std::vector<FormulaPtr> args) {
  if (args.empty()) return f_bool(true);
  if (args.size() == 1) return args[0];
  return f_nary(Formula::Kind::And, std::move(args));
}

FormulaPtr f_or(std::vector<FormulaPtr> args) {
  if (args.empty()) return f_bool(false);
  if (args.size() == 1) return args[0];
  return f_nary(Formula::Kind::Or, std::move(args));
}

FormulaPtr f_not(FormulaPtr a) { return f_nary(Formula::Kind::Not, {std::move(a)}); }

FormulaPtr f_implies(FormulaPtr a, FormulaPtr b) {
  return f_nary(Formula::Kind::Implies, {std::move(a), std::move(b)});
}

bool term_equal(const TermPtr& a, const TermPtr& b) {
  if (a.get() == b.get()) return true;
  if (!a || !b || a->kind != b->kind) return false;
  switch (a->kind) {
    case Term::Kind::Const: return a->value == b->value;
    case Term::Kind::Var: return a->name == b->name;
    default: break;
  }
  if (a->args.size() != b->args.size()) return false;
  for (std::size_t i = 0; i < a->args.size(); ++i)
    if (!term_equal(a->args[i], b->args[i])) return false;
  return true;
}

bool formula_equal(const FormulaPtr& a, const FormulaPtr& b) {
  if (a.get() == b.get()) return true;
  if (!a || !b || a->kind != b->kind) return false;
  switch (a->kind) {
    case Formula::Kind::BoolConst: return a->bval == b->bval;
    case Formula::Kind::Atom:
      return a->cmp == b->cmp && term_equal(a->lhs, b->lhs) && term_equal(a->rhs, b->rhs);
    default: break;
  }
  if (a->args.size() != b->args.size()) return false;
  for (std::size_t i = 0; i < a->args.size(); ++i)
    if (!formula_equal(a->args[i], b->args[i])) return false;
  return true;
}

static void collect_vars(const TermPtr& t, VarSet& out) {
  switch (t->kind) {
    case Term::Kind::Const: return;
    case Term::Kind::Var: out.insert(t->name); return;
    default:
      for (const auto& a : t->args) collect_vars(a, out);
  }
}

static void collect_vars(const FormulaPtr& f, VarSet& out) {
  switch (f->kind) {
    case Formula::Kind::BoolConst: return;
    case Formula::Kind::Atom:
      collect_vars(f->lhs, out);
      collect_vars(f->rhs, out);
      return;
    default:
      for (const auto& a : f->args) collect_vars(a, out);
  }
}

VarSet free_vars(const TermPtr& t) {
  VarSet out;
  collect_vars(t, out);
  return out;
}

VarSet free_vars(const FormulaPtr& f) {
  VarSet out;
  collect_vars(f, out);
  return out;
}

TermPtr rename_vars(const TermPtr& t, const std::map<VarName, VarName>& m) {
  switch (t->kind) {
    case Term::Kind::Const: return t;
    case Term::Kind::Var: {
      auto it = m.find(t->name);
      return it == m.end() ? t : t_var(it->second);
    }
    default: {
      std::vector<TermPtr> args;
      args.reserve(t->args.size());
      for (const auto& a : t->args) args.push_back(rename_vars(a, m));
      return t_nary(t->kind, std::move(args));
    }
  }
}

FormulaPtr rename_vars(const FormulaPtr& f, const std::map<VarName, VarName>& m) {
  switch (f->kind) {
    case Formula::Kind::BoolConst: return f;
    case Formula::Kind::Atom: return f_cmp(f->cmp, rename_vars(f->lhs, m), rename_vars(f->rhs, m));
    default: {
      std::vector<FormulaPtr> args;
      args.reserve(f->args.size());
      for (const auto& a : f->args) args.push_back(rename_vars(a, m));
      return f_nary(f->kind, std::move(args));
    }
  }
}

std::string to_smt2(const TermPtr& t) {
  switch (t->kind) {
    case Term::Kind::Const:
      if (t->value < 0) return "(- " + std::to_string(-(t->value)) + ")";
      return std::to_string(t->value);
    case Term::Kind::Var: return t->name;
    case Term::Kind::Neg: return "(- " + to_smt2(t->args[0]) + ")";
    default: {
      const char* op = t->kind == Term::Kind::Add ? "+" : t->kind == Term::Kind::Sub ? "-" : "*";
      std::string s = "(";
      s += op;
      for (const auto& a : t->args) {
        s += ' ';
        s += to_smt2(a);
      }
      s += ')';
      return s;
    }
  }
}

static const char* cmp_smt2(Cmp c) {
  switch (c) {
    case Cmp::Eq: return "=";
    case Cmp::Ne: return "distinct";
    case Cmp::Lt: return "<";
    case Cmp::Le: return "<=";
    case Cmp::Gt: return ">";
    case Cmp::Ge: return ">=";
  }
  return "=";
}

std::string to_smt2(const FormulaPtr& f) {
  switch (f->kind) {
    case Formula::Kind::BoolConst: return f->bval ? "true" : "false";
    case Formula::Kind::Atom:
      return std::string("(") + cmp_smt2(f->cmp) + " " + to_smt2(f->lhs) + " " + to_smt2(f->rhs) + ")";
    case Formula::Kind::Not: return "(not " + to_smt2(f->args[0]) + ")";
    case Formula::Kind::Implies:
      return "(=> " + to_smt2(f->args[0]) + " " + to_smt2(f->args[1]) + ")";
    default: {
      std::string s = f->kind == Formula::Kind::And ? "(and" : "(or";
      for (const auto& a : f->args) {
        s += ' ';
        s += to_smt2(a);
      }
      s += ')';
      return s;
    }
  }
}

std::size_t node_count(const TermPtr& t) {
  std::size_t n = 1;
  for (const auto& a : t->args) n += node_count(a);
  return n;
}

std::size_t node_count(const FormulaPtr& f) {
  std::size_t n = 1;
  if (f->kind == Formula::Kind::Atom) return n + node_count(f->lhs) + node_count(f->rhs);
  for (const auto& a : f->args) n += node_count(a);
  return n;
}

// ---------------------------------------------------------------------------

bool PartialState::total_for(const std::vector<VarName>& vars) const {
  return std::all_of(vars.begin(), vars.end(), [&](const VarName& v) { return bound(v); });
}

std::string PartialState::to_string() const {
  std::string s = "{";
  bool first = true;
  for (const auto& [k, v] : bindings) {
    if (!first) s += ", ";
    first = false;
    s += k + ":" + std::to_string(v);
  }
  return s + "}";
}

PartialState project(const PartialState& s, const VarSet& keep) {
  PartialState out;
  for (const auto& [k, v] : s.bindings)
    if (keep.count(k)) out.bindings.emplace(k, v);
  return out;
}

static Int checked_add(Int a, Int b) {
  Int r;
  if (__builtin_add_overflow(a, b, &r)) throw EvalError("integer overflow in +");
  return r;
}
static Int checked_sub(Int a, Int b) {
  Int r;
  if (__builtin_sub_overflow(a, b, &r)) throw EvalError("integer overflow in -");
  return r;
}
static Int checked_mul(Int a, Int b) {
  Int r;
  if (__builtin_mul_overflow(a, b, &r)) throw EvalError("integer overflow in *");
  return r;
}

Int eval_term(const TermPtr& t, const PartialState& s) {
  switch (t->kind) {
    case Term::Kind::Const: return t->value;
    case Term::Kind::Var: {
      auto v = s.value(t->name);
      if (!v) throw EvalError("unbound variable: " + t->name);
      return *v;
    }
    case Term::Kind::Neg: return checked_sub(0, eval_term(t->args[0], s));
    case Term::Kind::Sub: return checked_sub(eval_term(t->args[0], s), eval_term(t->args[1], s));
    case Term::Kind::Add: {
      Int acc = 0;
      for (const auto& a : t->args) acc = checked_add(acc, eval_term(a, s));
      return acc;
    }
    case Term::Kind::Mul: {
      Int acc = 1;
      for (const auto& a : t->args) acc = checked_mul(acc, eval_term(a, s));
      return acc;
    }
  }
  throw EvalError("malformed term");
}

bool eval_formula(const FormulaPtr& f, const PartialState& s) {
  switch (f->kind) {
    case Formula::Kind::BoolConst: return f->bval;
    case Formula::Kind::Atom: {
      Int l = eval_term(f->lhs, s), r = eval_term(f->rhs, s);
      switch (f->cmp) {
        case Cmp::Eq: return l == r;
        case Cmp::Ne: return l != r;
        case Cmp::Lt: return l < r;
        case Cmp::Le: return l <= r;
        case Cmp::Gt: return l > r;
        case Cmp::Ge: return l >= r;
      }
      return false;
    }
    case Formula::Kind::Not: return !eval_formula(f->args[0], s);
    case Formula::Kind::Implies:
      return !eval_formula(f->args[0], s) || eval_formula(f->args[1], s);
    case Formula::Kind::And:
      for (const auto& a : f->args)
        if (!eval_formula(a, s)) return false;
      return true;
    case Formula::Kind::Or:
      for (const auto& a : f->args)
        if (eval_formula(a, s)) return true;
      return false;
  }
  throw EvalError("malformed formula");
}

// ---------------------------------------------------------------------------

VarName primed(const VarName& v) { return v + "!"; }

bool is_primed(const VarName& v) { return !v.empty() && v.back() == '!'; }

VarName unprimed(const VarName& v) {
  if (!is_primed(v)) throw StructuralError("not a primed variable: " + v);
  return v.substr(0, v.size() - 1);
}

VarName step_var(const VarName& v, int step) { return v + "@" + std::to_string(step); }

VarSet VcProblem::var_set() const { return VarSet(vars.begin(), vars.end()); }

VarSet VcProblem::primed_var_set() const {
  VarSet out;
  for (const auto& v : vars) out.insert(primed(v));
  return out;
}

void VcProblem::validate() const {
  if (vars.empty()) throw StructuralError("empty variable list");
  VarSet declared = var_set();
  if (declared.size() != vars.size()) throw StructuralError("duplicate variable declaration");
  VarSet both = declared;
  for (const auto& v : vars) both.insert(primed(v));
  for (const auto& v : free_vars(pre))
    if (!declared.count(v)) throw StructuralError("pre mentions undeclared variable: " + v);
  for (const auto& v : free_vars(post))
    if (!declared.count(v)) throw StructuralError("post mentions undeclared variable: " + v);
  for (const auto& v : free_vars(trans))
    if (!both.count(v)) throw StructuralError("trans mentions undeclared variable: " + v);
}

FormulaPtr prime(const FormulaPtr& f, const std::vector<VarName>& vars, int step) {
  std::map<VarName, VarName> m;
  VarSet known;
  for (const auto& v : vars) {
    m[v] = step_var(v, step);
    m[primed(v)] = step_var(v, step + 1);
    known.insert(v);
    known.insert(primed(v));
  }
  for (const auto& v : free_vars(f))
    if (!known.count(v)) throw StructuralError("prime: unknown free variable: " + v);
  return rename_vars(f, m);
}

FormulaPtr unprime(const FormulaPtr& f, const std::vector<VarName>& vars, int step) {
  std::map<VarName, VarName> m;
  VarSet known;
  for (const auto& v : vars) {
    m[step_var(v, step)] = v;
    m[step_var(v, step + 1)] = primed(v);
    known.insert(step_var(v, step));
    known.insert(step_var(v, step + 1));
  }
  for (const auto& v : free_vars(f))
    if (!known.count(v)) throw StructuralError("unprime: unknown free variable: " + v);
  return rename_vars(f, m);
}

// ---------------------------------------------------------------------------

VarSet relevant_vars(const CnfPredicate& p) {
  VarSet out;
  for (const auto& clause : p.conjuncts)
    for (const auto& atom : clause)
      for (const auto& [v, c] : atom.coeffs)
        if (c != 0) out.insert(v);
  return out;
}

Int max_coeff_magnitude(const CnfPredicate& p) {
  Int m = 0;
  for (const auto& clause : p.conjuncts)
    for (const auto& atom : clause) {
      for (const auto& [v, c] : atom.coeffs) m = std::max(m, c < 0 ? -c : c);
      m = std::max(m, atom.bias < 0 ? -atom.bias : atom.bias);
    }
  return m;
}

bool eval_atom(const LinearAtom& a, const PartialState& s) {
  Int acc = a.bias;
  for (const auto& [v, c] : a.coeffs) {
    auto val = s.value(v);
    if (!val) continue;  // don't-care coordinate drops out
    acc = checked_add(acc, checked_mul(c, *val));
  }
  return acc > 0;
}

bool eval_predicate(const CnfPredicate& p, const PartialState& s) {
  for (const auto& clause : p.conjuncts) {
    bool any = false;
    for (const auto& atom : clause)
      if (eval_atom(atom, s)) {
        any = true;
        break;
      }
    if (!any) return false;
  }
  return true;
}

FormulaPtr atom_to_formula(const LinearAtom& a) {
  std::vector<TermPtr> terms;
  for (const auto& [v, c] : a.coeffs) {
    if (c == 0) continue;
    if (c == 1)
      terms.push_back(t_var(v));
    else
      terms.push_back(t_mul({t_const(c), t_var(v)}));
  }
  if (a.bias != 0 || terms.empty()) terms.push_back(t_const(a.bias));
  return f_cmp(Cmp::Gt, t_add(std::move(terms)), t_const(0));
}

FormulaPtr predicate_to_formula(const CnfPredicate& p) {
  std::vector<FormulaPtr> conj;
  for (const auto& clause : p.conjuncts) {
    std::vector<FormulaPtr> disj;
    for (const auto& atom : clause) disj.push_back(atom_to_formula(atom));
    conj.push_back(f_or(std::move(disj)));
  }
  return f_and(std::move(conj));
}

std::string to_string(const LinearAtom& a) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [v, c] : a.coeffs) {
    if (c == 0) continue;
    if (first) {
      if (c == -1)
        os << "-";
      else if (c != 1)
        os << c << "*";
    } else {
      os << (c < 0 ? " - " : " + ");
      Int m = c < 0 ? -c : c;
      if (m != 1) os << m << "*";
    }
    os << v;
    first = false;
  }
  if (first) os << a.bias;
  else if (a.bias > 0) os << " + " << a.bias;
  else if (a.bias < 0) os << " - " << -a.bias;
  os << " > 0";
  return os.str();
}

std::string to_string(const CnfPredicate& p) {
  if (p.conjuncts.empty()) return "true";
  std::string s;
  for (std::size_t i = 0; i < p.conjuncts.size(); ++i) {
    if (i) s += " && ";
    const auto& clause = p.conjuncts[i];
    if (clause.empty()) {
      s += "false";
      continue;
    }
    if (clause.size() > 1) s += "(";
    for (std::size_t j = 0; j < clause.size(); ++j) {
      if (j) s += " || ";
      s += to_string(clause[j]);
    }
    if (clause.size() > 1) s += ")";
  }
  return s;
}

bool atom_equal(const LinearAtom& a, const LinearAtom& b) {
  return a.bias == b.bias && a.coeffs == b.coeffs;
}

bool predicate_equal(const CnfPredicate& a, const CnfPredicate& b) {
  if (a.conjuncts.size() != b.conjuncts.size()) return false;
  for (std::size_t i = 0; i < a.conjuncts.size(); ++i) {
    if (a.conjuncts[i].size() != b.conjuncts[i].size()) return false;
    for (std::size_t j = 0; j < a.conjuncts[i].size(); ++j)
      if (!atom_equal(a.conjuncts[i][j], b.conjuncts[i][j])) return false;
  }
  return true;
}

}  // namespace invsynth
