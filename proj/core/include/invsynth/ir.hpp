#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace invsynth {

using Int = std::int64_t;
using VarName = std::string;
using VarSet = std::set<VarName>;

struct StructuralError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Terms and formulas
//
// Integer terms with +, -, unary negation and * (variable-variable products
// are allowed so transitions like y! = i*j are representable). Formulas are
// comparisons over terms combined with and/or/not/=>. All nodes are
// immutable and shared; the whole IR is safe to copy across threads.
// ---------------------------------------------------------------------------

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
  enum class Kind { Const, Var, Add, Sub, Neg, Mul };
  Kind kind;
  Int value = 0;              // Const
  VarName name;               // Var
  std::vector<TermPtr> args;  // Add/Mul n-ary, Sub binary, Neg unary
};

TermPtr t_const(Int v);
TermPtr t_var(VarName name);
TermPtr t_add(std::vector<TermPtr> args);
TermPtr t_sub(TermPtr a, TermPtr b);
TermPtr t_neg(TermPtr a);
TermPtr t_mul(std::vector<TermPtr> args);

enum class Cmp { Eq, Ne, Lt, Le, Gt, Ge };

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
  enum class Kind { BoolConst, Atom, And, Or, Not, Implies };
  Kind kind;
  bool bval = false;            // BoolConst
  Cmp cmp = Cmp::Eq;            // Atom
  TermPtr lhs, rhs;             // Atom
  std::vector<FormulaPtr> args; // And/Or n-ary, Not unary, Implies binary
};

FormulaPtr f_bool(bool b);
FormulaPtr f_cmp(Cmp c, TermPtr lhs, TermPtr rhs);
FormulaPtr f_and(std::vector<FormulaPtr> args);
FormulaPtr f_or(std::vector<FormulaPtr> args);
FormulaPtr f_not(FormulaPtr a);
FormulaPtr f_implies(FormulaPtr a, FormulaPtr b);

bool term_equal(const TermPtr& a, const TermPtr& b);
bool formula_equal(const FormulaPtr& a, const FormulaPtr& b);

VarSet free_vars(const FormulaPtr& f);
VarSet free_vars(const TermPtr& t);

// Applies a variable renaming. Names absent from the map are kept.
TermPtr rename_vars(const TermPtr& t, const std::map<VarName, VarName>& m);
FormulaPtr rename_vars(const FormulaPtr& f, const std::map<VarName, VarName>& m);

// SMT-LIB2 rendering of the raw tree (no prettying; used for solver I/O).
std::string to_smt2(const TermPtr& t);
std::string to_smt2(const FormulaPtr& f);

std::size_t node_count(const TermPtr& t);
std::size_t node_count(const FormulaPtr& f);

// ---------------------------------------------------------------------------
// Program states
// ---------------------------------------------------------------------------

// A partial map from variables to integers. Absent variables are don't-care.
struct PartialState {
  std::map<VarName, Int> bindings;

  bool bound(const VarName& v) const { return bindings.count(v) != 0; }
  std::optional<Int> value(const VarName& v) const {
    auto it = bindings.find(v);
    if (it == bindings.end()) return std::nullopt;
    return it->second;
  }
  bool total_for(const std::vector<VarName>& vars) const;
  bool operator==(const PartialState& o) const { return bindings == o.bindings; }
  bool operator<(const PartialState& o) const { return bindings < o.bindings; }
  std::string to_string() const;
};

// Restriction to `keep`; everything else becomes don't-care.
PartialState project(const PartialState& s, const VarSet& keep);

// Evaluation under a state binding every free variable of the formula.
// An unbound free variable is an error, never a silent default.
bool eval_formula(const FormulaPtr& f, const PartialState& s);
Int eval_term(const TermPtr& t, const PartialState& s);

// ---------------------------------------------------------------------------
// Verification problems
// ---------------------------------------------------------------------------

// Spelling of the primed copy of a variable. Frontends normalize x' to x!.
VarName primed(const VarName& v);
bool is_primed(const VarName& v);
VarName unprimed(const VarName& v);
// Step-indexed copy used by unrollings, e.g. step_var("i", 3) == "i@3".
VarName step_var(const VarName& v, int step);

// A <Pre, Trans, Post> triple over an ordered variable list. Trans ranges
// over vars and their primed copies; Pre/Post over vars only.
struct VcProblem {
  std::vector<VarName> vars;
  FormulaPtr pre, trans, post;

  VarSet var_set() const;
  VarSet primed_var_set() const;
  // Throws StructuralError if the free-variable side conditions fail.
  void validate() const;
};

// Renames every unprimed x to x@step and (if the formula uses them) every
// primed x! to x@(step+1). The renaming is bijective; unknown free
// variables are a StructuralError.
FormulaPtr prime(const FormulaPtr& f, const std::vector<VarName>& vars, int step);
// Inverse of prime(): x@step back to x, x@(step+1) back to x!.
FormulaPtr unprime(const FormulaPtr& f, const std::vector<VarName>& vars, int step);

// ---------------------------------------------------------------------------
// CNF predicates (the learner's hypothesis class)
// ---------------------------------------------------------------------------

// One strict linear inequality <w, x> + b > 0 with integer coefficients.
struct LinearAtom {
  std::map<VarName, Int> coeffs;  // zero coefficients are not stored
  Int bias = 0;

  bool constant() const { return coeffs.empty(); }
  bool constant_true() const { return coeffs.empty() && bias > 0; }
  bool constant_false() const { return coeffs.empty() && bias <= 0; }
};

// Conjunction of disjunctions of atoms. An empty conjunct list is the
// trivially-true predicate; an empty disjunct inside a conjunct is false.
struct CnfPredicate {
  std::vector<std::vector<LinearAtom>> conjuncts;

  static CnfPredicate constant_true() { return {}; }
  bool is_constant_true() const { return conjuncts.empty(); }
};

VarSet relevant_vars(const CnfPredicate& p);
Int max_coeff_magnitude(const CnfPredicate& p);

// Partial-state evaluation: don't-care coordinates contribute zero to the
// inner product of each atom (the per-example drop rule).
bool eval_atom(const LinearAtom& a, const PartialState& s);
bool eval_predicate(const CnfPredicate& p, const PartialState& s);

FormulaPtr atom_to_formula(const LinearAtom& a);
FormulaPtr predicate_to_formula(const CnfPredicate& p);

std::string to_string(const LinearAtom& a);
std::string to_string(const CnfPredicate& p);

bool atom_equal(const LinearAtom& a, const LinearAtom& b);
bool predicate_equal(const CnfPredicate& a, const CnfPredicate& b);

}  // namespace invsynth
