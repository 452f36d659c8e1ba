#include "invsynth/frontend.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "invsynth/sexpr.hpp"

namespace invsynth {

namespace {

[[noreturn]] void fail(const std::string& msg, const Sexpr& at) {
  throw ParseError(msg, at.line, at.col);
}

// Constructs we knowingly reject, with the construct named in the message.
const char* unsupported_construct(const std::string& op) {
  static const std::map<std::string, const char*> table = {
      {"let", "let bindings"},       {"forall", "quantifiers"},
      {"exists", "quantifiers"},     {"select", "arrays"},
      {"store", "arrays"},           {"div", "integer division"},
      {"mod", "integer modulus"},    {"abs", "absolute value"},
      {"ite", "if-then-else terms"},
  };
  auto it = table.find(op);
  return it == table.end() ? nullptr : it->second;
}

struct FormulaReader {
  VarSet unprimed_vars;
  bool allow_primed = false;

  // x' and x! both mean the primed copy; normalized to x!.
  std::optional<VarName> as_var(const std::string& sym) const {
    std::string name = sym;
    bool prime_mark = false;
    if (!name.empty() && (name.back() == '!' || name.back() == '\'')) {
      prime_mark = true;
      name.pop_back();
    }
    if (!unprimed_vars.count(name)) return std::nullopt;
    if (!prime_mark) return name;
    return primed(name);
  }

  TermPtr term(const Sexpr& e) const {
    if (e.kind == Sexpr::Kind::Number) return t_const(e.num);
    if (e.kind == Sexpr::Kind::Symbol) {
      auto v = as_var(e.sym);
      if (!v) fail("unknown variable: " + e.sym, e);
      if (is_primed(*v) && !allow_primed)
        fail("primed variable not allowed here: " + e.sym, e);
      return t_var(*v);
    }
    if (e.items.empty()) fail("empty term", e);
    if (e.items[0].kind != Sexpr::Kind::Symbol) fail("expected operator", e.items[0]);
    const std::string& op = e.items[0].sym;
    if (const char* c = unsupported_construct(op)) fail(std::string("unsupported construct: ") + c, e);
    std::vector<TermPtr> args;
    for (std::size_t i = 1; i < e.items.size(); ++i) args.push_back(term(e.items[i]));
    if (op == "+") {
      if (args.empty()) fail("+ needs arguments", e);
      return t_add(std::move(args));
    }
    if (op == "-") {
      if (args.size() == 1) return t_neg(args[0]);
      if (args.size() == 2) return t_sub(args[0], args[1]);
      fail("- takes one or two arguments", e);
    }
    if (op == "*") {
      if (args.empty()) fail("* needs arguments", e);
      return t_mul(std::move(args));
    }
    fail("unsupported construct: operator " + op, e);
  }

  FormulaPtr formula(const Sexpr& e) const {
    if (e.is_sym("true")) return f_bool(true);
    if (e.is_sym("false")) return f_bool(false);
    if (!e.is_list()) fail("expected a formula", e);
    if (e.items.empty()) fail("empty formula", e);
    if (e.items[0].kind != Sexpr::Kind::Symbol) fail("expected connective or comparison", e.items[0]);
    const std::string& op = e.items[0].sym;
    if (const char* c = unsupported_construct(op)) fail(std::string("unsupported construct: ") + c, e);
    auto nargs = e.items.size() - 1;
    if (op == "and" || op == "or") {
      std::vector<FormulaPtr> args;
      for (std::size_t i = 1; i < e.items.size(); ++i) args.push_back(formula(e.items[i]));
      return op == "and" ? f_and(std::move(args)) : f_or(std::move(args));
    }
    if (op == "not") {
      if (nargs != 1) fail("not takes one argument", e);
      return f_not(formula(e.items[1]));
    }
    if (op == "=>") {
      if (nargs < 2) fail("=> takes at least two arguments", e);
      FormulaPtr acc = formula(e.items.back());
      for (std::size_t i = e.items.size() - 2; i >= 1; --i)
        acc = f_implies(formula(e.items[i]), acc);
      return acc;
    }
    static const std::map<std::string, Cmp> cmps = {
        {"=", Cmp::Eq}, {"distinct", Cmp::Ne}, {"!=", Cmp::Ne}, {"<", Cmp::Lt},
        {"<=", Cmp::Le}, {">", Cmp::Gt},       {">=", Cmp::Ge},
    };
    auto it = cmps.find(op);
    if (it == cmps.end()) fail("unsupported construct: operator " + op, e);
    if (nargs != 2) fail("chained comparisons are not supported", e);
    return f_cmp(it->second, term(e.items[1]), term(e.items[2]));
  }
};

VcProblem parse_triple(const std::vector<Sexpr>& forms) {
  VcProblem p;
  std::optional<Sexpr> pre, trans, post;
  bool saw_vars = false;
  for (const auto& form : forms) {
    if (!form.is_list() || form.items.empty() || form.items[0].kind != Sexpr::Kind::Symbol)
      fail("expected (vars ...), (pre ...), (trans ...) or (post ...)", form);
    const std::string& head = form.items[0].sym;
    if (head == "vars") {
      if (form.items.size() != 2 || !form.items[1].is_list())
        fail("vars expects a single list of names", form);
      for (const auto& v : form.items[1].items) {
        if (v.kind != Sexpr::Kind::Symbol) fail("variable names must be symbols", v);
        p.vars.push_back(v.sym);
      }
      if (p.vars.empty()) fail("empty variable list", form);
      saw_vars = true;
    } else if (head == "pre" || head == "trans" || head == "post") {
      if (form.items.size() != 2) fail(head + " expects a single formula", form);
      auto& slot = head == "pre" ? pre : head == "trans" ? trans : post;
      if (slot) fail("duplicate " + head + " block", form);
      slot = form.items[1];
    } else {
      fail("unknown block: " + head, form);
    }
  }
  if (!saw_vars) throw ParseError("missing (vars ...) block");
  if (!pre || !trans || !post) throw ParseError("missing pre/trans/post block");
  FormulaReader rd{VarSet(p.vars.begin(), p.vars.end()), false};
  p.pre = rd.formula(*pre);
  p.post = rd.formula(*post);
  rd.allow_primed = true;
  p.trans = rd.formula(*trans);
  p.validate();
  return p;
}

struct DefinedFun {
  std::vector<VarName> params;
  Sexpr body;
};

void read_param_list(const Sexpr& e, std::vector<VarName>& out) {
  if (!e.is_list()) fail("expected a parameter list", e);
  for (const auto& param : e.items) {
    if (!param.is_list() || param.items.size() != 2 ||
        param.items[0].kind != Sexpr::Kind::Symbol)
      fail("expected (name Int) parameter", param);
    if (!param.items[1].is_sym("Int")) {
      std::string sort = param.items[1].to_string();
      fail("unsupported sort: " + sort, param.items[1]);
    }
    out.push_back(param.items[0].sym);
  }
}

VcProblem parse_sygus(const std::vector<Sexpr>& forms) {
  VcProblem p;
  std::map<std::string, DefinedFun> funs;
  std::string inv_name, pre_name, trans_name, post_name;
  bool saw_constraint = false;

  for (const auto& form : forms) {
    if (!form.is_list() || form.items.empty() || form.items[0].kind != Sexpr::Kind::Symbol)
      fail("expected a SyGuS command", form);
    const std::string& cmd = form.items[0].sym;
    if (cmd == "set-logic") {
      if (form.items.size() != 2 || !form.items[1].is_sym("LIA"))
        fail("unsupported logic (only LIA)", form);
    } else if (cmd == "synth-inv") {
      if (form.items.size() < 3 || form.items[1].kind != Sexpr::Kind::Symbol)
        fail("synth-inv expects a name and parameters", form);
      inv_name = form.items[1].sym;
      read_param_list(form.items[2], p.vars);
      if (p.vars.empty()) fail("empty variable list", form);
    } else if (cmd == "declare-primed-var") {
      // Older benchmark style; the synth-inv parameter list already fixes
      // the variable order, so this only needs the sort check.
      if (form.items.size() != 3 || form.items[1].kind != Sexpr::Kind::Symbol)
        fail("declare-primed-var expects a name and sort", form);
      if (!form.items[2].is_sym("Int"))
        fail("unsupported sort: " + form.items[2].to_string(), form.items[2]);
      if (p.vars.empty()) p.vars.push_back(form.items[1].sym);
      else if (std::find(p.vars.begin(), p.vars.end(), form.items[1].sym) == p.vars.end())
        p.vars.push_back(form.items[1].sym);
    } else if (cmd == "define-fun") {
      if (form.items.size() != 5 || form.items[1].kind != Sexpr::Kind::Symbol)
        fail("define-fun expects name, parameters, sort, body", form);
      if (!form.items[3].is_sym("Bool"))
        fail("unsupported sort: " + form.items[3].to_string(), form.items[3]);
      DefinedFun f;
      read_param_list(form.items[2], f.params);
      f.body = form.items[4];
      funs[form.items[1].sym] = std::move(f);
    } else if (cmd == "inv-constraint") {
      if (form.items.size() != 5) fail("inv-constraint expects four function names", form);
      for (int i = 1; i <= 4; ++i)
        if (form.items[i].kind != Sexpr::Kind::Symbol) fail("expected a function name", form.items[i]);
      if (form.items[1].sym != inv_name)
        fail("inv-constraint names unknown invariant: " + form.items[1].sym, form);
      pre_name = form.items[2].sym;
      trans_name = form.items[3].sym;
      post_name = form.items[4].sym;
      saw_constraint = true;
    } else if (cmd == "check-synth") {
      // end marker, nothing to do
    } else {
      fail("unsupported construct: command " + cmd, form);
    }
  }
  if (inv_name.empty()) throw ParseError("missing synth-inv command");
  if (!saw_constraint) throw ParseError("missing inv-constraint command");

  // The -f parameters bind positionally to the synth-inv variables; the
  // transition relation gets the primed copies as its second half.
  auto resolve = [&](const std::string& name, bool is_trans) -> FormulaPtr {
    auto it = funs.find(name);
    if (it == funs.end()) throw ParseError("inv-constraint references undefined function: " + name);
    const DefinedFun& f = it->second;
    std::size_t want = is_trans ? 2 * p.vars.size() : p.vars.size();
    if (f.params.size() != want)
      throw ParseError("variable arity mismatch between unprimed and primed declarations in " +
                       name + " (expected " + std::to_string(want) + " parameters, got " +
                       std::to_string(f.params.size()) + ")");
    // Read the body over the *parameter* names, then rename positionally.
    std::vector<VarName> canon;
    std::map<VarName, VarName> ren;
    VarSet param_vars;
    for (std::size_t i = 0; i < f.params.size(); ++i) {
      std::string param = f.params[i];
      // Bodies may spell the primed parameter x! while the list says x!;
      // strip any prime mark so FormulaReader sees a plain name.
      bool prime_mark = !param.empty() && (param.back() == '!' || param.back() == '\'');
      std::string base = prime_mark ? param.substr(0, param.size() - 1) : param;
      param_vars.insert(base);
      VarName target = i < p.vars.size() ? p.vars[i] : primed(p.vars[i - p.vars.size()]);
      ren[prime_mark ? primed(base) : base] = target;
    }
    FormulaReader rd{param_vars, true};
    FormulaPtr body = rd.formula(f.body);
    for (const auto& v : free_vars(body))
      if (!ren.count(v)) throw ParseError("body of " + name + " uses undeclared variable: " + v);
    return rename_vars(body, ren);
  };

  p.pre = resolve(pre_name, false);
  p.trans = resolve(trans_name, true);
  p.post = resolve(post_name, false);
  for (const auto& v : free_vars(p.pre))
    if (is_primed(v)) throw ParseError("pre-f must not use primed variables");
  for (const auto& v : free_vars(p.post))
    if (is_primed(v)) throw ParseError("post-f must not use primed variables");
  p.validate();
  return p;
}

Dialect infer_dialect(const ProblemSource& src) {
  if (src.dialect != Dialect::Auto) return src.dialect;
  auto ends_with = [&](const char* suf) {
    std::string s(suf);
    return src.path.size() >= s.size() &&
           src.path.compare(src.path.size() - s.size(), s.size(), s) == 0;
  };
  if (ends_with(".sl")) return Dialect::SygusInv;
  if (ends_with(".triple") || ends_with(".vc")) return Dialect::TripleSexp;
  // Header sniff: SyGuS files start with set-logic or synth-inv.
  auto first = src.text.find('(');
  if (first != std::string::npos) {
    auto head = src.text.substr(first, 32);
    if (head.find("set-logic") != std::string::npos || head.find("synth-inv") != std::string::npos)
      return Dialect::SygusInv;
  }
  return Dialect::TripleSexp;
}

}  // namespace

ProblemSource ProblemSource::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return ProblemSource{path, os.str(), Dialect::Auto};
}

ProblemSource ProblemSource::from_text(std::string text, Dialect d, std::string name) {
  return ProblemSource{std::move(name), std::move(text), d};
}

VcProblem parse_problem(const ProblemSource& source) {
  std::vector<Sexpr> forms;
  try {
    forms = parse_sexprs(source.text);
  } catch (const SexprError& e) {
    throw ParseError(e.what(), e.line, e.col);
  }
  if (forms.empty()) throw ParseError("empty input");
  try {
    if (infer_dialect(source) == Dialect::SygusInv) return parse_sygus(forms);
    return parse_triple(forms);
  } catch (const StructuralError& e) {
    throw ParseError(e.what());
  }
}

FormulaPtr parse_formula(const std::string& text, const std::vector<VarName>& vars,
                         bool allow_primed) {
  auto forms = parse_sexprs(text);
  if (forms.size() != 1) throw ParseError("expected exactly one formula");
  FormulaReader rd{VarSet(vars.begin(), vars.end()), allow_primed};
  return rd.formula(forms[0]);
}

namespace {

// Pretty non-strict rendering of <w,x> + b > 0. With c = 1 - b the atom is
// sum(pos) - sum(neg) >= c, emitted as
//   (>= pos c)            when there are no negative terms,
//   (<= neg -c)           when there are no positive terms,
//   (<= neg pos-with-(-c)) otherwise, so i <= j and i <= (+ n 1) come out
// in their familiar shape.
std::string sum_expr(const std::vector<std::pair<VarName, Int>>& terms, Int constant) {
  std::vector<std::string> parts;
  for (const auto& [v, c] : terms)
    parts.push_back(c == 1 ? v : "(* " + std::to_string(c) + " " + v + ")");
  if (constant != 0 || parts.empty())
    parts.push_back(constant < 0 ? "(- " + std::to_string(-constant) + ")"
                                 : std::to_string(constant));
  if (parts.size() == 1) return parts[0];
  std::string s = "(+";
  for (const auto& part : parts) s += " " + part;
  return s + ")";
}

std::string render_atom(const LinearAtom& atom, const std::vector<VarName>& vars) {
  std::vector<std::pair<VarName, Int>> pos, neg;
  for (const auto& v : vars) {
    auto it = atom.coeffs.find(v);
    if (it == atom.coeffs.end() || it->second == 0) continue;
    if (it->second > 0)
      pos.emplace_back(v, it->second);
    else
      neg.emplace_back(v, -it->second);
  }
  Int c = 1 - atom.bias;
  if (pos.empty() && neg.empty()) return atom.bias > 0 ? "true" : "false";
  if (neg.empty()) return "(>= " + sum_expr(pos, 0) + " " +
                          (c < 0 ? "(- " + std::to_string(-c) + ")" : std::to_string(c)) + ")";
  if (pos.empty()) return "(<= " + sum_expr(neg, 0) + " " +
                          (-c < 0 ? "(- " + std::to_string(c) + ")" : std::to_string(-c)) + ")";
  return "(<= " + sum_expr(neg, 0) + " " + sum_expr(pos, -c) + ")";
}

std::string render_body(const CnfPredicate& pred, const std::vector<VarName>& vars) {
  if (pred.conjuncts.empty()) return "true";
  std::vector<std::string> clauses;
  for (const auto& clause : pred.conjuncts) {
    std::vector<std::string> atoms;
    bool clause_true = false;
    for (const auto& atom : clause) {
      if (atom.constant_true()) {
        clause_true = true;
        break;
      }
      if (atom.constant_false()) continue;
      atoms.push_back(render_atom(atom, vars));
    }
    if (clause_true) continue;
    if (atoms.empty()) {
      clauses.push_back("false");
    } else if (atoms.size() == 1) {
      clauses.push_back(atoms[0]);
    } else {
      std::string s = "(or";
      for (const auto& a : atoms) s += " " + a;
      clauses.push_back(s + ")");
    }
  }
  if (clauses.empty()) return "true";
  if (clauses.size() == 1) return clauses[0];
  std::string s = "(and";
  for (const auto& cl : clauses) s += " " + cl;
  return s + ")";
}

}  // namespace

std::string render_invariant(const CnfPredicate& pred, const std::vector<VarName>& vars,
                             RenderFormat format) {
  VarSet declared(vars.begin(), vars.end());
  for (const auto& v : relevant_vars(pred))
    if (!declared.count(v))
      throw StructuralError("predicate mentions variable outside the declared list: " + v);
  std::string body = render_body(pred, vars);
  if (format == RenderFormat::SmtlibTerm) return body;
  std::string s = "(define-fun inv-f (";
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (i) s += ' ';
    s += "(" + vars[i] + " Int)";
  }
  return s + ") Bool " + body + ")";
}

std::size_t invariant_size(const CnfPredicate& pred, const std::vector<VarName>& vars) {
  auto forms = parse_sexprs(render_invariant(pred, vars, RenderFormat::SmtlibTerm));
  std::size_t n = 0;
  auto count = [&](const Sexpr& e, auto&& self) -> void {
    n += 1;
    if (e.is_list())
      for (const auto& item : e.items) self(item, self);
  };
  for (const auto& form : forms) count(form, count);
  return n;
}

}  // namespace invsynth
