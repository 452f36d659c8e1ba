#pragma once

#include <string>

#include "invsynth/ir.hpp"

namespace invsynth {

struct ParseError : std::runtime_error {
  int line = 0, col = 0;
  ParseError(const std::string& msg, int line_ = 0, int col_ = 0)
      : std::runtime_error(msg), line(line_), col(col_) {}
};

enum class Dialect { Auto, TripleSexp, SygusInv };

struct ProblemSource {
  std::string path;  // used for dialect inference and diagnostics
  std::string text;
  Dialect dialect = Dialect::Auto;

  static ProblemSource from_file(const std::string& path);
  static ProblemSource from_text(std::string text, Dialect d = Dialect::Auto,
                                 std::string name = "<string>");
};

// Parses either dialect into a validated VcProblem:
//
//   triple-sexp:  (vars (i j)) (pre f) (trans f) (post f), primed spelled
//                 i! or i' inside trans;
//   sygus-inv:    set-logic LIA, synth-inv, optional declare-primed-var,
//                 pre-f/trans-f/post-f definitions and inv-constraint.
//
// Anything outside the supported subset (arrays, reals, quantifiers, let,
// div/mod, ...) is rejected with a diagnostic naming the construct.
VcProblem parse_problem(const ProblemSource& source);

// Parses a single formula in triple-sexp syntax over the given variables.
// `allow_primed` admits the primed copies (for transition formulas).
FormulaPtr parse_formula(const std::string& text, const std::vector<VarName>& vars,
                         bool allow_primed);

enum class RenderFormat { SygusDefineFun, SmtlibTerm };

// Renders a predicate over the problem's variable list. Output is
// deterministic and parses back to an equivalent formula; atoms are
// prettied into non-strict comparisons, e.g. j - i + 1 > 0 as (<= i j).
std::string render_invariant(const CnfPredicate& pred, const std::vector<VarName>& vars,
                             RenderFormat format);

// Node count of the rendered SyGuS body, the usual invariant-size metric.
std::size_t invariant_size(const CnfPredicate& pred, const std::vector<VarName>& vars);

}  // namespace invsynth
