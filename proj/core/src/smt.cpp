#include "invsynth/smt.hpp"

#include <cstdlib>

#include "invsynth/sexpr.hpp"
#include "invsynth/subprocess.hpp"

namespace invsynth {

std::string SmtConfig::default_command() {
  if (const char* env = std::getenv("INVSYNTH_SOLVER"); env && *env) return env;
  return "z3 -in";
}

SmtSession::SmtSession(SmtConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.command == "z3 -in") cfg_.command = SmtConfig::default_command();
  proc_ = std::make_unique<Subprocess>(Subprocess::split_command(cfg_.command));
  send(
      "(set-option :print-success false)\n"
      "(set-option :produce-models true)\n"
      "(set-option :global-decls false)\n"
      "(set-logic ALL)\n"
      "(set-option :timeout " +
      std::to_string(cfg_.per_query_ms) + ")\n");
}

SmtSession::~SmtSession() = default;

namespace {
// Crash or hang; distinct from a protocol desync, which is a SessionError.
struct SolverGone {
  std::string reason;
};
}  // namespace

void SmtSession::send(const std::string& text) {
  if (cfg_.log_queries && cfg_.log_sink) cfg_.log_sink(text);
  if (!proc_->write_all(text)) {
    poisoned_ = true;
    throw SolverGone{"solver process is gone (write failed)"};
  }
}

void SmtSession::desync(const std::string& why) {
  poisoned_ = true;
  proc_->kill_now();
  throw SessionError("solver protocol desync: " + why);
}

std::string SmtSession::read_until_marker(const std::string& marker) {
  const std::string needle = marker + "\n";
  auto deadline = std::chrono::steady_clock::now() +
                  std::chrono::milliseconds(4LL * cfg_.per_query_ms + 2000);
  while (true) {
    auto pos = rx_.find(needle);
    if (pos != std::string::npos) {
      std::string before = rx_.substr(0, pos);
      rx_.erase(0, pos + needle.size());
      return before;
    }
    std::string chunk;
    switch (proc_->read_chunk(chunk, deadline)) {
      case Subprocess::ReadResult::Data: rx_ += chunk; break;
      case Subprocess::ReadResult::Eof: {
        poisoned_ = true;
        throw SolverGone{"solver process exited unexpectedly"};
      }
      case Subprocess::ReadResult::Timeout: {
        poisoned_ = true;
        proc_->kill_now();
        throw SolverGone{"solver stopped responding (wall timeout)"};
      }
      case Subprocess::ReadResult::Error: {
        poisoned_ = true;
        proc_->kill_now();
        throw SolverGone{"read error from solver"};
      }
    }
  }
}

namespace {

// Model output is either (model (define-fun ...) ...) or a bare list of
// define-funs. Anything that is not an integer constant entry is skipped.
PartialState parse_model_text(const std::string& text, const VarSet& declared) {
  PartialState out;
  std::vector<Sexpr> forms;
  try {
    forms = parse_sexprs(text);
  } catch (const SexprError&) {
    return out;
  }
  for (const auto& form : forms) {
    if (!form.is_list()) continue;
    std::size_t start = 0;
    if (!form.items.empty() && form.items[0].is_sym("model")) start = 1;
    for (std::size_t i = start; i < form.items.size(); ++i) {
      const Sexpr& def = form.items[i];
      if (!def.is_list() || def.items.size() != 5) continue;
      if (!def.items[0].is_sym("define-fun")) continue;
      if (def.items[1].kind != Sexpr::Kind::Symbol) continue;
      const std::string& name = def.items[1].sym;
      if (!declared.count(name)) continue;
      if (!def.items[2].is_list() || !def.items[2].items.empty()) continue;
      if (!def.items[3].is_sym("Int")) continue;
      const Sexpr& val = def.items[4];
      if (val.kind == Sexpr::Kind::Number) {
        out.bindings[name] = val.num;
      } else if (val.is_list() && val.items.size() == 2 && val.items[0].is_sym("-") &&
                 val.items[1].kind == Sexpr::Kind::Number) {
        out.bindings[name] = -val.items[1].num;
      }
      // other shapes: treated as don't-care
    }
  }
  return out;
}

std::string parse_reason(const std::string& text) {
  auto q1 = text.find('"');
  if (q1 == std::string::npos) {
    // strip the (:reason-unknown ...) wrapper if present
    auto sp = text.find(' ');
    if (sp != std::string::npos && text.find(')') != std::string::npos)
      return text.substr(sp + 1, text.find(')') - sp - 1);
    return text;
  }
  auto q2 = text.find('"', q1 + 1);
  return text.substr(q1 + 1, q2 == std::string::npos ? std::string::npos : q2 - q1 - 1);
}

}  // namespace

SmtSession::QueryReply SmtSession::run_query(const FormulaPtr& assert_me,
                                             const std::vector<PartialState>& block,
                                             bool want_model) {
  if (poisoned_) throw SessionError("session is poisoned; create a fresh one");
  GateScope turn(gate_);
  try {
    return run_query_inner(assert_me, block, want_model);
  } catch (const SolverGone& gone) {
    stats_.unknown++;
    return QueryReply{Sat3::Unknown, std::nullopt, gone.reason};
  }
}

SmtSession::QueryReply SmtSession::run_query_inner(const FormulaPtr& assert_me,
                                                   const std::vector<PartialState>& block,
                                                   bool want_model) {
  VarSet declared = free_vars(assert_me);
  for (const auto& s : block)
    for (const auto& [v, _] : s.bindings) declared.insert(v);

  std::string q = "(push 1)\n";
  for (const auto& v : declared) q += "(declare-fun " + v + " () Int)\n";
  q += "(set-option :rlimit " + std::to_string(cfg_.rlimit_per_ms * cfg_.per_query_ms) + ")\n";
  q += "(assert " + to_smt2(assert_me) + ")\n";
  for (const auto& s : block) {
    // only the bound coordinates of a prior state take part in blocking
    std::string conj = "(and true";
    for (const auto& [v, val] : s.bindings)
      conj += " (= " + v + " " + (val < 0 ? "(- " + std::to_string(-val) + ")" : std::to_string(val)) + ")";
    conj += ")";
    q += "(assert (not " + conj + "))\n";
  }
  std::string qm = "##q" + std::to_string(++marker_seq_) + "##";
  q += "(check-sat)\n(echo \"" + qm + "\")\n";
  send(q);
  stats_.queries++;

  std::string verdict_text = read_until_marker(qm);
  Sat3 verdict;
  if (verdict_text.find("unsat") != std::string::npos) {
    verdict = Sat3::Unsat;
    stats_.unsat++;
  } else if (verdict_text.find("unknown") != std::string::npos) {
    verdict = Sat3::Unknown;
    stats_.unknown++;
  } else if (verdict_text.find("sat") != std::string::npos) {
    verdict = Sat3::Sat;
    stats_.sat++;
  } else {
    desync("no check-sat answer before marker; got: " + verdict_text.substr(0, 200));
  }

  QueryReply reply{verdict, std::nullopt, ""};
  if (verdict == Sat3::Sat && want_model) {
    std::string mm = "##m" + std::to_string(marker_seq_) + "##";
    send("(get-model)\n(echo \"" + mm + "\")\n");
    reply.model = parse_model_text(read_until_marker(mm), declared);
  } else if (verdict == Sat3::Unknown) {
    std::string rm = "##r" + std::to_string(marker_seq_) + "##";
    send("(get-info :reason-unknown)\n(echo \"" + rm + "\")\n");
    reply.reason = parse_reason(read_until_marker(rm));
  }
  send("(pop 1)\n");
  return reply;
}

CheckOutcome SmtSession::check_valid(const FormulaPtr& f) {
  QueryReply r = run_query(f_not(f), {}, true);
  CheckOutcome out;
  switch (r.verdict) {
    case Sat3::Unsat: out.kind = CheckOutcome::Kind::Valid; break;
    case Sat3::Sat:
      out.kind = CheckOutcome::Kind::Counterexample;
      out.cex = r.model.value_or(PartialState{});
      break;
    case Sat3::Unknown:
      out.kind = CheckOutcome::Kind::Unknown;
      out.reason = r.reason;
      break;
  }
  return out;
}

ModelOutcome SmtSession::get_model(const FormulaPtr& f, const std::vector<PartialState>& block) {
  QueryReply r = run_query(f, block, true);
  ModelOutcome out;
  switch (r.verdict) {
    case Sat3::Sat:
      out.kind = ModelOutcome::Kind::Sat;
      out.model = r.model.value_or(PartialState{});
      break;
    case Sat3::Unsat: out.kind = ModelOutcome::Kind::Unsat; break;
    case Sat3::Unknown:
      out.kind = ModelOutcome::Kind::Unknown;
      out.reason = r.reason;
      break;
  }
  return out;
}

Sat3 SmtSession::check_sat(const FormulaPtr& f, std::string* reason) {
  QueryReply r = run_query(f, {}, false);
  if (reason) *reason = r.reason;
  return r.verdict;
}

}  // namespace invsynth
