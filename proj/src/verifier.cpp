#include "stepverify/verifier.hpp"

#include "stepverify/errors.hpp"
#include "stepverify/parallel.hpp"
#include "stepverify/textscan.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <unordered_map>

namespace stepverify {

namespace {

std::string describe_value(const Rational& v) { return format_rational(v); }

}  // namespace

std::pair<bool, ExtractedAnswer> check_answer(const Candidate& candidate, const Problem& problem,
                                              const VerifierConfig& cfg) {
  ExtractedAnswer extracted = extract_final_answer(candidate.text, cfg.task_style);
  bool ok = extracted.value.has_value() &&
            rational_abs(*extracted.value - problem.gold_answer) < cfg.epsilon;
  return {ok, extracted};
}

ArithCheckResult check_arithmetic(const Candidate& candidate, const VerifierConfig& cfg) {
  ArithCheckResult result;
  ExtractionResult extraction = extract_expressions_full(candidate.steps, cfg.parse_mode);
  result.expressions = std::move(extraction.expressions);
  for (const DivZeroClaim& claim : extraction.div_zero_claims) {
    std::ostringstream msg;
    msg << "division by zero claimed in step " << claim.step_index << ": \"" << claim.text << "\"";
    result.anomalies.push_back(msg.str());
  }

  for (const ArithExpression& expr : result.expressions) {
    if (rational_abs(evaluate_lhs(expr) - expr.claimed_result) < cfg.epsilon) {
      ++result.correct_count;
    }
  }

  const std::size_t total = result.expressions.size() + result.anomalies.size();
  if (total == 0) {
    // Nothing parseable: the arithmetic check passes vacuously. Limited
    // parser coverage under-detects errors rather than rejecting.
    result.vacuous = true;
    result.rate = 1;
    result.ok = true;
  } else {
    result.rate = Rational(result.correct_count, static_cast<int>(total));
    result.ok = result.rate >= cfg.tau_arith;
  }
  return result;
}

std::vector<AssignmentEvent> extract_assignment_events(std::span<const std::string> steps) {
  std::vector<AssignmentEvent> events;
  for (std::size_t s = 0; s < steps.size(); ++s) {
    // a/b after '=' reads as a fractional value here, not as division.
    std::vector<Token> toks = lex_step(steps[s], /*fractions_as_numbers=*/true);
    for (std::size_t i = 0; i < toks.size(); ++i) {
      // "<name> = <number>": 1-3 word tokens immediately before '='.
      if (toks[i].kind == TokenKind::equals && i + 1 < toks.size() &&
          toks[i + 1].kind == TokenKind::number && i >= 1 && toks[i - 1].kind == TokenKind::word) {
        std::size_t first = i - 1;
        while (first > 0 && i - first < 3 && toks[first - 1].kind == TokenKind::word) --first;
        std::string name;
        for (std::size_t w = first; w < i; ++w) {
          if (!name.empty()) name.push_back(' ');
          name += toks[w].word;
        }
        AssignmentEvent ev;
        ev.variable = std::move(name);
        ev.value = toks[i + 1].number.value;
        ev.step_index = static_cast<int>(s) + 1;
        events.push_back(std::move(ev));
      }
      // "there are <number> <name>"
      if (toks[i].kind == TokenKind::word && toks[i].word == "there" && i + 3 < toks.size() &&
          toks[i + 1].kind == TokenKind::word && toks[i + 1].word == "are" &&
          toks[i + 2].kind == TokenKind::number && toks[i + 3].kind == TokenKind::word) {
        AssignmentEvent ev;
        ev.variable = toks[i + 3].word;
        ev.value = toks[i + 2].number.value;
        ev.step_index = static_cast<int>(s) + 1;
        events.push_back(std::move(ev));
      }
    }
  }
  return events;
}

FlowCheckResult check_logical_flow(const Candidate& candidate, const VerifierConfig& cfg) {
  FlowCheckResult result;
  result.events = extract_assignment_events(candidate.steps);

  // Group by variable, preserving event order (events are already in
  // (step, position) order).
  std::map<std::string, std::vector<const AssignmentEvent*>> history;
  for (const AssignmentEvent& ev : result.events) history[ev.variable].push_back(&ev);

  for (const auto& [variable, hist] : history) {
    if (hist.size() < 2) continue;
    for (std::size_t k = 1; k < hist.size(); ++k) {
      const AssignmentEvent& prev = *hist[k - 1];
      const AssignmentEvent& cur = *hist[k];
      if (cur.step_index == prev.step_index + 1) continue;  // legitimate update
      int gap = cur.step_index - prev.step_index;
      if (gap <= cfg.flow_gap) continue;
      Rational denom = std::max(rational_abs(prev.value), Rational(1));
      Rational rel_change = rational_abs(cur.value - prev.value) / denom;
      if (rel_change > cfg.flow_rel_change) {
        result.flags.push_back({variable, prev.step_index, cur.step_index});
      }
    }
  }
  result.ok = result.flags.empty();
  return result;
}

namespace {

// Conservation scan: fires only on steps carrying an explicit total marker,
// at least two other numbers, and no non-additive operator.
void scan_conservation(const std::string& step, int step_index, const Rational& epsilon,
                       std::vector<std::string>& violations) {
  std::string lowered(step);
  std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });

  std::size_t marker_pos = std::string::npos;
  std::size_t marker_end = std::string::npos;
  bool total_after = false;  // "total of N" puts the total after the marker
  for (std::string_view marker : {std::string_view("in total"), std::string_view("altogether"),
                                  std::string_view("total of")}) {
    std::size_t pos = lowered.find(marker);
    if (pos != std::string::npos && pos < marker_pos) {
      marker_pos = pos;
      marker_end = pos + marker.size();
      total_after = marker == "total of";
    }
  }
  if (marker_pos == std::string::npos) return;

  std::vector<Token> toks = lex_step(step, /*fractions_as_numbers=*/true);
  std::vector<const Token*> numbers;
  for (const Token& t : toks) {
    if (t.kind == TokenKind::number) numbers.push_back(&t);
    if (t.kind == TokenKind::op && (t.op == '-' || t.op == '*' || t.op == '/')) return;
    if (t.kind == TokenKind::word &&
        (t.word == "minus" || t.word == "times" || t.word == "divided")) {
      return;
    }
  }

  const Token* stated = nullptr;
  if (total_after) {
    for (const Token* t : numbers) {
      if (t->begin >= marker_end) {
        stated = t;
        break;
      }
    }
  } else {
    for (const Token* t : numbers) {
      if (t->end <= marker_pos) stated = t;  // last number before the marker
    }
  }
  if (stated == nullptr) return;

  Rational sum = 0;
  std::size_t addends = 0;
  for (const Token* t : numbers) {
    if (t == stated) continue;
    sum += t->number.value;
    ++addends;
  }
  if (addends < 2) return;
  if (rational_abs(sum - stated->number.value) < epsilon) return;

  std::ostringstream msg;
  msg << "sum_mismatch in step " << step_index << ": addends total " << describe_value(sum)
      << " but stated total is " << describe_value(stated->number.value);
  violations.push_back(msg.str());
}

}  // namespace

ConstraintCheckResult check_constraints(const Candidate& candidate, const Problem& problem,
                                        const VerifierConfig& cfg) {
  (void)problem;  // constraints are domain rules, not problem-specific
  ConstraintCheckResult result;
  std::vector<AssignmentEvent> events = extract_assignment_events(candidate.steps);

  for (const AssignmentEvent& ev : events) {
    std::string_view head = ev.variable;
    if (auto sp = head.rfind(' '); sp != std::string_view::npos) head = head.substr(sp + 1);
    if (!is_count_noun(head, cfg.extra_count_nouns)) continue;
    if (ev.value < 0) {
      std::ostringstream msg;
      msg << "negative_count in step " << ev.step_index << ": " << ev.variable << " = "
          << describe_value(ev.value);
      result.violations.push_back(msg.str());
    }
    if (!is_integer(ev.value)) {
      std::ostringstream msg;
      msg << "non_integer_count in step " << ev.step_index << ": " << ev.variable << " = "
          << describe_value(ev.value);
      result.violations.push_back(msg.str());
    }
  }

  for (std::size_t s = 0; s < candidate.steps.size(); ++s) {
    scan_conservation(candidate.steps[s], static_cast<int>(s) + 1, cfg.epsilon,
                      result.violations);
  }

  result.ok = result.violations.empty();
  return result;
}

VerificationReport verify(const Candidate& candidate, const Problem& problem,
                          const VerifierConfig& cfg) {
  if (candidate.problem_id != problem.id) throw ProblemMismatch(candidate.problem_id, problem.id);

  VerificationReport report;
  report.problem_id = candidate.problem_id;
  report.sample_index = candidate.sample_index;

  auto [answer_ok, extracted] = check_answer(candidate, problem, cfg);
  report.answer_ok = answer_ok;
  report.extracted_answer = extracted;

  ArithCheckResult arith = check_arithmetic(candidate, cfg);
  report.expressions = std::move(arith.expressions);
  report.arith_anomalies = std::move(arith.anomalies);
  report.arith_correct_count = arith.correct_count;
  report.arith_rate = arith.rate;
  report.arith_ok = arith.ok;
  report.vacuous_arith_pass = arith.vacuous;

  FlowCheckResult flow = check_logical_flow(candidate, cfg);
  report.flow_events = std::move(flow.events);
  report.flow_flags = std::move(flow.flags);
  report.flow_ok = flow.ok;

  ConstraintCheckResult constraints = check_constraints(candidate, problem, cfg);
  report.constraint_violations = std::move(constraints.violations);
  report.constraints_ok = constraints.ok;

  report.all_ok = report.answer_ok && report.arith_ok && report.flow_ok && report.constraints_ok;
  return report;
}

std::vector<VerificationReport> verify_corpus(std::span<const Problem> problems,
                                              std::span<const Candidate> candidates,
                                              const VerifierConfig& cfg, int threads) {
  std::unordered_map<std::string_view, const Problem*> by_id;
  by_id.reserve(problems.size());
  for (const Problem& p : problems) by_id.emplace(p.id, &p);

  std::vector<VerificationReport> reports(candidates.size());
  parallel_for(candidates.size(), threads, [&](std::size_t i) {
    const Candidate& c = candidates[i];
    auto it = by_id.find(c.problem_id);
    if (it == by_id.end()) {
      throw InputError("candidate (" + c.problem_id + ", " + std::to_string(c.sample_index) +
                       ") references an unknown problem");
    }
    reports[i] = verify(c, *it->second, cfg);
  });

  std::sort(reports.begin(), reports.end(),
            [](const VerificationReport& a, const VerificationReport& b) {
              if (a.problem_id != b.problem_id) return a.problem_id < b.problem_id;
              return a.sample_index < b.sample_index;
            });
  return reports;
}

// --- serialization -----------------------------------------------------------

Json report_to_json(const VerificationReport& r) {
  Json rec = Json::object();
  rec["problem_id"] = r.problem_id;
  rec["sample_index"] = r.sample_index;
  rec["answer_ok"] = r.answer_ok;
  Json extracted = Json::object();
  extracted["value"] =
      r.extracted_answer.value ? Json(format_rational(*r.extracted_answer.value)) : Json(nullptr);
  extracted["source"] = std::string(answer_source_name(r.extracted_answer.source));
  extracted["span"] = Json::array({r.extracted_answer.begin, r.extracted_answer.end});
  rec["extracted_answer"] = std::move(extracted);

  Json exprs = Json::array();
  for (const ArithExpression& e : r.expressions) {
    Json je = Json::object();
    je["a"] = format_rational(e.operand_a);
    je["op"] = std::string(arith_op_name(e.op));
    je["b"] = format_rational(e.operand_b);
    je["claimed"] = format_rational(e.claimed_result);
    je["step"] = e.step_index;
    je["span"] = Json::array({e.begin, e.end});
    exprs.push_back(std::move(je));
  }
  rec["expressions"] = std::move(exprs);
  rec["arith_anomalies"] = r.arith_anomalies;
  rec["arith_correct_count"] = r.arith_correct_count;
  rec["arith_rate"] = to_double(r.arith_rate);
  rec["arith_ok"] = r.arith_ok;
  rec["vacuous_arith_pass"] = r.vacuous_arith_pass;

  Json events = Json::array();
  for (const AssignmentEvent& ev : r.flow_events) {
    Json je = Json::object();
    je["variable"] = ev.variable;
    je["value"] = format_rational(ev.value);
    je["step"] = ev.step_index;
    events.push_back(std::move(je));
  }
  rec["flow_events"] = std::move(events);

  Json flags = Json::array();
  for (const FlowFlag& f : r.flow_flags) {
    Json jf = Json::object();
    jf["variable"] = f.variable;
    jf["earlier_step"] = f.earlier_step;
    jf["later_step"] = f.later_step;
    flags.push_back(std::move(jf));
  }
  rec["flow_flags"] = std::move(flags);
  rec["flow_ok"] = r.flow_ok;
  rec["constraint_violations"] = r.constraint_violations;
  rec["constraints_ok"] = r.constraints_ok;
  rec["all_ok"] = r.all_ok;
  return rec;
}

namespace {

Rational require_rational(const Json& value, const std::string& path, std::size_t line_no) {
  if (value.is_string()) {
    if (auto r = parse_rational_string(value.get<std::string>())) return *r;
  } else if (value.is_number()) {
    if (auto r = parse_decimal(value.dump())) return *r;
  }
  throw MalformedRecord(path, line_no, "bad numeric field");
}

}  // namespace

VerificationReport report_from_json(const Json& rec, const std::string& path,
                                    std::size_t line_no) {
  try {
    VerificationReport r;
    r.problem_id = rec.at("problem_id").get<std::string>();
    r.sample_index = rec.at("sample_index").get<int>();
    r.answer_ok = rec.at("answer_ok").get<bool>();
    const Json& extracted = rec.at("extracted_answer");
    if (!extracted.at("value").is_null()) {
      r.extracted_answer.value = require_rational(extracted.at("value"), path, line_no);
    }
    std::string source = extracted.at("source").get<std::string>();
    r.extracted_answer.source = source == "hash_marker" ? AnswerSource::hash_marker
                                : source == "boxed"     ? AnswerSource::boxed
                                                        : AnswerSource::none;
    r.extracted_answer.begin = extracted.at("span").at(0).get<std::size_t>();
    r.extracted_answer.end = extracted.at("span").at(1).get<std::size_t>();

    for (const Json& je : rec.at("expressions")) {
      ArithExpression e;
      e.operand_a = require_rational(je.at("a"), path, line_no);
      std::string op = je.at("op").get<std::string>();
      e.op = op == "add"   ? ArithOp::add
             : op == "sub" ? ArithOp::sub
             : op == "mul" ? ArithOp::mul
                           : ArithOp::div;
      e.operand_b = require_rational(je.at("b"), path, line_no);
      e.claimed_result = require_rational(je.at("claimed"), path, line_no);
      e.step_index = je.at("step").get<int>();
      e.begin = je.at("span").at(0).get<std::size_t>();
      e.end = je.at("span").at(1).get<std::size_t>();
      r.expressions.push_back(std::move(e));
    }
    r.arith_anomalies = rec.at("arith_anomalies").get<std::vector<std::string>>();
    r.arith_correct_count = rec.at("arith_correct_count").get<int>();
    // The exact rate is derived from counts; the stored double is advisory.
    const std::size_t total = r.expressions.size() + r.arith_anomalies.size();
    r.arith_rate = total == 0 ? Rational(1)
                              : Rational(r.arith_correct_count, static_cast<int>(total));
    r.arith_ok = rec.at("arith_ok").get<bool>();
    r.vacuous_arith_pass = rec.at("vacuous_arith_pass").get<bool>();

    for (const Json& je : rec.at("flow_events")) {
      AssignmentEvent ev;
      ev.variable = je.at("variable").get<std::string>();
      ev.value = require_rational(je.at("value"), path, line_no);
      ev.step_index = je.at("step").get<int>();
      r.flow_events.push_back(std::move(ev));
    }
    for (const Json& jf : rec.at("flow_flags")) {
      FlowFlag f;
      f.variable = jf.at("variable").get<std::string>();
      f.earlier_step = jf.at("earlier_step").get<int>();
      f.later_step = jf.at("later_step").get<int>();
      r.flow_flags.push_back(std::move(f));
    }
    r.flow_ok = rec.at("flow_ok").get<bool>();
    r.constraint_violations = rec.at("constraint_violations").get<std::vector<std::string>>();
    r.constraints_ok = rec.at("constraints_ok").get<bool>();
    r.all_ok = rec.at("all_ok").get<bool>();
    return r;
  } catch (const Json::exception& e) {
    throw MalformedRecord(path, line_no, e.what());
  }
}

void write_reports(const std::filesystem::path& path,
                   std::span<const VerificationReport> reports) {
  JsonlWriter out(path);
  for (const VerificationReport& r : reports) out.write(report_to_json(r));
  out.close();
}

std::vector<VerificationReport> load_reports(const std::filesystem::path& path) {
  std::vector<VerificationReport> reports;
  for_each_jsonl(path, [&](std::size_t line_no, const Json& rec) {
    reports.push_back(report_from_json(rec, path.string(), line_no));
  });
  return reports;
}

ExpressionCoverage expression_counts(std::span<const VerificationReport> reports) {
  std::vector<std::size_t> counts;
  counts.reserve(reports.size());
  for (const VerificationReport& r : reports) counts.push_back(r.expressions.size());
  return expression_counts(std::span<const std::size_t>(counts));
}

VerificationBreakdown verification_breakdown(std::span<const VerificationReport> reports) {
  VerificationBreakdown b;
  std::size_t arith = 0, flow = 0, constraints = 0, covered = 0, all = 0;
  for (const VerificationReport& r : reports) {
    if (!r.answer_ok) continue;
    ++b.correct_answer_count;
    if (r.arith_ok) ++arith;
    if (r.flow_ok) ++flow;
    if (r.constraints_ok) ++constraints;
    if (!r.expressions.empty()) ++covered;
    if (r.all_ok) ++all;
  }
  if (b.correct_answer_count == 0) return b;
  double n = static_cast<double>(b.correct_answer_count);
  b.arith_pass_rate = static_cast<double>(arith) / n;
  b.flow_pass_rate = static_cast<double>(flow) / n;
  b.constraint_pass_rate = static_cast<double>(constraints) / n;
  b.parser_coverage = static_cast<double>(covered) / n;
  b.all_checks_rate = static_cast<double>(all) / n;
  return b;
}

}  // namespace stepverify
