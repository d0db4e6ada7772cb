#pragma once

#include "stepverify/corpus.hpp"
#include "stepverify/expr.hpp"
#include "stepverify/jsonl.hpp"
#include "stepverify/rational.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace stepverify {

struct VerifierConfig {
  Rational epsilon = Rational(1, 1000000);
  Rational tau_arith = Rational(4, 5);
  int flow_gap = 2;                            // flag only when step gap exceeds this
  Rational flow_rel_change = Rational(1, 2);   // ...and relative change exceeds this
  ParseMode parse_mode = ParseMode::standard;
  TaskStyle task_style = TaskStyle::hash_marker;
  std::vector<std::string> extra_count_nouns;  // extends the built-in lexicon
};

// One "<name> = <number>" or "there are <number> <name>" match.
struct AssignmentEvent {
  std::string variable;  // lowercased
  Rational value;
  int step_index = 1;
};

struct FlowFlag {
  std::string variable;
  int earlier_step = 0;
  int later_step = 0;
};

struct VerificationReport {
  std::string problem_id;
  int sample_index = 0;

  bool answer_ok = false;
  ExtractedAnswer extracted_answer;

  std::vector<ArithExpression> expressions;
  std::vector<std::string> arith_anomalies;  // div-zero claims; each counts as incorrect
  int arith_correct_count = 0;
  Rational arith_rate = 0;
  bool arith_ok = false;
  bool vacuous_arith_pass = false;

  std::vector<AssignmentEvent> flow_events;
  std::vector<FlowFlag> flow_flags;
  bool flow_ok = false;

  std::vector<std::string> constraint_violations;
  bool constraints_ok = false;

  bool all_ok = false;

  // Claims counted by the arithmetic rate: expressions plus anomalies.
  std::size_t arith_total() const { return expressions.size() + arith_anomalies.size(); }
};

// --- the four checks --------------------------------------------------------

// Check 1: extracted answer present and within epsilon of the gold answer.
std::pair<bool, ExtractedAnswer> check_answer(const Candidate& candidate, const Problem& problem,
                                              const VerifierConfig& cfg);

struct ArithCheckResult {
  bool ok = false;
  Rational rate = 0;
  bool vacuous = false;
  int correct_count = 0;
  std::vector<ArithExpression> expressions;
  std::vector<std::string> anomalies;
};

// Check 2: every extracted claim evaluated exactly; pass when the correct
// fraction reaches tau_arith, vacuously when nothing parses.
ArithCheckResult check_arithmetic(const Candidate& candidate, const VerifierConfig& cfg);

struct FlowCheckResult {
  bool ok = false;
  std::vector<AssignmentEvent> events;
  std::vector<FlowFlag> flags;
};

// Check 3: variable reassignments across a gap of more than flow_gap steps
// with relative change above flow_rel_change are flagged; adjacent-step
// reassignment is a legitimate update and is skipped.
FlowCheckResult check_logical_flow(const Candidate& candidate, const VerifierConfig& cfg);

struct ConstraintCheckResult {
  bool ok = false;
  std::vector<std::string> violations;
};

// Check 4: non-negativity and integrality for count-noun variables, plus
// addend/total conservation on unambiguous "in total" statements.
ConstraintCheckResult check_constraints(const Candidate& candidate, const Problem& problem,
                                        const VerifierConfig& cfg);

// All four checks; all_ok is their conjunction. Throws ProblemMismatch when
// candidate.problem_id != problem.id.
VerificationReport verify(const Candidate& candidate, const Problem& problem,
                          const VerifierConfig& cfg);

// Verifies a whole corpus in parallel; output sorted by
// (problem_id, sample_index) so results never depend on thread count.
std::vector<VerificationReport> verify_corpus(std::span<const Problem> problems,
                                              std::span<const Candidate> candidates,
                                              const VerifierConfig& cfg, int threads = 0);

// Assignment-event extraction shared by checks 3 and 4.
std::vector<AssignmentEvent> extract_assignment_events(std::span<const std::string> steps);

// --- report I/O -------------------------------------------------------------

Json report_to_json(const VerificationReport& report);
VerificationReport report_from_json(const Json& record, const std::string& path,
                                    std::size_t line_no);
void write_reports(const std::filesystem::path& path, std::span<const VerificationReport> reports);
std::vector<VerificationReport> load_reports(const std::filesystem::path& path);

ExpressionCoverage expression_counts(std::span<const VerificationReport> reports);

// Per-check pass rates among correct-answer candidates (the verification
// breakdown table shape).
struct VerificationBreakdown {
  std::size_t correct_answer_count = 0;
  double arith_pass_rate = 0.0;
  double flow_pass_rate = 0.0;
  double constraint_pass_rate = 0.0;
  double parser_coverage = 0.0;  // fraction with >= 1 expression
  double all_checks_rate = 0.0;
};

VerificationBreakdown verification_breakdown(std::span<const VerificationReport> reports);

}  // namespace stepverify
