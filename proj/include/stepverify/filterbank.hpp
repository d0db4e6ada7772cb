#pragma once

#include "stepverify/corpus.hpp"
#include "stepverify/jsonl.hpp"
#include "stepverify/verifier.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace stepverify {

enum class StrategyKind { none, outcome, majority, nsrsa, nsrsa_dpo_source };

std::string_view strategy_name(StrategyKind kind);
std::optional<StrategyKind> strategy_from_name(std::string_view name);

struct FilterStrategy {
  StrategyKind kind = StrategyKind::nsrsa;
};

enum class Reason {
  accepted_ok,
  answer_fail,
  arith_fail,
  flow_fail,
  constraint_fail,
  not_sampled,
  not_plurality,
};

std::string_view reason_name(Reason reason);
std::optional<Reason> reason_from_name(std::string_view name);

struct FilterDecision {
  std::string problem_id;
  int sample_index = 0;
  StrategyKind strategy = StrategyKind::nsrsa;
  bool accepted = false;
  Reason reason = Reason::accepted_ok;
};

struct FilterStats {
  std::size_t total_generated = 0;
  std::size_t accepted = 0;
  double acceptance_rate = 0.0;
  std::size_t correct_answer_count = 0;
  std::size_t rejected_correct_answer = 0;
  bool fallback_triggered = false;
};

// Baseline: one uniformly sampled candidate per problem, from a stream keyed
// by (seed, problem_id) so the draw is independent of corpus ordering.
// Throws EmptyProblem for a problem with no candidates.
std::vector<FilterDecision> filter_none(std::span<const Problem> problems,
                                        std::span<const VerificationReport> reports,
                                        std::uint64_t seed);
std::vector<FilterDecision> filter_none(std::span<const VerificationReport> reports,
                                        std::uint64_t seed);

// Keep everything whose final answer matches the gold answer.
std::vector<FilterDecision> filter_outcome(std::span<const VerificationReport> reports);

// Keep candidates matching the plurality extracted answer for their problem.
// Gold answers are never consulted; candidates with no extractable answer
// can never form a plurality. Ties go to the smallest numeric value.
std::vector<FilterDecision> filter_majority(std::span<const VerificationReport> reports);

struct NsrsaFilterResult {
  std::vector<FilterDecision> decisions;
  bool fallback_triggered = false;
};

// Accept when all four checks pass. When fewer than min_accepted candidates
// pass corpus-wide, the arithmetic threshold relaxes to fallback_tau and only
// the arithmetic verdict is re-derived; flow/constraint verdicts stand.
NsrsaFilterResult filter_nsrsa(std::span<const VerificationReport> reports,
                               std::size_t min_accepted = 500,
                               Rational fallback_tau = Rational(1, 2),
                               StrategyKind label = StrategyKind::nsrsa);

FilterStats compute_stats(std::span<const FilterDecision> decisions,
                          std::span<const VerificationReport> reports);

// Decisions and reports must enumerate the same (problem_id, sample_index)
// set; throws MissingReport otherwise.
void check_report_coverage(std::span<const FilterDecision> decisions,
                           std::span<const VerificationReport> reports);

// --- file I/O ----------------------------------------------------------------

void write_decisions(const std::filesystem::path& path,
                     std::span<const FilterDecision> decisions);
std::vector<FilterDecision> load_decisions(const std::filesystem::path& path);

Json stats_to_json(const FilterStats& stats, const VerificationBreakdown& breakdown,
                   std::span<const FilterDecision> decisions);
void write_stats(const std::filesystem::path& path, const FilterStats& stats,
                 const VerificationBreakdown& breakdown,
                 std::span<const FilterDecision> decisions);

}  // namespace stepverify
