#pragma once

#include "stepverify/corpus.hpp"
#include "stepverify/filterbank.hpp"
#include "stepverify/verifier.hpp"

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace stepverify {

// Chosen: passes all four checks. Rejected: correct answer, failed step
// verification (a lucky guess). Texts are embedded so a trainer needs no
// corpus join.
struct PreferencePair {
  std::string problem_id;
  int chosen_sample_index = 0;
  int rejected_sample_index = 0;
  std::string chosen_text;
  std::string rejected_text;
  std::vector<Reason> rejected_reasons;  // every failing check of the rejected side
  double chosen_arith_rate = 0.0;
  double rejected_arith_rate = 0.0;
};

// Per problem, up to max_pairs_per_problem pairs: the k-th best verified
// candidate (highest arith rate, ties to lowest sample_index) against the
// k-th worst lucky guess (lowest arith rate, same tie rule). Problems
// lacking either side contribute nothing.
std::vector<PreferencePair> build_pairs(std::span<const Candidate> candidates,
                                        std::span<const VerificationReport> reports,
                                        int max_pairs_per_problem = 1);

struct PairSummary {
  std::size_t count = 0;
  double mean_rate_gap = 0.0;  // mean(chosen - rejected arith rate)
  std::map<std::string, std::size_t> reason_histogram;
};

PairSummary pair_stats(std::span<const PreferencePair> pairs);

void write_pairs(const std::filesystem::path& path, std::span<const PreferencePair> pairs);
std::vector<PreferencePair> load_pairs(const std::filesystem::path& path);

Json pair_summary_to_json(const PairSummary& summary);

}  // namespace stepverify
