#pragma once

#include "stepverify/corpus.hpp"
#include "stepverify/filterbank.hpp"
#include "stepverify/verifier.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace stepverify {

// Unbiased estimator 1 - C(n-c, k)/C(n, k), computed via the product form so
// n up to 10^4 never overflows. Exactly 1 when n - c < k.
// Throws DomainError unless 0 <= c <= n and 1 <= k <= n.
double pass_at_k(int n, int c, int k);

struct DiversitySample {
  std::string problem_id;
  std::vector<std::string> solutions;  // at least 2
};

// Mean over ordered pairs (i != j) of BLEU-4(candidate=i, reference=j):
// uniform weights over n = 1..4, brevity penalty, add-one smoothing on zero
// n-gram counts, whitespace tokenization after lowercasing.
// Throws TooFewSolutions below 2 solutions.
double self_bleu(std::span<const std::string> solutions);
double self_bleu(const DiversitySample& sample);

// BLEU-4 of one candidate against one reference (exposed for tests).
double bleu4(std::string_view candidate, std::string_view reference);

// |{answer_ok && all_ok}| / |{answer_ok}|. Throws NoCorrectAnswers.
double verification_rate(std::span<const VerificationReport> reports);

struct AccuracyTrajectory {
  std::string condition;
  double baseline = 0.0;
  std::vector<double> per_iteration;  // iterations 1..K
};

struct RecursiveDepth {
  int depth = 0;
  bool exceeds = false;  // accuracy never dropped below baseline - margin
  int iterations = 0;
  std::string render() const;  // "2" or ">5"
};

// Largest d such that iterations 1..d all stay >= baseline - margin;
// "exceeds" when no iteration drops below (equality is not a drop).
RecursiveDepth recursive_depth(const AccuracyTrajectory& trajectory, double margin = 0.01);

// JSONL records {condition?, baseline, accuracies}. Values may be given on a
// percent scale (any value > 1 normalizes the whole record by 100).
std::vector<AccuracyTrajectory> load_trajectories(const std::filesystem::path& path);

// Corpus-level metric record for one (condition, iteration) cell. NaN marks
// an undefined value and serializes to null.
struct CorpusMetrics {
  double verification_rate = 0.0;
  double self_bleu = 0.0;
  double pass_at_1 = 0.0;
  double pass_at_5 = 0.0;
  double pass_at_8 = 0.0;
  double acceptance_rate = 0.0;
};

CorpusMetrics corpus_metrics(std::span<const Candidate> candidates,
                             std::span<const VerificationReport> reports,
                             std::span<const FilterDecision> decisions = {});

Json corpus_metrics_to_json(const CorpusMetrics& metrics);

}  // namespace stepverify
