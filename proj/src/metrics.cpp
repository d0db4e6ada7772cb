#include "stepverify/metrics.hpp"

#include "stepverify/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <map>
#include <unordered_map>

namespace stepverify {

double pass_at_k(int n, int c, int k) {
  if (n < 1 || c < 0 || c > n || k < 1 || k > n) {
    throw DomainError("pass_at_k requires 0 <= c <= n and 1 <= k <= n (got n=" +
                      std::to_string(n) + ", c=" + std::to_string(c) + ", k=" + std::to_string(k) +
                      ")");
  }
  if (n - c < k) return 1.0;
  double miss = 1.0;
  for (int i = 0; i < k; ++i) {
    miss *= static_cast<double>(n - c - i) / static_cast<double>(n - i);
  }
  return 1.0 - miss;
}

namespace {

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char raw : text) {
    unsigned char c = static_cast<unsigned char>(raw);
    if (std::isspace(c)) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(static_cast<char>(std::tolower(c)));
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

// n-grams as exact 64-bit keys: four 16-bit token ids. Falls back to the
// generic map only for pathological vocabularies.
class NgramCounter {
 public:
  explicit NgramCounter(std::unordered_map<std::string, std::uint32_t>& vocab) : vocab_(vocab) {}

  std::uint32_t id_of(const std::string& token) {
    auto [it, inserted] = vocab_.emplace(token, static_cast<std::uint32_t>(vocab_.size() + 1));
    return it->second;
  }

  static std::uint64_t pack(const std::uint32_t* ids, int n) {
    std::uint64_t key = 0;
    for (int i = 0; i < n; ++i) key = (key << 16) | (ids[i] & 0xFFFF);
    return key | (static_cast<std::uint64_t>(n) << 60);  // disambiguate orders
  }

 private:
  std::unordered_map<std::string, std::uint32_t>& vocab_;
};

}  // namespace

double bleu4(std::string_view candidate, std::string_view reference) {
  std::vector<std::string> cand = tokenize(candidate);
  std::vector<std::string> ref = tokenize(reference);
  if (cand.empty()) return ref.empty() ? 1.0 : 0.0;

  std::unordered_map<std::string, std::uint32_t> vocab;
  NgramCounter counter(vocab);
  std::vector<std::uint32_t> cand_ids, ref_ids;
  cand_ids.reserve(cand.size());
  ref_ids.reserve(ref.size());
  for (const auto& t : cand) cand_ids.push_back(counter.id_of(t));
  for (const auto& t : ref) ref_ids.push_back(counter.id_of(t));
  // 16-bit ids hold any realistic solution; beyond that the packing would
  // alias, so refuse rather than mis-score.
  if (vocab.size() > 0xFFFE) throw DomainError("solution vocabulary too large for BLEU scorer");

  double log_sum = 0.0;
  for (int n = 1; n <= 4; ++n) {
    std::unordered_map<std::uint64_t, int> ref_counts;
    if (ref_ids.size() + 1 > static_cast<std::size_t>(n)) {
      for (std::size_t i = 0; i + n <= ref_ids.size(); ++i) {
        ++ref_counts[NgramCounter::pack(&ref_ids[i], n)];
      }
    }
    std::unordered_map<std::uint64_t, int> cand_counts;
    std::size_t total = cand_ids.size() + 1 > static_cast<std::size_t>(n)
                            ? cand_ids.size() - static_cast<std::size_t>(n) + 1
                            : 0;
    for (std::size_t i = 0; i + n <= cand_ids.size(); ++i) {
      ++cand_counts[NgramCounter::pack(&cand_ids[i], n)];
    }
    long matches = 0;
    for (const auto& [gram, count] : cand_counts) {
      auto it = ref_counts.find(gram);
      if (it != ref_counts.end()) matches += std::min(count, it->second);
    }
    double p;
    if (matches == 0) {
      p = (static_cast<double>(matches) + 1.0) / (static_cast<double>(total) + 1.0);
    } else {
      p = static_cast<double>(matches) / static_cast<double>(total);
    }
    log_sum += 0.25 * std::log(p);
  }

  double bp = 1.0;
  if (cand.size() < ref.size()) {
    bp = std::exp(1.0 - static_cast<double>(ref.size()) / static_cast<double>(cand.size()));
  }
  return bp * std::exp(log_sum);
}

double self_bleu(std::span<const std::string> solutions) {
  if (solutions.size() < 2) throw TooFewSolutions();
  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < solutions.size(); ++i) {
    for (std::size_t j = 0; j < solutions.size(); ++j) {
      if (i == j) continue;
      sum += bleu4(solutions[i], solutions[j]);
      ++pairs;
    }
  }
  return sum / static_cast<double>(pairs);
}

double self_bleu(const DiversitySample& sample) {
  return self_bleu(std::span<const std::string>(sample.solutions));
}

double verification_rate(std::span<const VerificationReport> reports) {
  std::size_t correct = 0, verified = 0;
  for (const VerificationReport& r : reports) {
    if (!r.answer_ok) continue;
    ++correct;
    if (r.all_ok) ++verified;
  }
  if (correct == 0) throw NoCorrectAnswers();
  return static_cast<double>(verified) / static_cast<double>(correct);
}

std::string RecursiveDepth::render() const {
  if (exceeds) return ">" + std::to_string(iterations);
  return std::to_string(depth);
}

RecursiveDepth recursive_depth(const AccuracyTrajectory& trajectory, double margin) {
  if (trajectory.per_iteration.empty()) {
    throw DomainError("recursive_depth needs a non-empty trajectory");
  }
  RecursiveDepth result;
  result.iterations = static_cast<int>(trajectory.per_iteration.size());
  const double threshold = trajectory.baseline - margin;
  int d = 0;
  for (double accuracy : trajectory.per_iteration) {
    if (accuracy < threshold) {  // strictly below: equality is not a drop
      result.depth = d;
      result.exceeds = false;
      return result;
    }
    ++d;
  }
  result.depth = d;
  result.exceeds = true;
  return result;
}

std::vector<AccuracyTrajectory> load_trajectories(const std::filesystem::path& path) {
  std::vector<AccuracyTrajectory> trajectories;
  for_each_jsonl(path, [&](std::size_t line_no, const Json& rec) {
    try {
      AccuracyTrajectory t;
      if (rec.contains("condition")) t.condition = rec.at("condition").get<std::string>();
      t.baseline = rec.at("baseline").get<double>();
      t.per_iteration = rec.at("accuracies").get<std::vector<double>>();
      if (t.per_iteration.empty()) {
        throw MalformedRecord(path.string(), line_no, "empty accuracies");
      }
      // Percent-scale inputs (e.g. 80.5) normalize to fractions.
      bool percent_scale = t.baseline > 1.0;
      for (double v : t.per_iteration) percent_scale = percent_scale || v > 1.0;
      if (percent_scale) {
        t.baseline /= 100.0;
        for (double& v : t.per_iteration) v /= 100.0;
      }
      trajectories.push_back(std::move(t));
    } catch (const Json::exception& e) {
      throw MalformedRecord(path.string(), line_no, e.what());
    }
  });
  return trajectories;
}

CorpusMetrics corpus_metrics(std::span<const Candidate> candidates,
                             std::span<const VerificationReport> reports,
                             std::span<const FilterDecision> decisions) {
  constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
  CorpusMetrics m;

  try {
    m.verification_rate = verification_rate(reports);
  } catch (const NoCorrectAnswers&) {
    m.verification_rate = kNan;
  }

  // Group solutions and correctness by problem.
  std::map<std::string, std::vector<const std::string*>> texts;
  for (const Candidate& c : candidates) texts[c.problem_id].push_back(&c.text);
  std::map<std::string, std::pair<int, int>> counts;  // pid -> (n, c)
  for (const VerificationReport& r : reports) {
    auto& [n, c] = counts[r.problem_id];
    ++n;
    if (r.answer_ok) ++c;
  }

  double bleu_sum = 0.0;
  std::size_t bleu_problems = 0;
  for (const auto& [pid, sols] : texts) {
    if (sols.size() < 2) continue;
    std::vector<std::string> owned;
    owned.reserve(sols.size());
    for (const std::string* s : sols) owned.push_back(*s);
    bleu_sum += self_bleu(std::span<const std::string>(owned));
    ++bleu_problems;
  }
  m.self_bleu = bleu_problems == 0 ? kNan : bleu_sum / static_cast<double>(bleu_problems);

  auto mean_pass = [&](int k) {
    double sum = 0.0;
    std::size_t contributing = 0;
    for (const auto& [pid, nc] : counts) {
      if (nc.first < k) continue;
      sum += pass_at_k(nc.first, nc.second, k);
      ++contributing;
    }
    return contributing == 0 ? kNan : sum / static_cast<double>(contributing);
  };
  m.pass_at_1 = mean_pass(1);
  m.pass_at_5 = mean_pass(5);
  m.pass_at_8 = mean_pass(8);

  if (!decisions.empty()) {
    std::size_t accepted = 0;
    for (const FilterDecision& d : decisions) {
      if (d.accepted) ++accepted;
    }
    m.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(decisions.size());
  } else {
    m.acceptance_rate = kNan;
  }
  return m;
}

Json corpus_metrics_to_json(const CorpusMetrics& m) {
  auto field = [](double v) { return std::isnan(v) ? Json(nullptr) : Json(v); };
  Json rec = Json::object();
  rec["verification_rate"] = field(m.verification_rate);
  rec["self_bleu"] = field(m.self_bleu);
  rec["pass_at_1"] = field(m.pass_at_1);
  rec["pass_at_5"] = field(m.pass_at_5);
  rec["pass_at_8"] = field(m.pass_at_8);
  rec["acceptance_rate"] = field(m.acceptance_rate);
  return rec;
}

}  // namespace stepverify
