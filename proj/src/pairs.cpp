#include "stepverify/pairs.hpp"

#include "stepverify/errors.hpp"

#include <algorithm>
#include <unordered_map>

namespace stepverify {

namespace {

std::string key_of(const std::string& pid, int sample_index) {
  return pid + "\x1f" + std::to_string(sample_index);
}

std::vector<Reason> failing_checks(const VerificationReport& r) {
  std::vector<Reason> reasons;
  if (!r.arith_ok) reasons.push_back(Reason::arith_fail);
  if (!r.flow_ok) reasons.push_back(Reason::flow_fail);
  if (!r.constraints_ok) reasons.push_back(Reason::constraint_fail);
  return reasons;
}

}  // namespace

std::vector<PreferencePair> build_pairs(std::span<const Candidate> candidates,
                                        std::span<const VerificationReport> reports,
                                        int max_pairs_per_problem) {
  std::unordered_map<std::string, const Candidate*> text_of;
  text_of.reserve(candidates.size());
  for (const Candidate& c : candidates) text_of.emplace(key_of(c.problem_id, c.sample_index), &c);

  struct Side {
    std::vector<const VerificationReport*> verified;  // all_ok
    std::vector<const VerificationReport*> lucky;     // answer_ok && !all_ok
  };
  std::vector<std::string> order;  // problem ids in first-appearance order
  std::unordered_map<std::string, Side> sides;
  for (const VerificationReport& r : reports) {
    auto [it, inserted] = sides.try_emplace(r.problem_id);
    if (inserted) order.push_back(r.problem_id);
    if (r.all_ok) {
      it->second.verified.push_back(&r);
    } else if (r.answer_ok) {
      it->second.lucky.push_back(&r);
    }
  }
  std::sort(order.begin(), order.end());

  std::vector<PreferencePair> pairs;
  for (const std::string& pid : order) {
    Side& side = sides[pid];
    if (side.verified.empty() || side.lucky.empty()) continue;
    std::sort(side.verified.begin(), side.verified.end(),
              [](const VerificationReport* a, const VerificationReport* b) {
                if (a->arith_rate != b->arith_rate) return a->arith_rate > b->arith_rate;
                return a->sample_index < b->sample_index;
              });
    std::sort(side.lucky.begin(), side.lucky.end(),
              [](const VerificationReport* a, const VerificationReport* b) {
                if (a->arith_rate != b->arith_rate) return a->arith_rate < b->arith_rate;
                return a->sample_index < b->sample_index;
              });
    std::size_t n = std::min({side.verified.size(), side.lucky.size(),
                              static_cast<std::size_t>(std::max(0, max_pairs_per_problem))});
    for (std::size_t k = 0; k < n; ++k) {
      const VerificationReport& chosen = *side.verified[k];
      const VerificationReport& rejected = *side.lucky[k];
      auto chosen_text = text_of.find(key_of(pid, chosen.sample_index));
      auto rejected_text = text_of.find(key_of(pid, rejected.sample_index));
      if (chosen_text == text_of.end()) throw MissingReport(pid, chosen.sample_index);
      if (rejected_text == text_of.end()) throw MissingReport(pid, rejected.sample_index);

      PreferencePair pair;
      pair.problem_id = pid;
      pair.chosen_sample_index = chosen.sample_index;
      pair.rejected_sample_index = rejected.sample_index;
      pair.chosen_text = chosen_text->second->text;
      pair.rejected_text = rejected_text->second->text;
      pair.rejected_reasons = failing_checks(rejected);
      pair.chosen_arith_rate = to_double(chosen.arith_rate);
      pair.rejected_arith_rate = to_double(rejected.arith_rate);
      pairs.push_back(std::move(pair));
    }
  }
  return pairs;
}

PairSummary pair_stats(std::span<const PreferencePair> pairs) {
  PairSummary summary;
  summary.count = pairs.size();
  if (pairs.empty()) return summary;
  double gap_sum = 0.0;
  for (const PreferencePair& p : pairs) {
    gap_sum += p.chosen_arith_rate - p.rejected_arith_rate;
    for (Reason r : p.rejected_reasons) ++summary.reason_histogram[std::string(reason_name(r))];
  }
  summary.mean_rate_gap = gap_sum / static_cast<double>(pairs.size());
  return summary;
}

void write_pairs(const std::filesystem::path& path, std::span<const PreferencePair> pairs) {
  JsonlWriter out(path);
  for (const PreferencePair& p : pairs) {
    Json rec = Json::object();
    rec["problem_id"] = p.problem_id;
    rec["chosen_sample_index"] = p.chosen_sample_index;
    rec["rejected_sample_index"] = p.rejected_sample_index;
    rec["chosen_text"] = p.chosen_text;
    rec["rejected_text"] = p.rejected_text;
    Json reasons = Json::array();
    for (Reason r : p.rejected_reasons) reasons.push_back(std::string(reason_name(r)));
    rec["rejected_reasons"] = std::move(reasons);
    rec["chosen_arith_rate"] = p.chosen_arith_rate;
    rec["rejected_arith_rate"] = p.rejected_arith_rate;
    out.write(rec);
  }
  out.close();
}

std::vector<PreferencePair> load_pairs(const std::filesystem::path& path) {
  std::vector<PreferencePair> pairs;
  for_each_jsonl(path, [&](std::size_t line_no, const Json& rec) {
    try {
      PreferencePair p;
      p.problem_id = rec.at("problem_id").get<std::string>();
      p.chosen_sample_index = rec.at("chosen_sample_index").get<int>();
      p.rejected_sample_index = rec.at("rejected_sample_index").get<int>();
      p.chosen_text = rec.at("chosen_text").get<std::string>();
      p.rejected_text = rec.at("rejected_text").get<std::string>();
      for (const Json& jr : rec.at("rejected_reasons")) {
        auto reason = reason_from_name(jr.get<std::string>());
        if (!reason) throw MalformedRecord(path.string(), line_no, "bad reason");
        p.rejected_reasons.push_back(*reason);
      }
      p.chosen_arith_rate = rec.at("chosen_arith_rate").get<double>();
      p.rejected_arith_rate = rec.at("rejected_arith_rate").get<double>();
      pairs.push_back(std::move(p));
    } catch (const Json::exception& e) {
      throw MalformedRecord(path.string(), line_no, e.what());
    }
  });
  return pairs;
}

Json pair_summary_to_json(const PairSummary& summary) {
  Json rec = Json::object();
  rec["count"] = summary.count;
  rec["mean_rate_gap"] = summary.mean_rate_gap;
  Json hist = Json::object();
  for (const auto& [reason, count] : summary.reason_histogram) hist[reason] = count;
  rec["reason_histogram"] = std::move(hist);
  return rec;
}

}  // namespace stepverify
