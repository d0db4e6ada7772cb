#include "stepverify/filterbank.hpp"

#include "stepverify/errors.hpp"
#include "stepverify/rng.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>
#include <unordered_set>

namespace stepverify {

std::string_view strategy_name(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::none: return "none";
    case StrategyKind::outcome: return "outcome";
    case StrategyKind::majority: return "majority";
    case StrategyKind::nsrsa: return "nsrsa";
    case StrategyKind::nsrsa_dpo_source: return "nsrsa_dpo_source";
  }
  return "nsrsa";
}

std::optional<StrategyKind> strategy_from_name(std::string_view name) {
  if (name == "none") return StrategyKind::none;
  if (name == "outcome") return StrategyKind::outcome;
  if (name == "majority") return StrategyKind::majority;
  if (name == "nsrsa") return StrategyKind::nsrsa;
  if (name == "nsrsa_dpo_source") return StrategyKind::nsrsa_dpo_source;
  return std::nullopt;
}

std::string_view reason_name(Reason reason) {
  switch (reason) {
    case Reason::accepted_ok: return "accepted_ok";
    case Reason::answer_fail: return "answer_fail";
    case Reason::arith_fail: return "arith_fail";
    case Reason::flow_fail: return "flow_fail";
    case Reason::constraint_fail: return "constraint_fail";
    case Reason::not_sampled: return "not_sampled";
    case Reason::not_plurality: return "not_plurality";
  }
  return "accepted_ok";
}

std::optional<Reason> reason_from_name(std::string_view name) {
  for (Reason r : {Reason::accepted_ok, Reason::answer_fail, Reason::arith_fail, Reason::flow_fail,
                   Reason::constraint_fail, Reason::not_sampled, Reason::not_plurality}) {
    if (reason_name(r) == name) return r;
  }
  return std::nullopt;
}

namespace {

// Reports arrive sorted by (problem_id, sample_index); group preserving order.
std::vector<std::pair<std::string_view, std::vector<std::size_t>>> group_by_problem(
    std::span<const VerificationReport> reports) {
  std::vector<std::pair<std::string_view, std::vector<std::size_t>>> groups;
  std::unordered_map<std::string_view, std::size_t> index;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    auto [it, inserted] = index.emplace(reports[i].problem_id, groups.size());
    if (inserted) groups.emplace_back(reports[i].problem_id, std::vector<std::size_t>{});
    groups[it->second].second.push_back(i);
  }
  return groups;
}

// First failing check, in check order.
Reason rejection_reason(const VerificationReport& r, bool arith_ok) {
  if (!r.answer_ok) return Reason::answer_fail;
  if (!arith_ok) return Reason::arith_fail;
  if (!r.flow_ok) return Reason::flow_fail;
  return Reason::constraint_fail;
}

}  // namespace

std::vector<FilterDecision> filter_none(std::span<const Problem> problems,
                                        std::span<const VerificationReport> reports,
                                        std::uint64_t seed) {
  auto groups = group_by_problem(reports);
  std::unordered_set<std::string_view> with_candidates;
  for (const auto& [pid, _] : groups) with_candidates.insert(pid);
  for (const Problem& p : problems) {
    if (!with_candidates.contains(p.id)) throw EmptyProblem(p.id);
  }
  return filter_none(reports, seed);
}

std::vector<FilterDecision> filter_none(std::span<const VerificationReport> reports,
                                        std::uint64_t seed) {
  std::vector<FilterDecision> decisions(reports.size());
  for (auto& [pid, members] : group_by_problem(reports)) {
    // Stable draw: candidates ordered by sample_index, stream keyed by id.
    std::sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
      return reports[a].sample_index < reports[b].sample_index;
    });
    SplitMix64 stream = keyed_stream(seed, pid);
    std::size_t chosen = members[stream.next_below(members.size())];
    for (std::size_t i : members) {
      decisions[i] = {reports[i].problem_id, reports[i].sample_index, StrategyKind::none,
                      i == chosen, i == chosen ? Reason::accepted_ok : Reason::not_sampled};
    }
  }
  return decisions;
}

std::vector<FilterDecision> filter_outcome(std::span<const VerificationReport> reports) {
  std::vector<FilterDecision> decisions;
  decisions.reserve(reports.size());
  for (const VerificationReport& r : reports) {
    decisions.push_back({r.problem_id, r.sample_index, StrategyKind::outcome, r.answer_ok,
                         r.answer_ok ? Reason::accepted_ok : Reason::answer_fail});
  }
  return decisions;
}

std::vector<FilterDecision> filter_majority(std::span<const VerificationReport> reports) {
  std::vector<FilterDecision> decisions(reports.size());
  for (const auto& [pid, members] : group_by_problem(reports)) {
    std::map<Rational, std::size_t> votes;
    for (std::size_t i : members) {
      if (reports[i].extracted_answer.value) ++votes[*reports[i].extracted_answer.value];
    }
    std::optional<Rational> plurality;
    std::size_t best = 0;
    for (const auto& [value, count] : votes) {
      // std::map iterates in ascending value order, so on a tie the smallest
      // numeric value wins.
      if (count > best) {
        best = count;
        plurality = value;
      }
    }
    for (std::size_t i : members) {
      const auto& extracted = reports[i].extracted_answer.value;
      bool accepted = extracted.has_value() && plurality.has_value() && *extracted == *plurality;
      Reason reason = accepted          ? Reason::accepted_ok
                      : !extracted      ? Reason::answer_fail
                                        : Reason::not_plurality;
      decisions[i] = {reports[i].problem_id, reports[i].sample_index, StrategyKind::majority,
                      accepted, reason};
    }
  }
  return decisions;
}

NsrsaFilterResult filter_nsrsa(std::span<const VerificationReport> reports,
                               std::size_t min_accepted, Rational fallback_tau,
                               StrategyKind label) {
  NsrsaFilterResult result;
  result.decisions.resize(reports.size());

  auto decide = [&](const VerificationReport& r, bool use_fallback) {
    bool arith_ok = r.arith_ok;
    if (use_fallback) arith_ok = r.vacuous_arith_pass || r.arith_rate >= fallback_tau;
    bool accepted = r.answer_ok && arith_ok && r.flow_ok && r.constraints_ok;
    return std::pair<bool, Reason>(accepted,
                                   accepted ? Reason::accepted_ok : rejection_reason(r, arith_ok));
  };

  std::size_t accepted_count = 0;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    auto [accepted, reason] = decide(reports[i], false);
    result.decisions[i] = {reports[i].problem_id, reports[i].sample_index, label, accepted, reason};
    if (accepted) ++accepted_count;
  }

  // Aggressive-filtering fallback: strictly fewer than min_accepted passes
  // corpus-wide relaxes only the arithmetic threshold.
  if (accepted_count < min_accepted) {
    result.fallback_triggered = true;
    for (std::size_t i = 0; i < reports.size(); ++i) {
      auto [accepted, reason] = decide(reports[i], true);
      result.decisions[i].accepted = accepted;
      result.decisions[i].reason = reason;
    }
  }
  return result;
}

void check_report_coverage(std::span<const FilterDecision> decisions,
                           std::span<const VerificationReport> reports) {
  std::unordered_set<std::string> keys;
  keys.reserve(reports.size());
  for (const VerificationReport& r : reports) {
    keys.insert(r.problem_id + "\x1f" + std::to_string(r.sample_index));
  }
  for (const FilterDecision& d : decisions) {
    if (!keys.contains(d.problem_id + "\x1f" + std::to_string(d.sample_index))) {
      throw MissingReport(d.problem_id, d.sample_index);
    }
  }
}

FilterStats compute_stats(std::span<const FilterDecision> decisions,
                          std::span<const VerificationReport> reports) {
  std::unordered_map<std::string, const VerificationReport*> by_key;
  by_key.reserve(reports.size());
  for (const VerificationReport& r : reports) {
    by_key.emplace(r.problem_id + "\x1f" + std::to_string(r.sample_index), &r);
  }

  FilterStats stats;
  stats.total_generated = decisions.size();
  for (const FilterDecision& d : decisions) {
    auto it = by_key.find(d.problem_id + "\x1f" + std::to_string(d.sample_index));
    if (it == by_key.end()) throw MissingReport(d.problem_id, d.sample_index);
    const VerificationReport& r = *it->second;
    if (d.accepted) ++stats.accepted;
    if (r.answer_ok) {
      ++stats.correct_answer_count;
      if (!d.accepted) ++stats.rejected_correct_answer;
    }
  }
  stats.acceptance_rate = stats.total_generated == 0
                              ? 0.0
                              : static_cast<double>(stats.accepted) /
                                    static_cast<double>(stats.total_generated);
  return stats;
}

// --- file I/O ----------------------------------------------------------------

void write_decisions(const std::filesystem::path& path,
                     std::span<const FilterDecision> decisions) {
  JsonlWriter out(path);
  for (const FilterDecision& d : decisions) {
    Json rec = Json::object();
    rec["problem_id"] = d.problem_id;
    rec["sample_index"] = d.sample_index;
    rec["strategy"] = std::string(strategy_name(d.strategy));
    rec["accepted"] = d.accepted;
    rec["reason"] = std::string(reason_name(d.reason));
    out.write(rec);
  }
  out.close();
}

std::vector<FilterDecision> load_decisions(const std::filesystem::path& path) {
  std::vector<FilterDecision> decisions;
  for_each_jsonl(path, [&](std::size_t line_no, const Json& rec) {
    try {
      FilterDecision d;
      d.problem_id = rec.at("problem_id").get<std::string>();
      d.sample_index = rec.at("sample_index").get<int>();
      auto strategy = strategy_from_name(rec.at("strategy").get<std::string>());
      auto reason = reason_from_name(rec.at("reason").get<std::string>());
      if (!strategy || !reason) throw MalformedRecord(path.string(), line_no, "bad enum value");
      d.strategy = *strategy;
      d.accepted = rec.at("accepted").get<bool>();
      d.reason = *reason;
      decisions.push_back(std::move(d));
    } catch (const Json::exception& e) {
      throw MalformedRecord(path.string(), line_no, e.what());
    }
  });
  return decisions;
}

Json stats_to_json(const FilterStats& stats, const VerificationBreakdown& breakdown,
                   std::span<const FilterDecision> decisions) {
  Json rec = Json::object();
  rec["total_generated"] = stats.total_generated;
  rec["accepted"] = stats.accepted;
  rec["acceptance_rate"] = stats.acceptance_rate;
  rec["correct_answer_count"] = stats.correct_answer_count;
  rec["rejected_correct_answer"] = stats.rejected_correct_answer;
  rec["fallback_triggered"] = stats.fallback_triggered;

  Json bd = Json::object();
  bd["correct_answer_count"] = breakdown.correct_answer_count;
  bd["arith_pass_rate"] = breakdown.arith_pass_rate;
  bd["flow_pass_rate"] = breakdown.flow_pass_rate;
  bd["constraint_pass_rate"] = breakdown.constraint_pass_rate;
  bd["parser_coverage"] = breakdown.parser_coverage;
  bd["all_checks_rate"] = breakdown.all_checks_rate;
  rec["breakdown"] = std::move(bd);

  std::map<std::string, std::size_t> histogram;
  for (const FilterDecision& d : decisions) {
    if (!d.accepted) ++histogram[std::string(reason_name(d.reason))];
  }
  Json hist = Json::object();
  for (const auto& [reason, count] : histogram) hist[reason] = count;
  rec["rejection_histogram"] = std::move(hist);
  return rec;
}

void write_stats(const std::filesystem::path& path, const FilterStats& stats,
                 const VerificationBreakdown& breakdown,
                 std::span<const FilterDecision> decisions) {
  write_json_file(path, stats_to_json(stats, breakdown, decisions));
}

}  // namespace stepverify
