#include "stepverify/corpus.hpp"

#include "stepverify/errors.hpp"
#include "stepverify/textscan.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

namespace stepverify {

namespace {

constexpr std::string_view kThinkOpen = "<think>";
constexpr std::string_view kThinkClose = "</think>";
constexpr std::string_view kHashMarker = "####";

const char* kKnownProblemFields[] = {"id", "question", "answer"};
const char* kKnownCandidateFields[] = {"problem_id", "sample_index", "text"};

template <std::size_t N>
Json collect_extras(const Json& record, const char* const (&known)[N]) {
  Json extras = Json::object();
  for (auto it = record.begin(); it != record.end(); ++it) {
    bool is_known = false;
    for (const char* k : known) {
      if (it.key() == k) {
        is_known = true;
        break;
      }
    }
    if (!is_known) extras[it.key()] = it.value();
  }
  return extras;
}

std::string answer_field_to_text(const Json& value) {
  if (value.is_string()) return value.get<std::string>();
  return value.dump();  // numeric answers serialize to their literal form
}

// Gold answers may arrive as a bare number or as a GSM8K-style solution text
// ending in "#### <number>".
std::optional<Rational> parse_gold_answer(const std::string& text) {
  if (text.find(kHashMarker) != std::string::npos) {
    ExtractedAnswer extracted = extract_final_answer(text, TaskStyle::hash_marker);
    return extracted.value;
  }
  std::string trimmed = text;
  while (!trimmed.empty() && (trimmed.front() == ' ' || trimmed.front() == '\t'))
    trimmed.erase(trimmed.begin());
  while (!trimmed.empty() && (trimmed.back() == ' ' || trimmed.back() == '\t')) trimmed.pop_back();
  try {
    return normalize_number(trimmed);
  } catch (const NotANumber&) {
    return std::nullopt;
  }
}

}  // namespace

std::string_view answer_source_name(AnswerSource source) {
  switch (source) {
    case AnswerSource::hash_marker: return "hash_marker";
    case AnswerSource::boxed: return "boxed";
    case AnswerSource::none: return "none";
  }
  return "none";
}

std::vector<Problem> load_problems(const std::filesystem::path& path) {
  std::vector<Problem> problems;
  std::unordered_set<std::string> seen;
  for_each_jsonl(path, [&](std::size_t line_no, const Json& record) {
    if (!record.is_object() || !record.contains("id") || !record.contains("question") ||
        !record.contains("answer") || !record["id"].is_string() ||
        !record["question"].is_string()) {
      throw MalformedRecord(path.string(), line_no, "expected {id, question, answer}");
    }
    Problem p;
    p.id = record["id"].get<std::string>();
    if (p.id.empty()) throw MalformedRecord(path.string(), line_no, "empty id");
    if (!seen.insert(p.id).second) throw DuplicateId(p.id);
    p.question = record["question"].get<std::string>();
    auto gold = parse_gold_answer(answer_field_to_text(record["answer"]));
    if (!gold) throw UnparseableAnswer(p.id);
    p.gold_answer = *gold;
    p.extras = collect_extras(record, kKnownProblemFields);
    problems.push_back(std::move(p));
  });
  return problems;
}

std::vector<Candidate> load_candidates(const std::filesystem::path& path) {
  std::vector<Candidate> candidates;
  std::unordered_set<std::string> seen;
  for_each_jsonl(path, [&](std::size_t line_no, const Json& record) {
    if (!record.is_object() || !record.contains("problem_id") ||
        !record.contains("sample_index") || !record.contains("text") ||
        !record["problem_id"].is_string() || !record["sample_index"].is_number_integer() ||
        !record["text"].is_string()) {
      throw MalformedRecord(path.string(), line_no, "expected {problem_id, sample_index, text}");
    }
    Candidate c;
    c.problem_id = record["problem_id"].get<std::string>();
    c.sample_index = record["sample_index"].get<int>();
    std::string key = c.problem_id + "\x1f" + std::to_string(c.sample_index);
    if (!seen.insert(key).second) throw DuplicateSample(c.problem_id, c.sample_index);
    c.text = record["text"].get<std::string>();
    c.steps = segment_steps(c.text);
    c.extras = collect_extras(record, kKnownCandidateFields);
    candidates.push_back(std::move(c));
  });
  return candidates;
}

void write_problems(const std::filesystem::path& path, std::span<const Problem> problems) {
  JsonlWriter out(path);
  for (const Problem& p : problems) {
    Json record = Json::object();
    record["id"] = p.id;
    record["question"] = p.question;
    record["answer"] = format_rational(p.gold_answer);
    for (auto it = p.extras.begin(); it != p.extras.end(); ++it) record[it.key()] = it.value();
    out.write(record);
  }
  out.close();
}

void write_candidates(const std::filesystem::path& path, std::span<const Candidate> candidates) {
  JsonlWriter out(path);
  for (const Candidate& c : candidates) {
    Json record = Json::object();
    record["problem_id"] = c.problem_id;
    record["sample_index"] = c.sample_index;
    record["text"] = c.text;
    for (auto it = c.extras.begin(); it != c.extras.end(); ++it) record[it.key()] = it.value();
    out.write(record);
  }
  out.close();
}

void validate_corpus(std::span<const Problem> problems, std::span<const Candidate> candidates) {
  std::unordered_set<std::string_view> ids;
  for (const Problem& p : problems) ids.insert(p.id);
  for (const Candidate& c : candidates) {
    if (!ids.contains(c.problem_id)) {
      throw InputError("candidate (" + c.problem_id + ", " + std::to_string(c.sample_index) +
                       ") references an unknown problem");
    }
  }
}

std::vector<std::string> segment_steps(std::string_view text) {
  // Think-tag handling: keep the verifier model agnostic. Steps come from
  // inside the first <think>...</think> pair plus whatever follows it.
  std::string effective;
  std::string_view body = text;
  auto open = text.find(kThinkOpen);
  if (open != std::string_view::npos) {
    auto close = text.find(kThinkClose, open + kThinkOpen.size());
    if (close != std::string_view::npos) {
      effective.assign(text.substr(open + kThinkOpen.size(), close - open - kThinkOpen.size()));
      effective.append(text.substr(close + kThinkClose.size()));
      body = effective;
    }
  }

  std::vector<std::string> steps;
  auto flush = [&](std::string_view fragment) {
    std::size_t b = fragment.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return;
    std::size_t e = fragment.find_last_not_of(" \t\r\n");
    steps.emplace_back(fragment.substr(b, e - b + 1));
  };

  std::size_t line_start = 0;
  for (std::size_t i = 0; i <= body.size(); ++i) {
    if (i == body.size() || body[i] == '\n') {
      std::string_view line = body.substr(line_start, i - line_start);
      // Sentence split: terminator followed by whitespace. "3.5" stays whole
      // because its '.' is followed by a digit.
      std::size_t frag_start = 0;
      for (std::size_t j = 0; j + 1 < line.size(); ++j) {
        char c = line[j];
        if ((c == '.' || c == '!' || c == '?') && (line[j + 1] == ' ' || line[j + 1] == '\t')) {
          flush(line.substr(frag_start, j + 1 - frag_start));
          frag_start = j + 1;
        }
      }
      flush(line.substr(frag_start));
      line_start = i + 1;
    }
  }
  return steps;
}

namespace {

ExtractedAnswer extract_after_hash(std::string_view text) {
  ExtractedAnswer answer;
  std::size_t last = std::string_view::npos;
  for (std::size_t pos = text.find(kHashMarker); pos != std::string_view::npos;
       pos = text.find(kHashMarker, pos + 1)) {
    last = pos;
  }
  if (last == std::string_view::npos) return answer;
  // Skip any run of '#' (e.g. "#####"), then take the first numeric token.
  std::size_t i = last;
  while (i < text.size() && text[i] == '#') ++i;
  NumberScanOptions opts;  // currency/percent/fraction all legal in answers
  for (; i < text.size(); ++i) {
    char c = text[i];
    bool start = (c >= '0' && c <= '9') || c == '$' ||
                 (c == '-' && i + 1 < text.size() &&
                  ((text[i + 1] >= '0' && text[i + 1] <= '9') || text[i + 1] == '$' ||
                   text[i + 1] == '.')) ||
                 (c == '.' && i + 1 < text.size() && text[i + 1] >= '0' && text[i + 1] <= '9');
    if (!start) continue;
    if (auto num = scan_number(text, i, opts)) {
      answer.value = num->value;
      answer.source = AnswerSource::hash_marker;
      answer.begin = num->begin;
      answer.end = num->end;
      return answer;
    }
  }
  return answer;
}

ExtractedAnswer extract_boxed(std::string_view text) {
  ExtractedAnswer answer;
  constexpr std::string_view kBoxed = "boxed{";
  std::size_t last = std::string_view::npos;
  for (std::size_t pos = text.find(kBoxed); pos != std::string_view::npos;
       pos = text.find(kBoxed, pos + 1)) {
    last = pos;
  }
  if (last == std::string_view::npos) return answer;
  std::size_t start = last + kBoxed.size();
  int depth = 0;
  std::size_t end = std::string_view::npos;
  for (std::size_t i = start; i < text.size(); ++i) {
    if (text[i] == '{') {
      ++depth;
    } else if (text[i] == '}') {
      if (depth == 0) {
        end = i;
        break;
      }
      --depth;
    }
  }
  if (end == std::string_view::npos) return answer;
  std::string content(text.substr(start, end - start));
  // Light LaTeX cleanup: surrounding $ and spacing macros.
  std::string cleaned;
  for (std::size_t i = 0; i < content.size(); ++i) {
    char c = content[i];
    if (c == '\\') {
      if (i + 1 < content.size() && (content[i + 1] == ',' || content[i + 1] == '!' ||
                                     content[i + 1] == ';' || content[i + 1] == ' ')) {
        ++i;
        continue;
      }
      continue;
    }
    if (c == '$' || c == ' ') continue;
    cleaned.push_back(c);
  }
  try {
    answer.value = normalize_number(cleaned);
    answer.source = AnswerSource::boxed;
    answer.begin = start;
    answer.end = end;
  } catch (const NotANumber&) {
    // Unparseable boxed content counts as no answer.
  }
  return answer;
}

}  // namespace

ExtractedAnswer extract_final_answer(std::string_view text, TaskStyle style) {
  return style == TaskStyle::hash_marker ? extract_after_hash(text) : extract_boxed(text);
}

Rational normalize_number(std::string_view token) {
  std::string_view t = token;
  while (!t.empty() && (t.front() == ' ' || t.front() == '\t' || t.front() == '\r' ||
                        t.front() == '\n')) {
    t.remove_prefix(1);
  }
  while (!t.empty() && (t.back() == ' ' || t.back() == '\t' || t.back() == '\r' ||
                        t.back() == '\n')) {
    t.remove_suffix(1);
  }
  // Trailing sentence punctuation is not part of the number. A final '.'
  // only ever drops here if nothing numeric follows it.
  while (!t.empty()) {
    char c = t.back();
    if (c == '.' || c == ',' || c == '!' || c == '?' || c == ';' || c == ':' || c == ')' ||
        c == '"' || c == '\'') {
      t.remove_suffix(1);
    } else {
      break;
    }
  }
  if (!t.empty() && t.front() == '+') t.remove_prefix(1);
  if (t.empty()) throw NotANumber(std::string(token));
  auto num = scan_number(t, 0);
  if (!num || num->end != t.size()) throw NotANumber(std::string(token));
  return num->value;
}

}  // namespace stepverify
