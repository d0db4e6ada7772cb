#pragma once

#include "stepverify/jsonl.hpp"
#include "stepverify/rational.hpp"

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace stepverify {

// A task instance: (x_j, a_j). Unknown record fields are kept in `extras`
// and written back on save.
struct Problem {
  std::string id;
  std::string question;
  Rational gold_answer;
  Json extras = Json::object();
};

// One sampled solution y_j^(k). `steps` is derived from `text` at load time.
struct Candidate {
  std::string problem_id;
  int sample_index = 0;
  std::string text;
  std::vector<std::string> steps;
  Json extras = Json::object();
};

enum class AnswerSource { hash_marker, boxed, none };

std::string_view answer_source_name(AnswerSource source);

struct ExtractedAnswer {
  std::optional<Rational> value;
  AnswerSource source = AnswerSource::none;
  std::size_t begin = 0;  // character span of the numeric token in the text
  std::size_t end = 0;
};

enum class TaskStyle { hash_marker, boxed };

// --- file I/O -------------------------------------------------------------

std::vector<Problem> load_problems(const std::filesystem::path& path);
std::vector<Candidate> load_candidates(const std::filesystem::path& path);
void write_problems(const std::filesystem::path& path, std::span<const Problem> problems);
void write_candidates(const std::filesystem::path& path, std::span<const Candidate> candidates);

// Every candidate must reference a known problem. Throws InputError on a
// dangling problem_id.
void validate_corpus(std::span<const Problem> problems, std::span<const Candidate> candidates);

// --- text operations -------------------------------------------------------

// Splits on newlines first, then on sentence terminators (. ! ?) followed by
// whitespace. If the text carries a <think>...</think> segment, steps come
// from inside it plus any trailing text.
std::vector<std::string> segment_steps(std::string_view text);

// hash_marker: first number after the LAST "####". boxed: content of the
// last boxed{...} group. Absence (or unparseable content) is source=none,
// never an error, so downstream checks can count it as incorrect.
ExtractedAnswer extract_final_answer(std::string_view text, TaskStyle style);

// Strips currency symbols, thousands separators and percent signs (percent
// divides by 100) plus trailing punctuation; parses integers, decimals and
// a/b fractions exactly. Throws NotANumber.
Rational normalize_number(std::string_view token);

}  // namespace stepverify
