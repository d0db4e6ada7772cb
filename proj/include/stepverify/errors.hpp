#pragma once

#include <stdexcept>
#include <string>

namespace stepverify {

// Base for everything thrown by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Problems caused by the caller's input (bad files, malformed records,
// inconsistent corpora). The CLI maps these to exit code 2.
struct InputError : Error {
  using Error::Error;
};

struct MalformedRecord : InputError {
  MalformedRecord(const std::string& path, std::size_t line, const std::string& what)
      : InputError("malformed record at " + path + ":" + std::to_string(line) + ": " + what),
        line_number(line) {}
  std::size_t line_number;
};

struct DuplicateId : InputError {
  explicit DuplicateId(const std::string& id)
      : InputError("duplicate problem id \"" + id + "\""), id(id) {}
  std::string id;
};

struct UnparseableAnswer : InputError {
  explicit UnparseableAnswer(const std::string& id)
      : InputError("gold answer for problem \"" + id + "\" does not parse as a number"), id(id) {}
  std::string id;
};

struct DuplicateSample : InputError {
  DuplicateSample(const std::string& problem_id, int sample_index)
      : InputError("duplicate candidate (" + problem_id + ", " + std::to_string(sample_index) + ")"),
        problem_id(problem_id),
        sample_index(sample_index) {}
  std::string problem_id;
  int sample_index;
};

struct NotANumber : InputError {
  explicit NotANumber(const std::string& token)
      : InputError("not a number: \"" + token + "\""), token(token) {}
  std::string token;
};

struct DivisionByZero : Error {
  DivisionByZero() : Error("division by zero") {}
};

struct EmptyCorpus : InputError {
  EmptyCorpus() : InputError("corpus is empty") {}
};

struct MissingReport : InputError {
  MissingReport(const std::string& problem_id, int sample_index)
      : InputError("no verification report for (" + problem_id + ", " +
                   std::to_string(sample_index) + ")") {}
};

struct EmptyProblem : InputError {
  explicit EmptyProblem(const std::string& problem_id)
      : InputError("problem \"" + problem_id + "\" has no candidates"), problem_id(problem_id) {}
  std::string problem_id;
};

struct ProblemMismatch : InputError {
  ProblemMismatch(const std::string& candidate_pid, const std::string& problem_id)
      : InputError("candidate references problem \"" + candidate_pid +
                   "\" but was verified against \"" + problem_id + "\"") {}
};

struct DomainError : InputError {
  using InputError::InputError;
};

struct TooFewSolutions : InputError {
  TooFewSolutions() : InputError("diversity sample needs at least 2 solutions") {}
};

struct NoCorrectAnswers : InputError {
  NoCorrectAnswers() : InputError("no correct-answer candidates in corpus") {}
};

struct MissingCandidateFile : InputError {
  explicit MissingCandidateFile(int iteration, const std::string& path)
      : InputError("no candidate file for iteration " + std::to_string(iteration) + " (" + path + ")"),
        iteration(iteration) {}
  int iteration;
};

struct IoError : InputError {
  explicit IoError(const std::string& path, const std::string& what)
      : InputError(what + ": " + path) {}
};

}  // namespace stepverify
