#pragma once

#include "stepverify/rational.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace stepverify {

enum class ArithOp { add, sub, mul, div };

std::string_view arith_op_name(ArithOp op);
char arith_op_symbol(ArithOp op);

// One extracted claim "A op B = C". Chains folded in relaxed mode put the
// running value in operand_a, so the type stays binary.
struct ArithExpression {
  Rational operand_a;
  ArithOp op = ArithOp::add;
  Rational operand_b;
  Rational claimed_result;
  int step_index = 1;       // 1-based
  std::size_t begin = 0;    // [begin, end) within the step's text
  std::size_t end = 0;
};

enum class ParseMode { standard, relaxed };

// A claim whose evaluation would divide by zero ("5 / 0 = 0"). Never emitted
// as an expression; it still counts as one incorrect expression in the
// arithmetic rate.
struct DivZeroClaim {
  int step_index = 1;
  std::size_t begin = 0;
  std::size_t end = 0;
  std::string text;
};

struct ExtractionResult {
  std::vector<ArithExpression> expressions;
  std::vector<DivZeroClaim> div_zero_claims;
};

// Standard mode matches "<number> <op> <number> = <number>" with bare
// numerals and op in {+, -, *, ×, /, ÷}. Relaxed mode additionally matches
// currency/percent-decorated operands, left-associative chains, "P% of X = Y"
// and natural-language equality ("A plus B equals C"). Relaxed output is a
// superset of standard output by construction: the standard pass runs first
// and relaxed patterns only scan the leftover tokens.
ExtractionResult extract_expressions_full(std::span<const std::string> steps, ParseMode mode);

std::vector<ArithExpression> extract_expressions(std::span<const std::string> steps,
                                                 ParseMode mode);

// Exact value of operand_a op operand_b. Throws DivisionByZero when the
// precondition (op != div or operand_b != 0) is bypassed.
Rational evaluate_lhs(const ArithExpression& expr);

// Parser-coverage summary over per-solution expression counts.
struct ExpressionCoverage {
  std::size_t total_solutions = 0;
  double with_expression_fraction = 0.0;
  double zero_expression_fraction = 0.0;
  double mean_expressions = 0.0;
};

ExpressionCoverage expression_counts(std::span<const std::size_t> per_solution_counts);

}  // namespace stepverify
