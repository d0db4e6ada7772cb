#include "stepverify/expr.hpp"

#include "stepverify/errors.hpp"
#include "stepverify/textscan.hpp"

#include <algorithm>
#include <optional>

namespace stepverify {

std::string_view arith_op_name(ArithOp op) {
  switch (op) {
    case ArithOp::add: return "add";
    case ArithOp::sub: return "sub";
    case ArithOp::mul: return "mul";
    case ArithOp::div: return "div";
  }
  return "add";
}

char arith_op_symbol(ArithOp op) {
  switch (op) {
    case ArithOp::add: return '+';
    case ArithOp::sub: return '-';
    case ArithOp::mul: return '*';
    case ArithOp::div: return '/';
  }
  return '+';
}

Rational evaluate_lhs(const ArithExpression& expr) {
  switch (expr.op) {
    case ArithOp::add: return expr.operand_a + expr.operand_b;
    case ArithOp::sub: return expr.operand_a - expr.operand_b;
    case ArithOp::mul: return expr.operand_a * expr.operand_b;
    case ArithOp::div:
      if (expr.operand_b == 0) throw DivisionByZero();
      return expr.operand_a / expr.operand_b;
  }
  throw DivisionByZero();  // unreachable
}

namespace {

ArithOp op_from_symbol(char c) {
  switch (c) {
    case '+': return ArithOp::add;
    case '-': return ArithOp::sub;
    case '*': return ArithOp::mul;
    default: return ArithOp::div;
  }
}

bool plain_number(const Token& t) {
  return t.kind == TokenKind::number && !t.number.currency && !t.number.percent &&
         !t.number.fraction;
}

bool any_number(const Token& t) { return t.kind == TokenKind::number; }

std::optional<ArithOp> word_op(const std::vector<Token>& toks, std::size_t i,
                               std::size_t* width) {
  if (toks[i].kind != TokenKind::word) return std::nullopt;
  const std::string& w = toks[i].word;
  *width = 1;
  if (w == "plus") return ArithOp::add;
  if (w == "minus") return ArithOp::sub;
  if (w == "times") return ArithOp::mul;
  if (w == "divided" && i + 1 < toks.size() && toks[i + 1].kind == TokenKind::word &&
      toks[i + 1].word == "by") {
    *width = 2;
    return ArithOp::div;
  }
  return std::nullopt;
}

bool equality_token(const Token& t) {
  return t.kind == TokenKind::equals ||
         (t.kind == TokenKind::word && (t.word == "equals" || t.word == "is"));
}

struct Matcher {
  const std::vector<Token>& toks;
  const std::string& step;
  int step_index;
  std::vector<bool>& consumed;
  ExtractionResult& out;

  bool free_range(std::size_t first, std::size_t last) const {
    for (std::size_t k = first; k <= last; ++k) {
      if (consumed[k]) return false;
    }
    return true;
  }

  void take(std::size_t first, std::size_t last) {
    for (std::size_t k = first; k <= last; ++k) consumed[k] = true;
  }

  void emit(const Rational& a, ArithOp op, const Rational& b, const Rational& claimed,
            std::size_t first, std::size_t last) {
    if (op == ArithOp::div && b == 0) {
      DivZeroClaim claim;
      claim.step_index = step_index;
      claim.begin = toks[first].begin;
      claim.end = toks[last].end;
      claim.text = step.substr(claim.begin, claim.end - claim.begin);
      out.div_zero_claims.push_back(std::move(claim));
    } else {
      ArithExpression e;
      e.operand_a = a;
      e.op = op;
      e.operand_b = b;
      e.claimed_result = claimed;
      e.step_index = step_index;
      e.begin = toks[first].begin;
      e.end = toks[last].end;
      out.expressions.push_back(std::move(e));
    }
    take(first, last);
  }

  // Symbol claims: number (op number)+ '=' number. Standard mode emits only
  // single-op claims with bare numerals and skips over chains whole, so a
  // chain never leaks sub-claims. Relaxed mode folds chains left to right.
  // Returns the index to continue scanning from, or nullopt if no claim
  // shape starts at i.
  std::optional<std::size_t> try_symbol_claim(std::size_t i, bool relaxed) {
    auto usable = [&](const Token& t) { return relaxed ? any_number(t) : plain_number(t); };
    if (i >= toks.size() || !usable(toks[i])) return std::nullopt;
    std::size_t j = i;
    std::size_t ops = 0;
    while (j + 2 < toks.size() && toks[j + 1].kind == TokenKind::op && usable(toks[j + 2])) {
      j += 2;
      ++ops;
    }
    if (ops == 0) return std::nullopt;
    // Equality tail: '=' always; "equals"/"is" only in relaxed mode.
    std::size_t eq = j + 1;
    bool has_eq = eq + 1 < toks.size() &&
                  (toks[eq].kind == TokenKind::equals || (relaxed && equality_token(toks[eq]))) &&
                  usable(toks[eq + 1]);
    if (!has_eq) return std::nullopt;
    std::size_t last = eq + 1;
    if (!free_range(i, last)) return std::nullopt;

    if (ops == 1) {
      emit(toks[i].number.value, op_from_symbol(toks[i + 1].op), toks[i + 2].number.value,
           toks[last].number.value, i, last);
      return last + 1;
    }
    if (!relaxed) return last + 1;  // chain: standard skips it whole

    // Fold all but the final operand; the expression keeps the last op binary.
    Rational acc = toks[i].number.value;
    bool dead = false;
    for (std::size_t k = i + 1; k + 1 < j; k += 2) {
      ArithOp op = op_from_symbol(toks[k].op);
      const Rational& rhs = toks[k + 1].number.value;
      if (op == ArithOp::div && rhs == 0) {
        dead = true;
        break;
      }
      switch (op) {
        case ArithOp::add: acc += rhs; break;
        case ArithOp::sub: acc -= rhs; break;
        case ArithOp::mul: acc *= rhs; break;
        case ArithOp::div: acc /= rhs; break;
      }
    }
    if (dead) {
      DivZeroClaim claim;
      claim.step_index = step_index;
      claim.begin = toks[i].begin;
      claim.end = toks[last].end;
      claim.text = step.substr(claim.begin, claim.end - claim.begin);
      out.div_zero_claims.push_back(std::move(claim));
      take(i, last);
    } else {
      emit(acc, op_from_symbol(toks[j - 1].op), toks[j].number.value, toks[last].number.value,
           i, last);
    }
    return last + 1;
  }

  // "P% of X = Y" read as X * (P/100) = Y; the lexer already divided P by 100.
  std::optional<std::size_t> try_percent_of(std::size_t i) {
    if (i + 4 >= toks.size()) return std::nullopt;
    if (toks[i].kind != TokenKind::number || !toks[i].number.percent) return std::nullopt;
    if (toks[i + 1].kind != TokenKind::word || toks[i + 1].word != "of") return std::nullopt;
    if (!any_number(toks[i + 2])) return std::nullopt;
    if (!equality_token(toks[i + 3])) return std::nullopt;
    if (!any_number(toks[i + 4])) return std::nullopt;
    if (!free_range(i, i + 4)) return std::nullopt;
    emit(toks[i + 2].number.value, ArithOp::mul, toks[i].number.value,
         toks[i + 4].number.value, i, i + 4);
    return i + 5;
  }

  // "A plus/minus/times/divided by B equals/is C" (binary only).
  std::optional<std::size_t> try_word_claim(std::size_t i) {
    if (i >= toks.size() || !any_number(toks[i])) return std::nullopt;
    std::size_t width = 0;
    if (i + 1 >= toks.size()) return std::nullopt;
    auto op = word_op(toks, i + 1, &width);
    if (!op) return std::nullopt;
    std::size_t b = i + 1 + width;
    if (b + 1 >= toks.size()) return std::nullopt;
    if (!any_number(toks[b]) || !equality_token(toks[b + 1]) || b + 2 >= toks.size() ||
        !any_number(toks[b + 2])) {
      return std::nullopt;
    }
    if (!free_range(i, b + 2)) return std::nullopt;
    emit(toks[i].number.value, *op, toks[b].number.value, toks[b + 2].number.value, i, b + 2);
    return b + 3;
  }
};

}  // namespace

ExtractionResult extract_expressions_full(std::span<const std::string> steps, ParseMode mode) {
  ExtractionResult out;
  for (std::size_t s = 0; s < steps.size(); ++s) {
    const std::string& step = steps[s];
    // '/' is the division operator in expression context, never a fraction.
    std::vector<Token> toks = lex_step(step, /*fractions_as_numbers=*/false);
    std::vector<bool> consumed(toks.size(), false);
    std::size_t before = out.expressions.size();
    Matcher m{toks, step, static_cast<int>(s) + 1, consumed, out};

    // Pass 1: the standard grammar. Runs identically in both modes so relaxed
    // output always contains the standard claims.
    std::size_t i = 0;
    while (i < toks.size()) {
      if (auto next = m.try_symbol_claim(i, /*relaxed=*/false)) {
        i = *next;
      } else {
        ++i;
      }
    }

    if (mode == ParseMode::relaxed) {
      i = 0;
      while (i < toks.size()) {
        if (consumed[i]) {
          ++i;
          continue;
        }
        if (auto next = m.try_percent_of(i)) {
          i = *next;
          continue;
        }
        if (auto next = m.try_symbol_claim(i, /*relaxed=*/true)) {
          i = *next;
          continue;
        }
        if (auto next = m.try_word_claim(i)) {
          i = *next;
          continue;
        }
        ++i;
      }
      // Reading order within the step.
      std::sort(out.expressions.begin() + static_cast<std::ptrdiff_t>(before),
                out.expressions.end(),
                [](const ArithExpression& a, const ArithExpression& b) { return a.begin < b.begin; });
    }
  }
  return out;
}

std::vector<ArithExpression> extract_expressions(std::span<const std::string> steps,
                                                 ParseMode mode) {
  return extract_expressions_full(steps, mode).expressions;
}

ExpressionCoverage expression_counts(std::span<const std::size_t> per_solution_counts) {
  if (per_solution_counts.empty()) throw EmptyCorpus();
  ExpressionCoverage cov;
  cov.total_solutions = per_solution_counts.size();
  std::size_t with = 0;
  std::size_t total = 0;
  for (std::size_t c : per_solution_counts) {
    if (c > 0) ++with;
    total += c;
  }
  cov.with_expression_fraction = static_cast<double>(with) / static_cast<double>(cov.total_solutions);
  cov.zero_expression_fraction = 1.0 - cov.with_expression_fraction;
  cov.mean_expressions = static_cast<double>(total) / static_cast<double>(cov.total_solutions);
  return cov;
}

}  // namespace stepverify
