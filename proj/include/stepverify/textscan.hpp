#pragma once

#include "stepverify/rational.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace stepverify {

// One numeric token as written in text. The value is already normalized:
// separators removed, currency stripped, percent divided by 100, a/b
// fractions reduced.
struct NumberToken {
  Rational value;
  std::size_t begin = 0;  // [begin, end) in the scanned text
  std::size_t end = 0;
  bool currency = false;  // written with a currency symbol
  bool percent = false;   // written with a trailing %
  bool fraction = false;  // written as a/b
};

struct NumberScanOptions {
  bool allow_sign = true;
  bool allow_currency = true;
  bool allow_percent = true;
  // Tight "a/b" consumed as one number. Off in expression context, where
  // '/' is always the division operator.
  bool allow_fraction = true;
};

// Scans a single numeric token starting exactly at pos ('-', '$', '.', or a
// digit). Thousands separators must group as d{1,3}(,ddd)* or the comma is
// left unconsumed.
std::optional<NumberToken> scan_number(std::string_view text, std::size_t pos,
                                       const NumberScanOptions& options = {});

enum class TokenKind { number, op, equals, word, open_paren, close_paren, other };

struct Token {
  TokenKind kind = TokenKind::other;
  char op = 0;  // '+', '-', '*', '/' ('×' and '÷' map to '*' and '/')
  NumberToken number;
  std::string word;  // lowercased
  std::size_t begin = 0;
  std::size_t end = 0;
};

// Lexes one reasoning step. A '-' is part of the following number only when
// the previous token is step start, '(', '=', or an operator; otherwise it
// is the subtraction operator.
std::vector<Token> lex_step(std::string_view step, bool fractions_as_numbers);

// Built-in count-noun lexicon for the constraint check (singular and plural
// listed separately; money nouns deliberately absent). `extra` is the config
// extension hook. Matching is on the lowercased final token of a name.
bool is_count_noun(std::string_view noun, const std::vector<std::string>& extra);

}  // namespace stepverify
