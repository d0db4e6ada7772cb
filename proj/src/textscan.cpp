#include "stepverify/textscan.hpp"

#include <array>
#include <cctype>
#include <unordered_set>

namespace stepverify {

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
char lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

// UTF-8 '×' (C3 97) and '÷' (C3 B7).
bool is_times_sign(std::string_view s, std::size_t i) {
  return i + 1 < s.size() && static_cast<unsigned char>(s[i]) == 0xC3 &&
         static_cast<unsigned char>(s[i + 1]) == 0x97;
}
bool is_divide_sign(std::string_view s, std::size_t i) {
  return i + 1 < s.size() && static_cast<unsigned char>(s[i]) == 0xC3 &&
         static_cast<unsigned char>(s[i + 1]) == 0xB7;
}

BigInt pow10(std::size_t n) {
  BigInt v = 1;
  for (std::size_t i = 0; i < n; ++i) v *= 10;
  return v;
}

}  // namespace

std::optional<NumberToken> scan_number(std::string_view text, std::size_t pos,
                                       const NumberScanOptions& options) {
  std::size_t i = pos;
  const std::size_t n = text.size();
  NumberToken token;
  token.begin = pos;

  bool negative = false;
  if (options.allow_sign && i < n && text[i] == '-') {
    negative = true;
    ++i;
  }
  if (options.allow_currency && i < n && text[i] == '$') {
    token.currency = true;
    ++i;
    // "$-5" also reads as negative five dollars.
    if (options.allow_sign && !negative && i < n && text[i] == '-') {
      negative = true;
      ++i;
    }
  }

  std::string digits;
  std::size_t first_group = 0;
  while (i < n && is_digit(text[i])) {
    digits.push_back(text[i]);
    ++i;
    ++first_group;
  }
  // Thousands separators: the first group must be 1-3 digits and every comma
  // must be followed by exactly three.
  if (!digits.empty() && first_group <= 3) {
    while (i + 3 < n && text[i] == ',' && is_digit(text[i + 1]) && is_digit(text[i + 2]) &&
           is_digit(text[i + 3]) && (i + 4 >= n || !is_digit(text[i + 4]))) {
      digits.append(text.substr(i + 1, 3));
      i += 4;
    }
  }

  std::string frac_digits;
  if (i < n && text[i] == '.' && i + 1 < n && is_digit(text[i + 1])) {
    ++i;
    while (i < n && is_digit(text[i])) {
      frac_digits.push_back(text[i]);
      ++i;
    }
  }

  if (digits.empty() && frac_digits.empty()) return std::nullopt;

  Rational value;
  if (frac_digits.empty()) {
    value = Rational(BigInt(digits));
  } else {
    BigInt scale = pow10(frac_digits.size());
    BigInt whole = digits.empty() ? BigInt(0) : BigInt(digits);
    value = Rational(whole * scale + BigInt(frac_digits), scale);
  }

  // Tight a/b fraction: integer numerator, nonzero integer denominator, no
  // spaces around the slash.
  if (options.allow_fraction && frac_digits.empty() && !digits.empty() && i < n &&
      text[i] == '/' && i + 1 < n && is_digit(text[i + 1])) {
    std::size_t j = i + 1;
    std::string den;
    while (j < n && is_digit(text[j])) {
      den.push_back(text[j]);
      ++j;
    }
    BigInt d(den);
    if (d != 0) {
      value /= Rational(d);
      token.fraction = true;
      i = j;
    }
  }

  if (options.allow_percent && i < n && text[i] == '%') {
    token.percent = true;
    value /= 100;
    ++i;
  }

  if (negative) value = -value;
  token.value = value;
  token.end = i;
  return token;
}

std::vector<Token> lex_step(std::string_view step, bool fractions_as_numbers) {
  std::vector<Token> tokens;
  NumberScanOptions opts;
  opts.allow_sign = false;  // sign decided here, not in scan_number
  opts.allow_fraction = fractions_as_numbers;

  auto sign_context = [&]() {
    if (tokens.empty()) return true;
    const Token& prev = tokens.back();
    return prev.kind == TokenKind::op || prev.kind == TokenKind::equals ||
           prev.kind == TokenKind::open_paren;
  };

  std::size_t i = 0;
  const std::size_t n = step.size();
  while (i < n) {
    char c = step[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      ++i;
      continue;
    }

    auto push_op = [&](char op, std::size_t width) {
      Token t;
      t.kind = TokenKind::op;
      t.op = op;
      t.begin = i;
      t.end = i + width;
      tokens.push_back(t);
      i += width;
    };

    if (is_digit(c) || (c == '.' && i + 1 < n && is_digit(step[i + 1])) ||
        (c == '$' && i + 1 < n && (is_digit(step[i + 1]) || step[i + 1] == '-' || step[i + 1] == '.'))) {
      NumberScanOptions local = opts;
      local.allow_sign = (c == '$');  // let "$-5" through
      if (auto num = scan_number(step, i, local)) {
        Token t;
        t.kind = TokenKind::number;
        t.number = *num;
        t.begin = num->begin;
        t.end = num->end;
        tokens.push_back(t);
        i = num->end;
        continue;
      }
      // "$-x" with no digits: emit the '$' as noise and move on.
      Token t;
      t.kind = TokenKind::other;
      t.begin = i;
      t.end = i + 1;
      tokens.push_back(t);
      ++i;
      continue;
    }

    if (c == '-') {
      if (sign_context()) {
        NumberScanOptions local = opts;
        local.allow_sign = true;
        if (auto num = scan_number(step, i, local)) {
          Token t;
          t.kind = TokenKind::number;
          t.number = *num;
          t.begin = num->begin;
          t.end = num->end;
          tokens.push_back(t);
          i = num->end;
          continue;
        }
      }
      push_op('-', 1);
      continue;
    }
    if (c == '+') {
      push_op('+', 1);
      continue;
    }
    if (c == '*') {
      push_op('*', 1);
      continue;
    }
    if (c == '/') {
      push_op('/', 1);
      continue;
    }
    if (is_times_sign(step, i)) {
      push_op('*', 2);
      continue;
    }
    if (is_divide_sign(step, i)) {
      push_op('/', 2);
      continue;
    }
    if (c == '=') {
      Token t;
      t.kind = TokenKind::equals;
      t.begin = i;
      t.end = i + 1;
      tokens.push_back(t);
      ++i;
      continue;
    }
    if (c == '(') {
      Token t;
      t.kind = TokenKind::open_paren;
      t.begin = i;
      t.end = i + 1;
      tokens.push_back(t);
      ++i;
      continue;
    }
    if (c == ')') {
      Token t;
      t.kind = TokenKind::close_paren;
      t.begin = i;
      t.end = i + 1;
      tokens.push_back(t);
      ++i;
      continue;
    }
    if (is_alpha(c)) {
      Token t;
      t.kind = TokenKind::word;
      t.begin = i;
      while (i < n && is_alpha(step[i])) {
        t.word.push_back(lower(step[i]));
        ++i;
      }
      t.end = i;
      tokens.push_back(t);
      continue;
    }

    Token t;
    t.kind = TokenKind::other;
    t.begin = i;
    t.end = i + 1;
    tokens.push_back(t);
    ++i;
  }
  return tokens;
}

bool is_count_noun(std::string_view noun, const std::vector<std::string>& extra) {
  static const std::unordered_set<std::string_view> kLexicon = {
      "person",  "people",   "child",    "children", "student",  "students", "boy",
      "boys",    "girl",     "girls",    "man",      "men",      "woman",    "women",
      "friend",  "friends",  "teacher",  "teachers", "worker",   "workers",  "apple",
      "apples",  "orange",   "oranges",  "egg",      "eggs",     "cookie",   "cookies",
      "candy",   "candies",  "book",     "books",    "page",     "pages",    "pencil",
      "pencils", "pen",      "pens",     "coin",     "coins",    "marble",   "marbles",
      "ball",    "balls",    "toy",      "toys",     "sticker",  "stickers", "card",
      "cards",   "item",     "items",    "box",      "boxes",    "bag",      "bags",
      "car",     "cars",     "wheel",    "wheels",   "bike",     "bikes",    "tree",
      "trees",   "flower",   "flowers",  "bird",     "birds",    "dog",      "dogs",
      "cat",     "cats",     "cow",      "cows",     "chicken",  "chickens", "sheep",
      "fish",    "house",    "houses",   "room",     "rooms",    "window",   "windows",
      "door",    "doors",    "chair",    "chairs",   "table",    "tables",   "shelf",
      "shelves", "seat",     "seats",    "ticket",   "tickets",  "cup",      "cups",
      "plate",   "plates",   "slice",    "slices",   "piece",    "pieces",   "step",
      "steps",
  };
  if (kLexicon.contains(noun)) return true;
  for (const auto& word : extra) {
    if (noun == word) return true;
  }
  return false;
}

}  // namespace stepverify
