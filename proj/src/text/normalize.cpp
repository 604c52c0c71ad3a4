#include "bugchat/text/normalize.hpp"

#include <array>
#include <cctype>

namespace bugchat::text {
namespace {

struct SuffixRule {
  std::string_view suffix;
  std::string_view replacement;
  std::size_t min_stem;
};

constexpr std::array<SuffixRule, 6> kRules{{
    {"ing", "", 3},
    {"ied", "y", 0},
    {"ies", "y", 0},
    {"es", "", 3},
    {"ed", "", 3},
    {"s", "", 3},
}};

bool is_alnum(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

bool apply_first_rule(std::string& word) {
  for (const auto& rule : kRules) {
    if (word.size() <= rule.suffix.size()) continue;
    if (!word.ends_with(rule.suffix)) continue;
    std::size_t stem = word.size() - rule.suffix.size();
    if (stem < rule.min_stem) continue;
    word.resize(stem);
    word += rule.replacement;
    return true;
  }
  return false;
}

}  // namespace

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

std::string join(const std::vector<std::string>& tokens,
                 std::string_view separator) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += separator;
    out += tokens[i];
  }
  return out;
}

std::string lemmatize(std::string_view word) {
  std::string out(word);
  while (apply_first_rule(out)) {
  }
  return out;
}

std::string split_identifier(std::string_view identifier) {
  std::string out;
  for (std::size_t i = 0; i < identifier.size(); ++i) {
    char c = identifier[i];
    if (c == '_') {
      out += ' ';
      continue;
    }
    bool upper = std::isupper(static_cast<unsigned char>(c)) != 0;
    if (upper && i > 0) {
      char prev = identifier[i - 1];
      bool prev_lower_or_digit =
          std::islower(static_cast<unsigned char>(prev)) ||
          std::isdigit(static_cast<unsigned char>(prev));
      bool prev_upper = std::isupper(static_cast<unsigned char>(prev)) != 0;
      bool next_lower = i + 1 < identifier.size() &&
                        std::islower(static_cast<unsigned char>(identifier[i + 1]));
      if (prev_lower_or_digit || (prev_upper && next_lower)) out += ' ';
    }
    out += c;
  }
  return out;
}

std::vector<std::string> normalize_tokens(std::string_view text,
                                          const Lexicon& lexicon) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (current.empty()) return;
    std::string word = to_lower(current);
    current.clear();
    if (lexicon.is_stopword(word)) return;
    std::string lemma = lemmatize(word);
    if (lemma.empty() || lexicon.is_stopword(lemma)) return;
    tokens.push_back(std::move(lemma));
  };
  for (char c : text) {
    if (is_alnum(c)) {
      current += c;
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

}  // namespace bugchat::text
