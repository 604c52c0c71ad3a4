#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bugchat/text/lexicon.hpp"

namespace bugchat::text {

/// Sentence shapes recognized by the rule-based classifier, listed here in
/// no particular order; see `classify_sentence` for precedence.
enum class SentenceType {
  kImperative,
  kDeclarativePresent,
  kDeclarativePast,
  kPassive,
  kConditional,
  kModalExpectation,
  kNegativeDeclarative,
  kFragment,
};

std::string_view to_string(SentenceType type);

/// `[subject] [action] [object] [preposition] [object2]`, all tokens
/// normalized. `action` is the verb's base form.
struct ParsedPhrase {
  SentenceType sentence_type = SentenceType::kFragment;
  std::vector<std::string> subject;
  std::string action;
  std::vector<std::string> object;
  std::optional<std::string> preposition;
  std::vector<std::string> object2;
  bool negated = false;
  std::string raw_text;
  // Extraction routine that produced the fields; always equals
  // `sentence_type`. Exposed for debugging and tests.
  SentenceType extraction_branch = SentenceType::kFragment;

  /// subject + object + object2 tokens, in that order.
  std::vector<std::string> content_tokens() const;

  bool operator==(const ParsedPhrase&) const = default;
};

class SentenceParser {
 public:
  explicit SentenceParser(const Lexicon& lexicon = Lexicon::builtin())
      : lexicon_(&lexicon) {}

  /// Precedence: CONDITIONAL > MODAL_EXPECTATION > PASSIVE >
  /// NEGATIVE_DECLARATIVE > IMPERATIVE > DECLARATIVE_PAST >
  /// DECLARATIVE_PRESENT > FRAGMENT. Throws kEmptyInput on blank text.
  SentenceType classify(std::string_view text) const;

  /// Never fails on non-blank text; FRAGMENT is the fallback.
  ParsedPhrase parse(std::string_view text) const;

  /// Splits on sentence punctuation and parses each non-blank sentence.
  std::vector<ParsedPhrase> parse_message(std::string_view text) const;

  const Lexicon& lexicon() const { return *lexicon_; }

 private:
  const Lexicon* lexicon_;
};

SentenceType classify_sentence(std::string_view text);
ParsedPhrase parse(std::string_view text);

/// Splits on ".", "!", "?" and ";". A "." between two digits is kept.
std::vector<std::string> split_sentences(std::string_view text);

}  // namespace bugchat::text
