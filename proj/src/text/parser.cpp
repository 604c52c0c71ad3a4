#include "bugchat/text/parser.hpp"

#include <algorithm>
#include <cctype>

#include "bugchat/errors.hpp"
#include "bugchat/text/normalize.hpp"

namespace bugchat::text {
namespace {

struct Word {
  std::string surface;
  std::string lower;
  std::size_t begin = 0;  // byte offsets into the sentence
  std::size_t end = 0;
};

using Words = std::vector<Word>;

struct VerbInfo {
  std::string base;
  VerbTense tense = VerbTense::kBase;
  bool participle = false;
  bool auxiliary = false;
};

// Verb group found in a sentence: `head` is the first (possibly auxiliary)
// verb, `main` the lexical verb carrying the action.
struct VerbSlot {
  std::size_t head = 0;
  std::size_t main = 0;
  std::string base;
  bool past = false;
};

const std::set<std::string>& adverbs() {
  static const std::set<std::string> words = {
      "not", "also", "still", "always", "just",    "even",
      "really", "never", "ever", "already", "suddenly", "then"};
  return words;
}

const std::set<std::string>& contraction_subjects() {
  static const std::set<std::string> words = {
      "it", "that", "there", "what", "here", "he", "she", "who"};
  return words;
}

bool is_alnum(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isspace(static_cast<unsigned char>(c)) != 0;
  });
}

std::string replace_curly_quotes(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    // U+2018 / U+2019 in UTF-8.
    if (i + 2 < text.size() && static_cast<unsigned char>(text[i]) == 0xE2 &&
        static_cast<unsigned char>(text[i + 1]) == 0x80 &&
        (static_cast<unsigned char>(text[i + 2]) == 0x98 ||
         static_cast<unsigned char>(text[i + 2]) == 0x99)) {
      // Pad to keep byte offsets aligned with the original text.
      out += "  '";
      i += 2;
      continue;
    }
    out += text[i];
  }
  return out;
}

void push_word(Words& words, const Lexicon& lexicon, std::string surface,
               std::size_t begin, std::size_t end) {
  std::string lower = to_lower(surface);
  auto add = [&](std::string s, std::string l) {
    words.push_back(Word{std::move(s), std::move(l), begin, end});
  };
  if (lexicon.is_negation(lower) || lower.find('\'') == std::string::npos) {
    add(std::move(surface), std::move(lower));
    return;
  }
  static const std::vector<std::pair<std::string, std::string>> suffixes = {
      {"'m", "am"}, {"'re", "are"}, {"'ve", "have"}, {"'ll", "will"},
      {"'d", "would"}};
  if (lower.ends_with("'s")) {
    std::string stem_lower = lower.substr(0, lower.size() - 2);
    std::string stem = surface.substr(0, surface.size() - 2);
    if (contraction_subjects().count(stem_lower)) {
      add(stem, stem_lower);
      add("is", "is");
    } else {
      add(stem, stem_lower);
    }
    return;
  }
  for (const auto& [suffix, expansion] : suffixes) {
    if (lower.ends_with(suffix) && lower.size() > suffix.size()) {
      std::size_t n = lower.size() - suffix.size();
      add(surface.substr(0, n), lower.substr(0, n));
      add(expansion, expansion);
      return;
    }
  }
  add(std::move(surface), std::move(lower));
}

Words tokenize(std::string_view raw, const Lexicon& lexicon) {
  std::string text = replace_curly_quotes(raw);
  Words words;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_alnum(text[i])) {
      ++i;
      continue;
    }
    std::size_t begin = i;
    while (i < text.size()) {
      char c = text[i];
      if (is_alnum(c)) {
        ++i;
      } else if ((c == '\'' || c == '-') && i + 1 < text.size() &&
                 is_alnum(text[i + 1])) {
        ++i;
      } else {
        break;
      }
    }
    push_word(words, lexicon, text.substr(begin, i - begin), begin, i);
  }
  // "long press" -> "long-press", same for tap/click.
  Words merged;
  for (std::size_t k = 0; k < words.size(); ++k) {
    if (words[k].lower == "long" && k + 1 < words.size()) {
      const std::string& next = words[k + 1].lower;
      if (next.starts_with("press") || next.starts_with("tap") ||
          next.starts_with("click")) {
        Word w = words[k];
        w.surface += "-" + words[k + 1].surface;
        w.lower += "-" + next;
        w.end = words[k + 1].end;
        merged.push_back(std::move(w));
        ++k;
        continue;
      }
    }
    merged.push_back(words[k]);
  }
  return merged;
}

class Analyzer {
 public:
  explicit Analyzer(const Lexicon& lexicon) : lex_(lexicon) {}

  std::optional<VerbInfo> verb(const std::string& w) const {
    if (auto it = lex_.auxiliaries().find(w); it != lex_.auxiliaries().end()) {
      return VerbInfo{it->second.base, it->second.tense,
                      it->second.tense == VerbTense::kParticiple, true};
    }
    if (lex_.verbs().count(w)) return VerbInfo{w, VerbTense::kBase, false, false};
    if (auto it = lex_.irregular_forms().find(w);
        it != lex_.irregular_forms().end()) {
      VerbTense tense =
          it->second.past ? VerbTense::kPast : VerbTense::kParticiple;
      return VerbInfo{it->second.base, tense, it->second.participle, false};
    }
    if (auto base = strip(w, "ing", {"", "e"}, true)) {
      return VerbInfo{*base, VerbTense::kGerund, false, false};
    }
    if (w.ends_with("ied")) {
      if (auto base = known(w.substr(0, w.size() - 3) + "y")) {
        return VerbInfo{*base, VerbTense::kPast, true, false};
      }
    }
    if (auto base = strip(w, "ed", {"", "e"}, true)) {
      return VerbInfo{*base, VerbTense::kPast, true, false};
    }
    if (w.ends_with("ies")) {
      if (auto base = known(w.substr(0, w.size() - 3) + "y")) {
        return VerbInfo{*base, VerbTense::kPresent, false, false};
      }
    }
    if (auto base = strip(w, "es", {""}, false)) {
      return VerbInfo{*base, VerbTense::kPresent, false, false};
    }
    if (auto base = strip(w, "s", {""}, false)) {
      return VerbInfo{*base, VerbTense::kPresent, false, false};
    }
    return std::nullopt;
  }

  // A verb-looking word right after a determiner or preposition is read
  // as a noun ("the save button", "tap on save").
  bool noun_position(const Words& words, std::size_t i) const {
    if (i == 0) return false;
    const std::string& prev = words[i - 1].lower;
    return lex_.is_determiner(prev) || lex_.is_preposition(prev) ||
           prev == "of" || prev == "by";
  }

  std::optional<VerbSlot> find_main_verb(const Words& words,
                                         std::size_t from) const {
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t i = from; i < words.size(); ++i) {
        if (noun_position(words, i)) continue;
        auto info = verb(words[i].lower);
        if (!info) continue;
        bool inflected = info->auxiliary || info->tense != VerbTense::kBase;
        if (pass == 0 && !inflected) continue;
        return complete_slot(words, i, *info);
      }
    }
    return std::nullopt;
  }

  VerbSlot complete_slot(const Words& words, std::size_t head,
                         const VerbInfo& head_info) const {
    VerbSlot slot{head, head, head_info.base,
                  head_info.tense == VerbTense::kPast};
    if (!head_info.auxiliary) return slot;
    std::size_t j = head + 1;
    std::string last_aux_base = head_info.base;
    std::size_t last_aux = head;
    while (j < words.size()) {
      const std::string& w = words[j].lower;
      if (adverbs().count(w) || lex_.is_negation(w)) {
        ++j;
        continue;
      }
      auto info = verb(w);
      if (!info) break;
      if (info->auxiliary) {
        last_aux = j;
        last_aux_base = info->base;
        ++j;
        continue;
      }
      slot.main = j;
      slot.base = info->base;
      if (head_info.base == "have" && info->participle) slot.past = true;
      return slot;
    }
    slot.main = last_aux;
    slot.base = last_aux_base;
    return slot;
  }

  // Index pair (be-verb, participle) of a passive construction.
  std::optional<std::pair<std::size_t, std::size_t>> find_passive(
      const Words& words) const {
    for (std::size_t i = 0; i < words.size(); ++i) {
      auto aux = lex_.auxiliaries().find(words[i].lower);
      if (aux == lex_.auxiliaries().end() || aux->second.base != "be") continue;
      std::size_t j = i + 1;
      while (j < words.size() &&
             (adverbs().count(words[j].lower) || lex_.is_negation(words[j].lower))) {
        ++j;
      }
      if (j >= words.size()) continue;
      auto info = verb(words[j].lower);
      if (info && !info->auxiliary && info->participle) return std::pair{i, j};
    }
    return std::nullopt;
  }

  std::size_t skip_lead(const Words& words, std::size_t from = 0) const {
    while (from < words.size() && lex_.lead_words().count(words[from].lower)) {
      ++from;
    }
    return from;
  }

  bool imperative_at(const Words& words, std::size_t i) const {
    if (i >= words.size()) return false;
    auto info = verb(words[i].lower);
    return info && !info->auxiliary && info->tense == VerbTense::kBase;
  }

  // Ranges [begin, end) of every modal occurrence, widened to swallow a
  // be-verb before "supposed to" / "expected to".
  std::vector<std::pair<std::size_t, std::size_t>> modal_spans(
      const Words& words) const {
    std::vector<std::pair<std::size_t, std::size_t>> spans;
    for (std::size_t i = 0; i < words.size(); ++i) {
      for (const auto& modal : lex_.modals()) {
        if (i + modal.size() > words.size()) continue;
        bool match = true;
        for (std::size_t k = 0; k < modal.size(); ++k) {
          if (words[i + k].lower != modal[k]) {
            match = false;
            break;
          }
        }
        if (!match) continue;
        std::size_t begin = i;
        if (modal.size() > 1 && i > 0) {
          auto aux = lex_.auxiliaries().find(words[i - 1].lower);
          if (aux != lex_.auxiliaries().end() && aux->second.base == "be") {
            begin = i - 1;
          }
        }
        spans.emplace_back(begin, i + modal.size());
        i += modal.size() - 1;
        break;
      }
    }
    return spans;
  }

  std::vector<std::string> normalize(const Words& words, std::size_t begin,
                                     std::size_t end) const {
    std::vector<std::string> out;
    for (std::size_t i = begin; i < end && i < words.size(); ++i) {
      if (lex_.is_determiner(words[i].lower)) continue;
      for (auto& t : normalize_tokens(words[i].surface, lex_)) {
        out.push_back(std::move(t));
      }
    }
    return out;
  }

  const Lexicon& lexicon() const { return lex_; }

 private:
  std::optional<std::string> known(const std::string& candidate) const {
    if (lex_.verbs().count(candidate)) return candidate;
    return std::nullopt;
  }

  std::optional<std::string> strip(const std::string& w,
                                   std::string_view suffix,
                                   std::initializer_list<std::string_view> tails,
                                   bool undouble) const {
    if (!w.ends_with(suffix) || w.size() <= suffix.size() + 1) {
      return std::nullopt;
    }
    std::string stem = w.substr(0, w.size() - suffix.size());
    for (auto tail : tails) {
      if (auto base = known(stem + std::string(tail))) return base;
    }
    if (undouble && stem.size() >= 3 && stem.back() == stem[stem.size() - 2]) {
      if (auto base = known(stem.substr(0, stem.size() - 1))) return base;
    }
    return std::nullopt;
  }

  const Lexicon& lex_;
};

Words remove_negations(const Words& words, const Lexicon& lexicon,
                       bool& negated) {
  Words out;
  for (const auto& w : words) {
    if (lexicon.is_negation(w.lower)) {
      negated = true;
    } else {
      out.push_back(w);
    }
  }
  return out;
}

class Extractor {
 public:
  explicit Extractor(const Analyzer& analyzer)
      : an_(analyzer), lex_(analyzer.lexicon()) {}

  SentenceType classify(const Words& words) const {
    if (words.empty()) return SentenceType::kFragment;
    if (words.size() > 1 && lex_.conditionals().count(words[0].lower)) {
      return SentenceType::kConditional;
    }
    if (!an_.modal_spans(words).empty()) return SentenceType::kModalExpectation;
    if (an_.find_passive(words)) return SentenceType::kPassive;
    for (const auto& w : words) {
      if (lex_.is_negation(w.lower)) return SentenceType::kNegativeDeclarative;
    }
    return classify_plain(words);
  }

  // The rules below NEGATIVE_DECLARATIVE in the precedence table.
  SentenceType classify_plain(const Words& words) const {
    if (an_.imperative_at(words, an_.skip_lead(words))) {
      return SentenceType::kImperative;
    }
    if (auto slot = an_.find_main_verb(words, an_.skip_lead(words))) {
      return slot->past ? SentenceType::kDeclarativePast
                        : SentenceType::kDeclarativePresent;
    }
    return SentenceType::kFragment;
  }

  void imperative(const Words& words, ParsedPhrase& p) const {
    std::size_t v = an_.skip_lead(words);
    p.subject = {"user"};
    p.action = an_.verb(words[v].lower)->base;
    fill_tail(words, v + 1, p);
  }

  void declarative(const Words& words, const VerbSlot& slot,
                   ParsedPhrase& p) const {
    p.subject = an_.normalize(words, an_.skip_lead(words), slot.head);
    p.action = slot.base;
    fill_tail(words, slot.main + 1, p);
  }

  void fragment(const Words& words, ParsedPhrase& p) const {
    p.object = an_.normalize(words, 0, words.size());
  }

  // Dispatch for the rules below NEGATIVE_DECLARATIVE.
  void plain(const Words& words, ParsedPhrase& p) const {
    switch (classify_plain(words)) {
      case SentenceType::kImperative:
        imperative(words, p);
        return;
      case SentenceType::kDeclarativePast:
      case SentenceType::kDeclarativePresent:
        declarative(words, *an_.find_main_verb(words, an_.skip_lead(words)), p);
        return;
      default:
        fragment(words, p);
        return;
    }
  }

  void passive(const Words& all, ParsedPhrase& p) const {
    Words words = remove_negations(all, lex_, p.negated);
    auto [be, participle] = *an_.find_passive(words);
    p.object = an_.normalize(words, an_.skip_lead(words), be);
    p.action = an_.verb(words[participle].lower)->base;

    Words rest;
    Words agent;
    for (std::size_t i = participle + 1; i < words.size(); ++i) {
      if (words[i].lower == "by" && agent.empty()) {
        std::size_t k = i + 1;
        while (k < words.size() && !lex_.is_preposition(words[k].lower)) {
          agent.push_back(words[k++]);
        }
        i = k - 1;
        continue;
      }
      rest.push_back(words[i]);
    }
    p.subject = an_.normalize(agent, 0, agent.size());
    if (p.subject.empty()) p.subject = {"system"};

    // Words between the participle and the first preposition extend the
    // object; the prepositional phrase becomes preposition + object2.
    std::size_t k = 0;
    while (k < rest.size() && !lex_.is_preposition(rest[k].lower)) ++k;
    for (auto& t : an_.normalize(rest, 0, k)) p.object.push_back(std::move(t));
    if (k < rest.size()) {
      auto object2 = an_.normalize(rest, k + 1, rest.size());
      if (!object2.empty()) {
        p.preposition = rest[k].lower;
        p.object2 = std::move(object2);
      }
    }
  }

  void modal(const Words& all, ParsedPhrase& p) const {
    Words kept;
    auto spans = an_.modal_spans(all);
    for (std::size_t i = 0; i < all.size(); ++i) {
      bool inside = std::any_of(spans.begin(), spans.end(), [&](auto& s) {
        return i >= s.first && i < s.second;
      });
      if (!inside) kept.push_back(all[i]);
    }
    Words words = remove_negations(kept, lex_, p.negated);
    if (auto slot = an_.find_main_verb(words, an_.skip_lead(words))) {
      declarative(words, *slot, p);
    } else {
      fragment(words, p);
    }
  }

  void negative(const Words& all, ParsedPhrase& p) const {
    Words words = remove_negations(all, lex_, p.negated);
    plain(words, p);
  }

 private:
  void fill_tail(const Words& words, std::size_t from, ParsedPhrase& p) const {
    std::size_t i = from;
    // A preposition right after the verb is a particle ("tap on X").
    if (i < words.size() && lex_.is_preposition(words[i].lower)) ++i;
    std::size_t k = i;
    while (k < words.size() && !lex_.is_preposition(words[k].lower)) ++k;
    p.object = an_.normalize(words, i, k);
    if (k < words.size()) {
      auto object2 = an_.normalize(words, k + 1, words.size());
      if (!object2.empty()) {
        p.preposition = words[k].lower;
        p.object2 = std::move(object2);
      }
    }
  }

  const Analyzer& an_;
  const Lexicon& lex_;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

}  // namespace

std::string_view to_string(SentenceType type) {
  switch (type) {
    case SentenceType::kImperative:
      return "IMPERATIVE";
    case SentenceType::kDeclarativePresent:
      return "DECLARATIVE_PRESENT";
    case SentenceType::kDeclarativePast:
      return "DECLARATIVE_PAST";
    case SentenceType::kPassive:
      return "PASSIVE";
    case SentenceType::kConditional:
      return "CONDITIONAL";
    case SentenceType::kModalExpectation:
      return "MODAL_EXPECTATION";
    case SentenceType::kNegativeDeclarative:
      return "NEGATIVE_DECLARATIVE";
    case SentenceType::kFragment:
      return "FRAGMENT";
  }
  return "FRAGMENT";
}

std::vector<std::string> ParsedPhrase::content_tokens() const {
  std::vector<std::string> out = subject;
  out.insert(out.end(), object.begin(), object.end());
  out.insert(out.end(), object2.begin(), object2.end());
  return out;
}

SentenceType SentenceParser::classify(std::string_view text) const {
  if (is_blank(text)) throw Error(ErrorKind::kEmptyInput, "empty input");
  Analyzer analyzer(*lexicon_);
  return Extractor(analyzer).classify(tokenize(text, *lexicon_));
}

ParsedPhrase SentenceParser::parse(std::string_view text) const {
  if (is_blank(text)) throw Error(ErrorKind::kEmptyInput, "empty input");
  Analyzer analyzer(*lexicon_);
  Extractor extractor(analyzer);
  Words words = tokenize(text, *lexicon_);
  SentenceType type = extractor.classify(words);

  ParsedPhrase phrase;
  switch (type) {
    case SentenceType::kConditional: {
      // The condition is kept only in raw_text; the main clause follows
      // the first comma, or the leading word when there is none.
      std::string_view main;
      if (auto comma = text.find(','); comma != std::string_view::npos &&
                                       comma > words[0].begin) {
        main = trim(text.substr(comma + 1));
      }
      if (main.empty()) main = trim(text.substr(words[0].end));
      phrase = parse(main);
      break;
    }
    case SentenceType::kModalExpectation:
      extractor.modal(words, phrase);
      break;
    case SentenceType::kPassive:
      extractor.passive(words, phrase);
      break;
    case SentenceType::kNegativeDeclarative:
      extractor.negative(words, phrase);
      break;
    case SentenceType::kImperative:
      extractor.imperative(words, phrase);
      break;
    case SentenceType::kDeclarativePast:
    case SentenceType::kDeclarativePresent:
      extractor.declarative(
          words, *analyzer.find_main_verb(words, analyzer.skip_lead(words)),
          phrase);
      break;
    case SentenceType::kFragment:
      extractor.fragment(words, phrase);
      break;
  }
  phrase.sentence_type = type;
  phrase.extraction_branch = type;
  phrase.raw_text = std::string(text);
  return phrase;
}

std::vector<ParsedPhrase> SentenceParser::parse_message(
    std::string_view text) const {
  std::vector<ParsedPhrase> out;
  for (const auto& sentence : split_sentences(text)) {
    out.push_back(parse(sentence));
  }
  return out;
}

SentenceType classify_sentence(std::string_view text) {
  return SentenceParser().classify(text);
}

ParsedPhrase parse(std::string_view text) { return SentenceParser().parse(text); }

std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> out;
  std::string current;
  auto flush = [&] {
    auto t = trim(current);
    if (!t.empty()) out.emplace_back(t);
    current.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    bool decimal_point = c == '.' && i > 0 && i + 1 < text.size() &&
                         std::isdigit(static_cast<unsigned char>(text[i - 1])) &&
                         std::isdigit(static_cast<unsigned char>(text[i + 1]));
    if ((c == '.' || c == '!' || c == '?' || c == ';') && !decimal_point) {
      flush();
    } else {
      current += c;
    }
  }
  flush();
  return out;
}

}  // namespace bugchat::text
