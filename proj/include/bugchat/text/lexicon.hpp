#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace bugchat::text {

enum class VerbTense { kBase, kPresent, kPast, kParticiple, kGerund };

struct Auxiliary {
  std::string base;
  VerbTense tense = VerbTense::kBase;
};

struct IrregularForm {
  std::string base;
  bool past = false;
  bool participle = false;
};

/// Word lists used by the parser, the normalizer and the matcher. The
/// built-in instance is compiled from data/lexicon/*.txt; `load` lets a
/// deployment replace individual lists with edited copies.
class Lexicon {
 public:
  static const Lexicon& builtin();

  /// Starts from the built-in lists and replaces each one for which
  /// `dir` holds a file of the same name.
  static Lexicon load(const std::filesystem::path& dir);

  const std::set<std::string>& stopwords() const { return stopwords_; }
  const std::set<std::string>& prepositions() const { return prepositions_; }
  const std::set<std::string>& negations() const { return negations_; }
  const std::set<std::string>& conditionals() const { return conditionals_; }
  const std::set<std::string>& determiners() const { return determiners_; }
  const std::set<std::string>& lead_words() const { return lead_words_; }
  const std::set<std::string>& generic() const { return generic_; }
  const std::set<std::string>& verbs() const { return verbs_; }
  const std::vector<std::vector<std::string>>& modals() const {
    return modals_;
  }
  const std::map<std::string, Auxiliary>& auxiliaries() const {
    return auxiliaries_;
  }
  const std::map<std::string, IrregularForm>& irregular_forms() const {
    return irregular_;
  }
  /// verb base form -> GUI action names (e.g. "TAP").
  const std::map<std::string, std::vector<std::string>>& verb_actions() const {
    return verb_actions_;
  }

  /// Component kind name (e.g. "IMAGE") -> words naming that kind.
  const std::map<std::string, std::vector<std::string>>& kind_synonyms() const {
    return kind_synonyms_;
  }

  bool is_stopword(std::string_view w) const;
  bool is_preposition(std::string_view w) const;
  bool is_negation(std::string_view w) const;
  bool is_determiner(std::string_view w) const;
  bool is_generic(std::string_view w) const;

 private:
  void apply(std::string_view file, std::string_view content);

  std::set<std::string> stopwords_;
  std::set<std::string> prepositions_;
  std::set<std::string> negations_;
  std::set<std::string> conditionals_;
  std::set<std::string> determiners_;
  std::set<std::string> lead_words_;
  std::set<std::string> generic_;
  std::set<std::string> verbs_;
  std::vector<std::vector<std::string>> modals_;
  std::map<std::string, Auxiliary> auxiliaries_;
  std::map<std::string, IrregularForm> irregular_;
  std::map<std::string, std::vector<std::string>> verb_actions_;
  std::map<std::string, std::vector<std::string>> kind_synonyms_;
};

/// Names of the lexicon files, relative to the lexicon directory.
const std::vector<std::string>& lexicon_file_names();

}  // namespace bugchat::text
