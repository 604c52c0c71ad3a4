#include "bugchat/text/lexicon.hpp"

#include <fstream>
#include <sstream>

#include "bugchat/embedded_data.hpp"
#include "bugchat/errors.hpp"

namespace bugchat::text {
namespace {

std::vector<std::vector<std::string>> read_rows(std::string_view content) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in{std::string(content)};
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    std::istringstream fields(line);
    std::vector<std::string> row;
    for (std::string field; fields >> field;) row.push_back(field);
    if (!row.empty()) rows.push_back(std::move(row));
  }
  return rows;
}

std::set<std::string> read_set(std::string_view content) {
  std::set<std::string> out;
  for (auto& row : read_rows(content)) out.insert(row.front());
  return out;
}

VerbTense parse_tense(const std::string& s) {
  if (s == "present") return VerbTense::kPresent;
  if (s == "past") return VerbTense::kPast;
  if (s == "participle") return VerbTense::kParticiple;
  if (s == "gerund") return VerbTense::kGerund;
  return VerbTense::kBase;
}

}  // namespace

const std::vector<std::string>& lexicon_file_names() {
  static const std::vector<std::string> names = {
      "stopwords.txt",    "prepositions.txt",    "negations.txt",
      "conditionals.txt", "determiners.txt",     "lead_words.txt",
      "generic.txt",      "verbs.txt",           "modals.txt",
      "auxiliaries.txt",  "irregular_verbs.txt", "verb_actions.txt",
      "kind_synonyms.txt",
  };
  return names;
}

void Lexicon::apply(std::string_view file, std::string_view content) {
  if (file == "stopwords.txt") {
    stopwords_ = read_set(content);
  } else if (file == "prepositions.txt") {
    prepositions_ = read_set(content);
  } else if (file == "negations.txt") {
    negations_ = read_set(content);
  } else if (file == "conditionals.txt") {
    conditionals_ = read_set(content);
  } else if (file == "determiners.txt") {
    determiners_ = read_set(content);
  } else if (file == "lead_words.txt") {
    lead_words_ = read_set(content);
  } else if (file == "generic.txt") {
    generic_ = read_set(content);
  } else if (file == "verbs.txt") {
    verbs_ = read_set(content);
  } else if (file == "modals.txt") {
    modals_ = read_rows(content);
  } else if (file == "auxiliaries.txt") {
    auxiliaries_.clear();
    for (auto& row : read_rows(content)) {
      if (row.size() < 3) continue;
      auxiliaries_[row[0]] = Auxiliary{row[1], parse_tense(row[2])};
    }
  } else if (file == "irregular_verbs.txt") {
    irregular_.clear();
    for (auto& row : read_rows(content)) {
      if (row.size() < 3) continue;
      irregular_[row[0]] = IrregularForm{row[1], row[2] != "participle",
                                         row[2] != "past"};
    }
  } else if (file == "verb_actions.txt") {
    verb_actions_.clear();
    for (auto& row : read_rows(content)) {
      if (row.size() < 2) continue;
      verb_actions_[row[0]].push_back(row[1]);
    }
  } else if (file == "kind_synonyms.txt") {
    kind_synonyms_.clear();
    for (auto& row : read_rows(content)) {
      if (row.empty()) continue;
      kind_synonyms_[row[0]].assign(row.begin() + 1, row.end());
    }
  }
}

const Lexicon& Lexicon::builtin() {
  static const Lexicon lexicon = [] {
    Lexicon lex;
    for (const auto& name : lexicon_file_names()) {
      auto content = embedded_file("lexicon/" + name);
      if (!content) {
        throw Error(ErrorKind::kIo, "missing built-in lexicon " + name);
      }
      lex.apply(name, *content);
    }
    return lex;
  }();
  return lexicon;
}

Lexicon Lexicon::load(const std::filesystem::path& dir) {
  Lexicon lex = builtin();
  for (const auto& name : lexicon_file_names()) {
    auto path = dir / name;
    if (!std::filesystem::exists(path)) continue;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::kIo, "cannot read " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    lex.apply(name, buffer.str());
  }
  return lex;
}

bool Lexicon::is_stopword(std::string_view w) const {
  return stopwords_.count(std::string(w)) != 0;
}
bool Lexicon::is_preposition(std::string_view w) const {
  return prepositions_.count(std::string(w)) != 0;
}
bool Lexicon::is_negation(std::string_view w) const {
  return negations_.count(std::string(w)) != 0;
}
bool Lexicon::is_determiner(std::string_view w) const {
  return determiners_.count(std::string(w)) != 0;
}
bool Lexicon::is_generic(std::string_view w) const {
  return generic_.count(std::string(w)) != 0;
}

}  // namespace bugchat::text
