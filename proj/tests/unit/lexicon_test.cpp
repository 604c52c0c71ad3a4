#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "bugchat/embedded_data.hpp"
#include "bugchat/text/lexicon.hpp"

using bugchat::text::Lexicon;

TEST_CASE("builtin lexicon carries the documented fixed lists") {
  const auto& lex = Lexicon::builtin();
  for (const char* w : {"a", "an", "the", "is", "are", "was", "were", "be",
                        "been", "on", "in", "at", "of", "to", "for", "with",
                        "and", "or", "it", "this", "that", "i", "my", "me",
                        "then", "so"}) {
    CHECK_MESSAGE(lex.is_stopword(w), w);
  }
  CHECK(lex.stopwords().size() == 26);

  CHECK(lex.prepositions() ==
        std::set<std::string>{"on", "in", "at", "to", "from", "into", "onto",
                              "under", "inside", "within", "after", "before"});
  CHECK_FALSE(lex.is_preposition("of"));
  CHECK(lex.is_generic("screen"));
  CHECK(lex.verbs().count("tap"));
  CHECK(lex.verb_actions().at("tap") == std::vector<std::string>{"TAP"});
}

TEST_CASE("every lexicon file is embedded") {
  for (const auto& name : bugchat::text::lexicon_file_names()) {
    CHECK_MESSAGE(bugchat::embedded_file("lexicon/" + name).has_value(), name);
  }
  CHECK(bugchat::embedded_file("tips.json").has_value());
  CHECK_FALSE(bugchat::embedded_file("nope.txt").has_value());
}

TEST_CASE("load replaces only the lists present in the directory") {
  auto dir = std::filesystem::temp_directory_path() / "bugchat_lexicon_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "stopwords.txt");
    out << "# comment\nfoo\n\nbar\n";
  }
  auto lex = Lexicon::load(dir);
  CHECK(lex.stopwords() == std::set<std::string>{"foo", "bar"});
  CHECK(lex.prepositions() == Lexicon::builtin().prepositions());
  std::filesystem::remove_all(dir);
}
