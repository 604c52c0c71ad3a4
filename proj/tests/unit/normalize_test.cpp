#include <doctest.h>

#include <random>

#include "bugchat/text/normalize.hpp"

using namespace bugchat::text;
using V = std::vector<std::string>;

TEST_CASE("normalize_tokens examples") {
  CHECK(normalize_tokens("Showing the Totals") == V{"show", "total"});
  CHECK(normalize_tokens("NaN value") == V{"nan", "value"});
  CHECK(normalize_tokens("the of and").empty());
  CHECK(normalize_tokens("").empty());
  CHECK(normalize_tokens("fuel-economy, 12.5 L") == V{"fuel", "economy", "12", "5", "l"});
}

TEST_CASE("lemmatize suffix rules") {
  CHECK(lemmatize("showing") == "show");
  CHECK(lemmatize("copied") == "copy");
  CHECK(lemmatize("entries") == "entry");
  CHECK(lemmatize("boxes") == "box");
  CHECK(lemmatize("saved") == "sav");
  CHECK(lemmatize("totals") == "total");
  CHECK(lemmatize("bus") == "bus");    // stem would be 2 chars
  CHECK(lemmatize("sing") == "sing");  // stem would be 1 char
  CHECK(lemmatize("is") == "is");
  // Rules repeat until nothing matches.
  CHECK(lemmatize("settings") == "sett");
  CHECK(lemmatize(lemmatize("settings")) == lemmatize("settings"));
}

TEST_CASE("split_identifier") {
  CHECK(split_identifier("StatsActivity") == "Stats Activity");
  CHECK(split_identifier("note_list") == "note list");
  CHECK(split_identifier("HTMLView") == "HTML View");
}

TEST_CASE("normalization is idempotent over a generated corpus") {
  const V words = {"Showing", "the", "Totals", "settings", "copied", "entries",
                   "NaN", "value", "on", "page", "boxes", "fuel", "economy",
                   "saved", "it's", "tap", "12.5", "SAVE", "button", "was",
                   "displayed", "Fillups", "running", "ss", "sss", "ies",
                   "studies", "going", "needed", "is", "of", "x"};
  std::mt19937 rng(7);
  std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1);
  std::uniform_int_distribution<int> len(0, 12);
  for (int i = 0; i < 2000; ++i) {
    std::string text;
    int n = len(rng);
    for (int k = 0; k < n; ++k) text += words[pick(rng)] + (k % 3 ? " " : ", ");
    auto once = normalize_tokens(text);
    CHECK_MESSAGE(normalize_tokens(join(once)) == once, text);
  }
}
