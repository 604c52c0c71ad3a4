#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "bugchat/text/lexicon.hpp"

namespace bugchat::text {

/// Lowercases, splits on non-alphanumerics, drops stopwords and reduces
/// each remaining word with `lemmatize`.
std::vector<std::string> normalize_tokens(
    std::string_view text, const Lexicon& lexicon = Lexicon::builtin());

/// Suffix-stripping lemmatizer. Rules, tried in order, first match wins:
/// "ing" (stem >= 3), "ied" -> "y", "ies" -> "y", "es" (stem >= 3),
/// "ed" (stem >= 3), "s" (stem >= 3). Rules are re-applied until none
/// matches, so the result is a fixed point.
std::string lemmatize(std::string_view word);

/// "StatsActivity" -> "Stats Activity", "my_screen" -> "my screen".
std::string split_identifier(std::string_view identifier);

std::string to_lower(std::string_view s);

std::string join(const std::vector<std::string>& tokens,
                 std::string_view separator = " ");

}  // namespace bugchat::text
