#pragma once

#include <optional>
#include <string_view>

namespace bugchat {

// Contents of a file under data/ (e.g. "lexicon/verbs.txt"), compiled in.
std::optional<std::string_view> embedded_file(std::string_view name);

}  // namespace bugchat
