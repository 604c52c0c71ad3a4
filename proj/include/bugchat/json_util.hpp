#pragma once

#include <json.hpp>

#include <optional>
#include <string>
#include <string_view>

namespace bugchat {

using Json = nlohmann::json;

/// Parses JSON text, converting syntax errors into ParseError with the
/// byte offset reported by the parser.
Json parse_json(std::string_view text);

/// Schema helpers. `path` names the containing object in error messages
/// ("events[2].target"); failures raise ValidationError.
const Json& require_field(const Json& obj, std::string_view key,
                          const std::string& path,
                          std::optional<long long> sequence = std::nullopt);
std::string require_string(const Json& obj, std::string_view key,
                           const std::string& path,
                           std::optional<long long> sequence = std::nullopt);
long long require_integer(const Json& obj, std::string_view key,
                          const std::string& path,
                          std::optional<long long> sequence = std::nullopt);
std::optional<std::string> optional_string(
    const Json& obj, std::string_view key, const std::string& path,
    std::optional<long long> sequence = std::nullopt);
void require_object(const Json& value, const std::string& path,
                    std::optional<long long> sequence = std::nullopt);

std::string join_path(const std::string& path, std::string_view key);

}  // namespace bugchat
