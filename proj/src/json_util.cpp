#include "bugchat/json_util.hpp"

#include "bugchat/errors.hpp"

namespace bugchat {

Json parse_json(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    std::size_t offset = e.byte == 0 ? 0 : e.byte - 1;
    throw ParseError("malformed JSON at byte " + std::to_string(offset), offset);
  }
}

std::string join_path(const std::string& path, std::string_view key) {
  if (path.empty()) return std::string(key);
  return path + "." + std::string(key);
}

void require_object(const Json& value, const std::string& path,
                    std::optional<long long> sequence) {
  if (!value.is_object()) {
    throw ValidationError((path.empty() ? "document" : path) +
                              " must be an object",
                          path, sequence);
  }
}

const Json& require_field(const Json& obj, std::string_view key,
                          const std::string& path,
                          std::optional<long long> sequence) {
  require_object(obj, path, sequence);
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) {
    auto field = join_path(path, key);
    throw ValidationError("missing field " + field, field, sequence);
  }
  return *it;
}

std::string require_string(const Json& obj, std::string_view key,
                           const std::string& path,
                           std::optional<long long> sequence) {
  const auto& v = require_field(obj, key, path, sequence);
  if (!v.is_string()) {
    auto field = join_path(path, key);
    throw ValidationError(field + " must be a string", field, sequence);
  }
  return v.get<std::string>();
}

long long require_integer(const Json& obj, std::string_view key,
                          const std::string& path,
                          std::optional<long long> sequence) {
  const auto& v = require_field(obj, key, path, sequence);
  if (!v.is_number_integer()) {
    auto field = join_path(path, key);
    throw ValidationError(field + " must be an integer", field, sequence);
  }
  return v.get<long long>();
}

std::optional<std::string> optional_string(const Json& obj,
                                           std::string_view key,
                                           const std::string& path,
                                           std::optional<long long> sequence) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) {
    auto field = join_path(path, key);
    throw ValidationError(field + " must be a string", field, sequence);
  }
  return it->get<std::string>();
}

}  // namespace bugchat
