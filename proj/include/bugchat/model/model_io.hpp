#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <string_view>

#include "bugchat/json_util.hpp"
#include "bugchat/model/execution_model.hpp"

namespace bugchat::model {

inline constexpr int kModelSchemaVersion = 1;

Json to_json(const GuiComponent& component);
Json to_json(const Bounds& bounds);
Json to_json(const ComponentSignature& signature);
/// The fingerprint is written only when `with_fingerprint` is set.
Json to_json(const Screen& screen, bool with_fingerprint = true);
Json to_json(const Interaction& edge);

// Readers raise ValidationError naming the offending field.
GuiComponent component_from_json(const Json& j, const std::string& path,
                                  std::optional<long long> sequence = std::nullopt);
Bounds bounds_from_json(const Json& j, const std::string& path,
                        std::optional<long long> sequence = std::nullopt);
Screen screen_from_json(const Json& j, const std::string& path,
                        std::optional<long long> sequence = std::nullopt);

/// Persisted form: `{schema_version, app_id, app_name, app_version,
/// built_at, nodes:[...], edges:[...]}`. START is implicit.
std::string save_model(const AppExecutionModel& model);
std::shared_ptr<const AppExecutionModel> load_model(
    std::string_view text, const text::Lexicon& lexicon = text::Lexicon::builtin());

/// Writes through a temporary file and rename.
void save_model_file(const AppExecutionModel& model,
                     const std::filesystem::path& path);
std::shared_ptr<const AppExecutionModel> load_model_file(
    const std::filesystem::path& path,
    const text::Lexicon& lexicon = text::Lexicon::builtin());

}  // namespace bugchat::model
