#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "bugchat/clock.hpp"
#include "bugchat/ingest/package.hpp"
#include "bugchat/model/execution_model.hpp"

namespace bugchat::ingest {

struct AppSummary {
  std::string app_id;
  std::string name;
  std::string version;
  std::size_t node_count = 0;
  std::size_t edge_count = 0;
  bool has_icon = false;
  std::string built_at;
};

Json to_json(const AppSummary& summary);

/// Published apps under `<root>/apps/<app_id>/` (model.json, icon.png,
/// screenshots/). Thread-safe; published models are swapped in atomically.
class AppRepository {
 public:
  explicit AppRepository(std::filesystem::path root,
                         const text::Lexicon& lexicon = text::Lexicon::builtin(),
                         Clock clock = system_clock());

  /// Loads every app already on disk. Returns per-app load failures.
  std::vector<std::string> load_existing();

  std::vector<AppSummary> list() const;
  std::shared_ptr<const model::AppExecutionModel> find(const std::string& app_id) const;
  /// Throws NotFoundError.
  std::shared_ptr<const model::AppExecutionModel> get(const std::string& app_id) const;

  /// Validates and, if ok, publishes an uploaded package. A concurrent
  /// upload of the same app+version raises Error(kBusy).
  ValidationReport ingest(std::string_view zip_bytes,
                          std::optional<std::string> icon = std::nullopt);

  /// Registers an already built model (tests, fixtures).
  void publish(std::shared_ptr<const model::AppExecutionModel> model,
               const std::map<std::string, std::string>& screenshots = {},
               const std::optional<std::string>& icon = std::nullopt);

  std::filesystem::path app_dir(const std::string& app_id) const;
  /// Absolute path of a stored asset, or nullopt if it is missing or the
  /// relative path escapes the app directory.
  std::optional<std::filesystem::path> asset_path(const std::string& app_id,
                                                  const std::string& relative) const;
  std::optional<std::filesystem::path> icon_path(const std::string& app_id) const;

  const std::filesystem::path& root() const { return root_; }
  const text::Lexicon& lexicon() const { return *lexicon_; }

 private:
  void write_app(const model::AppExecutionModel& model,
                 const std::map<std::string, std::string>& screenshots,
                 const std::optional<std::string>& icon);

  std::filesystem::path root_;
  const text::Lexicon* lexicon_;
  Clock clock_;

  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<const model::AppExecutionModel>> apps_;
  std::set<std::string> uploading_;
};

}  // namespace bugchat::ingest
