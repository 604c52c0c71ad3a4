#include "bugchat/ingest/repository.hpp"

#include <atomic>
#include <fstream>

#include <unistd.h>

#include "bugchat/errors.hpp"
#include "bugchat/ingest/zip.hpp"
#include "bugchat/model/model_io.hpp"

namespace bugchat::ingest {
namespace fs = std::filesystem;
namespace {

void write_file(const fs::path& path, std::string_view data) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
}

std::string unique_suffix() {
  static std::atomic<unsigned> counter{0};
  return std::to_string(::getpid()) + "-" + std::to_string(counter++);
}

}  // namespace

Json to_json(const AppSummary& s) {
  return {{"app_id", s.app_id},     {"name", s.name},
          {"version", s.version},   {"node_count", s.node_count},
          {"edge_count", s.edge_count}, {"has_icon", s.has_icon},
          {"built_at", s.built_at}};
}

AppRepository::AppRepository(fs::path root, const text::Lexicon& lexicon, Clock clock)
    : root_(std::move(root)), lexicon_(&lexicon), clock_(std::move(clock)) {
  fs::create_directories(root_ / "apps");
}

fs::path AppRepository::app_dir(const std::string& app_id) const {
  return root_ / "apps" / app_id;
}

std::vector<std::string> AppRepository::load_existing() {
  std::vector<std::string> failures;
  std::map<std::string, std::shared_ptr<const model::AppExecutionModel>> loaded;
  for (const auto& entry : fs::directory_iterator(root_ / "apps")) {
    auto name = entry.path().filename().string();
    if (!entry.is_directory() || name.empty() || name.front() == '.') continue;
    try {
      loaded[name] = model::load_model_file(entry.path() / "model.json", *lexicon_);
    } catch (const std::exception& e) {
      failures.push_back(name + ": " + e.what());
    }
  }
  std::lock_guard lock(mutex_);
  for (auto& [id, m] : loaded) apps_[id] = std::move(m);
  return failures;
}

std::vector<AppSummary> AppRepository::list() const {
  std::lock_guard lock(mutex_);
  std::vector<AppSummary> out;
  for (const auto& [id, m] : apps_) {
    out.push_back({id, m->app_name(), m->app_version(), m->screen_count(),
                   m->edges().size(), fs::exists(app_dir(id) / "icon.png"),
                   m->built_at()});
  }
  return out;
}

std::shared_ptr<const model::AppExecutionModel> AppRepository::find(
    const std::string& app_id) const {
  std::lock_guard lock(mutex_);
  auto it = apps_.find(app_id);
  return it == apps_.end() ? nullptr : it->second;
}

std::shared_ptr<const model::AppExecutionModel> AppRepository::get(
    const std::string& app_id) const {
  auto m = find(app_id);
  if (!m) throw NotFoundError("unknown app " + app_id);
  return m;
}

ValidationReport AppRepository::ingest(std::string_view zip_bytes,
                                       std::optional<std::string> icon) {
  auto contents = analyze_package(zip_bytes, std::move(icon), clock_(), *lexicon_);
  if (!contents.report.ok) return contents.report;

  const auto& app_id = contents.report.app_id;
  {
    std::lock_guard lock(mutex_);
    if (!uploading_.insert(app_id).second) {
      throw Error(ErrorKind::kBusy, "an upload for " + app_id + " is in progress");
    }
  }
  try {
    publish(contents.model, contents.screenshots, contents.icon);
  } catch (...) {
    std::lock_guard lock(mutex_);
    uploading_.erase(app_id);
    throw;
  }
  std::lock_guard lock(mutex_);
  uploading_.erase(app_id);
  return contents.report;
}

void AppRepository::write_app(const model::AppExecutionModel& model,
                              const std::map<std::string, std::string>& screenshots,
                              const std::optional<std::string>& icon) {
  auto final_dir = app_dir(model.app_id());
  auto staging = root_ / "apps" / ("." + model.app_id() + ".staging-" + unique_suffix());
  fs::create_directories(staging);
  try {
    for (const auto& [path, bytes] : screenshots) {
      if (!is_safe_entry_name(path)) continue;
      write_file(staging / path, bytes);
    }
    if (icon) write_file(staging / "icon.png", *icon);
    model::save_model_file(model, staging / "model.json");

    auto retired = root_ / "apps" / ("." + model.app_id() + ".old-" + unique_suffix());
    if (fs::exists(final_dir)) fs::rename(final_dir, retired);
    fs::rename(staging, final_dir);
    std::error_code ignored;
    fs::remove_all(retired, ignored);
  } catch (...) {
    std::error_code ignored;
    fs::remove_all(staging, ignored);
    throw;
  }
}

void AppRepository::publish(std::shared_ptr<const model::AppExecutionModel> model,
                            const std::map<std::string, std::string>& screenshots,
                            const std::optional<std::string>& icon) {
  write_app(*model, screenshots, icon);
  std::lock_guard lock(mutex_);
  apps_[model->app_id()] = std::move(model);
}

std::optional<fs::path> AppRepository::asset_path(const std::string& app_id,
                                                  const std::string& relative) const {
  if (!is_safe_entry_name(relative)) return std::nullopt;
  auto path = app_dir(app_id) / relative;
  if (!fs::is_regular_file(path)) return std::nullopt;
  return path;
}

std::optional<fs::path> AppRepository::icon_path(const std::string& app_id) const {
  return asset_path(app_id, "icon.png");
}

}  // namespace bugchat::ingest
