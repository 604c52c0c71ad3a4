#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "bugchat/model/types.hpp"
#include "bugchat/text/lexicon.hpp"

namespace bugchat::model {

/// Fingerprint of the synthetic node every LAUNCH edge starts from.
const Fingerprint& start_fingerprint();

/// SHA-256 (hex) of
/// `activity|window|sorted(KIND,text,content_description joined by ";")`.
/// Bounds, uid and parent do not participate.
std::string fingerprint_screen(std::string_view activity,
                               const std::optional<std::string>& window,
                               const std::vector<GuiComponent>& components);

/// The string `fingerprint_screen` hashes.
std::string canonical_screen_string(std::string_view activity,
                                    const std::optional<std::string>& window,
                                    const std::vector<GuiComponent>& components);

struct ModelInfo {
  std::string app_id;
  std::string app_name;
  std::string app_version;
  std::string built_at;
};

/// Weighted directed multigraph of app screens and GUI interactions.
/// Instances are immutable; build them with `ModelBuilder`.
class AppExecutionModel {
 public:
  const ModelInfo& info() const { return info_; }
  const std::string& app_id() const { return info_.app_id; }
  const std::string& app_name() const { return info_.app_name; }
  const std::string& app_version() const { return info_.app_version; }
  const std::string& built_at() const { return info_.built_at; }

  /// All nodes including START, ordered by fingerprint.
  const std::map<Fingerprint, Screen>& nodes() const { return nodes_; }
  /// Number of app screens (START excluded).
  std::size_t screen_count() const { return nodes_.size() - 1; }

  std::span<const Interaction> edges() const { return edges_; }
  const Interaction& edge(EdgeId id) const;
  EdgeId id_of(const Interaction& edge) const;

  bool contains(const Fingerprint& fp) const { return nodes_.count(fp) != 0; }
  /// Throws NotFoundError for unknown fingerprints.
  const Screen& screen(const Fingerprint& fp) const;

  /// Outgoing edges ordered by action, component signature, swipe
  /// direction, then target. Throws NotFoundError for unknown nodes.
  std::span<const EdgeId> outgoing(const Fingerprint& fp) const;
  std::span<const EdgeId> launch_edges() const {
    return outgoing(start_fingerprint());
  }
  std::int64_t outgoing_weight(const Fingerprint& fp) const;

  /// Normalized tokens describing a screen (a multiset, sorted).
  const std::vector<std::string>& document(const Fingerprint& fp) const;
  /// `document` with duplicates removed.
  const std::vector<std::string>& document_terms(const Fingerprint& fp) const;

 private:
  friend class ModelBuilder;
  AppExecutionModel() = default;

  struct NodeIndex {
    std::vector<EdgeId> outgoing;
    std::int64_t outgoing_weight = 0;
    std::vector<std::string> document;
    std::vector<std::string> terms;
  };

  const NodeIndex& index(const Fingerprint& fp) const;

  ModelInfo info_;
  std::map<Fingerprint, Screen> nodes_;
  std::vector<Interaction> edges_;
  std::map<Fingerprint, NodeIndex> index_;
};

/// The GUI-level description of one traversal, before merging.
struct InteractionDescriptor {
  Action action = Action::kTap;
  std::optional<GuiComponent> component;
  std::optional<SwipeDirection> swipe_direction;
};

/// Weight added per traversal.
std::int64_t traversal_weight(TraceSource source);

/// Single-threaded construction of an `AppExecutionModel`.
class ModelBuilder {
 public:
  explicit ModelBuilder(ModelInfo info,
                        const text::Lexicon& lexicon = text::Lexicon::builtin());

  /// Registers a screen (first registration wins) and returns its
  /// fingerprint, recomputed from content.
  Fingerprint register_screen(Screen screen);

  bool has_screen(const Fingerprint& fp) const;

  /// Adds `traversal_weight(source)` to the edge with the same key, or
  /// creates it. Throws kModelIntegrity for unregistered endpoints.
  void upsert_transition(const Fingerprint& source,
                         const InteractionDescriptor& interaction,
                         const Fingerprint& target, TraceSource source_kind);

  /// Inserts a fully described edge (used when loading a persisted model).
  /// Duplicate keys are an integrity error.
  void add_edge(Interaction edge);

  std::shared_ptr<const AppExecutionModel> publish() const;

 private:
  ModelInfo info_;
  const text::Lexicon* lexicon_;
  std::map<Fingerprint, Screen> nodes_;
  std::map<EdgeKey, Interaction> edges_;
};

/// Screen document tokens: the activity split on camelCase/underscores,
/// the window title, and every component's text and content description.
std::vector<std::string> screen_document(
    const Screen& screen, const text::Lexicon& lexicon = text::Lexicon::builtin());
const std::vector<std::string>& screen_document(const AppExecutionModel& model,
                                                const Fingerprint& fp);

/// Edges out of `fp` in documented order (copy of the edge records).
std::vector<Interaction> outgoing_edges(const AppExecutionModel& model,
                                        const Fingerprint& fp);

/// Structural problems found by a full scan; empty means the model is sound.
std::vector<std::string> validate_model(const AppExecutionModel& model);

struct ModelStats {
  std::size_t node_count = 0;  // START excluded
  std::size_t edge_count = 0;
  std::int64_t total_weight = 0;
  std::map<std::int64_t, std::size_t> weight_histogram;
  // Screens where one interaction leads to more than one target.
  std::vector<Fingerprint> nondeterministic_nodes;
};

ModelStats model_stats(const AppExecutionModel& model);

}  // namespace bugchat::model
