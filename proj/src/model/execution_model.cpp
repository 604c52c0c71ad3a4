#include "bugchat/model/execution_model.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <set>

#include "bugchat/errors.hpp"
#include "bugchat/text/normalize.hpp"

namespace bugchat::model {
namespace {

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(),
                 nullptr) != 1) {
    throw Error(ErrorKind::kIo, "sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(length * 2);
  for (unsigned int i = 0; i < length; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

Error integrity(const std::string& message) {
  return Error(ErrorKind::kModelIntegrity, message);
}

std::string short_fp(const Fingerprint& fp) { return fp.str().substr(0, 12); }

void check_components(const Screen& screen) {
  std::set<std::string> uids;
  for (const auto& c : screen.components) {
    if (c.uid.empty()) throw integrity("component with empty uid");
    if (!c.bounds.well_formed()) {
      throw integrity("component " + c.uid + " has malformed bounds");
    }
    uids.insert(c.uid);
  }
  for (const auto& c : screen.components) {
    if (c.parent && !uids.count(*c.parent)) {
      throw integrity("component " + c.uid + " has unknown parent " + *c.parent);
    }
  }
}

}  // namespace

const Fingerprint& start_fingerprint() {
  static const Fingerprint start{"START"};
  return start;
}

std::string canonical_screen_string(std::string_view activity,
                                    const std::optional<std::string>& window,
                                    const std::vector<GuiComponent>& components) {
  std::vector<std::string> triples;
  triples.reserve(components.size());
  for (const auto& c : components) {
    triples.push_back(std::string(to_string(c.kind)) + "," + c.text + "," +
                      c.content_description);
  }
  std::sort(triples.begin(), triples.end());
  std::string out(activity);
  out += "|";
  out += window.value_or("");
  out += "|";
  out += text::join(triples, ";");
  return out;
}

std::string fingerprint_screen(std::string_view activity,
                               const std::optional<std::string>& window,
                               const std::vector<GuiComponent>& components) {
  return sha256_hex(canonical_screen_string(activity, window, components));
}

std::vector<std::string> screen_document(const Screen& screen,
                                         const text::Lexicon& lexicon) {
  std::string source = text::split_identifier(screen.activity);
  if (screen.window) source += " " + *screen.window;
  for (const auto& c : screen.components) {
    source += " " + c.text + " " + c.content_description;
  }
  auto tokens = text::normalize_tokens(source, lexicon);
  std::sort(tokens.begin(), tokens.end());
  return tokens;
}

const std::vector<std::string>& screen_document(const AppExecutionModel& model,
                                                const Fingerprint& fp) {
  return model.document(fp);
}

std::int64_t traversal_weight(TraceSource source) {
  return source == TraceSource::kManual ? 3 : 1;
}

// --- AppExecutionModel ------------------------------------------------------

const Interaction& AppExecutionModel::edge(EdgeId id) const {
  if (id.value >= edges_.size()) {
    throw NotFoundError("unknown edge id " + std::to_string(id.value));
  }
  return edges_[id.value];
}

EdgeId AppExecutionModel::id_of(const Interaction& e) const {
  auto key = e.key();
  auto it = std::lower_bound(
      edges_.begin(), edges_.end(), key,
      [](const Interaction& a, const EdgeKey& k) { return a.key() < k; });
  if (it == edges_.end() || it->key() != key) {
    throw NotFoundError("edge not in model");
  }
  return EdgeId{static_cast<std::uint32_t>(it - edges_.begin())};
}

const AppExecutionModel::NodeIndex& AppExecutionModel::index(
    const Fingerprint& fp) const {
  auto it = index_.find(fp);
  if (it == index_.end()) {
    throw NotFoundError("unknown screen " + fp.str());
  }
  return it->second;
}

const Screen& AppExecutionModel::screen(const Fingerprint& fp) const {
  auto it = nodes_.find(fp);
  if (it == nodes_.end()) throw NotFoundError("unknown screen " + fp.str());
  return it->second;
}

std::span<const EdgeId> AppExecutionModel::outgoing(const Fingerprint& fp) const {
  return index(fp).outgoing;
}

std::int64_t AppExecutionModel::outgoing_weight(const Fingerprint& fp) const {
  return index(fp).outgoing_weight;
}

const std::vector<std::string>& AppExecutionModel::document(
    const Fingerprint& fp) const {
  return index(fp).document;
}

const std::vector<std::string>& AppExecutionModel::document_terms(
    const Fingerprint& fp) const {
  return index(fp).terms;
}

// --- ModelBuilder -----------------------------------------------------------

ModelBuilder::ModelBuilder(ModelInfo info, const text::Lexicon& lexicon)
    : info_(std::move(info)), lexicon_(&lexicon) {}

Fingerprint ModelBuilder::register_screen(Screen screen) {
  Fingerprint fp{fingerprint_screen(screen.activity, screen.window,
                                    screen.components)};
  if (!screen.fingerprint.empty() && screen.fingerprint != fp) {
    throw integrity("fingerprint mismatch for screen " + screen.activity +
                    ": stored " + short_fp(screen.fingerprint) +
                    ", computed " + short_fp(fp));
  }
  check_components(screen);
  screen.fingerprint = fp;
  nodes_.emplace(fp, std::move(screen));
  return fp;
}

bool ModelBuilder::has_screen(const Fingerprint& fp) const {
  return fp == start_fingerprint() || nodes_.count(fp) != 0;
}

void ModelBuilder::upsert_transition(const Fingerprint& source,
                                     const InteractionDescriptor& interaction,
                                     const Fingerprint& target,
                                     TraceSource source_kind) {
  if (!has_screen(source)) {
    throw integrity("unknown source screen " + source.str());
  }
  if (!nodes_.count(target)) {
    throw integrity("unknown target screen " + target.str());
  }
  bool from_start = source == start_fingerprint();
  if (from_start != (interaction.action == Action::kLaunch)) {
    throw integrity("LAUNCH edges must start at START and only there");
  }
  if (requires_component(interaction.action) && !interaction.component) {
    throw integrity(std::string(to_string(interaction.action)) +
                    " edge without a target component");
  }

  Interaction edge;
  edge.source = source;
  edge.target = target;
  edge.action = interaction.action;
  if (interaction.component) {
    edge.target_component = interaction.component->signature();
    edge.highlight_bounds = interaction.component->bounds;
  }
  edge.swipe_direction = interaction.swipe_direction;
  edge.weight = traversal_weight(source_kind);

  auto key = edge.key();
  if (auto it = edges_.find(key); it != edges_.end()) {
    it->second.weight += edge.weight;
    return;
  }
  if (!from_start) edge.screenshot = nodes_.at(source).screenshot;
  edges_.emplace(std::move(key), std::move(edge));
}

void ModelBuilder::add_edge(Interaction edge) {
  if (!has_screen(edge.source) || !nodes_.count(edge.target)) {
    throw integrity("edge endpoint not registered: " + edge.source.str() +
                    " -> " + edge.target.str());
  }
  if (edge.weight <= 0) throw integrity("edge weight must be positive");
  if ((edge.source == start_fingerprint()) != (edge.action == Action::kLaunch)) {
    throw integrity("LAUNCH edges must start at START and only there");
  }
  if (requires_component(edge.action) && !edge.target_component) {
    throw integrity(std::string(to_string(edge.action)) +
                    " edge without a target component");
  }
  auto key = edge.key();
  if (!edges_.emplace(std::move(key), std::move(edge)).second) {
    throw integrity("duplicate edge");
  }
}

std::shared_ptr<const AppExecutionModel> ModelBuilder::publish() const {
  bool has_launch = std::any_of(edges_.begin(), edges_.end(), [](auto& kv) {
    return kv.second.action == Action::kLaunch;
  });
  if (!has_launch) throw integrity("model has no LAUNCH edge");

  std::shared_ptr<AppExecutionModel> model(new AppExecutionModel());
  model->info_ = info_;
  model->nodes_ = nodes_;
  Screen start;
  start.fingerprint = start_fingerprint();
  start.activity = "START";
  model->nodes_.emplace(start_fingerprint(), std::move(start));

  model->edges_.reserve(edges_.size());
  for (const auto& [key, edge] : edges_) model->edges_.push_back(edge);

  for (const auto& [fp, screen] : model->nodes_) {
    auto& idx = model->index_[fp];
    if (fp != start_fingerprint()) {
      idx.document = screen_document(screen, *lexicon_);
      idx.terms = idx.document;
      idx.terms.erase(std::unique(idx.terms.begin(), idx.terms.end()),
                      idx.terms.end());
    }
  }
  // Edges are in key order, so each node's list is already sorted.
  for (std::uint32_t i = 0; i < model->edges_.size(); ++i) {
    auto& idx = model->index_[model->edges_[i].source];
    idx.outgoing.push_back(EdgeId{i});
    idx.outgoing_weight += model->edges_[i].weight;
  }
  return model;
}

// --- queries ----------------------------------------------------------------

std::vector<Interaction> outgoing_edges(const AppExecutionModel& model,
                                        const Fingerprint& fp) {
  std::vector<Interaction> out;
  for (EdgeId id : model.outgoing(fp)) out.push_back(model.edge(id));
  return out;
}

std::vector<std::string> validate_model(const AppExecutionModel& model) {
  std::vector<std::string> problems;
  bool has_launch = false;
  for (const auto& e : model.edges()) {
    if (!model.contains(e.source)) {
      problems.push_back("edge source not registered: " + e.source.str());
    }
    if (!model.contains(e.target) || e.target == start_fingerprint()) {
      problems.push_back("edge target not registered: " + e.target.str());
    }
    if (e.weight <= 0) problems.push_back("non-positive edge weight");
    if ((e.source == start_fingerprint()) != (e.action == Action::kLaunch)) {
      problems.push_back("LAUNCH edge placement violated at " + e.source.str());
    }
    if (requires_component(e.action) && !e.target_component) {
      problems.push_back("component-less " + std::string(to_string(e.action)) +
                         " edge");
    }
    if (e.target_component && !e.highlight_bounds && e.source != start_fingerprint() &&
        model.contains(e.source) && model.screen(e.source).screenshot) {
      problems.push_back("edge without highlight bounds on captured screen");
    }
    has_launch = has_launch || e.action == Action::kLaunch;
  }
  if (!has_launch) problems.push_back("no LAUNCH edge");
  for (const auto& [fp, screen] : model.nodes()) {
    if (fp == start_fingerprint()) continue;
    auto expected = fingerprint_screen(screen.activity, screen.window,
                                       screen.components);
    if (expected != fp.str()) {
      problems.push_back("fingerprint does not match content: " + fp.str());
    }
    try {
      check_components(screen);
    } catch (const Error& e) {
      problems.push_back(e.what());
    }
  }
  return problems;
}

ModelStats model_stats(const AppExecutionModel& model) {
  ModelStats stats;
  stats.node_count = model.screen_count();
  stats.edge_count = model.edges().size();
  for (const auto& e : model.edges()) {
    stats.total_weight += e.weight;
    ++stats.weight_histogram[e.weight];
  }
  for (const auto& [fp, screen] : model.nodes()) {
    std::map<std::tuple<Action, std::optional<ComponentSignature>,
                        std::optional<SwipeDirection>>,
             std::set<Fingerprint>>
        targets;
    for (EdgeId id : model.outgoing(fp)) {
      const auto& e = model.edge(id);
      if (e.action == Action::kLaunch) continue;
      targets[{e.action, e.target_component, e.swipe_direction}].insert(e.target);
    }
    bool nondeterministic = std::any_of(
        targets.begin(), targets.end(), [](auto& kv) { return kv.second.size() > 1; });
    if (nondeterministic) stats.nondeterministic_nodes.push_back(fp);
  }
  return stats;
}

}  // namespace bugchat::model
