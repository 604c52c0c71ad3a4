#include "bugchat/predict/predictor.hpp"

#include <map>
#include <set>

#include "bugchat/errors.hpp"

namespace bugchat::predict {
namespace {

using model::EdgeId;
using model::Fingerprint;

struct Label {
  Rational likelihood;
  std::vector<std::uint32_t> edges;
  Fingerprint node;
};

// Better labels sort first.
bool better(const Label& a, const Label& b) {
  if (a.likelihood != b.likelihood) return a.likelihood > b.likelihood;
  if (a.edges.size() != b.edges.size()) return a.edges.size() < b.edges.size();
  return a.edges < b.edges;
}

struct LabelOrder {
  bool operator()(const Label& a, const Label& b) const {
    if (better(a, b)) return true;
    if (better(b, a)) return false;
    return a.node < b.node;
  }
};

std::string component_label(const model::ComponentSignature& c) {
  if (!c.text.empty()) return c.text;
  if (!c.content_description.empty()) return c.content_description;
  return std::string(model::display_name(c.kind));
}

}  // namespace

Rational edge_probability_exact(const model::AppExecutionModel& model, EdgeId id) {
  const auto& e = model.edge(id);
  return Rational(e.weight, model.outgoing_weight(e.source));
}

double edge_probability(const model::AppExecutionModel& model, EdgeId id) {
  return edge_probability_exact(model, id).convert_to<double>();
}

std::string caption_edge(const model::Interaction& edge) {
  auto label = edge.target_component ? component_label(*edge.target_component)
                                     : std::string("component");
  switch (edge.action) {
    case model::Action::kTap: return "Tap '" + label + "'";
    case model::Action::kType: return "Type into '" + label + "'";
    case model::Action::kLongTap: return "Long-press '" + label + "'";
    case model::Action::kSwipe:
      return edge.swipe_direction
                 ? "Swipe " + std::string(model::to_string(*edge.swipe_direction))
                 : std::string("Swipe");
    case model::Action::kBack: return "Press back";
    case model::Action::kLaunch: return "Open the app";
    case model::Action::kRotate: return "Rotate the device";
  }
  return "";
}

std::optional<PathPrediction> predict_path(const model::AppExecutionModel& model,
                                           const Fingerprint& current, const Fingerprint& ob) {
  model.screen(current);
  model.screen(ob);
  PathPrediction out;
  if (current == ob) return out;

  // Dijkstra over labels ordered by (likelihood desc, hops asc, edge ids).
  // Extending a label never improves it, and the order is preserved under
  // a common suffix, so the first settled label for each node is optimal.
  std::set<Label, LabelOrder> open;
  std::map<Fingerprint, Label> best;
  std::set<Fingerprint> settled;
  Label start{Rational(1), {}, current};
  best.emplace(current, start);
  open.insert(start);
  while (!open.empty()) {
    Label label = *open.begin();
    open.erase(open.begin());
    if (!settled.insert(label.node).second) continue;
    if (label.node == ob) {
      for (auto id : label.edges) out.path.push_back(EdgeId{id});
      out.likelihood = label.likelihood;
      out.batch = make_batch(model, out.path);
      return out;
    }
    auto total = model.outgoing_weight(label.node);
    for (EdgeId id : model.outgoing(label.node)) {
      const auto& e = model.edge(id);
      if (settled.count(e.target)) continue;
      Label next{label.likelihood * Rational(e.weight, total), label.edges, e.target};
      next.edges.push_back(id.value);
      auto it = best.find(e.target);
      if (it != best.end() && !better(next, it->second)) continue;
      if (it != best.end()) {
        open.erase(it->second);
        it->second = next;
      } else {
        best.emplace(e.target, next);
      }
      open.insert(std::move(next));
    }
  }
  return std::nullopt;
}

std::vector<StepSuggestion> make_batch(const model::AppExecutionModel& model,
                                       const std::vector<EdgeId>& path, std::size_t offset) {
  std::vector<StepSuggestion> batch;
  for (std::size_t i = offset; i < path.size() && batch.size() < kBatchSize; ++i) {
    const auto& e = model.edge(path[i]);
    batch.push_back({path[i], caption_edge(e), e.screenshot, e.highlight_bounds,
                     static_cast<int>(batch.size() + 1)});
  }
  return batch;
}

std::optional<PredictionCursor> start_prediction(const model::AppExecutionModel& model,
                                                 const Fingerprint& current,
                                                 const Fingerprint& ob) {
  auto prediction = predict_path(model, current, ob);
  if (!prediction || prediction->path.empty()) return std::nullopt;
  return PredictionCursor{current, ob, std::move(prediction->path), 0};
}

BatchAdvance next_batch(const model::AppExecutionModel& model, const PredictionCursor& cursor,
                        const Fingerprint& current_state, std::optional<int> selected_rank) {
  if (current_state != cursor.anchor) {
    throw Error(ErrorKind::kInvalidatedPrediction,
                "prediction is stale: the current state changed since it was made");
  }
  BatchAdvance out;
  if (!selected_rank) {
    if (cursor.offset + kBatchSize < cursor.path.size()) {
      PredictionCursor next = cursor;
      next.offset += kBatchSize;
      out.cursor = std::move(next);
    }
    return out;
  }
  std::size_t shown = std::min(kBatchSize, cursor.path.size() - cursor.offset);
  if (*selected_rank < 1 || static_cast<std::size_t>(*selected_rank) > shown) {
    throw Error(ErrorKind::kInvalidOption,
                "rank " + std::to_string(*selected_rank) + " is not in the current batch");
  }
  for (std::size_t i = 0; i < cursor.offset + *selected_rank; ++i) {
    out.accepted.push_back(cursor.path[i]);
  }
  out.cursor = start_prediction(model, model.edge(out.accepted.back()).target, cursor.target);
  return out;
}

}  // namespace bugchat::predict
