#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <string>
#include <vector>

#include "bugchat/model/execution_model.hpp"

namespace bugchat::predict {

using Rational = boost::multiprecision::cpp_rational;

inline constexpr std::size_t kBatchSize = 5;

/// weight(e) / sum of weights leaving e.source.
Rational edge_probability_exact(const model::AppExecutionModel& model, model::EdgeId edge);
double edge_probability(const model::AppExecutionModel& model, model::EdgeId edge);

/// "Tap 'Save'", "Type into 'amount'", "Swipe UP", "Press back", ...
std::string caption_edge(const model::Interaction& edge);

struct StepSuggestion {
  model::EdgeId edge;
  std::string caption;
  std::optional<std::string> screenshot;
  std::optional<model::Bounds> highlight_bounds;
  int rank = 0;  // 1-based within its batch

  bool operator==(const StepSuggestion&) const = default;
};

struct PathPrediction {
  std::vector<model::EdgeId> path;
  Rational likelihood{1};
  std::vector<StepSuggestion> batch;

  double likelihood_value() const { return likelihood.convert_to<double>(); }
};

/// Most likely path from `current` to `ob`: maximal product of edge
/// probabilities, then fewest edges, then lexicographically smallest
/// edge-key sequence. Empty path when current == ob; nullopt when `ob`
/// is unreachable. Throws NotFoundError for unknown fingerprints.
std::optional<PathPrediction> predict_path(const model::AppExecutionModel& model,
                                           const model::Fingerprint& current,
                                           const model::Fingerprint& ob);

/// Suggestions for path[offset, offset + 5).
std::vector<StepSuggestion> make_batch(const model::AppExecutionModel& model,
                                       const std::vector<model::EdgeId>& path,
                                       std::size_t offset = 0);

/// Prediction state kept by a session between turns.
struct PredictionCursor {
  model::Fingerprint anchor;  // state the path starts from
  model::Fingerprint target;  // the OB screen
  std::vector<model::EdgeId> path;
  std::size_t offset = 0;     // first path index shown in the batch

  std::vector<StepSuggestion> batch(const model::AppExecutionModel& model) const {
    return make_batch(model, path, offset);
  }
  bool operator==(const PredictionCursor&) const = default;
};

/// A cursor over the most likely path, or nullopt when there is nothing
/// to suggest (current == ob, or ob unreachable).
std::optional<PredictionCursor> start_prediction(const model::AppExecutionModel& model,
                                                 const model::Fingerprint& current,
                                                 const model::Fingerprint& ob);

struct BatchAdvance {
  // Path edges from the anchor up to the selection; earlier pages count
  // as passed through.
  std::vector<model::EdgeId> accepted;
  std::optional<PredictionCursor> cursor;  // next prediction, if any
};

/// With a selected rank, accepts the path up to that suggestion and
/// re-predicts from its target. Without one, moves to the next page of
/// the same path (nullopt when the path is exhausted). Throws
/// Error(kInvalidatedPrediction) when `current_state` is not the cursor's
/// anchor and Error(kInvalidOption) for ranks outside the batch.
BatchAdvance next_batch(const model::AppExecutionModel& model, const PredictionCursor& cursor,
                        const model::Fingerprint& current_state,
                        std::optional<int> selected_rank);

}  // namespace bugchat::predict
