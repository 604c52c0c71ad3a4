#pragma once

#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "bugchat/model/execution_model.hpp"
#include "bugchat/text/parser.hpp"

namespace bugchat::match {

enum class Verdict { kSingle, kMultiple, kNone };

std::string_view to_string(Verdict verdict);

struct MatchConfig {
  double screen_threshold = 0.5;
  double edge_threshold = 0.5;
  std::size_t page_size = 5;
};

struct ScreenCandidate {
  model::Fingerprint fingerprint;
  double score = 0;

  bool operator==(const ScreenCandidate&) const = default;
};

/// All qualifying screens, best first; callers page through them.
struct ScreenMatchResult {
  Verdict verdict = Verdict::kNone;
  std::vector<ScreenCandidate> candidates;
  std::size_t page_size = 5;

  std::size_t page_count() const;
  std::span<const ScreenCandidate> page(std::size_t index) const;
};

struct EdgeCandidate {
  model::EdgeId edge;
  double score = 0;
  int hop = 0;
  // The edge bridging current state and `edge` when hop == 1.
  std::optional<model::EdgeId> inferred_prefix;

  bool operator==(const EdgeCandidate&) const = default;
};

struct EdgeMatchResult {
  Verdict verdict = Verdict::kNone;
  std::vector<EdgeCandidate> candidates;
  std::size_t page_size = 5;

  std::size_t page_count() const;
  std::span<const EdgeCandidate> page(std::size_t index) const;
};

/// subject ∪ object ∪ object2 minus the GENERIC words.
std::set<std::string> screen_query(const text::ParsedPhrase& phrase,
                                   const text::Lexicon& lexicon);

/// Object tokens minus the GENERIC words.
std::set<std::string> component_query(const text::ParsedPhrase& phrase,
                                      const text::Lexicon& lexicon);

/// GUI actions the phrase's verb may denote. An object mentioning "back"
/// also admits BACK ("go back", "press the back button"). FRAGMENTs map
/// to nothing.
std::set<model::Action> mapped_actions(const text::ParsedPhrase& phrase,
                                       const text::Lexicon& lexicon);

/// Words describing an edge's component: its text, content description
/// and kind synonyms, plus the swipe direction.
std::set<std::string> edge_label(const model::Interaction& edge,
                                 const text::Lexicon& lexicon);

/// |query ∩ document| / |query|; 0 for an empty query.
double coverage(const std::set<std::string>& query,
                const std::vector<std::string>& sorted_terms);

class Matcher {
 public:
  explicit Matcher(const text::Lexicon& lexicon = text::Lexicon::builtin(),
                   MatchConfig config = {})
      : lexicon_(&lexicon), config_(config) {}

  ScreenMatchResult match_screen(const model::AppExecutionModel& model,
                                 const text::ParsedPhrase& phrase) const;

  /// Score of the phrase against one screen. Throws NotFoundError.
  double screen_score(const model::AppExecutionModel& model,
                      const text::ParsedPhrase& phrase,
                      const model::Fingerprint& fp) const;

  /// True iff the EB phrase scores at least the screen threshold against
  /// the OB screen. Throws NotFoundError.
  bool match_eb_against_ob(const model::AppExecutionModel& model,
                           const text::ParsedPhrase& phrase,
                           const model::Fingerprint& ob) const;

  double edge_score(const model::AppExecutionModel& model,
                    const text::ParsedPhrase& phrase, model::EdgeId edge) const;

  /// Hop-0 candidates among the edges leaving `current`; if none
  /// qualifies, edges one transition further with the connecting edge as
  /// inferred prefix. Throws NotFoundError for an unknown state.
  EdgeMatchResult match_step(const model::AppExecutionModel& model,
                             const text::ParsedPhrase& phrase,
                             const model::Fingerprint& current) const;

  const MatchConfig& config() const { return config_; }
  const text::Lexicon& lexicon() const { return *lexicon_; }

 private:
  double edge_score(const model::Interaction& edge,
                    const std::set<model::Action>& actions,
                    const std::set<std::string>& query) const;

  const text::Lexicon* lexicon_;
  MatchConfig config_;
};

}  // namespace bugchat::match
