#include "bugchat/match/matcher.hpp"

#include <algorithm>
#include <map>

#include "bugchat/errors.hpp"
#include "bugchat/text/normalize.hpp"

namespace bugchat::match {
namespace {

using model::Action;
using model::EdgeId;

Verdict verdict_for(std::size_t count) {
  if (count == 0) return Verdict::kNone;
  return count == 1 ? Verdict::kSingle : Verdict::kMultiple;
}

template <typename T>
std::span<const T> page_of(const std::vector<T>& items, std::size_t page_size,
                           std::size_t index) {
  std::size_t begin = std::min(items.size(), index * page_size);
  std::size_t end = std::min(items.size(), begin + page_size);
  return std::span<const T>(items).subspan(begin, end - begin);
}

std::size_t pages(std::size_t n, std::size_t page_size) {
  return page_size == 0 ? 0 : (n + page_size - 1) / page_size;
}

}  // namespace

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::kSingle: return "SINGLE";
    case Verdict::kMultiple: return "MULTIPLE";
    case Verdict::kNone: return "NONE";
  }
  return "NONE";
}

std::size_t ScreenMatchResult::page_count() const {
  return pages(candidates.size(), page_size);
}

std::span<const ScreenCandidate> ScreenMatchResult::page(std::size_t index) const {
  return page_of(candidates, page_size, index);
}

std::size_t EdgeMatchResult::page_count() const {
  return pages(candidates.size(), page_size);
}

std::span<const EdgeCandidate> EdgeMatchResult::page(std::size_t index) const {
  return page_of(candidates, page_size, index);
}

std::set<std::string> screen_query(const text::ParsedPhrase& phrase,
                                   const text::Lexicon& lexicon) {
  std::set<std::string> q;
  for (const auto& t : phrase.content_tokens()) {
    if (!lexicon.is_generic(t)) q.insert(t);
  }
  return q;
}

std::set<std::string> component_query(const text::ParsedPhrase& phrase,
                                      const text::Lexicon& lexicon) {
  std::set<std::string> q;
  for (const auto& t : phrase.object) {
    if (!lexicon.is_generic(t)) q.insert(t);
  }
  return q;
}

std::set<Action> mapped_actions(const text::ParsedPhrase& phrase,
                                const text::Lexicon& lexicon) {
  std::set<Action> out;
  if (phrase.sentence_type == text::SentenceType::kFragment) return out;
  if (auto it = lexicon.verb_actions().find(phrase.action);
      it != lexicon.verb_actions().end()) {
    for (const auto& name : it->second) {
      if (auto a = model::parse_action(name)) out.insert(*a);
    }
  }
  if (std::find(phrase.object.begin(), phrase.object.end(), "back") !=
      phrase.object.end()) {
    out.insert(Action::kBack);
  }
  return out;
}

std::set<std::string> edge_label(const model::Interaction& edge,
                                 const text::Lexicon& lexicon) {
  std::set<std::string> label;
  if (edge.target_component) {
    const auto& c = *edge.target_component;
    for (auto& t : text::normalize_tokens(c.text + " " + c.content_description, lexicon)) {
      label.insert(std::move(t));
    }
    auto synonyms = lexicon.kind_synonyms().find(std::string(model::to_string(c.kind)));
    if (synonyms != lexicon.kind_synonyms().end()) {
      for (const auto& word : synonyms->second) {
        for (auto& t : text::normalize_tokens(word, lexicon)) label.insert(std::move(t));
      }
    }
  }
  if (edge.swipe_direction) {
    label.insert(text::to_lower(model::to_string(*edge.swipe_direction)));
  }
  return label;
}

double coverage(const std::set<std::string>& query,
                const std::vector<std::string>& sorted_terms) {
  if (query.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& t : query) {
    if (std::binary_search(sorted_terms.begin(), sorted_terms.end(), t)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(query.size());
}

ScreenMatchResult Matcher::match_screen(const model::AppExecutionModel& model,
                                        const text::ParsedPhrase& phrase) const {
  ScreenMatchResult result;
  result.page_size = config_.page_size;
  auto query = screen_query(phrase, *lexicon_);
  if (query.empty()) return result;
  for (const auto& [fp, screen] : model.nodes()) {
    if (fp == model::start_fingerprint()) continue;
    double score = coverage(query, model.document_terms(fp));
    if (score >= config_.screen_threshold) result.candidates.push_back({fp, score});
  }
  std::stable_sort(result.candidates.begin(), result.candidates.end(),
                   [](const ScreenCandidate& a, const ScreenCandidate& b) {
                     return a.score > b.score;
                   });
  result.verdict = verdict_for(result.candidates.size());
  return result;
}

double Matcher::screen_score(const model::AppExecutionModel& model,
                             const text::ParsedPhrase& phrase,
                             const model::Fingerprint& fp) const {
  if (!model.contains(fp) || fp == model::start_fingerprint()) {
    throw NotFoundError("unknown screen " + fp.str());
  }
  return coverage(screen_query(phrase, *lexicon_), model.document_terms(fp));
}

bool Matcher::match_eb_against_ob(const model::AppExecutionModel& model,
                                  const text::ParsedPhrase& phrase,
                                  const model::Fingerprint& ob) const {
  return screen_score(model, phrase, ob) >= config_.screen_threshold;
}

double Matcher::edge_score(const model::Interaction& edge,
                           const std::set<Action>& actions,
                           const std::set<std::string>& query) const {
  if (!actions.count(edge.action)) return 0.0;
  bool targetless = edge.action == Action::kBack || edge.action == Action::kRotate ||
                    edge.action == Action::kLaunch;
  if (targetless || query.empty()) return 1.0;
  auto label = edge_label(edge, *lexicon_);
  std::size_t hits = 0;
  for (const auto& t : query) hits += label.count(t);
  return static_cast<double>(hits) / static_cast<double>(query.size());
}

double Matcher::edge_score(const model::AppExecutionModel& model,
                           const text::ParsedPhrase& phrase, EdgeId edge) const {
  return edge_score(model.edge(edge), mapped_actions(phrase, *lexicon_),
                    component_query(phrase, *lexicon_));
}

EdgeMatchResult Matcher::match_step(const model::AppExecutionModel& model,
                                    const text::ParsedPhrase& phrase,
                                    const model::Fingerprint& current) const {
  EdgeMatchResult result;
  result.page_size = config_.page_size;
  auto outgoing = model.outgoing(current);  // throws for unknown states
  auto actions = mapped_actions(phrase, *lexicon_);
  if (actions.empty()) return result;
  auto query = component_query(phrase, *lexicon_);

  for (EdgeId id : outgoing) {
    double score = edge_score(model.edge(id), actions, query);
    if (score >= config_.edge_threshold) result.candidates.push_back({id, score, 0, {}});
  }

  if (result.candidates.empty()) {
    // One candidate per second edge; the heaviest connecting edge wins.
    std::map<EdgeId, EdgeCandidate> best;
    for (EdgeId first : outgoing) {
      const auto& bridge = model.edge(first);
      for (EdgeId second : model.outgoing(bridge.target)) {
        double score = edge_score(model.edge(second), actions, query);
        if (score < config_.edge_threshold) continue;
        auto [it, inserted] = best.try_emplace(second, EdgeCandidate{second, score, 1, first});
        if (!inserted) {
          const auto& held = model.edge(*it->second.inferred_prefix);
          if (bridge.weight > held.weight) it->second.inferred_prefix = first;
        }
      }
    }
    for (auto& [id, candidate] : best) result.candidates.push_back(candidate);
  }

  std::sort(result.candidates.begin(), result.candidates.end(),
            [](const EdgeCandidate& a, const EdgeCandidate& b) {
              if (a.score != b.score) return a.score > b.score;
              if (a.hop != b.hop) return a.hop < b.hop;
              if (a.edge != b.edge) return a.edge < b.edge;
              return a.inferred_prefix < b.inferred_prefix;
            });
  result.verdict = verdict_for(result.candidates.size());
  return result;
}

}  // namespace bugchat::match
