#include "oracles/match_oracle.hpp"

#include <algorithm>

#include "bugchat/text/normalize.hpp"

namespace bugchat::oracle {
namespace {

bool contains(const std::vector<std::string>& v, const std::string& s) {
  for (const auto& x : v) {
    if (x == s) return true;
  }
  return false;
}

std::vector<std::string> without_generic(const std::vector<std::string>& tokens,
                                         const text::Lexicon& lexicon) {
  std::vector<std::string> out;
  for (const auto& t : tokens) {
    if (lexicon.generic().count(t)) continue;
    if (!contains(out, t)) out.push_back(t);
  }
  return out;
}

std::string verdict(std::size_t n) {
  return n == 0 ? "NONE" : n == 1 ? "SINGLE" : "MULTIPLE";
}

std::vector<std::string> actions_of(const text::ParsedPhrase& phrase,
                                    const text::Lexicon& lexicon) {
  std::vector<std::string> out;
  if (phrase.sentence_type == text::SentenceType::kFragment) return out;
  for (const auto& [verb, actions] : lexicon.verb_actions()) {
    if (verb == phrase.action) out = actions;
  }
  if (contains(phrase.object, "back")) out.push_back("BACK");
  return out;
}

double score_edge(const model::Interaction& e, const std::vector<std::string>& actions,
                  const std::vector<std::string>& query, const text::Lexicon& lexicon) {
  std::string action(model::to_string(e.action));
  if (!contains(actions, action)) return 0;
  if (action == "BACK" || action == "ROTATE" || action == "LAUNCH") return 1;
  if (query.empty()) return 1;
  std::vector<std::string> label;
  if (e.target_component) {
    std::string words = e.target_component->text + " " + e.target_component->content_description;
    for (const auto& [kind, synonyms] : lexicon.kind_synonyms()) {
      if (kind != model::to_string(e.target_component->kind)) continue;
      for (const auto& s : synonyms) words += " " + s;
    }
    label = text::normalize_tokens(words, lexicon);
  }
  if (e.swipe_direction) label.push_back(text::to_lower(model::to_string(*e.swipe_direction)));
  int hits = 0;
  for (const auto& q : query) hits += contains(label, q) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(query.size());
}

}  // namespace

ScreenRank brute_force_screens(const model::AppExecutionModel& model,
                               const text::ParsedPhrase& phrase,
                               const text::Lexicon& lexicon, double threshold) {
  std::vector<std::string> all = phrase.subject;
  all.insert(all.end(), phrase.object.begin(), phrase.object.end());
  all.insert(all.end(), phrase.object2.begin(), phrase.object2.end());
  auto query = without_generic(all, lexicon);

  ScreenRank out;
  if (!query.empty()) {
    for (const auto& [fp, screen] : model.nodes()) {
      if (fp.str() == "START") continue;
      auto doc = model::screen_document(screen, lexicon);
      int hits = 0;
      for (const auto& q : query) hits += contains(doc, q) ? 1 : 0;
      double score = static_cast<double>(hits) / static_cast<double>(query.size());
      if (score >= threshold) out.ranking.emplace_back(fp.str(), score);
    }
  }
  // Selection sort: score descending, fingerprint ascending.
  for (std::size_t i = 0; i < out.ranking.size(); ++i) {
    for (std::size_t j = i + 1; j < out.ranking.size(); ++j) {
      auto& a = out.ranking[i];
      auto& b = out.ranking[j];
      if (b.second > a.second || (b.second == a.second && b.first < a.first)) std::swap(a, b);
    }
  }
  out.verdict = verdict(out.ranking.size());
  return out;
}

EdgeRank brute_force_edges(const model::AppExecutionModel& model,
                           const text::ParsedPhrase& phrase,
                           const model::Fingerprint& state,
                           const text::Lexicon& lexicon, double threshold) {
  auto actions = actions_of(phrase, lexicon);
  auto query = without_generic(phrase.object, lexicon);
  auto edges = model.edges();
  EdgeRank out;
  if (!actions.empty()) {
    for (std::uint32_t i = 0; i < edges.size(); ++i) {
      if (edges[i].source != state) continue;
      double s = score_edge(edges[i], actions, query, lexicon);
      if (s >= threshold) out.ranking.emplace_back(i, s, 0, -1);
    }
    if (out.ranking.empty()) {
      for (std::uint32_t i = 0; i < edges.size(); ++i) {
        if (edges[i].source != state) continue;
        for (std::uint32_t k = 0; k < edges.size(); ++k) {
          if (edges[k].source != edges[i].target) continue;
          double s = score_edge(edges[k], actions, query, lexicon);
          if (s < threshold) continue;
          bool merged = false;
          for (auto& [edge, score, hop, prefix] : out.ranking) {
            if (edge != k) continue;
            merged = true;
            auto w_old = edges[static_cast<std::size_t>(prefix)].weight;
            if (edges[i].weight > w_old ||
                (edges[i].weight == w_old && i < static_cast<std::uint32_t>(prefix))) {
              prefix = i;
            }
          }
          if (!merged) out.ranking.emplace_back(k, s, 1, static_cast<long>(i));
        }
      }
    }
  }
  std::sort(out.ranking.begin(), out.ranking.end(), [](const auto& a, const auto& b) {
    if (std::get<1>(a) != std::get<1>(b)) return std::get<1>(a) > std::get<1>(b);
    return std::make_tuple(std::get<2>(a), std::get<0>(a), std::get<3>(a)) <
           std::make_tuple(std::get<2>(b), std::get<0>(b), std::get<3>(b));
  });
  out.verdict = verdict(out.ranking.size());
  return out;
}

}  // namespace bugchat::oracle
