#include "chordiag/suggest.hpp"

#include <queue>
#include <set>

#include "chordiag/error.hpp"
#include "chordiag/metrics.hpp"

namespace chordiag {

namespace {

using Ranks = std::array<std::uint8_t, kStringCount>;

struct Node {
  double score;
  Ranks ranks;
};

// Highest score first; on ties the lexicographically larger rank vector,
// which moves lower strings off their best slot before higher ones.
struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.score != b.score) return a.score < b.score;
    return a.ranks < b.ranks;
  }
};

}  // namespace

std::vector<RankedDiagram> top_diagrams(std::span<const double, kDiagramWidth> normalized, int k) {
  std::array<std::array<int, kSlotsPerString>, kStringCount> order{};
  for (int s = 0; s < kStringCount; ++s) {
    order[static_cast<std::size_t>(s)] =
        ranked_slots(normalized.subspan(static_cast<std::size_t>(s * kSlotsPerString)).first<kSlotsPerString>());
  }
  auto slot = [&](int s, std::uint8_t rank) { return order[static_cast<std::size_t>(s)][rank]; };
  auto score_of = [&](const Ranks& r) {
    double p = 1.0;
    for (int s = 0; s < kStringCount; ++s) {
      p *= normalized[static_cast<std::size_t>(s * kSlotsPerString + slot(s, r[static_cast<std::size_t>(s)]))];
    }
    return p;
  };

  std::vector<RankedDiagram> out;
  if (k <= 0) return out;
  std::priority_queue<Node, std::vector<Node>, NodeOrder> frontier;
  std::set<Ranks> visited;
  const Ranks start{};
  frontier.push({score_of(start), start});
  visited.insert(start);

  while (!frontier.empty() && static_cast<int>(out.size()) < k) {
    const Node node = frontier.top();
    frontier.pop();
    Diagram::States states{};
    bool sounding = false;
    for (int s = 0; s < kStringCount; ++s) {
      const int sl = slot(s, node.ranks[static_cast<std::size_t>(s)]);
      states[static_cast<std::size_t>(s)] = sl == kMutedSlot ? StringState::muted() : StringState::fretted(sl);
      sounding = sounding || sl != kMutedSlot;
    }
    if (sounding) out.push_back({Diagram(states), node.score});
    for (int s = 0; s < kStringCount; ++s) {
      Ranks next = node.ranks;
      if (next[static_cast<std::size_t>(s)] + 1 >= kSlotsPerString) continue;
      ++next[static_cast<std::size_t>(s)];
      if (visited.insert(next).second) frontier.push({score_of(next), next});
    }
  }
  return out;
}

Annotations annotate(const Diagram& diagram, const ChordLabel& label, const std::optional<Diagram>& previous) {
  Annotations a;
  a.playability = anatomical_score(diagram);
  a.unplayable = a.playability < kUnplayableThreshold;
  const SetScores pitch = pitch_scores(diagram, label);
  a.pitch_f1 = pitch.f1;
  a.missing_notes = pitch.recall < 1.0;
  if (previous) a.chord_change_ease = chord_change_ease(*previous, diagram);
  return a;
}

std::vector<Suggestion> suggest(const SuggestionModel& model, const ChordLabel& label,
                                const std::optional<Diagram>& previous, int k) {
  const auto input = model_input(model.topology(), previous ? &*previous : nullptr, label);
  const auto normalized = normalize_rows(model.forward(input));
  std::vector<Suggestion> out;
  for (auto& ranked : top_diagrams(normalized, k)) {
    auto notes = annotate(ranked.diagram, label, previous);
    out.push_back({ranked.diagram, ranked.score, std::move(notes)});
  }
  return out;
}

std::vector<Diagram> continue_sequence(const SuggestionModel& model, std::span<const ChordLabel> labels,
                                       const Diagram& first) {
  std::vector<Diagram> out;
  if (labels.empty()) return out;
  out.push_back(first);
  for (std::size_t i = 1; i < labels.size(); ++i) {
    out.push_back(suggest(model, labels[i], out.back(), 1).front().diagram);
  }
  return out;
}

}  // namespace chordiag
