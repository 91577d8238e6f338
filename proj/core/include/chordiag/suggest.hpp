/**
 * @file suggest.hpp
 * @brief Ranked diagram suggestions and chained sequence continuation.
 */
#pragma once

#include <optional>
#include <span>
#include <vector>

#include "chordiag/chords.hpp"
#include "chordiag/encoding.hpp"
#include "chordiag/fretboard.hpp"
#include "chordiag/model.hpp"

namespace chordiag {

struct Annotations {
  double playability = 0.0;  ///< anatomical score
  bool unplayable = false;
  double pitch_f1 = 0.0;     ///< against the requested label
  bool missing_notes = false;  ///< some pitch class of the label is not played
  std::optional<double> chord_change_ease;  ///< only with a previous diagram
};

struct Suggestion {
  Diagram diagram;
  double score = 0.0;  ///< product of the chosen slots' row-normalized probabilities
  Annotations annotations;
};

struct RankedDiagram {
  Diagram diagram;
  double score;
};

/// The k best diagrams under a per-string factorized distribution (rows
/// already normalized), by best-first search over per-string slot ranks.
/// All-muted combinations are skipped.
std::vector<RankedDiagram> top_diagrams(std::span<const double, kDiagramWidth> normalized, int k);

Annotations annotate(const Diagram& diagram, const ChordLabel& label, const std::optional<Diagram>& previous);

/// Up to k suggestions, best first. The full model needs `previous`
/// (MissingContext otherwise); the baseline ignores it for prediction but
/// still uses it for the ease annotation.
std::vector<Suggestion> suggest(const SuggestionModel& model, const ChordLabel& label,
                                const std::optional<Diagram>& previous, int k);

/// diagrams[0] = first; each next diagram is the top suggestion given its
/// label and the diagram before it.
std::vector<Diagram> continue_sequence(const SuggestionModel& model, std::span<const ChordLabel> labels,
                                       const Diagram& first);

}  // namespace chordiag
