/**
 * @file metrics.hpp
 * @brief Evaluation metrics for chord diagram suggestions.
 *
 * Set metrics compare pitch-class or (string, fret) content. Playability uses
 * the fingering heuristic from fretboard.hpp; the chord-change ease combines
 * wrist and finger movement between two fingerings. Texture describes the
 * sound of a single diagram.
 */
#pragma once

#include <span>
#include <string>
#include <vector>

#include "chordiag/chords.hpp"
#include "chordiag/data.hpp"
#include "chordiag/fretboard.hpp"
#include "chordiag/model.hpp"

namespace chordiag {

struct SetScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  /// P = common/predicted, R = common/reference, F1 = 2PR/(P+R) (0 when P+R = 0).
  static SetScores from_counts(int common, int predicted, int reference);
};

SetScores pitch_scores(const Diagram& predicted, const ChordLabel& label);
/// Over (string, fret) pairs of sounding strings; muted strings carry no pair.
SetScores string_fret_scores(const Diagram& predicted, const Diagram& reference);
/// Slot-wise F1 between the one-hot encodings of two diagrams.
SetScores slot_scores(const Diagram& predicted, const Diagram& reference);

inline constexpr double kUnplayableThreshold = 0.2;

/// 0 for unfingerable diagrams, otherwise a penalty on fret span:
/// 1 up to two frets, falling linearly to 0 at five.
double anatomical_score(const Diagram& diagram);
bool is_unplayable(const Diagram& diagram);

struct HandMovement {
  int wrist = 0;    ///< index-finger fret difference
  int fingers = 0;  ///< summed Manhattan distance per finger, 1 per finger used by only one chord
};

HandMovement hand_movement(const Diagram& from, const Diagram& to);
/// 1 / (1 + wrist + fingers): 1 for no movement, towards 0 for large moves.
double chord_change_ease(const Diagram& from, const Diagram& to);

struct TextureProfile {
  double muted_ratio = 0.0;
  double open_ratio = 0.0;
  double string_centroid = 0.0;    ///< mean sounding string index / 5, low E = 0
  double unique_note_ratio = 0.0;  ///< distinct pitch classes / sounding strings
};

TextureProfile texture(const Diagram& diagram);
/// Component-wise |texture(a) - texture(b)|.
TextureProfile texture_delta(const Diagram& a, const Diagram& b);

/// Means over one test set, for either the model's predictions or the references.
struct EvaluationRow {
  double f1 = 0.0;
  double f1_pitch = 0.0;
  double f1_string_fret = 0.0;
  double unplayable = 0.0;
  double ease = 0.0;
  TextureProfile texture;
  TextureProfile texture_delta;  ///< previous diagram vs this one
};

struct SplitEvaluation {
  std::size_t test_size = 0;  ///< after de-duplication
  EvaluationRow model;
  EvaluationRow reference;
};

/// Keeps the first transition for every (next label, next diagram).
std::vector<Transition> deduplicate_test_set(std::span<const Transition> test);

/// De-duplicates, predicts with the model, and averages every metric. Throws EmptyTestSet.
SplitEvaluation evaluate(const SuggestionModel& model, std::span<const Transition> test);

struct MetricSummary {
  std::string key;
  double mean = 0.0;
  double stddev = 0.0;  ///< sample standard deviation across splits
};

struct EvaluationReport {
  Topology topology = Topology::Full;
  std::vector<SplitEvaluation> splits;

  std::vector<MetricSummary> summary() const;
  /// "key mean std" lines, fixed six-decimal formatting.
  std::string to_text() const;
};

}  // namespace chordiag
