/**
 * @file encoding.hpp
 * @brief Vector encodings of chord labels and diagrams.
 *
 * Layouts (fixed across training, inference and the model file):
 *   label   : [bass one-hot 12 | pitch-class many-hot 12]              = 24
 *   diagram : 6 rows x 26 slots, row-major; slots 0..24 = fret, 25 = muted = 156
 *   input   : full model [previous diagram 156 | label 24]             = 180
 *             baseline   [label 24]                                    = 24
 */
#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "chordiag/chords.hpp"
#include "chordiag/fretboard.hpp"

namespace chordiag {

inline constexpr int kSlotsPerString = kMaxFret + 2;  // frets 0..24 + muted
inline constexpr int kMutedSlot = kMaxFret + 1;
inline constexpr int kLabelWidth = 24;
inline constexpr int kDiagramWidth = kStringCount * kSlotsPerString;  // 156
inline constexpr int kFullInputWidth = kDiagramWidth + kLabelWidth;   // 180
inline constexpr int kBaselineInputWidth = kLabelWidth;

/// Tag stored in model files so a reader can reject incompatible layouts.
inline constexpr std::string_view kInputLayoutTag = "prev156|bass12|pcs12";

struct LabelVector {
  std::array<double, 12> bass{};    ///< one-hot bass pitch class
  std::array<double, 12> nature{};  ///< many-hot pitch-class content

  std::array<double, kLabelWidth> flattened() const;
};

using DiagramVector = std::array<double, kDiagramWidth>;

struct EncodedPair {
  std::vector<double> input;  ///< 180 (full) or 24 (baseline) values
  DiagramVector target{};
};

LabelVector encode_label(const ChordLabel& label);
DiagramVector encode_diagram(const Diagram& diagram);

std::vector<double> full_input(const Diagram& previous, const ChordLabel& label);
std::vector<double> baseline_input(const ChordLabel& label);

/// Divides each string's 26 slots by their sum.
DiagramVector normalize_rows(std::span<const double, kDiagramWidth> probabilities);

/// Per-string argmax; ties go to the lower slot (open before fretted, fretted before muted).
///
/// An all-muted result is repaired by un-muting the single string whose best
/// fret has the highest probability relative to its muted slot.
Diagram decode_probabilities(std::span<const double, kDiagramWidth> probabilities);

/// Slots of one string ordered by decreasing probability, ties by lower index.
std::array<int, kSlotsPerString> ranked_slots(std::span<const double, kSlotsPerString> row);

}  // namespace chordiag
