/**
 * @file data.hpp
 * @brief Corpus ingestion, transition extraction, augmentation and splits.
 *
 * Track files are JSON Lines, one track per line:
 *   {"track_id": "...", "events": [{"bar": 0, "label": "Am", "fingering": "x.0.2.2.1.0"}, ...]}
 * Transition files are JSON Lines of
 *   {"track_id": "...", "prev_label": "Am", "prev_fingering": "...", "next_label": "F", "next_fingering": "..."}
 */
#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chordiag/chords.hpp"
#include "chordiag/fretboard.hpp"

namespace chordiag {

struct TrackEvent {
  int bar = 0;
  std::string label;
  std::string fingering;
};

struct TrackEvents {
  std::string track_id;
  std::vector<TrackEvent> events;  ///< sorted by bar
};

struct Transition {
  ChordLabel prev_label;
  Diagram prev_diagram;
  ChordLabel next_label;
  Diagram next_diagram;
  std::string track_id;

  /// Equal chords on both sides, ignoring provenance.
  bool same_chords(const Transition& other) const;
};

/// Consecutive events at most this many bars apart form a transition.
inline constexpr int kMaxBarGap = 2;

/// Adjacent chord pairs within `max_bar_gap` bars, one per unique transition.
/// Throws ParseError naming the offending event.
std::vector<Transition> extract_transitions(const TrackEvents& track, int max_bar_gap = kMaxBarGap);

/// Highest fret an up-shifted copy may reach.
inline constexpr int kAugmentMaxFret = 15;

/// Both diagrams shifted and both labels transposed by `offset`.
Transition shift_transition(const Transition& transition, int offset);

/// Originals followed by their fret-shifted copies. Transitions whose diagrams
/// contain an open string are passed through without copies.
std::vector<Transition> augment(std::span<const Transition> transitions, int max_fret = kAugmentMaxFret);

struct SplitSpec {
  double train = 0.6;
  double validation = 0.2;
  double test = 0.2;
  std::uint64_t seed = 0;
  int split_index = 0;
};

struct DataSplit {
  std::vector<Transition> train;
  std::vector<Transition> validation;
  std::vector<Transition> test;
};

/// Seeded shuffle keyed by (seed, split_index), then partition by ratio.
/// Throws TooFewTransitions below five transitions.
DataSplit split(std::span<const Transition> transitions, const SplitSpec& spec);

struct LabelInventory {
  std::string label;
  std::vector<std::string> diagrams;  ///< distinct fingerings, sorted
};

struct CorpusStats {
  std::size_t transitions = 0;
  std::array<int, 12> root_counts{};                   ///< chord occurrences per root
  std::vector<std::pair<std::string, int>> natures;    ///< descending count, then name
  std::vector<LabelInventory> labels;                  ///< sorted by label text
  double median_diagrams_per_label = 0.0;

  std::string to_text(std::size_t top_natures = 15) const;
};

/// Counts both chords of every transition.
CorpusStats stats(std::span<const Transition> transitions);

std::vector<TrackEvents> read_tracks_jsonl(std::istream& in);
std::vector<Transition> read_transitions_jsonl(std::istream& in);
void write_transitions_jsonl(std::ostream& out, std::span<const Transition> transitions);

std::vector<Transition> load_transitions(const std::string& path);

}  // namespace chordiag
