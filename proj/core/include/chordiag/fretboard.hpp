/**
 * @file fretboard.hpp
 * @brief Chord diagrams on a six-string fretboard.
 *
 * A diagram holds one state per string, index 0 being the lowest-pitched
 * string. The text form is six dot-separated tokens from low to high
 * string, each "x" (muted) or a fret number, e.g. "x.0.2.2.1.0".
 */
#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chordiag/chords.hpp"

namespace chordiag {

inline constexpr int kStringCount = 6;
inline constexpr int kMaxFret = 24;  ///< highest fret; fret 0 is the open string

class StringState {
 public:
  constexpr StringState() = default;  ///< muted
  static constexpr StringState muted() noexcept { return StringState(kMutedValue); }
  static constexpr StringState fretted(int fret) noexcept { return StringState(static_cast<std::int8_t>(fret)); }

  constexpr bool is_muted() const noexcept { return value_ == kMutedValue; }
  constexpr bool is_open() const noexcept { return value_ == 0; }
  /// Pressed at fret 1 or above.
  constexpr bool is_fretted() const noexcept { return value_ > 0; }
  constexpr bool is_sounding() const noexcept { return value_ >= 0; }
  /// Fret number; meaningless for a muted string.
  constexpr int fret() const noexcept { return value_; }

  friend constexpr auto operator<=>(StringState, StringState) = default;

 private:
  static constexpr std::int8_t kMutedValue = -1;
  constexpr explicit StringState(std::int8_t v) : value_(v) {}
  std::int8_t value_ = kMutedValue;
};

class Diagram {
 public:
  using States = std::array<StringState, kStringCount>;

  /// Throws FretOutOfRange for frets outside [0, 24] and AllMuted when nothing sounds.
  explicit Diagram(const States& strings);

  const StringState& operator[](int string) const { return strings_[static_cast<std::size_t>(string)]; }
  const States& strings() const noexcept { return strings_; }

  int sounding_count() const noexcept;
  int muted_count() const noexcept;
  int open_count() const noexcept;
  bool has_open_string() const noexcept { return open_count() > 0; }
  /// Lowest and highest pressed fret; nullopt when no string is fretted.
  std::optional<int> min_fretted_fret() const noexcept;
  std::optional<int> max_fretted_fret() const noexcept;

  friend auto operator<=>(const Diagram&, const Diagram&) = default;

 private:
  States strings_;
};

struct Tuning {
  std::array<int, kStringCount> open_midi;

  static constexpr Tuning standard() noexcept { return Tuning{{40, 45, 50, 55, 59, 64}}; }
};

/// Throws MalformedFingering, WrongStringCount, FretOutOfRange or AllMuted.
Diagram parse_fingering(std::string_view text);
std::string format_fingering(const Diagram& diagram);

/// MIDI numbers of the sounding strings, low string first.
std::vector<int> sounding_pitches(const Diagram& diagram, const Tuning& tuning = Tuning::standard());
PitchClassSet diagram_pitch_classes(const Diagram& diagram, const Tuning& tuning = Tuning::standard());

/// Moves every pressed fret by `offset`. Diagrams with open strings cannot move
/// (OpenStringUnshiftable); results outside frets 1..24 raise FretOutOfRange.
Diagram shift(const Diagram& diagram, int offset);

struct FingerPlacement {
  int finger;  ///< 1 = index .. 4 = little finger
  int string;
  int fret;
  friend bool operator==(const FingerPlacement&, const FingerPlacement&) = default;
};

/// Index-finger barré pressing `fret` on strings first_string..last_string.
struct Barre {
  int fret;
  int first_string;
  int last_string;
  friend bool operator==(const Barre&, const Barre&) = default;
};

struct Fingering {
  std::vector<FingerPlacement> placements;  ///< notes not covered by the barré
  std::optional<Barre> barre;

  /// Reference (string, fret) of a finger, or nullopt when it is unused.
  /// A barré finger is located at its lowest covered string.
  std::optional<std::pair<int, int>> finger_position(int finger) const;
};

/// Deterministic fingering heuristic; nullopt means the diagram is unfingerable.
///
/// Pressed notes are visited in ascending (fret, string) order. When two or more
/// strings share the lowest fret, or more than four notes are pressed, the index
/// finger bars that fret from the lowest such string upward, stopping below the
/// first open string. Each remaining note takes the next free finger, skipping
/// ahead to match its distance in frets from the index finger.
std::optional<Fingering> assign_fingering(const Diagram& diagram);

/// Fret of the index finger: the lowest pressed fret, 0 when nothing is pressed.
int index_finger_fret(const Diagram& diagram) noexcept;

}  // namespace chordiag
