/**
 * @file chords.hpp
 * @brief Chord-label parsing and pitch-class semantics.
 *
 * Grammar: Root Nature? ("/" Bass)?, where Root and Bass are an uppercase
 * letter A..G with an optional '#' or 'b'. Enharmonic spellings collapse
 * to one of twelve pitch classes; sharps are used when formatting.
 */
#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace chordiag {

/// One of the twelve equal-tempered pitch classes, C = 0 .. B = 11.
class PitchClass {
 public:
  constexpr PitchClass() = default;
  /// Any integer is reduced modulo 12.
  constexpr explicit PitchClass(int value) : value_(static_cast<std::uint8_t>(((value % 12) + 12) % 12)) {}

  constexpr int value() const noexcept { return value_; }
  constexpr PitchClass transposed(int semitones) const noexcept { return PitchClass(value_ + semitones); }

  friend constexpr auto operator<=>(PitchClass, PitchClass) = default;

 private:
  std::uint8_t value_ = 0;
};

/// Sharp spelling of a pitch class ("C", "C#", ..., "B").
std::string_view pitch_class_name(PitchClass pc) noexcept;

/// Small set of pitch classes stored as a 12-bit mask.
class PitchClassSet {
 public:
  constexpr PitchClassSet() = default;
  constexpr PitchClassSet(std::initializer_list<int> values) {
    for (int v : values) insert(PitchClass(v));
  }
  static constexpr PitchClassSet from_mask(std::uint16_t mask) {
    PitchClassSet s;
    s.mask_ = mask & 0x0FFFu;
    return s;
  }

  constexpr void insert(PitchClass pc) noexcept { mask_ |= static_cast<std::uint16_t>(1u << pc.value()); }
  constexpr bool contains(PitchClass pc) const noexcept { return (mask_ >> pc.value()) & 1u; }
  constexpr bool empty() const noexcept { return mask_ == 0; }
  constexpr std::uint16_t mask() const noexcept { return mask_; }
  int size() const noexcept;

  PitchClassSet transposed(int semitones) const noexcept;
  /// Members in ascending order.
  std::vector<PitchClass> members() const;

  friend constexpr PitchClassSet operator&(PitchClassSet a, PitchClassSet b) { return from_mask(a.mask_ & b.mask_); }
  friend constexpr PitchClassSet operator|(PitchClassSet a, PitchClassSet b) { return from_mask(a.mask_ | b.mask_); }
  friend constexpr bool operator==(PitchClassSet, PitchClassSet) = default;

 private:
  std::uint16_t mask_ = 0;
};

/// Chord quality: a canonical token and its intervals above the root.
struct ChordNature {
  std::string_view name;    ///< canonical token; "maj" for plain major
  PitchClassSet intervals;  ///< semitone offsets from the root, always containing 0

  friend bool operator==(const ChordNature& a, const ChordNature& b) { return a.name == b.name; }
};

/// Every supported nature, in canonical form.
std::span<const ChordNature> known_natures() noexcept;

/// Resolves a nature token or alias ("", "7M", "min", ...). Throws UnknownNature.
ChordNature nature_from_token(std::string_view token);

/// Token used when formatting a label: "" for major, otherwise the canonical name.
std::string_view nature_suffix(const ChordNature& nature) noexcept;

struct ChordLabel {
  PitchClass root;
  ChordNature nature;
  PitchClass bass;  ///< equals root unless the label is a slash chord

  bool is_slash() const noexcept { return bass != root; }
  friend bool operator==(const ChordLabel&, const ChordLabel&) = default;
};

/// Parses a chord label. Throws Error with MalformedRoot, UnknownNature or MalformedBass.
ChordLabel parse_label(std::string_view text);

/// Canonical text form, sharps for accidentals. Round-trips through parse_label.
std::string format_label(const ChordLabel& label);

/// Root and nature tones, plus the bass for slash chords.
PitchClassSet pitch_classes(const ChordLabel& label) noexcept;

/// Moves root and bass by the given number of semitones.
ChordLabel transpose(const ChordLabel& label, int semitones) noexcept;

}  // namespace chordiag
