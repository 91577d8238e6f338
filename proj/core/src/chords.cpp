#include "chordiag/chords.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <optional>

#include "chordiag/error.hpp"

namespace chordiag {

namespace {

constexpr std::array<std::string_view, 12> kSharpNames = {"C",  "C#", "D",  "D#", "E",  "F",
                                                         "F#", "G",  "G#", "A",  "A#", "B"};

struct NatureEntry {
  ChordNature nature;
  std::array<std::string_view, 4> aliases;  // empty entries are unused
};

// Interval sets of extended chords carry every stacked tone.
constexpr std::array<NatureEntry, 25> kNatures = {{
    {{"maj", {0, 4, 7}}, {"", "M", "major"}},
    {{"m", {0, 3, 7}}, {"min", "-", "minor"}},
    {{"5", {0, 7}}, {}},
    {{"7", {0, 4, 7, 10}}, {"dom7"}},
    {{"m7", {0, 3, 7, 10}}, {"min7", "-7"}},
    {{"maj7", {0, 4, 7, 11}}, {"7M", "M7", "Maj7"}},
    {{"mmaj7", {0, 3, 7, 11}}, {"m7M", "mM7", "minmaj7"}},
    {{"sus2", {0, 2, 7}}, {}},
    {{"sus4", {0, 5, 7}}, {"sus"}},
    {{"7sus4", {0, 5, 7, 10}}, {"7sus"}},
    {{"dim", {0, 3, 6}}, {"o", "°"}},
    {{"dim7", {0, 3, 6, 9}}, {"o7", "°7"}},
    {{"m7b5", {0, 3, 6, 10}}, {"min7b5", "ø", "ø7"}},
    {{"aug", {0, 4, 8}}, {"+", "#5"}},
    {{"6", {0, 4, 7, 9}}, {"M6"}},
    {{"m6", {0, 3, 7, 9}}, {"min6"}},
    {{"add9", {0, 2, 4, 7}}, {"add2"}},
    {{"madd9", {0, 2, 3, 7}}, {"madd2", "m(add9)"}},
    {{"9", {0, 2, 4, 7, 10}}, {}},
    {{"m9", {0, 2, 3, 7, 10}}, {"min9"}},
    {{"maj9", {0, 2, 4, 7, 11}}, {"7M9", "M9"}},
    {{"11", {0, 2, 4, 5, 7, 10}}, {}},
    {{"m11", {0, 2, 3, 5, 7, 10}}, {"min11"}},
    {{"13", {0, 2, 4, 5, 7, 9, 10}}, {}},
    {{"add11", {0, 4, 5, 7}}, {"add4"}},
}};

constexpr std::array<ChordNature, kNatures.size()> make_canonical() {
  std::array<ChordNature, kNatures.size()> out{};
  for (std::size_t i = 0; i < kNatures.size(); ++i) out[i] = kNatures[i].nature;
  return out;
}
constexpr auto kCanonical = make_canonical();

// Letter + optional accidental at the front of `text`; returns pitch class and consumed length.
std::optional<std::pair<PitchClass, std::size_t>> read_note(std::string_view text) {
  if (text.empty()) return std::nullopt;
  static constexpr std::array<int, 7> kLetters = {9, 11, 0, 2, 4, 5, 7};  // A..G
  const char letter = text[0];
  if (letter < 'A' || letter > 'G') return std::nullopt;
  int value = kLetters[static_cast<std::size_t>(letter - 'A')];
  std::size_t used = 1;
  if (text.size() > 1 && (text[1] == '#' || text[1] == 'b')) {
    value += text[1] == '#' ? 1 : -1;
    used = 2;
  }
  return std::pair{PitchClass(value), used};
}

}  // namespace

std::string_view pitch_class_name(PitchClass pc) noexcept {
  return kSharpNames[static_cast<std::size_t>(pc.value())];
}

int PitchClassSet::size() const noexcept { return std::popcount(mask_); }

PitchClassSet PitchClassSet::transposed(int semitones) const noexcept {
  PitchClassSet out;
  for (int p = 0; p < 12; ++p) {
    if (contains(PitchClass(p))) out.insert(PitchClass(p + semitones));
  }
  return out;
}

std::vector<PitchClass> PitchClassSet::members() const {
  std::vector<PitchClass> out;
  for (int p = 0; p < 12; ++p) {
    if (contains(PitchClass(p))) out.emplace_back(p);
  }
  return out;
}

std::span<const ChordNature> known_natures() noexcept { return kCanonical; }

ChordNature nature_from_token(std::string_view token) {
  for (const auto& entry : kNatures) {
    if (entry.nature.name == token) return entry.nature;
    for (auto alias : entry.aliases) {
      // Only the major entry registers the empty token.
      if (alias == token && (!alias.empty() || entry.nature.name == "maj")) return entry.nature;
    }
  }
  throw Error(ErrorCode::UnknownNature, "unknown chord nature '" + std::string(token) + "'");
}

std::string_view nature_suffix(const ChordNature& nature) noexcept {
  return nature.name == "maj" ? std::string_view{} : nature.name;
}

ChordLabel parse_label(std::string_view text) {
  auto root = read_note(text);
  if (!root) {
    throw Error(ErrorCode::MalformedRoot, "chord label '" + std::string(text) + "' does not start with a note A-G");
  }
  std::string_view rest = text.substr(root->second);

  std::string_view bass_text;
  bool has_bass = false;
  if (auto slash = rest.find('/'); slash != std::string_view::npos) {
    bass_text = rest.substr(slash + 1);
    rest = rest.substr(0, slash);
    has_bass = true;
  }

  ChordLabel label{root->first, nature_from_token(rest), root->first};
  if (has_bass) {
    auto bass = read_note(bass_text);
    if (!bass || bass->second != bass_text.size()) {
      throw Error(ErrorCode::MalformedBass, "chord label '" + std::string(text) + "' has a malformed bass note");
    }
    label.bass = bass->first;
  }
  return label;
}

std::string format_label(const ChordLabel& label) {
  std::string out(pitch_class_name(label.root));
  out += nature_suffix(label.nature);
  if (label.is_slash()) {
    out += '/';
    out += pitch_class_name(label.bass);
  }
  return out;
}

PitchClassSet pitch_classes(const ChordLabel& label) noexcept {
  PitchClassSet out = label.nature.intervals.transposed(label.root.value());
  out.insert(label.bass);
  return out;
}

ChordLabel transpose(const ChordLabel& label, int semitones) noexcept {
  return ChordLabel{label.root.transposed(semitones), label.nature, label.bass.transposed(semitones)};
}

}  // namespace chordiag
