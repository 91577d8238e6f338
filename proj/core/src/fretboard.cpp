#include "chordiag/fretboard.hpp"

#include <algorithm>
#include <charconv>

#include "chordiag/error.hpp"

namespace chordiag {

Diagram::Diagram(const States& strings) : strings_(strings) {
  bool any_sounding = false;
  for (const auto& s : strings_) {
    if (s.is_muted()) continue;
    if (s.fret() < 0 || s.fret() > kMaxFret) {
      throw Error(ErrorCode::FretOutOfRange, "fret " + std::to_string(s.fret()) + " outside 0.." +
                                                 std::to_string(kMaxFret));
    }
    any_sounding = true;
  }
  if (!any_sounding) throw Error(ErrorCode::AllMuted, "diagram has no sounding string");
}

int Diagram::sounding_count() const noexcept {
  return static_cast<int>(std::count_if(strings_.begin(), strings_.end(), [](auto s) { return s.is_sounding(); }));
}

int Diagram::muted_count() const noexcept { return kStringCount - sounding_count(); }

int Diagram::open_count() const noexcept {
  return static_cast<int>(std::count_if(strings_.begin(), strings_.end(), [](auto s) { return s.is_open(); }));
}

std::optional<int> Diagram::min_fretted_fret() const noexcept {
  std::optional<int> out;
  for (const auto& s : strings_) {
    if (s.is_fretted() && (!out || s.fret() < *out)) out = s.fret();
  }
  return out;
}

std::optional<int> Diagram::max_fretted_fret() const noexcept {
  std::optional<int> out;
  for (const auto& s : strings_) {
    if (s.is_fretted() && (!out || s.fret() > *out)) out = s.fret();
  }
  return out;
}

Diagram parse_fingering(std::string_view text) {
  Diagram::States states{};
  std::size_t count = 0;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = text.find('.', start);
    const std::string_view token = text.substr(start, dot == std::string_view::npos ? text.npos : dot - start);
    if (count < states.size()) {
      if (token == "x" || token == "X") {
        states[count] = StringState::muted();
      } else {
        int fret = 0;
        auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), fret);
        if (token.empty() || ec == std::errc::invalid_argument || ptr != token.data() + token.size()) {
          throw Error(ErrorCode::MalformedFingering,
                      "fingering '" + std::string(text) + "': bad token '" + std::string(token) + "'");
        }
        if (ec == std::errc::result_out_of_range || fret < 0 || fret > kMaxFret) {
          throw Error(ErrorCode::FretOutOfRange,
                      "fingering '" + std::string(text) + "': fret '" + std::string(token) + "' outside 0..24");
        }
        states[count] = StringState::fretted(fret);
      }
    }
    ++count;
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  if (count != states.size()) {
    throw Error(ErrorCode::WrongStringCount,
                "fingering '" + std::string(text) + "' has " + std::to_string(count) + " strings, expected 6");
  }
  return Diagram(states);
}

std::string format_fingering(const Diagram& diagram) {
  std::string out;
  for (int i = 0; i < kStringCount; ++i) {
    if (i > 0) out += '.';
    const auto s = diagram[i];
    out += s.is_muted() ? std::string("x") : std::to_string(s.fret());
  }
  return out;
}

std::vector<int> sounding_pitches(const Diagram& diagram, const Tuning& tuning) {
  std::vector<int> out;
  for (int i = 0; i < kStringCount; ++i) {
    if (diagram[i].is_sounding()) out.push_back(tuning.open_midi[static_cast<std::size_t>(i)] + diagram[i].fret());
  }
  return out;
}

PitchClassSet diagram_pitch_classes(const Diagram& diagram, const Tuning& tuning) {
  PitchClassSet out;
  for (int midi : sounding_pitches(diagram, tuning)) out.insert(PitchClass(midi));
  return out;
}

Diagram shift(const Diagram& diagram, int offset) {
  if (diagram.has_open_string()) {
    throw Error(ErrorCode::OpenStringUnshiftable, "cannot shift '" + format_fingering(diagram) + "': it has an open string");
  }
  Diagram::States out = diagram.strings();
  for (auto& s : out) {
    if (s.is_muted()) continue;
    const int moved = s.fret() + offset;
    if (moved < 1 || moved > kMaxFret) {
      throw Error(ErrorCode::FretOutOfRange, "shifting '" + format_fingering(diagram) + "' by " +
                                                 std::to_string(offset) + " leaves frets 1..24");
    }
    s = StringState::fretted(moved);
  }
  return Diagram(out);
}

std::optional<std::pair<int, int>> Fingering::finger_position(int finger) const {
  if (finger == 1 && barre) return std::pair{barre->first_string, barre->fret};
  for (const auto& p : placements) {
    if (p.finger == finger) return std::pair{p.string, p.fret};
  }
  return std::nullopt;
}

std::optional<Fingering> assign_fingering(const Diagram& diagram) {
  struct Pressed {
    int string;
    int fret;
  };
  std::vector<Pressed> pressed;
  for (int i = 0; i < kStringCount; ++i) {
    if (diagram[i].is_fretted()) pressed.push_back({i, diagram[i].fret()});
  }
  Fingering fingering;
  if (pressed.empty()) return fingering;

  std::stable_sort(pressed.begin(), pressed.end(), [](const Pressed& a, const Pressed& b) {
    return a.fret != b.fret ? a.fret < b.fret : a.string < b.string;
  });
  const int base = pressed.front().fret;
  const auto at_base = std::count_if(pressed.begin(), pressed.end(), [&](const Pressed& p) { return p.fret == base; });

  if (at_base >= 2 || pressed.size() > 4) {
    const int first = pressed.front().string;
    int last = kStringCount - 1;
    for (int s = first + 1; s < kStringCount; ++s) {
      if (diagram[s].is_open()) {
        last = s - 1;
        break;
      }
    }
    const auto covered = std::count_if(pressed.begin(), pressed.end(), [&](const Pressed& p) {
      return p.fret == base && p.string >= first && p.string <= last;
    });
    if (covered >= 2) fingering.barre = Barre{base, first, last};
  }

  int next_finger = fingering.barre ? 2 : 1;
  for (const auto& p : pressed) {
    if (fingering.barre && p.fret == base && p.string >= fingering.barre->first_string &&
        p.string <= fingering.barre->last_string) {
      continue;
    }
    const int finger = std::max(next_finger, std::min(1 + p.fret - base, 4));
    if (finger > 4) return std::nullopt;
    fingering.placements.push_back({finger, p.string, p.fret});
    next_finger = finger + 1;
  }
  return fingering;
}

int index_finger_fret(const Diagram& diagram) noexcept { return diagram.min_fretted_fret().value_or(0); }

}  // namespace chordiag
