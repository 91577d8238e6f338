#include "chordiag/encoding.hpp"

#include <algorithm>
#include <numeric>

namespace chordiag {

namespace {

std::span<const double, kSlotsPerString> row_of(std::span<const double, kDiagramWidth> p, int string) {
  return p.subspan(static_cast<std::size_t>(string * kSlotsPerString)).first<kSlotsPerString>();
}

StringState slot_state(int slot) {
  return slot == kMutedSlot ? StringState::muted() : StringState::fretted(slot);
}

}  // namespace

std::array<double, kLabelWidth> LabelVector::flattened() const {
  std::array<double, kLabelWidth> out{};
  std::copy(bass.begin(), bass.end(), out.begin());
  std::copy(nature.begin(), nature.end(), out.begin() + 12);
  return out;
}

LabelVector encode_label(const ChordLabel& label) {
  LabelVector v;
  v.bass[static_cast<std::size_t>(label.bass.value())] = 1.0;
  for (PitchClass pc : pitch_classes(label).members()) v.nature[static_cast<std::size_t>(pc.value())] = 1.0;
  return v;
}

DiagramVector encode_diagram(const Diagram& diagram) {
  DiagramVector v{};
  for (int s = 0; s < kStringCount; ++s) {
    const int slot = diagram[s].is_muted() ? kMutedSlot : diagram[s].fret();
    v[static_cast<std::size_t>(s * kSlotsPerString + slot)] = 1.0;
  }
  return v;
}

std::vector<double> full_input(const Diagram& previous, const ChordLabel& label) {
  std::vector<double> out;
  out.reserve(kFullInputWidth);
  const auto prev = encode_diagram(previous);
  const auto lab = encode_label(label).flattened();
  out.insert(out.end(), prev.begin(), prev.end());
  out.insert(out.end(), lab.begin(), lab.end());
  return out;
}

std::vector<double> baseline_input(const ChordLabel& label) {
  const auto lab = encode_label(label).flattened();
  return {lab.begin(), lab.end()};
}

DiagramVector normalize_rows(std::span<const double, kDiagramWidth> probabilities) {
  DiagramVector out{};
  for (int s = 0; s < kStringCount; ++s) {
    const auto row = row_of(probabilities, s);
    const double sum = std::accumulate(row.begin(), row.end(), 0.0);
    for (int k = 0; k < kSlotsPerString; ++k) {
      const auto idx = static_cast<std::size_t>(s * kSlotsPerString + k);
      out[idx] = sum > 0.0 ? row[static_cast<std::size_t>(k)] / sum : 1.0 / kSlotsPerString;
    }
  }
  return out;
}

std::array<int, kSlotsPerString> ranked_slots(std::span<const double, kSlotsPerString> row) {
  std::array<int, kSlotsPerString> order{};
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return row[static_cast<std::size_t>(a)] > row[static_cast<std::size_t>(b)];
  });
  return order;
}

Diagram decode_probabilities(std::span<const double, kDiagramWidth> probabilities) {
  Diagram::States states{};
  bool any_sounding = false;
  for (int s = 0; s < kStringCount; ++s) {
    const auto row = row_of(probabilities, s);
    const auto best = std::max_element(row.begin(), row.end());  // first maximum = lowest slot
    const int slot = static_cast<int>(best - row.begin());
    states[static_cast<std::size_t>(s)] = slot_state(slot);
    any_sounding = any_sounding || slot != kMutedSlot;
  }
  if (!any_sounding) {
    int best_string = 0;
    int best_fret = 0;
    double best_ratio = -1.0;
    for (int s = 0; s < kStringCount; ++s) {
      const auto row = row_of(probabilities, s);
      const auto fret_it = std::max_element(row.begin(), row.end() - 1);
      const double muted = row[kMutedSlot];
      const double ratio = muted > 0.0 ? *fret_it / muted : *fret_it;
      if (ratio > best_ratio) {
        best_ratio = ratio;
        best_string = s;
        best_fret = static_cast<int>(fret_it - row.begin());
      }
    }
    states[static_cast<std::size_t>(best_string)] = StringState::fretted(best_fret);
  }
  return Diagram(states);
}

}  // namespace chordiag
