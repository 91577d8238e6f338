#include "chordiag/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>
#include <sstream>
#include <utility>

#include "chordiag/encoding.hpp"
#include "chordiag/error.hpp"

namespace chordiag {

namespace {

std::set<std::pair<int, int>> string_fret_pairs(const Diagram& d) {
  std::set<std::pair<int, int>> out;
  for (int s = 0; s < kStringCount; ++s) {
    if (d[s].is_sounding()) out.emplace(s, d[s].fret());
  }
  return out;
}

std::vector<std::pair<int, int>> finger_slots(const std::optional<Fingering>& f) {
  std::vector<std::pair<int, int>> out(4, {-1, -1});
  if (!f) return out;
  for (int finger = 1; finger <= 4; ++finger) {
    if (auto pos = f->finger_position(finger)) out[static_cast<std::size_t>(finger - 1)] = *pos;
  }
  return out;
}

void add_to(TextureProfile& acc, const TextureProfile& t) {
  acc.muted_ratio += t.muted_ratio;
  acc.open_ratio += t.open_ratio;
  acc.string_centroid += t.string_centroid;
  acc.unique_note_ratio += t.unique_note_ratio;
}

void scale(TextureProfile& t, double k) {
  t.muted_ratio *= k;
  t.open_ratio *= k;
  t.string_centroid *= k;
  t.unique_note_ratio *= k;
}

void accumulate(EvaluationRow& row, const Transition& t, const Diagram& d) {
  row.f1 += slot_scores(d, t.next_diagram).f1;
  row.f1_pitch += pitch_scores(d, t.next_label).f1;
  row.f1_string_fret += string_fret_scores(d, t.next_diagram).f1;
  row.unplayable += is_unplayable(d) ? 1.0 : 0.0;
  row.ease += chord_change_ease(t.prev_diagram, d);
  add_to(row.texture, texture(d));
  add_to(row.texture_delta, texture_delta(t.prev_diagram, d));
}

void finish(EvaluationRow& row, std::size_t n) {
  const double k = 1.0 / static_cast<double>(n);
  row.f1 *= k;
  row.f1_pitch *= k;
  row.f1_string_fret *= k;
  row.unplayable *= k;
  row.ease *= k;
  scale(row.texture, k);
  scale(row.texture_delta, k);
}

}  // namespace

SetScores SetScores::from_counts(int common, int predicted, int reference) {
  SetScores s;
  s.precision = predicted > 0 ? static_cast<double>(common) / predicted : 0.0;
  s.recall = reference > 0 ? static_cast<double>(common) / reference : 0.0;
  const double sum = s.precision + s.recall;
  s.f1 = sum > 0.0 ? 2.0 * s.precision * s.recall / sum : 0.0;
  return s;
}

SetScores pitch_scores(const Diagram& predicted, const ChordLabel& label) {
  const PitchClassSet played = diagram_pitch_classes(predicted);
  const PitchClassSet expected = pitch_classes(label);
  return SetScores::from_counts((played & expected).size(), played.size(), expected.size());
}

SetScores string_fret_scores(const Diagram& predicted, const Diagram& reference) {
  const auto a = string_fret_pairs(predicted);
  const auto b = string_fret_pairs(reference);
  const auto common = std::count_if(a.begin(), a.end(), [&](const auto& p) { return b.contains(p); });
  return SetScores::from_counts(static_cast<int>(common), static_cast<int>(a.size()), static_cast<int>(b.size()));
}

SetScores slot_scores(const Diagram& predicted, const Diagram& reference) {
  const auto a = encode_diagram(predicted);
  const auto b = encode_diagram(reference);
  int common = 0, pa = 0, pb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    pa += a[i] > 0.5;
    pb += b[i] > 0.5;
    common += a[i] > 0.5 && b[i] > 0.5;
  }
  return SetScores::from_counts(common, pa, pb);
}

double anatomical_score(const Diagram& diagram) {
  if (!assign_fingering(diagram)) return 0.0;
  const auto low = diagram.min_fretted_fret();
  if (!low) return 1.0;
  const int span = *diagram.max_fretted_fret() - *low;
  return std::clamp(1.0 - std::max(0, span - 2) / 3.0, 0.0, 1.0);
}

bool is_unplayable(const Diagram& diagram) { return anatomical_score(diagram) < kUnplayableThreshold; }

HandMovement hand_movement(const Diagram& from, const Diagram& to) {
  HandMovement m;
  m.wrist = std::abs(index_finger_fret(from) - index_finger_fret(to));
  const auto a = finger_slots(assign_fingering(from));
  const auto b = finger_slots(assign_fingering(to));
  for (std::size_t f = 0; f < 4; ++f) {
    const bool in_a = a[f].first >= 0;
    const bool in_b = b[f].first >= 0;
    if (in_a && in_b) {
      m.fingers += std::abs(a[f].first - b[f].first) + std::abs(a[f].second - b[f].second);
    } else if (in_a != in_b) {
      m.fingers += 1;
    }
  }
  return m;
}

double chord_change_ease(const Diagram& from, const Diagram& to) {
  const auto m = hand_movement(from, to);
  return 1.0 / (1.0 + m.wrist + m.fingers);
}

TextureProfile texture(const Diagram& diagram) {
  TextureProfile t;
  const int sounding = diagram.sounding_count();
  t.muted_ratio = diagram.muted_count() / static_cast<double>(kStringCount);
  t.open_ratio = diagram.open_count() / static_cast<double>(kStringCount);
  int index_sum = 0;
  for (int s = 0; s < kStringCount; ++s) {
    if (diagram[s].is_sounding()) index_sum += s;
  }
  t.string_centroid = static_cast<double>(index_sum) / sounding / (kStringCount - 1);
  t.unique_note_ratio = static_cast<double>(diagram_pitch_classes(diagram).size()) / sounding;
  return t;
}

TextureProfile texture_delta(const Diagram& a, const Diagram& b) {
  const auto ta = texture(a);
  const auto tb = texture(b);
  return {std::abs(ta.muted_ratio - tb.muted_ratio), std::abs(ta.open_ratio - tb.open_ratio),
          std::abs(ta.string_centroid - tb.string_centroid), std::abs(ta.unique_note_ratio - tb.unique_note_ratio)};
}

std::vector<Transition> deduplicate_test_set(std::span<const Transition> test) {
  std::vector<Transition> out;
  std::set<std::string> seen;
  for (const auto& t : test) {
    if (seen.insert(format_label(t.next_label) + ' ' + format_fingering(t.next_diagram)).second) out.push_back(t);
  }
  return out;
}

SplitEvaluation evaluate(const SuggestionModel& model, std::span<const Transition> test) {
  const auto unique = deduplicate_test_set(test);
  if (unique.empty()) throw Error(ErrorCode::EmptyTestSet, "evaluation needs a non-empty test set");
  SplitEvaluation out;
  out.test_size = unique.size();
  for (const auto& t : unique) {
    const auto input = model_input(model.topology(), &t.prev_diagram, t.next_label);
    const auto probabilities = normalize_rows(model.forward(input));
    accumulate(out.model, t, decode_probabilities(probabilities));
    accumulate(out.reference, t, t.next_diagram);
  }
  finish(out.model, unique.size());
  finish(out.reference, unique.size());
  return out;
}

std::vector<MetricSummary> EvaluationReport::summary() const {
  using Getter = std::function<double(const EvaluationRow&)>;
  const std::vector<std::pair<std::string, Getter>> fields = {
      {"f1", [](const EvaluationRow& r) { return r.f1; }},
      {"f1_p", [](const EvaluationRow& r) { return r.f1_pitch; }},
      {"f1_sf", [](const EvaluationRow& r) { return r.f1_string_fret; }},
      {"unplayable", [](const EvaluationRow& r) { return r.unplayable; }},
      {"ease", [](const EvaluationRow& r) { return r.ease; }},
      {"muted_notes", [](const EvaluationRow& r) { return r.texture.muted_ratio; }},
      {"muted_notes_delta", [](const EvaluationRow& r) { return r.texture_delta.muted_ratio; }},
      {"open_strings", [](const EvaluationRow& r) { return r.texture.open_ratio; }},
      {"open_strings_delta", [](const EvaluationRow& r) { return r.texture_delta.open_ratio; }},
      {"string_centroid", [](const EvaluationRow& r) { return r.texture.string_centroid; }},
      {"string_centroid_delta", [](const EvaluationRow& r) { return r.texture_delta.string_centroid; }},
      {"unique_notes", [](const EvaluationRow& r) { return r.texture.unique_note_ratio; }},
      {"unique_notes_delta", [](const EvaluationRow& r) { return r.texture_delta.unique_note_ratio; }},
  };
  std::vector<MetricSummary> out;
  for (const char* source : {"model", "test_set"}) {
    const bool is_model = std::string_view(source) == "model";
    for (const auto& [name, get] : fields) {
      std::vector<double> values;
      for (const auto& s : splits) values.push_back(get(is_model ? s.model : s.reference));
      MetricSummary m{std::string(source) + "." + name, 0.0, 0.0};
      if (!values.empty()) {
        for (double v : values) m.mean += v;
        m.mean /= static_cast<double>(values.size());
      }
      if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - m.mean) * (v - m.mean);
        m.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
      }
      out.push_back(std::move(m));
    }
  }
  return out;
}

std::string EvaluationReport::to_text() const {
  std::ostringstream out;
  out << "topology " << to_string(topology) << "\n";
  out << "splits " << splits.size() << "\n";
  out << "test_sizes";
  for (const auto& s : splits) out << " " << s.test_size;
  out << "\n";
  out << "metric mean std\n";
  char buf[128];
  for (const auto& m : summary()) {
    std::snprintf(buf, sizeof buf, "%s %.6f %.6f\n", m.key.c_str(), m.mean, m.stddev);
    out << buf;
  }
  return out.str();
}

}  // namespace chordiag
