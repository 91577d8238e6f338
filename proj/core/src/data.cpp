#include "chordiag/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "chordiag/error.hpp"
#include "chordiag/random.hpp"

namespace chordiag {

namespace {

using nlohmann::json;

std::string transition_key(const Transition& t) {
  return format_label(t.prev_label) + ' ' + format_fingering(t.prev_diagram) + ' ' + format_label(t.next_label) +
         ' ' + format_fingering(t.next_diagram);
}

std::string where(const std::string& track_id, std::size_t event) {
  return "track '" + track_id + "' event " + std::to_string(event);
}

std::string required_string(const json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) {
    throw Error(ErrorCode::ParseError, std::string("missing string field '") + key + "'");
  }
  return it->get<std::string>();
}

template <typename Fn>
auto for_each_line(std::istream& in, Fn&& fn) {
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      fn(json::parse(line));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(number) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(number) + ": " + e.what());
    }
  }
}

}  // namespace

bool Transition::same_chords(const Transition& other) const {
  return prev_label == other.prev_label && prev_diagram == other.prev_diagram && next_label == other.next_label &&
         next_diagram == other.next_diagram;
}

std::vector<Transition> extract_transitions(const TrackEvents& track, int max_bar_gap) {
  struct Parsed {
    int bar;
    ChordLabel label;
    Diagram diagram;
  };
  std::vector<Parsed> parsed;
  parsed.reserve(track.events.size());
  for (std::size_t i = 0; i < track.events.size(); ++i) {
    const auto& e = track.events[i];
    if (e.bar < 0) throw Error(ErrorCode::ParseError, where(track.track_id, i) + ": negative bar index");
    if (i > 0 && e.bar < track.events[i - 1].bar) {
      throw Error(ErrorCode::ParseError, where(track.track_id, i) + ": events are not sorted by bar");
    }
    try {
      parsed.push_back({e.bar, parse_label(e.label), parse_fingering(e.fingering)});
    } catch (const Error& err) {
      throw Error(ErrorCode::ParseError, where(track.track_id, i) + ": " + err.what());
    }
  }

  std::vector<Transition> out;
  std::set<std::string> seen;
  for (std::size_t i = 1; i < parsed.size(); ++i) {
    const auto& a = parsed[i - 1];
    const auto& b = parsed[i];
    if (b.bar - a.bar > max_bar_gap) continue;
    Transition t{a.label, a.diagram, b.label, b.diagram, track.track_id};
    if (seen.insert(transition_key(t)).second) out.push_back(std::move(t));
  }
  return out;
}

Transition shift_transition(const Transition& t, int offset) {
  return Transition{transpose(t.prev_label, offset), shift(t.prev_diagram, offset), transpose(t.next_label, offset),
                    shift(t.next_diagram, offset), t.track_id};
}

std::vector<Transition> augment(std::span<const Transition> transitions, int max_fret) {
  std::vector<Transition> out;
  for (const auto& t : transitions) {
    out.push_back(t);
    if (t.prev_diagram.has_open_string() || t.next_diagram.has_open_string()) continue;
    // Diagrams without open strings always have a pressed fret (at least one string sounds).
    const int low = std::min(*t.prev_diagram.min_fretted_fret(), *t.next_diagram.min_fretted_fret());
    const int high = std::max(*t.prev_diagram.max_fretted_fret(), *t.next_diagram.max_fretted_fret());
    for (int offset = -1; low + offset >= 1; --offset) out.push_back(shift_transition(t, offset));
    for (int offset = 1; high + offset <= max_fret; ++offset) out.push_back(shift_transition(t, offset));
  }
  return out;
}

DataSplit split(std::span<const Transition> transitions, const SplitSpec& spec) {
  if (transitions.size() < 5) {
    throw Error(ErrorCode::TooFewTransitions,
                "need at least 5 transitions to split, got " + std::to_string(transitions.size()));
  }
  if (spec.train <= 0.0 || spec.validation <= 0.0 || spec.test <= 0.0 ||
      std::abs(spec.train + spec.validation + spec.test - 1.0) > 1e-9) {
    throw Error(ErrorCode::ParseError, "split ratios must be positive and sum to 1");
  }
  const std::size_t n = transitions.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(mix_seed(spec.seed, static_cast<std::uint64_t>(spec.split_index)));
  rng.shuffle(std::span<std::size_t>(order));

  const auto n_train = static_cast<std::size_t>(std::llround(spec.train * static_cast<double>(n)));
  const auto n_val = static_cast<std::size_t>(std::llround(spec.validation * static_cast<double>(n)));
  DataSplit out;
  for (std::size_t k = 0; k < n; ++k) {
    const auto& t = transitions[order[k]];
    if (k < n_train) {
      out.train.push_back(t);
    } else if (k < n_train + n_val) {
      out.validation.push_back(t);
    } else {
      out.test.push_back(t);
    }
  }
  return out;
}

CorpusStats stats(std::span<const Transition> transitions) {
  CorpusStats s;
  s.transitions = transitions.size();
  std::map<std::string, int> natures;
  std::map<std::string, std::set<std::string>> inventory;
  auto count = [&](const ChordLabel& label, const Diagram& diagram) {
    ++s.root_counts[static_cast<std::size_t>(label.root.value())];
    ++natures[std::string(label.nature.name)];
    inventory[format_label(label)].insert(format_fingering(diagram));
  };
  for (const auto& t : transitions) {
    count(t.prev_label, t.prev_diagram);
    count(t.next_label, t.next_diagram);
  }
  s.natures.assign(natures.begin(), natures.end());
  std::stable_sort(s.natures.begin(), s.natures.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });

  std::vector<int> per_label;
  for (const auto& [label, diagrams] : inventory) {
    s.labels.push_back({label, {diagrams.begin(), diagrams.end()}});
    per_label.push_back(static_cast<int>(diagrams.size()));
  }
  if (!per_label.empty()) {
    std::sort(per_label.begin(), per_label.end());
    const std::size_t mid = per_label.size() / 2;
    s.median_diagrams_per_label = per_label.size() % 2 == 1 ? per_label[mid] : 0.5 * (per_label[mid - 1] + per_label[mid]);
  }
  return s;
}

std::string CorpusStats::to_text(std::size_t top_natures) const {
  std::ostringstream out;
  out << "transitions " << transitions << "\n";
  out << "[roots]\n";
  for (int p = 0; p < 12; ++p) {
    out << pitch_class_name(PitchClass(p)) << " " << root_counts[static_cast<std::size_t>(p)] << "\n";
  }
  out << "[natures]\n";
  for (std::size_t i = 0; i < natures.size() && i < top_natures; ++i) {
    out << (natures[i].first == "maj" ? "M" : natures[i].first) << " " << natures[i].second << "\n";
  }
  out << "[diagrams_per_label]\n";
  for (const auto& l : labels) out << l.label << " " << l.diagrams.size() << "\n";
  out << "median_diagrams_per_label " << median_diagrams_per_label << "\n";
  return out.str();
}

std::vector<TrackEvents> read_tracks_jsonl(std::istream& in) {
  std::vector<TrackEvents> tracks;
  for_each_line(in, [&](const json& obj) {
    TrackEvents track;
    track.track_id = required_string(obj, "track_id");
    const auto events = obj.find("events");
    if (events == obj.end() || !events->is_array()) throw Error(ErrorCode::ParseError, "missing array field 'events'");
    for (const auto& e : *events) {
      const auto bar = e.find("bar");
      if (bar == e.end() || !bar->is_number_integer()) {
        throw Error(ErrorCode::ParseError, "event without integer 'bar' in track '" + track.track_id + "'");
      }
      track.events.push_back({bar->get<int>(), required_string(e, "label"), required_string(e, "fingering")});
    }
    tracks.push_back(std::move(track));
  });
  return tracks;
}

std::vector<Transition> read_transitions_jsonl(std::istream& in) {
  std::vector<Transition> out;
  for_each_line(in, [&](const json& obj) {
    out.push_back(Transition{parse_label(required_string(obj, "prev_label")),
                             parse_fingering(required_string(obj, "prev_fingering")),
                             parse_label(required_string(obj, "next_label")),
                             parse_fingering(required_string(obj, "next_fingering")),
                             obj.contains("track_id") ? required_string(obj, "track_id") : std::string{}});
  });
  return out;
}

void write_transitions_jsonl(std::ostream& out, std::span<const Transition> transitions) {
  for (const auto& t : transitions) {
    nlohmann::ordered_json obj;
    obj["track_id"] = t.track_id;
    obj["prev_label"] = format_label(t.prev_label);
    obj["prev_fingering"] = format_fingering(t.prev_diagram);
    obj["next_label"] = format_label(t.next_label);
    obj["next_fingering"] = format_fingering(t.next_diagram);
    out << obj.dump() << '\n';
  }
}

std::vector<Transition> load_transitions(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  try {
    return read_transitions_jsonl(in);
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

}  // namespace chordiag
