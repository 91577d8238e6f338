#include <gtest/gtest.h>

#include "chordiag/error.hpp"
#include "chordiag/metrics.hpp"
#include "corpus.hpp"
#include "oracles.hpp"

using namespace chordiag;

namespace {

Diagram D(const char* text) { return parse_fingering(text); }

void expect_scores(const SetScores& s, double p, double r, double f1) {
  EXPECT_NEAR(s.precision, p, 1e-12);
  EXPECT_NEAR(s.recall, r, 1e-12);
  EXPECT_NEAR(s.f1, f1, 1e-12);
}

// Baseline network that outputs the encoding of a fixed diagram per bass note.
SuggestionModel lookup_model(const std::vector<std::pair<ChordLabel, Diagram>>& table) {
  auto model = SuggestionModel::create(Topology::Baseline, TrainConfig{});
  auto& layer = model.network().layers().at(0);
  std::fill(layer.weights.begin(), layer.weights.end(), 0.0);
  std::fill(layer.bias.begin(), layer.bias.end(), -10.0);
  for (const auto& [label, diagram] : table) {
    const auto target = encode_diagram(diagram);
    for (int slot = 0; slot < kDiagramWidth; ++slot) {
      if (target[static_cast<std::size_t>(slot)] == 1.0) layer.weight(slot, label.bass.value()) = 20.0;
    }
  }
  return model;
}

}  // namespace

TEST(PitchScores, Examples) {
  expect_scores(pitch_scores(D("x.0.2.2.1.0"), parse_label("Am")), 1.0, 1.0, 1.0);
  expect_scores(pitch_scores(D("3.5.5.x.x.x"), parse_label("G")), 1.0, 2.0 / 3.0, 0.8);
  expect_scores(pitch_scores(D("0.0.0.0.0.0"), parse_label("C#")), 0.0, 0.0, 0.0);
}

TEST(StringFretScores, Examples) {
  expect_scores(string_fret_scores(D("3.2.0.0.0.3"), D("3.2.0.0.3.3")), 5.0 / 6.0, 5.0 / 6.0, 5.0 / 6.0);
  expect_scores(string_fret_scores(D("x.0.2.2.1.0"), D("x.0.2.2.1.0")), 1.0, 1.0, 1.0);
  expect_scores(string_fret_scores(D("x.0.2.2.1.0"), D("5.7.7.x.x.x")), 0.0, 0.0, 0.0);
  expect_scores(string_fret_scores(D("x.0.2.2.1.0"), D("0.0.2.2.1.0")), 1.0, 5.0 / 6.0, 10.0 / 11.0);
}

TEST(SlotScores, CountsMutedSlots) {
  expect_scores(slot_scores(D("x.0.2.2.1.0"), D("x.0.2.2.1.0")), 1.0, 1.0, 1.0);
  expect_scores(slot_scores(D("x.0.2.2.1.0"), D("x.x.2.2.1.0")), 5.0 / 6.0, 5.0 / 6.0, 5.0 / 6.0);
}

TEST(SetMetrics, MatchOracleOnRandomPairs) {
  Rng rng(31);
  for (int i = 0; i < 2000; ++i) {
    const auto a = testing_corpus::random_diagram(rng, 0.3, 5);
    const auto b = testing_corpus::random_diagram(rng, 0.3, 5);
    const auto label = testing_corpus::random_label(rng);
    const auto fa = format_fingering(a), fb = format_fingering(b);

    const auto sf = oracle::set_scores(oracle::string_fret_pairs(fa), oracle::string_fret_pairs(fb));
    const auto got_sf = string_fret_scores(a, b);
    EXPECT_EQ(got_sf.precision, sf.precision);
    EXPECT_EQ(got_sf.recall, sf.recall);
    EXPECT_EQ(got_sf.f1, sf.f1);

    std::vector<int> intervals;
    for (auto pc : label.nature.intervals.members()) intervals.push_back(pc.value());
    const auto p = oracle::set_scores(oracle::pitch_classes_of_fingering(fa),
                                      oracle::label_pitch_classes(label.root.value(), intervals, label.bass.value()));
    const auto got_p = pitch_scores(a, label);
    EXPECT_EQ(got_p.precision, p.precision);
    EXPECT_EQ(got_p.recall, p.recall);
    EXPECT_EQ(got_p.f1, p.f1);
  }
}

TEST(Anatomical, Examples) {
  EXPECT_EQ(anatomical_score(D("x.0.2.2.1.0")), 1.0);
  EXPECT_FALSE(is_unplayable(D("x.0.2.2.1.0")));
  EXPECT_EQ(anatomical_score(D("5.7.7.5.5.5")), 1.0);
  EXPECT_EQ(anatomical_score(D("1.3.5.7.9.11")), 0.0);
  EXPECT_TRUE(is_unplayable(D("1.3.5.7.9.11")));
  EXPECT_EQ(anatomical_score(D("x.x.2.4.5.7")), 0.0);
  EXPECT_TRUE(is_unplayable(D("x.x.2.4.5.7")));
  EXPECT_NEAR(anatomical_score(D("x.x.2.4.5.x")), 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(anatomical_score(D("x.3.5.7.x.x")), 1.0 / 3.0, 1e-12);
  EXPECT_EQ(anatomical_score(D("0.0.0.0.0.0")), 1.0);
}

TEST(Anatomical, BoundedAndMonotoneInSpan) {
  Rng rng(12);
  for (int i = 0; i < 3000; ++i) {
    const auto d = testing_corpus::random_diagram(rng, 0.3, 12);
    const double s = anatomical_score(d);
    EXPECT_GE(s, 0.0);
    EXPECT_LE(s, 1.0);
    if (auto lo = d.min_fretted_fret(); lo && *d.max_fretted_fret() - *lo >= 5) {
      EXPECT_TRUE(is_unplayable(d));
    }
  }
}

TEST(ChordChangeEase, Examples) {
  EXPECT_EQ(chord_change_ease(D("x.0.2.2.1.0"), D("x.0.2.2.1.0")), 1.0);
  const auto m = hand_movement(D("5.7.7.5.5.5"), D("7.9.9.7.7.7"));
  EXPECT_EQ(m.wrist, 2);
  EXPECT_EQ(m.fingers, 6);
  EXPECT_NEAR(chord_change_ease(D("5.7.7.5.5.5"), D("7.9.9.7.7.7")), 1.0 / 9.0, 1e-15);
  EXPECT_NEAR(chord_change_ease(D("5.7.7.5.5.5"), D("17.19.19.17.17.17")), 1.0 / 49.0, 1e-15);
}

TEST(ChordChangeEase, OneOnIdentityAndSymmetric) {
  Rng rng(13);
  for (int i = 0; i < 2000; ++i) {
    const auto a = testing_corpus::random_diagram(rng, 0.3, 12);
    const auto b = testing_corpus::random_diagram(rng, 0.3, 12);
    EXPECT_EQ(chord_change_ease(a, a), 1.0);
    const double cc = chord_change_ease(a, b);
    EXPECT_GT(cc, 0.0);
    EXPECT_LE(cc, 1.0);
    EXPECT_EQ(cc, chord_change_ease(b, a));
  }
}

TEST(Texture, Examples) {
  auto t = texture(D("x.0.2.2.1.0"));
  EXPECT_NEAR(t.muted_ratio, 1.0 / 6.0, 1e-15);
  EXPECT_NEAR(t.open_ratio, 2.0 / 6.0, 1e-15);
  EXPECT_NEAR(t.string_centroid, 0.6, 1e-15);
  EXPECT_NEAR(t.unique_note_ratio, 0.6, 1e-15);

  t = texture(D("0.0.0.0.0.0"));
  EXPECT_EQ(t.muted_ratio, 0.0);
  EXPECT_EQ(t.open_ratio, 1.0);
  EXPECT_NEAR(t.string_centroid, 0.5, 1e-15);
  EXPECT_NEAR(t.unique_note_ratio, 5.0 / 6.0, 1e-15);

  t = texture(D("5.7.7.5.5.5"));
  EXPECT_EQ(t.muted_ratio, 0.0);
  EXPECT_EQ(t.open_ratio, 0.0);
  EXPECT_NEAR(t.string_centroid, 0.5, 1e-15);
  EXPECT_NEAR(t.unique_note_ratio, 0.5, 1e-15);

  const auto d = texture_delta(D("x.0.2.2.1.0"), D("5.7.7.5.5.5"));
  EXPECT_NEAR(d.muted_ratio, 1.0 / 6.0, 1e-15);
  EXPECT_NEAR(d.open_ratio, 2.0 / 6.0, 1e-15);
  EXPECT_NEAR(d.string_centroid, 0.1, 1e-12);
  EXPECT_NEAR(d.unique_note_ratio, 0.1, 1e-12);
}

TEST(Texture, SingleStringExtremes) {
  EXPECT_EQ(texture(D("0.x.x.x.x.x")).string_centroid, 0.0);
  EXPECT_EQ(texture(D("x.x.x.x.x.3")).string_centroid, 1.0);
  EXPECT_EQ(texture(D("x.x.x.x.x.3")).unique_note_ratio, 1.0);
}

TEST(Evaluate, PerfectPredictorScoresOne) {
  std::vector<std::pair<ChordLabel, Diagram>> table;
  for (const auto& v : testing_corpus::two_position_voicings()) {
    const auto l = parse_label(v.label);
    if (l.nature.name == "maj") table.emplace_back(l, D(v.open));
  }
  const auto model = lookup_model(table);
  std::vector<Transition> test;
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto& prev = table[(i + 1) % table.size()];
    test.push_back(Transition{prev.first, prev.second, table[i].first, table[i].second, "t"});
  }
  test.push_back(test.front());
  const auto e = evaluate(model, test);
  EXPECT_EQ(e.test_size, table.size());
  EXPECT_DOUBLE_EQ(e.model.f1, 1.0);
  EXPECT_DOUBLE_EQ(e.model.f1_pitch, 1.0);
  EXPECT_DOUBLE_EQ(e.model.f1_string_fret, 1.0);
  EXPECT_DOUBLE_EQ(e.model.ease, e.reference.ease);
  EXPECT_DOUBLE_EQ(e.model.texture.open_ratio, e.reference.texture.open_ratio);
}

TEST(Evaluate, EmptyTestSetThrows) {
  const auto model = SuggestionModel::create(Topology::Baseline, TrainConfig{});
  EXPECT_THROW(evaluate(model, {}), Error);
}

TEST(Deduplicate, KeepsFirstPerLabelAndDiagram) {
  const Transition a{parse_label("C"), D("x.3.2.0.1.0"), parse_label("Am"), D("x.0.2.2.1.0"), "one"};
  Transition b = a;
  b.prev_label = parse_label("F");
  b.track_id = "two";
  Transition c = a;
  c.next_diagram = D("5.7.7.5.5.5");
  const std::vector<Transition> in{a, b, c};
  const auto out = deduplicate_test_set(in);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].track_id, "one");
  EXPECT_EQ(out[1].next_diagram, c.next_diagram);
}

TEST(Report, SampleStandardDeviation) {
  EvaluationReport r;
  r.topology = Topology::Full;
  for (double f : {0.5, 0.7}) {
    SplitEvaluation s;
    s.test_size = 3;
    s.model.f1 = f;
    r.splits.push_back(s);
  }
  const auto summary = r.summary();
  ASSERT_EQ(summary.size(), 26u);
  EXPECT_EQ(summary[0].key, "model.f1");
  EXPECT_NEAR(summary[0].mean, 0.6, 1e-15);
  EXPECT_NEAR(summary[0].stddev, std::sqrt(0.02), 1e-15);
  EXPECT_EQ(summary[13].key, "test_set.f1");
  EXPECT_NE(r.to_text().find("model.f1 0.600000 0.141421\n"), std::string::npos);
}
