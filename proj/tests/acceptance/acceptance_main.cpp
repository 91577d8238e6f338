// Acceptance suite: one PASS/FAIL line per criterion, each under its time budget.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "chordiag/data.hpp"
#include "chordiag/encoding.hpp"
#include "chordiag/experiment.hpp"
#include "chordiag/metrics.hpp"
#include "chordiag/model.hpp"
#include "corpus.hpp"
#include "oracles.hpp"

using namespace chordiag;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool ok;
  std::string detail;
};

int failures = 0;

void criterion(const char* name, double budget_seconds, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome r{false, ""};
  try {
    r = body();
  } catch (const std::exception& e) {
    r = {false, std::string("exception: ") + e.what()};
  }
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool in_time = budget_seconds <= 0.0 || elapsed < budget_seconds;
  const bool pass = r.ok && in_time;
  if (!pass) ++failures;
  char timing[96];
  if (budget_seconds > 0.0) {
    std::snprintf(timing, sizeof timing, "%.3fs of %.0fs", elapsed, budget_seconds);
  } else {
    std::snprintf(timing, sizeof timing, "%.3fs", elapsed);
  }
  std::printf("%s %s: %s [%s]%s\n", pass ? "PASS" : "FAIL", name, r.detail.c_str(), timing,
              in_time ? "" : " over budget");
  std::fflush(stdout);
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Outcome encoding_identities() {
  Rng rng(1001);
  int mismatches = 0;
  bool widths = true;
  for (int i = 0; i < 1000; ++i) {
    const auto d = testing_corpus::random_diagram(rng);
    const auto l = testing_corpus::random_label(rng);
    const auto v = encode_diagram(d);
    mismatches += decode_probabilities(v) != d;
    widths = widths && v.size() == 156 && encode_label(l).flattened().size() == 24 && full_input(d, l).size() == 180 &&
             baseline_input(l).size() == 24;
  }
  const auto full = SuggestionModel::create(Topology::Full, TrainConfig{});
  widths = widths && full.input_width() == 180 && full.network().output_width() == 156;
  return {mismatches == 0 && widths,
          std::to_string(1000 - mismatches) + "/1000 round trips, widths 24/156/180 " + (widths ? "ok" : "wrong")};
}

Outcome gradient_check() {
  Rng rng(2002);
  const HiddenActivation activations[] = {HiddenActivation::Relu, HiddenActivation::Sigmoid, HiddenActivation::Tanh};
  double worst = 0.0;
  for (int net_index = 0; net_index < 20; ++net_index) {
    const int in = 2 + static_cast<int>(rng.below(9));
    const int hidden = 2 + static_cast<int>(rng.below(9));
    const int out = 2 + static_cast<int>(rng.below(9));
    Mlp net({in, hidden, out}, activations[net_index % 3], rng.next());
    std::vector<double> x(static_cast<std::size_t>(in)), t(static_cast<std::size_t>(out));
    for (auto& v : x) v = rng.uniform(-1.0, 1.0);
    for (auto& v : t) v = rng.uniform() < 0.5 ? 0.0 : 1.0;

    auto grad = net.zero_like();
    net.accumulate_gradient(x, t, grad, 1.0);
    std::vector<double*> params;
    std::vector<double> analytic;
    for (std::size_t l = 0; l < net.layers().size(); ++l) {
      for (std::size_t i = 0; i < net.layers()[l].weights.size(); ++i) {
        params.push_back(&net.layers()[l].weights[i]);
        analytic.push_back(grad[l].weights[i]);
      }
      for (std::size_t i = 0; i < net.layers()[l].bias.size(); ++i) {
        params.push_back(&net.layers()[l].bias[i]);
        analytic.push_back(grad[l].bias[i]);
      }
    }
    const auto numeric = oracle::numeric_gradient([&] { return bce_loss(net.forward(x), t); }, params, 1e-6);
    worst = std::max(worst, oracle::relative_error(analytic, numeric));
  }
  return {worst < 1e-4, "20 networks, worst relative error " + fmt("%.2e", worst) + " (limit 1e-4)"};
}

Outcome memorization() {
  const auto corpus = testing_corpus::context_corpus(32, 3003);
  const auto pairs = encode_transitions(corpus, Topology::Full);
  TrainConfig cfg;
  cfg.max_epochs = 500;
  cfg.early_stop_patience = cfg.max_epochs;  // no held-out data: train for the whole budget
  cfg.seed = 3003;
  const auto a = train(Topology::Full, pairs, pairs, cfg);
  const auto b = train(Topology::Full, pairs, pairs, cfg);
  double f1 = 0.0;
  for (const auto& t : corpus) {
    const auto probs = normalize_rows(a.model.forward(full_input(t.prev_diagram, t.next_label)));
    f1 += slot_scores(decode_probabilities(probs), t.next_diagram).f1;
  }
  f1 /= static_cast<double>(corpus.size());
  const bool same = serialize_model(a.model) == serialize_model(b.model);
  return {f1 >= 0.95 && same, "training-set slot F1 " + fmt("%.4f", f1) + " after " +
                                  std::to_string(a.report.epochs.size()) + " epochs (need >= 0.95), repeat run " +
                                  (same ? "identical" : "differs")};
}

Outcome context_advantage() {
  const auto corpus = testing_corpus::context_corpus(500, 4004);
  auto mean_f1 = [&](Topology topology) {
    ExperimentConfig config;
    config.topology = topology;
    config.augment = default_augmentation(topology);
    config.split_seed = 4004;
    config.train.seed = 4004;
    return cross_validate(corpus, config, 4).summary().front().mean;
  };
  const double full = mean_f1(Topology::Full);
  const double base = mean_f1(Topology::Baseline);
  return {full - base >= 0.20, "full F1 " + fmt("%.4f", full) + ", baseline F1 " + fmt("%.4f", base) + ", gap " +
                                   fmt("%.4f", full - base) + " (need >= 0.20)"};
}

Outcome metric_oracles() {
  Rng rng(5005);
  int mismatches = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto a = testing_corpus::random_diagram(rng, 0.3, 7);
    const auto b = testing_corpus::random_diagram(rng, 0.3, 7);
    const auto label = testing_corpus::random_label(rng);
    const auto fa = format_fingering(a);
    std::vector<int> intervals;
    for (auto pc : label.nature.intervals.members()) intervals.push_back(pc.value());

    const auto p = oracle::set_scores(oracle::pitch_classes_of_fingering(fa),
                                      oracle::label_pitch_classes(label.root.value(), intervals, label.bass.value()));
    const auto gp = pitch_scores(a, label);
    const auto sf = oracle::set_scores(oracle::string_fret_pairs(fa), oracle::string_fret_pairs(format_fingering(b)));
    const auto gsf = string_fret_scores(a, b);
    mismatches += gp.precision != p.precision || gp.recall != p.recall || gp.f1 != p.f1;
    mismatches += gsf.precision != sf.precision || gsf.recall != sf.recall || gsf.f1 != sf.f1;
  }
  return {mismatches == 0, std::to_string(mismatches) + " mismatches over 1000 pitch and 1000 string/fret comparisons"};
}

Outcome playability_grid() {
  const StringState values[] = {StringState::muted(),     StringState::fretted(0), StringState::fretted(1),
                                StringState::fretted(2),  StringState::fretted(3), StringState::fretted(4),
                                StringState::fretted(5),  StringState::fretted(6), StringState::fretted(7),
                                StringState::fretted(9)};
  int checked = 0, must_flag = 0, missed = 0;
  for (int code = 0; code < 10000; ++code) {
    const int d0 = code % 10, d1 = code / 10 % 10, d2 = code / 100 % 10, d3 = code / 1000;
    const Diagram::States states{values[d0], values[d1], values[d2], values[d3], values[(d0 + d2 + 3) % 10],
                                 values[(d1 + d3 + 7) % 10]};
    bool sounding = false;
    for (const auto& s : states) sounding = sounding || s.is_sounding();
    if (!sounding) continue;
    const Diagram d(states);
    ++checked;
    std::set<int> frets;
    for (const auto& s : states) {
      if (s.is_fretted()) frets.insert(s.fret());
    }
    const bool wide = !frets.empty() && *frets.rbegin() - *frets.begin() >= 5;
    if (wide || frets.size() > 4) {
      ++must_flag;
      missed += !is_unplayable(d);
    }
  }
  const bool named = !is_unplayable(parse_fingering("x.0.2.2.1.0")) && !is_unplayable(parse_fingering("5.7.7.5.5.5"));
  return {missed == 0 && named && checked >= 9900,
          std::to_string(checked) + " grid diagrams, " + std::to_string(must_flag - missed) + "/" +
              std::to_string(must_flag) + " wide or over-fingered flagged, Am shapes " +
              (named ? "playable" : "flagged")};
}

Outcome chord_change() {
  Rng rng(7007);
  int identity_failures = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto d = testing_corpus::random_diagram(rng);
    identity_failures += chord_change_ease(d, d) != 1.0;
  }
  bool monotone = true;
  std::string sequence;
  for (const char* shape : {"5.7.7.5.5.5", "x.5.7.7.6.5", "x.x.5.5.5.8"}) {
    const auto base = parse_fingering(shape);
    double last = 1.0;
    for (int k = 1; k <= 7; ++k) {
      const double cc = chord_change_ease(base, shift(base, k));
      monotone = monotone && cc <= last;
      last = cc;
      if (shape[0] == '5') sequence += fmt(k == 1 ? "%.3f" : " %.3f", cc);
    }
  }
  return {identity_failures == 0 && monotone,
          "CC(d,d)=1 on 1000 diagrams" + std::string(identity_failures ? " violated" : "") +
              ", shifted 5.7.7.5.5.5 by 1..7: " + sequence + (monotone ? " non-increasing" : " increases")};
}

Outcome texture_bounds() {
  Rng rng(8008);
  int out_of_range = 0, asymmetric = 0, nonzero_self = 0;
  auto in_unit = [](double x) { return x >= 0.0 && x <= 1.0; };
  Diagram previous = parse_fingering("x.0.2.2.1.0");
  for (int i = 0; i < 10000; ++i) {
    const auto d = testing_corpus::random_diagram(rng);
    const auto t = texture(d);
    out_of_range += !(in_unit(t.muted_ratio) && in_unit(t.open_ratio) && in_unit(t.string_centroid) &&
                      in_unit(t.unique_note_ratio));
    const auto ab = texture_delta(previous, d), ba = texture_delta(d, previous), self = texture_delta(d, d);
    asymmetric += ab.muted_ratio != ba.muted_ratio || ab.open_ratio != ba.open_ratio ||
                  ab.string_centroid != ba.string_centroid || ab.unique_note_ratio != ba.unique_note_ratio;
    nonzero_self += self.muted_ratio != 0.0 || self.open_ratio != 0.0 || self.string_centroid != 0.0 ||
                    self.unique_note_ratio != 0.0;
    previous = d;
  }
  return {out_of_range + asymmetric + nonzero_self == 0,
          "10000 diagrams: " + std::to_string(out_of_range) + " out of [0,1], " + std::to_string(asymmetric) +
              " asymmetric deltas, " + std::to_string(nonzero_self) + " nonzero self deltas"};
}

Outcome augmentation() {
  const auto corpus = testing_corpus::mid_neck_corpus();
  std::size_t total = 0;
  int inconsistent = 0;
  for (const auto& original : corpus) {
    const std::vector<Transition> one{original};
    const auto out = augment(one);
    total += out.size();
    for (std::size_t j = 1; j < out.size(); ++j) {
      const auto& copy = out[j];
      const int k = *copy.prev_diagram.min_fretted_fret() - *original.prev_diagram.min_fretted_fret();
      bool ok = k != 0 && copy.prev_diagram == shift(original.prev_diagram, k) &&
                copy.next_diagram == shift(original.next_diagram, k);
      ok = ok && pitch_classes(copy.prev_label) == pitch_classes(original.prev_label).transposed(k) &&
           pitch_classes(copy.next_label) == pitch_classes(original.next_label).transposed(k);
      ok = ok && diagram_pitch_classes(copy.prev_diagram) == diagram_pitch_classes(original.prev_diagram).transposed(k) &&
           diagram_pitch_classes(copy.next_diagram) == diagram_pitch_classes(original.next_diagram).transposed(k);
      ok = ok && diagram_pitch_classes(copy.prev_diagram) == pitch_classes(copy.prev_label) &&
           diagram_pitch_classes(copy.next_diagram) == pitch_classes(copy.next_label);
      inconsistent += !ok;
    }
  }
  const double ratio = static_cast<double>(total) / static_cast<double>(corpus.size());
  return {inconsistent == 0 && ratio >= 3.0, std::to_string(corpus.size()) + " transitions -> " +
                                                 std::to_string(total) + " (" + fmt("%.2f", ratio) + "x, need >= 3x), " +
                                                 std::to_string(inconsistent) + " inconsistent copies"};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

Outcome cli_determinism() {
  const fs::path dir = fs::temp_directory_path() / "chordiag_acceptance_cli";
  fs::remove_all(dir);
  fs::create_directories(dir);
  {
    std::ofstream data(dir / "data.jsonl");
    write_transitions_jsonl(data, testing_corpus::context_corpus(200, 9009));
  }
  const std::string cli = CHORDIAG_CLI_PATH;
  auto run_once = [&](const std::string& tag) {
    const std::string model = (dir / ("model_" + tag + ".bin")).string();
    const std::string train_cmd = "\"" + cli + "\" train --data \"" + (dir / "data.jsonl").string() + "\" --out \"" +
                                  model + "\" --report \"" + (dir / ("train_" + tag + ".txt")).string() +
                                  "\" --seed 17 --split-seed 5 > /dev/null";
    const std::string eval_cmd = "\"" + cli + "\" eval --model \"" + model + "\" --data \"" +
                                 (dir / "data.jsonl").string() + "\" --splits 4 --out \"" +
                                 (dir / ("eval_" + tag + ".txt")).string() + "\"";
    return std::system(train_cmd.c_str()) == 0 && std::system(eval_cmd.c_str()) == 0;
  };
  const bool ran = run_once("a") && run_once("b");
  const bool model_same = slurp(dir / "model_a.bin") == slurp(dir / "model_b.bin");
  const bool train_same = slurp(dir / "train_a.txt") == slurp(dir / "train_b.txt");
  const bool eval_same = slurp(dir / "eval_a.txt") == slurp(dir / "eval_b.txt");
  const bool non_empty = !slurp(dir / "model_a.bin").empty() && !slurp(dir / "eval_a.txt").empty();
  fs::remove_all(dir);
  return {ran && model_same && train_same && eval_same && non_empty,
          std::string("train + eval twice: ") + (ran ? "" : "command failed, ") + "model " +
              (model_same ? "identical" : "differs") + ", training report " + (train_same ? "identical" : "differs") +
              ", eval report " + (eval_same ? "identical" : "differs")};
}

}  // namespace

int main() {
  criterion("encoding-identities", 1, encoding_identities);
  criterion("gradient-check", 10, gradient_check);
  criterion("memorization", 60, memorization);
  criterion("context-advantage", 300, context_advantage);
  criterion("metric-oracles", 5, metric_oracles);
  criterion("playability-grid", 10, playability_grid);
  criterion("chord-change-ease", 1, chord_change);
  criterion("texture-bounds", 5, texture_bounds);
  criterion("augmentation", 5, augmentation);
  criterion("cli-determinism", 0, cli_determinism);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
