#include "cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "chordiag/data.hpp"
#include "chordiag/error.hpp"
#include "chordiag/experiment.hpp"
#include "chordiag/server.hpp"
#include "chordiag/suggest.hpp"

namespace chordiag::cli {

namespace {

namespace fs = std::filesystem;

const CLI::Validator kWritablePath(
    [](std::string& path) -> std::string {
      const fs::path parent = fs::path(path).parent_path();
      if (!parent.empty() && !fs::is_directory(parent)) return "directory " + parent.string() + " does not exist";
      return {};
    },
    "PATH", "writable path");

struct Options {
  // shared
  std::string data;
  std::string out;
  std::string model;
  // ingest
  std::string tracks;
  int max_bar_gap = kMaxBarGap;
  // stats
  std::size_t top_natures = 15;
  // augment
  int max_fret = kAugmentMaxFret;
  // train
  std::string topology = "full";
  std::string report;
  std::string activation = "relu";
  bool augment = false;
  std::uint64_t seed = 0;
  std::uint64_t split_seed = 0;
  int split_index = 0;
  TrainConfig train;
  // eval
  int splits = 4;
  // suggest / continue
  std::string label;
  std::string prev;
  int k = 5;
  std::vector<std::string> labels;
  std::string first;
  // serve
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string static_dir;
  bool cors = false;
};

// Writes to --out when given, otherwise to the command's standard output.
void emit(const Options& o, std::ostream& out, const std::string& text) {
  if (o.out.empty()) {
    out << text;
    return;
  }
  std::ofstream file(o.out, std::ios::binary | std::ios::trunc);
  if (!file) throw Error(ErrorCode::Io, "cannot write " + o.out);
  file << text;
}

std::string format_score(double v, const char* fmt = "%.6f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

// Fingering decorated like a lead sheet: '*' unplayable, '\'' missing chord tones.
std::string marked(const Diagram& d, const Annotations& a) {
  std::string s = format_fingering(d);
  if (a.unplayable) s += '*';
  if (a.missing_notes) s += '\'';
  return s;
}

std::string annotation_text(const Annotations& a) {
  std::string s = "playability=" + format_score(a.playability, "%.3f") +
                  " unplayable=" + (a.unplayable ? "yes" : "no") + " pitch_f1=" + format_score(a.pitch_f1, "%.3f");
  if (a.chord_change_ease) s += " ease=" + format_score(*a.chord_change_ease, "%.3f");
  return s;
}

HiddenActivation activation_from(const std::string& name) {
  if (name == "relu") return HiddenActivation::Relu;
  if (name == "sigmoid") return HiddenActivation::Sigmoid;
  return HiddenActivation::Tanh;
}

int cmd_ingest(const Options& o, std::ostream& out) {
  std::ifstream in(o.tracks);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + o.tracks);
  std::vector<TrackEvents> tracks;
  try {
    tracks = read_tracks_jsonl(in);
  } catch (const Error& e) {
    throw Error(e.code(), o.tracks + ": " + e.what());
  }
  std::vector<Transition> all;
  for (const auto& t : tracks) {
    auto found = extract_transitions(t, o.max_bar_gap);
    all.insert(all.end(), std::make_move_iterator(found.begin()), std::make_move_iterator(found.end()));
  }
  std::ostringstream text;
  write_transitions_jsonl(text, all);
  emit(o, out, text.str());
  return kExitOk;
}

int cmd_stats(const Options& o, std::ostream& out) {
  const auto transitions = load_transitions(o.data);
  emit(o, out, stats(transitions).to_text(o.top_natures));
  return kExitOk;
}

int cmd_augment(const Options& o, std::ostream& out) {
  const auto transitions = load_transitions(o.data);
  std::ostringstream text;
  write_transitions_jsonl(text, augment(transitions, o.max_fret));
  emit(o, out, text.str());
  return kExitOk;
}

int cmd_train(const Options& o, bool augment_given, std::ostream& out) {
  const auto corpus = load_transitions(o.data);
  ExperimentConfig config;
  config.topology = topology_from_string(o.topology);
  config.train = o.train;
  config.train.seed = o.seed;
  config.train.hidden_activation = activation_from(o.activation);
  config.split_seed = o.split_seed;
  config.split_index = o.split_index;
  config.augment = augment_given ? o.augment : default_augmentation(config.topology);

  const TrainResult result = train_on_split(corpus, config);
  save_model(result.model, o.out);
  if (!o.report.empty()) {
    std::ofstream report(o.report, std::ios::binary | std::ios::trunc);
    if (!report) throw Error(ErrorCode::Io, "cannot write " + o.report);
    report << result.report.to_text();
  }
  const auto& last = result.report.epochs.back();
  out << "trained " << to_string(config.topology) << " model on " << result.report.train_size << " pairs ("
      << (config.augment ? "augmented" : "not augmented") << "), " << result.report.epochs.size()
      << " epochs, best epoch " << result.report.best_epoch << ", final validation loss "
      << format_score(last.validation_loss) << "\n";
  return kExitOk;
}

int cmd_eval(const Options& o, std::ostream& out) {
  const auto model = load_model(o.model);
  const auto corpus = load_transitions(o.data);
  const ExperimentConfig config = experiment_from_metadata(model.metadata());
  EvaluationReport report;
  std::string protocol;
  if (o.splits == 1) {
    // Score the stored weights on the test part of the split they were trained on.
    report.topology = model.topology();
    report.splits.push_back(evaluate(model, test_portion(corpus, config)));
    protocol = "stored-weights";
  } else {
    // Retrain the recorded configuration once per split.
    report = cross_validate(corpus, config, o.splits);
    protocol = "retrain-per-split";
  }
  emit(o, out, "protocol " + protocol + "\n" + report.to_text());
  return kExitOk;
}

std::optional<Diagram> optional_fingering(const std::string& text) {
  if (text.empty()) return std::nullopt;
  return parse_fingering(text);
}

int cmd_suggest(const Options& o, std::ostream& out) {
  const auto model = load_model(o.model);
  const auto label = parse_label(o.label);
  const auto previous = optional_fingering(o.prev);
  std::ostringstream text;
  for (const auto& s : suggest(model, label, previous, o.k)) {
    text << marked(s.diagram, s.annotations) << " score=" << format_score(s.score) << " "
         << annotation_text(s.annotations) << "\n";
  }
  emit(o, out, text.str());
  return kExitOk;
}

int cmd_continue(const Options& o, std::ostream& out) {
  const auto model = load_model(o.model);
  std::vector<ChordLabel> labels;
  for (const auto& l : o.labels) labels.push_back(parse_label(l));
  const auto first = parse_fingering(o.first);
  const auto diagrams = continue_sequence(model, labels, first);
  std::ostringstream text;
  for (std::size_t i = 0; i < diagrams.size(); ++i) {
    std::optional<Diagram> previous;
    if (i > 0) previous = diagrams[i - 1];
    const auto notes = annotate(diagrams[i], labels[i], previous);
    text << format_label(labels[i]) << " " << marked(diagrams[i], notes) << " " << annotation_text(notes) << "\n";
  }
  emit(o, out, text.str());
  return kExitOk;
}

int cmd_serve(const Options& o, std::ostream& out) {
  server::Service service(std::make_shared<const SuggestionModel>(load_model(o.model)));
  server::ServerOptions options;
  options.host = o.host;
  options.port = o.port;
  options.static_dir = o.static_dir;
  options.permissive_cors = o.cors;
  server::HttpServer http(service, options);
  const int port = http.bind();
  if (port < 0) throw Error(ErrorCode::Io, "cannot bind " + o.host + ":" + std::to_string(o.port));
  out << "serving on http://" << o.host << ":" << port << std::endl;
  return http.serve() ? kExitOk : kExitDataError;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Context-aware guitar chord diagram suggestion", "chordiag"};
  app.require_subcommand(1);
  Options o;

  auto* ingest = app.add_subcommand("ingest", "Extract unique transitions from a tracks JSONL file");
  ingest->add_option("--tracks", o.tracks, "Tracks JSONL ({track_id, events:[{bar,label,fingering}]})")
      ->required()
      ->check(CLI::ExistingFile);
  ingest->add_option("--out", o.out, "Transitions JSONL output (default: stdout)")->check(kWritablePath);
  ingest->add_option("--max-bar-gap", o.max_bar_gap, "Largest bar distance between paired chords")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);

  auto* stats_cmd = app.add_subcommand("stats", "Root, nature and diagrams-per-label statistics");
  stats_cmd->add_option("--data", o.data, "Transitions JSONL")->required()->check(CLI::ExistingFile);
  stats_cmd->add_option("--top", o.top_natures, "Number of natures listed")->capture_default_str();
  stats_cmd->add_option("--out", o.out, "Output path (default: stdout)")->check(kWritablePath);

  auto* augment_cmd = app.add_subcommand("augment", "Fret-shift augmentation of a transitions file");
  augment_cmd->add_option("--data", o.data, "Transitions JSONL")->required()->check(CLI::ExistingFile);
  augment_cmd->add_option("--out", o.out, "Output path (default: stdout)")->check(kWritablePath);
  augment_cmd->add_option("--max-fret", o.max_fret, "Highest fret reachable by up-shifts")
      ->capture_default_str()
      ->check(CLI::Range(1, kMaxFret));

  auto* train_cmd = app.add_subcommand("train", "Train a model on one split and write the model file");
  train_cmd->add_option("--data", o.data, "Transitions JSONL")->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--out", o.out, "Model file to write")->required()->check(kWritablePath);
  train_cmd->add_option("--topology", o.topology, "Network topology")
      ->capture_default_str()
      ->check(CLI::IsMember({"baseline", "full"}));
  train_cmd->add_option("--report", o.report, "Per-epoch training report")->check(kWritablePath);
  train_cmd->add_option("--seed", o.seed, "Weight-init and shuffling seed")->capture_default_str();
  train_cmd->add_option("--split-seed", o.split_seed, "Data split seed")->capture_default_str();
  train_cmd->add_option("--split-index", o.split_index, "Which split to train on")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  train_cmd->add_option("--epochs", o.train.max_epochs, "Maximum epochs")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  train_cmd->add_option("--batch-size", o.train.batch_size, "Mini-batch size (0 = full batch)")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  train_cmd->add_option("--lr", o.train.learning_rate, "Adam learning rate")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  train_cmd->add_option("--hidden-activation", o.activation, "Hidden layer activation (full model)")
      ->capture_default_str()
      ->check(CLI::IsMember({"relu", "sigmoid", "tanh"}));
  auto* augment_flag = train_cmd->add_flag("--augment,!--no-augment", o.augment,
                                           "Fret-shift augmentation of the training split "
                                           "(default: on for full, off for baseline)");

  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a model configuration over data splits");
  eval_cmd->add_option("--model", o.model, "Model file")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--data", o.data, "Transitions JSONL")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--splits", o.splits,
                       "1 scores the stored weights on their own test split; N>1 retrains the stored "
                       "configuration on splits 0..N-1")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  eval_cmd->add_option("--out", o.out, "Report path (default: stdout)")->check(kWritablePath);

  auto* suggest_cmd = app.add_subcommand("suggest", "Suggest diagrams for a chord label");
  suggest_cmd->add_option("--model", o.model, "Model file")->required()->check(CLI::ExistingFile);
  suggest_cmd->add_option("--label", o.label, "Chord label, e.g. F or G/B")->required();
  suggest_cmd->add_option("--prev", o.prev, "Previous fingering, e.g. x.0.2.2.1.0 (required by full models)");
  suggest_cmd->add_option("--k", o.k, "Number of suggestions")->capture_default_str()->check(CLI::Range(1, 1000));
  suggest_cmd->add_option("--out", o.out, "Output path (default: stdout)")->check(kWritablePath);

  auto* continue_cmd = app.add_subcommand("continue", "Chain suggestions over a label sequence");
  continue_cmd->add_option("--model", o.model, "Model file")->required()->check(CLI::ExistingFile);
  continue_cmd->add_option("--labels", o.labels, "Chord labels in order (space or comma separated)")
      ->required()
      ->delimiter(',');
  continue_cmd->add_option("--first", o.first, "Fingering of the first chord")->required();
  continue_cmd->add_option("--out", o.out, "Output path (default: stdout)")->check(kWritablePath);

  auto* serve_cmd = app.add_subcommand("serve", "Start the HTTP suggestion service");
  serve_cmd->add_option("--model", o.model, "Model file")->required()->check(CLI::ExistingFile);
  serve_cmd->add_option("--host", o.host, "Bind address")->capture_default_str();
  serve_cmd->add_option("--port", o.port, "Port (0 = any free port)")->capture_default_str()->check(CLI::Range(0, 65535));
  serve_cmd->add_option("--static-dir", o.static_dir, "UI bundle served under /")->check(CLI::ExistingDirectory);
  serve_cmd->add_flag("--cors", o.cors, "Permissive cross-origin headers (development)");

  std::vector<const char*> argv;
  argv.push_back("chordiag");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (ingest->parsed()) return cmd_ingest(o, out);
    if (stats_cmd->parsed()) return cmd_stats(o, out);
    if (augment_cmd->parsed()) return cmd_augment(o, out);
    if (train_cmd->parsed()) return cmd_train(o, augment_flag->count() > 0, out);
    if (eval_cmd->parsed()) return cmd_eval(o, out);
    if (suggest_cmd->parsed()) return cmd_suggest(o, out);
    if (continue_cmd->parsed()) return cmd_continue(o, out);
    if (serve_cmd->parsed()) return cmd_serve(o, out);
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return kExitDataError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitDataError;
  }
  return kExitUsage;
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace chordiag::cli
