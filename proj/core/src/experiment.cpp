#include "chordiag/experiment.hpp"

namespace chordiag {

namespace {

SplitSpec spec_for(const ExperimentConfig& config) {
  SplitSpec spec;
  spec.seed = config.split_seed;
  spec.split_index = config.split_index;
  return spec;
}

}  // namespace

bool default_augmentation(Topology topology) noexcept { return topology == Topology::Full; }

std::vector<EncodedPair> encode_transitions(std::span<const Transition> transitions, Topology topology) {
  std::vector<EncodedPair> out;
  out.reserve(transitions.size());
  for (const auto& t : transitions) {
    out.push_back({model_input(topology, &t.prev_diagram, t.next_label), encode_diagram(t.next_diagram)});
  }
  return out;
}

TrainResult train_on_split(std::span<const Transition> corpus, const ExperimentConfig& config) {
  DataSplit parts = split(corpus, spec_for(config));
  if (config.augment) parts.train = augment(parts.train);
  const auto train_pairs = encode_transitions(parts.train, config.topology);
  const auto validation_pairs = encode_transitions(parts.validation, config.topology);
  TrainResult result = train(config.topology, train_pairs, validation_pairs, config.train);
  auto& meta = result.model.metadata();
  meta.split_seed = config.split_seed;
  meta.split_index = config.split_index;
  meta.augmented = config.augment;
  return result;
}

ExperimentConfig experiment_from_metadata(const ModelMetadata& metadata) {
  ExperimentConfig config;
  config.topology = metadata.topology;
  config.train = metadata.config;
  config.split_seed = metadata.split_seed;
  config.split_index = metadata.split_index;
  config.augment = metadata.augmented;
  return config;
}

std::vector<Transition> test_portion(std::span<const Transition> corpus, const ExperimentConfig& config) {
  return split(corpus, spec_for(config)).test;
}

EvaluationReport cross_validate(std::span<const Transition> corpus, ExperimentConfig config, int splits) {
  EvaluationReport report;
  report.topology = config.topology;
  for (int i = 0; i < splits; ++i) {
    config.split_index = i;
    const TrainResult trained = train_on_split(corpus, config);
    report.splits.push_back(evaluate(trained.model, test_portion(corpus, config)));
  }
  return report;
}

}  // namespace chordiag
