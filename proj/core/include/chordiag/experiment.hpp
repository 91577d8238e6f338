/**
 * @file experiment.hpp
 * @brief Train/evaluate protocol over seeded 60-20-20 splits.
 *
 * Each split is shuffled by (split seed, split index). Augmentation, when
 * enabled, is applied to the training portion only, after splitting.
 */
#pragma once

#include <span>
#include <vector>

#include "chordiag/data.hpp"
#include "chordiag/metrics.hpp"
#include "chordiag/model.hpp"

namespace chordiag {

struct ExperimentConfig {
  Topology topology = Topology::Full;
  TrainConfig train;
  std::uint64_t split_seed = 0;
  int split_index = 0;
  bool augment = true;
};

/// The protocol default: augmentation for the full model only.
bool default_augmentation(Topology topology) noexcept;

std::vector<EncodedPair> encode_transitions(std::span<const Transition> transitions, Topology topology);

/// Splits, optionally augments the training part, trains, and records the
/// split provenance in the model metadata.
TrainResult train_on_split(std::span<const Transition> corpus, const ExperimentConfig& config);

/// Recreates an experiment description from a model's metadata.
ExperimentConfig experiment_from_metadata(const ModelMetadata& metadata);

/// Test portion of the configured split.
std::vector<Transition> test_portion(std::span<const Transition> corpus, const ExperimentConfig& config);

/// Trains and evaluates on split indices 0..splits-1.
EvaluationReport cross_validate(std::span<const Transition> corpus, ExperimentConfig config, int splits);

}  // namespace chordiag
