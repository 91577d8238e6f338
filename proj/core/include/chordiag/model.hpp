/**
 * @file model.hpp
 * @brief Fully connected suggestion networks and their training loop.
 *
 * Two topologies share one output layout (156 sigmoid units, 26 per string):
 *   Baseline  24 -> 156          (chord label only)
 *   Full     180 -> 150 -> 156   (previous diagram + chord label)
 *
 * Training minimises binary cross-entropy with Adam and stops once the
 * validation loss fails to improve by `early_stop_delta` for
 * `early_stop_patience` consecutive epochs.
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chordiag/encoding.hpp"

namespace chordiag {

enum class Topology : std::uint8_t { Baseline = 0, Full = 1 };
enum class HiddenActivation : std::uint8_t { Relu = 0, Sigmoid = 1, Tanh = 2 };

std::string_view to_string(Topology topology) noexcept;
Topology topology_from_string(std::string_view text);  // "baseline" | "full"

inline constexpr int kHiddenWidth = 150;

struct TrainConfig {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-7;
  double early_stop_delta = 0.001;
  int early_stop_patience = 2;
  int batch_size = 32;  ///< 0 trains on the full batch
  int max_epochs = 200;
  std::uint64_t seed = 0;
  HiddenActivation hidden_activation = HiddenActivation::Relu;

  /// FNV-1a over the serialized fields; recorded in model files.
  std::uint64_t hash() const;
  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

/// Dense layer, weights row-major [outputs x inputs].
struct DenseLayer {
  int inputs = 0;
  int outputs = 0;
  std::vector<double> weights;
  std::vector<double> bias;

  double& weight(int out, int in) { return weights[static_cast<std::size_t>(out * inputs + in)]; }
  double weight(int out, int in) const { return weights[static_cast<std::size_t>(out * inputs + in)]; }
  friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

/// Mean binary cross-entropy, logs clamped at 1e-12.
double bce_loss(std::span<const double> predicted, std::span<const double> target);

/// Multilayer perceptron with a sigmoid output layer.
class Mlp {
 public:
  Mlp() = default;
  /// Glorot-uniform weights drawn from `seed`, zero biases.
  Mlp(const std::vector<int>& widths, HiddenActivation activation, std::uint64_t seed);
  Mlp(std::vector<DenseLayer> layers, HiddenActivation activation);

  int input_width() const { return layers_.front().inputs; }
  int output_width() const { return layers_.back().outputs; }
  HiddenActivation activation() const noexcept { return activation_; }
  const std::vector<DenseLayer>& layers() const noexcept { return layers_; }
  std::vector<DenseLayer>& layers() noexcept { return layers_; }

  /// Sigmoid probabilities. Throws WidthMismatch.
  std::vector<double> forward(std::span<const double> input) const;

  /// BCE of one sample; adds `scale` times its gradient into `gradient`
  /// (same shapes as layers()).
  double accumulate_gradient(std::span<const double> input, std::span<const double> target,
                             std::vector<DenseLayer>& gradient, double scale) const;

  /// Zero-filled layers shaped like this network.
  std::vector<DenseLayer> zero_like() const;

  friend bool operator==(const Mlp&, const Mlp&) = default;

 private:
  std::vector<DenseLayer> layers_;
  HiddenActivation activation_ = HiddenActivation::Relu;
};

/// Provenance recorded alongside the weights.
struct ModelMetadata {
  Topology topology = Topology::Full;
  std::string input_layout{kInputLayoutTag};
  TrainConfig config;
  std::uint64_t config_hash = 0;
  std::uint64_t split_seed = 0;
  int split_index = 0;
  bool augmented = false;

  friend bool operator==(const ModelMetadata&, const ModelMetadata&) = default;
};

class SuggestionModel {
 public:
  /// Freshly initialised network for `topology`, seeded from config.seed.
  static SuggestionModel create(Topology topology, const TrainConfig& config);
  SuggestionModel(ModelMetadata metadata, Mlp network);

  Topology topology() const noexcept { return metadata_.topology; }
  int input_width() const { return network_.input_width(); }
  const ModelMetadata& metadata() const noexcept { return metadata_; }
  ModelMetadata& metadata() noexcept { return metadata_; }
  const Mlp& network() const noexcept { return network_; }
  Mlp& network() noexcept { return network_; }

  /// 156 sigmoid outputs. Throws WidthMismatch.
  DiagramVector forward(std::span<const double> input) const;

  friend bool operator==(const SuggestionModel&, const SuggestionModel&) = default;

 private:
  ModelMetadata metadata_;
  Mlp network_;
};

int input_width(Topology topology) noexcept;

/// Input vector for a topology; the baseline ignores `previous`.
std::vector<double> model_input(Topology topology, const Diagram* previous, const ChordLabel& label);

/// Tracks validation loss and decides when to stop.
class EarlyStopping {
 public:
  EarlyStopping(double min_delta, int patience) : min_delta_(min_delta), patience_(patience) {}

  /// Feeds one epoch's validation loss; returns true when training should stop.
  bool update(double validation_loss);
  /// True if the last update counted as an improvement.
  bool improved() const noexcept { return improved_; }
  double best() const noexcept { return best_; }

 private:
  double min_delta_;
  int patience_;
  double best_ = std::numeric_limits<double>::infinity();
  int stale_epochs_ = 0;
  bool improved_ = false;
};

struct EpochRecord {
  int epoch = 0;  ///< 1-based
  double train_loss = 0.0;
  double validation_loss = 0.0;
  bool improved = false;
};

struct TrainReport {
  TrainConfig config;
  Topology topology = Topology::Full;
  std::size_t train_size = 0;
  std::size_t validation_size = 0;
  std::vector<EpochRecord> epochs;
  int best_epoch = 0;  ///< weights of this epoch are kept
  bool early_stopped = false;

  std::string to_text() const;
};

struct TrainResult {
  SuggestionModel model;
  TrainReport report;
};

/// Deterministic given (config.seed, data order, config). Throws EmptySplit.
TrainResult train(Topology topology, std::span<const EncodedPair> train_set,
                  std::span<const EncodedPair> validation_set, const TrainConfig& config);

/// Mean BCE of the model over a data set.
double mean_loss(const SuggestionModel& model, std::span<const EncodedPair> data);

inline constexpr std::uint32_t kModelFormatVersion = 1;

/// Binary container; see docs/model_format.md.
std::string serialize_model(const SuggestionModel& model);
/// Throws CorruptFile or VersionMismatch.
SuggestionModel deserialize_model(std::string_view bytes);

void save_model(const SuggestionModel& model, const std::filesystem::path& path);
SuggestionModel load_model(const std::filesystem::path& path);

}  // namespace chordiag
