#include "chordiag/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numeric>
#include <sstream>

#include "chordiag/error.hpp"
#include "chordiag/random.hpp"

namespace chordiag {

namespace {

constexpr double kLogClamp = 1e-12;
constexpr char kMagic[4] = {'C', 'H', 'D', 'G'};

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double activate(HiddenActivation a, double z) {
  switch (a) {
    case HiddenActivation::Relu: return z > 0.0 ? z : 0.0;
    case HiddenActivation::Sigmoid: return sigmoid(z);
    case HiddenActivation::Tanh: return std::tanh(z);
  }
  return z;
}

// Derivative expressed through the pre-activation z and the output y.
double activation_slope(HiddenActivation a, double z, double y) {
  switch (a) {
    case HiddenActivation::Relu: return z > 0.0 ? 1.0 : 0.0;
    case HiddenActivation::Sigmoid: return y * (1.0 - y);
    case HiddenActivation::Tanh: return 1.0 - y * y;
  }
  return 1.0;
}

void nonzero_indices(std::span<const double> x, std::vector<int>& out) {
  out.clear();
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] != 0.0) out.push_back(static_cast<int>(i));
  }
}

// z = W x + b, visiting only the non-zero inputs.
void dense_forward(const DenseLayer& layer, std::span<const double> x, const std::vector<int>& nz,
                   std::vector<double>& z) {
  z.assign(layer.bias.begin(), layer.bias.end());
  for (int o = 0; o < layer.outputs; ++o) {
    const double* row = layer.weights.data() + static_cast<std::ptrdiff_t>(o) * layer.inputs;
    double sum = 0.0;
    for (int i : nz) sum += row[i] * x[static_cast<std::size_t>(i)];
    z[static_cast<std::size_t>(o)] += sum;
  }
}

void check_width(std::span<const double> input, int expected) {
  if (static_cast<int>(input.size()) != expected) {
    throw Error(ErrorCode::WidthMismatch, "input has " + std::to_string(input.size()) + " values, model expects " +
                                              std::to_string(expected));
  }
}

// Little-endian byte writer / reader for the model container.
class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    out_.append(s);
  }
  void raw(std::string_view s) { out_.append(s); }
  std::string& bytes() { return out_; }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  std::uint8_t u8() {
    need(1);
    return static_cast<std::uint8_t>(bytes_[pos_++]);
  }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(u8()) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(u8()) << (8 * i);
    return v;
  }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    const std::uint32_t n = u32();
    need(n);
    std::string s(bytes_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  std::size_t position() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw Error(ErrorCode::CorruptFile, "model file is truncated");
  }
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (char c : bytes) {
    h ^= static_cast<std::uint8_t>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

void write_config(Writer& w, const TrainConfig& c) {
  w.f64(c.learning_rate);
  w.f64(c.beta1);
  w.f64(c.beta2);
  w.f64(c.epsilon);
  w.f64(c.early_stop_delta);
  w.i32(c.early_stop_patience);
  w.i32(c.batch_size);
  w.i32(c.max_epochs);
  w.u64(c.seed);
  w.u8(static_cast<std::uint8_t>(c.hidden_activation));
}

TrainConfig read_config(Reader& r) {
  TrainConfig c;
  c.learning_rate = r.f64();
  c.beta1 = r.f64();
  c.beta2 = r.f64();
  c.epsilon = r.f64();
  c.early_stop_delta = r.f64();
  c.early_stop_patience = r.i32();
  c.batch_size = r.i32();
  c.max_epochs = r.i32();
  c.seed = r.u64();
  const auto act = r.u8();
  if (act > static_cast<std::uint8_t>(HiddenActivation::Tanh)) {
    throw Error(ErrorCode::CorruptFile, "unknown hidden activation in model file");
  }
  c.hidden_activation = static_cast<HiddenActivation>(act);
  return c;
}

}  // namespace

std::string_view to_string(Topology topology) noexcept {
  return topology == Topology::Baseline ? "baseline" : "full";
}

Topology topology_from_string(std::string_view text) {
  if (text == "baseline") return Topology::Baseline;
  if (text == "full") return Topology::Full;
  throw Error(ErrorCode::ParseError, "unknown topology '" + std::string(text) + "'");
}

std::uint64_t TrainConfig::hash() const {
  Writer w;
  write_config(w, *this);
  return fnv1a(w.bytes());
}

double bce_loss(std::span<const double> predicted, std::span<const double> target) {
  double sum = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double p = predicted[i];
    const double t = target[i];
    sum -= t * std::log(std::max(p, kLogClamp)) + (1.0 - t) * std::log(std::max(1.0 - p, kLogClamp));
  }
  return predicted.empty() ? 0.0 : sum / static_cast<double>(predicted.size());
}

Mlp::Mlp(const std::vector<int>& widths, HiddenActivation activation, std::uint64_t seed) : activation_(activation) {
  Rng rng(seed);
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    DenseLayer layer;
    layer.inputs = widths[l];
    layer.outputs = widths[l + 1];
    const double limit = std::sqrt(6.0 / static_cast<double>(layer.inputs + layer.outputs));
    layer.weights.resize(static_cast<std::size_t>(layer.inputs) * static_cast<std::size_t>(layer.outputs));
    for (auto& w : layer.weights) w = rng.uniform(-limit, limit);
    layer.bias.assign(static_cast<std::size_t>(layer.outputs), 0.0);
    layers_.push_back(std::move(layer));
  }
}

Mlp::Mlp(std::vector<DenseLayer> layers, HiddenActivation activation)
    : layers_(std::move(layers)), activation_(activation) {}

std::vector<DenseLayer> Mlp::zero_like() const {
  std::vector<DenseLayer> out = layers_;
  for (auto& l : out) {
    std::fill(l.weights.begin(), l.weights.end(), 0.0);
    std::fill(l.bias.begin(), l.bias.end(), 0.0);
  }
  return out;
}

std::vector<double> Mlp::forward(std::span<const double> input) const {
  check_width(input, input_width());
  std::vector<double> x(input.begin(), input.end());
  std::vector<double> z;
  std::vector<int> nz;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    nonzero_indices(x, nz);
    dense_forward(layers_[l], x, nz, z);
    const bool last = l + 1 == layers_.size();
    for (auto& v : z) v = last ? sigmoid(v) : activate(activation_, v);
    x.swap(z);
  }
  return x;
}

double Mlp::accumulate_gradient(std::span<const double> input, std::span<const double> target,
                                std::vector<DenseLayer>& gradient, double scale) const {
  check_width(input, input_width());
  const std::size_t depth = layers_.size();
  // activations[l] feeds layer l; pre[l] is layer l's pre-activation.
  std::vector<std::vector<double>> activations(depth + 1);
  std::vector<std::vector<double>> pre(depth);
  std::vector<std::vector<int>> nz(depth);
  activations[0].assign(input.begin(), input.end());
  for (std::size_t l = 0; l < depth; ++l) {
    nonzero_indices(activations[l], nz[l]);
    dense_forward(layers_[l], activations[l], nz[l], pre[l]);
    const bool last = l + 1 == depth;
    activations[l + 1].resize(pre[l].size());
    for (std::size_t k = 0; k < pre[l].size(); ++k) {
      activations[l + 1][k] = last ? sigmoid(pre[l][k]) : activate(activation_, pre[l][k]);
    }
  }
  const auto& output = activations[depth];
  const double loss = bce_loss(output, target);

  // d(mean BCE)/dz for sigmoid outputs.
  std::vector<double> delta(output.size());
  const double per_slot = scale / static_cast<double>(output.size());
  for (std::size_t k = 0; k < output.size(); ++k) delta[k] = (output[k] - target[k]) * per_slot;

  for (std::size_t l = depth; l-- > 0;) {
    const DenseLayer& layer = layers_[l];
    DenseLayer& g = gradient[l];
    const auto& x = activations[l];
    for (int o = 0; o < layer.outputs; ++o) {
      const double d = delta[static_cast<std::size_t>(o)];
      g.bias[static_cast<std::size_t>(o)] += d;
      if (d == 0.0) continue;
      double* grow = g.weights.data() + static_cast<std::ptrdiff_t>(o) * layer.inputs;
      for (int i : nz[l]) grow[i] += d * x[static_cast<std::size_t>(i)];
    }
    if (l == 0) break;
    std::vector<double> back(static_cast<std::size_t>(layer.inputs), 0.0);
    for (int o = 0; o < layer.outputs; ++o) {
      const double d = delta[static_cast<std::size_t>(o)];
      if (d == 0.0) continue;
      const double* row = layer.weights.data() + static_cast<std::ptrdiff_t>(o) * layer.inputs;
      for (int i = 0; i < layer.inputs; ++i) back[static_cast<std::size_t>(i)] += row[i] * d;
    }
    for (std::size_t i = 0; i < back.size(); ++i) {
      back[i] *= activation_slope(activation_, pre[l - 1][i], activations[l][i]);
    }
    delta.swap(back);
  }
  return loss;
}

int input_width(Topology topology) noexcept {
  return topology == Topology::Baseline ? kBaselineInputWidth : kFullInputWidth;
}

std::vector<double> model_input(Topology topology, const Diagram* previous, const ChordLabel& label) {
  if (topology == Topology::Baseline) return baseline_input(label);
  if (previous == nullptr) throw Error(ErrorCode::MissingContext, "the full model needs a previous diagram");
  return full_input(*previous, label);
}

SuggestionModel SuggestionModel::create(Topology topology, const TrainConfig& config) {
  std::vector<int> widths = topology == Topology::Baseline
                                ? std::vector<int>{kBaselineInputWidth, kDiagramWidth}
                                : std::vector<int>{kFullInputWidth, kHiddenWidth, kDiagramWidth};
  ModelMetadata meta;
  meta.topology = topology;
  meta.config = config;
  meta.config_hash = config.hash();
  return SuggestionModel(std::move(meta), Mlp(widths, config.hidden_activation, config.seed));
}

SuggestionModel::SuggestionModel(ModelMetadata metadata, Mlp network)
    : metadata_(std::move(metadata)), network_(std::move(network)) {}

DiagramVector SuggestionModel::forward(std::span<const double> input) const {
  const auto out = network_.forward(input);
  DiagramVector v{};
  std::copy(out.begin(), out.end(), v.begin());
  return v;
}

bool EarlyStopping::update(double validation_loss) {
  improved_ = validation_loss < best_ - min_delta_;
  if (improved_) {
    best_ = validation_loss;
    stale_epochs_ = 0;
  } else {
    ++stale_epochs_;
  }
  return stale_epochs_ >= patience_;
}

double mean_loss(const SuggestionModel& model, std::span<const EncodedPair> data) {
  double sum = 0.0;
  for (const auto& pair : data) sum += bce_loss(model.forward(pair.input), pair.target);
  return data.empty() ? 0.0 : sum / static_cast<double>(data.size());
}

TrainResult train(Topology topology, std::span<const EncodedPair> train_set,
                  std::span<const EncodedPair> validation_set, const TrainConfig& config) {
  if (train_set.empty() || validation_set.empty()) {
    throw Error(ErrorCode::EmptySplit, "training needs non-empty train and validation sets");
  }
  const int width = input_width(topology);
  for (const auto& p : train_set) check_width(p.input, width);
  for (const auto& p : validation_set) check_width(p.input, width);

  SuggestionModel model = SuggestionModel::create(topology, config);
  Mlp& net = model.network();
  Rng rng(mix_seed(config.seed, 0x5348u));

  auto first_moment = net.zero_like();
  auto second_moment = net.zero_like();
  auto gradient = net.zero_like();

  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t batch = config.batch_size <= 0
                                ? order.size()
                                : std::min(order.size(), static_cast<std::size_t>(config.batch_size));

  TrainReport report;
  report.config = config;
  report.topology = topology;
  report.train_size = train_set.size();
  report.validation_size = validation_set.size();

  EarlyStopping stopper(config.early_stop_delta, config.early_stop_patience);
  Mlp best = net;
  long step = 0;

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t stop = std::min(order.size(), start + batch);
      const double scale = 1.0 / static_cast<double>(stop - start);
      for (auto& g : gradient) {
        std::fill(g.weights.begin(), g.weights.end(), 0.0);
        std::fill(g.bias.begin(), g.bias.end(), 0.0);
      }
      for (std::size_t k = start; k < stop; ++k) {
        const auto& pair = train_set[order[k]];
        epoch_loss += net.accumulate_gradient(pair.input, pair.target, gradient, scale);
      }

      ++step;
      const double correction1 = 1.0 - std::pow(config.beta1, static_cast<double>(step));
      const double correction2 = 1.0 - std::pow(config.beta2, static_cast<double>(step));
      auto adam = [&](std::vector<double>& param, const std::vector<double>& grad, std::vector<double>& m,
                      std::vector<double>& v) {
        for (std::size_t i = 0; i < param.size(); ++i) {
          m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * grad[i];
          v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * grad[i] * grad[i];
          const double m_hat = m[i] / correction1;
          const double v_hat = v[i] / correction2;
          param[i] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon);
        }
      };
      for (std::size_t l = 0; l < net.layers().size(); ++l) {
        adam(net.layers()[l].weights, gradient[l].weights, first_moment[l].weights, second_moment[l].weights);
        adam(net.layers()[l].bias, gradient[l].bias, first_moment[l].bias, second_moment[l].bias);
      }
    }

    EpochRecord record;
    record.epoch = epoch;
    record.train_loss = epoch_loss / static_cast<double>(train_set.size());
    record.validation_loss = mean_loss(model, validation_set);
    const bool stop = stopper.update(record.validation_loss);
    record.improved = stopper.improved();
    report.epochs.push_back(record);
    if (record.improved) {
      best = net;
      report.best_epoch = epoch;
    }
    if (stop) {
      report.early_stopped = true;
      break;
    }
  }
  if (report.best_epoch > 0) net = std::move(best);
  return TrainResult{std::move(model), std::move(report)};
}

std::string TrainReport::to_text() const {
  std::ostringstream out;
  out.precision(8);
  out << "topology " << to_string(topology) << "\n"
      << "train_size " << train_size << "\n"
      << "validation_size " << validation_size << "\n"
      << "learning_rate " << config.learning_rate << "\n"
      << "beta1 " << config.beta1 << "\n"
      << "beta2 " << config.beta2 << "\n"
      << "epsilon " << config.epsilon << "\n"
      << "early_stop_delta " << config.early_stop_delta << "\n"
      << "early_stop_patience " << config.early_stop_patience << "\n"
      << "batch_size " << config.batch_size << "\n"
      << "max_epochs " << config.max_epochs << "\n"
      << "seed " << config.seed << "\n"
      << "hidden_activation "
      << (config.hidden_activation == HiddenActivation::Relu      ? "relu"
          : config.hidden_activation == HiddenActivation::Sigmoid ? "sigmoid"
                                                                  : "tanh")
      << "\n"
      << "epochs_run " << epochs.size() << "\n"
      << "best_epoch " << best_epoch << "\n"
      << "early_stopped " << (early_stopped ? "yes" : "no") << "\n"
      << "epoch train_loss validation_loss improved\n";
  for (const auto& e : epochs) {
    out << e.epoch << " " << e.train_loss << " " << e.validation_loss << " " << (e.improved ? 1 : 0) << "\n";
  }
  return out.str();
}

std::string serialize_model(const SuggestionModel& model) {
  const auto& meta = model.metadata();
  Writer w;
  w.raw(std::string_view(kMagic, 4));
  w.u32(kModelFormatVersion);
  w.u8(static_cast<std::uint8_t>(meta.topology));
  w.str(meta.input_layout);
  write_config(w, meta.config);
  w.u64(meta.config_hash);
  w.u64(meta.split_seed);
  w.i32(meta.split_index);
  w.u8(meta.augmented ? 1 : 0);
  const auto& layers = model.network().layers();
  w.u32(static_cast<std::uint32_t>(layers.size()));
  for (const auto& layer : layers) {
    w.u32(static_cast<std::uint32_t>(layer.outputs));
    w.u32(static_cast<std::uint32_t>(layer.inputs));
    for (double v : layer.weights) w.f64(v);
    for (double v : layer.bias) w.f64(v);
  }
  w.u64(fnv1a(w.bytes()));
  return std::move(w.bytes());
}

SuggestionModel deserialize_model(std::string_view bytes) {
  if (bytes.size() < 8 || bytes.substr(0, 4) != std::string_view(kMagic, 4)) {
    throw Error(ErrorCode::CorruptFile, "not a chordiag model file");
  }
  Reader r(bytes.substr(4));
  const std::uint32_t version = r.u32();
  if (version != kModelFormatVersion) {
    throw Error(ErrorCode::VersionMismatch, "model format version " + std::to_string(version) +
                                                " is not supported (expected " +
                                                std::to_string(kModelFormatVersion) + ")");
  }
  if (bytes.size() < 16) throw Error(ErrorCode::CorruptFile, "model file is truncated");
  const std::string_view body = bytes.substr(0, bytes.size() - 8);
  Reader tail(bytes.substr(bytes.size() - 8));
  if (tail.u64() != fnv1a(body)) throw Error(ErrorCode::CorruptFile, "model file checksum mismatch");

  Reader in(body.substr(8));
  ModelMetadata meta;
  const auto topo = in.u8();
  if (topo > 1) throw Error(ErrorCode::CorruptFile, "unknown topology in model file");
  meta.topology = static_cast<Topology>(topo);
  meta.input_layout = in.str();
  if (meta.input_layout != kInputLayoutTag) {
    throw Error(ErrorCode::VersionMismatch, "model input layout '" + meta.input_layout + "' is not supported");
  }
  meta.config = read_config(in);
  meta.config_hash = in.u64();
  meta.split_seed = in.u64();
  meta.split_index = in.i32();
  meta.augmented = in.u8() != 0;

  const std::vector<int> expected = meta.topology == Topology::Baseline
                                        ? std::vector<int>{kBaselineInputWidth, kDiagramWidth}
                                        : std::vector<int>{kFullInputWidth, kHiddenWidth, kDiagramWidth};
  const std::uint32_t count = in.u32();
  if (count + 1 != expected.size()) throw Error(ErrorCode::CorruptFile, "layer count does not match topology");
  std::vector<DenseLayer> layers;
  for (std::uint32_t l = 0; l < count; ++l) {
    DenseLayer layer;
    layer.outputs = static_cast<int>(in.u32());
    layer.inputs = static_cast<int>(in.u32());
    if (layer.inputs != expected[l] || layer.outputs != expected[l + 1]) {
      throw Error(ErrorCode::CorruptFile, "layer shape does not match topology");
    }
    layer.weights.resize(static_cast<std::size_t>(layer.inputs) * static_cast<std::size_t>(layer.outputs));
    for (auto& v : layer.weights) v = in.f64();
    layer.bias.resize(static_cast<std::size_t>(layer.outputs));
    for (auto& v : layer.bias) v = in.f64();
    layers.push_back(std::move(layer));
  }
  if (in.remaining() != 0) throw Error(ErrorCode::CorruptFile, "trailing bytes in model file");
  const HiddenActivation activation = meta.config.hidden_activation;
  return SuggestionModel(std::move(meta), Mlp(std::move(layers), activation));
}

void save_model(const SuggestionModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write model file " + path.string());
  const std::string bytes = serialize_model(model);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::Io, "failed writing model file " + path.string());
}

SuggestionModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open model file " + path.string());
  const std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return deserialize_model(bytes);
}

}  // namespace chordiag
