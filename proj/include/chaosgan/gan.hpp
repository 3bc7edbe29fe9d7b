#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "chaosgan/dataset.hpp"
#include "chaosgan/latent_source.hpp"
#include "chaosgan/tensor.hpp"

namespace chaosgan {

enum class OutputActivation { Identity, Tanh };

/// Affine map y = W x + b with W stored out x in.
struct DenseLayer {
  Matrix weight;
  Vector bias;
};

/// Affine layers with leaky-ReLU between them and an optional tanh at the end.
struct Mlp {
  std::vector<DenseLayer> layers;
  double leaky_slope = 0.2;
  OutputActivation output = OutputActivation::Identity;

  std::size_t input_dim() const { return static_cast<std::size_t>(layers.front().weight.cols()); }
  std::size_t output_dim() const { return static_cast<std::size_t>(layers.back().weight.rows()); }
  std::size_t parameter_count() const;
};

/// Weights ~ Normal(0, weight_stddev), zero biases. `widths` includes input and output.
Mlp make_mlp(std::span<const std::size_t> widths, double leaky_slope, OutputActivation output,
             std::uint64_t seed, double weight_stddev = 0.02);

/// Per-layer inputs and pre-activations kept for the backward pass.
struct MlpCache {
  std::vector<Matrix> inputs;
  std::vector<Matrix> pre_activations;
  Matrix output;
};

Matrix mlp_forward(const Mlp& net, const Matrix& input, MlpCache* cache = nullptr);

struct LayerGradient {
  Matrix weight;
  Vector bias;
};
using MlpGradient = std::vector<LayerGradient>;

MlpGradient zero_gradient(const Mlp& net);

/// `grad_output` is dL/d(net output). Fills `grads` (if non-null) and returns dL/d(input).
Matrix mlp_backward(const Mlp& net, const MlpCache& cache, const Matrix& grad_output,
                    MlpGradient* grads);

/// Network shapes, activations and optimizer settings.
struct GanConfig {
  std::size_t latent_dim = kLatentDim;
  std::size_t image_height = 16;
  std::size_t image_width = 16;
  std::size_t channels = 1;
  std::vector<std::size_t> generator_hidden{256, 512};
  std::vector<std::size_t> discriminator_hidden{512, 256};
  double leaky_slope = 0.2;
  double learning_rate = 0.0002;
  double adam_beta1 = 0.5;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::size_t batch_size = 32;
  std::size_t iterations_per_epoch = 200;
  std::size_t epochs = 5;
  std::uint64_t seed = 0;

  std::size_t image_pixels() const noexcept { return image_height * image_width * channels; }
  void validate() const;

  /// 64x64 RGB, batch 128, 2000 iterations x 20 epochs.
  static GanConfig paper_scale();

  friend bool operator==(const GanConfig&, const GanConfig&) = default;
};

struct AdamState {
  MlpGradient first_moment;
  MlpGradient second_moment;
  std::uint64_t step = 0;
};

struct GanModel {
  GanConfig config;
  Mlp generator;
  Mlp discriminator;  // outputs a logit; probabilities are its sigmoid
  AdamState generator_adam;
  AdamState discriminator_adam;

  friend bool operator==(const GanModel& a, const GanModel& b);
};

GanModel initialize_model(const GanConfig& config);

/// Generated images, one per row, pixels interleaved (y, x, channel).
struct ImageBatch {
  Matrix pixels;
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 1;

  std::size_t size() const noexcept { return static_cast<std::size_t>(pixels.rows()); }
  std::span<const double> image(std::size_t i) const {
    return {pixels.data() + i * static_cast<std::size_t>(pixels.cols()),
            static_cast<std::size_t>(pixels.cols())};
  }
};

Matrix to_matrix(const LatentMatrix& latents);

ImageBatch forward_generator(const GanModel& model, const Matrix& latents);
std::vector<double> forward_discriminator(const GanModel& model, const Matrix& images);
/// Pure function of (model, latents).
ImageBatch generate(const GanModel& model, const LatentMatrix& latents);

struct GanLosses {
  double d_loss = 0.0;
  double g_loss = 0.0;
};

/// d_loss = -mean log D(x) - mean log(1 - D(G(z))); g_loss = -mean log D(G(z)).
GanLosses gan_losses(std::span<const double> d_real, std::span<const double> d_fake);

enum class Network { Generator, Discriminator };

struct BackwardResult {
  MlpGradient gradient;
  double loss = 0.0;  // loss of the selected network
};

/// Gradients of the selected network's loss; the other network is held constant.
BackwardResult backward(const Mlp& generator, const Mlp& discriminator, const Matrix& real,
                        const Matrix& latents, Network which);

struct TrainingBatch {
  Matrix real;     // unused for the generator step
  Matrix latents;
};

BackwardResult backward(const GanModel& model, const TrainingBatch& batch, Network which);

struct AdamHyper {
  double learning_rate = 0.0002;
  double beta1 = 0.5;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// One bias-corrected Adam step; throws TrainingError naming the first non-finite gradient.
void adam_update(Mlp& net, AdamState& state, const MlpGradient& grad, const AdamHyper& hyper,
                 const std::string& name);
void adam_step(GanModel& model, Network which, const MlpGradient& grad);

struct TrainingRecord {
  std::size_t iteration = 0;  // one-based
  double d_loss = 0.0;
  double g_loss = 0.0;
  double wall_ms = 0.0;
};

struct TrainingResult {
  GanModel model;
  std::vector<TrainingRecord> log;
};

using ProgressSink = std::function<void(const TrainingRecord&)>;

/**
 * Alternating updates: per iteration one discriminator step on a real batch
 * and a fake batch, then one generator step on a fresh fake batch. Both
 * latent batches come from `stream` consecutively, so after k iterations the
 * cursor has advanced by 2 k batch_size rows.
 */
TrainingResult train(const GanConfig& config, LatentStream& stream, const ImageDataset& dataset,
                     const ProgressSink& progress = {});
TrainingResult train(GanModel model, LatentStream& stream, const ImageDataset& dataset,
                     const ProgressSink& progress = {});

void write_training_log_csv(const std::vector<TrainingRecord>& log, std::ostream& out);

/// "GANM", u32 version, config block, then every tensor with a shape header, little-endian.
void save_model(const GanModel& model, std::ostream& out);
void save_model(const GanModel& model, const std::filesystem::path& path);
GanModel load_model(std::istream& in);
GanModel load_model(const std::filesystem::path& path);

}  // namespace chaosgan
