#include "chaosgan/gan.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "binary_io.hpp"
#include "chaosgan/error.hpp"
#include "chaosgan/rng.hpp"

namespace chaosgan {

namespace {

constexpr std::uint32_t kModelFormatVersion = 1;
constexpr double kLogFloor = 1e-12;

double sigmoid(double a) {
  if (a >= 0.0) return 1.0 / (1.0 + std::exp(-a));
  const double e = std::exp(a);
  return e / (1.0 + e);
}

std::vector<std::size_t> widths(std::size_t in, const std::vector<std::size_t>& hidden,
                                std::size_t out) {
  std::vector<std::size_t> w{in};
  w.insert(w.end(), hidden.begin(), hidden.end());
  w.push_back(out);
  return w;
}

std::vector<std::size_t> generator_widths(const GanConfig& c) {
  return widths(c.latent_dim, c.generator_hidden, c.image_pixels());
}

std::vector<std::size_t> discriminator_widths(const GanConfig& c) {
  return widths(c.image_pixels(), c.discriminator_hidden, 1);
}

bool same_layers(const Mlp& a, const Mlp& b) {
  if (a.layers.size() != b.layers.size() || a.output != b.output) return false;
  if (std::bit_cast<std::uint64_t>(a.leaky_slope) != std::bit_cast<std::uint64_t>(b.leaky_slope)) {
    return false;
  }
  for (std::size_t l = 0; l < a.layers.size(); ++l) {
    if (a.layers[l].weight != b.layers[l].weight || a.layers[l].bias != b.layers[l].bias) {
      return false;
    }
  }
  return true;
}

bool same_gradient(const MlpGradient& a, const MlpGradient& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t l = 0; l < a.size(); ++l) {
    if (a[l].weight != b[l].weight || a[l].bias != b[l].bias) return false;
  }
  return true;
}

bool same_adam(const AdamState& a, const AdamState& b) {
  return a.step == b.step && same_gradient(a.first_moment, b.first_moment) &&
         same_gradient(a.second_moment, b.second_moment);
}

AdamState fresh_adam(const Mlp& net) {
  return AdamState{zero_gradient(net), zero_gradient(net), 0};
}

void check_finite(const Matrix& m, const std::string& path) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (!std::isfinite(m(r, c))) {
        throw TrainingError("non-finite gradient at " + path + "(" + std::to_string(r) + "," +
                            std::to_string(c) + ")");
      }
    }
  }
}

void check_finite(const Vector& v, const std::string& path) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v(i))) {
      throw TrainingError("non-finite gradient at " + path + "(" + std::to_string(i) + ")");
    }
  }
}

template <typename Tensor>
void adam_tensor(Tensor& param, Tensor& m, Tensor& v, const Tensor& g, const AdamHyper& h,
                 double correction1, double correction2) {
  m = h.beta1 * m + (1.0 - h.beta1) * g;
  v = h.beta2 * v + (1.0 - h.beta2) * g.cwiseProduct(g);
  auto m_hat = m.array() / correction1;
  auto v_hat = v.array() / correction2;
  param.array() -= h.learning_rate * m_hat / (v_hat.sqrt() + h.epsilon);
}

// Binary model format helpers.

void put_tensor(std::ostream& out, const Matrix& m) {
  detail::put_u32(out, static_cast<std::uint32_t>(m.rows()));
  detail::put_u32(out, static_cast<std::uint32_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.size(); ++i) detail::put_f64(out, m.data()[i]);
}

void put_tensor(std::ostream& out, const Vector& v) {
  detail::put_u32(out, static_cast<std::uint32_t>(v.size()));
  detail::put_u32(out, 1);
  for (Eigen::Index i = 0; i < v.size(); ++i) detail::put_f64(out, v(i));
}

void get_tensor(std::istream& in, Matrix& m, std::size_t rows, std::size_t cols, const char* what) {
  const auto r = detail::get_u32(in, what);
  const auto c = detail::get_u32(in, what);
  if (r != rows || c != cols) {
    throw FormatError(std::string("model file: shape mismatch for ") + what);
  }
  m.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = detail::get_f64(in, what);
}

void get_tensor(std::istream& in, Vector& v, std::size_t rows, const char* what) {
  const auto r = detail::get_u32(in, what);
  const auto c = detail::get_u32(in, what);
  if (r != rows || c != 1) throw FormatError(std::string("model file: shape mismatch for ") + what);
  v.resize(static_cast<Eigen::Index>(rows));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = detail::get_f64(in, what);
}

void put_network(std::ostream& out, const Mlp& net, const AdamState& adam) {
  detail::put_u32(out, net.output == OutputActivation::Tanh ? 1 : 0);
  detail::put_u32(out, static_cast<std::uint32_t>(net.layers.size()));
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    put_tensor(out, net.layers[l].weight);
    put_tensor(out, net.layers[l].bias);
    put_tensor(out, adam.first_moment[l].weight);
    put_tensor(out, adam.first_moment[l].bias);
    put_tensor(out, adam.second_moment[l].weight);
    put_tensor(out, adam.second_moment[l].bias);
  }
  detail::put_u64(out, adam.step);
}

void get_network(std::istream& in, const std::vector<std::size_t>& w, double slope, Mlp& net,
                 AdamState& adam) {
  const auto act = detail::get_u32(in, "output activation");
  if (act > 1) throw FormatError("model file: unknown output activation");
  net.output = act == 1 ? OutputActivation::Tanh : OutputActivation::Identity;
  net.leaky_slope = slope;
  const auto count = detail::get_u32(in, "layer count");
  if (count != w.size() - 1) throw FormatError("model file: layer count does not match config");
  net.layers.resize(count);
  adam.first_moment.resize(count);
  adam.second_moment.resize(count);
  for (std::size_t l = 0; l < count; ++l) {
    get_tensor(in, net.layers[l].weight, w[l + 1], w[l], "weight");
    get_tensor(in, net.layers[l].bias, w[l + 1], "bias");
    get_tensor(in, adam.first_moment[l].weight, w[l + 1], w[l], "adam first moment");
    get_tensor(in, adam.first_moment[l].bias, w[l + 1], "adam first moment");
    get_tensor(in, adam.second_moment[l].weight, w[l + 1], w[l], "adam second moment");
    get_tensor(in, adam.second_moment[l].bias, w[l + 1], "adam second moment");
  }
  adam.step = detail::get_u64(in, "adam step");
}

void put_sizes(std::ostream& out, const std::vector<std::size_t>& v) {
  detail::put_u32(out, static_cast<std::uint32_t>(v.size()));
  for (auto x : v) detail::put_u64(out, x);
}

std::vector<std::size_t> get_sizes(std::istream& in, const char* what) {
  const auto n = detail::get_u32(in, what);
  if (n > 64) throw FormatError(std::string("model file: implausible ") + what);
  std::vector<std::size_t> v(n);
  for (auto& x : v) x = detail::get_u64(in, what);
  return v;
}

}  // namespace

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  return n;
}

Mlp make_mlp(std::span<const std::size_t> w, double leaky_slope, OutputActivation output,
             std::uint64_t seed, double weight_stddev) {
  if (w.size() < 2) throw ShapeError("mlp: need at least input and output widths");
  Mlp net;
  net.leaky_slope = leaky_slope;
  net.output = output;
  Rng rng(seed);
  for (std::size_t l = 0; l + 1 < w.size(); ++l) {
    DenseLayer layer;
    layer.weight.resize(static_cast<Eigen::Index>(w[l + 1]), static_cast<Eigen::Index>(w[l]));
    for (Eigen::Index i = 0; i < layer.weight.size(); ++i) {
      layer.weight.data()[i] = weight_stddev * rng.normal();
    }
    layer.bias = Vector::Zero(static_cast<Eigen::Index>(w[l + 1]));
    net.layers.push_back(std::move(layer));
  }
  return net;
}

Matrix mlp_forward(const Mlp& net, const Matrix& input, MlpCache* cache) {
  if (static_cast<std::size_t>(input.cols()) != net.input_dim()) {
    throw ShapeError("mlp forward: input width " + std::to_string(input.cols()) +
                     " != expected " + std::to_string(net.input_dim()));
  }
  if (cache) {
    cache->inputs.resize(net.layers.size());
    cache->pre_activations.resize(net.layers.size());
  }
  Matrix x = input;
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const auto& layer = net.layers[l];
    Matrix z = x * layer.weight.transpose();
    z.rowwise() += layer.bias.transpose();
    if (cache) {
      cache->inputs[l] = std::move(x);
      cache->pre_activations[l] = z;
    }
    const bool last = l + 1 == net.layers.size();
    if (!last) {
      const double slope = net.leaky_slope;
      x = z.unaryExpr([slope](double v) { return v > 0.0 ? v : slope * v; });
    } else if (net.output == OutputActivation::Tanh) {
      x = z.array().tanh().matrix();
    } else {
      x = std::move(z);
    }
  }
  if (cache) cache->output = x;
  return x;
}

MlpGradient zero_gradient(const Mlp& net) {
  MlpGradient g(net.layers.size());
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    g[l].weight = Matrix::Zero(net.layers[l].weight.rows(), net.layers[l].weight.cols());
    g[l].bias = Vector::Zero(net.layers[l].bias.size());
  }
  return g;
}

Matrix mlp_backward(const Mlp& net, const MlpCache& cache, const Matrix& grad_output,
                    MlpGradient* grads) {
  if (grad_output.rows() != cache.output.rows() || grad_output.cols() != cache.output.cols()) {
    throw ShapeError("mlp backward: gradient shape does not match cached output");
  }
  if (grads) grads->resize(net.layers.size());
  Matrix g = grad_output;
  for (std::size_t l = net.layers.size(); l-- > 0;) {
    const bool last = l + 1 == net.layers.size();
    if (last) {
      if (net.output == OutputActivation::Tanh) {
        g.array() *= 1.0 - cache.output.array().square();
      }
    } else {
      const double slope = net.leaky_slope;
      g.array() *= cache.pre_activations[l]
                       .unaryExpr([slope](double v) { return v > 0.0 ? 1.0 : slope; })
                       .array();
    }
    if (grads) {
      (*grads)[l].weight = g.transpose() * cache.inputs[l];
      (*grads)[l].bias = g.colwise().sum().transpose();
    }
    g = g * net.layers[l].weight;
  }
  return g;
}

void GanConfig::validate() const {
  if (latent_dim != kLatentDim) throw ConfigError("gan: latent_dim must be 100");
  if (image_height == 0 || image_width == 0) throw ConfigError("gan: image size must be positive");
  if (channels != 1 && channels != 3) throw ConfigError("gan: channels must be 1 or 3");
  for (auto w : generator_hidden) {
    if (w == 0) throw ConfigError("gan: generator hidden widths must be positive");
  }
  for (auto w : discriminator_hidden) {
    if (w == 0) throw ConfigError("gan: discriminator hidden widths must be positive");
  }
  if (!(leaky_slope > 0.0 && leaky_slope < 1.0)) throw ConfigError("gan: leaky_slope must be in (0,1)");
  if (!(learning_rate > 0.0)) throw ConfigError("gan: learning_rate must be positive");
  if (!(adam_beta1 > 0.0 && adam_beta1 < 1.0) || !(adam_beta2 > 0.0 && adam_beta2 < 1.0)) {
    throw ConfigError("gan: adam betas must be in (0,1)");
  }
  if (!(adam_epsilon > 0.0)) throw ConfigError("gan: adam_epsilon must be positive");
  if (batch_size == 0) throw ConfigError("gan: batch_size must be positive");
  if (iterations_per_epoch == 0) throw ConfigError("gan: iterations_per_epoch must be positive");
}

GanConfig GanConfig::paper_scale() {
  GanConfig c;
  c.image_height = 64;
  c.image_width = 64;
  c.channels = 3;
  c.batch_size = 128;
  c.iterations_per_epoch = 2000;
  c.epochs = 20;
  return c;
}

bool operator==(const GanModel& a, const GanModel& b) {
  return a.config == b.config && same_layers(a.generator, b.generator) &&
         same_layers(a.discriminator, b.discriminator) &&
         same_adam(a.generator_adam, b.generator_adam) &&
         same_adam(a.discriminator_adam, b.discriminator_adam);
}

GanModel initialize_model(const GanConfig& config) {
  config.validate();
  GanModel model;
  model.config = config;
  const auto gw = generator_widths(config);
  const auto dw = discriminator_widths(config);
  model.generator = make_mlp(gw, config.leaky_slope, OutputActivation::Tanh,
                             derive_seed(config.seed, hash_label("generator")));
  model.discriminator = make_mlp(dw, config.leaky_slope, OutputActivation::Identity,
                                 derive_seed(config.seed, hash_label("discriminator")));
  model.generator_adam = fresh_adam(model.generator);
  model.discriminator_adam = fresh_adam(model.discriminator);
  return model;
}

Matrix to_matrix(const LatentMatrix& latents) {
  Matrix m(static_cast<Eigen::Index>(latents.rows()), static_cast<Eigen::Index>(kLatentDim));
  std::copy(latents.values().begin(), latents.values().end(), m.data());
  return m;
}

ImageBatch forward_generator(const GanModel& model, const Matrix& latents) {
  ImageBatch batch;
  batch.pixels = mlp_forward(model.generator, latents);
  batch.height = model.config.image_height;
  batch.width = model.config.image_width;
  batch.channels = model.config.channels;
  return batch;
}

std::vector<double> forward_discriminator(const GanModel& model, const Matrix& images) {
  const Matrix logits = mlp_forward(model.discriminator, images);
  std::vector<double> p(static_cast<std::size_t>(logits.rows()));
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = sigmoid(logits(static_cast<Eigen::Index>(i), 0));
  return p;
}

ImageBatch generate(const GanModel& model, const LatentMatrix& latents) {
  return forward_generator(model, to_matrix(latents));
}

GanLosses gan_losses(std::span<const double> d_real, std::span<const double> d_fake) {
  if (d_real.empty() || d_fake.empty()) throw ShapeError("gan_losses: empty batch");
  double real_term = 0.0;
  for (double p : d_real) real_term += std::log(std::max(p, kLogFloor));
  double fake_term = 0.0;
  double gen_term = 0.0;
  for (double p : d_fake) {
    fake_term += std::log(std::max(1.0 - p, kLogFloor));
    gen_term += std::log(std::max(p, kLogFloor));
  }
  const auto nr = static_cast<double>(d_real.size());
  const auto nf = static_cast<double>(d_fake.size());
  return {-real_term / nr - fake_term / nf, -gen_term / nf};
}

BackwardResult backward(const Mlp& generator, const Mlp& discriminator, const Matrix& real,
                        const Matrix& latents, Network which) {
  BackwardResult result;
  auto probabilities = [](const Matrix& logits) {
    std::vector<double> p(static_cast<std::size_t>(logits.rows()));
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = sigmoid(logits(static_cast<Eigen::Index>(i), 0));
    return p;
  };

  if (which == Network::Discriminator) {
    if (real.cols() != static_cast<Eigen::Index>(discriminator.input_dim())) {
      throw ShapeError("backward: real batch width does not match discriminator input");
    }
    const Matrix fake = mlp_forward(generator, latents);
    MlpCache real_cache;
    MlpCache fake_cache;
    const Matrix real_logits = mlp_forward(discriminator, real, &real_cache);
    const Matrix fake_logits = mlp_forward(discriminator, fake, &fake_cache);
    const auto p_real = probabilities(real_logits);
    const auto p_fake = probabilities(fake_logits);
    result.loss = gan_losses(p_real, p_fake).d_loss;

    // d/da of -log sigmoid(a) is sigmoid(a) - 1; of -log(1 - sigmoid(a)) is sigmoid(a).
    Matrix g_real(real_logits.rows(), 1);
    Matrix g_fake(fake_logits.rows(), 1);
    for (Eigen::Index i = 0; i < g_real.rows(); ++i) {
      g_real(i, 0) = (p_real[static_cast<std::size_t>(i)] - 1.0) / static_cast<double>(g_real.rows());
    }
    for (Eigen::Index i = 0; i < g_fake.rows(); ++i) {
      g_fake(i, 0) = p_fake[static_cast<std::size_t>(i)] / static_cast<double>(g_fake.rows());
    }
    MlpGradient from_fake;
    mlp_backward(discriminator, real_cache, g_real, &result.gradient);
    mlp_backward(discriminator, fake_cache, g_fake, &from_fake);
    for (std::size_t l = 0; l < from_fake.size(); ++l) {
      result.gradient[l].weight += from_fake[l].weight;
      result.gradient[l].bias += from_fake[l].bias;
    }
    return result;
  }

  MlpCache gen_cache;
  MlpCache disc_cache;
  const Matrix fake = mlp_forward(generator, latents, &gen_cache);
  const Matrix logits = mlp_forward(discriminator, fake, &disc_cache);
  const auto p = probabilities(logits);
  double gen_term = 0.0;
  for (double v : p) gen_term += std::log(std::max(v, kLogFloor));
  result.loss = -gen_term / static_cast<double>(p.size());

  Matrix g(logits.rows(), 1);
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    g(i, 0) = (p[static_cast<std::size_t>(i)] - 1.0) / static_cast<double>(g.rows());
  }
  const Matrix grad_images = mlp_backward(discriminator, disc_cache, g, nullptr);
  mlp_backward(generator, gen_cache, grad_images, &result.gradient);
  return result;
}

BackwardResult backward(const GanModel& model, const TrainingBatch& batch, Network which) {
  if (static_cast<std::size_t>(batch.latents.cols()) != model.config.latent_dim) {
    throw ShapeError("backward: latent width must be " + std::to_string(model.config.latent_dim));
  }
  return chaosgan::backward(model.generator, model.discriminator, batch.real, batch.latents, which);
}

void adam_update(Mlp& net, AdamState& state, const MlpGradient& grad, const AdamHyper& hyper,
                 const std::string& name) {
  if (grad.size() != net.layers.size() || state.first_moment.size() != net.layers.size() ||
      state.second_moment.size() != net.layers.size()) {
    throw ShapeError("adam: gradient or state layer count does not match " + name);
  }
  for (std::size_t l = 0; l < grad.size(); ++l) {
    const std::string prefix = name + ".layers[" + std::to_string(l) + "]";
    if (grad[l].weight.rows() != net.layers[l].weight.rows() ||
        grad[l].weight.cols() != net.layers[l].weight.cols() ||
        grad[l].bias.size() != net.layers[l].bias.size()) {
      throw ShapeError("adam: gradient shape mismatch at " + prefix);
    }
    check_finite(grad[l].weight, prefix + ".weight");
    check_finite(grad[l].bias, prefix + ".bias");
  }
  const auto t = static_cast<double>(state.step + 1);
  const double c1 = 1.0 - std::pow(hyper.beta1, t);
  const double c2 = 1.0 - std::pow(hyper.beta2, t);
  for (std::size_t l = 0; l < grad.size(); ++l) {
    adam_tensor(net.layers[l].weight, state.first_moment[l].weight, state.second_moment[l].weight,
                grad[l].weight, hyper, c1, c2);
    adam_tensor(net.layers[l].bias, state.first_moment[l].bias, state.second_moment[l].bias,
                grad[l].bias, hyper, c1, c2);
  }
  ++state.step;
}

void adam_step(GanModel& model, Network which, const MlpGradient& grad) {
  const AdamHyper hyper{model.config.learning_rate, model.config.adam_beta1,
                        model.config.adam_beta2, model.config.adam_epsilon};
  if (which == Network::Generator) {
    adam_update(model.generator, model.generator_adam, grad, hyper, "generator");
  } else {
    adam_update(model.discriminator, model.discriminator_adam, grad, hyper, "discriminator");
  }
}

TrainingResult train(const GanConfig& config, LatentStream& stream, const ImageDataset& dataset,
                     const ProgressSink& progress) {
  return train(initialize_model(config), stream, dataset, progress);
}

TrainingResult train(GanModel model, LatentStream& stream, const ImageDataset& dataset,
                     const ProgressSink& progress) {
  const GanConfig& cfg = model.config;
  cfg.validate();
  if (dataset.pixels_per_image() != cfg.image_pixels() || dataset.height() != cfg.image_height ||
      dataset.width() != cfg.image_width) {
    throw ShapeError("train: dataset image shape does not match the model config");
  }
  if (dataset.size() == 0) throw ConfigError("train: empty dataset");

  const std::size_t total = cfg.epochs * cfg.iterations_per_epoch;
  const std::uint64_t data_seed = derive_seed(cfg.seed, hash_label("real-batches"));
  const std::uint64_t already = model.discriminator_adam.step;

  TrainingResult result;
  result.log.reserve(total);
  std::vector<std::size_t> picks(cfg.batch_size);
  TrainingBatch batch;
  for (std::size_t it = 1; it <= total; ++it) {
    const auto start = std::chrono::steady_clock::now();
    Rng pick(derive_seed(data_seed, already + it));
    for (auto& i : picks) i = pick.below(dataset.size());
    batch.real = dataset.gather(picks);

    batch.latents = to_matrix(stream.next_batch(cfg.batch_size));
    auto d_step = backward(model, batch, Network::Discriminator);
    if (!std::isfinite(d_step.loss)) {
      throw TrainingError("iteration " + std::to_string(it) + ": discriminator loss is " +
                          std::to_string(d_step.loss));
    }
    adam_step(model, Network::Discriminator, d_step.gradient);

    batch.latents = to_matrix(stream.next_batch(cfg.batch_size));
    auto g_step = backward(model, batch, Network::Generator);
    if (!std::isfinite(g_step.loss)) {
      throw TrainingError("iteration " + std::to_string(it) + ": generator loss is " +
                          std::to_string(g_step.loss) + " (discriminator loss " +
                          std::to_string(d_step.loss) + ")");
    }
    adam_step(model, Network::Generator, g_step.gradient);

    TrainingRecord rec;
    rec.iteration = it;
    rec.d_loss = d_step.loss;
    rec.g_loss = g_step.loss;
    rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                      .count();
    result.log.push_back(rec);
    if (progress) progress(rec);
  }
  result.model = std::move(model);
  return result;
}

void write_training_log_csv(const std::vector<TrainingRecord>& log, std::ostream& out) {
  out << "iteration,d_loss,g_loss,wall_ms\n";
  char buf[128];
  for (const auto& r : log) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.3f\n", r.iteration, r.d_loss, r.g_loss,
                  r.wall_ms);
    out << buf;
  }
}

void save_model(const GanModel& model, std::ostream& out) {
  const auto& c = model.config;
  out.write("GANM", 4);
  detail::put_u32(out, kModelFormatVersion);
  detail::put_u64(out, c.latent_dim);
  detail::put_u64(out, c.image_height);
  detail::put_u64(out, c.image_width);
  detail::put_u64(out, c.channels);
  put_sizes(out, c.generator_hidden);
  put_sizes(out, c.discriminator_hidden);
  detail::put_f64(out, c.leaky_slope);
  detail::put_f64(out, c.learning_rate);
  detail::put_f64(out, c.adam_beta1);
  detail::put_f64(out, c.adam_beta2);
  detail::put_f64(out, c.adam_epsilon);
  detail::put_u64(out, c.batch_size);
  detail::put_u64(out, c.iterations_per_epoch);
  detail::put_u64(out, c.epochs);
  detail::put_u64(out, c.seed);
  put_network(out, model.generator, model.generator_adam);
  put_network(out, model.discriminator, model.discriminator_adam);
}

void save_model(const GanModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError(path.string() + ": cannot open for writing");
  save_model(model, out);
  if (!out) throw FormatError(path.string() + ": write failed");
}

GanModel load_model(std::istream& in) {
  char magic[4] = {};
  in.read(magic, 4);
  if (in.gcount() != 4 || std::string(magic, 4) != "GANM") throw FormatError("model file: bad magic");
  const auto version = detail::get_u32(in, "version");
  if (version != kModelFormatVersion) {
    throw FormatError("model file: unsupported version " + std::to_string(version));
  }
  GanModel model;
  auto& c = model.config;
  c.latent_dim = detail::get_u64(in, "config");
  c.image_height = detail::get_u64(in, "config");
  c.image_width = detail::get_u64(in, "config");
  c.channels = detail::get_u64(in, "config");
  c.generator_hidden = get_sizes(in, "generator widths");
  c.discriminator_hidden = get_sizes(in, "discriminator widths");
  c.leaky_slope = detail::get_f64(in, "config");
  c.learning_rate = detail::get_f64(in, "config");
  c.adam_beta1 = detail::get_f64(in, "config");
  c.adam_beta2 = detail::get_f64(in, "config");
  c.adam_epsilon = detail::get_f64(in, "config");
  c.batch_size = detail::get_u64(in, "config");
  c.iterations_per_epoch = detail::get_u64(in, "config");
  c.epochs = detail::get_u64(in, "config");
  c.seed = detail::get_u64(in, "config");
  try {
    c.validate();
  } catch (const ConfigError& e) {
    throw FormatError(std::string("model file: invalid config block: ") + e.what());
  }
  get_network(in, generator_widths(c), c.leaky_slope, model.generator, model.generator_adam);
  get_network(in, discriminator_widths(c), c.leaky_slope, model.discriminator,
              model.discriminator_adam);
  if (in.peek() != std::char_traits<char>::eof()) throw FormatError("model file: trailing bytes");
  return model;
}

GanModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(path.string() + ": cannot open model file");
  return load_model(in);
}

}  // namespace chaosgan
