#include "gaitae/autoencoder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "gaitae/error.hpp"

namespace gaitae {

namespace {

// Uniform double in [0, 1) from the top 53 bits; independent of the
// standard library's distribution implementations.
double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void apply_activation(Activation a, Eigen::MatrixXd& z) {
  switch (a) {
    case Activation::sigmoid:
      z = (1.0 + (-z.array()).exp()).inverse().matrix();
      break;
    case Activation::tanh:
      z = z.array().tanh().matrix();
      break;
  }
}

// Derivative expressed through the activation output.
Eigen::ArrayXXd activation_derivative(Activation a, const Eigen::MatrixXd& out) {
  switch (a) {
    case Activation::sigmoid:
      return out.array() * (1.0 - out.array());
    case Activation::tanh:
      return 1.0 - out.array().square();
  }
  return {};
}

// acts[0] is the input, acts[i + 1] the output of layer i.
std::vector<Eigen::MatrixXd> forward_all(const AxisModel& model, const Eigen::MatrixXd& inputs) {
  const auto& layers = model.topology.layers;
  std::vector<Eigen::MatrixXd> acts;
  acts.reserve(layers.size() + 1);
  acts.push_back(inputs);
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const DenseLayer& p = model.params[i];
    Eigen::MatrixXd z = p.weights * acts.back();
    z.colwise() += p.bias;
    apply_activation(layers[i].activation, z);
    acts.push_back(std::move(z));
  }
  return acts;
}

void check_batch(const AxisModel& model, const Eigen::MatrixXd& batch) {
  if (batch.cols() == 0) {
    throw Error(ErrorKind::argument, "empty batch");
  }
  if (static_cast<std::size_t>(batch.rows()) != model.topology.input_dim()) {
    throw Error(ErrorKind::argument, "batch has " + std::to_string(batch.rows()) +
                                         " rows, model expects " +
                                         std::to_string(model.topology.input_dim()));
  }
  if (model.params.size() != model.topology.layers.size()) {
    throw Error(ErrorKind::state, "model parameters do not match topology");
  }
}

double l2_sum(const Parameters& params) {
  double s = 0.0;
  for (const auto& p : params) s += p.weights.squaredNorm();
  return s;
}

Eigen::VectorXd batch_mean_activation(const Eigen::MatrixXd& sparse) {
  return sparse.rowwise().mean();
}

BatchStats stats_from(const std::vector<Eigen::MatrixXd>& acts, const AxisModel& model,
                      const LossWeights& w) {
  const Eigen::MatrixXd& input = acts.front();
  const Eigen::MatrixXd& output = acts.back();
  BatchStats s;
  s.recon_loss = (output - input).squaredNorm() / static_cast<double>(input.size());
  const Eigen::VectorXd rho_hat = batch_mean_activation(acts[1]);
  s.kl_penalty = kl_sparsity(w.rho, std::span<const double>(rho_hat.data(), rho_hat.size()));
  s.l2_term = l2_sum(model.params);
  s.total_loss = w.recon * s.recon_loss + w.sparsity * s.kl_penalty + w.l2 * s.l2_term;
  return s;
}

Gradients gradients_from(const std::vector<Eigen::MatrixXd>& acts, const AxisModel& model,
                         const LossWeights& w) {
  const auto& layers = model.topology.layers;
  const Eigen::MatrixXd& input = acts.front();
  const double batch = static_cast<double>(input.cols());

  Gradients grads(layers.size());
  // dL/d(output of the current layer)
  Eigen::MatrixXd d_out = (2.0 * w.recon / static_cast<double>(input.size())) *
                          (acts.back() - input);

  for (std::size_t ii = layers.size(); ii-- > 0;) {
    if (ii == 0 && w.sparsity != 0.0) {
      // dKL/drho_hat_j, spread uniformly over the batch by the mean.
      const Eigen::VectorXd rho_hat = batch_mean_activation(acts[1]);
      Eigen::VectorXd d_rho(rho_hat.size());
      for (Eigen::Index j = 0; j < rho_hat.size(); ++j) {
        const double r = rho_hat[j];
        if (r < kRhoHatEpsilon || r > 1.0 - kRhoHatEpsilon) {
          d_rho[j] = 0.0;  // clamp is flat there
        } else {
          d_rho[j] = -w.rho / r + (1.0 - w.rho) / (1.0 - r);
        }
      }
      d_out.colwise() += (w.sparsity / batch) * d_rho;
    }
    const Eigen::MatrixXd d_z =
        (d_out.array() * activation_derivative(layers[ii].activation, acts[ii + 1])).matrix();
    grads[ii].weights = d_z * acts[ii].transpose();
    if (w.l2 != 0.0) grads[ii].weights += (2.0 * w.l2) * model.params[ii].weights;
    grads[ii].bias = d_z.rowwise().sum();
    if (ii > 0) d_out = model.params[ii].weights.transpose() * d_z;
  }
  return grads;
}

void check_finite_layers(const std::vector<Eigen::MatrixXd>& acts) {
  for (std::size_t i = 1; i < acts.size(); ++i) {
    if (!acts[i].allFinite()) {
      throw Error(ErrorKind::numeric, "non-finite activation in layer " + std::to_string(i - 1));
    }
  }
}

}  // namespace

std::string_view activation_name(Activation a) {
  return a == Activation::sigmoid ? "sigmoid" : "tanh";
}

Activation parse_activation(std::string_view name) {
  if (name == "sigmoid") return Activation::sigmoid;
  if (name == "tanh") return Activation::tanh;
  throw Error(ErrorKind::parse, "unknown activation: " + std::string(name));
}

NetworkTopology NetworkTopology::standard() {
  const std::size_t dims[] = {17, 128, 32, 8};
  return mirrored(dims);
}

NetworkTopology NetworkTopology::mirrored(std::span<const std::size_t> encoder_dims) {
  if (encoder_dims.size() < 2) {
    throw Error(ErrorKind::argument, "need at least input and latent width");
  }
  std::vector<std::size_t> dims(encoder_dims.begin(), encoder_dims.end());
  for (std::size_t i = encoder_dims.size() - 1; i-- > 0;) dims.push_back(encoder_dims[i]);

  NetworkTopology t;
  const std::size_t n = dims.size() - 1;
  for (std::size_t i = 0; i < n; ++i) {
    const bool edge = i == 0 || i + 1 == n;
    t.layers.push_back({dims[i], dims[i + 1], edge ? Activation::sigmoid : Activation::tanh});
  }
  t.validate();
  return t;
}

std::size_t NetworkTopology::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.out_dim * (l.in_dim + 1);
  return n;
}

bool NetworkTopology::is_standard() const { return *this == standard(); }

void NetworkTopology::validate() const {
  if (layers.size() < 2 || layers.size() % 2 != 0) {
    throw Error(ErrorKind::argument, "topology needs an even number (>= 2) of layers");
  }
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (layers[i].in_dim == 0 || layers[i].out_dim == 0) {
      throw Error(ErrorKind::argument, "layer " + std::to_string(i) + " has a zero dimension");
    }
    if (i > 0 && layers[i].in_dim != layers[i - 1].out_dim) {
      throw Error(ErrorKind::argument, "layer " + std::to_string(i) + " does not chain");
    }
  }
  if (input_dim() != output_dim()) {
    throw Error(ErrorKind::argument, "auto-encoder input and output widths differ");
  }
  if (layers.front().activation != Activation::sigmoid) {
    throw Error(ErrorKind::argument, "sparsity layer must use a sigmoid");
  }
  if (layers.back().activation != Activation::sigmoid) {
    throw Error(ErrorKind::argument, "output layer must use a sigmoid");
  }
}

void TrainConfig::validate() const {
  if (!(rho > 0.0 && rho < 1.0)) throw Error(ErrorKind::argument, "rho must lie in (0, 1)");
  if (!(sparsity_weight >= 0.0) || !std::isfinite(sparsity_weight)) {
    throw Error(ErrorKind::argument, "sparsity_weight must be >= 0");
  }
  if (!(l2_weight >= 0.0) || !std::isfinite(l2_weight)) {
    throw Error(ErrorKind::argument, "l2_weight must be >= 0");
  }
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw Error(ErrorKind::argument, "learning_rate must be > 0");
  }
  if (batch_size == 0) throw Error(ErrorKind::argument, "batch_size must be > 0");
}

void AxisModel::validate() const {
  topology.validate();
  if (params.size() != topology.layers.size()) {
    throw Error(ErrorKind::validation, "parameter layer count does not match topology");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& shape = topology.layers[i];
    const auto& p = params[i];
    if (static_cast<std::size_t>(p.weights.rows()) != shape.out_dim ||
        static_cast<std::size_t>(p.weights.cols()) != shape.in_dim ||
        static_cast<std::size_t>(p.bias.size()) != shape.out_dim) {
      throw Error(ErrorKind::validation, "layer " + std::to_string(i) + " shape mismatch");
    }
    if (!p.weights.allFinite() || !p.bias.allFinite()) {
      throw Error(ErrorKind::validation, "layer " + std::to_string(i) + " has non-finite parameters");
    }
  }
  if (train_mse && !(*train_mse >= 0.0 && std::isfinite(*train_mse))) {
    throw Error(ErrorKind::validation, "train_mse must be finite and >= 0");
  }
}

Parameters init_parameters(const NetworkTopology& topology, std::uint64_t seed) {
  topology.validate();
  std::mt19937_64 rng(seed);
  Parameters params;
  params.reserve(topology.layers.size());
  for (const auto& shape : topology.layers) {
    const double bound = std::sqrt(6.0 / static_cast<double>(shape.in_dim + shape.out_dim));
    DenseLayer p;
    p.weights.resize(static_cast<Eigen::Index>(shape.out_dim), static_cast<Eigen::Index>(shape.in_dim));
    for (Eigen::Index c = 0; c < p.weights.cols(); ++c) {
      for (Eigen::Index r = 0; r < p.weights.rows(); ++r) {
        p.weights(r, c) = bound * (2.0 * unit_uniform(rng) - 1.0);
      }
    }
    p.bias = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(shape.out_dim));
    params.push_back(std::move(p));
  }
  return params;
}

ForwardResult forward(const AxisModel& model, std::span<const double> input) {
  if (input.size() != model.topology.input_dim()) {
    throw Error(ErrorKind::argument, "input has " + std::to_string(input.size()) +
                                         " values, model expects " +
                                         std::to_string(model.topology.input_dim()));
  }
  const Eigen::MatrixXd x =
      Eigen::Map<const Eigen::VectorXd>(input.data(), static_cast<Eigen::Index>(input.size()));
  check_batch(model, x);
  auto acts = forward_all(model, x);
  check_finite_layers(acts);

  ForwardResult r;
  for (std::size_t i = 1; i < acts.size(); ++i) r.activations.emplace_back(acts[i].col(0));
  r.output = r.activations.back();
  return r;
}

Eigen::MatrixXd reconstruct(const AxisModel& model, const Eigen::MatrixXd& inputs) {
  check_batch(model, inputs);
  auto acts = forward_all(model, inputs);
  check_finite_layers(acts);
  return std::move(acts.back());
}

double reconstruction_mse(const AxisModel& model, std::span<const double> input) {
  const ForwardResult r = forward(model, input);
  double s = 0.0;
  for (std::size_t i = 0; i < input.size(); ++i) {
    const double d = r.output[static_cast<Eigen::Index>(i)] - input[i];
    s += d * d;
  }
  return s / static_cast<double>(input.size());
}

Eigen::VectorXd reconstruction_errors(const AxisModel& model, const Eigen::MatrixXd& inputs) {
  const Eigen::MatrixXd out = reconstruct(model, inputs);
  return (out - inputs).colwise().squaredNorm().transpose() / static_cast<double>(inputs.rows());
}

double kl_sparsity(double rho, std::span<const double> rho_hat) {
  if (!(rho > 0.0 && rho < 1.0)) throw Error(ErrorKind::argument, "rho must lie in (0, 1)");
  double p = 0.0;
  for (double r : rho_hat) {
    if (!(r >= 0.0 && r <= 1.0)) {
      throw Error(ErrorKind::argument, "rho_hat outside [0, 1]: " + std::to_string(r));
    }
    const double c = std::clamp(r, kRhoHatEpsilon, 1.0 - kRhoHatEpsilon);
    p += rho * std::log(rho / c) + (1.0 - rho) * std::log((1.0 - rho) / (1.0 - c));
  }
  return p;
}

BatchStats loss(const AxisModel& model, const Eigen::MatrixXd& batch, const TrainConfig& cfg) {
  return loss(model, batch, LossWeights::from(cfg));
}

BatchStats loss(const AxisModel& model, const Eigen::MatrixXd& batch, const LossWeights& w) {
  check_batch(model, batch);
  const auto acts = forward_all(model, batch);
  check_finite_layers(acts);
  return stats_from(acts, model, w);
}

Gradients backward(const AxisModel& model, const Eigen::MatrixXd& batch, const TrainConfig& cfg) {
  return backward(model, batch, LossWeights::from(cfg));
}

Gradients backward(const AxisModel& model, const Eigen::MatrixXd& batch, const LossWeights& w) {
  check_batch(model, batch);
  const auto acts = forward_all(model, batch);
  check_finite_layers(acts);
  return gradients_from(acts, model, w);
}

TrainResult train(const Eigen::MatrixXd& samples, Axis axis, const TrainConfig& cfg,
                  const NetworkTopology& topology) {
  cfg.validate();
  topology.validate();
  const auto n = static_cast<std::size_t>(samples.cols());
  if (static_cast<std::size_t>(samples.rows()) != topology.input_dim()) {
    throw Error(ErrorKind::argument, "training samples have the wrong dimension");
  }
  if (n < cfg.batch_size) {
    throw Error(ErrorKind::training, "need at least batch_size (" + std::to_string(cfg.batch_size) +
                                         ") samples, got " + std::to_string(n));
  }
  if (!samples.allFinite() || samples.minCoeff() < 0.0 || samples.maxCoeff() > 1.0) {
    throw Error(ErrorKind::training, "training samples must be finite and within [0, 1]");
  }

  // Shuffling draws from its own stream so init depends on the seed alone.
  std::mt19937_64 rng(cfg.seed ^ 0x6a09e667f3bcc909ull);
  TrainResult result;
  AxisModel& model = result.model;
  model.topology = topology;
  model.axis = axis;
  model.hyper = cfg;
  model.params = init_parameters(topology, cfg.seed);

  Gradients velocity;
  if (cfg.momentum) {
    for (const auto& p : model.params) {
      velocity.push_back({Eigen::MatrixXd::Zero(p.weights.rows(), p.weights.cols()),
                          Eigen::VectorXd::Zero(p.bias.size())});
    }
  }

  const LossWeights weights = LossWeights::from(cfg);
  const std::size_t batches = (n + cfg.batch_size - 1) / cfg.batch_size;
  result.stats.reserve(cfg.epochs * batches);
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  Eigen::MatrixXd batch;

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t i = n - 1; i > 0; --i) {
      const auto j = static_cast<std::size_t>(unit_uniform(rng) * static_cast<double>(i + 1));
      std::swap(order[i], order[std::min(j, i)]);
    }
    for (std::size_t b = 0; b < batches; ++b) {
      const std::size_t begin = b * cfg.batch_size;
      const std::size_t size = std::min(cfg.batch_size, n - begin);
      batch.resize(samples.rows(), static_cast<Eigen::Index>(size));
      for (std::size_t k = 0; k < size; ++k) {
        batch.col(static_cast<Eigen::Index>(k)) = samples.col(order[begin + k]);
      }

      const auto acts = forward_all(model, batch);
      BatchStats s = stats_from(acts, model, weights);
      s.epoch = epoch;
      s.batch = b;
      if (!std::isfinite(s.total_loss)) {
        const std::string last_good =
            epoch == 0 ? "none" : std::to_string(epoch - 1);
        throw Error(ErrorKind::training, "loss diverged at epoch " + std::to_string(epoch) +
                                             " batch " + std::to_string(b) +
                                             "; last good epoch: " + last_good);
      }
      result.stats.push_back(s);

      const Gradients g = gradients_from(acts, model, weights);
      for (std::size_t l = 0; l < model.params.size(); ++l) {
        if (cfg.momentum) {
          velocity[l].weights = TrainConfig::kMomentumCoefficient * velocity[l].weights -
                                cfg.learning_rate * g[l].weights;
          velocity[l].bias =
              TrainConfig::kMomentumCoefficient * velocity[l].bias - cfg.learning_rate * g[l].bias;
          model.params[l].weights += velocity[l].weights;
          model.params[l].bias += velocity[l].bias;
        } else {
          model.params[l].weights -= cfg.learning_rate * g[l].weights;
          model.params[l].bias -= cfg.learning_rate * g[l].bias;
        }
      }
    }
  }

  const Eigen::MatrixXd out = reconstruct(model, samples);
  model.train_mse = (out - samples).squaredNorm() / static_cast<double>(samples.size());
  model.validate();
  return result;
}

Eigen::MatrixXd stack_axis(std::span<const PostureTriplet> postures, Axis axis) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(kKeptJointCount),
                    static_cast<Eigen::Index>(postures.size()));
  for (std::size_t c = 0; c < postures.size(); ++c) {
    const AxisVector& v = postures[c].axis(axis);
    for (std::size_t r = 0; r < kKeptJointCount; ++r) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v[r];
    }
  }
  return m;
}

double epoch_mean_loss(std::span<const BatchStats> stats, std::size_t epoch) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& s : stats) {
    if (s.epoch == epoch) {
      sum += s.total_loss;
      ++count;
    }
  }
  if (count == 0) throw Error(ErrorKind::argument, "no batches logged for epoch " + std::to_string(epoch));
  return sum / static_cast<double>(count);
}

}  // namespace gaitae
