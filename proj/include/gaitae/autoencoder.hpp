#pragma once

// Fully connected sparse auto-encoder trained with mini-batch gradient
// descent on   recon_mse + beta * KL(rho || rho_hat) + lambda * sum(W^2).
//
// Samples are stored column-wise: a batch is a (input_dim x batch_size)
// matrix. Layer 0 is the sparsity layer; its batch-mean activations feed
// the KL penalty, so it must use a sigmoid.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "gaitae/skeleton.hpp"

namespace gaitae {

enum class Activation : std::uint8_t { sigmoid, tanh };

std::string_view activation_name(Activation a);
Activation parse_activation(std::string_view name);

struct LayerSpec {
  std::size_t in_dim = 0;
  std::size_t out_dim = 0;
  Activation activation = Activation::sigmoid;

  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

struct NetworkTopology {
  std::vector<LayerSpec> layers;

  // 17-128-32-8-32-128-17: sigmoid, tanh x4, sigmoid.
  static NetworkTopology standard();

  // Symmetric auto-encoder from the encoder widths, e.g. {5, 8, 3, 2}
  // gives 5-8-3-2-3-8-5 with the standard activation pattern (sigmoid on
  // the first and last layer, tanh elsewhere).
  static NetworkTopology mirrored(std::span<const std::size_t> encoder_dims);

  std::size_t input_dim() const { return layers.front().in_dim; }
  std::size_t output_dim() const { return layers.back().out_dim; }
  // Index of the layer whose output is the latent code.
  std::size_t latent_layer() const { return layers.size() / 2 - 1; }
  std::size_t parameter_count() const;

  bool is_standard() const;
  void validate() const;

  friend bool operator==(const NetworkTopology&, const NetworkTopology&) = default;
};

struct TrainConfig {
  double rho = 0.05;
  double sparsity_weight = 0.1;  // beta
  double l2_weight = 1e-4;       // lambda
  double learning_rate = 1e-3;
  std::size_t batch_size = 64;
  std::size_t epochs = 200;
  std::uint64_t seed = 0;
  bool momentum = false;  // heavy-ball SGD with coefficient 0.9 when set

  static constexpr double kMomentumCoefficient = 0.9;

  void validate() const;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

struct DenseLayer {
  Eigen::MatrixXd weights;  // out_dim x in_dim
  Eigen::VectorXd bias;     // out_dim
};

using Parameters = std::vector<DenseLayer>;

struct AxisModel {
  NetworkTopology topology;
  Parameters params;
  Axis axis = Axis::X;
  std::optional<double> train_mse;  // e_k, set once training completes
  TrainConfig hyper;

  bool trained() const { return train_mse.has_value(); }
  // Shapes match the topology, all parameters finite, train_mse >= 0.
  void validate() const;
};

// Uniform Glorot init in +-sqrt(6 / (in + out)), zero biases.
Parameters init_parameters(const NetworkTopology& topology, std::uint64_t seed);

struct ForwardResult {
  Eigen::VectorXd output;
  // activations[i] is the output of layer i; activations.back() == output.
  std::vector<Eigen::VectorXd> activations;

  const Eigen::VectorXd& sparse_layer() const { return activations.front(); }
};

ForwardResult forward(const AxisModel& model, std::span<const double> input);

// Batched forward pass, columns are samples. Returns the reconstruction.
Eigen::MatrixXd reconstruct(const AxisModel& model, const Eigen::MatrixXd& inputs);

// Per-component mean squared reconstruction error of one sample.
double reconstruction_mse(const AxisModel& model, std::span<const double> input);

// Per-sample reconstruction errors (one per column of `inputs`).
Eigen::VectorXd reconstruction_errors(const AxisModel& model, const Eigen::MatrixXd& inputs);

// Sum over units of KL(rho || rho_hat_j), natural log. rho_hat values are
// clamped to [kRhoHatEpsilon, 1 - kRhoHatEpsilon]; values outside [0, 1]
// are a contract violation.
inline constexpr double kRhoHatEpsilon = 1e-7;
double kl_sparsity(double rho, std::span<const double> rho_hat);

struct BatchStats {
  std::size_t epoch = 0;
  std::size_t batch = 0;
  double recon_loss = 0.0;
  double kl_penalty = 0.0;
  double l2_term = 0.0;
  double total_loss = 0.0;

  friend bool operator==(const BatchStats&, const BatchStats&) = default;
};

// Term multipliers of the composite loss. TrainConfig maps to
// {1, beta, lambda}; the gradient checks switch terms on and off.
struct LossWeights {
  double recon = 1.0;
  double sparsity = 0.0;
  double l2 = 0.0;
  double rho = 0.05;

  static LossWeights from(const TrainConfig& cfg) {
    return {1.0, cfg.sparsity_weight, cfg.l2_weight, cfg.rho};
  }
};

BatchStats loss(const AxisModel& model, const Eigen::MatrixXd& batch, const TrainConfig& cfg);
BatchStats loss(const AxisModel& model, const Eigen::MatrixXd& batch, const LossWeights& w);

using Gradients = std::vector<DenseLayer>;

Gradients backward(const AxisModel& model, const Eigen::MatrixXd& batch, const TrainConfig& cfg);
Gradients backward(const AxisModel& model, const Eigen::MatrixXd& batch, const LossWeights& w);

struct TrainResult {
  AxisModel model;
  std::vector<BatchStats> stats;  // one entry per mini-batch, in order
};

// Trains one axis model on `samples` (input_dim x n, normal gaits only).
// Throws a training error if n < batch_size or the loss goes non-finite.
TrainResult train(const Eigen::MatrixXd& samples, Axis axis, const TrainConfig& cfg,
                  const NetworkTopology& topology = NetworkTopology::standard());

// Stacks one axis of each posture as a column.
Eigen::MatrixXd stack_axis(std::span<const PostureTriplet> postures, Axis axis);

// Mean total loss over the batches of one epoch.
double epoch_mean_loss(std::span<const BatchStats> stats, std::size_t epoch);

}  // namespace gaitae
