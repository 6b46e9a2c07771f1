#pragma once

// Test-only reference computations. Nothing here calls into the library's
// numeric paths: forward passes, losses and AUC are recomputed with plain
// loops so they can check the implementation independently.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "gaitae/autoencoder.hpp"
#include "gaitae/evalmetrics.hpp"

namespace gaitae::oracle {

inline double activate(Activation a, double z) {
  return a == Activation::sigmoid ? 1.0 / (1.0 + std::exp(-z)) : std::tanh(z);
}

// Straight-line evaluation: every layer output as a plain vector.
inline std::vector<std::vector<double>> forward_layers(const AxisModel& m, std::span<const double> input) {
  std::vector<std::vector<double>> outs;
  std::vector<double> a(input.begin(), input.end());
  for (std::size_t l = 0; l < m.topology.layers.size(); ++l) {
    const auto& shape = m.topology.layers[l];
    const auto& p = m.params[l];
    std::vector<double> next(shape.out_dim);
    for (std::size_t r = 0; r < shape.out_dim; ++r) {
      double z = p.bias[static_cast<Eigen::Index>(r)];
      for (std::size_t c = 0; c < shape.in_dim; ++c) {
        z += p.weights(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) * a[c];
      }
      next[r] = activate(shape.activation, z);
    }
    outs.push_back(next);
    a = std::move(next);
  }
  return outs;
}

// KL sum in long double, with the same clamp rule.
inline long double kl_sum(long double rho, std::span<const double> rho_hat) {
  long double p = 0.0L;
  for (double r : rho_hat) {
    const long double c = std::clamp<long double>(r, 1e-7L, 1.0L - 1e-7L);
    p += rho * std::log(rho / c) + (1.0L - rho) * std::log((1.0L - rho) / (1.0L - c));
  }
  return p;
}

struct TermWeights {
  double recon = 1.0;
  double sparsity = 0.0;
  double l2 = 0.0;
  double rho = 0.05;
};

// Composite loss over a batch (columns are samples), loops only.
inline double loss(const AxisModel& m, const Eigen::MatrixXd& batch, const TermWeights& w) {
  const std::size_t n = static_cast<std::size_t>(batch.cols());
  const std::size_t d = static_cast<std::size_t>(batch.rows());
  const std::size_t units = m.topology.layers.front().out_dim;
  double sq = 0.0;
  std::vector<double> rho_hat(units, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<double> x(d);
    for (std::size_t i = 0; i < d; ++i) x[i] = batch(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(s));
    const auto outs = forward_layers(m, x);
    for (std::size_t i = 0; i < d; ++i) sq += (outs.back()[i] - x[i]) * (outs.back()[i] - x[i]);
    for (std::size_t j = 0; j < units; ++j) rho_hat[j] += outs.front()[j] / static_cast<double>(n);
  }
  double l2 = 0.0;
  for (const auto& p : m.params) {
    for (Eigen::Index i = 0; i < p.weights.size(); ++i) l2 += p.weights.data()[i] * p.weights.data()[i];
  }
  const double recon = sq / static_cast<double>(n * d);
  return w.recon * recon + w.sparsity * static_cast<double>(kl_sum(w.rho, rho_hat)) + w.l2 * l2;
}

// Central differences, one parameter at a time, flattened layer by layer
// (weights column-major, then biases).
inline std::vector<double> finite_difference_gradient(AxisModel m, const Eigen::MatrixXd& batch,
                                                      const TermWeights& w, double h = 1e-5) {
  std::vector<double> g;
  for (auto& p : m.params) {
    for (double* block : {p.weights.data(), p.bias.data()}) {
      const Eigen::Index size = block == p.weights.data() ? p.weights.size() : p.bias.size();
      for (Eigen::Index i = 0; i < size; ++i) {
        const double saved = block[i];
        block[i] = saved + h;
        const double up = loss(m, batch, w);
        block[i] = saved - h;
        const double down = loss(m, batch, w);
        block[i] = saved;
        g.push_back((up - down) / (2.0 * h));
      }
    }
  }
  return g;
}

inline std::vector<double> flatten(const Gradients& grads) {
  std::vector<double> g;
  for (const auto& p : grads) {
    g.insert(g.end(), p.weights.data(), p.weights.data() + p.weights.size());
    g.insert(g.end(), p.bias.data(), p.bias.data() + p.bias.size());
  }
  return g;
}

// ||a - b|| / max(||a||, ||b||); 0 when both vanish.
inline double relative_error(const std::vector<double>& a, const std::vector<double>& b) {
  double diff = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  const double denom = std::sqrt(std::max(na, nb));
  return denom == 0.0 ? 0.0 : std::sqrt(diff) / denom;
}

// Exhaustive pairwise ranking AUC: P(abnormal > normal) + 0.5 P(tie).
inline double pairwise_auc(std::span<const LabeledScore> scores) {
  double good = 0.0;
  double pairs = 0.0;
  for (const auto& a : scores) {
    if (a.label != Label::abnormal) continue;
    for (const auto& n : scores) {
      if (n.label != Label::normal) continue;
      pairs += 1.0;
      if (a.score > n.score) good += 1.0;
      else if (a.score == n.score) good += 0.5;
    }
  }
  return good / pairs;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

// Random model on the given topology with weights in [-scale, scale] and
// small random biases.
inline AxisModel random_model(const NetworkTopology& t, std::mt19937_64& rng, double scale = 1.0) {
  AxisModel m;
  m.topology = t;
  for (const auto& shape : t.layers) {
    DenseLayer p;
    p.weights.resize(static_cast<Eigen::Index>(shape.out_dim), static_cast<Eigen::Index>(shape.in_dim));
    p.bias.resize(static_cast<Eigen::Index>(shape.out_dim));
    for (Eigen::Index i = 0; i < p.weights.size(); ++i) p.weights.data()[i] = uniform(rng, -scale, scale);
    for (Eigen::Index i = 0; i < p.bias.size(); ++i) p.bias[i] = uniform(rng, -0.3, 0.3);
    m.params.push_back(std::move(p));
  }
  return m;
}

inline Eigen::MatrixXd random_batch(std::size_t dim, std::size_t n, std::mt19937_64& rng) {
  Eigen::MatrixXd b(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < b.size(); ++i) b.data()[i] = uniform(rng, 0.0, 1.0);
  return b;
}

inline NetworkTopology reduced_topology() {
  const std::size_t dims[] = {5, 8, 3, 2};
  return NetworkTopology::mirrored(dims);
}

}  // namespace gaitae::oracle
