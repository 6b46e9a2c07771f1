#pragma once

// Gait abnormality index: per-axis reconstruction errors fused with
// weights inversely proportional to each model's training error, then
// averaged over fixed windows and whole sequences.

#include <cstddef>
#include <span>
#include <vector>

#include "gaitae/autoencoder.hpp"
#include "gaitae/skeleton.hpp"

namespace gaitae {

struct FusionWeights {
  double x = 1.0;
  double y = 1.0;
  double z = 1.0;

  double operator[](Axis a) const { return a == Axis::X ? x : a == Axis::Y ? y : z; }
};

// w_k = (e_x + e_y + e_z) / e_k. Any e_k <= 0 is a degenerate-training error.
FusionWeights fusion_weights(double e_x, double e_y, double e_z);

struct AxisErrors {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double operator[](Axis a) const { return a == Axis::X ? x : a == Axis::Y ? y : z; }
};

enum class FusionMode { weighted, unweighted };

// weighted: sum_k w_k * e_k; unweighted: sum_k e_k.
double fuse(const AxisErrors& errors, const FusionWeights& weights, FusionMode mode);

class ScorerBundle {
 public:
  // All three models must be trained and tagged X, Y, Z respectively.
  ScorerBundle(AxisModel x, AxisModel y, AxisModel z);

  const AxisModel& model(Axis a) const;
  const FusionWeights& weights() const { return weights_; }

  AxisErrors axis_errors(const PostureTriplet& p) const;
  double frame_index(const PostureTriplet& p, FusionMode mode) const;

  // Per-frame axis errors for a whole sequence, batched per model.
  std::vector<AxisErrors> axis_errors(std::span<const PostureTriplet> frames) const;

 private:
  AxisModel x_;
  AxisModel y_;
  AxisModel z_;
  FusionWeights weights_;
};

inline constexpr std::size_t kDefaultSegmentLength = 20;

struct IndexSeries {
  std::vector<double> per_frame;
  std::size_t segment_length = kDefaultSegmentLength;
  std::vector<double> per_segment;
  double per_sequence = 0.0;
};

// Non-overlapping consecutive windows; the final partial window is kept at
// its true size.
IndexSeries aggregate(std::vector<double> per_frame, std::size_t segment_length = kDefaultSegmentLength);

}  // namespace gaitae
